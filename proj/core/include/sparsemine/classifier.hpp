#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsemine/dictionary.hpp"
#include "sparsemine/gpr_synth.hpp"
#include "sparsemine/sparse_coding.hpp"
#include "sparsemine/types.hpp"

namespace sparsemine {

/// exp(-gamma ||a - b||^2).
double rbf_kernel(const Vector& a, const Vector& b, double gamma);

/// Gram matrix of the RBF kernel over the columns of `features`.
Matrix rbf_kernel_matrix(const Matrix& features, double gamma);

struct SvmParams {
  double cost = 1.0;   ///< C
  double gamma = 1.0;
  double tolerance = 1e-3;  ///< maximal KKT violation at termination
  Index max_updates = 100000;
};

/// Two-class soft-margin RBF SVM. Decision f(x) = sum_i coef_i K(sv_i, x) + bias;
/// f > 0 predicts `positive_class`.
struct BinarySvm {
  Matrix support_vectors;  ///< one column per support vector
  Vector coefficients;     ///< alpha_i y_i
  double bias = 0.0;
  double gamma = 1.0;
  int positive_class = 1;
  int negative_class = -1;
  bool converged = true;
  Index updates = 0;
  double kkt_violation = 0.0;

  double decision(const Vector& x) const;
};

/// Diagnostic output of the dual solver, for tests.
struct SmoTrace {
  std::vector<double> dual_objective;  ///< after every accepted pair update
  Vector alpha;
  Vector labels;  ///< +1 / -1
};

/// SMO with second-order working-set selection on the full kernel matrix.
///
/// `labels` hold +1 / -1. Throws InvalidArgument when only one class is
/// present or C <= 0. Hitting max_updates returns the current model with
/// converged = false.
BinarySvm svm_train_binary(const Matrix& features, std::span<const int> labels,
                           const SvmParams& params, SmoTrace* trace = nullptr);

/// One-vs-one multiclass model over classes {0, ..., n-1}.
struct SvmModel {
  Index class_count = 0;
  double cost = 1.0;
  double gamma = 1.0;
  std::uint64_t dictionary_fingerprint = 0;  ///< 0 when not tied to a dictionary
  std::vector<BinarySvm> machines;

  /// Majority vote; ties go to the lowest class id.
  int predict(const Vector& x) const;
  std::vector<int> predict(const Matrix& features, unsigned jobs = 1) const;
};

/// Trains every pair of classes that are both present. labels lie in
/// [0, n); n = max label + 1. Throws InvalidArgument with fewer than two classes.
SvmModel svm_train_multiclass(const Matrix& features, std::span<const int> labels,
                              const SvmParams& params);

struct CrossValidationResult {
  double best_cost = 0.0;
  double best_gamma = 0.0;
  double best_accuracy = 0.0;
  std::vector<double> fold_accuracies;  ///< for the selected cell
  Matrix accuracy;                      ///< mean accuracy, rows = cost grid, cols = gamma grid
  bool folds_shrunk = false;            ///< some class had fewer samples than folds
};

/// Stratified k-fold grid search. Ties prefer smaller C, then smaller gamma.
/// Throws InvalidArgument for an empty grid or folds < 2.
CrossValidationResult cross_validate(const Matrix& features, std::span<const int> labels,
                                     std::span<const double> cost_grid,
                                     std::span<const double> gamma_grid, Index folds,
                                     std::uint64_t seed = 0, unsigned jobs = 1);

/// C in {0.1, 1, 10, 100}.
std::vector<double> default_cost_grid();
/// gamma in {2^-7, ..., 2^3}.
std::vector<double> default_gamma_grid();

/// Predicted class per pixel; pixel p = y * x_cells + x.
struct ClassMap {
  Index x_cells = 0;
  Index y_cells = 0;
  std::vector<int> classes;

  int at(Index x, Index y) const { return classes[static_cast<std::size_t>(y * x_cells + x)]; }
};

/// Codes a survey with the dictionary and predicts every pixel.
///
/// When `row_mask` is present the same rows are taken from the profiles and
/// the atoms; masked atoms are renormalized for pursuit and the codes are
/// rescaled so they stay comparable with full-length codes. Throws
/// DataError("dictionary/model mismatch") when the model was trained on a
/// different dictionary.
ClassMap classify_survey(const Dictionary& dict, const SvmModel& model, const SurveyDataset& survey,
                         const StopRule& stop,
                         std::optional<std::span<const Index>> row_mask = std::nullopt,
                         unsigned jobs = 1);

/// Sparse codes (dense K x L) of signals through a row-masked dictionary.
Matrix masked_codes(const Dictionary& dict, const SignalMatrix& signals, const StopRule& stop,
                    std::optional<std::span<const Index>> row_mask, unsigned jobs = 1);

/// Columns are ground truth, rows are predictions; each present column sums to 1.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  Matrix counts;
  Matrix probabilities;
  std::vector<bool> missing_truth;  ///< classes with no ground-truth pixels
};

ConfusionMatrix confusion_matrix(const ClassMap& map, std::span<const int> truth,
                                 std::vector<std::string> class_names);

struct PccResult {
  /// P_CC per class id; mines use halo pixels, clutter uses pixels outside all halos.
  std::vector<double> per_class;
  std::vector<Index> evaluated;  ///< n_t per mine class, n_c for clutter
  std::vector<Index> correct;    ///< n_m / n_d
};

/// Probabilities of correct classification from target halos. Throws
/// InvalidArgument for an empty halo.
PccResult pcc(const ClassMap& map, std::span<const Halo> halos, std::span<const int> truth,
              Index class_count);

}  // namespace sparsemine
