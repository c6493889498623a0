#pragma once

#include <optional>
#include <vector>

#include "sparsemine/dictionary.hpp"
#include "sparsemine/types.hpp"

namespace sparsemine {

/// Sparse coefficient vector of dimension `dim`.
///
/// Indices are strictly increasing and below dim; values hold no explicit zeros.
struct SparseVector {
  std::vector<Index> indices;
  std::vector<double> values;
  Index dim = 0;

  Index nonzeros() const noexcept { return static_cast<Index>(indices.size()); }
  bool empty() const noexcept { return indices.empty(); }

  Vector dense() const;

  /// True if both vectors have at least one index in common.
  bool shares_support(const SparseVector& other) const;

  /// Builds a canonical vector from unordered (index, value) pairs; zeros are dropped.
  static SparseVector from_pairs(Index dim, std::vector<Index> indices, std::vector<double> values);

  /// Nonzero entries of a dense vector.
  static SparseVector from_dense(const Vector& x);
};

/// K x L sparse coefficient matrix, stored column by column.
struct SparseCodes {
  Index atoms = 0;
  std::vector<SparseVector> columns;
  /// Columns whose coding failed numerically; they are left empty.
  std::vector<bool> failed;

  Index cols() const noexcept { return static_cast<Index>(columns.size()); }
  Index failed_count() const;

  Matrix dense() const;
  /// D * X.
  Matrix reconstruct(const Matrix& atoms) const;
};

/// Stopping criteria for greedy pursuit. At least one field must be set.
struct StopRule {
  /// K_s: maximal number of nonzeros.
  std::optional<Index> max_nonzeros;
  /// delta: stop once ||y - Dx||_2 <= delta * ||y||_2.
  std::optional<double> max_residual;

  static StopRule sparsity(Index k) { return {k, std::nullopt}; }
  static StopRule residual(double delta) { return {std::nullopt, delta}; }

  /// Throws InvalidArgument unless K_s >= 1, delta in [0, 1), and one is set.
  void validate() const;
};

/// Optional per-step record of an omp() run.
struct OmpTrace {
  std::vector<Index> selected;
  /// ||r|| after each selection; residual_norms[0] is ||y||.
  std::vector<double> residual_norms;
};

/// Orthogonal matching pursuit of a single signal.
///
/// Each step adds the atom with the largest |<d_j, r>| (lowest index on ties)
/// and refits all active coefficients by least squares. Stops when a rule in
/// `stop` fires, when min(M, K) atoms are active, or when no atom correlates
/// with the residual. Throws NumericalError("degenerate support") if the
/// selected atoms become linearly dependent.
SparseVector omp(const Vector& y, const Dictionary& dict, const StopRule& stop,
                 OmpTrace* trace = nullptr);

/// Column-wise OMP sharing the Gram matrix D^T D and the projections D^T Y.
///
/// Produces the same supports and values as omp() on every column. Columns
/// that fail numerically come back empty and flagged in SparseCodes::failed.
SparseCodes batch_omp(const SignalMatrix& signals, const Dictionary& dict, const StopRule& stop,
                      unsigned jobs = 1);

/// Same as above with a caller-provided Gram matrix (must equal D^T D).
SparseCodes batch_omp(const SignalMatrix& signals, const Dictionary& dict, const Matrix& gram,
                      const StopRule& stop, unsigned jobs = 1);

/// Gram-form OMP of one signal from dty = D^T y, gram = D^T D and ||y||^2.
/// Atoms with a zero Gram diagonal are never selected.
SparseVector omp_gram(const Vector& dty, const Matrix& gram, double y_sq_norm, const StopRule& stop,
                      Index signal_dim);

/// Batch OMP over an arbitrary atom matrix whose columns are unit norm or zero.
/// Zero columns are never selected. Used for row-masked dictionaries.
SparseCodes batch_omp_atoms(const SignalMatrix& signals, const Matrix& atoms, const StopRule& stop,
                            unsigned jobs = 1);

/// Normalized Shannon entropy of the histogram of the row-wise mean of Y.
///
/// The histogram spans [min, max] of the mean vector with `bins` equal bins
/// (default ceil(sqrt(M))). Returns a value in [0, 1]; 0 for a constant mean.
double entropy_threshold(const SignalMatrix& signals, std::optional<Index> bins = std::nullopt);

struct LassoResult {
  SparseVector code;
  bool converged = false;
  Index sweeps = 0;
  /// 0.5 ||y - Dx||^2 + lambda ||x||_1 after every sweep.
  std::vector<double> objective;
};

/// Cyclic coordinate descent with soft thresholding for
/// min 0.5 ||y - Dx||^2 + lambda ||x||_1.
///
/// Stops when the largest coordinate update is below 1e-8 or after 10000 sweeps.
LassoResult lasso_cd(const Vector& y, const Dictionary& dict, double lambda);

/// Gram-form lasso used by online learners: dty = D^T y, gram = D^T D,
/// y_sq_norm = ||y||^2. `warm` seeds the iterate when given.
LassoResult lasso_cd_gram(const Vector& dty, const Matrix& gram, double y_sq_norm, double lambda,
                          const Vector* warm = nullptr);

/// Exhaustive best approximation with at most `max_nonzeros` atoms.
///
/// Enumerates every support of size <= K_s; throws InvalidArgument when the
/// number of supports exceeds 1e6.
SparseVector sparse_best_oracle(const Vector& y, const Dictionary& dict, Index max_nonzeros);

/// ||y - D x||_2.
double residual_norm(const Vector& y, const Matrix& atoms, const SparseVector& x);

}  // namespace sparsemine
