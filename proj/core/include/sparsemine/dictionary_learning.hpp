#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsemine/dictionary.hpp"
#include "sparsemine/sparse_coding.hpp"
#include "sparsemine/types.hpp"

namespace sparsemine {

enum class Learner { ksvd, odl, cbwlsu, dominodl };

std::string_view to_string(Learner learner);
/// Parses "ksvd", "odl", "cbwlsu" or "dominodl"; throws InvalidArgument otherwise.
Learner parse_learner(std::string_view name);

/// Parameters shared by the four learners. Fields a learner does not use are ignored.
struct TrainConfig {
  Index atoms = 0;              ///< K; 0 selects min(3 M, L / 2)
  Index iterations = 50;        ///< N_t (K-SVD, ODL)
  Index sparsity = 3;           ///< K_s; 0 disables the sparsity rule
  std::optional<double> delta;  ///< relative residual rule for OMP
  bool entropy_delta = false;   ///< derive delta with entropy_threshold (overrides delta)
  Index new_batch = 30;         ///< N_b (DOMINODL)
  Index previous_batch = 10;    ///< N_r (DOMINODL)
  Index drop_after = 10;        ///< N_u (DOMINODL)
  std::optional<double> chi;    ///< DOMINODL convergence threshold
  double lambda = 0.1;          ///< ODL l1 weight, relative to ||y||_2
  Index odl_batch = 32;         ///< ODL samples drawn per iteration
  Index prune_min_usage = 1;
  double prune_max_coherence = 0.99;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument for out-of-range fields.
  void validate() const;

  /// K after resolving the automatic choice for a given training set.
  Index resolved_atoms(const SignalMatrix& signals) const;

  /// OMP stopping rule; resolves the entropy threshold against `signals`.
  StopRule stop_rule(const SignalMatrix& signals) const;

  /// chi, or 1e-3 ||Y||_F^2 / L when unset.
  double resolved_chi(const SignalMatrix& signals) const;
};

/// One DOMINODL iteration as recorded for inspection.
struct DominoIteration {
  Index iteration = 0;
  Index batch_begin = 0;
  Index batch_end = 0;
  std::vector<Index> previous_sample;  ///< M_i
  std::vector<Index> correlated;       ///< A_i, sorted
  Index updated_atoms = 0;
  Index active_pool = 0;  ///< training elements not yet dropped, after this iteration
  Index dropped = 0;      ///< elements dropped in this iteration
  double weighted_error = 0.0;
};

struct LearnReport {
  double wall_time_s = 0.0;
  Index iterations = 0;
  /// ||Y - D X||_F for batch learners, last weighted error for DOMINODL.
  double final_error = 0.0;
  Index atoms_replaced = 0;
  Index elements_dropped = 0;
  double delta_used = 0.0;  ///< resolved residual rule (0 when unset)
  std::vector<DominoIteration> trace;
};

struct LearnResult {
  Dictionary dictionary;
  SparseCodes codes;
  LearnReport report;
};

/// K distinct columns of Y drawn uniformly at random, normalized. Zero
/// columns are skipped. Throws InvalidArgument("not enough training columns")
/// when K > L and DataError when fewer than K nonzero columns exist.
Dictionary init_dictionary(const SignalMatrix& signals, Index atoms, std::uint64_t seed);

LearnResult ksvd(const SignalMatrix& signals, const TrainConfig& config);
LearnResult odl(const SignalMatrix& signals, const TrainConfig& config);
LearnResult cbwlsu(const SignalMatrix& signals, const TrainConfig& config);
LearnResult dominodl(const SignalMatrix& signals, const TrainConfig& config);

LearnResult learn(Learner learner, const SignalMatrix& signals, const TrainConfig& config);

/// One K-SVD atom step on dense codes with a maintained residual Y - D X.
///
/// Replaces atom k and row k of `codes` (restricted to signals using k) by
/// the leading singular pair of the restricted error. Returns false and
/// leaves everything untouched when no signal uses atom k.
bool ksvd_update_atom(Matrix& atoms, Matrix& codes, Matrix& residual, Index k);

/// Diagonal of W: 1 / ||e_j||^2 for each column of `errors`, capped at 1e12.
Vector representation_weights(const Matrix& errors);

inline constexpr double kMaxRepresentationWeight = 1e12;

/// Weighted least-squares solution for a subset of atoms.
///
/// Minimizes ||(R - D_S X_S) W^{1/2}||_F^2 over D_S, where R = target and
/// X_S = codes restricted to the rows of the subset. The Gram X_S W X_S^T is
/// inverted directly when well conditioned and with a ridge of
/// 1e-8 trace / |S| otherwise. Columns are returned unnormalized.
Matrix weighted_ls_solve(const Matrix& target, const Matrix& subset_codes, const Vector& weights);

/// Atom update used by CBWLSU and DOMINODL.
///
/// signals/codes hold the selected training elements (dense codes, K rows).
/// Atoms outside `subset` stay fixed: their contribution is removed from the
/// target before solving. Weights come from the current representation
/// error. Returns the |subset| updated atoms, unnormalized.
Matrix weighted_ls_update(const SignalMatrix& signals, const Matrix& codes, const Matrix& atoms,
                          std::span<const Index> subset);

struct PruneResult {
  Dictionary dictionary;
  std::vector<Index> replaced_atoms;
  std::vector<Index> replacement_columns;
};

/// Replaces atoms used by fewer than `min_usage` signals, or whose absolute
/// inner product with an earlier atom exceeds `max_coherence`, by the
/// normalized training column with the largest current residual. Each
/// training column is used at most once per call.
PruneResult prune_atoms(const Dictionary& dict, const SparseCodes& codes,
                        const SignalMatrix& signals, Index min_usage, double max_coherence);

}  // namespace sparsemine
