#pragma once

#include <span>
#include <string>
#include <vector>

#include "sparsemine/dictionary_learning.hpp"
#include "sparsemine/types.hpp"

namespace sparsemine {

/// Maximum over all lags of the normalized cross-correlation magnitude.
///
/// Both inputs are zero padded, so every shift with at least one overlapping
/// sample is considered. Result lies in [0, 1]. Throws InvalidArgument for
/// mismatched lengths or a zero-energy input.
double similarity(const Vector& y, const Vector& y_hat);

/// similarity() for every column pair.
std::vector<double> similarity_samples(const SignalMatrix& signals, const SignalMatrix& reconstructed);

/// Normalized histogram of column similarities on [0, 1] with `bins` equal
/// bins (1.0 falls in the top bin). Mass sums to 1.
std::vector<double> similarity_epdf(const SignalMatrix& signals, const SignalMatrix& reconstructed,
                                    Index bins);

/// Histogram helper used by similarity_epdf.
std::vector<double> unit_interval_histogram(std::span<const double> values, Index bins);

/// Population standard deviation over the mean. Needs >= 2 samples and a nonzero mean.
double coeff_variation(std::span<const double> samples);

/// Empirical cumulative distribution function.
class Ecdf {
 public:
  /// Throws InvalidArgument for an empty sample.
  explicit Ecdf(std::vector<double> samples);

  /// Fraction of samples <= v.
  double operator()(double v) const;

  Index size() const noexcept { return static_cast<Index>(sorted_.size()); }
  const std::vector<double>& sorted() const noexcept { return sorted_; }

 private:
  std::vector<double> sorted_;
};

/// sup_v |F(v) - G(v)| over the merged sample grid; lengths may differ.
double ks_distance(const Ecdf& f, const Ecdf& g);

/// sqrt(-(2 / L) ln(alpha / 2)): the largest two-sample KS distance
/// compatible with a common distribution at level alpha.
double dkw_bound(Index samples, double alpha);

/// dkw_bound(L, alpha) - ks_distance(F, G); positive keeps the null
/// hypothesis. Requires |F| == |G|.
double dkw_metric(const Ecdf& f, const Ecdf& g, double alpha);

struct SweepRecord {
  Learner learner = Learner::ksvd;
  TrainConfig config;
  double cv = 0.0;
  double ks_distance = 0.0;
  double dkw_metric = 0.0;
  double mean_similarity = 0.0;
  double wall_time_s = 0.0;
  bool failed = false;
  std::string error;
};

struct SweepResult {
  std::vector<double> reference_similarity;
  std::vector<SweepRecord> records;  ///< one per grid point, in grid order
};

/// Trains `learner` on the reference config, then on every grid point, and
/// compares the similarity ECDFs of each reconstruction with the reference.
/// A grid point whose training throws is flagged and the sweep continues.
/// Records carry configs with K resolved. Grid points run on up to `jobs`
/// threads; records stay in grid order.
SweepResult parameter_sweep(Learner learner, std::span<const TrainConfig> grid,
                            const TrainConfig& reference, const SignalMatrix& signals, double alpha,
                            unsigned jobs = 1);

/// Parameter names relevant to a learner, in CSV column order.
std::vector<std::string> sweep_parameter_names(Learner learner);

/// Values of sweep_parameter_names(learner) taken from config, as CSV fields.
/// Unset optional fields print as "auto"; the entropy rule prints as "entropy".
std::vector<std::string> sweep_parameter_values(Learner learner, const TrainConfig& config);

}  // namespace sparsemine
