#include "sparsemine/stats_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sparsemine/errors.hpp"
#include "sparsemine/format.hpp"
#include "sparsemine/parallel.hpp"

namespace sparsemine {

double similarity(const Vector& y, const Vector& y_hat) {
  if (y.size() != y_hat.size()) throw InvalidArgument("similarity: length mismatch");
  const double energy = std::sqrt(y.squaredNorm() * y_hat.squaredNorm());
  if (!(energy > 0.0)) throw InvalidArgument("zero-energy signal");
  const Index n = y.size();
  double best = 0.0;
  for (Index lag = -(n - 1); lag <= n - 1; ++lag) {
    const Index lo = std::max<Index>(0, -lag);
    const Index hi = std::min(n, n - lag);
    const double c = y.segment(lo, hi - lo).dot(y_hat.segment(lo + lag, hi - lo));
    best = std::max(best, std::abs(c));
  }
  return std::min(best / energy, 1.0);
}

std::vector<double> similarity_samples(const SignalMatrix& signals, const SignalMatrix& reconstructed) {
  if (signals.rows() != reconstructed.rows() || signals.cols() != reconstructed.cols()) {
    throw InvalidArgument("similarity: matrix shapes differ");
  }
  std::vector<double> out(static_cast<std::size_t>(signals.cols()));
  for (Index c = 0; c < signals.cols(); ++c) {
    out[static_cast<std::size_t>(c)] = similarity(signals.col(c), reconstructed.col(c));
  }
  return out;
}

std::vector<double> unit_interval_histogram(std::span<const double> values, Index bins) {
  if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
  if (values.empty()) throw InvalidArgument("histogram of an empty sample");
  std::vector<double> mass(static_cast<std::size_t>(bins), 0.0);
  for (double v : values) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    const auto b = std::min<Index>(static_cast<Index>(clamped * static_cast<double>(bins)), bins - 1);
    mass[static_cast<std::size_t>(b)] += 1.0;
  }
  for (double& m : mass) m /= static_cast<double>(values.size());
  return mass;
}

std::vector<double> similarity_epdf(const SignalMatrix& signals, const SignalMatrix& reconstructed, Index bins) {
  return unit_interval_histogram(similarity_samples(signals, reconstructed), bins);
}

double coeff_variation(std::span<const double> samples) {
  if (samples.size() < 2) throw InvalidArgument("CV needs at least two samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (mean == 0.0) throw InvalidArgument("CV undefined for zero mean");
  double var = 0.0;
  for (double v : samples) var += (v - mean) * (v - mean);
  return std::sqrt(var / n) / mean;
}

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw InvalidArgument("ECDF of an empty sample");
  if (std::any_of(sorted_.begin(), sorted_.end(), [](double v) { return std::isnan(v); })) {
    throw InvalidArgument("ECDF sample contains NaN");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double v) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), v);
  return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double ks_distance(const Ecdf& f, const Ecdf& g) {
  const auto& a = f.sorted();
  const auto& b = g.sorted();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  // Both step functions only change at sample values; walk the merged grid.
  while (i < a.size() || j < b.size()) {
    double v;
    if (j == b.size() || (i < a.size() && a[i] <= b[j])) {
      v = a[i];
    } else {
      v = b[j];
    }
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double dkw_bound(Index samples, double alpha) {
  if (samples < 1) throw InvalidArgument("DKW bound needs L >= 1");
  if (!(alpha > 0.0 && alpha < 2.0)) throw InvalidArgument("DKW bound needs 0 < alpha < 2");
  return std::sqrt(-(2.0 / static_cast<double>(samples)) * std::log(alpha / 2.0));
}

double dkw_metric(const Ecdf& f, const Ecdf& g, double alpha) {
  if (f.size() != g.size()) throw InvalidArgument("DKW metric needs samples of equal length");
  return dkw_bound(f.size(), alpha) - ks_distance(f, g);
}

std::vector<std::string> sweep_parameter_names(Learner learner) {
  switch (learner) {
    case Learner::ksvd:
      return {"K", "N_t", "K_s", "delta"};
    case Learner::odl:
      return {"K", "N_t", "K_s", "lambda", "batch"};
    case Learner::cbwlsu:
      return {"K", "K_s", "delta"};
    case Learner::dominodl:
      return {"K", "K_s", "delta", "N_b", "N_r", "N_u", "chi"};
  }
  return {};
}

std::vector<std::string> sweep_parameter_values(Learner learner, const TrainConfig& c) {
  auto count = [](Index v) { return std::to_string(v); };
  const std::string delta = c.entropy_delta ? "entropy" : c.delta ? format_double(*c.delta) : "auto";
  switch (learner) {
    case Learner::ksvd:
      return {count(c.atoms), count(c.iterations), count(c.sparsity), delta};
    case Learner::odl:
      return {count(c.atoms), count(c.iterations), count(c.sparsity), format_double(c.lambda), count(c.odl_batch)};
    case Learner::cbwlsu:
      return {count(c.atoms), count(c.sparsity), delta};
    case Learner::dominodl:
      return {count(c.atoms),        count(c.sparsity),    delta,
              count(c.new_batch),    count(c.previous_batch), count(c.drop_after),
              c.chi ? format_double(*c.chi) : "auto"};
  }
  return {};
}

SweepResult parameter_sweep(Learner learner, std::span<const TrainConfig> grid, const TrainConfig& reference,
                            const SignalMatrix& signals, double alpha, unsigned jobs) {
  if (grid.empty()) throw InvalidArgument("sweep grid is empty");
  dkw_bound(signals.cols(), alpha);  // validates alpha early

  auto reconstruct_similarity = [&](const TrainConfig& config) {
    const LearnResult fit = learn(learner, signals, config);
    return std::make_pair(similarity_samples(signals, fit.codes.reconstruct(fit.dictionary.atoms())),
                          fit.report.wall_time_s);
  };

  SweepResult out;
  out.reference_similarity = reconstruct_similarity(reference).first;
  const Ecdf ref(out.reference_similarity);

  out.records.resize(grid.size());
  parallel_for(static_cast<Index>(grid.size()), jobs, [&](Index g) {
    SweepRecord& rec = out.records[static_cast<std::size_t>(g)];
    rec.learner = learner;
    rec.config = grid[static_cast<std::size_t>(g)];
    try {
      rec.config.atoms = rec.config.resolved_atoms(signals);
      const auto [sims, seconds] = reconstruct_similarity(rec.config);
      const Ecdf ecdf(sims);
      rec.cv = coeff_variation(sims);
      rec.ks_distance = ks_distance(ecdf, ref);
      rec.dkw_metric = dkw_metric(ecdf, ref, alpha);
      rec.mean_similarity = std::accumulate(sims.begin(), sims.end(), 0.0) / static_cast<double>(sims.size());
      rec.wall_time_s = seconds;
    } catch (const Error& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });
  return out;
}

}  // namespace sparsemine
