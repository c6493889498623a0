#include "sparsemine/sparse_coding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sparsemine/errors.hpp"
#include "sparsemine/parallel.hpp"

namespace sparsemine {

namespace {

constexpr double kDegenerateDiag = 1e-12;
// Correlations below this fraction of ||y|| are treated as zero.
constexpr double kNegligibleCorrelation = 1e-12;
constexpr double kLassoTolerance = 1e-8;
constexpr double kOracleBudget = 1e6;

Index step_cap(const StopRule& stop, Index m, Index k) {
  Index cap = std::min(m, k);
  if (stop.max_nonzeros) cap = std::min(cap, *stop.max_nonzeros);
  return cap;
}

// Incremental Cholesky factor of the Gram matrix of the active atoms.
class ActiveSetCholesky {
 public:
  explicit ActiveSetCholesky(Index capacity) : factor_(capacity, capacity) {}

  Index size() const noexcept { return n_; }

  // Appends an atom given its Gram column restricted to the active set and its
  // squared norm. Returns false when the new atom is numerically dependent.
  bool push(const Vector& cross, double self) {
    if (n_ > 0) {
      const Vector w = factor_.topLeftCorner(n_, n_).triangularView<Eigen::Lower>().solve(cross);
      const double diag = self - w.squaredNorm();
      if (!(diag > kDegenerateDiag * self)) return false;
      factor_.row(n_).head(n_) = w.transpose();
      factor_(n_, n_) = std::sqrt(diag);
    } else {
      if (!(self > 0.0)) return false;
      factor_(0, 0) = std::sqrt(self);
    }
    ++n_;
    return true;
  }

  Vector solve(const Vector& rhs) const {
    const auto l = factor_.topLeftCorner(n_, n_);
    const Vector z = l.triangularView<Eigen::Lower>().solve(rhs);
    return l.transpose().triangularView<Eigen::Upper>().solve(z);
  }

 private:
  Matrix factor_;
  Index n_ = 0;
};

SparseVector to_sparse(Index dim, const std::vector<Index>& support, const Vector& coeffs) {
  std::vector<double> values(coeffs.data(), coeffs.data() + coeffs.size());
  return SparseVector::from_pairs(dim, support, std::move(values));
}

}  // namespace

SparseVector omp_gram(const Vector& dty, const Matrix& gram, double y_sq_norm, const StopRule& stop,
                      Index signal_dim) {
  stop.validate();
  const Index k_atoms = gram.rows();
  if (gram.cols() != k_atoms || dty.size() != k_atoms) throw InvalidArgument("omp_gram: shape mismatch");
  const double y_norm = std::sqrt(y_sq_norm);
  if (y_norm == 0.0) return SparseVector{{}, {}, k_atoms};

  const Index cap = step_cap(stop, signal_dim, k_atoms);
  const double floor = kNegligibleCorrelation * y_norm;
  ActiveSetCholesky chol(std::max<Index>(cap, 1));
  std::vector<Index> support;
  std::vector<char> active(static_cast<std::size_t>(k_atoms), 0);
  Vector corr = dty;
  Vector coeffs;
  Vector dty_active;

  while (static_cast<Index>(support.size()) < cap) {
    if (stop.max_residual) {
      double err_sq = y_sq_norm;
      if (!support.empty()) err_sq -= coeffs.dot(dty_active);
      if (std::sqrt(std::max(err_sq, 0.0)) <= *stop.max_residual * y_norm) break;
    }
    Index best = -1;
    double best_abs = floor;
    for (Index j = 0; j < k_atoms; ++j) {
      if (active[static_cast<std::size_t>(j)] || !(gram(j, j) > 0.0)) continue;
      const double a = std::abs(corr(j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best < 0) break;

    Vector cross(static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) cross(static_cast<Index>(s)) = gram(support[s], best);
    if (!chol.push(cross, gram(best, best))) throw NumericalError("degenerate support");
    support.push_back(best);
    active[static_cast<std::size_t>(best)] = 1;

    dty_active.resize(static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) dty_active(static_cast<Index>(s)) = dty(support[s]);
    coeffs = chol.solve(dty_active);

    corr = dty;
    for (std::size_t s = 0; s < support.size(); ++s) {
      corr.noalias() -= coeffs(static_cast<Index>(s)) * gram.col(support[s]);
    }
  }
  if (support.empty()) return SparseVector{{}, {}, k_atoms};
  return to_sparse(k_atoms, support, coeffs);
}

namespace {

SparseCodes run_batch(const SignalMatrix& signals, const Matrix& atoms, const Matrix& gram,
                      const StopRule& stop, unsigned jobs) {
  stop.validate();
  if (signals.rows() != atoms.rows()) {
    throw InvalidArgument("signal length " + std::to_string(signals.rows()) +
                          " does not match dictionary rows " + std::to_string(atoms.rows()));
  }
  if (gram.rows() != atoms.cols() || gram.cols() != atoms.cols()) {
    throw InvalidArgument("Gram matrix shape does not match the dictionary");
  }
  SparseCodes codes;
  codes.atoms = atoms.cols();
  codes.columns.resize(static_cast<std::size_t>(signals.cols()));
  codes.failed.assign(static_cast<std::size_t>(signals.cols()), false);
  const Matrix dty = atoms.transpose() * signals;
  // std::vector<bool> is not safe for concurrent writes to neighbouring slots.
  std::vector<char> failed(static_cast<std::size_t>(signals.cols()), 0);
  parallel_for(signals.cols(), jobs, [&](Index i) {
    const auto slot = static_cast<std::size_t>(i);
    try {
      codes.columns[slot] =
          omp_gram(dty.col(i), gram, signals.col(i).squaredNorm(), stop, atoms.rows());
    } catch (const NumericalError&) {
      codes.columns[slot] = SparseVector{{}, {}, atoms.cols()};
      failed[slot] = 1;
    }
  });
  for (std::size_t i = 0; i < failed.size(); ++i) codes.failed[i] = failed[i] != 0;
  return codes;
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

Vector SparseVector::dense() const {
  Vector x = Vector::Zero(dim);
  for (std::size_t i = 0; i < indices.size(); ++i) x(indices[i]) = values[i];
  return x;
}

bool SparseVector::shares_support(const SparseVector& other) const {
  auto a = indices.begin();
  auto b = other.indices.begin();
  while (a != indices.end() && b != other.indices.end()) {
    if (*a == *b) return true;
    if (*a < *b) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

SparseVector SparseVector::from_pairs(Index dim, std::vector<Index> idx, std::vector<double> vals) {
  if (idx.size() != vals.size()) throw InvalidArgument("index/value length mismatch");
  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return idx[a] < idx[b]; });
  SparseVector out;
  out.dim = dim;
  for (std::size_t o : order) {
    if (idx[o] < 0 || idx[o] >= dim) throw InvalidArgument("sparse index out of range");
    if (!out.indices.empty() && out.indices.back() == idx[o]) {
      throw InvalidArgument("duplicate sparse index");
    }
    if (vals[o] == 0.0) continue;
    out.indices.push_back(idx[o]);
    out.values.push_back(vals[o]);
  }
  return out;
}

SparseVector SparseVector::from_dense(const Vector& x) {
  SparseVector out;
  out.dim = x.size();
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) {
      out.indices.push_back(i);
      out.values.push_back(x(i));
    }
  }
  return out;
}

Index SparseCodes::failed_count() const {
  return static_cast<Index>(std::count(failed.begin(), failed.end(), true));
}

Matrix SparseCodes::dense() const {
  Matrix x = Matrix::Zero(atoms, cols());
  for (Index c = 0; c < cols(); ++c) {
    const auto& col = columns[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < col.indices.size(); ++i) x(col.indices[i], c) = col.values[i];
  }
  return x;
}

Matrix SparseCodes::reconstruct(const Matrix& dict_atoms) const {
  if (dict_atoms.cols() != atoms) throw InvalidArgument("reconstruct: atom count mismatch");
  Matrix out = Matrix::Zero(dict_atoms.rows(), cols());
  for (Index c = 0; c < cols(); ++c) {
    const auto& col = columns[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < col.indices.size(); ++i) {
      out.col(c).noalias() += col.values[i] * dict_atoms.col(col.indices[i]);
    }
  }
  return out;
}

void StopRule::validate() const {
  if (!max_nonzeros && !max_residual) throw InvalidArgument("stop rule needs K_s or delta");
  if (max_nonzeros && *max_nonzeros < 1) throw InvalidArgument("K_s must be >= 1");
  if (max_residual && !(*max_residual >= 0.0 && *max_residual < 1.0)) {
    throw InvalidArgument("delta must lie in [0, 1)");
  }
}

SparseVector omp(const Vector& y, const Dictionary& dict, const StopRule& stop, OmpTrace* trace) {
  stop.validate();
  const Matrix& d = dict.atoms();
  if (y.size() != d.rows()) throw InvalidArgument("omp: signal length does not match dictionary");
  const Index k_atoms = d.cols();
  const double y_norm = y.norm();
  if (trace) {
    trace->selected.clear();
    trace->residual_norms.assign(1, y_norm);
  }
  if (y_norm == 0.0) return SparseVector{{}, {}, k_atoms};

  const Index cap = step_cap(stop, d.rows(), k_atoms);
  const Vector dty = d.transpose() * y;
  ActiveSetCholesky chol(std::max<Index>(cap, 1));
  std::vector<Index> support;
  std::vector<char> active(static_cast<std::size_t>(k_atoms), 0);
  Vector residual = y;
  Vector coeffs;

  while (static_cast<Index>(support.size()) < cap) {
    if (stop.max_residual && residual.norm() <= *stop.max_residual * y_norm) break;
    const Vector corr = d.transpose() * residual;
    Index best = -1;
    double best_abs = kNegligibleCorrelation * y_norm;
    for (Index j = 0; j < k_atoms; ++j) {
      if (active[static_cast<std::size_t>(j)]) continue;
      const double a = std::abs(corr(j));
      if (a > best_abs) {
        best_abs = a;
        best = j;
      }
    }
    if (best < 0) break;

    Vector cross(static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) {
      cross(static_cast<Index>(s)) = d.col(support[s]).dot(d.col(best));
    }
    if (!chol.push(cross, d.col(best).squaredNorm())) throw NumericalError("degenerate support");
    support.push_back(best);
    active[static_cast<std::size_t>(best)] = 1;

    Vector rhs(static_cast<Index>(support.size()));
    for (std::size_t s = 0; s < support.size(); ++s) rhs(static_cast<Index>(s)) = dty(support[s]);
    coeffs = chol.solve(rhs);

    residual = y;
    for (std::size_t s = 0; s < support.size(); ++s) {
      residual.noalias() -= coeffs(static_cast<Index>(s)) * d.col(support[s]);
    }
    if (trace) {
      trace->selected.push_back(best);
      trace->residual_norms.push_back(residual.norm());
    }
  }
  if (support.empty()) return SparseVector{{}, {}, k_atoms};
  return to_sparse(k_atoms, support, coeffs);
}

SparseCodes batch_omp(const SignalMatrix& signals, const Dictionary& dict, const StopRule& stop,
                      unsigned jobs) {
  return run_batch(signals, dict.atoms(), dict.gram(), stop, jobs);
}

SparseCodes batch_omp(const SignalMatrix& signals, const Dictionary& dict, const Matrix& gram,
                      const StopRule& stop, unsigned jobs) {
  return run_batch(signals, dict.atoms(), gram, stop, jobs);
}

SparseCodes batch_omp_atoms(const SignalMatrix& signals, const Matrix& atoms, const StopRule& stop,
                            unsigned jobs) {
  for (Index k = 0; k < atoms.cols(); ++k) {
    const double n = atoms.col(k).norm();
    if (n != 0.0 && std::abs(n - 1.0) > 1e-8) {
      throw InvalidArgument("batch_omp_atoms: column " + std::to_string(k) + " is neither unit nor zero");
    }
  }
  return run_batch(signals, atoms, atoms.transpose() * atoms, stop, jobs);
}

double entropy_threshold(const SignalMatrix& signals, std::optional<Index> bins) {
  if (signals.cols() < 1 || signals.rows() < 1) throw InvalidArgument("entropy_threshold: empty signal matrix");
  const Index n_bins =
      bins.value_or(static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(signals.rows())))));
  if (n_bins < 2) throw InvalidArgument("entropy_threshold: need at least 2 bins");

  const Vector mean = signals.rowwise().mean();
  const double lo = mean.minCoeff();
  const double hi = mean.maxCoeff();
  if (!(hi > lo)) return 0.0;

  std::vector<double> counts(static_cast<std::size_t>(n_bins), 0.0);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (Index i = 0; i < mean.size(); ++i) {
    auto b = static_cast<Index>(std::floor((mean(i) - lo) / width));
    b = std::clamp<Index>(b, 0, n_bins - 1);
    counts[static_cast<std::size_t>(b)] += 1.0;
  }
  double entropy = 0.0;
  for (double c : counts) {
    if (c == 0.0) continue;
    const double p = c / static_cast<double>(mean.size());
    entropy -= p * std::log(p);
  }
  return std::clamp(entropy / std::log(static_cast<double>(n_bins)), 0.0, 1.0);
}

LassoResult lasso_cd_gram(const Vector& dty, const Matrix& gram, double y_sq_norm, double lambda,
                          const Vector* warm) {
  if (!(lambda >= 0.0)) throw InvalidArgument("lasso: lambda must be >= 0");
  const Index k_atoms = dty.size();
  if (gram.rows() != k_atoms || gram.cols() != k_atoms) throw InvalidArgument("lasso: Gram shape mismatch");

  Vector x = Vector::Zero(k_atoms);
  if (warm) {
    if (warm->size() != k_atoms) throw InvalidArgument("lasso: warm start length mismatch");
    x = *warm;
  }
  // corr = D^T (y - D x)
  Vector corr = dty - gram * x;
  auto objective = [&] { return 0.5 * (y_sq_norm - x.dot(dty) - x.dot(corr)) + lambda * x.lpNorm<1>(); };

  LassoResult out;
  constexpr Index max_sweeps = 10000;
  while (out.sweeps < max_sweeps) {
    double max_step = 0.0;
    for (Index j = 0; j < k_atoms; ++j) {
      const double g = gram(j, j);
      if (!(g > 0.0)) continue;
      const double updated = soft_threshold(corr(j) + g * x(j), lambda) / g;
      const double step = updated - x(j);
      if (step != 0.0) {
        corr.noalias() -= step * gram.col(j);
        x(j) = updated;
        max_step = std::max(max_step, std::abs(step));
      }
    }
    ++out.sweeps;
    out.objective.push_back(objective());
    if (max_step < kLassoTolerance) {
      out.converged = true;
      break;
    }
  }
  out.code = SparseVector::from_dense(x);
  return out;
}

LassoResult lasso_cd(const Vector& y, const Dictionary& dict, double lambda) {
  if (y.size() != dict.signal_dim()) throw InvalidArgument("lasso: signal length does not match dictionary");
  return lasso_cd_gram(dict.atoms().transpose() * y, dict.gram(), y.squaredNorm(), lambda);
}

SparseVector sparse_best_oracle(const Vector& y, const Dictionary& dict, Index max_nonzeros) {
  const Matrix& d = dict.atoms();
  if (y.size() != d.rows()) throw InvalidArgument("oracle: signal length does not match dictionary");
  if (max_nonzeros < 1) throw InvalidArgument("oracle: K_s must be >= 1");
  const Index k_atoms = d.cols();
  const Index depth = std::min(max_nonzeros, k_atoms);

  double supports = 0.0;
  double binom = 1.0;
  for (Index s = 1; s <= depth; ++s) {
    binom = binom * static_cast<double>(k_atoms - s + 1) / static_cast<double>(s);
    supports += binom;
  }
  if (supports > kOracleBudget) throw InvalidArgument("oracle: combinatorial budget exceeded");

  const double y_norm = y.norm();
  SparseVector best{{}, {}, k_atoms};
  if (y_norm == 0.0) return best;
  double best_res = y_norm;
  const double margin = 1e-12 * y_norm;

  std::vector<Index> comb;
  for (Index s = 1; s <= depth; ++s) {
    comb.resize(static_cast<std::size_t>(s));
    std::iota(comb.begin(), comb.end(), Index{0});
    while (true) {
      Matrix sub(d.rows(), s);
      for (Index c = 0; c < s; ++c) sub.col(c) = d.col(comb[static_cast<std::size_t>(c)]);
      const Vector coef = sub.colPivHouseholderQr().solve(y);
      const double res = (y - sub * coef).norm();
      if (res < best_res - margin) {
        best_res = res;
        best = to_sparse(k_atoms, comb, coef);
      }
      // Next combination in lexicographic order.
      Index pos = s - 1;
      while (pos >= 0 && comb[static_cast<std::size_t>(pos)] == k_atoms - s + pos) --pos;
      if (pos < 0) break;
      ++comb[static_cast<std::size_t>(pos)];
      for (Index q = pos + 1; q < s; ++q) {
        comb[static_cast<std::size_t>(q)] = comb[static_cast<std::size_t>(q - 1)] + 1;
      }
    }
  }
  return best;
}

double residual_norm(const Vector& y, const Matrix& atoms, const SparseVector& x) {
  Vector r = y;
  for (std::size_t i = 0; i < x.indices.size(); ++i) r.noalias() -= x.values[i] * atoms.col(x.indices[i]);
  return r.norm();
}

}  // namespace sparsemine
