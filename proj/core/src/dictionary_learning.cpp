#include "sparsemine/dictionary_learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "sparsemine/errors.hpp"

namespace sparsemine {

namespace {

using Clock = std::chrono::steady_clock;

// Updated atoms with a smaller norm than this keep their previous value.
constexpr double kVanishingAtom = 1e-12;
constexpr double kOdlActiveAtom = 1e-10;
constexpr double kOdlAtomChange = 1e-6;
constexpr Index kOdlMaxRounds = 10;
// rcond below which the weighted Gram is regularized.
constexpr double kIllConditioned = 1e-10;
constexpr double kRidgeScale = 1e-8;

double seconds_since(Clock::time_point start) {
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return std::max(s, 1e-9);
}

void check_signals(const SignalMatrix& signals) {
  if (signals.rows() < 1 || signals.cols() < 1) throw InvalidArgument("empty training set");
  if (!signals.allFinite()) throw DataError("training set contains NaN or Inf");
}

Matrix dense_columns(const std::vector<SparseVector>& codes, std::span<const Index> cols, Index atoms) {
  Matrix x = Matrix::Zero(atoms, static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const SparseVector& v = codes[static_cast<std::size_t>(cols[c])];
    for (std::size_t i = 0; i < v.indices.size(); ++i) x(v.indices[i], static_cast<Index>(c)) = v.values[i];
  }
  return x;
}

SparseCodes sparse_from_dense(const Matrix& x) {
  SparseCodes codes;
  codes.atoms = x.rows();
  codes.columns.reserve(static_cast<std::size_t>(x.cols()));
  for (Index c = 0; c < x.cols(); ++c) codes.columns.push_back(SparseVector::from_dense(x.col(c)));
  codes.failed.assign(static_cast<std::size_t>(x.cols()), false);
  return codes;
}

double representation_error(const SignalMatrix& signals, const Dictionary& dict, const SparseCodes& codes) {
  return (signals - codes.reconstruct(dict.atoms())).norm();
}

// Writes updated atoms back, skipping vanishing ones. Returns the atoms changed.
std::vector<Index> commit_atoms(Matrix& atoms, const Matrix& updated, std::span<const Index> subset) {
  std::vector<Index> changed;
  for (std::size_t s = 0; s < subset.size(); ++s) {
    const double n = updated.col(static_cast<Index>(s)).norm();
    if (!(n > kVanishingAtom) || !std::isfinite(n)) continue;
    atoms.col(subset[s]) = updated.col(static_cast<Index>(s)) / n;
    changed.push_back(subset[s]);
  }
  return changed;
}

void refresh_gram(Matrix& gram, const Matrix& atoms, std::span<const Index> changed) {
  for (Index k : changed) {
    const Vector col = atoms.transpose() * atoms.col(k);
    gram.col(k) = col;
    gram.row(k) = col.transpose();
  }
}

SparseVector code_column(const Matrix& atoms, const Matrix& gram, const Vector& y, const StopRule& stop) {
  try {
    return omp_gram(atoms.transpose() * y, gram, y.squaredNorm(), stop, atoms.rows());
  } catch (const NumericalError&) {
    return SparseVector{{}, {}, atoms.cols()};
  }
}

std::vector<Index> sorted_union(const std::vector<SparseVector>& codes, std::span<const Index> cols) {
  std::set<Index> atoms;
  for (Index c : cols) {
    const auto& idx = codes[static_cast<std::size_t>(c)].indices;
    atoms.insert(idx.begin(), idx.end());
  }
  return {atoms.begin(), atoms.end()};
}

// Learns with a prepared stop rule and returns the final codes on `signals`.
LearnResult finish(const SignalMatrix& signals, Matrix atoms, const StopRule& stop, LearnReport report) {
  LearnResult out;
  out.dictionary = Dictionary(std::move(atoms));
  out.codes = batch_omp(signals, out.dictionary, stop);
  out.report = std::move(report);
  return out;
}

}  // namespace

std::string_view to_string(Learner learner) {
  switch (learner) {
    case Learner::ksvd:
      return "ksvd";
    case Learner::odl:
      return "odl";
    case Learner::cbwlsu:
      return "cbwlsu";
    case Learner::dominodl:
      return "dominodl";
  }
  return "unknown";
}

Learner parse_learner(std::string_view name) {
  for (Learner l : {Learner::ksvd, Learner::odl, Learner::cbwlsu, Learner::dominodl}) {
    if (to_string(l) == name) return l;
  }
  throw InvalidArgument("unknown learner '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (atoms < 0) throw InvalidArgument("K must be >= 0 (0 selects automatically)");
  if (iterations < 1) throw InvalidArgument("N_t must be >= 1");
  if (sparsity < 0) throw InvalidArgument("K_s must be >= 0");
  if (delta && !(*delta >= 0.0 && *delta < 1.0)) throw InvalidArgument("delta must lie in [0, 1)");
  if (sparsity == 0 && !delta && !entropy_delta) throw InvalidArgument("need K_s, delta or the entropy rule");
  if (new_batch < 1 || previous_batch < 1 || drop_after < 1) throw InvalidArgument("N_b, N_r and N_u must be >= 1");
  if (chi && !(*chi > 0.0)) throw InvalidArgument("chi must be > 0");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be >= 0");
  if (odl_batch < 1) throw InvalidArgument("ODL batch must be >= 1");
  if (prune_min_usage < 0) throw InvalidArgument("prune usage must be >= 0");
  if (!(prune_max_coherence > 0.0 && prune_max_coherence <= 1.0)) {
    throw InvalidArgument("prune coherence must lie in (0, 1]");
  }
}

Index TrainConfig::resolved_atoms(const SignalMatrix& signals) const {
  if (atoms > 0) return atoms;
  return std::max<Index>(1, std::min<Index>(3 * signals.rows(), signals.cols() / 2));
}

StopRule TrainConfig::stop_rule(const SignalMatrix& signals) const {
  StopRule rule;
  if (sparsity > 0) rule.max_nonzeros = sparsity;
  if (entropy_delta) {
    rule.max_residual = std::min(entropy_threshold(signals), std::nextafter(1.0, 0.0));
  } else if (delta) {
    rule.max_residual = *delta;
  }
  rule.validate();
  return rule;
}

double TrainConfig::resolved_chi(const SignalMatrix& signals) const {
  if (chi) return *chi;
  return 1e-3 * signals.squaredNorm() / static_cast<double>(std::max<Index>(signals.cols(), 1));
}

Dictionary init_dictionary(const SignalMatrix& signals, Index atoms, std::uint64_t seed) {
  if (atoms < 1) throw InvalidArgument("K must be >= 1");
  if (atoms > signals.cols()) throw InvalidArgument("not enough training columns");
  std::vector<Index> order(static_cast<std::size_t>(signals.cols()));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  Matrix d(signals.rows(), atoms);
  Index filled = 0;
  for (Index c : order) {
    if (filled == atoms) break;
    const double n = signals.col(c).norm();
    if (!(n > 0.0) || !std::isfinite(n)) continue;
    d.col(filled++) = signals.col(c) / n;
  }
  if (filled < atoms) throw DataError("fewer than K nonzero training columns");
  return Dictionary(std::move(d));
}

bool ksvd_update_atom(Matrix& atoms, Matrix& codes, Matrix& residual, Index k) {
  std::vector<Index> users;
  for (Index j = 0; j < codes.cols(); ++j) {
    if (codes(k, j) != 0.0) users.push_back(j);
  }
  if (users.empty()) return false;

  const auto n = static_cast<Index>(users.size());
  Matrix err(atoms.rows(), n);
  for (Index u = 0; u < n; ++u) err.col(u) = residual.col(users[static_cast<std::size_t>(u)]) + codes(k, users[static_cast<std::size_t>(u)]) * atoms.col(k);

  Vector atom;
  Vector row;
  if (n == 1) {
    const double s = err.col(0).norm();
    if (s == 0.0) {
      atom = atoms.col(k);
      row = Vector::Zero(1);
    } else {
      atom = err.col(0) / s;
      row = Vector::Constant(1, s);
    }
  } else {
    Eigen::BDCSVD<Matrix> svd(err, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s = svd.singularValues()(0);
    if (s == 0.0) {
      atom = atoms.col(k);
      row = Vector::Zero(n);
    } else {
      atom = svd.matrixU().col(0);
      row = s * svd.matrixV().col(0);
    }
  }
  // Keep the sign of the previous atom so runs are reproducible.
  if (atom.dot(atoms.col(k)) < 0.0) {
    atom = -atom;
    row = -row;
  }
  atom.normalize();
  atoms.col(k) = atom;
  for (Index u = 0; u < n; ++u) {
    const Index j = users[static_cast<std::size_t>(u)];
    codes(k, j) = row(u);
    residual.col(j) = err.col(u) - row(u) * atom;
  }
  return true;
}

Vector representation_weights(const Matrix& errors) {
  Vector w(errors.cols());
  for (Index j = 0; j < errors.cols(); ++j) {
    const double e = errors.col(j).squaredNorm();
    w(j) = e > 1.0 / kMaxRepresentationWeight ? 1.0 / e : kMaxRepresentationWeight;
  }
  return w;
}

Matrix weighted_ls_solve(const Matrix& target, const Matrix& subset_codes, const Vector& weights) {
  if (subset_codes.cols() != target.cols() || weights.size() != target.cols()) {
    throw InvalidArgument("weighted LS: column counts differ");
  }
  if (subset_codes.rows() < 1) throw InvalidArgument("weighted LS: empty atom subset");
  const Matrix xw = subset_codes * weights.asDiagonal();
  Matrix gram = xw * subset_codes.transpose();
  const Matrix rhs = xw * target.transpose();  // |S| x M

  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kIllConditioned)) {
    const double trace = gram.trace();
    const double eps = kRidgeScale * (trace > 0.0 ? trace / static_cast<double>(gram.rows()) : 1.0);
    gram.diagonal().array() += eps;
    llt.compute(gram);
    if (llt.info() != Eigen::Success) throw NumericalError("weighted LS: Gram matrix not positive definite");
  }
  return llt.solve(rhs).transpose();
}

Matrix weighted_ls_update(const SignalMatrix& signals, const Matrix& codes, const Matrix& atoms,
                          std::span<const Index> subset) {
  if (codes.rows() != atoms.cols() || codes.cols() != signals.cols() || signals.rows() != atoms.rows()) {
    throw InvalidArgument("weighted LS update: inconsistent shapes");
  }
  if (subset.empty() || signals.cols() < 1) throw InvalidArgument("weighted LS update: empty subset or batch");
  const Matrix errors = signals - atoms * codes;
  const Vector weights = representation_weights(errors);

  Matrix target = errors;
  Matrix subset_codes(static_cast<Index>(subset.size()), codes.cols());
  for (std::size_t s = 0; s < subset.size(); ++s) {
    const Index k = subset[s];
    if (k < 0 || k >= atoms.cols()) throw InvalidArgument("weighted LS update: atom index out of range");
    subset_codes.row(static_cast<Index>(s)) = codes.row(k);
    target.noalias() += atoms.col(k) * codes.row(k);
  }
  return weighted_ls_solve(target, subset_codes, weights);
}

PruneResult prune_atoms(const Dictionary& dict, const SparseCodes& codes, const SignalMatrix& signals,
                        Index min_usage, double max_coherence) {
  const Index k_atoms = dict.atom_count();
  if (codes.atoms != k_atoms || codes.cols() != signals.cols() || signals.rows() != dict.signal_dim()) {
    throw InvalidArgument("prune: inconsistent shapes");
  }
  std::vector<Index> usage(static_cast<std::size_t>(k_atoms), 0);
  for (const auto& col : codes.columns) {
    for (Index k : col.indices) ++usage[static_cast<std::size_t>(k)];
  }

  Matrix atoms = dict.atoms();
  std::vector<Index> candidates;
  std::vector<double> residual(static_cast<std::size_t>(signals.cols()), 0.0);
  for (Index c = 0; c < signals.cols(); ++c) {
    if (signals.col(c).norm() == 0.0) continue;
    residual[static_cast<std::size_t>(c)] = residual_norm(signals.col(c), atoms, codes.columns[static_cast<std::size_t>(c)]);
    candidates.push_back(c);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](Index a, Index b) {
    return residual[static_cast<std::size_t>(a)] > residual[static_cast<std::size_t>(b)];
  });

  PruneResult out;
  std::size_t next = 0;
  for (Index k = 0; k < k_atoms && next < candidates.size(); ++k) {
    bool replace = usage[static_cast<std::size_t>(k)] < min_usage;
    for (Index j = 0; j < k && !replace; ++j) {
      if (std::abs(atoms.col(k).dot(atoms.col(j))) > max_coherence) replace = true;
    }
    if (!replace) continue;
    const Index c = candidates[next++];
    atoms.col(k) = signals.col(c).normalized();
    out.replaced_atoms.push_back(k);
    out.replacement_columns.push_back(c);
  }
  out.dictionary = Dictionary(std::move(atoms));
  return out;
}

LearnResult ksvd(const SignalMatrix& signals, const TrainConfig& config) {
  const auto start = Clock::now();
  config.validate();
  check_signals(signals);
  const Index k_atoms = config.resolved_atoms(signals);
  const StopRule stop = config.stop_rule(signals);
  Dictionary dict = init_dictionary(signals, k_atoms, config.seed);

  LearnReport report;
  report.delta_used = stop.max_residual.value_or(0.0);
  for (Index it = 0; it < config.iterations; ++it) {
    Matrix codes = batch_omp(signals, dict, stop).dense();
    Matrix atoms = dict.atoms();
    Matrix residual = signals - atoms * codes;
    for (Index k = 0; k < k_atoms; ++k) ksvd_update_atom(atoms, codes, residual, k);
    PruneResult pruned = prune_atoms(Dictionary(std::move(atoms)), sparse_from_dense(codes), signals,
                                     config.prune_min_usage, config.prune_max_coherence);
    report.atoms_replaced += static_cast<Index>(pruned.replaced_atoms.size());
    dict = std::move(pruned.dictionary);
    ++report.iterations;
  }
  LearnResult out = finish(signals, dict.atoms(), stop, std::move(report));
  out.report.final_error = representation_error(signals, out.dictionary, out.codes);
  out.report.wall_time_s = seconds_since(start);
  return out;
}

LearnResult odl(const SignalMatrix& signals, const TrainConfig& config) {
  const auto start = Clock::now();
  config.validate();
  check_signals(signals);
  if (signals.squaredNorm() == 0.0) throw DataError("degenerate training set");
  const Index k_atoms = config.resolved_atoms(signals);
  const StopRule stop = config.stop_rule(signals);
  Dictionary dict = init_dictionary(signals, k_atoms, config.seed);
  Matrix atoms = dict.atoms();

  const Index m = signals.rows();
  const Index l = signals.cols();
  Matrix stat_a = Matrix::Zero(k_atoms, k_atoms);  // sum x x^T
  Matrix stat_b = Matrix::Zero(m, k_atoms);        // sum y x^T

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Index> order(static_cast<std::size_t>(l));
  std::iota(order.begin(), order.end(), Index{0});
  std::size_t cursor = order.size();

  LearnReport report;
  report.delta_used = stop.max_residual.value_or(0.0);
  for (Index it = 0; it < config.iterations; ++it) {
    const Matrix gram = atoms.transpose() * atoms;
    for (Index b = 0; b < config.odl_batch; ++b) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      const Index c = order[cursor++];
      const double y_sq = signals.col(c).squaredNorm();
      if (y_sq == 0.0) continue;
      const LassoResult fit = lasso_cd_gram(atoms.transpose() * signals.col(c), gram, y_sq,
                                            config.lambda * std::sqrt(y_sq));
      const SparseVector& x = fit.code;
      for (std::size_t i = 0; i < x.indices.size(); ++i) {
        stat_b.col(x.indices[i]).noalias() += x.values[i] * signals.col(c);
        for (std::size_t j = 0; j < x.indices.size(); ++j) {
          stat_a(x.indices[i], x.indices[j]) += x.values[i] * x.values[j];
        }
      }
    }

    // Block-coordinate descent on the surrogate, warm-started at the current atoms.
    for (Index round = 0; round < kOdlMaxRounds; ++round) {
      double max_change = 0.0;
      for (Index j = 0; j < k_atoms; ++j) {
        const double ajj = stat_a(j, j);
        if (!(ajj > kOdlActiveAtom)) continue;
        Vector u = atoms.col(j) + (stat_b.col(j) - atoms * stat_a.col(j)) / ajj;
        const double n = u.norm();
        if (!(n > kVanishingAtom)) continue;
        u /= n;
        max_change = std::max(max_change, (u - atoms.col(j)).norm());
        atoms.col(j) = u;
      }
      if (max_change < kOdlAtomChange) break;
    }
    ++report.iterations;
  }

  dict = Dictionary(std::move(atoms));
  SparseCodes codes = batch_omp(signals, dict, stop);
  PruneResult pruned = prune_atoms(dict, codes, signals, config.prune_min_usage, config.prune_max_coherence);
  report.atoms_replaced = static_cast<Index>(pruned.replaced_atoms.size());
  LearnResult out;
  if (pruned.replaced_atoms.empty()) {
    out.dictionary = std::move(dict);
    out.codes = std::move(codes);
    out.report = std::move(report);
  } else {
    out = finish(signals, pruned.dictionary.atoms(), stop, std::move(report));
  }
  out.report.final_error = representation_error(signals, out.dictionary, out.codes);
  out.report.wall_time_s = seconds_since(start);
  return out;
}

LearnResult cbwlsu(const SignalMatrix& signals, const TrainConfig& config) {
  const auto start = Clock::now();
  config.validate();
  check_signals(signals);
  const Index k_atoms = config.resolved_atoms(signals);
  const StopRule stop = config.stop_rule(signals);
  Matrix atoms = init_dictionary(signals, k_atoms, config.seed).atoms();
  Matrix gram = atoms.transpose() * atoms;

  const Index l = signals.cols();
  std::vector<SparseVector> codes(static_cast<std::size_t>(l));
  std::vector<std::set<Index>> users(static_cast<std::size_t>(k_atoms));
  auto enroll = [&](Index c) {
    for (Index k : codes[static_cast<std::size_t>(c)].indices) users[static_cast<std::size_t>(k)].insert(c);
  };
  auto withdraw = [&](Index c) {
    for (Index k : codes[static_cast<std::size_t>(c)].indices) users[static_cast<std::size_t>(k)].erase(c);
  };

  LearnReport report;
  report.delta_used = stop.max_residual.value_or(0.0);
  for (Index i = 0; i < l; ++i) {
    codes[static_cast<std::size_t>(i)] = code_column(atoms, gram, signals.col(i), stop);
    const std::vector<Index>& support = codes[static_cast<std::size_t>(i)].indices;

    std::set<Index> neighbours;
    std::vector<Index> shared;
    for (Index k : support) {
      const auto& u = users[static_cast<std::size_t>(k)];
      if (!u.empty()) shared.push_back(k);
      neighbours.insert(u.begin(), u.end());
    }
    enroll(i);
    ++report.iterations;
    if (neighbours.empty()) continue;

    std::vector<Index> batch(neighbours.begin(), neighbours.end());
    batch.push_back(i);
    Matrix batch_signals(signals.rows(), static_cast<Index>(batch.size()));
    for (std::size_t b = 0; b < batch.size(); ++b) batch_signals.col(static_cast<Index>(b)) = signals.col(batch[b]);
    const Matrix batch_codes = dense_columns(codes, batch, k_atoms);
    const Matrix updated = weighted_ls_update(batch_signals, batch_codes, atoms, shared);
    const std::vector<Index> changed = commit_atoms(atoms, updated, shared);
    if (changed.empty()) continue;
    refresh_gram(gram, atoms, changed);

    std::set<Index> affected;
    for (Index k : changed) {
      const auto& u = users[static_cast<std::size_t>(k)];
      affected.insert(u.begin(), u.end());
    }
    for (Index c : affected) {
      withdraw(c);
      codes[static_cast<std::size_t>(c)] = code_column(atoms, gram, signals.col(c), stop);
      enroll(c);
    }
  }

  LearnResult out = finish(signals, std::move(atoms), stop, std::move(report));
  out.report.final_error = representation_error(signals, out.dictionary, out.codes);
  out.report.wall_time_s = seconds_since(start);
  return out;
}

LearnResult dominodl(const SignalMatrix& signals, const TrainConfig& config) {
  const auto start = Clock::now();
  config.validate();
  check_signals(signals);
  const Index k_atoms = config.resolved_atoms(signals);
  const StopRule stop = config.stop_rule(signals);
  Matrix atoms = init_dictionary(signals, k_atoms, config.seed).atoms();
  Matrix gram = atoms.transpose() * atoms;

  // Unit-norm training columns; zero columns stay zero and are never coded.
  SignalMatrix unit = signals;
  for (Index c = 0; c < unit.cols(); ++c) {
    const double n = unit.col(c).norm();
    if (n > 0.0) unit.col(c) /= n;
  }
  const double chi = config.resolved_chi(unit);
  const Index l = unit.cols();

  std::vector<SparseVector> codes = batch_omp(unit, Dictionary(atoms), gram, stop).columns;
  enum class State : unsigned char { unseen, active, dropped };
  std::vector<State> state(static_cast<std::size_t>(l), State::unseen);
  std::vector<Index> last_used(static_cast<std::size_t>(l), 0);
  std::vector<Index> previous_correlated;
  std::mt19937_64 rng(config.seed ^ 0xd1b54a32d192ed03ULL);

  LearnReport report;
  report.delta_used = stop.max_residual.value_or(0.0);
  Index dropped_total = 0;
  for (Index it = 1;; ++it) {
    const Index begin = (it - 1) * config.new_batch;
    if (begin >= l) break;
    const Index end = std::min(l, begin + config.new_batch);

    DominoIteration rec;
    rec.iteration = it;
    rec.batch_begin = begin;
    rec.batch_end = end;

    std::vector<Index> batch;
    for (Index c = begin; c < end; ++c) {
      codes[static_cast<std::size_t>(c)] = code_column(atoms, gram, unit.col(c), stop);
      batch.push_back(c);
    }
    const std::vector<Index> batch_atoms = sorted_union(codes, batch);

    std::vector<Index> pool;
    for (Index c = 0; c < begin; ++c) {
      if (state[static_cast<std::size_t>(c)] != State::active) continue;
      if (std::binary_search(previous_correlated.begin(), previous_correlated.end(), c)) continue;
      pool.push_back(c);
    }
    if (static_cast<Index>(pool.size()) >= 2 * config.previous_batch) {
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(static_cast<std::size_t>(config.previous_batch));
      std::sort(pool.begin(), pool.end());
    }
    rec.previous_sample = pool;

    std::vector<Index> correlated;
    for (Index c : pool) {
      const auto& idx = codes[static_cast<std::size_t>(c)].indices;
      const bool hit = std::any_of(idx.begin(), idx.end(), [&](Index k) {
        return std::binary_search(batch_atoms.begin(), batch_atoms.end(), k);
      });
      if (hit) correlated.push_back(c);
    }
    rec.correlated = correlated;

    std::vector<Index> subset;
    if (correlated.empty()) {
      subset = batch_atoms;
    } else {
      const std::vector<Index> prev_atoms = sorted_union(codes, correlated);
      std::set_intersection(batch_atoms.begin(), batch_atoms.end(), prev_atoms.begin(), prev_atoms.end(),
                            std::back_inserter(subset));
    }

    std::vector<Index> train = correlated;
    for (Index c : batch) {
      if (!codes[static_cast<std::size_t>(c)].empty()) train.push_back(c);
    }
    if (!subset.empty() && !train.empty()) {
      Matrix train_signals(unit.rows(), static_cast<Index>(train.size()));
      for (std::size_t t = 0; t < train.size(); ++t) train_signals.col(static_cast<Index>(t)) = unit.col(train[t]);
      const Matrix train_codes = dense_columns(codes, train, k_atoms);
      const Vector weights = representation_weights(train_signals - atoms * train_codes);
      const Matrix updated = weighted_ls_update(train_signals, train_codes, atoms, subset);
      const std::vector<Index> changed = commit_atoms(atoms, updated, subset);
      refresh_gram(gram, atoms, changed);
      rec.updated_atoms = static_cast<Index>(changed.size());

      double weighted = 0.0;
      for (std::size_t t = 0; t < train.size(); ++t) {
        SparseVector& code = codes[static_cast<std::size_t>(train[t])];
        code = code_column(atoms, gram, unit.col(train[t]), stop);
        const double r = residual_norm(unit.col(train[t]), atoms, code);
        weighted += weights(static_cast<Index>(t)) * r * r;
      }
      rec.weighted_error = weighted;
    }

    for (Index c : correlated) last_used[static_cast<std::size_t>(c)] = it;
    for (Index c : batch) {
      state[static_cast<std::size_t>(c)] = State::active;
      last_used[static_cast<std::size_t>(c)] = it;
    }
    for (Index c = 0; c < begin; ++c) {
      auto& s = state[static_cast<std::size_t>(c)];
      if (s == State::active && it - last_used[static_cast<std::size_t>(c)] >= config.drop_after) {
        s = State::dropped;
        ++rec.dropped;
      }
    }
    dropped_total += rec.dropped;
    rec.active_pool = l - dropped_total;
    previous_correlated = correlated;
    report.iterations = it;
    report.final_error = rec.weighted_error;
    const bool converged = !subset.empty() && !train.empty() && rec.weighted_error < chi;
    report.trace.push_back(std::move(rec));
    if (converged) break;
  }
  report.elements_dropped = dropped_total;

  LearnResult out = finish(signals, std::move(atoms), stop, std::move(report));
  out.report.wall_time_s = seconds_since(start);
  return out;
}

LearnResult learn(Learner learner, const SignalMatrix& signals, const TrainConfig& config) {
  switch (learner) {
    case Learner::ksvd:
      return ksvd(signals, config);
    case Learner::odl:
      return odl(signals, config);
    case Learner::cbwlsu:
      return cbwlsu(signals, config);
    case Learner::dominodl:
      return dominodl(signals, config);
  }
  throw InvalidArgument("unknown learner");
}

}  // namespace sparsemine
