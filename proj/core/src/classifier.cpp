#include "sparsemine/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "sparsemine/errors.hpp"
#include "sparsemine/parallel.hpp"

namespace sparsemine {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const SvmParams& p) {
  if (!(p.cost > 0.0)) throw InvalidArgument("SVM cost C must be > 0");
  if (!(p.gamma > 0.0)) throw InvalidArgument("RBF gamma must be > 0");
  if (!(p.tolerance > 0.0)) throw InvalidArgument("SMO tolerance must be > 0");
  if (p.max_updates < 1) throw InvalidArgument("SMO update cap must be >= 1");
}

Matrix squared_distances(const Matrix& features) {
  const Vector norms = features.colwise().squaredNorm().transpose();
  Matrix d2 = -2.0 * features.transpose() * features;
  d2.colwise() += norms;
  d2.rowwise() += norms.transpose();
  return d2.cwiseMax(0.0);
}

struct DualSolution {
  Vector alpha;
  double bias = 0.0;
  bool converged = false;
  Index updates = 0;
  double violation = 0.0;
};

// Soft-margin dual, min 0.5 a^T Q a - e^T a with 0 <= a <= C and y^T a = 0,
// solved by SMO with second-order working-set selection.
DualSolution solve_dual(const Matrix& kernel, std::span<const Index> idx, const std::vector<double>& y,
                        const SvmParams& p, SmoTrace* trace) {
  const auto n = static_cast<Index>(idx.size());
  const double c = p.cost;
  Matrix q(n, n);
  for (Index b = 0; b < n; ++b) {
    for (Index a = 0; a < n; ++a) {
      q(a, b) = y[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)] *
                kernel(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
  }
  const Vector qd = q.diagonal();
  auto yv = [&](Index t) { return y[static_cast<std::size_t>(t)]; };

  DualSolution sol;
  Vector& alpha = sol.alpha;
  alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);
  auto dual_objective = [&] { return -0.5 * alpha.dot(grad - Vector::Ones(n)); };
  if (trace) trace->dual_objective.clear();

  while (true) {
    double gmax = -kInf;
    Index i = -1;
    for (Index t = 0; t < n; ++t) {
      if (yv(t) > 0) {
        if (alpha(t) < c && -grad(t) >= gmax) {
          gmax = -grad(t);
          i = t;
        }
      } else if (alpha(t) > 0 && grad(t) >= gmax) {
        gmax = grad(t);
        i = t;
      }
    }
    double gmax2 = -kInf;
    double obj_min = kInf;
    Index j = -1;
    if (i >= 0) {
      for (Index t = 0; t < n; ++t) {
        if (yv(t) > 0) {
          if (alpha(t) > 0) {
            const double diff = gmax + grad(t);
            gmax2 = std::max(gmax2, grad(t));
            if (diff > 0) {
              const double quad = qd(i) + qd(t) - 2.0 * yv(i) * q(i, t);
              const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
              if (obj <= obj_min) {
                obj_min = obj;
                j = t;
              }
            }
          }
        } else if (alpha(t) < c) {
          const double diff = gmax - grad(t);
          gmax2 = std::max(gmax2, -grad(t));
          if (diff > 0) {
            const double quad = qd(i) + qd(t) + 2.0 * yv(i) * q(i, t);
            const double obj = -(diff * diff) / (quad > 0 ? quad : kTau);
            if (obj <= obj_min) {
              obj_min = obj;
              j = t;
            }
          }
        }
      }
    }
    sol.violation = (i >= 0 && gmax2 > -kInf) ? std::max(0.0, gmax + gmax2) : 0.0;
    if (i < 0 || j < 0 || gmax + gmax2 < p.tolerance) {
      sol.converged = true;
      break;
    }
    if (sol.updates >= p.max_updates) break;

    const double old_i = alpha(i);
    const double old_j = alpha(j);
    if (yv(i) != yv(j)) {
      double quad = qd(i) + qd(j) + 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = alpha(i) - alpha(j);
      alpha(i) += delta;
      alpha(j) += delta;
      if (diff > 0) {
        if (alpha(j) < 0) {
          alpha(j) = 0;
          alpha(i) = diff;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = -diff;
      }
      if (diff > 0) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = c - diff;
        }
      } else if (alpha(j) > c) {
        alpha(j) = c;
        alpha(i) = c + diff;
      }
    } else {
      double quad = qd(i) + qd(j) - 2.0 * q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = alpha(i) + alpha(j);
      alpha(i) -= delta;
      alpha(j) += delta;
      if (sum > c) {
        if (alpha(i) > c) {
          alpha(i) = c;
          alpha(j) = sum - c;
        }
      } else if (alpha(j) < 0) {
        alpha(j) = 0;
        alpha(i) = sum;
      }
      if (sum > c) {
        if (alpha(j) > c) {
          alpha(j) = c;
          alpha(i) = sum - c;
        }
      } else if (alpha(i) < 0) {
        alpha(i) = 0;
        alpha(j) = sum;
      }
    }
    grad.noalias() += q.col(i) * (alpha(i) - old_i) + q.col(j) * (alpha(j) - old_j);
    ++sol.updates;
    if (trace) trace->dual_objective.push_back(dual_objective());
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double upper = kInf;
  double lower = -kInf;
  double free_sum = 0.0;
  Index free_count = 0;
  for (Index t = 0; t < n; ++t) {
    const double yg = yv(t) * grad(t);
    if (alpha(t) >= c) {
      if (yv(t) < 0) {
        upper = std::min(upper, yg);
      } else {
        lower = std::max(lower, yg);
      }
    } else if (alpha(t) <= 0) {
      if (yv(t) > 0) {
        upper = std::min(upper, yg);
      } else {
        lower = std::max(lower, yg);
      }
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (upper + lower);
  sol.bias = -rho;
  if (trace) {
    trace->alpha = alpha;
    trace->labels = Eigen::Map<const Vector>(y.data(), n);
  }
  return sol;
}

struct PairMachine {
  int positive = 0;
  int negative = 0;
  std::vector<Index> support;  // indices into the kernel
  std::vector<double> coef;
  double bias = 0.0;
  bool converged = true;
  Index updates = 0;
  double violation = 0.0;
};

PairMachine train_pair(const Matrix& kernel, std::span<const Index> train, std::span<const int> labels, int pos,
                       int neg, const SvmParams& p) {
  std::vector<Index> idx;
  std::vector<double> y;
  for (Index t : train) {
    const int l = labels[static_cast<std::size_t>(t)];
    if (l == pos || l == neg) {
      idx.push_back(t);
      y.push_back(l == pos ? 1.0 : -1.0);
    }
  }
  const DualSolution sol = solve_dual(kernel, idx, y, p, nullptr);
  PairMachine m;
  m.positive = pos;
  m.negative = neg;
  m.bias = sol.bias;
  m.converged = sol.converged;
  m.updates = sol.updates;
  m.violation = sol.violation;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (sol.alpha(static_cast<Index>(a)) > 0.0) {
      m.support.push_back(idx[a]);
      m.coef.push_back(sol.alpha(static_cast<Index>(a)) * y[a]);
    }
  }
  return m;
}

std::vector<int> present_classes(std::span<const Index> rows, std::span<const int> labels) {
  std::vector<int> classes;
  for (Index t : rows) classes.push_back(labels[static_cast<std::size_t>(t)]);
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

std::vector<PairMachine> train_one_vs_one(const Matrix& kernel, std::span<const Index> train,
                                          std::span<const int> labels, const SvmParams& p) {
  const std::vector<int> classes = present_classes(train, labels);
  std::vector<PairMachine> machines;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      machines.push_back(train_pair(kernel, train, labels, classes[a], classes[b], p));
    }
  }
  return machines;
}

int vote(std::span<const double> decisions, std::span<const std::pair<int, int>> pairs, Index class_count) {
  std::vector<Index> votes(static_cast<std::size_t>(class_count), 0);
  for (std::size_t m = 0; m < pairs.size(); ++m) {
    ++votes[static_cast<std::size_t>(decisions[m] > 0.0 ? pairs[m].first : pairs[m].second)];
  }
  return static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

void check_labels(const Matrix& features, std::span<const int> labels) {
  if (features.cols() != static_cast<Index>(labels.size())) throw InvalidArgument("features and labels differ in count");
  if (features.cols() == 0) throw InvalidArgument("empty training set");
  if (!features.allFinite()) throw InvalidArgument("features contain NaN or Inf");
}

}  // namespace

double rbf_kernel(const Vector& a, const Vector& b, double gamma) {
  if (a.size() != b.size()) throw InvalidArgument("kernel: dimension mismatch");
  return std::exp(-gamma * (a - b).squaredNorm());
}

Matrix rbf_kernel_matrix(const Matrix& features, double gamma) {
  return (-gamma * squared_distances(features)).array().exp().matrix();
}

double BinarySvm::decision(const Vector& x) const {
  double f = bias;
  for (Index s = 0; s < support_vectors.cols(); ++s) {
    f += coefficients(s) * std::exp(-gamma * (support_vectors.col(s) - x).squaredNorm());
  }
  return f;
}

BinarySvm svm_train_binary(const Matrix& features, std::span<const int> labels, const SvmParams& params,
                           SmoTrace* trace) {
  check_params(params);
  check_labels(features, labels);
  bool has_pos = false;
  bool has_neg = false;
  std::vector<double> y;
  for (int l : labels) {
    if (l != 1 && l != -1) throw InvalidArgument("binary labels must be +1 or -1");
    (l > 0 ? has_pos : has_neg) = true;
    y.push_back(static_cast<double>(l));
  }
  if (!has_pos || !has_neg) throw InvalidArgument("binary SVM needs both classes");

  const Matrix kernel = rbf_kernel_matrix(features, params.gamma);
  std::vector<Index> idx(labels.size());
  std::iota(idx.begin(), idx.end(), Index{0});
  const DualSolution sol = solve_dual(kernel, idx, y, params, trace);

  BinarySvm model;
  model.gamma = params.gamma;
  model.bias = sol.bias;
  model.converged = sol.converged;
  model.updates = sol.updates;
  model.kkt_violation = sol.violation;
  model.positive_class = 1;
  model.negative_class = -1;
  std::vector<Index> sv;
  for (Index t = 0; t < sol.alpha.size(); ++t) {
    if (sol.alpha(t) > 0.0) sv.push_back(t);
  }
  model.support_vectors.resize(features.rows(), static_cast<Index>(sv.size()));
  model.coefficients.resize(static_cast<Index>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.col(static_cast<Index>(s)) = features.col(sv[s]);
    model.coefficients(static_cast<Index>(s)) = sol.alpha(sv[s]) * y[static_cast<std::size_t>(sv[s])];
  }
  return model;
}

int SvmModel::predict(const Vector& x) const {
  if (machines.empty()) throw InvalidArgument("SVM model has no machines");
  std::vector<double> decisions;
  std::vector<std::pair<int, int>> pairs;
  for (const auto& m : machines) {
    decisions.push_back(m.decision(x));
    pairs.emplace_back(m.positive_class, m.negative_class);
  }
  return vote(decisions, pairs, class_count);
}

std::vector<int> SvmModel::predict(const Matrix& features, unsigned jobs) const {
  std::vector<int> out(static_cast<std::size_t>(features.cols()));
  parallel_for(features.cols(), jobs, [&](Index c) { out[static_cast<std::size_t>(c)] = predict(Vector(features.col(c))); });
  return out;
}

SvmModel svm_train_multiclass(const Matrix& features, std::span<const int> labels, const SvmParams& params) {
  check_params(params);
  check_labels(features, labels);
  if (*std::min_element(labels.begin(), labels.end()) < 0) throw InvalidArgument("class labels must be >= 0");
  std::vector<Index> all(labels.size());
  std::iota(all.begin(), all.end(), Index{0});
  if (present_classes(all, labels).size() < 2) throw InvalidArgument("multiclass SVM needs at least two classes");

  const Matrix kernel = rbf_kernel_matrix(features, params.gamma);
  SvmModel model;
  model.class_count = *std::max_element(labels.begin(), labels.end()) + 1;
  model.cost = params.cost;
  model.gamma = params.gamma;
  for (const PairMachine& pm : train_one_vs_one(kernel, all, labels, params)) {
    BinarySvm m;
    m.gamma = params.gamma;
    m.bias = pm.bias;
    m.positive_class = pm.positive;
    m.negative_class = pm.negative;
    m.converged = pm.converged;
    m.updates = pm.updates;
    m.kkt_violation = pm.violation;
    m.support_vectors.resize(features.rows(), static_cast<Index>(pm.support.size()));
    m.coefficients.resize(static_cast<Index>(pm.support.size()));
    for (std::size_t s = 0; s < pm.support.size(); ++s) {
      m.support_vectors.col(static_cast<Index>(s)) = features.col(pm.support[s]);
      m.coefficients(static_cast<Index>(s)) = pm.coef[s];
    }
    model.machines.push_back(std::move(m));
  }
  return model;
}

std::vector<double> default_cost_grid() { return {0.1, 1.0, 10.0, 100.0}; }

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int e = -7; e <= 3; ++e) g.push_back(std::ldexp(1.0, e));
  return g;
}

CrossValidationResult cross_validate(const Matrix& features, std::span<const int> labels,
                                     std::span<const double> cost_grid, std::span<const double> gamma_grid,
                                     Index folds, std::uint64_t seed, unsigned jobs) {
  check_labels(features, labels);
  if (cost_grid.empty() || gamma_grid.empty()) throw InvalidArgument("empty hyperparameter grid");
  if (folds < 2) throw InvalidArgument("cross-validation needs at least 2 folds");
  for (double c : cost_grid) check_params({c, 1.0});
  for (double g : gamma_grid) check_params({1.0, g});
  if (*std::min_element(labels.begin(), labels.end()) < 0) throw InvalidArgument("class labels must be >= 0");
  const Index class_count = *std::max_element(labels.begin(), labels.end()) + 1;
  const auto n = static_cast<Index>(labels.size());

  // Stratified assignment: shuffle each class, then deal round-robin.
  CrossValidationResult out;
  std::vector<Index> fold_of(static_cast<std::size_t>(n), 0);
  std::mt19937_64 rng(seed);
  Index dealt = 0;
  for (int cls = 0; cls < class_count; ++cls) {
    std::vector<Index> members;
    for (Index t = 0; t < n; ++t) {
      if (labels[static_cast<std::size_t>(t)] == cls) members.push_back(t);
    }
    if (!members.empty() && static_cast<Index>(members.size()) < folds) out.folds_shrunk = true;
    std::shuffle(members.begin(), members.end(), rng);
    for (Index t : members) fold_of[static_cast<std::size_t>(t)] = dealt++ % folds;
  }

  const Matrix d2 = squared_distances(features);
  const auto nc = static_cast<Index>(cost_grid.size());
  const auto ng = static_cast<Index>(gamma_grid.size());
  out.accuracy = Matrix::Zero(nc, ng);
  std::vector<std::vector<double>> per_fold(static_cast<std::size_t>(nc * ng));

  parallel_for(nc * ng, jobs, [&](Index cell) {
    const Index ci = cell / ng;
    const Index gi = cell % ng;
    const SvmParams p{cost_grid[static_cast<std::size_t>(ci)], gamma_grid[static_cast<std::size_t>(gi)]};
    const Matrix kernel = (-p.gamma * d2).array().exp().matrix();
    auto& accs = per_fold[static_cast<std::size_t>(cell)];
    for (Index f = 0; f < folds; ++f) {
      std::vector<Index> train;
      std::vector<Index> valid;
      for (Index t = 0; t < n; ++t) (fold_of[static_cast<std::size_t>(t)] == f ? valid : train).push_back(t);
      if (valid.empty() || train.empty()) continue;
      const std::vector<int> classes = present_classes(train, labels);
      const std::vector<PairMachine> machines = train_one_vs_one(kernel, train, labels, p);
      std::vector<std::pair<int, int>> pairs;
      for (const auto& m : machines) pairs.emplace_back(m.positive, m.negative);
      Index correct = 0;
      std::vector<double> decisions(machines.size());
      for (Index v : valid) {
        int predicted = classes.front();
        if (!machines.empty()) {
          for (std::size_t m = 0; m < machines.size(); ++m) {
            double s = machines[m].bias;
            for (std::size_t k = 0; k < machines[m].support.size(); ++k) {
              s += machines[m].coef[k] * kernel(machines[m].support[k], v);
            }
            decisions[m] = s;
          }
          predicted = vote(decisions, pairs, class_count);
        }
        if (predicted == labels[static_cast<std::size_t>(v)]) ++correct;
      }
      accs.push_back(static_cast<double>(correct) / static_cast<double>(valid.size()));
    }
    if (!accs.empty()) {
      out.accuracy(ci, gi) = std::accumulate(accs.begin(), accs.end(), 0.0) / static_cast<double>(accs.size());
    }
  });

  // Walk the grid by increasing C, then increasing gamma; keep the first maximum.
  std::vector<Index> c_order(static_cast<std::size_t>(nc));
  std::vector<Index> g_order(static_cast<std::size_t>(ng));
  std::iota(c_order.begin(), c_order.end(), Index{0});
  std::iota(g_order.begin(), g_order.end(), Index{0});
  std::stable_sort(c_order.begin(), c_order.end(), [&](Index a, Index b) {
    return cost_grid[static_cast<std::size_t>(a)] < cost_grid[static_cast<std::size_t>(b)];
  });
  std::stable_sort(g_order.begin(), g_order.end(), [&](Index a, Index b) {
    return gamma_grid[static_cast<std::size_t>(a)] < gamma_grid[static_cast<std::size_t>(b)];
  });
  Index best_c = c_order.front();
  Index best_g = g_order.front();
  double best = -1.0;
  for (Index ci : c_order) {
    for (Index gi : g_order) {
      if (out.accuracy(ci, gi) > best + 1e-12) {
        best = out.accuracy(ci, gi);
        best_c = ci;
        best_g = gi;
      }
    }
  }
  out.best_cost = cost_grid[static_cast<std::size_t>(best_c)];
  out.best_gamma = gamma_grid[static_cast<std::size_t>(best_g)];
  out.best_accuracy = out.accuracy(best_c, best_g);
  out.fold_accuracies = per_fold[static_cast<std::size_t>(best_c * ng + best_g)];
  return out;
}

Matrix masked_codes(const Dictionary& dict, const SignalMatrix& signals, const StopRule& stop,
                    std::optional<std::span<const Index>> row_mask, unsigned jobs) {
  if (signals.rows() != dict.signal_dim()) throw InvalidArgument("profiles and dictionary differ in length");
  bool identity = !row_mask.has_value();
  if (row_mask && static_cast<Index>(row_mask->size()) == dict.signal_dim()) {
    identity = true;
    for (std::size_t r = 0; r < row_mask->size(); ++r) identity = identity && (*row_mask)[r] == static_cast<Index>(r);
  }
  if (identity) return batch_omp(signals, dict, stop, jobs).dense();

  Matrix atoms = select_rows(dict.atoms(), *row_mask);
  Vector norms(atoms.cols());
  for (Index k = 0; k < atoms.cols(); ++k) {
    norms(k) = atoms.col(k).norm();
    if (norms(k) > 0.0) atoms.col(k) /= norms(k);
  }
  Matrix codes = batch_omp_atoms(select_rows(signals, *row_mask), atoms, stop, jobs).dense();
  // Coefficients of renormalized atoms, mapped back to the scale of full-length atoms.
  for (Index k = 0; k < codes.rows(); ++k) {
    if (norms(k) > 0.0) codes.row(k) /= norms(k);
  }
  return codes;
}

ClassMap classify_survey(const Dictionary& dict, const SvmModel& model, const SurveyDataset& survey,
                         const StopRule& stop, std::optional<std::span<const Index>> row_mask, unsigned jobs) {
  if (model.dictionary_fingerprint != 0 && model.dictionary_fingerprint != dict.fingerprint()) {
    throw DataError("dictionary/model mismatch");
  }
  if (survey.profiles.cols() != survey.pixel_count()) throw InvalidArgument("survey geometry does not match profiles");
  const Matrix codes = masked_codes(dict, survey.profiles, stop, row_mask, jobs);
  ClassMap map;
  map.x_cells = survey.x_cells;
  map.y_cells = survey.y_cells;
  map.classes = model.predict(codes, jobs);
  return map;
}

ConfusionMatrix confusion_matrix(const ClassMap& map, std::span<const int> truth, std::vector<std::string> class_names) {
  if (map.classes.size() != truth.size()) throw InvalidArgument("class map and truth differ in size");
  const auto n = static_cast<Index>(class_names.size());
  if (n < 1) throw InvalidArgument("confusion matrix needs class names");
  ConfusionMatrix cm;
  cm.class_names = std::move(class_names);
  cm.counts = Matrix::Zero(n, n);
  for (std::size_t p = 0; p < truth.size(); ++p) {
    const int pred = map.classes[p];
    const int t = truth[p];
    if (pred < 0 || pred >= n || t < 0 || t >= n) throw InvalidArgument("class id outside the named classes");
    cm.counts(pred, t) += 1.0;
  }
  cm.probabilities = Matrix::Zero(n, n);
  cm.missing_truth.assign(static_cast<std::size_t>(n), false);
  for (Index t = 0; t < n; ++t) {
    const double total = cm.counts.col(t).sum();
    if (total > 0.0) {
      cm.probabilities.col(t) = cm.counts.col(t) / total;
    } else {
      cm.missing_truth[static_cast<std::size_t>(t)] = true;
    }
  }
  return cm;
}

PccResult pcc(const ClassMap& map, std::span<const Halo> halos, std::span<const int> truth, Index class_count) {
  if (map.classes.size() != truth.size()) throw InvalidArgument("class map and truth differ in size");
  if (class_count < 1) throw InvalidArgument("P_CC needs at least one class");
  const auto pixels = static_cast<Index>(map.classes.size());
  PccResult out;
  out.per_class.assign(static_cast<std::size_t>(class_count), std::numeric_limits<double>::quiet_NaN());
  out.evaluated.assign(static_cast<std::size_t>(class_count), 0);
  out.correct.assign(static_cast<std::size_t>(class_count), 0);

  std::vector<char> in_halo(static_cast<std::size_t>(pixels), 0);
  for (const Halo& h : halos) {
    if (h.pixels.empty()) throw InvalidArgument("empty halo");
    if (h.class_id < 0 || h.class_id >= class_count) throw InvalidArgument("halo class outside the named classes");
    for (Index p : h.pixels) {
      if (p < 0 || p >= pixels) throw InvalidArgument("halo pixel outside the map");
      in_halo[static_cast<std::size_t>(p)] = 1;
      ++out.evaluated[static_cast<std::size_t>(h.class_id)];
      if (map.classes[static_cast<std::size_t>(p)] == h.class_id) ++out.correct[static_cast<std::size_t>(h.class_id)];
    }
  }
  for (Index p = 0; p < pixels; ++p) {
    if (in_halo[static_cast<std::size_t>(p)]) continue;
    ++out.evaluated[kClutterClass];
    if (map.classes[static_cast<std::size_t>(p)] == kClutterClass) ++out.correct[kClutterClass];
  }
  for (Index c = 0; c < class_count; ++c) {
    const auto e = out.evaluated[static_cast<std::size_t>(c)];
    if (e > 0) out.per_class[static_cast<std::size_t>(c)] = static_cast<double>(out.correct[static_cast<std::size_t>(c)]) / static_cast<double>(e);
  }
  return out;
}

}  // namespace sparsemine
