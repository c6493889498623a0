#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "sparsemine/classifier.hpp"
#include "sparsemine/dictionary_learning.hpp"
#include "sparsemine/errors.hpp"
#include "sparsemine/gpr_synth.hpp"

namespace sparsemine {
namespace {

struct Blobs {
  Matrix features;
  std::vector<int> labels;
};

Blobs blobs(Index per_class, int classes, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  Blobs b;
  b.features.resize(2, per_class * classes);
  for (int c = 0; c < classes; ++c) {
    const double angle = 2.0 * 3.141592653589793 * c / classes;
    for (Index i = 0; i < per_class; ++i) {
      const Index col = c * per_class + i;
      b.features(0, col) = 3.0 * std::cos(angle) + g(rng);
      b.features(1, col) = 3.0 * std::sin(angle) + g(rng);
      b.labels.push_back(c);
    }
  }
  return b;
}

double accuracy(const SvmModel& m, const Matrix& x, const std::vector<int>& labels) {
  const std::vector<int> p = m.predict(x);
  Index hits = 0;
  for (std::size_t i = 0; i < p.size(); ++i) hits += p[i] == labels[i];
  return static_cast<double>(hits) / static_cast<double>(p.size());
}

TEST(RbfKernel, Values) {
  Vector a(2), b(2);
  a << 0.0, 0.0;
  b << 1.0, 0.0;
  EXPECT_DOUBLE_EQ(rbf_kernel(a, a, 3.0), 1.0);
  EXPECT_NEAR(rbf_kernel(a, b, std::log(2.0)), 0.5, 1e-15);
  EXPECT_NEAR(rbf_kernel(a, b, 1e-12), 1.0, 1e-11);
  EXPECT_THROW(rbf_kernel(a, Vector::Zero(3), 1.0), InvalidArgument);
}

TEST(RbfKernel, MatrixIsSymmetricPsd) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(5, 30);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    const Matrix k = rbf_kernel_matrix(x, 0.3);
    EXPECT_LT((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(k);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8);
    EXPECT_NEAR(k(3, 7), rbf_kernel(x.col(3), x.col(7), 0.3), 1e-15);
  }
}

TEST(SvmBinary, SeparableToy) {
  Matrix x(2, 4);
  x << 0.0, 0.2, 2.0, 2.2,
       0.0, 0.3, 2.0, 1.8;
  const std::vector<int> y{-1, -1, 1, 1};
  const BinarySvm m = svm_train_binary(x, y, SvmParams{});
  EXPECT_TRUE(m.converged);
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(m.decision(x.col(i)) > 0.0, y[static_cast<std::size_t>(i)] > 0);
}

TEST(SvmBinary, Errors) {
  const Matrix x = Matrix::Random(2, 3);
  const std::vector<int> same{1, 1, 1};
  EXPECT_THROW(svm_train_binary(x, same, SvmParams{}), InvalidArgument);
  SvmParams p;
  p.cost = 0.0;
  EXPECT_THROW(svm_train_binary(x, std::vector<int>{1, -1, 1}, p), InvalidArgument);
}

TEST(SvmBinary, FlippedLabelsNegateDecision) {
  const Blobs b = blobs(20, 2, 1.2, 2);
  std::vector<int> y, flipped;
  for (int l : b.labels) {
    y.push_back(l == 0 ? 1 : -1);
    flipped.push_back(l == 0 ? -1 : 1);
  }
  SvmParams p;
  p.tolerance = 1e-8;
  const BinarySvm m = svm_train_binary(b.features, y, p);
  const BinarySvm n = svm_train_binary(b.features, flipped, p);
  for (Index i = 0; i < b.features.cols(); ++i) {
    EXPECT_NEAR(m.decision(b.features.col(i)), -n.decision(b.features.col(i)), 1e-6);
  }
}

TEST(SvmBinary, DuplicatedTrainingSetSamePredictions) {
  const Blobs b = blobs(15, 2, 1.0, 3);
  std::vector<int> y;
  for (int l : b.labels) y.push_back(l == 0 ? 1 : -1);
  Matrix twice(2, 2 * b.features.cols());
  twice << b.features, b.features;
  std::vector<int> y2 = y;
  y2.insert(y2.end(), y.begin(), y.end());
  const BinarySvm m = svm_train_binary(b.features, y, SvmParams{});
  const BinarySvm m2 = svm_train_binary(twice, y2, SvmParams{});
  for (int gx = -5; gx <= 5; ++gx) {
    for (int gy = -5; gy <= 5; ++gy) {
      Vector p(2);
      p << gx * 0.8, gy * 0.8;
      const double d = m.decision(p);
      if (std::abs(d) < 1e-2) continue;  // too close to the boundary to compare signs
      EXPECT_EQ(d > 0.0, m2.decision(p) > 0.0) << gx << "," << gy;
    }
  }
}

TEST(SvmBinary, DualMonotoneAndKkt) {
  const Blobs b = blobs(30, 2, 2.0, 4);  // overlapping, so some alphas hit C
  std::vector<int> y;
  for (int l : b.labels) y.push_back(l == 0 ? 1 : -1);
  SvmParams p;
  p.cost = 2.0;
  p.gamma = 0.5;
  SmoTrace trace;
  const BinarySvm m = svm_train_binary(b.features, y, p, &trace);
  ASSERT_TRUE(m.converged);
  EXPECT_LT(m.kkt_violation, 1e-3);
  ASSERT_FALSE(trace.dual_objective.empty());
  for (std::size_t i = 1; i < trace.dual_objective.size(); ++i) {
    EXPECT_GE(trace.dual_objective[i], trace.dual_objective[i - 1] - 1e-12);
  }

  // Independent recomputation of the dual objective and complementary slackness.
  const Matrix k = rbf_kernel_matrix(b.features, p.gamma);
  const Vector ay = trace.alpha.cwiseProduct(trace.labels);
  EXPECT_NEAR(trace.alpha.sum() - 0.5 * ay.dot(k * ay), trace.dual_objective.back(), 1e-9);
  EXPECT_NEAR(ay.sum(), 0.0, 1e-10);
  for (Index i = 0; i < trace.alpha.size(); ++i) {
    const double a = trace.alpha(i);
    EXPECT_GE(a, -1e-12);
    EXPECT_LE(a, p.cost + 1e-12);
    const double margin = trace.labels(i) * m.decision(b.features.col(i));
    if (a < 1e-9) EXPECT_GE(margin, 1.0 - 1e-3);
    else if (a > p.cost - 1e-9) EXPECT_LE(margin, 1.0 + 1e-3);
    else EXPECT_NEAR(margin, 1.0, 1e-3);
  }
}

TEST(SvmMulticlass, TwoClassesEqualsBinary) {
  const Blobs b = blobs(12, 2, 1.5, 5);
  const SvmModel m = svm_train_multiclass(b.features, b.labels, SvmParams{});
  ASSERT_EQ(m.machines.size(), 1u);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 50; ++i) {
    Vector p(2);
    p << u(rng), u(rng);
    const BinarySvm& bin = m.machines[0];
    const int expected = bin.decision(p) > 0.0 ? bin.positive_class : bin.negative_class;
    EXPECT_EQ(m.predict(p), expected);
  }
}

TEST(SvmMulticlass, BlobsTrainingAccuracy) {
  const Blobs b = blobs(40, 3, 0.6, 7);
  const SvmModel m = svm_train_multiclass(b.features, b.labels, SvmParams{});
  EXPECT_EQ(m.machines.size(), 3u);
  EXPECT_GE(accuracy(m, b.features, b.labels), 0.95);
  EXPECT_EQ(m.predict(b.features, 3), m.predict(b.features, 1));
}

TEST(SvmMulticlass, VoteTieGoesToLowestClass) {
  // Each pairwise machine is a constant: 0 beats 1, 1 beats 2, 2 beats 0.
  auto constant = [](int pos, int neg) {
    BinarySvm m;
    m.support_vectors = Matrix::Zero(1, 0);
    m.coefficients = Vector::Zero(0);
    m.bias = 1.0;
    m.positive_class = pos;
    m.negative_class = neg;
    return m;
  };
  SvmModel model;
  model.class_count = 3;
  model.machines = {constant(0, 1), constant(1, 2), constant(2, 0)};
  EXPECT_EQ(model.predict(Vector(Vector::Zero(1))), 0);
}

TEST(SvmMulticlass, NeedsTwoClasses) {
  const std::vector<int> one{2, 2, 2};
  EXPECT_THROW(svm_train_multiclass(Matrix::Random(2, 3), one, SvmParams{}), InvalidArgument);
}

TEST(CrossValidation, GridSelectionAndRanges) {
  const Blobs b = blobs(20, 3, 0.6, 8);
  const std::vector<double> one_c{10.0};
  const std::vector<double> one_g{0.5};
  const CrossValidationResult single = cross_validate(b.features, b.labels, one_c, one_g, 5, 1);
  EXPECT_EQ(single.best_cost, 10.0);
  EXPECT_EQ(single.best_gamma, 0.5);
  EXPECT_EQ(single.fold_accuracies.size(), 5u);

  const auto costs = default_cost_grid();
  const auto gammas = default_gamma_grid();
  EXPECT_EQ(costs, (std::vector<double>{0.1, 1.0, 10.0, 100.0}));
  ASSERT_EQ(gammas.size(), 11u);
  EXPECT_EQ(gammas.front(), std::ldexp(1.0, -7));
  EXPECT_EQ(gammas.back(), 8.0);
  const CrossValidationResult full = cross_validate(b.features, b.labels, costs, gammas, 10, 1);
  EXPECT_GE(full.best_accuracy, 0.95);
  EXPECT_GE(full.accuracy.minCoeff(), 0.0);
  EXPECT_LE(full.accuracy.maxCoeff(), 1.0);
  const CrossValidationResult threaded = cross_validate(b.features, b.labels, costs, gammas, 10, 1, 3);
  EXPECT_EQ(threaded.accuracy, full.accuracy);
  EXPECT_EQ(threaded.best_cost, full.best_cost);
  EXPECT_EQ(threaded.best_gamma, full.best_gamma);

  const std::vector<double> empty;
  EXPECT_THROW(cross_validate(b.features, b.labels, empty, gammas, 5), InvalidArgument);
  EXPECT_THROW(cross_validate(b.features, b.labels, costs, gammas, 1), InvalidArgument);
}

TEST(CrossValidation, TiesPreferSmallerCostThenGamma) {
  const Blobs b = blobs(15, 2, 0.2, 9);  // trivially separable: every cell scores 1
  const std::vector<double> costs{1.0, 10.0};
  const std::vector<double> gammas{0.25, 0.5};
  const CrossValidationResult r = cross_validate(b.features, b.labels, costs, gammas, 3, 2);
  ASSERT_EQ(r.accuracy.minCoeff(), 1.0);
  EXPECT_EQ(r.best_cost, 1.0);
  EXPECT_EQ(r.best_gamma, 0.25);
}

class SurveyPipeline : public ::testing::Test {
 protected:
  struct Fixture {
    SurveyDataset survey;
    Dictionary dict;
    SvmModel model;
    StopRule stop = StopRule::sparsity(3);
  };

  static const Fixture& fixture() {
    static const Fixture f = [] {
      Fixture out;
      out.survey = generate_survey(SurveyLayout::separable(30, 12), PulseParams{}, 11);
      TrainConfig c;
      c.atoms = 60;
      c.seed = 3;
      out.dict = learn(Learner::dominodl, out.survey.profiles, c).dictionary;
      const Matrix codes = batch_omp(out.survey.profiles, out.dict, out.stop).dense();
      SvmParams p;
      p.cost = 100.0;
      p.gamma = 1.0;
      out.model = svm_train_multiclass(codes, out.survey.labels, p);
      out.model.dictionary_fingerprint = out.dict.fingerprint();
      return out;
    }();
    return f;
  }
};

TEST_F(SurveyPipeline, TrainingSurveyRoundTrip) {
  const Fixture& f = fixture();
  const ClassMap map = classify_survey(f.dict, f.model, f.survey, f.stop);
  EXPECT_EQ(map.x_cells, 30);
  EXPECT_EQ(map.y_cells, 12);
  EXPECT_EQ(map.classes, f.survey.labels);
}

TEST_F(SurveyPipeline, FullMaskIsIdentity) {
  const Fixture& f = fixture();
  std::vector<Index> all(static_cast<std::size_t>(f.survey.profiles.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Index>(i);
  const ClassMap plain = classify_survey(f.dict, f.model, f.survey, f.stop);
  const ClassMap masked = classify_survey(f.dict, f.model, f.survey, f.stop, std::span<const Index>(all));
  EXPECT_EQ(plain.classes, masked.classes);
  EXPECT_EQ(masked_codes(f.dict, f.survey.profiles, f.stop, std::span<const Index>(all)),
            batch_omp(f.survey.profiles, f.dict, f.stop).dense());
}

TEST_F(SurveyPipeline, QuarterMaskProducesFullMap) {
  const Fixture& f = fixture();
  const std::vector<Index> rows = sample_rows(211, 0.25, 4);
  ASSERT_EQ(rows.size(), 52u);
  const ClassMap map = classify_survey(f.dict, f.model, f.survey, f.stop, std::span<const Index>(rows), 2);
  ASSERT_EQ(static_cast<Index>(map.classes.size()), f.survey.pixel_count());
  for (int c : map.classes) {
    EXPECT_GE(c, 0);
    EXPECT_LT(c, 4);
  }
}

TEST_F(SurveyPipeline, PixelOrderInvariance) {
  const Fixture& f = fixture();
  SurveyDataset shuffled = f.survey;
  std::vector<Index> perm(static_cast<std::size_t>(f.survey.pixel_count()));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    shuffled.profiles.col(static_cast<Index>(i)) = f.survey.profiles.col(perm[i]);
  }
  const ClassMap a = classify_survey(f.dict, f.model, f.survey, f.stop);
  const ClassMap b = classify_survey(f.dict, f.model, shuffled, f.stop);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    EXPECT_EQ(b.classes[i], a.classes[static_cast<std::size_t>(perm[i])]);
  }
}

TEST_F(SurveyPipeline, ForeignDictionaryRejected) {
  const Fixture& f = fixture();
  TrainConfig c;
  c.atoms = 60;
  c.seed = 99;
  const Dictionary other = learn(Learner::dominodl, f.survey.profiles, c).dictionary;
  try {
    classify_survey(other, f.model, f.survey, f.stop);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "dictionary/model mismatch");
  }
}

ClassMap make_map(Index x, Index y, std::vector<int> classes) {
  return ClassMap{x, y, std::move(classes)};
}

TEST(Confusion, PerfectIsIdentity) {
  const std::vector<int> truth{0, 1, 2, 1, 0, 2};
  const ConfusionMatrix c = confusion_matrix(make_map(3, 2, truth), truth, {"a", "b", "c"});
  EXPECT_EQ(c.probabilities, Matrix(Matrix::Identity(3, 3)));
}

TEST(Confusion, AllClutterPredictions) {
  const std::vector<int> truth{0, 0, 1, 1};
  const ConfusionMatrix c = confusion_matrix(make_map(2, 2, {0, 0, 0, 0}), truth, {"clutter", "mine"});
  Matrix expected(2, 2);
  expected << 1.0, 1.0, 0.0, 0.0;
  EXPECT_EQ(c.probabilities, expected);
}

TEST(Confusion, HandCountedNinePixels) {
  // truth:     0 0 0 1 1 1 2 2 2
  // predicted: 0 0 1 1 1 2 2 0 2
  const std::vector<int> truth{0, 0, 0, 1, 1, 1, 2, 2, 2};
  const ConfusionMatrix c = confusion_matrix(make_map(3, 3, {0, 0, 1, 1, 1, 2, 2, 0, 2}), truth, {"a", "b", "c"});
  Matrix counts(3, 3);
  counts << 2, 0, 1,
            1, 2, 0,
            0, 1, 2;
  EXPECT_EQ(c.counts, counts);
  for (Index j = 0; j < 3; ++j) EXPECT_NEAR(c.probabilities.col(j).sum(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(c.probabilities(0, 0), 2.0 / 3.0);
}

TEST(Confusion, MissingTruthColumnFlagged) {
  const std::vector<int> truth{0, 0, 2, 2};
  const ConfusionMatrix c = confusion_matrix(make_map(2, 2, {0, 1, 2, 2}), truth, {"a", "b", "c"});
  EXPECT_EQ(c.missing_truth, (std::vector<bool>{false, true, false}));
  EXPECT_TRUE(c.probabilities.col(1).isZero(0.0));
}

TEST(Pcc, PerfectAndHalfMaps) {
  // 4x1 survey: pixels 0,1 form a halo of class 1, the rest are clutter.
  const std::vector<int> truth{1, 1, 0, 0};
  const std::vector<Halo> halos{Halo{1, 0, 0, 1, {0, 1}}};
  const PccResult perfect = pcc(make_map(4, 1, truth), halos, truth, 2);
  EXPECT_EQ(perfect.per_class, (std::vector<double>{1.0, 1.0}));
  const PccResult half = pcc(make_map(4, 1, {1, 0, 0, 0}), halos, truth, 2);
  EXPECT_DOUBLE_EQ(half.per_class[1], 0.5);
  EXPECT_EQ(half.evaluated, (std::vector<Index>{2, 2}));
  EXPECT_EQ(half.correct, (std::vector<Index>{2, 1}));
  const std::vector<Halo> empty{Halo{1, 0, 0, 1, {}}};
  EXPECT_THROW(pcc(make_map(4, 1, truth), empty, truth, 2), InvalidArgument);
}

TEST(Pcc, EqualsConfusionDiagonalWhenHalosCoverClasses) {
  const SurveyDataset d = generate_survey(SurveyLayout::standard(30, 12), PulseParams{}, 12);
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<int> predicted = d.labels;
  for (int& p : predicted) {
    if (pick(rng) == 0) p = pick(rng);
  }
  const ClassMap map = make_map(30, 12, predicted);
  const ConfusionMatrix c = confusion_matrix(map, d.labels, d.class_names);
  const PccResult p = pcc(map, d.halos, d.labels, 4);
  for (Index k = 0; k < 4; ++k) {
    if (p.evaluated[static_cast<std::size_t>(k)] == 0) continue;
    EXPECT_NEAR(p.per_class[static_cast<std::size_t>(k)], c.probabilities(k, k), 1e-12) << "class " << k;
  }
}

}  // namespace
}  // namespace sparsemine
