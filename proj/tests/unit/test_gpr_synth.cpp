#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sparsemine/errors.hpp"
#include "sparsemine/gpr_synth.hpp"

namespace sparsemine {
namespace {

TEST(Monocycle, VanishesAtOffset) {
  PulseParams p;
  EXPECT_DOUBLE_EQ(monocycle(p.tau(), p), 0.0);
  p.offset = 3e-10;
  EXPECT_DOUBLE_EQ(monocycle(3e-10, p), 0.0);
}

TEST(Monocycle, PeakEqualsAmplitude) {
  PulseParams p;
  p.amplitude = 1.7;
  // Dense scan around the pulse; the analytic peak sits at tau + 1 / (2 pi f_c).
  double best = 0.0;
  double best_t = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double t = p.tau() - 1e-9 + i * 1e-14;
    const double v = std::abs(monocycle(t, p));
    if (v > best) {
      best = v;
      best_t = t;
    }
  }
  EXPECT_NEAR(best, 1.7, 1e-6);
  EXPECT_NEAR(best_t - p.tau(), 1.0 / (2.0 * std::numbers::pi * p.center_frequency), 2e-14);
}

TEST(Monocycle, TailIsNegligible) {
  PulseParams p;
  EXPECT_LT(std::abs(monocycle(p.tau() + 10.0 / p.center_frequency, p)), 1e-3 * p.amplitude);
}

TEST(Monocycle, OddAboutOffset) {
  PulseParams p;
  for (int i = 0; i < 400; ++i) {
    const double u = i * 2.5e-12;
    EXPECT_NEAR(monocycle(p.tau() + u, p), -monocycle(p.tau() - u, p), 1e-12);
  }
}

TEST(PulseParams, Validation) {
  PulseParams p;
  EXPECT_NO_THROW(p.validate());
  p.sampling_frequency = 3e9;
  EXPECT_THROW(p.validate(), InvalidArgument);
  p = PulseParams{};
  p.amplitude = 0.0;
  EXPECT_THROW(p.validate(), InvalidArgument);
}

std::vector<double> grid(Index n, double step) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) t[static_cast<std::size_t>(i)] = static_cast<double>(i) * step;
  return t;
}

TEST(TargetCir, EmptyGridThrows) {
  std::vector<Scatterer> s{{1.0, 0.0, 1e-10}};
  EXPECT_THROW(target_cir(s, std::vector<double>{}), InvalidArgument);
}

TEST(TargetCir, NoScatterersGivesZeros) {
  const auto t = grid(32, 25e-12);
  EXPECT_TRUE(target_cir({}, t).isZero(0.0));
}

TEST(TargetCir, SingleScattererPeaksAtItsDelay) {
  const auto t = grid(64, 25e-12);
  std::vector<Scatterer> s{{1.0, t[20], 2e-10}};
  const Vector h = target_cir(s, t);
  EXPECT_DOUBLE_EQ(h(20), 1.0);
  Index arg = 0;
  h.maxCoeff(&arg);
  EXPECT_EQ(arg, 20);
}

TEST(TargetCir, Linear) {
  const auto t = grid(80, 25e-12);
  const Scatterer a{0.7, 3e-10, 2e-10};
  const Scatterer b{-0.4, 9e-10, 1e-10};
  const Vector both = target_cir(std::vector<Scatterer>{a, b}, t);
  const Vector sum = target_cir(std::vector<Scatterer>{a}, t) + target_cir(std::vector<Scatterer>{b}, t);
  EXPECT_LT((both - sum).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(RangeProfile, ImpulseResponseIsThePulse) {
  PulseParams p;
  std::mt19937_64 rng(1);
  // A scatterer far narrower than a sample acts as a unit impulse at lag 0.
  std::vector<Scatterer> s{{1.0, 0.0, 1e-15}};
  const Vector y = range_profile(s, p, 0.0, 64, rng);
  EXPECT_LT((y - sampled_monocycle(p, 64)).cwiseAbs().maxCoeff(), 1e-12);

  Vector impulse = Vector::Zero(10);
  impulse(0) = 1.0;
  const Vector pulse = sampled_monocycle(p, 40);
  EXPECT_EQ(truncated_convolution(pulse, impulse, 40), pulse);
}

TEST(RangeProfile, SilentWithoutScatterersOrNoise) {
  std::mt19937_64 rng(2);
  EXPECT_TRUE(range_profile({}, PulseParams{}, 0.0, 211, rng).isZero(0.0));
}

TEST(RangeProfile, NoiseStandardDeviation) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const Vector y = range_profile({}, PulseParams{}, 0.1, 2048, rng);
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(y.size()));
    EXPECT_GE(sd, 0.08);
    EXPECT_LE(sd, 0.12);
  }
}

TEST(RangeProfile, SuperpositionInReflectivity) {
  std::mt19937_64 rng(4);
  const Scatterer a{0.9, 4e-10, 2.5e-10};
  const Scatterer b{-0.3, 1.1e-9, 1.5e-10};
  const Vector ya = range_profile(std::vector<Scatterer>{a}, PulseParams{}, 0.0, 211, rng);
  const Vector yb = range_profile(std::vector<Scatterer>{b}, PulseParams{}, 0.0, 211, rng);
  const Vector yab = range_profile(std::vector<Scatterer>{a, b}, PulseParams{}, 0.0, 211, rng);
  EXPECT_LT((yab - ya - yb).norm() / yab.norm(), 1e-10);
  Scatterer a3 = a;
  a3.reflectivity *= 3.0;
  const Vector y3 = range_profile(std::vector<Scatterer>{a3}, PulseParams{}, 0.0, 211, rng);
  EXPECT_LT((y3 - 3.0 * ya).norm() / y3.norm(), 1e-10);
}

TEST(GenerateSurvey, NoTargetsMeansAllClutter) {
  SurveyLayout layout = SurveyLayout::standard(12, 6);
  layout.targets.clear();
  const SurveyDataset d = generate_survey(layout, PulseParams{}, 5);
  for (int label : d.labels) EXPECT_EQ(label, kClutterClass);
  EXPECT_TRUE(d.halos.empty());
  EXPECT_EQ(d.profiles.cols(), 72);
}

TEST(GenerateSurvey, DeterministicForSeed) {
  const SurveyLayout layout = SurveyLayout::standard(20, 10);
  const SurveyDataset a = generate_survey(layout, PulseParams{}, 42);
  const SurveyDataset b = generate_survey(layout, PulseParams{}, 42);
  const SurveyDataset c = generate_survey(layout, PulseParams{}, 43);
  EXPECT_EQ(a.profiles, b.profiles);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.profiles, c.profiles);
}

TEST(GenerateSurvey, LabelHistogramMatchesLayout) {
  const SurveyLayout layout = SurveyLayout::standard(20, 20);
  ASSERT_EQ(layout.class_names.size(), 4u);
  const SurveyDataset d = generate_survey(layout, PulseParams{}, 9);

  // Recount from the layout geometry directly.
  std::vector<Index> expected(4, 0);
  for (Index y = 0; y < 20; ++y) {
    for (Index x = 0; x < 20; ++x) {
      int label = kClutterClass;
      for (const TargetSpec& t : layout.targets) {
        const Index dx = x - t.center_x;
        const Index dy = y - t.center_y;
        if (dx * dx + dy * dy <= t.halo_radius * t.halo_radius) label = t.class_id;
      }
      ++expected[static_cast<std::size_t>(label)];
      EXPECT_EQ(d.labels[static_cast<std::size_t>(y * 20 + x)], label);
    }
  }
  EXPECT_EQ(d.class_histogram(), expected);
  Index total = 0;
  for (Index c : expected) total += c;
  EXPECT_EQ(total, d.pixel_count());
  for (int c = 1; c <= 3; ++c) EXPECT_GT(expected[static_cast<std::size_t>(c)], 0) << "class " << c;
}

TEST(GenerateSurvey, HalosInsideGrid) {
  const SurveyDataset d = generate_survey(SurveyLayout::standard(), PulseParams{}, 3);
  EXPECT_EQ(d.halos.size(), 6u);
  for (const Halo& h : d.halos) {
    EXPECT_FALSE(h.pixels.empty());
    for (Index p : h.pixels) {
      EXPECT_GE(p, 0);
      EXPECT_LT(p, d.pixel_count());
      EXPECT_EQ(d.labels[static_cast<std::size_t>(p)], h.class_id);
    }
  }
}

TEST(GenerateSurvey, HaloCollisionRejected) {
  SurveyLayout layout = SurveyLayout::standard(30, 12);
  layout.targets[1].center_x = layout.targets[0].center_x + 1;
  layout.targets[1].center_y = layout.targets[0].center_y;
  try {
    generate_survey(layout, PulseParams{}, 1);
    FAIL() << "expected a collision";
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "halo collision");
  }
}

TEST(ReduceSamples, FullKeepIsIdentity) {
  const Matrix y = Matrix::Random(211, 5);
  const ReducedSignals r = reduce_samples(y, 1.0, 7);
  ASSERT_EQ(r.rows.size(), 211u);
  for (Index i = 0; i < 211; ++i) EXPECT_EQ(r.rows[static_cast<std::size_t>(i)], i);
  EXPECT_EQ(r.signals, y);
}

TEST(ReduceSamples, QuarterOf211Keeps52) {
  const Matrix y = Matrix::Random(211, 3);
  const ReducedSignals r = reduce_samples(y, 0.25, 11);
  EXPECT_EQ(r.rows.size(), 52u);
  EXPECT_EQ(r.signals.rows(), 52);
  for (std::size_t i = 0; i < r.rows.size(); ++i) EXPECT_EQ(r.signals.row(static_cast<Index>(i)), y.row(r.rows[i]));
}

TEST(ReduceSamples, MaskIsSortedDistinctAndSeeded) {
  for (double keep : {0.1, 0.33, 0.5, 0.9}) {
    const auto a = sample_rows(211, keep, 5);
    EXPECT_EQ(a, sample_rows(211, keep, 5));
    EXPECT_EQ(static_cast<Index>(a.size()), static_cast<Index>(std::floor(keep * 211)));
    for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a[i - 1], a[i]);
  }
  EXPECT_NE(sample_rows(211, 0.5, 5), sample_rows(211, 0.5, 6));
}

TEST(ReduceSamples, RejectsBadFractions) {
  const Matrix y = Matrix::Random(10, 2);
  EXPECT_THROW(reduce_samples(y, 0.0, 1), InvalidArgument);
  EXPECT_THROW(reduce_samples(y, 1.5, 1), InvalidArgument);
  EXPECT_THROW(reduce_samples(y, 0.05, 1), InvalidArgument);
}

}  // namespace
}  // namespace sparsemine
