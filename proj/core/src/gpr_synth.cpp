#include "sparsemine/gpr_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "sparsemine/errors.hpp"

namespace sparsemine {

namespace {

constexpr double kNs = 1e-9;

// Clutter scatterer ranges.
constexpr double kClutterDelayMin = 0.2 * kNs;
constexpr double kClutterDelayMax = 4.5 * kNs;
constexpr double kClutterDurationMin = 0.1 * kNs;
constexpr double kClutterDurationMax = 0.4 * kNs;

// Within a halo, echoes weaken and arrive later away from the target centre.
constexpr double kHaloTaper = 0.4;
constexpr double kHaloDelayPerCell = 0.02 * kNs;

struct TargetTemplate {
  std::vector<Scatterer> scatterers;
  Index radius;
};

TargetTemplate large_template() { return {{{1.0, 1.6 * kNs, 0.3 * kNs}, {-0.7, 2.3 * kNs, 0.3 * kNs}}, 5}; }
TargetTemplate medium_template() { return {{{0.6, 1.5 * kNs, 0.25 * kNs}, {0.35, 2.1 * kNs, 0.25 * kNs}}, 4}; }
TargetTemplate small_template() { return {{{0.4, 1.3 * kNs, 0.2 * kNs}}, 3}; }

Vector time_grid(const PulseParams& pulse, Index samples) {
  Vector t(samples);
  for (Index n = 0; n < samples; ++n) t(n) = static_cast<double>(n) * pulse.sample_period();
  return t;
}

Vector cir_on_grid(std::span<const Scatterer> scatterers, const Vector& t) {
  return target_cir(scatterers, std::span<const double>(t.data(), static_cast<std::size_t>(t.size())));
}

void validate_scatterer(const Scatterer& s) {
  if (!(s.duration > 0.0) || !(s.delay >= 0.0) || !std::isfinite(s.reflectivity)) {
    throw InvalidArgument("scatterer needs duration > 0, delay >= 0 and finite reflectivity");
  }
}

}  // namespace

void PulseParams::validate() const {
  if (!(center_frequency > 0.0)) throw InvalidArgument("center frequency must be > 0");
  if (!(sampling_frequency > 2.0 * center_frequency)) {
    throw InvalidArgument("sampling frequency must exceed twice the center frequency");
  }
  if (!(amplitude > 0.0)) throw InvalidArgument("pulse amplitude must be > 0");
}

double monocycle(double t, const PulseParams& pulse) {
  const double u = std::numbers::pi * pulse.center_frequency * (t - pulse.tau());
  return 2.0 * std::sqrt(std::numbers::e) * pulse.amplitude * u * std::exp(-2.0 * u * u);
}

Vector sampled_monocycle(const PulseParams& pulse, Index samples) {
  Vector out(samples);
  for (Index n = 0; n < samples; ++n) out(n) = monocycle(static_cast<double>(n) * pulse.sample_period(), pulse);
  return out;
}

Vector target_cir(std::span<const Scatterer> scatterers, std::span<const double> t_grid) {
  if (t_grid.empty()) throw InvalidArgument("empty grid");
  for (std::size_t n = 1; n < t_grid.size(); ++n) {
    if (!(t_grid[n] > t_grid[n - 1])) throw InvalidArgument("time grid must be strictly increasing");
  }
  Vector h = Vector::Zero(static_cast<Index>(t_grid.size()));
  for (const Scatterer& s : scatterers) {
    validate_scatterer(s);
    for (std::size_t n = 0; n < t_grid.size(); ++n) {
      const double z = (t_grid[n] - s.delay) / s.duration;
      h(static_cast<Index>(n)) += s.reflectivity * std::exp(-4.0 * std::numbers::pi * z * z);
    }
  }
  return h;
}

Vector truncated_convolution(const Vector& a, const Vector& b, Index samples) {
  Vector out = Vector::Zero(samples);
  for (Index n = 0; n < samples; ++n) {
    const Index last = std::min<Index>(n, a.size() - 1);
    double acc = 0.0;
    for (Index i = std::max<Index>(0, n - (b.size() - 1)); i <= last; ++i) acc += a(i) * b(n - i);
    out(n) = acc;
  }
  return out;
}

Vector range_profile(std::span<const Scatterer> scatterers, const PulseParams& pulse,
                     double noise_sigma, Index samples, std::mt19937_64& rng) {
  pulse.validate();
  if (samples < 8) throw InvalidArgument("range profile needs at least 8 samples");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  Vector out = Vector::Zero(samples);
  if (!scatterers.empty()) {
    const Vector pulse_samples = sampled_monocycle(pulse, samples);
    out = truncated_convolution(pulse_samples, cir_on_grid(scatterers, time_grid(pulse, samples)), samples);
  }
  if (noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, noise_sigma);
    for (Index n = 0; n < samples; ++n) out(n) += noise(rng);
  }
  return out;
}

std::vector<Index> halo_pixels(const TargetSpec& target, Index x_cells, Index y_cells) {
  std::vector<Index> pixels;
  const Index r = target.halo_radius;
  for (Index y = std::max<Index>(0, target.center_y - r); y <= std::min(y_cells - 1, target.center_y + r); ++y) {
    for (Index x = std::max<Index>(0, target.center_x - r); x <= std::min(x_cells - 1, target.center_x + r); ++x) {
      const Index dx = x - target.center_x;
      const Index dy = y - target.center_y;
      if (dx * dx + dy * dy <= r * r) pixels.push_back(y * x_cells + x);
    }
  }
  return pixels;
}

void SurveyLayout::validate() const {
  if (x_cells < 1 || y_cells < 1) throw InvalidArgument("layout needs at least one cell per axis");
  if (samples < 8) throw InvalidArgument("layout needs at least 8 samples per profile");
  if (class_names.empty()) throw InvalidArgument("layout needs at least the clutter class");
  if (!(clutter_density >= 0.0)) throw InvalidArgument("clutter density must be >= 0");
  if (!(clutter_amplitude >= 0.0)) throw InvalidArgument("clutter amplitude must be >= 0");
  if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");

  std::vector<char> taken(static_cast<std::size_t>(x_cells * y_cells), 0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const TargetSpec& t = targets[i];
    const std::string where = "target " + std::to_string(i);
    if (t.class_id <= kClutterClass || t.class_id >= static_cast<int>(class_names.size())) {
      throw InvalidArgument(where + ": class id out of range");
    }
    if (t.center_x < 0 || t.center_x >= x_cells || t.center_y < 0 || t.center_y >= y_cells) {
      throw InvalidArgument(where + ": center outside the grid");
    }
    if (t.halo_radius < 1) throw InvalidArgument(where + ": halo radius must be >= 1");
    for (const Scatterer& s : t.scatterers) validate_scatterer(s);
    for (Index p : halo_pixels(t, x_cells, y_cells)) {
      auto& cell = taken[static_cast<std::size_t>(p)];
      if (cell) throw InvalidArgument("halo collision");
      cell = 1;
    }
  }
}

SurveyLayout SurveyLayout::standard(Index x_cells, Index y_cells) {
  SurveyLayout layout;
  layout.x_cells = x_cells;
  layout.y_cells = y_cells;
  const double scale = std::min({1.0, static_cast<double>(x_cells) / 60.0, static_cast<double>(y_cells) / 24.0});
  const std::vector<TargetTemplate> templates{large_template(), medium_template(), small_template()};
  std::vector<Index> radius;
  for (const auto& t : templates) {
    radius.push_back(std::max<Index>(1, static_cast<Index>(std::lround(static_cast<double>(t.radius) * scale))));
  }

  const bool two_rows = y_cells >= 4 * radius[0] + 2;
  const std::vector<Index> rows = two_rows ? std::vector<Index>{y_cells / 4, (3 * y_cells) / 4}
                                           : std::vector<Index>{y_cells / 2};
  for (std::size_t row = 0; row < rows.size(); ++row) {
    for (Index slot = 0; slot < 3; ++slot) {
      // The second row mirrors the first so every class appears near both edges.
      const Index kind = row == 0 ? slot : 2 - slot;
      TargetSpec spec;
      spec.class_id = static_cast<int>(kind) + 1;
      spec.center_x = (x_cells * (2 * slot + 1)) / 6;
      spec.center_y = rows[row];
      spec.halo_radius = radius[static_cast<std::size_t>(kind)];
      spec.scatterers = templates[static_cast<std::size_t>(kind)].scatterers;
      layout.targets.push_back(std::move(spec));
    }
  }
  return layout;
}

SurveyLayout SurveyLayout::separable(Index x_cells, Index y_cells) {
  SurveyLayout layout = standard(x_cells, y_cells);
  layout.clutter_density = 0.8;
  layout.clutter_amplitude = 0.15;
  layout.noise_sigma = 0.02;
  return layout;
}

std::vector<Index> SurveyDataset::class_histogram() const {
  std::vector<Index> counts(class_names.size(), 0);
  for (int label : labels) {
    if (label >= 0 && static_cast<std::size_t>(label) < counts.size()) ++counts[static_cast<std::size_t>(label)];
  }
  return counts;
}

SurveyDataset generate_survey(const SurveyLayout& layout, const PulseParams& pulse, std::uint64_t seed) {
  layout.validate();
  pulse.validate();
  const Index m = layout.samples;
  const Index nx = layout.x_cells;
  const Index ny = layout.y_cells;
  const Index pixels = nx * ny;

  SurveyDataset out;
  out.x_cells = nx;
  out.y_cells = ny;
  out.class_names = layout.class_names;
  out.seed = seed;
  out.labels.assign(static_cast<std::size_t>(pixels), kClutterClass);

  std::mt19937_64 rng(seed);
  const Vector pulse_samples = sampled_monocycle(pulse, m);
  const Vector t = time_grid(pulse, m);

  // Clutter echoes, then a 3-pixel moving average along X.
  Matrix clutter = Matrix::Zero(m, pixels);
  if (layout.clutter_density > 0.0 && layout.clutter_amplitude > 0.0) {
    std::poisson_distribution<int> count(layout.clutter_density);
    std::uniform_real_distribution<double> alpha(-layout.clutter_amplitude, layout.clutter_amplitude);
    std::uniform_real_distribution<double> delay(kClutterDelayMin, kClutterDelayMax);
    std::uniform_real_distribution<double> duration(kClutterDurationMin, kClutterDurationMax);
    std::vector<Scatterer> cell;
    for (Index p = 0; p < pixels; ++p) {
      cell.clear();
      const int n = count(rng);
      for (int s = 0; s < n; ++s) {
        const double a = alpha(rng);
        const double d = delay(rng);
        cell.push_back({a, d, duration(rng)});
      }
      if (!cell.empty()) clutter.col(p) = truncated_convolution(pulse_samples, cir_on_grid(cell, t), m);
    }
    Matrix smoothed(m, pixels);
    for (Index y = 0; y < ny; ++y) {
      for (Index x = 0; x < nx; ++x) {
        const Index lo = std::max<Index>(0, x - 1);
        const Index hi = std::min(nx - 1, x + 1);
        Vector acc = Vector::Zero(m);
        for (Index xx = lo; xx <= hi; ++xx) acc += clutter.col(y * nx + xx);
        smoothed.col(y * nx + x) = acc / static_cast<double>(hi - lo + 1);
      }
    }
    clutter = std::move(smoothed);
  }
  out.profiles = std::move(clutter);

  std::vector<Scatterer> local;
  for (const TargetSpec& target : layout.targets) {
    Halo halo{target.class_id, target.center_x, target.center_y, target.halo_radius,
              halo_pixels(target, nx, ny)};
    const double reach = static_cast<double>(target.halo_radius + 1);
    for (Index p : halo.pixels) {
      out.labels[static_cast<std::size_t>(p)] = target.class_id;
      const double dx = static_cast<double>(p % nx - target.center_x);
      const double dy = static_cast<double>(p / nx - target.center_y);
      const double dist = std::hypot(dx, dy);
      const double gain = 1.0 - kHaloTaper * (dist / reach) * (dist / reach);
      local = target.scatterers;
      for (Scatterer& s : local) {
        s.reflectivity *= gain;
        s.delay += kHaloDelayPerCell * dist;
      }
      if (!local.empty()) out.profiles.col(p) += truncated_convolution(pulse_samples, cir_on_grid(local, t), m);
    }
    out.halos.push_back(std::move(halo));
  }

  if (layout.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, layout.noise_sigma);
    for (Index p = 0; p < pixels; ++p) {
      for (Index n = 0; n < m; ++n) out.profiles(n, p) += noise(rng);
    }
  }
  return out;
}

std::vector<Index> sample_rows(Index rows, double keep_fraction, std::uint64_t seed) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw InvalidArgument("keep fraction must lie in (0, 1]");
  const auto keep = static_cast<Index>(std::floor(keep_fraction * static_cast<double>(rows) + 1e-9));
  if (keep < 1) throw InvalidArgument("sample reduction leaves no rows");
  std::vector<Index> order(static_cast<std::size_t>(rows));
  std::iota(order.begin(), order.end(), Index{0});
  if (keep < rows) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(static_cast<std::size_t>(keep));
    std::sort(order.begin(), order.end());
  }
  return order;
}

Matrix select_rows(const Matrix& m, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] < 0 || rows[r] >= m.rows()) throw InvalidArgument("row index out of range");
    out.row(static_cast<Index>(r)) = m.row(rows[r]);
  }
  return out;
}

ReducedSignals reduce_samples(const SignalMatrix& signals, double keep_fraction, std::uint64_t seed) {
  ReducedSignals out;
  out.rows = sample_rows(signals.rows(), keep_fraction, seed);
  out.signals = select_rows(signals, out.rows);
  return out;
}

}  // namespace sparsemine
