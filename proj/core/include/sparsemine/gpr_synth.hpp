#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sparsemine/types.hpp"

namespace sparsemine {

/// Transmit pulse of an impulse GPR: derivative-of-Gaussian monocycle.
struct PulseParams {
  double center_frequency = 2e9;     ///< f_c [Hz]
  double amplitude = 1.0;            ///< A, peak amplitude
  double sampling_frequency = 40e9;  ///< f_s [Hz]
  std::optional<double> offset;      ///< tau [s]; 1/f_c when unset

  double tau() const { return offset.value_or(1.0 / center_frequency); }
  double sample_period() const { return 1.0 / sampling_frequency; }

  /// Throws InvalidArgument unless f_c > 0, f_s > 2 f_c and A > 0.
  void validate() const;
};

/// One scattering centre of a target's channel impulse response.
struct Scatterer {
  double reflectivity = 0.0;  ///< alpha_m (signed)
  double delay = 0.0;         ///< t_m [s], >= 0
  double duration = 0.0;      ///< Delta T_m [s], > 0
};

/// 2 sqrt(e) pi f_c A (t - tau) exp(-2 [pi f_c (t - tau)]^2).
double monocycle(double t, const PulseParams& pulse);

/// The monocycle sampled at t = n / f_s for n in [0, samples).
Vector sampled_monocycle(const PulseParams& pulse, Index samples);

/// h[n] = sum_m alpha_m exp(-4 pi ((t_n - t_m) / Delta T_m)^2).
///
/// Throws InvalidArgument("empty grid") for an empty grid and when the grid
/// is not strictly increasing.
Vector target_cir(std::span<const Scatterer> scatterers, std::span<const double> t_grid);

/// Linear convolution of a and b truncated to the first `samples` lags.
Vector truncated_convolution(const Vector& a, const Vector& b, Index samples);

/// Sampled pulse convolved with the sampled CIR (grid t_n = n / f_s), cut to
/// `samples` values, plus i.i.d. N(0, noise_sigma^2) noise.
Vector range_profile(std::span<const Scatterer> scatterers, const PulseParams& pulse,
                     double noise_sigma, Index samples, std::mt19937_64& rng);

inline constexpr int kClutterClass = 0;

/// A buried target: class, footprint and the scatterers shared by its halo.
struct TargetSpec {
  int class_id = 1;
  Index center_x = 0;
  Index center_y = 0;
  Index halo_radius = 1;  ///< in cells, Euclidean in index space
  std::vector<Scatterer> scatterers;
};

/// Geometry and difficulty knobs of a synthetic survey.
///
/// X cells have 1 cm pitch, Y cells 4 cm. Class 0 is clutter.
struct SurveyLayout {
  Index x_cells = 60;
  Index y_cells = 24;
  std::vector<std::string> class_names{"clutter", "large", "medium", "small"};
  std::vector<TargetSpec> targets;
  double clutter_density = 1.5;    ///< mean clutter scatterers per pixel (Poisson)
  double clutter_amplitude = 0.35; ///< reflectivity ~ U(-a, a)
  double noise_sigma = 0.05;       ///< additive noise std, in units of the pulse amplitude
  Index samples = 211;             ///< samples per range profile

  /// Throws InvalidArgument on bad counts, out-of-grid targets, unknown
  /// classes, or overlapping halos ("halo collision").
  void validate() const;

  /// Clutter plus large/medium/small targets spread along X.
  static SurveyLayout standard(Index x_cells = 60, Index y_cells = 24);
  /// Same geometry with weak clutter and low noise.
  static SurveyLayout separable(Index x_cells = 60, Index y_cells = 24);
};

struct Halo {
  int class_id = 0;
  Index center_x = 0;
  Index center_y = 0;
  Index radius = 0;
  std::vector<Index> pixels;  ///< sorted pixel indices
};

/// Pixel indices (y * x_cells + x) within `target`'s halo, sorted.
std::vector<Index> halo_pixels(const TargetSpec& target, Index x_cells, Index y_cells);

/// Labelled synthetic survey; pixel p = y * x_cells + x is column p of profiles.
struct SurveyDataset {
  SignalMatrix profiles;
  std::vector<int> labels;
  std::vector<Halo> halos;
  Index x_cells = 0;
  Index y_cells = 0;
  std::vector<std::string> class_names;
  std::uint64_t seed = 0;

  Index pixel_count() const noexcept { return x_cells * y_cells; }
  Index class_count() const noexcept { return static_cast<Index>(class_names.size()); }
  /// Number of pixels carrying each label.
  std::vector<Index> class_histogram() const;
};

/// Deterministic survey generation for a given seed.
SurveyDataset generate_survey(const SurveyLayout& layout, const PulseParams& pulse,
                              std::uint64_t seed);

/// floor(keep_fraction * rows) distinct rows chosen uniformly, returned sorted.
std::vector<Index> sample_rows(Index rows, double keep_fraction, std::uint64_t seed);

/// Rows of m listed in `rows`, in that order.
Matrix select_rows(const Matrix& m, std::span<const Index> rows);

struct ReducedSignals {
  SignalMatrix signals;
  std::vector<Index> rows;  ///< mask to reuse on the dictionary
};

/// Random range-sample reduction; throws InvalidArgument when keep_fraction is
/// outside (0, 1] or fewer than one row would remain.
ReducedSignals reduce_samples(const SignalMatrix& signals, double keep_fraction,
                              std::uint64_t seed);

}  // namespace sparsemine
