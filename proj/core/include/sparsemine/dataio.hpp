#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sparsemine/classifier.hpp"
#include "sparsemine/dictionary.hpp"
#include "sparsemine/dictionary_learning.hpp"
#include "sparsemine/format.hpp"
#include "sparsemine/gpr_synth.hpp"
#include "sparsemine/stats_metrics.hpp"
#include "sparsemine/types.hpp"

namespace sparsemine {

namespace fs = std::filesystem;

inline constexpr std::string_view kMatrixMagic = "SPMX1\n";
inline constexpr int kSchemaVersion = 1;

// Binary matrix files: magic, rows and cols as u64 LE, then column-major f64 LE.
void write_matrix(const fs::path& path, const Matrix& m);
Matrix read_matrix(const fs::path& path);
void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

// Comma-separated text, one matrix row per line, 17 significant digits.
void write_csv_matrix(const fs::path& path, const Matrix& m);
Matrix read_csv_matrix(const fs::path& path);
Matrix read_csv_matrix(std::istream& in);

/// JSON sidecar shared by every bundle.
struct Manifest {
  int schema_version = kSchemaVersion;
  std::string kind;  ///< dataset | dictionary | model | sweep
  Index rows = 0;
  Index cols = 0;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t config_hash = 0;
  nlohmann::json extra = nlohmann::json::object();
};

/// FNV-1a 64 of config.dump(); keys are sorted, so the dump is canonical.
std::uint64_t config_hash(const nlohmann::json& config);

fs::path matrix_path(const fs::path& prefix);
fs::path manifest_path(const fs::path& prefix);

/// Writes <prefix>.spmx and <prefix>.manifest.json. Dimensions and the hash
/// are filled in from the arguments.
void save_bundle(const fs::path& prefix, const Matrix& payload, Manifest manifest);

struct Bundle {
  Matrix payload;
  Manifest manifest;
};

/// Reads a bundle and checks schema, hash and dimensions. A hash mismatch
/// raises FormatError(stale_bundle); a different kind raises kind_mismatch.
Bundle load_bundle(const fs::path& prefix, std::optional<std::string_view> expected_kind = {});

// Typed bundles.

void save_dataset(const fs::path& prefix, const SurveyDataset& dataset,
                  const nlohmann::json& config = nlohmann::json::object());
SurveyDataset load_dataset(const fs::path& prefix);

struct DictionaryBundle {
  Dictionary dictionary;
  Learner learner = Learner::ksvd;
  TrainConfig config;
  StopRule stop;  ///< resolved coding rule used for training and classification
  LearnReport report;
};

void save_dictionary(const fs::path& prefix, const DictionaryBundle& bundle);
DictionaryBundle load_dictionary(const fs::path& prefix);

/// Support vectors go to <prefix>.spmx, coefficients to <prefix>.coef.spmx.
void save_model(const fs::path& prefix, const SvmModel& model,
                const nlohmann::json& config = nlohmann::json::object());
SvmModel load_model(const fs::path& prefix);

// Reports and exports.

/// algorithm,<params...>,cv,ks_distance,dkw_metric,mean_similarity,wall_time_s
void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records);
void write_sweep_csv(const fs::path& path, std::span<const SweepRecord> records);

/// Binary PGM (P5); class id c maps to gray level c * 255 / (classes - 1).
void write_class_map_pgm(const fs::path& path, const ClassMap& map, Index class_count);
/// y_cells lines of x_cells comma-separated class ids.
void write_class_map_csv(const fs::path& path, const ClassMap& map);

/// Header "predicted\\truth,<names>", then one row per predicted class.
void write_confusion_csv(const fs::path& path, const ConfusionMatrix& cm);

/// bin_lower,bin_upper,mass
void write_epdf_csv(const fs::path& path, std::span<const double> mass);

nlohmann::json report_to_json(const LearnReport& report);
nlohmann::json pcc_to_json(const PccResult& pcc, std::span<const std::string> class_names);

void write_json(const fs::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const fs::path& path);

// JSON conversions (found by nlohmann through ADL).

void to_json(nlohmann::json& j, const Scatterer& s);
void from_json(const nlohmann::json& j, Scatterer& s);
void to_json(nlohmann::json& j, const TargetSpec& t);
void from_json(const nlohmann::json& j, TargetSpec& t);
void to_json(nlohmann::json& j, const SurveyLayout& layout);
/// Missing keys keep their SurveyLayout defaults.
void from_json(const nlohmann::json& j, SurveyLayout& layout);
void to_json(nlohmann::json& j, const PulseParams& p);
void from_json(const nlohmann::json& j, PulseParams& p);
void to_json(nlohmann::json& j, const TrainConfig& c);
/// Missing keys keep their TrainConfig defaults.
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const StopRule& s);
void from_json(const nlohmann::json& j, StopRule& s);
void to_json(nlohmann::json& j, const Halo& h);
void from_json(const nlohmann::json& j, Halo& h);

}  // namespace sparsemine
