#include "sparsemine/dataio.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "sparsemine/errors.hpp"
#include "sparsemine/hash.hpp"

namespace sparsemine {

using nlohmann::json;

namespace {

constexpr std::size_t kHeaderBytes = 6 + 8 + 8;

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  std::array<char, 8> bytes;
  for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(bytes.data(), 8);
}

template <typename T>
bool get_le(std::istream& in, T& value) {
  static_assert(sizeof(T) == 8);
  std::array<unsigned char, 8> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), 8)) return false;
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  std::memcpy(&value, &bits, 8);
  return true;
}

std::ofstream open_out(const fs::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const fs::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw FormatError(FormatError::Kind::io, "cannot open '" + path.string() + "'");
  return in;
}

void finish_write(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw FormatError(FormatError::Kind::io, "write to '" + path.string() + "' failed");
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_hex64(const json& j, const std::string& what) {
  if (!j.is_string()) throw FormatError(FormatError::Kind::parse, what + " must be a hex string");
  const std::string s = j.get<std::string>();
  std::uint64_t v = 0;
  const char* begin = s.data() + (s.rfind("0x", 0) == 0 ? 2 : 0);
  const auto res = std::from_chars(begin, s.data() + s.size(), v, 16);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw FormatError(FormatError::Kind::parse, what + " is not a hex number");
  }
  return v;
}

fs::path with_suffix(const fs::path& prefix, std::string_view suffix) {
  fs::path p = prefix;
  p += std::string(suffix);
  return p;
}

// Reads a manifest field, mapping JSON type errors to FormatError.
template <typename T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(FormatError::Kind::parse, std::string("manifest lacks '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(FormatError::Kind::parse, std::string("manifest field '") + key + "': " + e.what());
  }
}

json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be a JSON object");
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw InvalidArgument(std::string(what) + ": unknown key '" + key + "'");
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_opt_double(const json& j, const char* key, std::optional<double>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<double>();
  }
}

const std::set<std::string> kManifestKeys{"schema_version", "kind", "rows", "cols", "seed", "config", "config_hash"};

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  out.write(kMatrixMagic.data(), static_cast<std::streamsize>(kMatrixMagic.size()));
  put_le(out, static_cast<std::uint64_t>(m.rows()));
  put_le(out, static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.size(); ++i) put_le(out, m.data()[i]);
}

Matrix read_matrix(std::istream& in) {
  std::array<char, 6> magic{};
  in.read(magic.data(), 6);
  if (in.gcount() != 6 || std::string_view(magic.data(), 6) != kMatrixMagic) {
    throw FormatError(FormatError::Kind::bad_magic, "bad magic: not an SPMX1 matrix file");
  }
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  if (!get_le(in, rows) || !get_le(in, cols)) throw FormatError(FormatError::Kind::truncated, "truncated matrix header");
  const auto limit = static_cast<std::uint64_t>(std::numeric_limits<Index>::max()) / 8;
  if (rows > limit || cols > limit || (rows != 0 && cols > limit / rows)) {
    throw FormatError(FormatError::Kind::dimension_overflow, "matrix dimensions overflow");
  }
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index i = 0; i < m.size(); ++i) {
    if (!get_le(in, m.data()[i])) throw FormatError(FormatError::Kind::truncated, "truncated matrix payload");
  }
  return m;
}

void write_matrix(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path, true);
  write_matrix(out, m);
  finish_write(out, path);
}

Matrix read_matrix(const fs::path& path) {
  std::ifstream in = open_in(path, true);
  std::error_code ec;
  const auto size = fs::file_size(path, ec);
  Matrix m = read_matrix(in);
  if (!ec && size != kHeaderBytes + static_cast<std::uintmax_t>(m.size()) * 8) {
    throw FormatError(FormatError::Kind::parse, "trailing bytes after matrix payload in '" + path.string() + "'");
  }
  return m;
}

void write_csv_matrix(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path, false);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  finish_write(out, path);
}

Matrix read_csv_matrix(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  Index line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::string_view cell(line.data() + pos, end - pos);
      while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
      while (!cell.empty() && cell.back() == ' ') cell.remove_suffix(1);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
        throw FormatError(FormatError::Kind::parse,
                          "line " + std::to_string(line_no) + ": cannot parse '" + std::string(cell) + "'");
      }
      values.push_back(v);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw FormatError(FormatError::Kind::ragged_rows, "line " + std::to_string(line_no) + ": expected " +
                                                            std::to_string(rows.front().size()) + " fields, got " +
                                                            std::to_string(values.size()));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

Matrix read_csv_matrix(const fs::path& path) {
  std::ifstream in = open_in(path, false);
  return read_csv_matrix(in);
}

std::uint64_t config_hash(const json& config) { return fnv1a64(config.dump()); }

fs::path matrix_path(const fs::path& prefix) { return with_suffix(prefix, ".spmx"); }
fs::path manifest_path(const fs::path& prefix) { return with_suffix(prefix, ".manifest.json"); }

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out = open_out(path, false);
  out << doc.dump(2) << '\n';
  finish_write(out, path);
}

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path, false);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(FormatError::Kind::parse, "'" + path.string() + "': " + e.what());
  }
}

void save_bundle(const fs::path& prefix, const Matrix& payload, Manifest manifest) {
  manifest.rows = payload.rows();
  manifest.cols = payload.cols();
  manifest.config_hash = config_hash(manifest.config);
  json doc = manifest.extra.is_object() ? manifest.extra : json::object();
  doc["schema_version"] = manifest.schema_version;
  doc["kind"] = manifest.kind;
  doc["rows"] = manifest.rows;
  doc["cols"] = manifest.cols;
  doc["seed"] = manifest.seed;
  doc["config"] = manifest.config;
  doc["config_hash"] = hex64(manifest.config_hash);
  write_matrix(matrix_path(prefix), payload);
  write_json(manifest_path(prefix), doc);
}

Bundle load_bundle(const fs::path& prefix, std::optional<std::string_view> expected_kind) {
  const json doc = read_json(manifest_path(prefix));
  if (!doc.is_object()) throw FormatError(FormatError::Kind::parse, "manifest is not a JSON object");
  Bundle b;
  Manifest& m = b.manifest;
  m.schema_version = field<int>(doc, "schema_version");
  if (m.schema_version != kSchemaVersion) {
    throw FormatError(FormatError::Kind::parse, "unsupported schema version " + std::to_string(m.schema_version));
  }
  m.kind = field<std::string>(doc, "kind");
  if (expected_kind && m.kind != *expected_kind) {
    throw FormatError(FormatError::Kind::kind_mismatch,
                      "bundle kind is '" + m.kind + "', expected '" + std::string(*expected_kind) + "'");
  }
  m.rows = field<Index>(doc, "rows");
  m.cols = field<Index>(doc, "cols");
  m.seed = field<std::uint64_t>(doc, "seed");
  m.config = doc.contains("config") ? doc.at("config") : json::object();
  m.config_hash = parse_hex64(doc.contains("config_hash") ? doc.at("config_hash") : json(), "config_hash");
  if (config_hash(m.config) != m.config_hash) {
    throw FormatError(FormatError::Kind::stale_bundle, "stale bundle: config hash mismatch in '" +
                                                           manifest_path(prefix).string() + "'");
  }
  m.extra = json::object();
  for (const auto& [key, value] : doc.items()) {
    if (!kManifestKeys.count(key)) m.extra[key] = value;
  }
  b.payload = read_matrix(matrix_path(prefix));
  if (b.payload.rows() != m.rows || b.payload.cols() != m.cols) {
    throw FormatError(FormatError::Kind::stale_bundle, "stale bundle: matrix dimensions differ from the manifest");
  }
  return b;
}

void save_dataset(const fs::path& prefix, const SurveyDataset& dataset, const json& config) {
  if (dataset.profiles.cols() != dataset.pixel_count() ||
      static_cast<Index>(dataset.labels.size()) != dataset.pixel_count()) {
    throw InvalidArgument("dataset geometry, labels and profiles disagree");
  }
  Manifest m;
  m.kind = "dataset";
  m.seed = dataset.seed;
  m.config = config;
  m.extra = {{"x_cells", dataset.x_cells},
             {"y_cells", dataset.y_cells},
             {"class_names", dataset.class_names},
             {"labels", dataset.labels},
             {"halos", dataset.halos}};
  save_bundle(prefix, dataset.profiles, std::move(m));
}

SurveyDataset load_dataset(const fs::path& prefix) {
  Bundle b = load_bundle(prefix, "dataset");
  SurveyDataset d;
  const json& e = b.manifest.extra;
  try {
    d.x_cells = field<Index>(e, "x_cells");
    d.y_cells = field<Index>(e, "y_cells");
    d.class_names = field<std::vector<std::string>>(e, "class_names");
    d.labels = field<std::vector<int>>(e, "labels");
    d.halos = field<std::vector<Halo>>(e, "halos");
  } catch (const InvalidArgument& err) {
    throw FormatError(FormatError::Kind::parse, err.what());
  }
  d.seed = b.manifest.seed;
  d.profiles = std::move(b.payload);
  if (d.profiles.cols() != d.pixel_count() || static_cast<Index>(d.labels.size()) != d.pixel_count()) {
    throw FormatError(FormatError::Kind::stale_bundle, "dataset geometry does not match its payload");
  }
  return d;
}

void save_dictionary(const fs::path& prefix, const DictionaryBundle& bundle) {
  Manifest m;
  m.kind = "dictionary";
  m.seed = bundle.config.seed;
  m.config = {{"learner", std::string(to_string(bundle.learner))}, {"train", bundle.config}, {"stop", bundle.stop}};
  m.extra = {{"atoms", bundle.dictionary.atom_count()},
             {"signal_dim", bundle.dictionary.signal_dim()},
             {"fingerprint", hex64(bundle.dictionary.fingerprint())},
             {"report", report_to_json(bundle.report)}};
  save_bundle(prefix, bundle.dictionary.atoms(), std::move(m));
}

DictionaryBundle load_dictionary(const fs::path& prefix) {
  Bundle b = load_bundle(prefix, "dictionary");
  DictionaryBundle out;
  try {
    out.learner = parse_learner(field<std::string>(b.manifest.config, "learner"));
    out.config = field<TrainConfig>(b.manifest.config, "train");
    out.stop = field<StopRule>(b.manifest.config, "stop");
    out.dictionary = Dictionary(std::move(b.payload));
  } catch (const InvalidArgument& err) {
    throw FormatError(FormatError::Kind::parse, err.what());
  }
  if (b.manifest.extra.contains("report")) {
    const json& r = b.manifest.extra.at("report");
    out.report.wall_time_s = r.value("wall_time_s", 0.0);
    out.report.iterations = r.value("iterations", Index{0});
    out.report.final_error = r.value("final_error", 0.0);
    out.report.atoms_replaced = r.value("atoms_replaced", Index{0});
    out.report.elements_dropped = r.value("elements_dropped", Index{0});
    out.report.delta_used = r.value("delta_used", 0.0);
  }
  return out;
}

void save_model(const fs::path& prefix, const SvmModel& model, const json& config) {
  Index total = 0;
  Index dim = -1;
  for (const auto& m : model.machines) {
    total += m.support_vectors.cols();
    if (dim < 0) dim = m.support_vectors.rows();
    if (m.support_vectors.rows() != dim) throw InvalidArgument("machines disagree on feature length");
  }
  Matrix vectors(std::max<Index>(dim, 0), total);
  Matrix coef(total, 1);
  json machines = json::array();
  Index at = 0;
  for (const auto& m : model.machines) {
    const Index n = m.support_vectors.cols();
    vectors.middleCols(at, n) = m.support_vectors;
    coef.col(0).segment(at, n) = m.coefficients;
    at += n;
    machines.push_back({{"positive_class", m.positive_class},
                        {"negative_class", m.negative_class},
                        {"bias", m.bias},
                        {"support_vectors", n},
                        {"converged", m.converged},
                        {"updates", m.updates},
                        {"kkt_violation", m.kkt_violation}});
  }
  Manifest manifest;
  manifest.kind = "model";
  manifest.config = config;
  manifest.extra = {{"class_count", model.class_count},
                    {"cost", model.cost},
                    {"gamma", model.gamma},
                    {"dictionary_fingerprint", hex64(model.dictionary_fingerprint)},
                    {"machines", machines}};
  write_matrix(with_suffix(prefix, ".coef.spmx"), coef);
  save_bundle(prefix, vectors, std::move(manifest));
}

SvmModel load_model(const fs::path& prefix) {
  Bundle b = load_bundle(prefix, "model");
  const Matrix coef = read_matrix(with_suffix(prefix, ".coef.spmx"));
  const json& e = b.manifest.extra;
  SvmModel model;
  model.class_count = field<Index>(e, "class_count");
  model.cost = field<double>(e, "cost");
  model.gamma = field<double>(e, "gamma");
  model.dictionary_fingerprint = parse_hex64(e.contains("dictionary_fingerprint") ? e.at("dictionary_fingerprint") : json(),
                                             "dictionary_fingerprint");
  if (coef.cols() != 1 || coef.rows() != b.payload.cols()) {
    throw FormatError(FormatError::Kind::stale_bundle, "model coefficients do not match its support vectors");
  }
  Index at = 0;
  for (const json& mj : field<json>(e, "machines")) {
    BinarySvm m;
    m.gamma = model.gamma;
    m.positive_class = field<int>(mj, "positive_class");
    m.negative_class = field<int>(mj, "negative_class");
    m.bias = field<double>(mj, "bias");
    m.converged = field<bool>(mj, "converged");
    m.updates = field<Index>(mj, "updates");
    m.kkt_violation = field<double>(mj, "kkt_violation");
    const Index n = field<Index>(mj, "support_vectors");
    if (n < 0 || at + n > b.payload.cols()) throw FormatError(FormatError::Kind::stale_bundle, "model machine sizes exceed payload");
    m.support_vectors = b.payload.middleCols(at, n);
    m.coefficients = coef.col(0).segment(at, n);
    at += n;
    model.machines.push_back(std::move(m));
  }
  if (at != b.payload.cols()) throw FormatError(FormatError::Kind::stale_bundle, "model payload has unused columns");
  return model;
}

void write_sweep_csv(std::ostream& out, std::span<const SweepRecord> records) {
  const std::vector<std::string> names =
      records.empty() ? std::vector<std::string>{} : sweep_parameter_names(records.front().learner);
  out << "algorithm";
  for (const auto& n : names) out << ',' << n;
  out << ",cv,ks_distance,dkw_metric,mean_similarity,wall_time_s\n";
  for (const SweepRecord& r : records) {
    out << to_string(r.learner);
    for (const auto& v : sweep_parameter_values(r.learner, r.config)) out << ',' << v;
    if (r.failed) {
      out << ",nan,nan,nan,nan,nan\n";
      continue;
    }
    out << ',' << format_double(r.cv) << ',' << format_double(r.ks_distance) << ',' << format_double(r.dkw_metric)
        << ',' << format_double(r.mean_similarity) << ',' << format_double(r.wall_time_s) << '\n';
  }
}

void write_sweep_csv(const fs::path& path, std::span<const SweepRecord> records) {
  std::ofstream out = open_out(path, false);
  write_sweep_csv(out, records);
  finish_write(out, path);
}

void write_class_map_pgm(const fs::path& path, const ClassMap& map, Index class_count) {
  if (static_cast<Index>(map.classes.size()) != map.x_cells * map.y_cells) {
    throw InvalidArgument("class map size does not match its geometry");
  }
  std::ofstream out = open_out(path, true);
  out << "P5\n" << map.x_cells << ' ' << map.y_cells << "\n255\n";
  const Index span = std::max<Index>(class_count - 1, 1);
  for (int c : map.classes) {
    const Index clamped = std::clamp<Index>(c, 0, span);
    out.put(static_cast<char>(static_cast<unsigned char>(clamped * 255 / span)));
  }
  finish_write(out, path);
}

void write_class_map_csv(const fs::path& path, const ClassMap& map) {
  if (static_cast<Index>(map.classes.size()) != map.x_cells * map.y_cells) {
    throw InvalidArgument("class map size does not match its geometry");
  }
  std::ofstream out = open_out(path, false);
  for (Index y = 0; y < map.y_cells; ++y) {
    for (Index x = 0; x < map.x_cells; ++x) {
      if (x) out << ',';
      out << map.at(x, y);
    }
    out << '\n';
  }
  finish_write(out, path);
}

void write_confusion_csv(const fs::path& path, const ConfusionMatrix& cm) {
  std::ofstream out = open_out(path, false);
  out << "predicted\\truth";
  for (const auto& n : cm.class_names) out << ',' << n;
  out << '\n';
  for (Index r = 0; r < cm.probabilities.rows(); ++r) {
    out << cm.class_names[static_cast<std::size_t>(r)];
    for (Index c = 0; c < cm.probabilities.cols(); ++c) out << ',' << format_double(cm.probabilities(r, c));
    out << '\n';
  }
  finish_write(out, path);
}

void write_epdf_csv(const fs::path& path, std::span<const double> mass) {
  std::ofstream out = open_out(path, false);
  out << "bin_lower,bin_upper,mass\n";
  const double n = static_cast<double>(mass.size());
  for (std::size_t b = 0; b < mass.size(); ++b) {
    out << format_double(static_cast<double>(b) / n) << ',' << format_double(static_cast<double>(b + 1) / n) << ','
        << format_double(mass[b]) << '\n';
  }
  finish_write(out, path);
}

json report_to_json(const LearnReport& report) {
  json trace = json::array();
  for (const DominoIteration& it : report.trace) {
    trace.push_back({{"iteration", it.iteration},
                     {"batch_begin", it.batch_begin},
                     {"batch_end", it.batch_end},
                     {"previous_sample", it.previous_sample},
                     {"correlated", it.correlated},
                     {"updated_atoms", it.updated_atoms},
                     {"active_pool", it.active_pool},
                     {"dropped", it.dropped},
                     {"weighted_error", it.weighted_error}});
  }
  return {{"wall_time_s", report.wall_time_s},
          {"iterations", report.iterations},
          {"final_error", report.final_error},
          {"atoms_replaced", report.atoms_replaced},
          {"elements_dropped", report.elements_dropped},
          {"delta_used", report.delta_used},
          {"trace", trace}};
}

json pcc_to_json(const PccResult& pcc, std::span<const std::string> class_names) {
  json classes = json::array();
  for (std::size_t c = 0; c < pcc.per_class.size(); ++c) {
    const double v = pcc.per_class[c];
    classes.push_back({{"class_id", c},
                       {"name", c < class_names.size() ? class_names[c] : std::to_string(c)},
                       {"pcc", std::isnan(v) ? json(nullptr) : json(v)},
                       {"evaluated", pcc.evaluated[c]},
                       {"correct", pcc.correct[c]}});
  }
  return {{"classes", classes}};
}

void to_json(json& j, const Scatterer& s) {
  j = {{"reflectivity", s.reflectivity}, {"delay_s", s.delay}, {"duration_s", s.duration}};
}

void from_json(const json& j, Scatterer& s) {
  reject_unknown(j, {"reflectivity", "delay_s", "duration_s"}, "scatterer");
  s.reflectivity = j.at("reflectivity").get<double>();
  s.delay = j.at("delay_s").get<double>();
  s.duration = j.at("duration_s").get<double>();
}

void to_json(json& j, const TargetSpec& t) {
  j = {{"class_id", t.class_id},
       {"center_x", t.center_x},
       {"center_y", t.center_y},
       {"halo_radius", t.halo_radius},
       {"scatterers", t.scatterers}};
}

void from_json(const json& j, TargetSpec& t) {
  reject_unknown(j, {"class_id", "center_x", "center_y", "halo_radius", "scatterers"}, "target");
  t.class_id = j.at("class_id").get<int>();
  t.center_x = j.at("center_x").get<Index>();
  t.center_y = j.at("center_y").get<Index>();
  t.halo_radius = j.at("halo_radius").get<Index>();
  t.scatterers = j.at("scatterers").get<std::vector<Scatterer>>();
}

void to_json(json& j, const SurveyLayout& l) {
  j = {{"x_cells", l.x_cells},
       {"y_cells", l.y_cells},
       {"class_names", l.class_names},
       {"targets", l.targets},
       {"clutter_density", l.clutter_density},
       {"clutter_amplitude", l.clutter_amplitude},
       {"noise_sigma", l.noise_sigma},
       {"samples", l.samples}};
}

void from_json(const json& j, SurveyLayout& l) {
  reject_unknown(j,
                 {"preset", "x_cells", "y_cells", "class_names", "targets", "clutter_density", "clutter_amplitude",
                  "noise_sigma", "samples"},
                 "layout");
  const Index x = j.value("x_cells", l.x_cells);
  const Index y = j.value("y_cells", l.y_cells);
  if (j.contains("preset")) {
    const auto preset = j.at("preset").get<std::string>();
    if (preset == "standard") {
      l = SurveyLayout::standard(x, y);
    } else if (preset == "separable") {
      l = SurveyLayout::separable(x, y);
    } else {
      throw InvalidArgument("layout: unknown preset '" + preset + "'");
    }
  }
  l.x_cells = x;
  l.y_cells = y;
  read_opt(j, "class_names", l.class_names);
  read_opt(j, "targets", l.targets);
  read_opt(j, "clutter_density", l.clutter_density);
  read_opt(j, "clutter_amplitude", l.clutter_amplitude);
  read_opt(j, "noise_sigma", l.noise_sigma);
  read_opt(j, "samples", l.samples);
}

void to_json(json& j, const PulseParams& p) {
  j = {{"center_frequency_hz", p.center_frequency},
       {"amplitude", p.amplitude},
       {"sampling_frequency_hz", p.sampling_frequency},
       {"offset_s", nullable(p.offset)}};
}

void from_json(const json& j, PulseParams& p) {
  reject_unknown(j, {"center_frequency_hz", "amplitude", "sampling_frequency_hz", "offset_s"}, "pulse");
  read_opt(j, "center_frequency_hz", p.center_frequency);
  read_opt(j, "amplitude", p.amplitude);
  read_opt(j, "sampling_frequency_hz", p.sampling_frequency);
  read_opt_double(j, "offset_s", p.offset);
}

void to_json(json& j, const TrainConfig& c) {
  j = {{"K", c.atoms},
       {"N_t", c.iterations},
       {"K_s", c.sparsity},
       {"delta", nullable(c.delta)},
       {"entropy", c.entropy_delta},
       {"N_b", c.new_batch},
       {"N_r", c.previous_batch},
       {"N_u", c.drop_after},
       {"chi", nullable(c.chi)},
       {"lambda", c.lambda},
       {"odl_batch", c.odl_batch},
       {"prune_min_usage", c.prune_min_usage},
       {"prune_max_coherence", c.prune_max_coherence},
       {"seed", c.seed}};
}

void from_json(const json& j, TrainConfig& c) {
  reject_unknown(j,
                 {"K", "N_t", "K_s", "delta", "entropy", "N_b", "N_r", "N_u", "chi", "lambda", "odl_batch",
                  "prune_min_usage", "prune_max_coherence", "seed"},
                 "train config");
  read_opt(j, "K", c.atoms);
  read_opt(j, "N_t", c.iterations);
  read_opt(j, "K_s", c.sparsity);
  read_opt_double(j, "delta", c.delta);
  read_opt(j, "entropy", c.entropy_delta);
  read_opt(j, "N_b", c.new_batch);
  read_opt(j, "N_r", c.previous_batch);
  read_opt(j, "N_u", c.drop_after);
  read_opt_double(j, "chi", c.chi);
  read_opt(j, "lambda", c.lambda);
  read_opt(j, "odl_batch", c.odl_batch);
  read_opt(j, "prune_min_usage", c.prune_min_usage);
  read_opt(j, "prune_max_coherence", c.prune_max_coherence);
  read_opt(j, "seed", c.seed);
}

void to_json(json& j, const StopRule& s) {
  j = {{"K_s", s.max_nonzeros ? json(*s.max_nonzeros) : json(nullptr)}, {"delta", nullable(s.max_residual)}};
}

void from_json(const json& j, StopRule& s) {
  reject_unknown(j, {"K_s", "delta"}, "stop rule");
  s.max_nonzeros.reset();
  if (j.contains("K_s") && !j.at("K_s").is_null()) s.max_nonzeros = j.at("K_s").get<Index>();
  s.max_residual.reset();
  read_opt_double(j, "delta", s.max_residual);
}

void to_json(json& j, const Halo& h) {
  j = {{"class_id", h.class_id},
       {"center_x", h.center_x},
       {"center_y", h.center_y},
       {"radius", h.radius},
       {"pixels", h.pixels}};
}

void from_json(const json& j, Halo& h) {
  reject_unknown(j, {"class_id", "center_x", "center_y", "radius", "pixels"}, "halo");
  h.class_id = j.at("class_id").get<int>();
  h.center_x = j.at("center_x").get<Index>();
  h.center_y = j.at("center_y").get<Index>();
  h.radius = j.at("radius").get<Index>();
  h.pixels = j.at("pixels").get<std::vector<Index>>();
}

}  // namespace sparsemine
