#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "sparsemine/dataio.hpp"
#include "sparsemine/errors.hpp"

namespace sparsemine {
namespace {

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("sparsemine_dataio_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path dir_;
};

Matrix awkward_values() {
  Matrix m(3, 4);
  m << 0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
       1e300, -1e-300, std::numeric_limits<double>::max(), std::numeric_limits<double>::epsilon(),
       3.141592653589793, -2.5e-17, 123456789.123456789, 7.0;
  return m;
}

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

FormatError::Kind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no FormatError thrown";
  return FormatError::Kind::io;
}

TEST_F(TempDir, BinaryRoundTripIsBitExact) {
  const Matrix m = awkward_values();
  write_matrix(path("m.spmx"), m);
  EXPECT_TRUE(bit_equal(read_matrix(path("m.spmx")), m));

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix big(37, 11);
  for (Index i = 0; i < big.size(); ++i) big.data()[i] = g(rng);
  write_matrix(path("big.spmx"), big);
  EXPECT_TRUE(bit_equal(read_matrix(path("big.spmx")), big));
}

TEST_F(TempDir, EmptyMatrixIsHeaderOnly) {
  write_matrix(path("e.spmx"), Matrix(0, 0));
  EXPECT_EQ(fs::file_size(path("e.spmx")), kMatrixMagic.size() + 16);
  const Matrix back = read_matrix(path("e.spmx"));
  EXPECT_EQ(back.rows(), 0);
  EXPECT_EQ(back.cols(), 0);
}

TEST(BinaryMatrix, LittleEndianLayout) {
  Matrix m(2, 1);
  m << 1.0, -2.0;
  std::ostringstream out;
  write_matrix(out, m);
  const std::string bytes = out.str();
  ASSERT_EQ(bytes.size(), 6u + 16u + 16u);
  EXPECT_EQ(bytes.substr(0, 6), "SPMX1\n");
  EXPECT_EQ(static_cast<unsigned char>(bytes[6]), 2u);  // rows, low byte first
  EXPECT_EQ(static_cast<unsigned char>(bytes[14]), 1u);
  // 1.0 is 0x3FF0000000000000: the last byte of the first value is 0x3F.
  EXPECT_EQ(static_cast<unsigned char>(bytes[22 + 7]), 0x3Fu);
  EXPECT_EQ(static_cast<unsigned char>(bytes[22]), 0x00u);
}

TEST(BinaryMatrix, TypedErrors) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  std::ostringstream out;
  write_matrix(out, m);
  const std::string good = out.str();

  std::string bad = good;
  bad[0] = 'X';
  EXPECT_EQ(kind_of([&] {
              std::istringstream in(bad);
              read_matrix(in);
            }),
            FormatError::Kind::bad_magic);

  EXPECT_EQ(kind_of([&] {
              std::istringstream in(good.substr(0, good.size() - 3));
              read_matrix(in);
            }),
            FormatError::Kind::truncated);
  EXPECT_EQ(kind_of([&] {
              std::istringstream in(good.substr(0, 10));
              read_matrix(in);
            }),
            FormatError::Kind::truncated);

  std::string huge = good;
  for (int i = 0; i < 8; ++i) huge[static_cast<std::size_t>(6 + i)] = '\xff';
  EXPECT_EQ(kind_of([&] {
              std::istringstream in(huge);
              read_matrix(in);
            }),
            FormatError::Kind::dimension_overflow);
}

TEST_F(TempDir, TrailingBytesRejected) {
  write_matrix(path("t.spmx"), Matrix::Ones(2, 2));
  {
    std::ofstream app(path("t.spmx"), std::ios::binary | std::ios::app);
    app << "junk";
  }
  EXPECT_EQ(kind_of([&] { read_matrix(path("t.spmx")); }), FormatError::Kind::parse);
  EXPECT_EQ(kind_of([&] { read_matrix(path("missing.spmx")); }), FormatError::Kind::io);
}

TEST_F(TempDir, CsvRoundTrip) {
  write_csv_matrix(path("i.csv"), Matrix::Identity(3, 3));
  std::ifstream in(path("i.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "1,0,0");

  const Matrix m = awkward_values();
  write_csv_matrix(path("m.csv"), m);
  const Matrix back = read_csv_matrix(path("m.csv"));
  ASSERT_EQ(back.rows(), m.rows());
  ASSERT_EQ(back.cols(), m.cols());
  // %.17g is enough for an exact round trip of every finite double.
  EXPECT_TRUE(bit_equal(back, m));
}

TEST(Csv, ScientificNotationAndRaggedRows) {
  std::istringstream sci("1e-3,2.5E+10\n-4e0,0.5\n");
  const Matrix m = read_csv_matrix(sci);
  EXPECT_EQ(m(0, 0), 1e-3);
  EXPECT_EQ(m(0, 1), 2.5e10);
  EXPECT_EQ(m(1, 0), -4.0);

  std::istringstream ragged("1,2,3\n4,5,6\n7,8\n");
  try {
    read_csv_matrix(ragged);
    FAIL() << "expected ragged_rows";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::ragged_rows);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }

  std::istringstream junk("1,abc\n");
  EXPECT_EQ(kind_of([&] { read_csv_matrix(junk); }), FormatError::Kind::parse);

  std::istringstream empty("");
  EXPECT_EQ(read_csv_matrix(empty).size(), 0);
}

TEST_F(TempDir, BundleHashAndKindChecks) {
  Manifest m;
  m.kind = "dataset";
  m.seed = 5;
  m.config = {{"a", 1}, {"b", "two"}};
  save_bundle(path("b"), Matrix::Ones(2, 3), m);
  const Bundle b = load_bundle(path("b"), "dataset");
  EXPECT_EQ(b.manifest.config_hash, config_hash(m.config));
  EXPECT_EQ(b.manifest.rows, 2);
  EXPECT_EQ(b.manifest.seed, 5u);

  EXPECT_EQ(kind_of([&] { load_bundle(path("b"), "model"); }), FormatError::Kind::kind_mismatch);

  nlohmann::json doc = read_json(manifest_path(path("b")));
  doc["config"]["a"] = 2;
  write_json(manifest_path(path("b")), doc);
  try {
    load_bundle(path("b"));
    FAIL() << "expected stale bundle";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::stale_bundle);
    EXPECT_NE(std::string(e.what()).find("stale bundle"), std::string::npos);
  }

  save_bundle(path("c"), Matrix::Ones(2, 3), m);
  write_matrix(matrix_path(path("c")), Matrix::Ones(3, 3));
  EXPECT_EQ(kind_of([&] { load_bundle(path("c")); }), FormatError::Kind::stale_bundle);
}

TEST(ConfigHash, KeyOrderIndependent) {
  const nlohmann::json a = nlohmann::json::parse(R"({"x": 1, "y": [1, 2]})");
  const nlohmann::json b = nlohmann::json::parse(R"({"y": [1, 2], "x": 1})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(nlohmann::json::parse(R"({"x": 2, "y": [1, 2]})")));
}

TEST_F(TempDir, DatasetRestoresHalos) {
  const SurveyDataset d = generate_survey(SurveyLayout::standard(30, 12), PulseParams{}, 3);
  save_dataset(path("ds"), d);
  const SurveyDataset back = load_dataset(path("ds"));
  EXPECT_TRUE(bit_equal(back.profiles, d.profiles));
  EXPECT_EQ(back.labels, d.labels);
  EXPECT_EQ(back.x_cells, d.x_cells);
  EXPECT_EQ(back.y_cells, d.y_cells);
  EXPECT_EQ(back.class_names, d.class_names);
  ASSERT_EQ(back.halos.size(), d.halos.size());
  for (std::size_t i = 0; i < d.halos.size(); ++i) {
    EXPECT_EQ(back.halos[i].class_id, d.halos[i].class_id);
    EXPECT_EQ(back.halos[i].center_x, d.halos[i].center_x);
    EXPECT_EQ(back.halos[i].center_y, d.halos[i].center_y);
    EXPECT_EQ(back.halos[i].radius, d.halos[i].radius);
    EXPECT_EQ(back.halos[i].pixels, d.halos[i].pixels);
  }
  EXPECT_EQ(kind_of([&] { load_dictionary(path("ds")); }), FormatError::Kind::kind_mismatch);
}

TEST_F(TempDir, DictionaryRoundTrip) {
  const SurveyDataset d = generate_survey(SurveyLayout::standard(20, 10), PulseParams{}, 4);
  DictionaryBundle b;
  b.learner = Learner::odl;
  b.config.atoms = 25;
  b.config.iterations = 3;
  b.config.seed = 9;
  b.config.delta = 0.2;
  const LearnResult r = learn(b.learner, d.profiles, b.config);
  b.dictionary = r.dictionary;
  b.report = r.report;
  b.stop = b.config.stop_rule(d.profiles);
  save_dictionary(path("dict"), b);
  const DictionaryBundle back = load_dictionary(path("dict"));
  EXPECT_TRUE(bit_equal(back.dictionary.atoms(), b.dictionary.atoms()));
  EXPECT_EQ(back.dictionary.atom_count(), 25);
  EXPECT_EQ(back.dictionary.fingerprint(), b.dictionary.fingerprint());
  EXPECT_EQ(back.learner, Learner::odl);
  EXPECT_EQ(back.config.atoms, 25);
  EXPECT_EQ(back.config.seed, 9u);
  EXPECT_EQ(back.config.delta, b.config.delta);
  EXPECT_EQ(back.stop.max_nonzeros, b.stop.max_nonzeros);
  EXPECT_EQ(back.stop.max_residual, b.stop.max_residual);
  EXPECT_EQ(back.report.iterations, b.report.iterations);
}

TEST_F(TempDir, ModelRoundTripPredictsIdentically) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Matrix x(3, 45);
  std::vector<int> labels;
  for (Index j = 0; j < 45; ++j) {
    const int c = static_cast<int>(j % 3);
    for (Index i = 0; i < 3; ++i) x(i, j) = g(rng) + (i == c ? 3.0 : 0.0);
    labels.push_back(c);
  }
  SvmModel m = svm_train_multiclass(x, labels, SvmParams{});
  m.dictionary_fingerprint = 0xabcdef0123456789ULL;
  save_model(path("model"), m);
  const SvmModel back = load_model(path("model"));
  EXPECT_EQ(back.class_count, m.class_count);
  EXPECT_EQ(back.dictionary_fingerprint, m.dictionary_fingerprint);
  ASSERT_EQ(back.machines.size(), m.machines.size());
  for (std::size_t i = 0; i < m.machines.size(); ++i) {
    EXPECT_TRUE(bit_equal(back.machines[i].support_vectors, m.machines[i].support_vectors));
    EXPECT_TRUE(bit_equal(back.machines[i].coefficients, m.machines[i].coefficients));
    EXPECT_EQ(back.machines[i].bias, m.machines[i].bias);
    EXPECT_EQ(back.machines[i].positive_class, m.machines[i].positive_class);
  }
  EXPECT_EQ(back.predict(x), m.predict(x));
}

TEST_F(TempDir, JsonConfigsRoundTrip) {
  SurveyLayout layout = SurveyLayout::separable(40, 16);
  layout.noise_sigma = 0.03;
  const nlohmann::json j = layout;
  const SurveyLayout back = j.get<SurveyLayout>();
  EXPECT_EQ(nlohmann::json(back), j);

  TrainConfig c;
  c.entropy_delta = true;
  c.chi = 0.5;
  c.atoms = 12;
  const nlohmann::json jc = c;
  EXPECT_EQ(nlohmann::json(jc.get<TrainConfig>()), jc);

  nlohmann::json unknown = jc;
  unknown["bogus"] = 1;
  EXPECT_THROW(unknown.get<TrainConfig>(), InvalidArgument);

  write_json(path("x.json"), jc);
  EXPECT_EQ(read_json(path("x.json")), jc);
  {
    std::ofstream bad(path("bad.json"));
    bad << "{ not json";
  }
  EXPECT_EQ(kind_of([&] { read_json(path("bad.json")); }), FormatError::Kind::parse);
}

TEST_F(TempDir, ClassMapExports) {
  const ClassMap map{3, 2, {0, 1, 2, 3, 2, 1}};
  write_class_map_pgm(path("m.pgm"), map, 4);
  std::ifstream in(path("m.pgm"), std::ios::binary);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string header = "P5\n3 2\n255\n";
  ASSERT_EQ(bytes.size(), header.size() + 6);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size()]), 0u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 1]), 85u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[header.size() + 3]), 255u);

  write_class_map_csv(path("m.csv"), map);
  EXPECT_EQ(read_csv_matrix(path("m.csv")), (Matrix(2, 3) << 0, 1, 2, 3, 2, 1).finished());
}

TEST_F(TempDir, EpdfCsv) {
  const std::vector<double> mass{0.25, 0.5, 0.25};
  write_epdf_csv(path("e.csv"), mass);
  std::ifstream in(path("e.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "bin_lower,bin_upper,mass");
  const Matrix body = read_csv_matrix(in);
  ASSERT_EQ(body.rows(), 3);
  EXPECT_DOUBLE_EQ(body(1, 0), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(body.col(2).sum(), 1.0);
}

}  // namespace
}  // namespace sparsemine
