#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "kerrwig/cli.hpp"
#include "kerrwig/io.hpp"
#include "kerrwig/parallel.hpp"

using namespace kerrwig;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("kerrwig_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

io::Json small_config() {
  return io::Json::parse(R"({
    "description": "small coherent run",
    "state": {"kind": "coherent", "alpha": 0.5833333333333334},
    "params": {"lambda2": 0.0625},
    "grid": {"half_width": 5.0, "points": 65},
    "times": [0.0, 1.0]
  })");
}

}  // namespace

TEST(Io, FormatDoubleRoundTrips) {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 0.0})
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  EXPECT_EQ(io::format_double(0.5), "0.5");
  std::istringstream tiny("# {}\nv\n" + io::format_double(5e-324) + "\n");
  EXPECT_EQ(io::read_csv(tiny).columns[0][0], 5e-324);
  std::istringstream junk("# {}\nv\n1.5x\n");
  EXPECT_THROW(io::read_csv(junk), std::runtime_error);
}

TEST(Io, ConfigHashIsStableAndSensitive) {
  const io::Json a = small_config();
  io::Json b = a;
  b["params"]["lambda2"] = 0.25;
  EXPECT_EQ(io::config_hash(a), io::config_hash(small_config()));
  EXPECT_NE(io::config_hash(a), io::config_hash(b));
  EXPECT_EQ(io::config_hash(a).size(), 16u);
}

TEST(Io, CsvAndBinaryCarrySameFields) {
  const PhaseGrid g = PhaseGrid::symmetric(2.0, 33);
  std::vector<double> a(g.size()), b(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    a[k] = std::sin(0.37 * k);
    b[k] = 1.0 / (k + 3.0);
  }
  const io::Json meta{{"tag", "roundtrip"}};
  for (int stride : {1, 4}) {
    std::stringstream csv, bin;
    io::write_fields_csv(csv, g, {{"a", &a}, {"b", &b}}, meta, stride);
    io::write_fields_binary(bin, g, {{"a", &a}, {"b", &b}}, meta, stride);
    const io::Table tc = io::read_csv(csv), tb = io::read_fields_binary(bin);
    EXPECT_EQ(tc.metadata, meta);
    EXPECT_EQ(tb.metadata, meta);
    EXPECT_EQ(tc.names, tb.names);
    ASSERT_EQ(tc.columns.size(), 4u);
    const std::size_t rows = static_cast<std::size_t>(((33 - 1) / stride + 1) * ((33 - 1) / stride + 1));
    EXPECT_EQ(tc.columns[2].size(), rows);
    EXPECT_EQ(tc.columns[2], tb.columns[2]);
    EXPECT_EQ(tc.columns[3], tb.columns[3]);
    for (std::size_t r = 0; r < rows; ++r) {
      EXPECT_NEAR(tc.columns[0][r], tb.columns[0][r], 1e-14);
      EXPECT_NEAR(tc.columns[1][r], tb.columns[1][r], 1e-14);
    }
    EXPECT_EQ(tc.columns[2][1], a[static_cast<std::size_t>(stride)]);
  }
}

TEST(Io, RejectsMalformedInput) {
  std::istringstream no_meta("x,p\n1,2\n");
  EXPECT_THROW(io::read_csv(no_meta), std::runtime_error);
  std::istringstream ragged("# {}\nx,p\n1\n");
  EXPECT_THROW(io::read_csv(ragged), std::runtime_error);
  std::vector<double> short_col(3);
  std::ostringstream out;
  EXPECT_THROW(io::write_fields_csv(out, PhaseGrid::symmetric(1.0, 33), {{"s", &short_col}}, {}),
               std::invalid_argument);
}

TEST(Config, ParsesDefaultsAndTimes) {
  io::Json doc = small_config();
  doc["times"] = {{"start", 0.0}, {"stop", 0.5}, {"count", 3}, {"unit", "recurrence"}};
  const cli::RunConfig cfg = cli::parse_config(doc);
  EXPECT_EQ(cfg.grid, PhaseGrid::symmetric(5.0, 65));
  EXPECT_DOUBLE_EQ(cfg.params.lambda2_x, 0.0625);
  ASSERT_EQ(cfg.times.size(), 3u);
  EXPECT_NEAR(cfg.times[2], 8 * M_PI, 1e-12);
  EXPECT_EQ(cfg.hash, io::config_hash(doc));
  EXPECT_EQ(cfg.format, "csv");
}

TEST(Config, ReportsEveryProblem) {
  io::Json doc = small_config();
  doc["colour"] = "blue";
  doc["grid"]["points"] = 64;
  doc["params"]["hbar"] = -1.0;
  try {
    cli::parse_config(doc);
    FAIL() << "expected ConfigError";
  } catch (const cli::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("colour"), std::string::npos) << msg;
    EXPECT_NE(msg.find("grid"), std::string::npos) << msg;
    EXPECT_NE(msg.find("params"), std::string::npos) << msg;
  }
  EXPECT_THROW(cli::parse_config(io::Json::parse(R"({"grid": {"half_width": 4}})")), cli::ConfigError);
}

TEST(Config, StateKinds) {
  io::Json doc = small_config();
  doc["state"] = io::Json::parse(R"({"kind": "fock", "terms": [[0, 1.0], [1, 1.0]]})");
  EXPECT_TRUE(std::holds_alternative<FockSpec>(cli::parse_config(doc).state));
  doc["state"] = io::Json::parse(R"({"kind": "squeezed", "zeta": 0.3333})");
  EXPECT_TRUE(std::holds_alternative<SqueezedSpec>(cli::parse_config(doc).state));
  doc["state"] = io::Json::parse(R"({"kind": "gaussian", "center": [-4.0, 0.0]})");
  const cli::RunConfig g = cli::parse_config(doc);
  ASSERT_TRUE(std::holds_alternative<CoherentSpec>(g.state));
  EXPECT_NEAR(std::get<CoherentSpec>(g.state).alpha.real(), -2.0 * std::sqrt(2.0), 1e-15);
  doc["state"] = io::Json::parse(R"({"kind": "cat"})");
  EXPECT_THROW(cli::parse_config(doc), cli::ConfigError);
}

TEST(Run, EvolveWritesEchoedMetadata) {
  const fs::path dir = fresh_dir("evolve");
  const cli::RunConfig cfg = cli::parse_config(small_config());
  std::ostringstream log;
  ASSERT_EQ(cli::run(cli::Command::evolve, cfg, {dir, "", false}, log), cli::kExitOk) << log.str();
  std::ifstream in(dir / "W_t0001.csv");
  const io::Table t = io::read_csv(in);
  EXPECT_EQ(t.metadata.at("config_hash"), cfg.hash);
  EXPECT_EQ(t.metadata.at("code_version"), io::kCodeVersion);
  EXPECT_EQ(cli::parse_config(t.metadata.at("config")).hash, cfg.hash);
  EXPECT_EQ(t.columns[2].size(), 65u * 65u);
  EXPECT_TRUE(fs::exists(dir / "negativity.json"));
}

TEST(Run, BinaryMatchesCsv) {
  const fs::path a = fresh_dir("csv"), b = fresh_dir("bin");
  const cli::RunConfig cfg = cli::parse_config(small_config());
  std::ostringstream log;
  ASSERT_EQ(cli::run(cli::Command::evolve, cfg, {a, "csv", false}, log), cli::kExitOk);
  ASSERT_EQ(cli::run(cli::Command::evolve, cfg, {b, "binary", false}, log), cli::kExitOk);
  std::ifstream ca(a / "W_t0001.csv"), cb(b / "W_t0001.bin", std::ios::binary);
  EXPECT_EQ(io::read_csv(ca).columns[2], io::read_fields_binary(cb).columns[2]);
}

TEST(Run, StrictModeFlagsEdgeMass) {
  io::Json doc = small_config();
  doc["state"]["alpha"] = 3.0;
  doc["grid"]["half_width"] = 3.0;
  const cli::RunConfig cfg = cli::parse_config(doc);
  std::ostringstream log;
  EXPECT_EQ(cli::run(cli::Command::evolve, cfg, {fresh_dir("lenient"), "", false}, log), cli::kExitOk);
  EXPECT_EQ(cli::run(cli::Command::evolve, cfg, {fresh_dir("strict"), "", true}, log), cli::kExitNumerical);
}

TEST(Run, OutputIndependentOfThreadCount) {
  io::Json doc = small_config();
  doc["times"] = {0.0, 2.0};
  const cli::RunConfig cfg = cli::parse_config(doc);
  std::ostringstream log;
  const fs::path one = fresh_dir("threads1"), four = fresh_dir("threads4");
  set_thread_count(1);
  ASSERT_EQ(cli::run(cli::Command::current, cfg, {one, "", false}, log), cli::kExitOk);
  set_thread_count(4);
  ASSERT_EQ(cli::run(cli::Command::current, cfg, {four, "", false}, log), cli::kExitOk);
  set_thread_count(0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(one)) {
    EXPECT_EQ(slurp(entry.path()), slurp(four / entry.path().filename())) << entry.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 3u);
}

TEST(Binary, ExitCodes) {
  const fs::path dir = fresh_dir("binary");
  std::ofstream(dir / "bad.json") << R"({"state": {"kind": "coherent", "alpha": 1}, "bogus": 1})";
  std::ofstream(dir / "good.json") << small_config().dump();
  const std::string exe = KERRWIG_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("evolve --config " + (dir / "bad.json").string() + " --out " + (dir / "o1").string()), 2);
  EXPECT_EQ(status("evolve --config " + (dir / "good.json").string() + " --out " + (dir / "o2").string()), 0);
  EXPECT_EQ(status("evolve --config " + (dir / "missing.json").string()), 2);
  EXPECT_TRUE(fs::exists(dir / "o2" / "W_t0000.csv"));
}
