#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "loccap/cli.hpp"
#include "loccap/report_io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "loccap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = loccap::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::size_t count_lines(const fs::path& p) {
  std::ifstream is(p);
  std::size_t n = 0;
  for (std::string line; std::getline(is, line);) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("loccap-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateSquare) {
  const auto r = run({"generate", "--kind", "square", "--d", "25", "--window", "100", "--output", out("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(dir_ / "g" / "emitters.csv"), 26u);
  EXPECT_NE(slurp(dir_ / "g" / "emitters.meta").find("kind = square"), std::string::npos);
}

TEST_F(Cli, GeneratePoissonIsDeterministic) {
  ASSERT_EQ(run({"generate", "--kind", "poisson", "--lambda", "1e-4", "--seed", "7", "--output", out("a")}).code, 0);
  ASSERT_EQ(run({"generate", "--kind", "poisson", "--lambda", "1e-4", "--seed", "7", "--output", out("b")}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "emitters.csv"), slurp(dir_ / "b" / "emitters.csv"));
  EXPECT_EQ(slurp(dir_ / "a" / "emitters.meta"), slurp(dir_ / "b" / "emitters.meta"));
}

TEST_F(Cli, RejectsInvalidParameters) {
  auto r = run({"generate", "--d", "-1", "--output", out("x")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("d must be positive"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
  EXPECT_NE(run({"trace", "--alpha", "2"}).code, 0);
  EXPECT_NE(run({"capacity", "--schemes", "cdma"}).code, 0);
  EXPECT_NE(run({"linresp", "--A", "spin"}).code, 0);
  EXPECT_NE(run({"frobnicate"}).code, 0);
  EXPECT_NE(run({}).code, 0);
}

TEST_F(Cli, TraceApollonius) {
  {
    std::ofstream os(dir_ / "two.csv");
    os << "x,y\n0,0\n25,0\n";
  }
  const auto r = run({"trace", "--kind", "custom", "--emitters", (dir_ / "two.csv").string(), "--emitter", "0",
                      "--output", out("t")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(dir_ / "t" / "area.txt");
  const auto kv = loccap::read_key_values(is);
  const double k = std::pow(10.0, 0.25);
  const double exact = std::numbers::pi * std::pow(k * 25 / (k * k - 1), 2);
  EXPECT_LT(std::abs(std::stod(kv.at("sigma")) - exact) / exact, 5e-3);
}

TEST_F(Cli, TraceSquareGridResiduals) {
  const auto r = run({"trace", "--kind", "square", "--output", out("t"), "--debug"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("debug_sigma_unprojected"), std::string::npos);
  std::ifstream is(dir_ / "t" / "boundary.csv");
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "k,x,y,sir_residual");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    const double residual = std::stod(line.substr(line.rfind(',') + 1));
    EXPECT_LE(std::abs(residual), 5e-10);
    ++rows;
  }
  EXPECT_GT(rows, 1000u);
}

TEST_F(Cli, TraceUnsupportedThreshold) {
  const auto r = run({"trace", "--kind", "square", "--beta", "0.5", "--output", out("t")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("unsupported-by-tracer"), std::string::npos);
}

TEST_F(Cli, ConfigFilePrecedence) {
  const auto cfg = dir_ / "run.cfg";
  {
    std::ofstream os(cfg);
    os << "# trace settings\nbeta = 5\nkind = \"triangular\"\nalpha = 3.5\n";
  }
  const auto r = run({"trace", "--config", cfg.string(), "--beta", "20", "--output", out("t")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("beta = 20\n"), std::string::npos);
  EXPECT_NE(r.out.find("alpha = 3.5\n"), std::string::npos);
}

TEST_F(Cli, ConfigRejectsUnknownKeys) {
  const auto cfg = dir_ / "bad.cfg";
  {
    std::ofstream os(cfg);
    os << "beta = 10\nbogus = 3\n";
  }
  EXPECT_NE(run({"capacity", "--config", cfg.string(), "--output", out("c")}).code, 0);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  const std::string target = out("env");
  ::setenv(loccap::cli::kOutputDirEnv, target.c_str(), 1);
  const auto r = run({"generate"});
  ::unsetenv(loccap::cli::kOutputDirEnv);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(fs::path(target) / "emitters.csv"));
}

TEST_F(Cli, CapacitySweep) {
  const auto r = run({"capacity", "--sweep", "beta", "--alpha", "4", "--schemes", "all", "--values", "2,10,50",
                      "--threads", "2", "--output", out("c")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_lines(dir_ / "c" / "capacity.csv"), 1u + 4 * 3);
  const auto table = slurp(dir_ / "c" / "capacity.dat");
  EXPECT_EQ(table.rfind("# beta square hexagonal triangular aloha\n", 0), 0u);
}

TEST_F(Cli, CapacityPartialFailureKeepsRows) {
  const auto r = run({"capacity", "--sweep", "beta", "--schemes", "square", "--values", "0.5,10", "--output",
                      out("c")});
  EXPECT_EQ(r.code, 1);
  const auto csv = slurp(dir_ / "c" / "capacity.csv");
  EXPECT_NE(csv.find("square,0.5,4,0.0016,nan,nan,0"), std::string::npos);
  EXPECT_NE(csv.find("square,10,4,0.0016,"), std::string::npos);
}

TEST_F(Cli, LinearResponseShear) {
  const auto r = run({"linresp", "--A", "shear", "--kind", "square", "--output", out("l")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(dir_ / "l" / "linresp.txt");
  const auto kv = loccap::read_key_values(is);
  EXPECT_EQ(std::stod(kv.at("predicted")), 0.0);
  EXPECT_LT(std::stod(kv.at("relative_deviation")), 1e-2);
  EXPECT_TRUE(fs::exists(dir_ / "l" / "linresp.csv"));
}

TEST_F(Cli, HessianSmallRegion) {
  const auto r = run({"hessian", "--kind", "triangular", "--region", "150", "--influence", "4", "--format", "csv",
                      "--output", out("h")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto csv = slurp(dir_ / "h" / "hessian.csv");
  EXPECT_EQ(csv.rfind("pattern,Ux,Uy,Uxx,Uxy,Uyy,detH,classification\n", 0), 0u);
  EXPECT_NE(csv.find("LocalMax"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "h" / "hessian.txt"));
}
