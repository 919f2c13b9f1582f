#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (fs::temp_directory_path() / "toprec-cli-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string data(const std::string& name) { return std::string(TOPREC_DATA_DIR) + "/" + name; }

// Runs the CLI through the shell; env is a prefix like "TR_CACHE_DIR=/x".
CliRun run_cli(const std::string& args, const std::string& env = "") {
  static TempDir scratch;
  static int counter = 0;
  const fs::path out = scratch.path() / ("out" + std::to_string(counter));
  const fs::path err = scratch.path() / ("err" + std::to_string(counter++));
  const std::string cmd = (env.empty() ? "" : env + " ") + "'" + TOPREC_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  CliRun r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

void write_file(const fs::path& p, const std::string& s) {
  std::ofstream o(p, std::ios::binary);
  o << s;
}

}  // namespace

TEST(CliCompute, OmegaTensor) {
  const CliRun r = run_cli("compute --curve " + data("gaussian_curve.json") + " --omega 0 3");
  ASSERT_EQ(r.status, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("omega").at("h"), 0);
  EXPECT_EQ(j.at("omega").at("n"), 3);
  EXPECT_FALSE(j.at("omega").at("terms").empty());
}

TEST(CliCompute, ExpansionGivesCatalanNumbers) {
  const CliRun r = run_cli("compute --curve " + data("gaussian_curve.json") + " --omega 0 1 --expand 8");
  ASSERT_EQ(r.status, 0) << r.err;
  const Json c = Json::parse(r.out).at("expansion").at("coefficients");
  EXPECT_EQ(c.at("0"), "1");
  EXPECT_EQ(c.at("2"), "1");
  EXPECT_EQ(c.at("4"), "2");
  EXPECT_EQ(c.at("6"), "5");
  EXPECT_EQ(c.at("8"), "14");
  EXPECT_EQ(c.at("7"), "0");
}

TEST(CliCompute, FreeEnergy) {
  const CliRun ok = run_cli("compute --curve " + data("gaussian_curve.json") + " --free-energy 2");
  ASSERT_EQ(ok.status, 0) << ok.err;
  EXPECT_EQ(Json::parse(ok.out).at("free_energy").at("value"), "-1/240");
  const CliRun low = run_cli("compute --curve " + data("gaussian_curve.json") + " --free-energy 1");
  EXPECT_EQ(low.status, 2);
  EXPECT_NE(low.err.find("h >= 2"), std::string::npos) << low.err;
}

TEST(CliCompute, BuildCurveFromModels) {
  const CliRun q = run_cli("compute --model " + data("quartic_model.json") + " --build-curve");
  ASSERT_EQ(q.status, 0) << q.err;
  const Json c = Json::parse(q.out).at("curve");
  EXPECT_EQ(c.at("x").at("num"), Json({"1", "0", "1"}));
  EXPECT_EQ(c.at("y").at("num"), Json({"1/12", "0", "5/4"}));
  EXPECT_EQ(c.at("t"), "5/4");

  const CliRun s = run_cli("compute --model " + data("quartic_series_model.json") + " --build-curve");
  ASSERT_EQ(s.status, 0) << s.err;
  EXPECT_TRUE(Json::parse(s.out).contains("series_curve"));

  const CliRun g = run_cli("compute --model " + data("gaussian_chain.json") + " --build-curve");
  ASSERT_EQ(g.status, 0) << g.err;
  EXPECT_EQ(Json::parse(g.out).at("gaussian_chain").at("gamma2"), "4/3");

  const CliRun cubic = run_cli("compute --model " + data("cubic_chain.json") + " --build-curve");
  ASSERT_EQ(cubic.status, 0) << cubic.err;
  EXPECT_EQ(Json::parse(cubic.out).at("saddle_count").at("degree"), 4);
}

TEST(CliCompute, OutputFileMatchesStdout) {
  TempDir dir;
  const fs::path file = dir.path() / "w.json";
  const CliRun a = run_cli("compute --curve " + data("airy_curve.json") + " --omega 1 1 -o '" + file.string() + "'");
  ASSERT_EQ(a.status, 0) << a.err;
  const CliRun b = run_cli("compute --curve " + data("airy_curve.json") + " --omega 1 1");
  EXPECT_EQ(slurp(file), b.out);
}

TEST(CliValidation, BadInputsExitOne) {
  TempDir dir;
  const fs::path bad = dir.path() / "bad.json";
  // sigma(z) = 2 - z is an involution but x is not sigma-invariant.
  write_file(bad, R"({"x": {"num": ["0","0","1"], "den": ["1"]}, "y": {"num": ["0","1"], "den": ["1"]},
                      "sigma": {"num": ["2","-1"], "den": ["1"]}, "physical_pole": "inf"})");
  const CliRun r = run_cli("compute --curve '" + bad.string() + "' --omega 0 3");
  EXPECT_EQ(r.status, 1);
  EXPECT_FALSE(r.err.empty());

  write_file(bad, "{ not json");
  EXPECT_EQ(run_cli("compute --curve '" + bad.string() + "' --omega 0 3").status, 1);
  EXPECT_EQ(run_cli("compute --curve /nonexistent.json --omega 0 3").status, 1);
  EXPECT_EQ(run_cli("verify --curve " + data("airy_curve.json") + " --suite bogus").status, 1);
  EXPECT_EQ(run_cli("frobnicate").status, 1);
}

TEST(CliValidation, NegativeOmegaIndexIsRejected) {
  const CliRun r = run_cli("compute --curve " + data("gaussian_curve.json") + " --omega -1 2");
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliVerify, GaussianAllSuites) {
  const CliRun r = run_cli("verify --model " + data("gaussian_model.json") + " --suite all --max-chi 4");
  ASSERT_EQ(r.status, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_TRUE(j.at("pass").get<bool>());
  for (const char* s : {"loop", "symmetry", "phi", "oracle", "residue"}) {
    EXPECT_TRUE(j.at("suites").at(s).at("pass").get<bool>()) << s;
    EXPECT_FALSE(j.at("suites").at(s).contains("skipped")) << s;
  }
}

TEST(CliVerify, AirySymmetry) {
  const CliRun r = run_cli("verify --curve " + data("airy_curve.json") + " --suite symmetry");
  ASSERT_EQ(r.status, 0) << r.err;
  const Json checks = Json::parse(r.out).at("suites").at("symmetry").at("checks");
  bool saw03 = false, saw04 = false, saw12 = false;
  for (const auto& c : checks) {
    const int h = c.at("h"), n = c.at("n");
    saw03 |= h == 0 && n == 3;
    saw04 |= h == 0 && n == 4;
    saw12 |= h == 1 && n == 2;
  }
  EXPECT_TRUE(saw03 && saw04 && saw12);
}

TEST(CliVerify, CorruptedTensorNamesSlotPair) {
  TempDir dir;
  const fs::path tensor = dir.path() / "w03.json";
  ASSERT_EQ(run_cli("compute --curve " + data("gaussian_curve.json") + " --omega 0 3 -o '" + tensor.string() + "'").status, 0);
  EXPECT_EQ(run_cli("verify --curve " + data("gaussian_curve.json") + " --tensor '" + tensor.string() + "'").status, 0);

  Json j = Json::parse(slurp(tensor));
  j["omega"]["terms"].push_back({{"coeff", "1"},
                                 {"slots", {{{"branch", "-1"}, {"order", 2}}, {{"branch", "1"}, {"order", 2}}, {{"branch", "1"}, {"order", 2}}}}});
  write_file(tensor, j.dump());
  const CliRun r = run_cli("verify --curve " + data("gaussian_curve.json") + " --tensor '" + tensor.string() + "'");
  EXPECT_EQ(r.status, 1);
  const Json rep = Json::parse(r.out);
  EXPECT_FALSE(rep.at("pass").get<bool>());
  const std::string detail = rep.at("counterexample").at("check").at("detail");
  EXPECT_NE(detail.find("slots 1 and 2"), std::string::npos) << detail;

  j["omega"]["terms"].back()["slots"][0]["branch"] = "7";
  write_file(tensor, j.dump());
  EXPECT_EQ(run_cli("verify --curve " + data("gaussian_curve.json") + " --tensor '" + tensor.string() + "'").status, 1);
}

TEST(CliOracle, MomentsByGenus) {
  const CliRun r = run_cli("oracle --powers 4");
  ASSERT_EQ(r.status, 0) << r.err;
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j.at("by_genus").at("0"), "2");
  EXPECT_EQ(j.at("by_genus").at("1"), "1");
  const Json two = Json::parse(run_cli("oracle --powers 2 2 --t 3").out);
  EXPECT_EQ(two.at("by_genus").at("0"), "18");
  EXPECT_EQ(run_cli("oracle --powers 4 --t x/y").status, 1);
}

TEST(CliDeterminism, RepeatedRunsAreByteIdentical) {
  const std::string args = "compute --model " + data("quartic_model.json") + " --omega 1 2 --expand 3";
  const CliRun a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(CliCache, ColdAndWarmRunsAgree) {
  TempDir cache;
  const std::string env = "TR_CACHE_DIR='" + cache.path().string() + "'";
  const std::string args = "compute --curve " + data("gaussian_curve.json") + " --omega 1 2";
  const CliRun cold = run_cli(args, env);
  ASSERT_EQ(cold.status, 0) << cold.err;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cache.path())) files.push_back(e.path());
  ASSERT_EQ(files.size(), 1u);
  const CliRun warm = run_cli(args, env);
  EXPECT_EQ(cold.out, warm.out);
  EXPECT_EQ(cold.out, run_cli(args).out);

  // The warm run reads the cache: a tampered entry shows up in the output.
  Json c = Json::parse(slurp(files[0]));
  for (auto& w : c.at("correlators"))
    if (w.at("h") == 1 && w.at("n") == 2) w.at("terms")[0]["coeff"] = "12345";
  write_file(files[0], c.dump());
  EXPECT_NE(run_cli(args, env).out.find("12345"), std::string::npos);

  // An entry stored for a different curve is ignored.
  c.at("curve")["t"] = "2";
  write_file(files[0], c.dump());
  EXPECT_EQ(run_cli(args, env).out, cold.out);
}
