#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gexp/cli.hpp"

using gexp::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gexp_test_" + name);
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}).code == gexp::kExitUsage);
  CHECK(run({"nope"}).code == gexp::kExitUsage);
  CHECK(run({"pbar"}).code == gexp::kExitUsage);
  CHECK(run({"pbar", "--payoff", "sigmoid", "--band", "2,1"}).code == gexp::kExitUsage);
  CHECK(run({"pbar", "--payoff", "sigmoid", "--drift", "cubic"}).code == gexp::kExitUsage);
  CHECK(run({"coupling", "--steps", "100"}).code == gexp::kExitUsage);
  auto r = run({"gheat", "--format", "xml"});
  CHECK(r.code == gexp::kExitUsage);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("version and help") {
  auto v = run({"--version"});
  CHECK(v.code == gexp::kExitPass);
  CHECK(v.out.find(gexp::kVersion) != std::string::npos);
  CHECK(run({"--help"}).code == gexp::kExitPass);
}

TEST_CASE("JSON report layout") {
  auto r = run({"pbar", "--payoff", "sigmoid", "--method", "pde", "--sequential"});
  REQUIRE(r.code == gexp::kExitPass);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["schema"] == gexp::kSchemaVersion);
  CHECK(j["config"]["command"] == "pbar");
  CHECK(j["config"]["flags"]["payoff"] == "sigmoid");
  CHECK(j["pde"]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(j["pass"] == true);
}

TEST_CASE("failed checks exit with code 1") {
  // The printed constant is too small for p = 4 at this point; the Holder form is not.
  std::vector<std::string> args{"harnack", "--drift", "ou", "--band", "1,1", "--p", "4",
                                "--T",     "0.5",     "--y", "0.6",    "--sequential"};
  CHECK(run(args).code == gexp::kExitCheckFailed);
  args.push_back("--exponent");
  args.push_back("holder");
  CHECK(run(args).code == gexp::kExitPass);
}

TEST_CASE("CSV reports carry a config header") {
  auto r = run({"harnack", "--format", "csv", "--sweep", "3", "--sequential"});
  REQUIRE(r.code == gexp::kExitPass);
  CHECK(r.out.rfind("# gexp 0.1.0 schema=1 config=", 0) == 0);
  CHECK(r.out.find("\nkind,drift,") != std::string::npos);
}

TEST_CASE("config file fills flags not given on the command line") {
  auto path = temp_file("config.txt");
  {
    std::ofstream f(path);
    f << "# test config\n"
      << "payoff = lorentzian\n"
      << "x = 0.5   # start\n"
      << "method = pde\n";
  }
  auto r = run({"pbar", "--config", path.string(), "--x", "0.25"});
  REQUIRE(r.code == gexp::kExitPass);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["config"]["flags"]["payoff"] == "lorentzian");
  CHECK(j["config"]["flags"]["x"] == 0.25);
  CHECK_FALSE(j["config"]["flags"].contains("config"));
  {
    std::ofstream f(path);
    f << "no equals sign\n";
  }
  CHECK(run({"pbar", "--config", path.string()}).code == gexp::kExitUsage);
  CHECK(run({"pbar", "--config", "/nonexistent/file"}).code == gexp::kExitUsage);
  std::filesystem::remove(path);
}

TEST_CASE("GEXP_SEED supplies the default seed") {
  std::vector<std::string> args{"pbar", "--payoff", "sigmoid", "--method", "mc",
                                "--paths", "200", "--steps", "16", "--sequential"};
  ::setenv("GEXP_SEED", "77", 1);
  auto a = nlohmann::json::parse(run(args).out);
  ::unsetenv("GEXP_SEED");
  auto b = nlohmann::json::parse(run(args).out);
  CHECK(a["config"]["flags"]["seed"] == 77);
  CHECK(b["config"]["flags"]["seed"] == 20240601);
  CHECK(a["mc"]["value"] != b["mc"]["value"]);
  ::setenv("GEXP_SEED", "abc", 1);
  CHECK(run(args).code == gexp::kExitUsage);
  ::unsetenv("GEXP_SEED");
}

TEST_CASE("sequential runs are byte-identical, and --out writes the same bytes") {
  std::vector<std::vector<std::string>> commands{
      {"gheat", "--payoff", "sigmoid", "--nx", "101"},
      {"pbar", "--payoff", "clipped-x2", "--band", "0.5,1", "--paths", "500", "--steps", "32"},
      {"harnack", "--band", "0.5,1", "--sweep", "3"},
      {"shift-harnack", "--drift", "tanh:1", "--sweep", "3"},
      {"coupling", "--paths", "300", "--steps", "128"},
      {"kernels", "--ex38-nx", "5", "--ex38-ny", "9", "--stationarity", "false"},
      {"axioms", "--band", "0.5,1", "--paths", "200", "--steps", "32", "--nx", "201"}};
  for (auto args : commands) {
    args.push_back("--sequential");
    INFO(args.front());
    auto a = run(args);
    auto b = run(args);
    CHECK(a.code == gexp::kExitPass);
    CHECK(a.out == b.out);
    auto path = temp_file("out.json");
    args.push_back("--out");
    args.push_back(path.string());
    auto c = run(args);
    CHECK(c.out.empty());
    std::ifstream f(path, std::ios::binary);
    std::string written((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    CHECK(written == a.out);
    std::filesystem::remove(path);
  }
}
