// End-to-end tests of the command-line tool: exit-code contract,
// determinism, and the optimize -> evaluate round trip. The binary path
// comes from the LYAPOPT_CLI environment variable set by CTest.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string cli_path() {
  const char* p = std::getenv("LYAPOPT_CLI");
  REQUIRE_MESSAGE(p != nullptr, "LYAPOPT_CLI must point at the binary");
  return p;
}

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "lyapopt_cli_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI, returns the exit code; stdout goes to the given file.
int run(const std::string& args, const fs::path& stdout_path) {
  const std::string cmd = cli_path() + " " + args + " > " +
                          stdout_path.string() + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const char* kCatConfig = R"({
  "system": {"kind": "toral_automorphism", "matrix": [[2,1],[1,1]]},
  "grid": {"n": 8},
  "oracle": {"n_steps": 5000, "samples": 8, "seed": 1},
  "optimizer": {"k_weights": [1,0]}
})";

const char* kBConfig = R"({
  "system": {"kind": "toral_automorphism", "matrix": [[2,3],[1,2]]},
  "grid": {"n": 8},
  "oracle": {"n_steps": 5000, "samples": 8, "seed": 1},
  "optimizer": {"k_weights": [1,0]}
})";

}  // namespace

TEST_CASE("config errors exit with status 2") {
  const fs::path dir = work_dir();
  const fs::path out = dir / "out.txt";

  write_file(dir / "unknown_key.json",
             R"({"system": {"kind": "toral_automorphism", "matrix": [[2,1],[1,1]], "bogus": 1}, "grid": {"n": 8}})");
  CHECK(run("oracle --config " + (dir / "unknown_key.json").string(), out) == 2);

  write_file(dir / "bad_kind.json",
             R"({"system": {"kind": "unknown_map"}, "grid": {"n": 8}})");
  CHECK(run("oracle --config " + (dir / "bad_kind.json").string(), out) == 2);

  CHECK(run("oracle --config " + (dir / "missing.json").string(), out) == 2);

  write_file(dir / "cat.json", kCatConfig);
  CHECK(run("evaluate --config " + (dir / "cat.json").string() +
                " /nonexistent/metric.json",
            out) == 2);
}

TEST_CASE("oracle output is deterministic and correct") {
  const fs::path dir = work_dir();
  write_file(dir / "cat.json", kCatConfig);
  const std::string cfg = (dir / "cat.json").string();

  CHECK(run("oracle --config " + cfg, dir / "o1.json") == 0);
  CHECK(run("oracle --config " + cfg, dir / "o2.json") == 0);
  CHECK(read_file(dir / "o1.json") == read_file(dir / "o2.json"));

  const json j = json::parse(read_file(dir / "o1.json"));
  const double target = 0.96242365011920692;
  CHECK(std::abs(j["lambda"][0].get<double>() - target) < 1e-6);
  CHECK(std::abs(j["lambda"][1].get<double>() + target) < 1e-6);
}

TEST_CASE("optimize then evaluate round-trips the summary") {
  const fs::path dir = work_dir();
  write_file(dir / "b.json", kBConfig);
  const std::string cfg = (dir / "b.json").string();
  const std::string prefix = (dir / "run").string();

  CHECK(run("optimize --config " + cfg + " --out " + prefix,
            dir / "opt.json") == 0);
  CHECK(fs::exists(prefix + ".metric.json"));
  CHECK(fs::exists(prefix + ".trace.csv"));
  CHECK(fs::exists(prefix + ".summary.json"));

  CHECK(run("evaluate --config " + cfg + " " + prefix + ".metric.json",
            dir / "eval.json") == 0);
  const json summary = json::parse(read_file(prefix + ".summary.json"));
  const json eval = json::parse(read_file(dir / "eval.json"));
  for (int k = 0; k < 2; ++k)
    CHECK(std::abs(summary["s_partial"][k].get<double>() -
                   eval["s_partial"][k].get<double>()) < 1e-12);
}

TEST_CASE("verify suites pass and report one line each") {
  const fs::path dir = work_dir();
  write_file(dir / "b.json", kBConfig);
  const fs::path out = dir / "verify.txt";
  CHECK(run("verify --config " + (dir / "b.json").string(), out) == 0);
  const std::string text = read_file(out);
  for (const char* name :
       {"horn", "majorization", "barycenter", "convexity", "lipschitz",
        "bochi", "gradient"})
    CHECK(text.find(std::string("PASS  ") + name) != std::string::npos);
  CHECK(run("verify --config " + (dir / "b.json").string() +
                " --suite nosuch",
            out) == 2);
}

TEST_CASE("bochi table shrinks the s_1 gap") {
  const fs::path dir = work_dir();
  write_file(dir / "fib.json", R"({
    "system": {"kind": "toral_automorphism", "matrix": [[2,-1],[1,-1]]},
    "grid": {"n": 8}
  })");
  const fs::path out = dir / "bochi.csv";
  CHECK(run("bochi --config " + (dir / "fib.json").string(), out) == 0);
  const std::string text = read_file(out);
  CHECK(text.find("N,s_1,s_2") == 0);
  // N = 1 row holds the flat value, later rows the collapsed one.
  CHECK(text.find("\n1,0.96242365011920") != std::string::npos);
  CHECK(text.find("\n8,0.48121182505960") != std::string::npos);
}
