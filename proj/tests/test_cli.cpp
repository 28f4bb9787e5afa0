#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

struct RunResult {
  int rc;
  std::string out;
};

const char* cli_path() { return std::getenv("FRACLAP_CLI_PATH"); }

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + cli_path() + "\" " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WEXITSTATUS(status), out};
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

}  // namespace

#define REQUIRE_CLI()                                       \
  do {                                                      \
    if (!cli_path()) SKIP("FRACLAP_CLI_PATH not set");      \
  } while (0)

TEST_CASE("cli: invert prints the formatted function and a JSON body") {
  REQUIRE_CLI();
  const RunResult r = run_cli("invert --family mono --q 0");
  CHECK(r.rc == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() > 1);
  CHECK(ls[0] == "δ(t)");
  std::string rest;
  for (size_t i = 1; i < ls.size(); ++i) rest += ls[i] + "\n";
  const auto j = nlohmann::json::parse(rest);
  CHECK(j["formatted"] == "δ(t)");
  CHECK(j["family"] == "mono");
  CHECK(j["q"] == 0.0);
  REQUIRE(j["singular"].size() == 1);
  CHECK(j["singular"][0]["order"] == 0.0);
  CHECK(j["regular"].empty());
}

TEST_CASE("cli: invert reports the binomial term structure") {
  REQUIRE_CLI();
  const RunResult r =
      run_cli("invert --family binomial --q 1.5 --alpha 1 --sign minus --lambda 1");
  CHECK(r.rc == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() > 1);
  std::string rest;
  for (size_t i = 1; i < ls.size(); ++i) rest += ls[i] + "\n";
  const auto j = nlohmann::json::parse(rest);
  REQUIRE(j["singular"].size() == 1);
  CHECK(j["singular"][0]["coeff"] == 1.0);
  CHECK(j["singular"][0]["order"] == 0.5);
  REQUIRE(j["regular"].size() == 1);
  CHECK(j["regular"][0]["kind"] == "ml");
  CHECK(j["regular"][0]["coeff"] == -1.0);
  CHECK(j["regular"][0]["beta"] == 0.5);
  CHECK(j["exact_multiple"] == false);
}

TEST_CASE("cli: flag misuse exits with code 2") {
  REQUIRE_CLI();
  CHECK(run_cli("invert --family mono --q -1").rc == 2);
  CHECK(run_cli("invert --family cubic --q 1").rc == 2);
  CHECK(run_cli("invert --family mono --q 1 --frobnicate").rc == 2);
  CHECK(run_cli("invert --family mono").rc == 2);  // --q is required
  CHECK(run_cli("fig --id 7").rc == 2);
  CHECK(run_cli("verify --cases 0").rc == 2);
  CHECK(run_cli("eval-ml --z -1").rc == 2);  // --alpha is required
  CHECK(run_cli("").rc == 2);                // a subcommand is required
}

TEST_CASE("cli: help exits cleanly") {
  REQUIRE_CLI();
  CHECK(run_cli("--help").rc == 0);
  CHECK(run_cli("invert --help").rc == 0);
}

TEST_CASE("cli: eval-ml matches the frozen reference") {
  REQUIRE_CLI();
  const RunResult r = run_cli("eval-ml --alpha 0.5 --beta 1 --z -2");
  CHECK(r.rc == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double v = j["value"];
  CHECK(std::fabs(v - 0.2553956763105057438651) < 1e-13 * 0.2553956763105057438651);
  CHECK(j["abs_err"].get<double>() <= 1e-10);
}

TEST_CASE("cli: eval-ml failure paths exit with code 1") {
  REQUIRE_CLI();
  // alpha > 2 with huge |z| has no certifiable scheme
  const RunResult r = run_cli("eval-ml --alpha 2.5 --z -100000");
  CHECK(r.rc == 1);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("error"));
  // an unreachable tolerance also fails verification
  CHECK(run_cli("eval-ml --alpha 0.5 --beta 1 --z -2 --tol 1e-18").rc == 1);
}

TEST_CASE("cli: verify output is deterministic and clean") {
  REQUIRE_CLI();
  const RunResult a = run_cli("verify --seed 5 --cases 8");
  const RunResult b = run_cli("verify --seed 5 --cases 8");
  CHECK(a.rc == 0);
  CHECK(b.rc == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("round-trip: 24 checks, 0 failures") != std::string::npos);
}

TEST_CASE("cli: verify exits 1 when the tolerance is unreachable") {
  REQUIRE_CLI();
  CHECK(run_cli("verify --seed 5 --cases 5 --tol 1e-18").rc == 1);
}

TEST_CASE("cli: delta-regularization sweep is identically zero at integer orders") {
  REQUIRE_CLI();
  const RunResult r = run_cli("fig --id 1 --points 40 --q 1 --q 2");
  CHECK(r.rc == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 41);
  CHECK(ls[0] == "t,q=1,q=2");
  for (size_t i = 1; i < ls.size(); ++i) {
    const auto cells = split(ls[i], ',');
    REQUIRE(cells.size() == 3);
    CHECK(std::stod(cells[1]) == 0.0);
    CHECK(std::stod(cells[2]) == 0.0);
  }
}

TEST_CASE("cli: relaxation sweep reduces to the exponential at alpha = 1") {
  REQUIRE_CLI();
  const RunResult r = run_cli("fig --id 2 --points 50");
  CHECK(r.rc == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 51);
  const auto head = split(ls[0], ',');
  size_t col = 0;
  for (size_t i = 0; i < head.size(); ++i)
    if (head[i] == "E_alpha=1") col = i;
  REQUIRE(col > 0);
  for (size_t i = 1; i < ls.size(); ++i) {
    const auto cells = split(ls[i], ',');
    REQUIRE(cells.size() == head.size());
    CHECK(std::fabs(std::stod(cells[col]) - std::stod(cells[1])) < 1e-10);
  }
}

TEST_CASE("cli: derivative-of-exponential sweep matches the frozen value at lambda t = 1") {
  REQUIRE_CLI();
  const RunResult r = run_cli("fig --id 3");
  CHECK(r.rc == 0);
  const auto ls = lines_of(r.out);
  REQUIRE(ls.size() == 401);
  CHECK(ls[0] ==
        "lambda_t,exp,q=1.3,q=1.7,q=1.9,q=1.99,q=2.01,q=2.1,q=2.3,q=2.7");
  bool found = false;
  for (size_t i = 1; i < ls.size(); ++i) {
    const auto cells = split(ls[i], ',');
    REQUIRE(cells.size() == 10);
    if (std::fabs(std::stod(cells[0]) - 1.0) < 1e-12) {
      found = true;
      CHECK(std::fabs(std::stod(cells[5]) - 0.35479912758909178569) < 1e-13);
      CHECK(std::fabs(std::stod(cells[1]) - std::exp(-1.0)) < 1e-15);
    }
  }
  CHECK(found);
}

TEST_CASE("cli: --out writes the same bytes to a file") {
  REQUIRE_CLI();
  const std::string path = "/tmp/fraclap_cli_test_out.csv";
  std::remove(path.c_str());
  const RunResult direct = run_cli("fig --id 1 --points 10");
  const RunResult filed = run_cli("fig --id 1 --points 10 --out " + path);
  CHECK(filed.rc == 0);
  CHECK(filed.out.empty());
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == direct.out);
  std::remove(path.c_str());
}
