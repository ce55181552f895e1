#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LINEFIT_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string data(const char* name) { return std::string(LINEFIT_DATA_DIR) + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("fit l2 vertical prints the least-squares line", "[cli]") {
  const Run r = run("fit --norm l2 --distance vertical --in " + data("four.csv"));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["solver"] == "l2.algebraic");
  CHECK(j["optimal_set"]["kind"] == "unique_line");
  CHECK(j["optimal_set"]["line"]["a"].get<double>() == Catch::Approx(0.55).margin(1e-12));
}

TEST_CASE("fit l1 with all optima reports the segment and every candidate", "[cli]") {
  const Run r = run("fit --norm l1 --distance vertical --all-optima --in " + data("five.csv"));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["objective"] == 4.0);
  CHECK(j["objective_rational"] == "4");
  CHECK(j["optimal_set"]["kind"] == "parameter_polytope");
  CHECK(j["optimal_set"]["vertices"].size() == 2);
  CHECK(j["candidates"].size() == 10);

  const Run brief = run("fit --norm l1 --distance vertical --in " + data("five.csv"));
  CHECK(nlohmann::json::parse(brief.out)["candidates"].empty());
}

TEST_CASE("verify prints solver and oracle values", "[cli]") {
  const Run r = run("verify --norm linf --distance orthogonal --in " + data("trapezium.csv"));
  CHECK(r.status == 0);
  CHECK(r.out == "solver=1.0 oracle=1.0 agree\n");
  const Run lp = run("verify --norm lp --p 3 --distance vertical --in " + data("four.csv"));
  CHECK(lp.status == 0);
  CHECK(lp.out.find(" agree") != std::string::npos);
}

TEST_CASE("compare on collinear points", "[cli]") {
  const Run r = run("compare --in " + data("collinear.json"));
  REQUIRE(r.status == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["regimes"].size() == 6);
  for (const auto& e : j["regimes"]) CHECK(e["objective"].get<double>() == Catch::Approx(0.0).margin(1e-12));
  CHECK(j["l2_coincidence"]["coincide"] == true);
  CHECK(j["l2_coincidence"]["branch"] == "collinear");
  CHECK(nlohmann::json::parse(run("compare --p 3 --in " + data("four.csv")).out)["regimes"].size() == 8);
}

TEST_CASE("output files and plots", "[cli]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "linefit_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / "r.json", svg = dir / "plot.svg";
  const Run r = run("fit --norm l1 --distance orthogonal --in " + data("corner.csv") + " --out " + out.string() +
                    " --svg " + svg.string());
  CHECK(r.status == 0);
  CHECK(r.out.empty());
  CHECK(nlohmann::json::parse(slurp(out))["optimal_set"]["line_count"] == 2);
  CHECK(slurp(svg).find("<svg") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("exit codes", "[cli]") {
  namespace fs = std::filesystem;
  const fs::path bad = fs::temp_directory_path() / "linefit_bad.csv";
  std::ofstream(bad) << "0,0\n1,oops\n";
  CHECK(run("fit --norm l1 --distance vertical --in " + bad.string()).status == 2);
  fs::remove(bad);
  CHECK(run("fit --norm l1 --distance vertical --in /nonexistent.csv").status == 2);
  CHECK(run("fit --norm lp --distance vertical --in " + data("four.csv")).status == 2);
  CHECK(run("fit --norm l3 --distance vertical --in " + data("four.csv")).status == 2);
  CHECK(run("fit --distance vertical --in " + data("four.csv")).status == 2);

  const fs::path one = fs::temp_directory_path() / "linefit_one.csv";
  std::ofstream(one) << "1,1\n";
  CHECK(run("fit --norm l2 --distance orthogonal --in " + one.string()).status == 3);
  fs::remove(one);
  CHECK(run("--help").status == 0);
}
