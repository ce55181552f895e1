// linefit: fit optimal lines to planar point sets from the command line.
//
//   linefit fit --norm l1 --distance vertical --in points.csv [--out r.json] [--svg plot.svg]
//   linefit verify --norm linf --distance orthogonal --in points.csv
//   linefit compare --in points.csv
//
// Exit status: 0 success, 1 verify disagreement or I/O failure, 2 input or
// usage error, 3 solver precondition violated, 4 no convergence.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "linefit/linefit.hpp"

namespace {

using linefit::DistanceKind;
using linefit::FitReport;
using linefit::Norm;
using linefit::PointSet;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum Exit : int { ok = 0, disagree = 1, input_error = 2, precondition = 3, no_convergence = 4 };

struct FitOptions {
  std::string norm = "l2";
  double p = 0.0;
  std::string distance = "vertical";
  std::optional<double> tol;
  bool all_optima = false;
  std::string in;
  std::string out;
  std::string svg;
  int angle_samples = 720;
  std::uint64_t seed = linefit::LpSolverConfig{}.seed;
};

// Shortest round-trip decimal; integral values keep a trailing ".0".
std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot replace " + path + ": " + ec.message());
  }
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_atomic(path, content);
  }
}

Norm parse_norm(const FitOptions& o) {
  if (o.norm == "l1") return Norm::l1();
  if (o.norm == "l2") return Norm::l2();
  if (o.norm == "linf") return Norm::linf();
  if (!(o.p > 1.0) || !std::isfinite(o.p)) throw UsageError("--norm lp needs --p with 1 < p < inf");
  return Norm::lp(o.p);
}

DistanceKind parse_kind(const std::string& s) {
  return s == "vertical" ? DistanceKind::vertical : DistanceKind::orthogonal;
}

struct Fit {
  FitReport report;
  json doc;
};

Fit run_fit(const PointSet& ps, const std::string& norm_name, double p, DistanceKind kind,
            std::optional<double> tol, int angle_samples, std::uint64_t seed) {
  const double t = tol.value_or(linefit::default_tolerance(ps));
  const bool vertical = kind == DistanceKind::vertical;
  if (norm_name == "l2") {
    const linefit::L2Report r = vertical ? linefit::fit_algebraic_l2(ps) : linefit::fit_geometric_l2(ps);
    return {r.report, linefit::l2_report_to_json(r)};
  }
  FitReport r;
  if (norm_name == "l1") {
    r = vertical ? linefit::fit_algebraic_l1(ps, t) : linefit::fit_geometric_l1(ps, t);
  } else if (norm_name == "linf") {
    r = vertical ? linefit::fit_algebraic_linf(ps, t) : linefit::fit_geometric_linf(ps, t);
  } else {
    linefit::LpSolverConfig cfg;
    cfg.p = p;
    cfg.angle_samples = angle_samples;
    cfg.seed = seed;
    r = vertical ? linefit::fit_algebraic_lp(ps, cfg) : linefit::fit_geometric_lp(ps, cfg);
  }
  return {r, linefit::report_to_json(r)};
}

int cmd_fit(const FitOptions& o) {
  const PointSet ps = linefit::load_points(o.in);
  parse_norm(o);
  Fit fit = run_fit(ps, o.norm, o.p, parse_kind(o.distance), o.tol, o.angle_samples, o.seed);
  if (!o.all_optima) fit.doc["candidates"] = json::array();
  emit(o.out, fit.doc.dump(2) + "\n");
  if (!o.svg.empty()) write_atomic(o.svg, linefit::render_svg(ps, fit.report));
  return ok;
}

int cmd_verify(const FitOptions& o) {
  const PointSet ps = linefit::load_points(o.in);
  const Norm nm = parse_norm(o);
  const DistanceKind kind = parse_kind(o.distance);
  const Fit fit = run_fit(ps, o.norm, o.p, kind, o.tol, o.angle_samples, o.seed);
  const double s = fit.report.objective;
  double oracle = 0.0;
  bool agree = false;
  const double slack = 1e-9 * (1.0 + std::abs(s));
  if ((nm.p == 1.0 || nm.is_inf()) && ps.total_multiplicity() <= 12) {
    oracle = linefit::exhaustive_pairs_oracle(ps, nm, kind).objective;
    agree = std::abs(s - oracle) <= slack;
  } else {
    const linefit::OracleResult g = linefit::grid_oracle(ps, nm, kind);
    oracle = g.objective;
    agree = s <= oracle + slack && oracle - s <= g.error_bound + slack;
  }
  std::cout << "solver=" << number(s) << " oracle=" << number(oracle) << (agree ? " agree" : " disagree") << "\n";
  return agree ? ok : disagree;
}

int cmd_compare(const FitOptions& o) {
  const PointSet ps = linefit::load_points(o.in);
  json doc;
  doc["regimes"] = json::array();
  std::vector<std::string> norms{"l1", "l2", "linf"};
  if (o.p > 0.0) norms.push_back("lp");
  for (const std::string& n : norms) {
    for (DistanceKind kind : {DistanceKind::vertical, DistanceKind::orthogonal}) {
      FitOptions sub = o;
      sub.norm = n;
      parse_norm(sub);
      const Fit fit = run_fit(ps, n, o.p, kind, o.tol, o.angle_samples, o.seed);
      json entry{{"norm", n},
                 {"distance", linefit::to_string(kind)},
                 {"solver", fit.report.solver},
                 {"objective", fit.report.objective},
                 {"optimal_set", fit.doc["optimal_set"]}};
      if (n == "lp") entry["p"] = o.p;
      doc["regimes"].push_back(std::move(entry));
    }
  }
  const linefit::CoincidenceResult c = linefit::l2_coincidence(ps);
  doc["l2_coincidence"] = {{"coincide", c.coincide}, {"branch", linefit::to_string(c.branch)}, {"diagnosis", c.diagnosis}};
  emit(o.out, doc.dump(2) + "\n");
  return ok;
}

int exit_code_for(const linefit::Error& e) {
  switch (e.code()) {
    case linefit::ErrorCode::ParseError:
    case linefit::ErrorCode::EmptyInput:
      return input_error;
    case linefit::ErrorCode::NoConvergence:
      return no_convergence;
    default:
      return precondition;
  }
}

void add_solver_flags(CLI::App* cmd, FitOptions& o, bool with_norm) {
  if (with_norm) {
    cmd->add_option("--norm", o.norm, "Aggregation norm")
        ->required()
        ->check(CLI::IsMember({"l1", "l2", "linf", "lp"}));
    cmd->add_option("--distance", o.distance, "Point-to-line distance")
        ->required()
        ->check(CLI::IsMember({"vertical", "orthogonal"}));
  }
  cmd->add_option("--p", o.p, "Exponent for --norm lp (p > 1)");
  cmd->add_option("--tol", o.tol,
                  "Tie and on-line classification band (default 1e-9 * (1 + max |coordinate|))");
  cmd->add_option("--in", o.in, "Input points: CSV x,y[,mult] or JSON [{x,y,mult?}]")->required();
  cmd->add_option("--angle-samples", o.angle_samples, "Angle scan resolution for orthogonal Lp")
      ->check(CLI::Range(8, 1 << 20));
  cmd->add_option("--seed", o.seed, "Multi-start seed for Lp");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal line fitting under L1, L2, L-infinity and Lp norms"};
  app.require_subcommand(1);
  FitOptions fit_opts, verify_opts, compare_opts;

  auto* fit = app.add_subcommand("fit", "Fit and print the JSON report");
  add_solver_flags(fit, fit_opts, true);
  fit->add_flag("--all-optima", fit_opts.all_optima, "Include every examined candidate line in the report");
  fit->add_option("--out", fit_opts.out, "Report path (default stdout)");
  fit->add_option("--svg", fit_opts.svg, "Write an SVG plot");

  auto* verify = app.add_subcommand("verify", "Check the solver against a brute-force oracle");
  add_solver_flags(verify, verify_opts, true);

  auto* compare = app.add_subcommand("compare", "Run every norm and distance, plus the L2 coincidence test");
  add_solver_flags(compare, compare_opts, false);
  compare->add_option("--out", compare_opts.out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : input_error;
  }

  try {
    if (*fit) return cmd_fit(fit_opts);
    if (*verify) return cmd_verify(verify_opts);
    return cmd_compare(compare_opts);
  } catch (const UsageError& e) {
    std::cerr << "linefit: " << e.what() << "\n";
    return input_error;
  } catch (const linefit::Error& e) {
    std::cerr << "linefit: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "linefit: " << e.what() << "\n";
    return disagree;
  }
}
