#pragma once

// Point-set parsing and the JSON report format.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "linefit/error.hpp"
#include "linefit/geometry.hpp"
#include "linefit/l2.hpp"
#include "linefit/report.hpp"

namespace linefit {

enum class InputFormat { csv, json };

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline double parse_real(std::string_view field, std::size_t line, std::size_t col) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("expected a real number, got '" + std::string(field) + "'", line, col);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value", line, col);
  return v;
}

inline std::int64_t parse_mult(std::string_view field, std::size_t line, std::size_t col) {
  field = trim(field);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("multiplicity must be an integer, got '" + std::string(field) + "'", line, col);
  }
  if (v < 1) throw ParseError("multiplicity must be >= 1", line, col);
  return v;
}

inline bool is_header(std::string_view line) {
  std::string compact;
  for (char c : line) {
    if (c != ' ' && c != '\t' && c != '\r') compact += c;
  }
  return compact == "x,y" || compact == "x,y,mult";
}

inline std::vector<Point> parse_csv(std::string_view text) {
  std::vector<Point> pts;
  std::size_t line_no = 0;
  bool first_content = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (first_content && is_header(line)) {
      first_content = false;
      continue;
    }
    first_content = false;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() < 2) throw ParseError("expected x,y[,mult]", line_no, fields.size() + 1);
    if (fields.size() > 3) throw ParseError("too many fields", line_no, 4);
    Point p;
    p.x = parse_real(fields[0], line_no, 1);
    p.y = parse_real(fields[1], line_no, 2);
    if (fields.size() == 3) p.mult = parse_mult(fields[2], line_no, 3);
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<Point> parse_json_points(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), 0, 0);
  }
  if (!doc.is_array()) throw ParseError("expected a JSON array of points", 0, 0);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& el = doc[i];
    const std::size_t item = i + 1;
    if (!el.is_object()) throw ParseError("point " + std::to_string(item) + " is not an object", item, 0);
    auto coord = [&](const char* key, std::size_t field) {
      if (!el.contains(key) || !el[key].is_number()) {
        throw ParseError(std::string("missing numeric '") + key + "'", item, field);
      }
      const double v = el[key].get<double>();
      if (!std::isfinite(v)) throw ParseError("non-finite value", item, field);
      return v;
    };
    Point p;
    p.x = coord("x", 1);
    p.y = coord("y", 2);
    if (el.contains("mult")) {
      const auto& m = el["mult"];
      if (!m.is_number_integer()) throw ParseError("multiplicity must be an integer", item, 3);
      p.mult = m.get<std::int64_t>();
      if (p.mult < 1) throw ParseError("multiplicity must be >= 1", item, 3);
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace detail

/// CSV rows are x,y[,mult]; blank lines, '#' comments and an optional
/// "x,y[,mult]" header are skipped. JSON is an array of {x, y, mult?}.
/// Errors carry 1-based line (CSV) or array element (JSON) and field numbers.
inline PointSet parse_points(std::string_view text, InputFormat fmt) {
  std::vector<Point> pts = fmt == InputFormat::csv ? detail::parse_csv(text) : detail::parse_json_points(text);
  if (pts.empty()) throw Error(ErrorCode::EmptyInput, "input contains no points");
  return PointSet(std::move(pts));
}

inline InputFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".json") return InputFormat::json;
  return InputFormat::csv;
}

inline PointSet load_points(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::EmptyInput, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_points(buf.str(), format_for_path(path));
}

// ---------------------------------------------------------------------------
// Rationals
// ---------------------------------------------------------------------------

/// "p/q" (or "p") when v matches a fraction with q <= max_den to 1e-12 relative.
inline std::optional<std::string> rational_string(double v, std::int64_t max_den = 1000000) {
  if (!std::isfinite(v)) return std::nullopt;
  const double target = v;
  const bool neg = v < 0.0;
  double x = std::abs(v);
  // Continued fraction convergents h/k.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(x);
    if (fl > 9e15) break;
    const auto a = static_cast<std::int64_t>(fl);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(approx - std::abs(target)) <= 1e-12 * std::max(1.0, std::abs(target))) {
      const std::string num = std::to_string(neg && h1 != 0 ? -h1 : h1);
      return k1 == 1 ? num : num + "/" + std::to_string(k1);
    }
    const double frac = x - fl;
    if (frac <= 0.0) break;
    x = 1.0 / frac;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

using nlohmann::json;

inline json norm_to_json(Norm n) {
  return json{{"p", n.is_inf() ? json("inf") : json(n.p)}};
}

inline Norm norm_from_json(const json& j) {
  const json& p = j.at("p");
  if (p.is_string()) {
    if (p.get<std::string>() != "inf") throw ParseError("unknown norm", 0, 0);
    return Norm::linf();
  }
  return Norm{p.get<double>()};
}

inline json line_si_to_json(const LineSI& l) { return json{{"a", l.a}, {"b", l.b}}; }
inline LineSI line_si_from_json(const json& j) { return {j.at("a").get<double>(), j.at("b").get<double>()}; }

inline json line_hesse_to_json(const LineHesse& l) {
  return json{{"normal", {l.normal().x, l.normal().y}}, {"c", l.c()}, {"theta", l.theta()}};
}

inline LineHesse line_hesse_from_json(const json& j) {
  const json& n = j.at("normal");
  return LineHesse::from_canonical({n.at(0).get<double>(), n.at(1).get<double>()}, j.at("c").get<double>());
}

inline json line_to_json(const Line& l) {
  if (const auto* si = std::get_if<LineSI>(&l)) {
    json j = line_si_to_json(*si);
    j["form"] = "slope_intercept";
    return j;
  }
  json j = line_hesse_to_json(std::get<LineHesse>(l));
  j["form"] = "hesse";
  return j;
}

inline Line line_from_json(const json& j) {
  if (j.at("form").get<std::string>() == "slope_intercept") return line_si_from_json(j);
  return line_hesse_from_json(j);
}

inline json vec_to_json(Vec2 v) { return json::array({v.x, v.y}); }
inline Vec2 vec_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline json optimal_set_to_json(const OptimalSet& s) {
  json j;
  j["kind"] = optimal_set_kind(s);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, UniqueLine>) {
          j["line"] = line_to_json(v.line);
        } else if constexpr (std::is_same_v<T, ParameterPolytope>) {
          j["vertices"] = json::array();
          for (const LineSI& l : v.vertices) j["vertices"].push_back(line_si_to_json(l));
        } else if constexpr (std::is_same_v<T, LineFamilies>) {
          j["families"] = json::array();
          for (const LineFamily& f : v.families) {
            j["families"].push_back({{"normal", vec_to_json(f.normal)}, {"c_lo", f.c_lo}, {"c_hi", f.c_hi}});
          }
        } else if constexpr (std::is_same_v<T, AllLinesThroughPoint>) {
          j["center"] = vec_to_json(v.center);
        } else {
          j["x0"] = v.x0;
          j["b_lo"] = v.b_lo;
          j["b_hi"] = v.b_hi;
        }
      },
      s);
  if (const auto n = line_count(s)) {
    j["line_count"] = *n;
  } else {
    j["line_count"] = nullptr;
  }
  return j;
}

inline OptimalSet optimal_set_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "unique_line") return UniqueLine{line_from_json(j.at("line"))};
  if (kind == "parameter_polytope") {
    ParameterPolytope p;
    for (const json& v : j.at("vertices")) p.vertices.push_back(line_si_from_json(v));
    return p;
  }
  if (kind == "line_families") {
    LineFamilies f;
    for (const json& v : j.at("families")) {
      f.families.push_back({vec_from_json(v.at("normal")), v.at("c_lo").get<double>(), v.at("c_hi").get<double>()});
    }
    return f;
  }
  if (kind == "all_lines_through_point") return AllLinesThroughPoint{vec_from_json(j.at("center"))};
  if (kind == "vertical_degenerate") {
    return VerticalDegenerate{j.at("x0").get<double>(), j.at("b_lo").get<double>(), j.at("b_hi").get<double>()};
  }
  throw ParseError("unknown optimal set kind '" + kind + "'", 0, 0);
}

inline json decomposition_to_json(const IndexDecomposition& d) {
  return json{{"plus", d.plus},     {"zero", d.zero},     {"minus", d.minus},
              {"w_plus", d.w_plus}, {"w_zero", d.w_zero}, {"w_minus", d.w_minus}};
}

inline IndexDecomposition decomposition_from_json(const json& j) {
  IndexDecomposition d;
  d.plus = j.at("plus").get<std::vector<std::size_t>>();
  d.zero = j.at("zero").get<std::vector<std::size_t>>();
  d.minus = j.at("minus").get<std::vector<std::size_t>>();
  d.w_plus = j.at("w_plus").get<std::int64_t>();
  d.w_zero = j.at("w_zero").get<std::int64_t>();
  d.w_minus = j.at("w_minus").get<std::int64_t>();
  return d;
}

/// Stable report schema. Indices are 0-based positions in the input.
inline json report_to_json(const FitReport& r) {
  json j;
  j["solver"] = r.solver;
  j["norm"] = norm_to_json(r.norm);
  j["distance"] = to_string(r.kind);
  j["objective"] = r.objective;
  const bool enumerative = r.solver.rfind("l1.", 0) == 0 || r.solver.rfind("linf.", 0) == 0;
  if (enumerative) {
    if (const auto q = rational_string(r.objective)) j["objective_rational"] = *q;
  }
  j["optimal_set"] = optimal_set_to_json(r.optimal_set);
  j["residuals"] = r.residuals;
  j["decomposition"] = decomposition_to_json(r.decomposition);
  j["candidates"] = json::array();
  for (const CandidateLine& c : r.candidates) {
    json cj{{"j", c.j},
            {"k", c.k},
            {"hesse", line_hesse_to_json(c.hesse)},
            {"objective", c.objective},
            {"decomposition", decomposition_to_json(c.decomposition)},
            {"certified", c.certified},
            {"optimal", c.optimal}};
    cj["slope_intercept"] = c.si ? line_si_to_json(*c.si) : json(nullptr);
    j["candidates"].push_back(std::move(cj));
  }
  j["linf_certificates"] = json::array();
  for (const LinfCertificate& c : r.linf_certificates) {
    j["linf_certificates"].push_back({{"k1", c.k1}, {"k2", c.k2}, {"k3", c.k3}, {"value", c.value}});
  }
  const Diagnostics& d = r.diagnostics;
  j["diagnostics"] = {{"iterations", d.iterations},
                      {"gradient_norm", d.gradient_norm},
                      {"at_tolerance", d.at_tolerance},
                      {"near_degenerate", d.near_degenerate},
                      {"precision_limited", d.precision_limited},
                      {"multistart_spread", d.multistart_spread},
                      {"tolerance", d.tolerance},
                      {"notes", d.notes}};
  return j;
}

inline FitReport report_from_json(const json& j) {
  try {
    FitReport r;
    r.solver = j.at("solver").get<std::string>();
    r.norm = norm_from_json(j.at("norm"));
    const std::string dist = j.at("distance").get<std::string>();
    if (dist != "vertical" && dist != "orthogonal") throw ParseError("unknown distance '" + dist + "'", 0, 0);
    r.kind = dist == "vertical" ? DistanceKind::vertical : DistanceKind::orthogonal;
    r.objective = j.at("objective").get<double>();
    r.optimal_set = optimal_set_from_json(j.at("optimal_set"));
    r.residuals = j.at("residuals").get<std::vector<double>>();
    r.decomposition = decomposition_from_json(j.at("decomposition"));
    for (const json& cj : j.at("candidates")) {
      CandidateLine c;
      c.j = cj.at("j").get<std::size_t>();
      c.k = cj.at("k").get<std::size_t>();
      if (!cj.at("slope_intercept").is_null()) c.si = line_si_from_json(cj.at("slope_intercept"));
      c.hesse = line_hesse_from_json(cj.at("hesse"));
      c.objective = cj.at("objective").get<double>();
      c.decomposition = decomposition_from_json(cj.at("decomposition"));
      c.certified = cj.at("certified").get<bool>();
      c.optimal = cj.at("optimal").get<bool>();
      r.candidates.push_back(std::move(c));
    }
    for (const json& cj : j.at("linf_certificates")) {
      r.linf_certificates.push_back({cj.at("k1").get<std::size_t>(), cj.at("k2").get<std::size_t>(),
                                     cj.at("k3").get<std::size_t>(), cj.at("value").get<double>()});
    }
    const json& d = j.at("diagnostics");
    r.diagnostics.iterations = d.at("iterations").get<int>();
    r.diagnostics.gradient_norm = d.at("gradient_norm").get<double>();
    r.diagnostics.at_tolerance = d.at("at_tolerance").get<bool>();
    r.diagnostics.near_degenerate = d.at("near_degenerate").get<bool>();
    r.diagnostics.precision_limited = d.at("precision_limited").get<bool>();
    r.diagnostics.multistart_spread = d.at("multistart_spread").get<double>();
    r.diagnostics.tolerance = d.at("tolerance").get<double>();
    r.diagnostics.notes = d.at("notes").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid report: ") + e.what(), 0, 0);
  }
}

inline json l2_report_to_json(const L2Report& r) {
  json j = report_to_json(r.report);
  if (r.eigen) {
    json e{{"lambda_min", r.eigen->lambda_min}, {"lambda_max", r.eigen->lambda_max}, {"d", r.eigen->d}};
    e["formula_line"] = r.eigen->formula_line ? line_hesse_to_json(*r.eigen->formula_line) : json(nullptr);
    j["eigen"] = std::move(e);
  }
  return j;
}

inline L2Report l2_report_from_json(const json& j) {
  L2Report r;
  r.report = report_from_json(j);
  if (j.contains("eigen")) {
    const json& e = j.at("eigen");
    EigenSummary s;
    s.lambda_min = e.at("lambda_min").get<double>();
    s.lambda_max = e.at("lambda_max").get<double>();
    s.d = e.at("d").get<double>();
    if (!e.at("formula_line").is_null()) s.formula_line = line_hesse_from_json(e.at("formula_line"));
    r.eigen = s;
  }
  return r;
}

}  // namespace linefit
