#pragma once

// File formats used by the command-line tool: CSV matrices, the JSON design
// document, custom criterion descriptors and the 2-D SVG figure.

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "specdesign/criteria.hpp"
#include "specdesign/designer.hpp"
#include "specdesign/error.hpp"
#include "specdesign/linalg.hpp"

namespace specdesign::io {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline double parse_double(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  if (t.empty()) throw Error(ErrorCode::Parse, where + ": empty field");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
    throw Error(ErrorCode::Parse, where + ": '" + t + "' is not a finite number");
  }
  return v;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

/// d lines of d comma-separated numbers. Rows and columns in messages are
/// 1-based. Asymmetry beyond 1e-8 * max|entry| is rejected.
inline SymMatrix parse_matrix_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    const auto fields = split(line, ',');
    for (std::size_t c = 0; c < fields.size(); ++c) {
      row.push_back(parse_double(fields[c], "row " + std::to_string(rows.size() + 1) + ", column " +
                                                std::to_string(c + 1)));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::Parse, "matrix file is empty");
  const std::size_t d = rows.size();
  for (std::size_t r = 0; r < d; ++r) {
    if (rows[r].size() != d) {
      throw Error(ErrorCode::Parse, "row " + std::to_string(r + 1) + " has " +
                                        std::to_string(rows[r].size()) + " columns, expected " +
                                        std::to_string(d));
    }
  }
  Matrix m(d, d);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < d; ++c) m(r, c) = rows[r][c];
  }
  const double tol = 1e-8 * max_abs(m);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r + 1; c < d; ++c) {
      if (std::abs(m(r, c) - m(c, r)) > tol) {
        throw Error(ErrorCode::Parse, fmt::format("matrix is not symmetric: cell (row {}, column {}) = {} "
                                                  "but (row {}, column {}) = {}",
                                                  r + 1, c + 1, m(r, c), c + 1, r + 1, m(c, r)));
      }
    }
  }
  return SymMatrix(m);
}

inline SymMatrix read_matrix_csv(const std::string& path) { return parse_matrix_csv(read_file(path)); }

inline std::string format_matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += fmt::format("{}", m(r, c));
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria

inline Criterion criterion_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "criterion descriptor must be a JSON object");
  const std::string kind = doc.value("kind", "");
  if (kind != "power-sum") {
    throw Error(ErrorCode::UnknownCriterion, "unsupported custom criterion kind '" + kind + "'");
  }
  if (!doc.contains("exponent") || !doc["exponent"].is_number()) {
    throw Error(ErrorCode::Parse, "power-sum descriptor needs a numeric 'exponent'");
  }
  return criteria::power_sum(doc["exponent"].get<double>(), doc.value("name", std::string("power-sum")));
}

/// "a-opt", "d-opt", "e-opt", "neg-sum" or "custom:<descriptor.json>".
inline Criterion load_criterion(const std::string& spec) {
  const std::string prefix = "custom:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::string path = spec.substr(prefix.size());
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Parse, "criterion descriptor '" + path + "': " + e.what());
    }
    return criterion_from_json(doc);
  }
  return builtin(spec);
}

// ---------------------------------------------------------------------------
// Design document

struct DesignDocument {
  int d = 0;
  int k = 0;
  std::string criterion;
  double objective = 0.0;
  double lower_bound = 0.0;
  double s_star = 0.0;
  Vector eigenvalues_before;
  Vector eigenvalues_after;
  Matrix X;  // d x k
};

inline DesignDocument make_document(const DesignResult& r, const std::string& criterion) {
  return {static_cast<int>(r.X.rows()), static_cast<int>(r.X.cols()), criterion, r.objective,
          r.lower_bound, r.s_star, r.eigenvalues_before, r.eigenvalues_after, r.X};
}

namespace detail {

inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number(const nlohmann::json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorCode::Parse, "field '" + field + "' must be a number");
}

inline nlohmann::json vector_json(const Vector& v) {
  auto arr = nlohmann::json::array();
  for (double x : v) arr.push_back(number(x));
  return arr;
}

inline Vector vector_from(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw Error(ErrorCode::Parse, "field '" + field + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], field);
  return v;
}

inline const nlohmann::json& require(const nlohmann::json& doc, const char* field) {
  if (!doc.contains(field)) throw Error(ErrorCode::Parse, std::string("missing field '") + field + "'");
  return doc.at(field);
}

}  // namespace detail

inline nlohmann::json to_json(const DesignDocument& doc) {
  nlohmann::json j;
  j["d"] = doc.d;
  j["k"] = doc.k;
  j["criterion"] = doc.criterion;
  j["objective"] = detail::number(doc.objective);
  j["lower_bound"] = detail::number(doc.lower_bound);
  j["s_star"] = detail::number(doc.s_star);
  j["eigenvalues_before"] = detail::vector_json(doc.eigenvalues_before);
  j["eigenvalues_after"] = detail::vector_json(doc.eigenvalues_after);
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < doc.X.rows(); ++r) rows.push_back(detail::vector_json(doc.X.row(r).transpose()));
  j["X"] = rows;
  return j;
}

inline DesignDocument design_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "design document must be a JSON object");
  DesignDocument doc;
  const auto& d = detail::require(j, "d");
  const auto& k = detail::require(j, "k");
  if (!d.is_number_integer() || !k.is_number_integer() || d.get<int>() < 1 || k.get<int>() < 1) {
    throw Error(ErrorCode::Parse, "'d' and 'k' must be positive integers");
  }
  doc.d = d.get<int>();
  doc.k = k.get<int>();
  const auto& crit = detail::require(j, "criterion");
  if (!crit.is_string()) throw Error(ErrorCode::Parse, "'criterion' must be a string");
  doc.criterion = crit.get<std::string>();
  doc.objective = detail::number(detail::require(j, "objective"), "objective");
  doc.lower_bound = detail::number(detail::require(j, "lower_bound"), "lower_bound");
  doc.s_star = detail::number(detail::require(j, "s_star"), "s_star");
  doc.eigenvalues_before = detail::vector_from(detail::require(j, "eigenvalues_before"), "eigenvalues_before");
  doc.eigenvalues_after = detail::vector_from(detail::require(j, "eigenvalues_after"), "eigenvalues_after");
  if (doc.eigenvalues_before.size() != doc.d || doc.eigenvalues_after.size() != doc.d) {
    throw Error(ErrorCode::Parse, "eigenvalue arrays must have length d");
  }
  const auto& x = detail::require(j, "X");
  if (!x.is_array() || static_cast<int>(x.size()) != doc.d) {
    throw Error(ErrorCode::Parse, "'X' must be an array of d rows");
  }
  doc.X.resize(doc.d, doc.k);
  for (int r = 0; r < doc.d; ++r) {
    const Vector row = detail::vector_from(x[r], "X");
    if (row.size() != doc.k) {
      throw Error(ErrorCode::Parse, "row " + std::to_string(r + 1) + " of 'X' must have k entries");
    }
    doc.X.row(r) = row.transpose();
  }
  return doc;
}

inline std::string serialize(const DesignDocument& doc) { return to_json(doc).dump(2) + "\n"; }

inline DesignDocument parse_design(const std::string& text) {
  try {
    return design_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("design document: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Two-dimensional figures

/// "a,b;c,d;..." -> one 2-vector per item. The empty string means no prior.
inline std::vector<Vector> parse_prior_points(const std::string& text) {
  std::vector<Vector> out;
  if (trim(text).empty()) return out;
  const auto items = split(text, ';');
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto coords = split(items[i], ',');
    const std::string where = "prior point " + std::to_string(i + 1);
    if (coords.size() != 2) throw Error(ErrorCode::Parse, where + ": expected two comma-separated numbers");
    Vector p(2);
    p(0) = parse_double(coords[0], where);
    p(1) = parse_double(coords[1], where);
    out.push_back(p);
  }
  return out;
}

struct SitePoint {
  Vector point;
  int multiplicity = 0;
};

/// Groups the columns of x whose Euclidean distance to a group's first member
/// is at most tol.
inline std::vector<SitePoint> merge_points(const Matrix& x, double tol = 1e-6) {
  std::vector<SitePoint> sites;
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    bool merged = false;
    for (auto& s : sites) {
      if ((s.point - x.col(i)).norm() <= tol) {
        ++s.multiplicity;
        merged = true;
        break;
      }
    }
    if (!merged) sites.push_back({x.col(i), 1});
  }
  return sites;
}

inline std::string format_sites_csv(const std::vector<SitePoint>& sites) {
  std::string out = "x,y,multiplicity\n";
  for (const auto& s : sites) out += fmt::format("{:.12g},{:.12g},{}\n", s.point(0), s.point(1), s.multiplicity);
  return out;
}

/// Unit circle, prior points as squares, design sites as dots labelled with
/// their multiplicity. Numbers use 12 significant digits so the output is
/// byte-for-byte reproducible.
inline std::string render_svg(const std::vector<Vector>& prior, const std::vector<SitePoint>& sites) {
  constexpr double kSize = 480.0;
  constexpr double kCenter = kSize / 2.0;
  double extent = 1.0;
  for (const auto& p : prior) extent = std::max(extent, p.cwiseAbs().maxCoeff());
  for (const auto& s : sites) extent = std::max(extent, s.point.cwiseAbs().maxCoeff());
  const double scale = 0.85 * kCenter / extent;
  auto px = [&](double v) { return kCenter + scale * v; };
  auto py = [&](double v) { return kCenter - scale * v; };
  auto num = [](double v) { return fmt::format("{:.12g}", v); };

  std::string svg;
  svg += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
      num(kSize));
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n", num(kSize));
  svg += fmt::format("<line x1=\"0\" y1=\"{0}\" x2=\"{1}\" y2=\"{0}\" stroke=\"#cccccc\"/>\n", num(kCenter),
                     num(kSize));
  svg += fmt::format("<line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{1}\" stroke=\"#cccccc\"/>\n", num(kCenter),
                     num(kSize));
  svg += fmt::format(
      "<circle cx=\"{0}\" cy=\"{0}\" r=\"{1}\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n",
      num(kCenter), num(scale));
  constexpr double kHalf = 5.0;
  for (const auto& p : prior) {
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#888888\"/>\n",
                       num(px(p(0)) - kHalf), num(py(p(1)) - kHalf), num(2 * kHalf), num(2 * kHalf));
  }
  for (const auto& s : sites) {
    svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"5\" fill=\"#1f5fbf\"/>\n", num(px(s.point(0))),
                       num(py(s.point(1))));
    svg += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"14\" font-family=\"sans-serif\">{}</text>\n",
                       num(px(s.point(0)) + 8.0), num(py(s.point(1)) - 8.0), s.multiplicity);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace specdesign::io
