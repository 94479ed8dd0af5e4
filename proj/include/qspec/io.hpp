#pragma once

// JSON and CSV formats.
//
// Matrix file:   {"n": <int>, "entries": [[[s0, s1, s2, s3], ...], ...]}  (row-major, n rows of n)
// Quaternion:    [s0, s1, s2, s3]
//
// Reports are written canonically: object keys sorted, floats as %.17g with -0 printed as 0,
// non-finite floats as null, arrays of numbers on one line, two-space indentation.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qspec/bounded_transform.hpp"
#include "qspec/errors.hpp"
#include "qspec/qmatrix.hpp"
#include "qspec/quaternion.hpp"
#include "qspec/report.hpp"
#include "qspec/s_spectrum.hpp"
#include "qspec/spectral_core.hpp"

namespace qspec {

using Json = nlohmann::json;

// ---- parsing -------------------------------------------------------------------------------

inline Quaternion parse_quaternion(const Json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("quaternion must be an array of four numbers");
  double c[4];
  for (std::size_t k = 0; k < 4; ++k) {
    if (!j[k].is_number()) throw ParseError("quaternion components must be numbers");
    c[k] = j[k].get<double>();
  }
  return {c[0], c[1], c[2], c[3]};
}

inline QMatrix parse_matrix(const Json& j) {
  if (!j.is_object()) throw ParseError("matrix must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 0)
    throw ParseError("matrix needs a nonnegative integer \"n\"");
  if (!j.contains("entries") || !j["entries"].is_array()) throw ParseError("matrix needs an \"entries\" array");
  const auto n = static_cast<std::size_t>(j["n"].get<long long>());
  const Json& rows = j["entries"];
  if (rows.size() != n) throw ParseError("matrix: number of rows differs from n");
  QMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || row.size() != n) throw ParseError("matrix: ragged row " + std::to_string(i));
    for (std::size_t k = 0; k < n; ++k) m(i, k) = parse_quaternion(row[k]);
  }
  return m;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

inline QMatrix parse_matrix_text(const std::string& text) { return parse_matrix(parse_json_text(text)); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline QMatrix load_matrix(const std::string& path) { return parse_matrix_text(read_file(path)); }

/// "e1", "e2", "e3" or "x,y,z" with x^2 + y^2 + z^2 = 1 within 1e-12.
inline ImaginaryUnit parse_imaginary_unit(const std::string& text) {
  if (text == "e1") return ImaginaryUnit::e1();
  if (text == "e2") return ImaginaryUnit::e2();
  if (text == "e3") return ImaginaryUnit::e3();
  std::vector<double> c;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      c.push_back(std::stod(item, &used));
      if (used != item.size()) throw ParseError("bad imaginary unit component: " + item);
    } catch (const std::logic_error&) {
      throw ParseError("bad imaginary unit component: " + item);
    }
  }
  if (c.size() != 3) throw ParseError("imaginary unit must be e1, e2, e3 or x,y,z");
  try {
    return ImaginaryUnit::checked(Quaternion(0.0, c[0], c[1], c[2]));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
}

// ---- building JSON values -------------------------------------------------------------------

inline Json to_json(const Quaternion& q) { return Json::array({q.s0, q.s1, q.s2, q.s3}); }

inline Json to_json(const QVector& x) {
  Json a = Json::array();
  for (const auto& q : x) a.push_back(to_json(q));
  return a;
}

inline Json to_json(const QMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < m.cols(); ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return {{"n", m.rows()}, {"entries", std::move(rows)}};
}

inline Json to_json(const SSpectrum& s) {
  Json spheres = Json::array();
  for (const auto& sp : s.spheres) {
    Json o{{"rep", to_json(sp.rep)}, {"multiplicity", sp.multiplicity}};
    if (sp.projection) o["projection"] = to_json(*sp.projection);
    spheres.push_back(std::move(o));
  }
  Json out{{"j", to_json(Quaternion(s.j))}, {"normal", s.normal}, {"spheres", std::move(spheres)}};
  if (s.odd_cluster) out["odd_cluster"] = true;
  return out;
}

inline Json to_json(const SpectralMeasure& e) {
  Json atoms = Json::array();
  for (const auto& a : e.atoms) atoms.push_back({{"p", to_json(a.p)}, {"projection", to_json(a.projection)}});
  Json basis = Json::array();
  for (const auto& y : e.basis) basis.push_back(to_json(y));
  return {{"j", to_json(Quaternion(e.j))}, {"atoms", std::move(atoms)}, {"basis", std::move(basis)}};
}

inline Json to_json(const DecompositionABJ& d) {
  return {{"A", to_json(d.a)},
          {"B", to_json(d.b)},
          {"J", to_json(d.j)},
          {"kernel_dim", d.kernel_dim},
          {"kernel_projection", to_json(d.kernel_projection)}};
}

inline Json to_json(const ResidualReport& r) {
  return {{"lhs_norm", r.lhs_norm}, {"rhs_norm", r.rhs_norm}, {"residual", r.residual}};
}

inline Json to_json(const TransformSummary& s, bool has_roundtrip) {
  Json out{{"norm_T", s.norm_t}, {"norm_Z", s.norm_z}, {"c_identity_residual", s.c_identity_residual}};
  out["roundtrip_residual"] = has_roundtrip ? Json(s.roundtrip_residual) : Json(nullptr);
  out["min_gap_1_minus_p2"] = has_roundtrip ? Json(s.min_gap) : Json(nullptr);
  return out;
}

inline Json to_json(const CheckReport& r) {
  Json checks = Json::array();
  for (const auto& it : r.items())
    checks.push_back({{"name", it.name}, {"value", it.value}, {"threshold", it.threshold}, {"pass", it.pass}});
  return {{"passed", r.passed()}, {"checks", std::move(checks)}};
}

// ---- canonical writer ------------------------------------------------------------------------

inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  if (x == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_canonical(const Json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * depth), ' ');
  const std::string pad_in(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  switch (j.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<long long>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<unsigned long long>());
      break;
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    case Json::value_t::string:
      out += j.dump();
      break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      bool flat = true;
      for (const auto& x : j) flat = flat && x.is_number();
      if (flat) {
        out += '[';
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          write_canonical(j[k], out, depth + 1);
        }
        out += ']';
        break;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        out += pad_in;
        write_canonical(j[k], out, depth + 1);
        out += k + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "]";
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {  // nlohmann::json keeps keys sorted
        out += pad_in + Json(it.key()).dump() + ": ";
        write_canonical(it.value(), out, depth + 1);
        out += k + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      break;
    }
    default:
      throw ParseError("canonical JSON: unsupported value");
  }
}

}  // namespace detail

inline std::string canonical_json(const Json& j) {
  std::string out;
  detail::write_canonical(j, out, 0);
  out += '\n';
  return out;
}

/// "re,abs_im,multiplicity" rows of the sphere representatives.
inline std::string spectrum_csv(const SSpectrum& s) {
  std::string out = "re,abs_im,multiplicity\n";
  for (const auto& sp : s.spheres)
    out += format_double(sp.rep.s0) + "," + format_double(sp.rep.imag_norm()) + "," +
           std::to_string(sp.multiplicity) + "\n";
  return out;
}

}  // namespace qspec
