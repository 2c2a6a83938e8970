// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The hvf authors
//
// Artifact plumbing: JSON ingestion of field specs and solver data files,
// plus deterministic CSV and SVG emission.  Everything here is strict:
// unknown keys and malformed entries are rejected with a named reason, so a
// spec file never silently means something other than what it says.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hvf/errors.hpp"
#include "hvf/field.hpp"
#include "hvf/periodic.hpp"
#include "hvf/rh.hpp"
#include "hvf/solve.hpp"

namespace hvf {

namespace detail {

inline precondition_error spec_error(const std::string& what,
                                     const std::string& why) {
  return precondition_error(what + ": " + why);
}

inline double json_number(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number())
    throw spec_error(what, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

inline long json_integer(const nlohmann::json& v, const std::string& what) {
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_number()) {
    const double x = v.get<double>();
    if (x == std::floor(x) && std::abs(x) < 1e15) return long(x);
  }
  throw spec_error(what, "expected an integer");
}

/// A complex value is either a plain number (imaginary part 0) or [re, im].
inline cplx json_cplx(const nlohmann::json& v, const std::string& what) {
  if (v.is_number()) return cplx(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2)
    return cplx(json_number(v[0], what + "[0]"), json_number(v[1], what + "[1]"));
  throw spec_error(what, "expected a number or a [re, im] pair");
}

/// Index-tagged harmonics [[j, re, im], ...] for PeriodicFn::from_coeffs.
inline std::vector<std::pair<long, cplx>> json_modes(const nlohmann::json& v,
                                                     const std::string& what) {
  if (!v.is_array())
    throw spec_error(what, "expected an array of [j, re, im] triplets");
  std::vector<std::pair<long, cplx>> modes;
  modes.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    const std::string entry = what + "[" + std::to_string(k) + "]";
    const nlohmann::json& e = v[k];
    if (!e.is_array() || e.size() != 3)
      throw spec_error(entry, "expected a [j, re, im] triplet");
    modes.emplace_back(json_integer(e[0], entry + " index"),
                       cplx(json_number(e[1], entry + " re"),
                            json_number(e[2], entry + " im")));
  }
  return modes;
}

/// Index-tagged monomial coefficients [[k, re, im], ...], densified so that
/// entry k multiplies x^{deg-k} y^k.  `size` fixes the list length.
inline std::vector<cplx> json_monomials(const nlohmann::json& v,
                                        std::size_t size,
                                        const std::string& what) {
  std::vector<cplx> dense(size, cplx(0.0, 0.0));
  for (const auto& [k, c] : json_modes(v, what)) {
    if (k < 0 || std::size_t(k) >= size)
      throw spec_error(what, "monomial index " + std::to_string(k) +
                                 " is outside 0..." + std::to_string(size - 1));
    dense[std::size_t(k)] += c;
  }
  return dense;
}

/// Largest monomial index named by an [[k, re, im], ...] list, or -1.
inline long json_max_index(const nlohmann::json& v, const std::string& what) {
  long top = -1;
  for (const auto& [k, c] : json_modes(v, what)) {
    (void)c;
    top = std::max(top, k);
  }
  return top;
}

inline void reject_unknown_keys(const nlohmann::json& spec,
                                const std::vector<std::string>& allowed,
                                const std::string& what) {
  for (const auto& item : spec.items())
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
      throw spec_error(what, "unknown key \"" + item.key() + "\"");
}

}  // namespace detail

/**
 * Builds a field from a JSON spec.  Two schemas are accepted:
 *
 *   {"lambda": [re, im], "p": [[j, re, im], ...], "q": [[j, re, im], ...]}
 *     polar coefficients as index-tagged Fourier harmonics e^{i j theta};
 *
 *   {"A": [[k, re, im], ...], "B": [[k, re, im], ...]}
 *     Cartesian components as index-tagged monomials x^{deg-k} y^k of a
 *     common homogeneous degree; lambda is the degree.  An explicit
 *     "lambda" key may restate that value but cannot override it.
 *
 * Mixing the schemas, unknown keys, or malformed entries raise
 * precondition_error with the offending key named.
 */
inline HomogeneousField field_from_json(const nlohmann::json& spec,
                                        std::size_t n_grid = default_n_grid) {
  const std::string what = "field spec";
  if (!spec.is_object()) throw detail::spec_error(what, "expected a JSON object");
  const bool polar = spec.contains("p") || spec.contains("q");
  const bool cartesian = spec.contains("A") || spec.contains("B");
  if (polar && cartesian)
    throw detail::spec_error(what, "mixes the {lambda, p, q} and {A, B} schemas");

  if (polar) {
    detail::reject_unknown_keys(spec, {"lambda", "p", "q"}, what);
    for (const char* key : {"lambda", "p", "q"})
      if (!spec.contains(key))
        throw detail::spec_error(what, "missing key \"" + std::string(key) + "\"");
    const cplx lambda = detail::json_cplx(spec["lambda"], what + ": lambda");
    const auto harmonics = [&](const char* key) {
      try {
        return PeriodicFn::from_coeffs(
            detail::json_modes(spec[key], what + ": " + key), n_grid);
      } catch (const std::invalid_argument& e) {
        // grid and index violations are spec problems, not internal bugs
        throw detail::spec_error(what + ": " + key, e.what());
      }
    };
    PeriodicFn p = harmonics("p");
    PeriodicFn q = harmonics("q");
    return field_build_pq(lambda, std::move(p), std::move(q));
  }

  if (cartesian) {
    detail::reject_unknown_keys(spec, {"lambda", "A", "B"}, what);
    for (const char* key : {"A", "B"})
      if (!spec.contains(key))
        throw detail::spec_error(what, "missing key \"" + std::string(key) + "\"");
    const long top = std::max(detail::json_max_index(spec["A"], what + ": A"),
                              detail::json_max_index(spec["B"], what + ": B"));
    if (top < 2)
      throw detail::spec_error(
          what, "the {A, B} schema needs monomials up to index >= 2");
    const std::size_t size = std::size_t(top) + 1;
    HomogeneousField L = field_build_polynomial(
        detail::json_monomials(spec["A"], size, what + ": A"),
        detail::json_monomials(spec["B"], size, what + ": B"), n_grid);
    if (spec.contains("lambda")) {
      const cplx stated = detail::json_cplx(spec["lambda"], what + ": lambda");
      if (std::abs(stated - L.lambda) > 1e-12)
        throw detail::spec_error(
            what, "stated lambda disagrees with the polynomial degree " +
                      std::to_string(long(L.lambda.real())));
    }
    return L;
  }

  throw detail::spec_error(what,
                           "expected either {lambda, p, q} or {A, B} keys");
}

namespace detail {

inline std::string read_text_file(const std::string& path,
                                  const std::string& what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw spec_error(what, "cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline nlohmann::json parse_json_file(const std::string& path,
                                      const std::string& what) {
  const std::string text = read_text_file(path, what);
  nlohmann::json spec = nlohmann::json::parse(text, nullptr, false);
  if (spec.is_discarded())
    throw spec_error(what, "\"" + path + "\" is not valid JSON");
  return spec;
}

}  // namespace detail

inline HomogeneousField field_from_file(const std::string& path,
                                        std::size_t n_grid = default_n_grid) {
  return field_from_json(detail::parse_json_file(path, "field spec"), n_grid);
}

/// Boundary data for the disc problem: a unit-modulus loop and a real
/// right-hand side on a common power-of-two grid.
struct RHBoundaryData {
  PeriodicFn Lambda2;
  PeriodicFn Phi2;
};

/**
 * Parses {"Lambda2": [[re, im], ...], "Phi2": [x, ...]} boundary samples at
 * the nodes 2 pi k / n.  Both arrays must share one power-of-two length
 * >= 16; modulus and realness are checked later by rh_input.
 */
inline RHBoundaryData rh_data_from_json(const nlohmann::json& spec) {
  const std::string what = "boundary data";
  if (!spec.is_object()) throw detail::spec_error(what, "expected a JSON object");
  detail::reject_unknown_keys(spec, {"Lambda2", "Phi2"}, what);
  for (const char* key : {"Lambda2", "Phi2"})
    if (!spec.contains(key) || !spec[key].is_array())
      throw detail::spec_error(what, "missing sample array \"" +
                                         std::string(key) + "\"");
  const auto samples = [&](const char* key) {
    const nlohmann::json& arr = spec[key];
    std::vector<cplx> v(arr.size());
    for (std::size_t k = 0; k < arr.size(); ++k)
      v[k] = detail::json_cplx(arr[k], what + ": " + key + "[" +
                                           std::to_string(k) + "]");
    return v;
  };
  std::vector<cplx> lam = samples("Lambda2");
  std::vector<cplx> phi = samples("Phi2");
  if (lam.size() != phi.size())
    throw detail::spec_error(what, "Lambda2 and Phi2 sample counts differ");
  try {
    return {PeriodicFn::from_samples(std::move(lam)),
            PeriodicFn::from_samples(std::move(phi))};
  } catch (const std::invalid_argument& e) {
    throw detail::spec_error(what, e.what());
  }
}

inline RHBoundaryData rh_data_from_file(const std::string& path) {
  return rh_data_from_json(detail::parse_json_file(path, "boundary data"));
}

/// Parses {"beta0": x, "c": [[re, im], ...]}; both keys optional.
inline RHFree free_params_from_json(const nlohmann::json& spec) {
  const std::string what = "free parameters";
  if (!spec.is_object()) throw detail::spec_error(what, "expected a JSON object");
  detail::reject_unknown_keys(spec, {"beta0", "c"}, what);
  RHFree out;
  if (spec.contains("beta0"))
    out.beta0 = detail::json_number(spec["beta0"], what + ": beta0");
  if (spec.contains("c")) {
    if (!spec["c"].is_array())
      throw detail::spec_error(what, "\"c\" must be an array");
    for (std::size_t k = 0; k < spec["c"].size(); ++k)
      out.c.push_back(detail::json_cplx(
          spec["c"][k], what + ": c[" + std::to_string(k) + "]"));
  }
  return out;
}

inline RHFree free_params_from_file(const std::string& path) {
  return free_params_from_json(detail::parse_json_file(path, "free parameters"));
}

/**
 * Parses Taylor data {"coeffs": [[c, ...], ...], "R_major": x, "M0": x}.
 * coeffs[j] lists the degree-j slice; entry k multiplies x^{k} y^{j-k} and
 * is a number or [re, im].  R_major defaults to 1, M0 to the largest
 * coefficient magnitude.
 */
inline TaylorInput taylor_from_json(const nlohmann::json& spec) {
  const std::string what = "taylor data";
  if (!spec.is_object()) throw detail::spec_error(what, "expected a JSON object");
  detail::reject_unknown_keys(spec, {"coeffs", "R_major", "M0"}, what);
  if (!spec.contains("coeffs") || !spec["coeffs"].is_array())
    throw detail::spec_error(what, "missing coefficient array \"coeffs\"");
  TaylorInput T;
  double top = 0.0;
  for (std::size_t j = 0; j < spec["coeffs"].size(); ++j) {
    const nlohmann::json& slice = spec["coeffs"][j];
    const std::string name = what + ": coeffs[" + std::to_string(j) + "]";
    if (!slice.is_array() || slice.size() != j + 1)
      throw detail::spec_error(
          name, "degree " + std::to_string(j) + " slice needs exactly " +
                    std::to_string(j + 1) + " entries");
    std::vector<cplx> row(slice.size());
    for (std::size_t k = 0; k < slice.size(); ++k) {
      row[k] = detail::json_cplx(slice[k],
                                 name + "[" + std::to_string(k) + "]");
      top = std::max(top, std::abs(row[k]));
    }
    T.coeffs.push_back(std::move(row));
  }
  T.R_major = spec.contains("R_major")
                  ? detail::json_number(spec["R_major"], what + ": R_major")
                  : 1.0;
  T.M0 = spec.contains("M0") ? detail::json_number(spec["M0"], what + ": M0")
                             : std::max(1.0, top);
  return T;
}

inline TaylorInput taylor_from_file(const std::string& path) {
  return taylor_from_json(detail::parse_json_file(path, "taylor data"));
}

// ---------------------------------------------------------------------------
// Emission: CSV and SVG artifacts.

namespace detail {

/// Full-precision decimal form; 17 significant digits round-trip a double
/// exactly and snprintf gives a stable, locale-free rendering here (the
/// tools never install a locale).
inline std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Two-decimal form for SVG coordinates (screen units).
inline std::string fmt_px(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

}  // namespace detail

/// Numeric table with named columns; complex quantities are stored as
/// separate re/im columns so every cell is one double.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Renders the table with %.17g cells.  The same table always produces the
/// same bytes, which is what makes CSV artifacts diffable across runs.
inline std::string csv_format(const CsvTable& table) {
  std::string out;
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j) out += ',';
    out += table.header[j];
  }
  out += '\n';
  for (const std::vector<double>& row : table.rows) {
    if (row.size() != table.header.size())
      throw std::logic_error("csv: row width does not match the header");
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += detail::fmt_full(row[j]);
    }
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw precondition_error("cannot write \"" + path + "\"");
  out << content;
}

/// One planar curve: ordered vertices, closed or open.
struct SvgCurve {
  std::vector<std::pair<double, double>> pts;
  std::string color = "#1f6feb";
  bool closed = false;
};

/// One framed panel holding a titled set of curves in a common scale.
struct SvgPanel {
  std::string title;
  std::vector<SvgCurve> curves;
};

/**
 * Renders side-by-side panels of planar curves as a standalone SVG string.
 * Each panel is scaled isotropically to fit its own data with an 8% margin,
 * so circles stay circles; the y axis points up.  Output is deterministic:
 * coordinates are fixed-format and no timestamps or ids are emitted.
 */
inline std::string svg_render(const std::vector<SvgPanel>& panels,
                              int panel_px = 320) {
  if (panels.empty()) throw precondition_error("svg: no panels to render");
  const double side = double(panel_px);
  const double margin = 24.0;
  const double width = double(panels.size()) * (side + margin) + margin;
  const double height = side + 2.0 * margin + 16.0;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         detail::fmt_px(width) + "\" height=\"" + detail::fmt_px(height) +
         "\" viewBox=\"0 0 " + detail::fmt_px(width) + " " +
         detail::fmt_px(height) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t i = 0; i < panels.size(); ++i) {
    const SvgPanel& panel = panels[i];
    const double x0 = margin + double(i) * (side + margin);
    const double y0 = margin;

    double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;
    bool seen = false;
    for (const SvgCurve& c : panel.curves)
      for (const auto& [x, y] : c.pts) {
        if (!seen) {
          lo_x = hi_x = x;
          lo_y = hi_y = y;
          seen = true;
        }
        lo_x = std::min(lo_x, x);
        hi_x = std::max(hi_x, x);
        lo_y = std::min(lo_y, y);
        hi_y = std::max(hi_y, y);
      }
    if (!seen)
      throw precondition_error("svg: panel \"" + panel.title +
                               "\" has no points");
    const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-12});
    const double scale = (side * 0.84) / span;
    const double cx = 0.5 * (lo_x + hi_x), cy = 0.5 * (lo_y + hi_y);
    const auto px = [&](double x) { return x0 + side / 2 + scale * (x - cx); };
    const auto py = [&](double y) { return y0 + side / 2 - scale * (y - cy); };

    out += "<g>\n<rect x=\"" + detail::fmt_px(x0) + "\" y=\"" +
           detail::fmt_px(y0) + "\" width=\"" + detail::fmt_px(side) +
           "\" height=\"" + detail::fmt_px(side) +
           "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (const SvgCurve& c : panel.curves) {
      out += c.closed ? "<polygon" : "<polyline";
      out += " fill=\"none\" stroke=\"" + c.color +
             "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < c.pts.size(); ++k) {
        if (k) out += ' ';
        out += detail::fmt_px(px(c.pts[k].first)) + "," +
               detail::fmt_px(py(c.pts[k].second));
      }
      out += "\"/>\n";
    }
    out += "<text x=\"" + detail::fmt_px(x0 + side / 2) + "\" y=\"" +
           detail::fmt_px(y0 + side + 18.0) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"13\">" +
           panel.title + "</text>\n</g>\n";
  }
  out += "</svg>\n";
  return out;
}

/// [re, im] JSON form used by every report so complex values stay uniform.
inline nlohmann::json json_of_cplx(cplx z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

}  // namespace hvf
