#pragma once

// JSON encoding of points, measures and reports. Infinite values are written
// as the strings "inf" / "-inf".

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "projcap/capacity.hpp"
#include "projcap/chebyshev.hpp"
#include "projcap/evans.hpp"
#include "projcap/fekete.hpp"
#include "projcap/geometry.hpp"
#include "projcap/measure.hpp"

namespace projcap::io {

using Json = nlohmann::ordered_json;

inline Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double to_number(const Json& j) {
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return kNegInf;
    throw Error(Errc::Io, "unexpected string where a number was expected: " + s);
  }
  return j.get<double>();
}

inline Json point_json(const ProjectivePoint& p) {
  Json re = Json::array(), im = Json::array();
  for (const auto& c : p.coords()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return Json{{"re", re}, {"im", im}};
}

inline ProjectivePoint point_from_parts(const Json& re, const Json& im) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.size() < 2)
    throw Error(Errc::Io, "point needs matching re/im arrays of length >= 2");
  CVector v(re.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = Complex(re[k].get<double>(), im[k].get<double>());
  return ProjectivePoint::from_homogeneous(v);
}

inline ProjectivePoint point_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im")) throw Error(Errc::Io, "point object needs re and im");
  return point_from_parts(j["re"], j["im"]);
}

inline Json points_json(const std::vector<ProjectivePoint>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back(point_json(p));
  return arr;
}

inline std::vector<ProjectivePoint> points_from_json(const Json& j) {
  if (!j.is_array()) throw Error(Errc::Io, "point list must be a JSON array");
  std::vector<ProjectivePoint> out;
  for (const auto& e : j) out.push_back(point_from_json(e));
  for (const auto& p : out) detail::require_same_dim(p.dim(), out.front().dim());
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Io, path + ": " + e.what());
  }
}

inline std::vector<ProjectivePoint> read_points_file(const std::string& path) {
  return points_from_json(read_json_file(path));
}

// Each atom is a pair [re-array, im-array].
inline Json measure_json(const DiscreteMeasure& mu) {
  Json atoms = Json::array();
  for (const auto& a : mu.atoms()) {
    auto p = point_json(a);
    atoms.push_back(Json::array({p["re"], p["im"]}));
  }
  return Json{{"n", mu.dim()}, {"atoms", atoms}, {"weights", mu.weights()}};
}

inline DiscreteMeasure measure_from_json(const Json& j) {
  if (!j.contains("atoms") || !j.contains("weights")) throw Error(Errc::Io, "measure needs atoms and weights");
  std::vector<ProjectivePoint> atoms;
  for (const auto& a : j["atoms"]) {
    if (!a.is_array() || a.size() != 2) throw Error(Errc::Io, "atom must be [re-array, im-array]");
    atoms.push_back(point_from_parts(a[0], a[1]));
  }
  auto weights = j["weights"].get<std::vector<double>>();
  DiscreteMeasure mu(std::move(atoms), std::move(weights));
  if (j.contains("n") && j["n"].get<std::size_t>() != mu.dim()) throw Error(Errc::Io, "measure dimension differs from n");
  return mu;
}

inline Json energy_json(const EnergyEstimate& e) {
  Json j{{"value", number(e.value)}};
  if (e.stderr_value) j["stderr"] = number(*e.stderr_value);
  j["samples"] = e.samples;
  if (e.rejected) j["rejected"] = e.rejected;
  return j;
}

inline Json configuration_json(const FeketeConfiguration& c) {
  return Json{{"s", c.s},
              {"theta", number(c.theta)},
              {"D", number(std::exp(-c.theta))},
              {"restarts", c.restarts_used},
              {"sweeps", c.sweeps},
              {"points", points_json(c.points)}};
}

inline Json capacity_json(const CapacityReport& r) {
  Json j{{"gamma_hat", number(r.gamma_hat)},
         {"kappa_hat", number(r.kappa_hat)},
         {"fw_gap", number(r.fw_gap)},
         {"m", r.m},
         {"diag_rule", r.diag_rule},
         {"cross_gap", r.cross_gap ? number(*r.cross_gap) : Json(nullptr)},
         {"converged", r.converged},
         {"gamma_hat_2m", number(r.gamma_hat_2m)},
         {"kappa_hat_2m", number(r.kappa_hat_2m)},
         {"fekete_D", r.fekete_D ? number(*r.fekete_D) : Json(nullptr)},
         {"polar_suspect", r.polar_suspect}};
  return j;
}

inline Json chebyshev_json(const ChebyshevResult& r) {
  Json j{{"s", r.s},
         {"M_s", number(r.M)},
         {"outer_pool", r.outer_pool_used},
         {"inner_pool", r.inner_pool_used},
         {"sweeps", r.sweeps},
         {"maximizer_points", points_json(r.maximizer_points)}};
  j["witness"] = r.witness ? point_json(*r.witness) : Json(nullptr);
  return j;
}

inline Json evans_json(const EvansCertificate& c) {
  Json levels = Json::array();
  for (const auto& l : c.levels)
    levels.push_back(Json{{"h", l.h}, {"s_h", l.s_h}, {"bound", number(l.bound)}, {"by_coincidence", l.by_coincidence}});
  return Json{{"levels", levels},
              {"off_set_margin", number(c.off_set_margin)},
              {"H", c.H},
              {"raw_mass", number(c.raw_mass)},
              {"on_set_max", number(c.on_set_max)},
              {"on_set_max_raw", number(c.on_set_max_raw)},
              {"atom_points", c.atom_points},
              {"non_atom_points", c.non_atom_points},
              {"non_atom_max", c.non_atom_max ? number(*c.non_atom_max) : Json(nullptr)},
              {"grid_size", c.grid_size},
              {"grid_min_distance", number(c.grid_min_distance)}};
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::Io, "write failed for " + path);
}

/// Fixed-precision rendering used in CSV output (round-trip exact).
inline std::string csv_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace projcap::io
