#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bfc/simulator.hpp"

namespace bfc {

using json = nlohmann::json;

namespace detail {

inline void require_keys(const json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw Error(ErrorCode::SchemaError, "unknown key '" + it.key() + "' in " + where);
  }
}

inline Vec to_vec(const json& arr) {
  Vec v(arr.size());
  int k = 0;
  for (const auto& x : arr) v(k++) = x.get<double>();
  return v;
}

inline Vec flatten_points(const json& arr, int d, const std::string& where) {
  Vec v(arr.size() * d);
  int k = 0;
  for (const auto& row : arr) {
    if (!row.is_array() || static_cast<int>(row.size()) != d)
      throw Error(ErrorCode::SchemaError, where + ": expected " + std::to_string(d) +
                                              "-vectors");
    for (const auto& x : row) v(k++) = x.get<double>();
  }
  return v;
}

inline ProfileSegment parse_segment(const json& s, int d) {
  require_keys(s, "profile segment",
               {"t_start", "t_end", "kind", "v_c", "alpha", "v_c_coeffs", "alpha_coeffs",
                "v_c_offset", "v_c_amplitude", "omega", "phase", "alpha_offset",
                "alpha_amplitude", "alpha_omega", "alpha_phase"});
  ProfileSegment seg;
  seg.t_start = s.at("t_start").get<double>();
  seg.t_end = s.at("t_end").get<double>();
  const std::string kind = s.at("kind").get<std::string>();
  if (kind == "constant") {
    seg.kind = SegmentKind::Constant;
    seg.vc_coeffs = to_vec(s.at("v_c"));
    seg.alpha_coeffs = Vec::Constant(1, s.value("alpha", 0.0));
  } else if (kind == "polynomial") {
    seg.kind = SegmentKind::Polynomial;
    const auto& cc = s.at("v_c_coeffs");
    const int deg1 = static_cast<int>(cc.at(0).size());
    if (deg1 > 4)
      throw Error(ErrorCode::SchemaError, "polynomial degree above 3");
    seg.vc_coeffs.resize(d, deg1);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < deg1; ++k) seg.vc_coeffs(i, k) = cc.at(i).at(k).get<double>();
    seg.alpha_coeffs = s.contains("alpha_coeffs") ? to_vec(s.at("alpha_coeffs"))
                                                  : Vec::Zero(1);
  } else if (kind == "sinusoid") {
    seg.kind = SegmentKind::Sinusoid;
    seg.vc_offset = s.contains("v_c_offset") ? to_vec(s.at("v_c_offset")) : Vec::Zero(d);
    seg.vc_amplitude =
        s.contains("v_c_amplitude") ? to_vec(s.at("v_c_amplitude")) : Vec::Zero(d);
    seg.vc_omega = s.value("omega", 0.0);
    seg.vc_phase = s.value("phase", 0.0);
    seg.alpha_offset = s.value("alpha_offset", 0.0);
    seg.alpha_amplitude = s.value("alpha_amplitude", 0.0);
    seg.alpha_omega = s.value("alpha_omega", 0.0);
    seg.alpha_phase = s.value("alpha_phase", 0.0);
  } else {
    throw Error(ErrorCode::SchemaError, "unknown segment kind '" + kind + "'");
  }
  if (seg.kind != SegmentKind::Sinusoid && seg.vc_coeffs.rows() != d)
    throw Error(ErrorCode::SchemaError, "v_c dimension mismatch");
  return seg;
}

inline ControlLaw parse_law(const std::string& s) {
  if (s == "PD") return ControlLaw::PD;
  if (s == "ACCEL") return ControlLaw::ACCEL;
  if (s == "PD_INTEGRAL") return ControlLaw::PD_INTEGRAL;
  if (s == "ACCEL_INTEGRAL") return ControlLaw::ACCEL_INTEGRAL;
  if (s == "PD_SAT") return ControlLaw::PD_SAT;
  if (s == "ACCEL_SAT") return ControlLaw::ACCEL_SAT;
  throw Error(ErrorCode::SchemaError, "unknown control law '" + s + "'");
}

inline const char* law_name(ControlLaw law) {
  switch (law) {
    case ControlLaw::PD: return "PD";
    case ControlLaw::ACCEL: return "ACCEL";
    case ControlLaw::PD_INTEGRAL: return "PD_INTEGRAL";
    case ControlLaw::ACCEL_INTEGRAL: return "ACCEL_INTEGRAL";
    case ControlLaw::PD_SAT: return "PD_SAT";
    case ControlLaw::ACCEL_SAT: return "ACCEL_SAT";
  }
  return "?";
}

}  // namespace detail

struct ScenarioFile {
  Scenario scenario;
  std::optional<double> gamma;  // collision certificate separation, if requested
  std::string csv_path, json_path;
};

// Parses and validates a scenario document. Agents may use arbitrary labels
// for the leaders; the loader remaps so leaders occupy the first indices.
inline ScenarioFile parse_scenario(const json& doc, const std::string& name = "") {
  using detail::require_keys;
  require_keys(doc, "scenario",
               {"name", "graph", "reference_configuration", "initial", "profile",
                "controller", "run", "outputs", "gamma"});
  ScenarioFile out;
  Scenario& sc = out.scenario;
  sc.name = doc.value("name", name);

  const auto& g = doc.at("graph");
  require_keys(g, "graph", {"n", "d", "leaders", "edges"});
  const int n = g.at("n").get<int>();
  const int d = g.at("d").get<int>();
  std::vector<int> leaders = g.at("leaders").get<std::vector<int>>();
  std::sort(leaders.begin(), leaders.end());
  for (int l : leaders)
    if (l < 0 || l >= n) throw Error(ErrorCode::SchemaError, "leader index out of range");

  // Permutation old index -> new index, leaders first.
  std::vector<int> remap(n, -1);
  int next = 0;
  for (int l : leaders) remap[l] = next++;
  for (int i = 0; i < n; ++i)
    if (remap[i] < 0) remap[i] = next++;

  sc.graph.n = n;
  sc.graph.d = d;
  sc.graph.n_leaders = static_cast<int>(leaders.size());
  for (const auto& e : g.at("edges")) {
    if (!e.is_array() || e.size() != 2)
      throw Error(ErrorCode::SchemaError, "edges must be pairs");
    const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
    if (a < 0 || a >= n || b < 0 || b >= n)
      throw Error(ErrorCode::SchemaError, "edge index out of range");
    sc.graph.edges.push_back({remap[a], remap[b]});
  }

  Vec ref_raw = detail::flatten_points(doc.at("reference_configuration"), d,
                                       "reference_configuration");
  if (ref_raw.size() != n * d)
    throw Error(ErrorCode::SchemaError, "reference_configuration must list all agents");
  sc.reference_configuration.resize(n * d);
  for (int i = 0; i < n; ++i)
    sc.reference_configuration.segment(remap[i] * d, d) = ref_raw.segment(i * d, d);

  if (doc.contains("initial")) {
    const auto& init = doc.at("initial");
    require_keys(init, "initial", {"positions", "velocities", "perturbation_radius", "seed"});
    if (init.contains("positions")) {
      Vec p_raw = detail::flatten_points(init.at("positions"), d, "initial.positions");
      if (p_raw.size() != n * d)
        throw Error(ErrorCode::SchemaError, "initial.positions must list all agents");
      Vec p(n * d);
      for (int i = 0; i < n; ++i) p.segment(remap[i] * d, d) = p_raw.segment(i * d, d);
      const int dnl = sc.graph.n_leaders * d;
      if ((p.head(dnl) - sc.reference_configuration.head(dnl)).norm() > 1e-12)
        throw Error(ErrorCode::ValidationError,
                    "initial leader positions must match the reference configuration");
      sc.initial_positions = p.tail(n * d - dnl);
    }
    if (init.contains("velocities")) {
      Vec v_raw = detail::flatten_points(init.at("velocities"), d, "initial.velocities");
      if (v_raw.size() != n * d)
        throw Error(ErrorCode::SchemaError, "initial.velocities must list all agents");
      Vec v(n * d);
      for (int i = 0; i < n; ++i) v.segment(remap[i] * d, d) = v_raw.segment(i * d, d);
      sc.initial_velocities = v.tail((n - sc.graph.n_leaders) * d);
    }
    sc.perturbation_radius = init.value("perturbation_radius", 0.0);
    sc.seed = init.value("seed", std::uint64_t{0});
  }

  const auto& prof = doc.at("profile");
  require_keys(prof, "profile", {"segments"});
  std::vector<ProfileSegment> segs;
  for (const auto& s : prof.at("segments")) segs.push_back(detail::parse_segment(s, d));
  sc.profile = ManeuverProfile(std::move(segs));

  const auto& ctl = doc.at("controller");
  require_keys(ctl, "controller",
               {"law", "k_p", "k_v", "k_I", "beta", "sat_kind", "disturbance"});
  sc.controller.law = detail::parse_law(ctl.at("law").get<std::string>());
  sc.controller.k_p = ctl.at("k_p").get<double>();
  sc.controller.k_v = ctl.at("k_v").get<double>();
  sc.controller.k_I = ctl.value("k_I", 0.0);
  sc.controller.beta = ctl.value("beta", 1.0);
  const std::string sk = ctl.value("sat_kind", "clamp");
  if (sk == "clamp")
    sc.controller.sat_kind = SatKind::Clamp;
  else if (sk == "tanh")
    sc.controller.sat_kind = SatKind::Tanh;
  else
    throw Error(ErrorCode::SchemaError, "sat_kind must be clamp or tanh");
  if (ctl.contains("disturbance")) sc.controller.w_f = detail::to_vec(ctl.at("disturbance"));

  const auto& run = doc.at("run");
  require_keys(run, "run", {"T", "h"});
  sc.T = run.at("T").get<double>();
  sc.h = run.at("h").get<double>();

  if (doc.contains("gamma")) out.gamma = doc.at("gamma").get<double>();
  if (doc.contains("outputs")) {
    const auto& o = doc.at("outputs");
    require_keys(o, "outputs", {"csv_path", "json_path"});
    out.csv_path = o.value("csv_path", "");
    out.json_path = o.value("json_path", "");
  }

  sc.validate();
  return out;
}

inline ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ValidationError, "cannot open " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("JSON parse error: ") + e.what());
  }
  return parse_scenario(doc, path);
}

// Applies "a.b.c=value" overrides onto the raw document before parsing.
inline void apply_override(json& doc, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw Error(ErrorCode::ValidationError, "override must be key=value");
  std::string path = kv.substr(0, eq), value = kv.substr(eq + 1);
  json* node = &doc;
  size_t pos = 0;
  while (true) {
    const auto dot = path.find('.', pos);
    const std::string key = path.substr(pos, dot - pos);
    if (dot == std::string::npos) {
      json parsed = json::parse(value, nullptr, false);
      (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
      break;
    }
    node = &(*node)[key];
    pos = dot + 1;
  }
}

namespace detail {
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}
}  // namespace detail

inline std::string csv_header(int n, int d) {
  std::ostringstream os;
  os << "t";
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) os << ",p" << i << "_" << a;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < d; ++a) os << ",v" << i << "_" << a;
  os << ",delta_p_norm,delta_v_norm,bearing_error,min_distance,max_u_inf";
  return os.str();
}

inline void write_csv(const SimResult& res, std::ostream& os) {
  os << csv_header(res.n, res.d) << "\n";
  for (size_t k = 0; k < res.times.size(); ++k) {
    os << detail::fmt(res.times[k]);
    for (int i = 0; i < res.positions[k].size(); ++i)
      os << "," << detail::fmt(res.positions[k](i));
    for (int i = 0; i < res.velocities[k].size(); ++i)
      os << "," << detail::fmt(res.velocities[k](i));
    os << "," << detail::fmt(res.delta_p[k].norm()) << "," << detail::fmt(res.delta_v[k].norm())
       << "," << detail::fmt(res.total_bearing_error[k]) << ","
       << detail::fmt(res.min_pairwise_distance[k]) << ","
       << detail::fmt(res.max_control_inf[k]) << "\n";
  }
}

inline json result_summary(const SimResult& res) {
  json s;
  const size_t last = res.times.size() - 1;
  s["final_time"] = res.times[last];
  s["final_delta_p_norm"] = res.delta_p[last].norm();
  s["final_delta_v_norm"] = res.delta_v[last].norm();
  s["final_bearing_error"] = res.total_bearing_error[last];
  s["min_distance"] =
      *std::min_element(res.min_pairwise_distance.begin(), res.min_pairwise_distance.end());
  s["max_control_inf"] =
      *std::max_element(res.max_control_inf.begin(), res.max_control_inf.end());
  s["aborted"] = res.aborted;
  return s;
}

inline json result_to_json(const SimResult& res) {
  json out;
  out["n"] = res.n;
  out["d"] = res.d;
  out["n_leaders"] = res.n_leaders;
  out["times"] = res.times;
  json dp = json::array(), dv = json::array();
  for (size_t k = 0; k < res.times.size(); ++k) {
    dp.push_back(res.delta_p[k].norm());
    dv.push_back(res.delta_v[k].norm());
  }
  out["delta_p_norm"] = dp;
  out["delta_v_norm"] = dv;
  out["total_bearing_error"] = res.total_bearing_error;
  out["min_pairwise_distance"] = res.min_pairwise_distance;
  out["max_control_inf"] = res.max_control_inf;
  if (!res.lyapunov_V.empty()) out["lyapunov_V"] = res.lyapunov_V;
  out["aborted"] = res.aborted;
  if (res.aborted) out["abort_reason"] = res.abort_reason;
  out["warnings"] = res.warnings;
  out["summary"] = result_summary(res);
  return out;
}

}  // namespace bfc
