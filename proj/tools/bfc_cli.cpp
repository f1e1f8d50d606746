// Command-line front end: scenario analysis, simulation, and parameter sweeps.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>
#include <vector>

#include "bfc/bfc.hpp"

namespace {

using bfc::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNonUnique = 3;
constexpr int kExitAborted = 4;

int exit_code_for(const bfc::Error& e) {
  return e.code() == bfc::ErrorCode::NonUniqueTarget ? kExitNonUnique : kExitInput;
}

json analyze_scenario(const bfc::ScenarioFile& file) {
  const auto& sc = file.scenario;
  bfc::FormationState ref(sc.reference_configuration,
                          bfc::Vec::Zero(sc.reference_configuration.size()));
  auto spec = bfc::bearings_of(ref, sc.graph);
  auto L = bfc::build_bearing_laplacian(sc.graph, spec);
  auto uniq = bfc::check_uniqueness(L);

  json rep;
  rep["scenario"] = sc.name;
  rep["uniqueness"] = {{"unique", uniq.unique}, {"sigma_min", uniq.sigma_min}};

  auto rig = bfc::rigidity_report(ref, sc.graph);
  rep["rigidity"] = {{"rank", rig.rank},
                     {"is_infinitesimally_bearing_rigid", rig.is_infinitesimally_bearing_rigid},
                     {"null_space_dim", rig.null_space_dim},
                     {"trivial_motion_dim", rig.trivial_motion_dim}};

  if (!uniq.unique) return rep;

  if (!bfc::is_sat_law(sc.controller.law)) {
    auto spectral = bfc::spectral_report(sc.controller.law, L, sc.controller);
    json lambda = json::array();
    for (int i = 0; i < spectral.lambda.size(); ++i)
      lambda.push_back({{"re", spectral.lambda(i).real()}, {"im", spectral.lambda(i).imag()}});
    rep["spectral"] = {{"mu", std::vector<double>(spectral.mu.data(),
                                                  spectral.mu.data() + spectral.mu.size())},
                       {"lambda", lambda},
                       {"hurwitz", spectral.hurwitz},
                       {"slowest_mode", spectral.slowest_mode}};
  }

  if (bfc::is_integral_law(sc.controller.law)) {
    const double bound =
        bfc::integral_gain_bound(sc.controller.law, L, sc.controller.k_p, sc.controller.k_v);
    rep["integral_gain_bound"] = bound;
    rep["k_I_within_bound"] = sc.controller.k_I > 0.0 && sc.controller.k_I < bound;
  }

  if (file.gamma) {
    bfc::Simulator sim(sc);
    bfc::Vec y0 = sim.initial_state();
    const int dn = sim.dn(), dnf = sim.dnf();
    bfc::Vec delta_p0 = y0.segment(dn, dnf) - sc.reference_configuration.tail(dnf);
    bfc::Vec delta_v0 =
        y0.segment(dn + dnf, dnf) - sim.target_follower_velocity(0.0, sc.reference_configuration);
    std::vector<double> grid;
    const int steps = static_cast<int>(std::llround(sc.T / sc.h));
    for (int k = 0; k <= steps; ++k) grid.push_back(k * sc.h);
    auto target = bfc::propagate_target(sc.profile, sc.graph, spec,
                                        sc.reference_configuration, grid);
    double min_dist = std::numeric_limits<double>::infinity();
    for (const auto& p : target)
      min_dist = std::min(min_dist, bfc::min_pairwise_distance_of(p, sc.graph.n, sc.graph.d));
    auto cert = bfc::collision_check(sc.controller.law, L, sc.controller, delta_p0, delta_v0,
                                     min_dist, *file.gamma);
    rep["collision_certificate"] = {{"gamma", cert.gamma},
                                    {"lhs", cert.lhs},
                                    {"rhs", cert.rhs},
                                    {"guaranteed", cert.guaranteed},
                                    {"min_target_distance", min_dist}};
  }
  return rep;
}

int cmd_analyze(const std::string& path) {
  try {
    auto file = bfc::load_scenario(path);
    auto rep = analyze_scenario(file);
    std::cout << rep.dump(2) << "\n";
    return rep["uniqueness"]["unique"].get<bool>() ? kExitOk : kExitNonUnique;
  } catch (const bfc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

int cmd_simulate(const std::string& path, const std::vector<std::string>& overrides) {
  try {
    std::ifstream in(path);
    if (!in) {
      std::cerr << "error: cannot open " << path << "\n";
      return kExitInput;
    }
    json doc = json::parse(in);
    for (const auto& kv : overrides) bfc::apply_override(doc, kv);
    auto file = bfc::parse_scenario(doc, path);

    const auto t0 = std::chrono::steady_clock::now();
    auto res = bfc::run(file.scenario);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    if (!file.csv_path.empty()) {
      std::ofstream csv(file.csv_path);
      bfc::write_csv(res, csv);
    }
    if (!file.json_path.empty()) {
      std::ofstream js(file.json_path);
      js << bfc::result_to_json(res).dump(2) << "\n";
    }
    json summary = bfc::result_summary(res);
    summary["wall_time_s"] = wall;
    std::cout << summary.dump(2) << "\n";
    return res.aborted ? kExitAborted : kExitOk;
  } catch (const bfc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}

struct SweepRow {
  double value = 0.0;
  bool ok = false;
  std::string error;
  bool converged = false;
  double time_to_threshold = -1.0;
  double min_distance = 0.0;
  double final_delta_p = 0.0;
};

SweepRow sweep_one(json doc, const std::string& param, double value) {
  SweepRow row;
  row.value = value;
  try {
    bfc::apply_override(doc, param + "=" + std::to_string(value));
    auto file = bfc::parse_scenario(doc, "sweep");
    auto res = bfc::run(file.scenario);
    const size_t last = res.times.size() - 1;
    row.final_delta_p = res.delta_p[last].norm();
    row.converged = !res.aborted && row.final_delta_p < 1e-3;
    row.min_distance =
        *std::min_element(res.min_pairwise_distance.begin(), res.min_pairwise_distance.end());
    // First time after which ||delta_p|| stays below 1e-3.
    row.time_to_threshold = -1.0;
    for (size_t k = res.times.size(); k-- > 0;) {
      if (res.delta_p[k].norm() >= 1e-3) break;
      row.time_to_threshold = res.times[k];
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::vector<double>& values) {
  if (values.empty()) {
    std::cerr << "error: empty values list\n";
    return kExitInput;
  }
  json doc;
  try {
    std::ifstream in(path);
    if (!in) throw bfc::Error(bfc::ErrorCode::ValidationError, "cannot open " + path);
    doc = json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("BFC_WORKERS"))
    workers = std::max(1u, static_cast<unsigned>(std::atoi(env)));

  std::vector<SweepRow> rows(values.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t k = next.fetch_add(1); k < values.size(); k = next.fetch_add(1))
      rows[k] = sweep_one(doc, param, values[k]);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<size_t>(workers, values.size()); ++w)
    pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::cout << "value,converged,time_to_1e-3,min_distance,final_delta_p_norm,error\n";
  for (const auto& r : rows) {
    if (r.ok)
      std::cout << r.value << "," << (r.converged ? 1 : 0) << "," << r.time_to_threshold << ","
                << r.min_distance << "," << r.final_delta_p << ",\n";
    else
      std::cout << r.value << ",,,,," << r.error << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bearing-based formation maneuver control toolkit"};
  app.require_subcommand(1);

  std::string path;
  std::vector<std::string> overrides;
  std::string param;
  std::vector<double> values;

  auto* analyze = app.add_subcommand("analyze", "Validate and analyze a scenario");
  analyze->add_option("file", path, "scenario JSON file")->required();

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and export results");
  simulate->add_option("file", path, "scenario JSON file")->required();
  simulate->add_option("--override", overrides, "key=value override, dotted path");

  auto* sweep = app.add_subcommand("sweep", "Run one simulation per parameter value");
  sweep->add_option("file", path, "scenario JSON file")->required();
  sweep->add_option("--param", param, "numeric scenario key, dotted path")->required();
  sweep->add_option("--values", values, "parameter values")->required()->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  if (analyze->parsed()) return cmd_analyze(path);
  if (simulate->parsed()) return cmd_simulate(path, overrides);
  return cmd_sweep(path, param, values);
}
