#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace bfc;
using namespace bfc::testing;

namespace {

json square_doc() {
  return json::parse(R"({
    "name": "square",
    "graph": {
      "n": 4, "d": 2, "leaders": [0, 1],
      "edges": [[0,1],[1,0],[1,2],[2,1],[2,3],[3,2],[3,0],[0,3],[1,3],[3,1]]
    },
    "reference_configuration": [[0,0],[0,-4],[-4,-4],[-4,0]],
    "initial": {"perturbation_radius": 1.0, "seed": 7},
    "profile": {"segments": [
      {"t_start": 0, "t_end": 30, "kind": "constant", "v_c": [0.5, 0.0], "alpha": 0.0}
    ]},
    "controller": {"law": "PD", "k_p": 1.0, "k_v": 1.0},
    "run": {"T": 30.0, "h": 0.001}
  })");
}

}  // namespace

TEST_CASE("parse: square scenario fields land where expected") {
  auto sf = parse_scenario(square_doc());
  const Scenario& sc = sf.scenario;
  CHECK(sc.name == "square");
  CHECK(sc.graph.n == 4);
  CHECK(sc.graph.d == 2);
  CHECK(sc.graph.n_leaders == 2);
  CHECK(sc.graph.edges.size() == 10);
  CHECK(sc.reference_configuration(3) == -4.0);
  CHECK(sc.controller.law == ControlLaw::PD);
  CHECK(sc.T == 30.0);
  CHECK(sc.h == 0.001);
  CHECK(sc.perturbation_radius == 1.0);
  CHECK(sc.seed == 7);
  CHECK_FALSE(sf.gamma.has_value());

  // loads into a runnable simulator
  Simulator sim(sc);
  CHECK(sim.dn() == 8);
}

TEST_CASE("parse: leaders with arbitrary labels are remapped to the front") {
  auto doc = square_doc();
  doc["graph"]["leaders"] = {1, 3};
  auto sf = parse_scenario(doc);
  const Scenario& sc = sf.scenario;
  CHECK(sc.graph.n_leaders == 2);
  // agents 1 and 3 of the raw document now occupy slots 0 and 1
  CHECK(sc.reference_configuration.segment(0, 2) == (Vec(2) << 0, -4).finished());
  CHECK(sc.reference_configuration.segment(2, 2) == (Vec(2) << -4, 0).finished());
  // the geometry itself is unchanged, so uniqueness is preserved
  auto spec = bearings_of(state_of(sc.reference_configuration), sc.graph);
  CHECK(check_uniqueness(build_bearing_laplacian(sc.graph, spec)).unique);
}

TEST_CASE("parse: unknown keys rejected at every level") {
  auto d1 = square_doc();
  d1["extra"] = 1;
  CHECK_THROWS_AS(parse_scenario(d1), Error);

  auto d2 = square_doc();
  d2["graph"]["weights"] = 1;
  CHECK_THROWS_AS(parse_scenario(d2), Error);

  auto d3 = square_doc();
  d3["controller"]["kp"] = 1.0;
  CHECK_THROWS_AS(parse_scenario(d3), Error);

  auto d4 = square_doc();
  d4["profile"]["segments"][0]["speed"] = 1.0;
  CHECK_THROWS_AS(parse_scenario(d4), Error);
}

TEST_CASE("parse: schema violations carry the SCHEMA_ERROR code") {
  auto doc = square_doc();
  doc["controller"]["law"] = "LQR";
  try {
    parse_scenario(doc);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
  }

  auto d2 = square_doc();
  d2["graph"]["edges"].push_back({0, 9});
  CHECK_THROWS_AS(parse_scenario(d2), Error);
}

TEST_CASE("parse: explicit initial leader positions must match the reference") {
  auto doc = square_doc();
  doc["initial"] = {{"positions", {{0, 0}, {0, -4}, {-3, -3}, {-4, 1}}}};
  auto sf = parse_scenario(doc);
  REQUIRE(sf.scenario.initial_positions.has_value());
  CHECK(sf.scenario.initial_positions->size() == 4);
  CHECK((*sf.scenario.initial_positions)(3) == 1.0);

  doc["initial"]["positions"][0] = {0.5, 0.0};  // leader moved off the reference
  CHECK_THROWS_AS(parse_scenario(doc), Error);
}

TEST_CASE("load_scenario: missing file and malformed JSON") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/path.json"), Error);
  const std::string path = "bfc_test_malformed.json";
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  try {
    load_scenario(path);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
  }
  std::remove(path.c_str());
}

TEST_CASE("apply_override: numeric, nested, and string fallback") {
  auto doc = square_doc();
  apply_override(doc, "controller.k_p=2.5");
  apply_override(doc, "run.T=5");
  apply_override(doc, "controller.law=ACCEL");
  auto sf = parse_scenario(doc);
  CHECK(sf.scenario.controller.k_p == 2.5);
  CHECK(sf.scenario.T == 5.0);
  CHECK(sf.scenario.controller.law == ControlLaw::ACCEL);

  CHECK_THROWS_AS(apply_override(doc, "no_equals_sign"), Error);
}

TEST_CASE("csv header layout") {
  CHECK(csv_header(2, 2) ==
        "t,p0_0,p0_1,p1_0,p1_1,v0_0,v0_1,v1_0,v1_1,"
        "delta_p_norm,delta_v_norm,bearing_error,min_distance,max_u_inf");
}

TEST_CASE("write_csv: deterministic, well-formed rows") {
  auto doc = square_doc();
  apply_override(doc, "run.T=0.01");
  auto sf = parse_scenario(doc);
  auto res = run(sf.scenario);
  std::ostringstream a, b;
  write_csv(res, a);
  write_csv(run(sf.scenario), b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string header, row;
  std::getline(in, header);
  CHECK(header == csv_header(4, 2));
  int rows = 0;
  while (std::getline(in, row)) {
    CHECK(std::count(row.begin(), row.end(), ',') == 21);  // 1+16+5 columns
    ++rows;
  }
  CHECK(rows == static_cast<int>(res.times.size()));
}

TEST_CASE("result JSON: summary consistent with the trajectory arrays") {
  auto doc = square_doc();
  apply_override(doc, "run.T=0.05");
  auto sf = parse_scenario(doc);
  auto res = run(sf.scenario);
  json j = result_to_json(res);
  CHECK(j["n"] == 4);
  CHECK(j["times"].size() == res.times.size());
  CHECK(j["summary"]["final_delta_p_norm"].get<double>() ==
        doctest::Approx(res.delta_p.back().norm()));
  CHECK(j["summary"]["aborted"] == false);
  double min_d = 1e18;
  for (double x : res.min_pairwise_distance) min_d = std::min(min_d, x);
  CHECK(j["summary"]["min_distance"].get<double>() == doctest::Approx(min_d));
  CHECK(j.contains("lyapunov_V"));
}
