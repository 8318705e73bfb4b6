#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "doctest.h"
#include "experiment.hpp"
#include "kv_config.hpp"

using namespace semidev;
using namespace semidev::tools;

namespace {

// Field name carried by the ConfigError a callable raises; "<no error>" when
// it unexpectedly succeeds.
template <class Fn>
std::string error_field(Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.field;
  }
  return "<no error>";
}

KeyValues tracking_config() {
  return KeyValues::parse_text(
      "problem.name = quadratic-tracking\n"
      "problem.center = 0.5,-0.5\n"
      "risk.p = 2\n"
      "risk.c = 0.5\n"
      "risk.eta = 0.1\n"
      "smoothing.mu = 0.1\n"
      "smoothing.pair_k = 500\n"
      "run.iterations = 50\n",
      "<test>");
}

}  // namespace

TEST_SUITE("config") {

TEST_CASE("flat key=value parsing") {
  const KeyValues kv = KeyValues::parse_text(
      "# leading comment\n"
      "\n"
      "  a.flag =  true  # trailing comment\n"
      "a.count=7\n"
      "a.title = hello world\n",
      "<test>");
  CHECK(kv.get_bool("a.flag", false));
  CHECK(kv.get_u64("a.count", 0) == 7);
  CHECK(kv.get_string("a.title", "") == "hello world");
  CHECK(kv.has("a.flag"));
  CHECK_FALSE(kv.has("a.missing"));

  CHECK(error_field([] {
          KeyValues::parse_text("x = 1\nx = 2\n", "<test>");
        }) == "x");
  // A line without '=' reports its origin and line number.
  try {
    KeyValues::parse_text("ok = 1\nbroken line\n", "<origin>");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("<origin>:2") != std::string::npos);
  }
  CHECK(error_field([] { KeyValues::parse_text("= 3\n", "<test>"); }) == "config");
}

TEST_CASE("typed getters validate their formats") {
  KeyValues kv = KeyValues::parse_text(
      "d.ok = -2.5e-3\n"
      "d.bad = fast\n"
      "d.huge = 1e999\n"
      "u.bad = -4\n"
      "b.bad = maybe\n"
      "v.ok = 1, 2 ,3.5\n"
      "v.hole = 1,,2\n"
      "m.ok = 1,0;0,1\n"
      "m.ragged = 1,0;1\n",
      "<test>");
  CHECK(kv.get_double("d.ok", 0.0) == doctest::Approx(-2.5e-3));
  CHECK(error_field([&] { kv.get_double("d.bad", 0.0); }) == "d.bad");
  CHECK(error_field([&] { kv.get_double("d.huge", 0.0); }) == "d.huge");
  CHECK(error_field([&] { kv.get_u64("u.bad", 0); }) == "u.bad");
  CHECK(error_field([&] { kv.get_bool("b.bad", false); }) == "b.bad");
  for (const char* raw : {"true", "1", "yes", "on"}) {
    kv.set("b.probe", raw);
    CHECK(kv.get_bool("b.probe", false));
  }
  for (const char* raw : {"false", "0", "no", "off"}) {
    kv.set("b.probe", raw);
    CHECK_FALSE(kv.get_bool("b.probe", true));
  }

  const std::vector<double> v = kv.require_vector("v.ok");
  REQUIRE(v.size() == 3);
  CHECK(v[2] == doctest::Approx(3.5));
  CHECK(error_field([&] { kv.require_vector("v.hole"); }) == "v.hole");
  CHECK(error_field([&] { kv.require_vector("v.missing"); }) == "v.missing");

  const auto m = kv.require_matrix("m.ok");
  REQUIRE(m.size() == 2);
  CHECK(m[1][1] == doctest::Approx(1.0));
  CHECK(error_field([&] { kv.require_matrix("m.ragged"); }) == "m.ragged");

  CHECK_NOTHROW(kv.reject_unknown({"d.", "u.", "b.", "v.", "m."}));
  CHECK(error_field([&] { kv.reject_unknown({"d.", "u.", "b.", "v."}); }) == "m.ok");
  KeyValues exact = KeyValues::parse_text("window = 0.5\n", "<test>");
  CHECK_NOTHROW(exact.reject_unknown({"window"}));
  CHECK(error_field([&] { exact.reject_unknown({"windows"}); }) == "window");
}

TEST_CASE("problem construction by name") {
  {
    KeyValues kv = KeyValues::parse_text("problem.name = newsvendor\n", "<test>");
    const Problem p = build_problem(kv);
    CHECK(p.name == "newsvendor");
    CHECK(p.dim == 1);
  }
  {
    KeyValues kv = KeyValues::parse_text(
        "problem.name = quadratic-fit\n"
        "problem.matrix = 1,0;0,1\n"
        "problem.offset = 0,0\n",
        "<test>");
    const Problem p = build_problem(kv);
    CHECK(p.dim == 2);
    CHECK(p.cost_class == CostClass::Smooth);
  }
  {
    KeyValues kv = KeyValues::parse_text("problem.name = warehouse\n", "<test>");
    CHECK(error_field([&] { build_problem(kv); }) == "problem.name");
  }
  {
    // Domain violations surface as config errors, not raw invalid_argument.
    KeyValues kv = KeyValues::parse_text(
        "problem.name = quadratic-tracking\n"
        "problem.center = 1,1\n"
        "problem.radius = -3\n",
        "<test>");
    CHECK(error_field([&] { build_problem(kv); }) == "problem");
  }
}

TEST_CASE("risk and schedule construction") {
  {
    const KeyValues kv = KeyValues::parse_text("", "<test>");
    const RiskSpec spec = build_risk_spec(kv);
    CHECK(spec.p == 1.0);
    CHECK(spec.c == 0.0);
    CHECK(spec.mean_only());
  }
  {
    KeyValues kv = KeyValues::parse_text(
        "risk.p = 2\nrisk.c = 1\nrisk.eta = 0.25\nrisk.profile = softplus-shift\n",
        "<test>");
    const RiskSpec spec = build_risk_spec(kv);
    CHECK(spec.p == 2.0);
    CHECK(spec.profile.eta() == doctest::Approx(0.25));
  }
  {
    KeyValues kv = KeyValues::parse_text("risk.p = 2.5\n", "<test>");
    CHECK(error_field([&] { build_risk_spec(kv); }) == "risk");
  }
  {
    KeyValues kv = KeyValues::parse_text("risk.profile = hinge\n", "<test>");
    CHECK(error_field([&] { build_risk_spec(kv); }) == "risk");
  }
  {
    // Variant falls back on the problem's declared modulus.
    const KeyValues kv = KeyValues::parse_text("", "<test>");
    CHECK(build_schedule(kv, 0.5).variant == ScheduleVariant::StronglyConvexSubharmonic);
    CHECK(build_schedule(kv, 0.5).sigma == doctest::Approx(0.5));
    CHECK(build_schedule(kv, 0.0).variant == ScheduleVariant::ConvexSubharmonic);
  }
  {
    KeyValues kv = KeyValues::parse_text(
        "schedule.variant = constant\nschedule.sigma = 2\nschedule.alpha = 0.1\n"
        "schedule.beta = 0.3\nschedule.gamma = 0.4\n",
        "<test>");
    const Schedule s = build_schedule(kv, 0.0);
    CHECK(s.variant == ScheduleVariant::Constant);
    CHECK(stepsizes(s, 1.0, 17).alpha == doctest::Approx(0.05));
  }
  {
    KeyValues kv = KeyValues::parse_text("schedule.variant = warp\n", "<test>");
    CHECK(error_field([&] { build_schedule(kv, 1.0); }) == "schedule");
  }
}

TEST_CASE("experiment loading wires every field") {
  KeyValues kv = tracking_config();
  kv.set("problem.radius", "4");
  kv.set("schedule.variant", "strongly-convex");
  kv.set("run.replications", "2");
  kv.set("run.seed", "99");
  kv.set("run.output", "foo.csv");
  kv.set("run.average", "true");
  kv.set("run.record", "all");
  kv.set("run.tracking_cadence", "5");
  kv.set("run.diagnostic_k", "100");
  kv.set("run.x0", "1,1");

  const ExperimentConfig cfg = load_experiment(kv);
  CHECK(cfg.problem.name == "quadratic-tracking");
  CHECK(cfg.problem.dim == 2);
  CHECK(cfg.problem.region.radius() == doctest::Approx(4.0));
  CHECK(cfg.spec.p == 2.0);
  CHECK(cfg.spec.c == doctest::Approx(0.5));
  CHECK(cfg.schedule.variant == ScheduleVariant::StronglyConvexSubharmonic);
  CHECK(cfg.schedule.sigma == doctest::Approx(0.5));
  CHECK(cfg.plan.mu == doctest::Approx(0.1));
  CHECK(cfg.plan.D1 == doctest::Approx(2.0));          // smooth pair: D1 = N
  CHECK(cfg.plan.D2 == doctest::Approx(std::sqrt(8.0)));
  CHECK(cfg.plan.epsilon == doctest::Approx(1.0));
  CHECK(cfg.iterations == 50);
  CHECK(cfg.replications == 2);
  CHECK(cfg.seed == 99);
  CHECK(cfg.output == "foo.csv");
  CHECK(cfg.average);
  CHECK_FALSE(cfg.thinned);
  CHECK(cfg.tracking_cadence == 5);
  CHECK(cfg.diagnostic_k == 100);
  REQUIRE(cfg.x0.has_value());
  CHECK((*cfg.x0)[0] == doctest::Approx(1.0));
}

TEST_CASE("experiment loading rejects bad inputs with the offending key") {
  {
    KeyValues kv = tracking_config();
    kv.set("problem.typo", "1");
    CHECK(error_field([&] { load_experiment(kv); }) == "problem.typo");
  }
  {
    KeyValues kv = tracking_config();
    kv.set("smoothing.mu", "0");
    CHECK(error_field([&] { load_experiment(kv); }) == "smoothing.mu");
  }
  {
    // Neither an explicit radius nor the dimension-aware rule is present.
    KeyValues bare = KeyValues::parse_text(
        "problem.name = newsvendor\nrun.iterations = 5\n", "<test>");
    CHECK(error_field([&] { load_experiment(bare); }) == "smoothing.mu");
  }
  {
    KeyValues kv = tracking_config();
    kv.set("risk.p", "2.5");
    CHECK(error_field([&] { load_experiment(kv); }) == "risk");
  }
  {
    // Explicit gradient-moment override only makes sense for the smooth pair.
    KeyValues kv = KeyValues::parse_text(
        "problem.name = newsvendor\nsmoothing.mu = 0.1\nsmoothing.t2 = 0\n",
        "<test>");
    CHECK(error_field([&] { load_experiment(kv); }) == "smoothing");
  }
  {
    KeyValues kv = tracking_config();
    kv.set("run.x0", "1,2,3");
    CHECK(error_field([&] { load_experiment(kv); }) == "run.x0");
  }
  {
    KeyValues kv = tracking_config();
    kv.set("run.diagnostic_k", "1");
    CHECK(error_field([&] { load_experiment(kv); }) == "run.diagnostic_k");
  }
  {
    KeyValues kv = tracking_config();
    kv.set("run.record", "sparse");
    CHECK(error_field([&] { load_experiment(kv); }) == "run.record");
  }
  {
    KeyValues kv = tracking_config();
    kv.set("run.replications", "0");
    CHECK(error_field([&] { load_experiment(kv); }) == "run.replications");
  }
}

TEST_CASE("dimension-aware radius rule engages when mu is absent") {
  {
    KeyValues kv = KeyValues::parse_text(
        "problem.name = newsvendor\nsmoothing.M = 0.2\n", "<test>");
    const ExperimentConfig cfg = load_experiment(kv);
    CHECK(cfg.plan.mu == doctest::Approx(0.2));  // Lipschitz: M / sqrt(1)
  }
  {
    KeyValues kv = KeyValues::parse_text(
        "problem.name = quadratic-tracking\n"
        "problem.center = 0,0,0,0\n"
        "smoothing.M = 0.8\n"
        "smoothing.t2 = 0.5\n",
        "<test>");
    const ExperimentConfig cfg = load_experiment(kv);
    CHECK(cfg.plan.mu == doctest::Approx(0.1));  // smooth: M / N^(3/2) = 0.8 / 8
    CHECK(cfg.plan.T2 == doctest::Approx(0.5));
  }
}

TEST_CASE("replication runs are deterministic and carry tracking errors") {
  KeyValues kv = tracking_config();
  kv.set("run.record", "all");
  kv.set("run.tracking_cadence", "5");
  kv.set("run.diagnostic_k", "200");
  const ExperimentConfig cfg = load_experiment(kv);

  const RunOutput a = run_replication(cfg, 0);
  REQUIRE(a.trajectory.records.size() == 51);
  REQUIRE(a.tracking.size() == 11);  // records 0, 5, ..., 50
  for (const TrackingPoint& p : a.tracking) CHECK(p.z_applicable);

  const RunOutput b = run_replication(cfg, 0);
  const std::vector<std::string> rows_a = csv_rows(cfg, 0, a, std::nullopt);
  const std::vector<std::string> rows_b = csv_rows(cfg, 0, b, std::nullopt);
  CHECK(rows_a == rows_b);

  const RunOutput other = run_replication(cfg, 1);
  CHECK(csv_rows(cfg, 1, other, std::nullopt) != rows_a);
}

TEST_CASE("csv assembly matches the published schema") {
  CHECK(csv_header(3, false) ==
        "replication,n,alpha,beta,gamma,x0,x1,x2,y,z,y_err_sq,z_err_sq,oracle_calls");
  CHECK(csv_header(3, true) ==
        "replication,n,alpha,beta,gamma,dist_sq,y,z,y_err_sq,z_err_sq,oracle_calls");

  CHECK(g17(0.1) == "0.10000000000000001");
  for (double v : {1.0 / 3.0, 1e300, -2.5e-7, 123456.789}) {
    CHECK(std::strtod(g17(v).c_str(), nullptr) == v);
  }
  CHECK(g17(std::nan("")) == "nan");

  const std::string marker = csv_failure_marker(2, 3, false);
  CHECK(marker.rfind("2,-1,nan", 0) == 0);
  std::size_t fields = 1;
  for (char ch : marker) fields += (ch == ',');
  // Same width as the header: 5 leading + 3 decision + 5 trailing columns.
  CHECK(fields == 13);

  KeyValues kv = tracking_config();
  kv.set("run.iterations", "8");
  kv.set("run.record", "all");
  kv.set("run.tracking_cadence", "4");
  kv.set("run.diagnostic_k", "50");
  const ExperimentConfig cfg = load_experiment(kv);
  const RunOutput out = run_replication(cfg, 3);
  const std::vector<double> ref = {0.5, -0.5};
  const std::vector<std::string> rows = csv_rows(cfg, 3, out, ref);
  REQUIRE(rows.size() == 9);
  for (const std::string& row : rows) {
    std::size_t commas = 0;
    for (char ch : row) commas += (ch == ',');
    CHECK(commas == 10);  // 11 columns in dist_sq form
    CHECK(row.rfind("3,", 0) == 0);
  }
  // Tracking columns populate exactly at the cadence records.
  CHECK(rows[0].find("nan") == std::string::npos);
  CHECK(rows[1].find("nan") != std::string::npos);
  CHECK(rows[4].find("nan") == std::string::npos);
}

}  // TEST_SUITE
