#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "salesmix/errors.hpp"
#include "salesmix/model.hpp"
#include "salesmix/numeric.hpp"
#include "salesmix/risk.hpp"
#include "salesmix/scenario.hpp"
#include "salesmix/sweep.hpp"
#include "test_support.hpp"

using namespace salesmix;

namespace {

ScenarioSet set_of(const std::vector<UnitSpec>& units,
                   std::vector<Scenario> scenarios) {
  ScenarioSet set;
  for (const auto& u : units) set.unit_ids.push_back(u.id);
  set.scenarios = std::move(scenarios);
  return set;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (const char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("feasible range is capped by the worst-scenario own capacity") {
  const auto units = testsupport::two_unit_toy();
  Scenario a = testsupport::scenario_for(units, 150.0);
  Scenario b = a;
  b.index = 1;
  b.capacity[0] = 80.0;  // a lean scenario for u1
  a.probability = b.probability = 0.5;
  const QftRange r = feasible_qft_range(units, set_of(units, {a, b}));
  CHECK(r.lo == 0.0);
  CHECK(r.hi == 180.0);

  const SystemConfig cfg = benchmark_config();
  const ScenarioSet mean_set =
      set_of(cfg.units, {mean_value_scenario(cfg)});
  CHECK(feasible_qft_range(cfg.units, mean_set).hi ==
        doctest::Approx(9988.35).epsilon(1e-12));

  CHECK_THROWS_AS(feasible_qft_range(units, set_of(units, {})), ConfigError);
}

TEST_CASE("futures price is the probability-weighted naive price") {
  const auto units = testsupport::two_unit_toy();
  Scenario lo = testsupport::scenario_for(units, 150.0);
  Scenario hi = testsupport::scenario_for(units, 250.0);
  hi.index = 1;
  lo.probability = 0.75;
  hi.probability = 0.25;
  const ScenarioSet set = set_of(units, {lo, hi});

  const auto [pf0, prices0] = futures_price(units, set, 0.0, 1.0);
  CHECK(prices0 == std::vector<double>{10.0, 20.0});
  CHECK(pf0 == doctest::Approx(12.5).epsilon(1e-12));

  // Committing 60 scales own capacity to 70+70 but both demands still clear
  // at the same marginal units.
  const auto [pf60, prices60] = futures_price(units, set, 60.0, 1.0);
  CHECK(prices60 == std::vector<double>{10.0, 20.0});
  CHECK(pf60 == doctest::Approx(12.5).epsilon(1e-12));

  // Committing the whole pool leaves only the rival: the low-demand
  // scenario is fully absorbed, the high one pays the rival's cost.
  const auto [pf200, prices200] = futures_price(units, set, 200.0, 1.0);
  CHECK(prices200 == std::vector<double>{0.0, 20.0});
  CHECK(pf200 == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("benchmark mean scenario futures prices decline in commitment") {
  const SystemConfig cfg = benchmark_config();
  const ScenarioSet mean_set = set_of(cfg.units, {mean_value_scenario(cfg)});
  const double pf0 = futures_price(cfg.units, mean_set, 0.0, cfg.alpha).first;
  const double pf1000 =
      futures_price(cfg.units, mean_set, 1000.0, cfg.alpha).first;
  const double pf2250 =
      futures_price(cfg.units, mean_set, 2250.0, cfg.alpha).first;
  CHECK(pf0 == doctest::Approx(43.43).epsilon(1e-12));
  CHECK(pf0 >= pf1000);
  CHECK(pf1000 >= pf2250);
}

TEST_CASE("run_sweep aggregates its per-scenario solutions consistently") {
  const SystemConfig cfg = testsupport::toy_config();
  const ScenarioSet set = generate_scenarios(cfg);
  const Frontier f = run_sweep(cfg, set);

  CHECK(f.cvar_level == cfg.cvar_level);
  CHECK(f.provenance == set.provenance);
  REQUIRE(f.points.size() == cfg.qft_grid.size());

  for (const SweepPoint& pt : f.points) {
    REQUIRE(pt.feasible);
    REQUIRE(pt.solutions.size() == set.scenarios.size());
    REQUIRE(pt.naive_prices.size() == set.scenarios.size());

    // The published point statistics must be recomputable from the stored
    // per-scenario solutions.
    ProfitDistribution dist;
    KahanSum esp;
    for (std::size_t w = 0; w < pt.solutions.size(); ++w) {
      dist.value.push_back(pt.solutions[w].profit);
      dist.probability.push_back(set.scenarios[w].probability);
      esp += set.scenarios[w].probability * pt.solutions[w].outcome.price;

      KahanSum committed;
      for (const double q : pt.solutions[w].futures) committed += q;
      CHECK(committed.value() == doctest::Approx(pt.qft).epsilon(1e-9));
    }
    CHECK(pt.expected_profit == expected(dist));
    CHECK(pt.cvar_profit == cvar(dist, cfg.cvar_level));
    CHECK(pt.expected_spot_price == esp.value());
    CHECK(pt.futures_price ==
          futures_price(cfg.units, set, pt.qft, cfg.alpha).first);

    // In the toy the zero-cost nuclear unit always carries the commitment.
    CHECK(pt.mix.nuclear_futures == doctest::Approx(pt.qft).epsilon(1e-12));
    CHECK(pt.mix.conventional_futures ==
          doctest::Approx(0.0).epsilon(1e-12));
    CHECK(pt.mix.renewable_spot == 0.0);
    CHECK(pt.mix.renewable_futures == 0.0);
  }
}

TEST_CASE("sweep output is bit-identical for any thread count") {
  const SystemConfig cfg = testsupport::toy_config();
  const ScenarioSet set = generate_scenarios(cfg);
  const std::string serial = frontier_csv(run_sweep(cfg, set, {1}));
  const std::string wide = frontier_csv(run_sweep(cfg, set, {8}));
  const std::string dflt = frontier_csv(run_sweep(cfg, set, {}));
  CHECK(serial == wide);
  CHECK(serial == dflt);
}

TEST_CASE("infeasible grid points are isolated with a diagnostic") {
  SystemConfig cfg = testsupport::toy_config();
  cfg.qft_grid = {0.0, 150.0, 250.0};  // 250 exceeds the 200 MWh pool
  const ScenarioSet set = generate_scenarios(cfg);
  const Frontier f = run_sweep(cfg, set);
  REQUIRE(f.points.size() == 3);
  CHECK(f.points[0].feasible);
  CHECK(f.points[1].feasible);
  CHECK_FALSE(f.points[2].feasible);
  CHECK(f.points[2].diagnostic.find("250") != std::string::npos);
  CHECK(f.points[2].diagnostic.find("200") != std::string::npos);
  CHECK(f.points[2].naive_prices.empty());
  CHECK(f.points[2].solutions.empty());

  const std::string csv = frontier_csv(f);
  CHECK(csv.find("\n250,,,,,,,,,,,1\n") != std::string::npos);
}

TEST_CASE("frontier csv round trips through write and read") {
  testsupport::TempDir dir("salesmix_sweep");
  SystemConfig cfg = testsupport::toy_config();
  cfg.qft_grid = {0.0, 50.0, 250.0};
  const ScenarioSet set = generate_scenarios(cfg);
  const Frontier f = run_sweep(cfg, set);
  const std::string path = dir.file("frontier.csv");
  write_frontier_csv(f, path);

  const std::vector<FrontierRow> rows = read_frontier_csv(path);
  REQUIRE(rows.size() == f.points.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].qft == f.points[i].qft);
    CHECK(rows[i].infeasible == !f.points[i].feasible);
    if (f.points[i].feasible) {
      CHECK(rows[i].pf == f.points[i].futures_price);
      CHECK(rows[i].exp_spot_price == f.points[i].expected_spot_price);
      CHECK(rows[i].exp_profit == f.points[i].expected_profit);
      CHECK(rows[i].cvar_profit == f.points[i].cvar_profit);
      CHECK(rows[i].nuc_fut == f.points[i].mix.nuclear_futures);
      CHECK(rows[i].conv_spot == f.points[i].mix.conventional_spot);
    }
  }
}

TEST_CASE("detail and plot CSVs have the documented shape") {
  SystemConfig cfg = testsupport::toy_config();
  cfg.qft_grid = {0.0, 50.0, 250.0};  // two feasible points, one not
  const ScenarioSet set = generate_scenarios(cfg);
  const Frontier f = run_sweep(cfg, set);

  const std::string detail = sweep_detail_csv(f, cfg.units);
  std::istringstream ds(detail);
  std::string header;
  std::getline(ds, header);
  CHECK(header ==
        "qft,omega,naive_price,residual_demand,spot_price,marginal,"
        "profit,profit_futures,profit_spot,qf_u1,qf_u2,q_u1,q_u2,q_r1");
  CHECK(count_lines(detail) == 1 + 2 * set.scenarios.size());

  const std::string plot = frontier_plot_csv(f);
  std::istringstream ps(plot);
  std::getline(ps, header);
  CHECK(header == "cvar_profit,exp_profit");
  CHECK(count_lines(plot) == 1 + 2);
}

TEST_CASE("frontier reader rejects malformed files") {
  testsupport::TempDir dir("salesmix_sweep_parse");
  const std::string path = dir.file("f.csv");
  const std::string header =
      "qft,pf,exp_spot_price,exp_profit,cvar_profit,nuc_spot,nuc_fut,"
      "ren_spot,ren_fut,conv_spot,conv_fut,infeasible";

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_frontier_csv(dir.file("nope.csv")), IoError);
  }
  SUBCASE("wrong header") {
    testsupport::write_file(path, "qft,pf\n0,1\n");
    CHECK_THROWS_WITH_AS(read_frontier_csv(path),
                         doctest::Contains("unexpected header"), ParseError);
  }
  SUBCASE("wrong field count") {
    testsupport::write_file(path, header + "\n0,1,2\n");
    CHECK_THROWS_WITH_AS(read_frontier_csv(path),
                         doctest::Contains("expected 12 fields"), ParseError);
  }
  SUBCASE("infeasible row with values") {
    testsupport::write_file(path, header + "\n0,5,,,,,,,,,,1\n");
    CHECK_THROWS_WITH_AS(read_frontier_csv(path),
                         doctest::Contains("must have empty fields"),
                         ParseError);
  }
  SUBCASE("bad flag") {
    testsupport::write_file(path, header + "\n0,1,2,3,4,5,6,7,8,9,10,2\n");
    CHECK_THROWS_WITH_AS(read_frontier_csv(path),
                         doctest::Contains("0 or 1"), ParseError);
  }
  SUBCASE("no data rows") {
    testsupport::write_file(path, header + "\n");
    CHECK_THROWS_WITH_AS(read_frontier_csv(path),
                         doctest::Contains("no data rows"), ParseError);
  }
}

TEST_CASE("run_sweep refuses a scenario set for different units") {
  const SystemConfig cfg = testsupport::toy_config();
  ScenarioSet set = generate_scenarios(cfg);
  std::swap(set.unit_ids[0], set.unit_ids[1]);
  CHECK_THROWS_AS(run_sweep(cfg, set), ConfigError);
}
