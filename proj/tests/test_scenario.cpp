#include <gtest/gtest.h>

#include "overrun/calibration.hpp"
#include "overrun/scenario.hpp"
#include "test_support.hpp"

using namespace overrun;
using overrun::testing::bundled;
using S = Stakeholder;
using T = CostOverrunType;

namespace {

double share_caused(const PlantResult& r, S s) { return r.attribution.caused_by(s) / r.total_overrun(); }
double share_received(const PlantResult& r, S s) { return r.attribution.received_by(s) / r.total_overrun(); }

ScenarioConfig single_plant(LeverState levers) {
  ScenarioConfig c = bundled("us-experience");
  c.n_plants = 1;
  c.baseline_learning = {1.0};
  c.lever_schedule.per_plant = {levers};
  return c;
}

}  // namespace

TEST(RunScenario, UsExperienceEliminatesOverrunsByPlantFive) {
  const auto rs = run_scenario(bundled("us-experience"));
  ASSERT_EQ(rs.size(), 10u);
  for (std::size_t i = 1; i < rs.size(); ++i) EXPECT_LE(rs[i].total_overrun(), rs[i - 1].total_overrun());
  for (std::size_t i = 4; i < rs.size(); ++i) {
    EXPECT_EQ(rs[i].total_overrun(), 0.0) << "plant " << rs[i].plant_index;
    EXPECT_EQ(rs[i].schedule.dt_total, 0.0);
    EXPECT_EQ(rs[i].tci(), rs[i].baseline_tci);
  }
  EXPECT_GT(rs[3].total_overrun(), 0.0);
}

TEST(RunScenario, FixedProficiencyAlwaysOverruns) {
  const auto rs = run_scenario(bundled("fixed-construction-proficiency"));
  for (const auto& r : rs) EXPECT_GT(r.total_overrun(), 0.0);
}

TEST(RunScenario, FullProficiencySinglePlant) {
  auto c = single_plant(LeverState::full_proficiency());
  c.overrun_params.scd_months_per_plant = {0.0};
  const auto rs = run_scenario(c);
  ASSERT_EQ(rs.size(), 1u);
  EXPECT_EQ(rs[0].total_overrun(), 0.0);
  EXPECT_EQ(rs[0].tci(), rs[0].baseline_tci);
  EXPECT_EQ(rs[0].attribution, AttributionResult{});
}

TEST(RunScenario, SupplyChainDelayAloneIsFinancingOnly) {
  auto c = single_plant(LeverState::full_proficiency());
  c.overrun_params.scd_months_per_plant = {4.0};
  const auto r = run_scenario(c).front();
  EXPECT_EQ(r.occ_overrun(), 0.0);
  EXPECT_GT(r.financing_overrun, 0.0);
  EXPECT_DOUBLE_EQ(r.attribution.cost_by_causer_and_type[S::EquipmentSuppliers][T::Financing], r.financing_overrun);
  const auto links = sankey_flows(r).links();
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0].source, "causer:equipment_suppliers");
  EXPECT_EQ(links[0].target, "type:financing");
  EXPECT_EQ(links[1].target, "recipient:creditors");
}

TEST(RunScenario, Deterministic) {
  const auto c = bundled("fixed-construction-proficiency");
  EXPECT_EQ(run_scenario(c), run_scenario(c));
}

TEST(RunScenario, ConservationOnBundledRuns) {
  for (const char* name : {"us-experience", "fixed-construction-proficiency"}) {
    for (const auto& r : run_scenario(bundled(name))) {
      EXPECT_LE(conservation_error(r.attribution, r.cost_type_totals()), 1e-12) << name << " plant " << r.plant_index;
      EXPECT_LE(sankey_flows(r).node_balance_error(), 1e-12);
      EXPECT_NEAR(r.tci(), r.baseline_tci + r.attribution.total_cost(), 1e-9 * r.tci());
      for (auto t : all_values<T>()) EXPECT_EQ(r.attribution.cost_by_causer_and_type[S::Creditors][t], 0.0);
      for (auto s : kNonCreditors) EXPECT_EQ(r.attribution.cost_by_type_and_recipient[T::Financing][s], 0.0);
    }
  }
}

TEST(RunScenario, FixedProficiencyShareTrajectory) {
  const auto rs = run_scenario(bundled("fixed-construction-proficiency"));
  for (std::size_t i = 1; i < 5; ++i)
    EXPECT_GT(share_caused(rs[i], S::ConstructionSubcontractors), share_caused(rs[i - 1], S::ConstructionSubcontractors));
  for (std::size_t i = 5; i < rs.size(); ++i) {
    EXPECT_GE(share_caused(rs[i], S::ConstructionSubcontractors),
              share_caused(rs[i - 1], S::ConstructionSubcontractors) - 1e-12);
    // once the design levers are complete, only the subcontractors cause rework
    EXPECT_EQ(rs[i].attribution.cost_by_causer_and_type[S::DesignAndManagement][T::Rework], 0.0);
  }
  EXPECT_GT(share_caused(rs[0], S::DesignAndManagement), 0.5);
  EXPECT_NEAR(share_caused(rs[0], S::ConstructionSubcontractors), 0.34, 0.08);
  EXPECT_NEAR(share_caused(rs[1], S::ConstructionSubcontractors), 0.52, 0.08);
  EXPECT_NEAR(share_caused(rs[9], S::ConstructionSubcontractors), 0.69, 0.08);
  EXPECT_NEAR(share_received(rs[0], S::ConstructionSubcontractors), 0.33, 0.08);
  EXPECT_NEAR(share_received(rs[1], S::ConstructionSubcontractors), 0.38, 0.08);
  EXPECT_NEAR(share_received(rs[9], S::ConstructionSubcontractors), 0.43, 0.08);
}

TEST(RunScenario, FoakCalibrationTargets) {
  const auto r = run_scenario(bundled("fixed-construction-proficiency")).front();
  EXPECT_NEAR(r.per_kwe(r.total_overrun()), 9500.0, 95.0);
  EXPECT_NEAR(r.schedule.tc0 + r.schedule.dt_total + r.schedule.ts, 119.0, 1e-6);
  // FOAK OCC lands near the as-built reference plant
  EXPECT_NEAR(r.per_kwe(r.occ()), 15000.0, 750.0);
  // schedule overruns are a minority of the build
  EXPECT_LT(r.schedule.dt_total, r.schedule.tc0 + r.schedule.ts);
}

TEST(RunScenario, ContractOutcomesMatchLedger) {
  const auto rs = run_scenario(bundled("fixed-construction-proficiency"));
  const auto& r = rs[2];
  ASSERT_EQ(r.contract_outcomes.size(), 3u);
  for (const auto& o : r.contract_outcomes) {
    EXPECT_EQ(o.scope.we, r.baseline_scope[o.stakeholder]);
    EXPECT_EQ(o.scope.or_caused, r.attribution.caused_by(o.stakeholder));
    EXPECT_EQ(o.scope.or_received, r.attribution.received_by(o.stakeholder));
    EXPECT_EQ(o.delta, o.profit_recipient - o.profit_cause);
    EXPECT_EQ(o.flags, litigation_flags(o.terms, o.scope));
  }
}

TEST(RunScenario, ConfigErrorsNameTheField) {
  auto expect_field = [](ScenarioConfig c, const std::string& field) {
    try {
      run_scenario(c);
      ADD_FAILURE() << "no error for " << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.field(), field);
    }
  };
  auto c = bundled("us-experience");
  c.n_plants = 11;
  expect_field(c, "baseline_learning");
  c = bundled("us-experience");
  c.lever_schedule.per_plant[3].cp = 2.5;
  expect_field(c, "lever_schedule[3].cp");
  c = bundled("us-experience");
  c.contracts.push_back({S::Creditors, CostPlus{}});
  expect_field(c, "contracts[3].stakeholder");
  c = bundled("us-experience");
  c.overrun_params.scd_months_per_plant.resize(4);
  expect_field(c, "overrun_params.scd_months_per_plant");
  c = bundled("us-experience");
  c.financing.rate = -0.01;
  expect_field(c, "financing.rate");
}

TEST(Aggregate, IdentityDoublingAndSum) {
  const auto rs = run_scenario(bundled("fixed-construction-proficiency"));
  const auto one = aggregate({rs[0]});
  EXPECT_EQ(one.attribution, rs[0].attribution);
  const auto two = aggregate({rs[0], rs[0]});
  for (auto s : all_values<S>())
    for (auto t : all_values<T>())
      EXPECT_EQ(two.attribution.cost_by_causer_and_type[s][t], 2 * rs[0].attribution.cost_by_causer_and_type[s][t]);
  const auto all = aggregate(rs);
  double total = 0;
  for (const auto& r : rs) total += r.total_overrun();
  EXPECT_NEAR(all.cost_type_totals.sum(), total, 1e-9 * total);
  EXPECT_LE(conservation_error(all.attribution, all.cost_type_totals), 1e-12);
  EXPECT_THROW(aggregate({}), DomainError);
}

TEST(Sankey, ZeroOverrunPlantIsEmpty) {
  const auto rs = run_scenario(bundled("us-experience"));
  EXPECT_TRUE(sankey_flows(rs[6]).links().empty());
}

TEST(Sankey, FoakDesignAndManagementDominates) {
  const auto r = run_scenario(bundled("fixed-construction-proficiency")).front();
  const auto f = sankey_flows(r);
  EXPECT_GT(f.causer_to_type[S::DesignAndManagement].sum() / r.total_overrun(), 0.5);
}

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

TEST(Calibration, ReproducesAnchors) {
  const auto rep = calibrate_reference_model_report({9500, 3120, 119}, bundled("us-experience"));
  EXPECT_NEAR(rep.foak_overrun_per_kwe, 9500, 95);
  EXPECT_NEAR(rep.tenoak_overrun_per_kwe, 3120, 31.2);
  EXPECT_NEAR(rep.foak_duration_months, 119, 1e-6);
  // run through the public scenario path with the fitted params
  auto c = with_fixed_construction_proficiency(bundled("us-experience"));
  c.overrun_params = rep.params;
  const auto rs = run_scenario(c);
  EXPECT_NEAR(rs[0].per_kwe(rs[0].total_overrun()), 9500, 95);
  EXPECT_NEAR(rs[9].per_kwe(rs[9].total_overrun()), 3120, 31.2);
}

TEST(Calibration, BundledConfigsCarryFittedParams) {
  const auto fitted = calibrate_reference_model({9500, 3120, 119}, bundled("fixed-construction-proficiency"));
  for (const char* name : {"us-experience", "fixed-construction-proficiency"}) {
    const auto p = bundled(name).overrun_params;
    EXPECT_NEAR(p.rho_c, fitted.rho_c, 1e-9) << name;
    EXPECT_NEAR(p.rho_ae, fitted.rho_ae, 1e-9) << name;
    EXPECT_NEAR(p.rho_d, fitted.rho_d, 1e-9) << name;
    EXPECT_NEAR(p.lambda_lp, fitted.lambda_lp, 1e-8) << name;
    EXPECT_NEAR(p.sigma_sched, fitted.sigma_sched, 1e-9) << name;
  }
}

TEST(Calibration, ZeroAnchorsGiveZeroScales) {
  const auto tmpl = bundled("us-experience");
  const auto p = calibrate_reference_model({0, 0, 119}, tmpl);
  EXPECT_EQ(p.rho_c, 0.0);
  EXPECT_EQ(p.rho_ae, 0.0);
  EXPECT_EQ(p.rho_d, 0.0);
  EXPECT_EQ(p.lambda_lp, 0.0);
  EXPECT_EQ(p.sigma_sched, tmpl.overrun_params.sigma_sched);
}

TEST(Calibration, TracksPerturbedAnchors) {
  const auto tmpl = bundled("us-experience");
  const auto base = calibrate_reference_model_report({9500, 3120, 119}, tmpl);
  const auto up = calibrate_reference_model_report({9500 * 1.1, 3120 * 1.1, 119}, tmpl);
  EXPECT_NEAR(up.foak_overrun_per_kwe / base.foak_overrun_per_kwe, 1.1, 0.011);
  EXPECT_NEAR(up.tenoak_overrun_per_kwe / base.tenoak_overrun_per_kwe, 1.1, 0.011);
  EXPECT_GT(up.params.rho_c, base.params.rho_c);
}

TEST(Calibration, WithoutDurationKeepsSigma) {
  const auto tmpl = bundled("us-experience");
  const auto rep = calibrate_reference_model_report({9500, 3120, std::nullopt}, tmpl);
  EXPECT_EQ(rep.params.sigma_sched, tmpl.overrun_params.sigma_sched);
  EXPECT_NEAR(rep.foak_overrun_per_kwe, 9500, 95);
}

TEST(Calibration, UnreachableAnchorsReportResiduals) {
  // 10-OAK overrun larger than FOAK cannot be produced by levers that only improve
  try {
    calibrate_reference_model({1000, 50000, 119}, bundled("us-experience"));
    FAIL();
  } catch (const CalibrationError& e) {
    EXPECT_FALSE(e.residuals().empty());
  }
}

TEST(Calibration, NeedsTenPlants) {
  auto c = bundled("us-experience");
  c.n_plants = 5;
  c.lever_schedule.per_plant.resize(5);
  c.baseline_learning.resize(5);
  EXPECT_THROW(calibrate_reference_model({}, c), ConfigError);
}
