#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "overrun/financing.hpp"

using namespace overrun;
using S = Stakeholder;

namespace {

// Continuous-time oracle: spend rate F'(t) integrated against the interest
// factor with composite Simpson, startup compounding on top.
double continuous_financing(double occ, double tc, double ts, double r, int panels = 20000) {
  auto integrand = [&](double t) {
    const double rate = std::numbers::pi / (2.0 * tc) * std::cos(std::numbers::pi / tc * (t - tc / 2.0));
    return rate * (std::pow(1.0 + r, (tc - t) / 12.0) - 1.0);
  };
  const double h = tc / panels;
  double s = integrand(0.0) + integrand(tc);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * integrand(i * h);
  const double idc = occ * s * h / 3.0;
  return idc + (occ + idc) * (std::pow(1.0 + r, ts / 12.0) - 1.0);
}

}  // namespace

TEST(SpendFraction, Endpoints) {
  EXPECT_EQ(spend_fraction(0.0, 91.0), 0.0);
  EXPECT_EQ(spend_fraction(91.0, 91.0), 1.0);
  EXPECT_NEAR(spend_fraction(45.5, 91.0), 0.5, 1e-15);
  EXPECT_THROW(spend_fraction(-0.1, 91.0), DomainError);
  EXPECT_THROW(spend_fraction(91.1, 91.0), DomainError);
}

TEST(SpendFraction, MonotoneAndStepsSumToOne) {
  double prev = 0.0, sum = 0.0;
  for (int k = 1; k <= 91; ++k) {
    const double f = spend_fraction(k, 91.0);
    EXPECT_GE(f, prev);
    sum += f - prev;
    prev = f;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(FinancingCost, TrivialCases) {
  EXPECT_EQ(financing_cost(15000, {91, 28}, {0.0, 1.0}), 0.0);
  EXPECT_EQ(financing_cost(0.0, {91, 28}, {0.04, 1.0}), 0.0);
}

TEST(FinancingCost, FrozenMonthlyValue) {
  // 30-digit evaluation of the monthly, end-of-step scheme
  EXPECT_NEAR(financing_cost(15000, {91, 28}, {0.04, 1.0}), 4081.84534577524, 1e-9);
}

TEST(FinancingCost, FractionalFinalStep) {
  // 2-month steps over 10.5 months: the last step is half a step long
  EXPECT_NEAR(financing_cost(1000, {10.5, 3}, {0.06, 2.0}), 35.9538607320237, 1e-11);
}

TEST(FinancingCost, ConvergesToContinuousIntegral) {
  const double oracle = continuous_financing(15000, 91, 28, 0.04);
  double prev_err = INFINITY;
  for (double h : {4.0, 1.0, 0.25, 1.0 / 16}) {
    const double err = std::abs(financing_cost(15000, {91, 28}, {0.04, h}) - oracle);
    EXPECT_LT(err, prev_err);
    prev_err = err;
  }
  EXPECT_LT(prev_err / oracle, 1e-3);
}

TEST(FinancingCost, HomogeneousInPrincipal) {
  const double a = financing_cost(1234.5, {80, 20}, {0.07, 1.0});
  for (double k : {0.001, 3.0, 1e6}) EXPECT_NEAR(financing_cost(k * 1234.5, {80, 20}, {0.07, 1.0}), k * a, 1e-12 * k * a);
}

TEST(FinancingCost, StrictlyIncreasing) {
  const FinancingParams p{0.04, 1.0};
  const double base = financing_cost(100, {60, 12}, p);
  EXPECT_GT(financing_cost(100, {60, 12}, {0.05, 1.0}), base);
  EXPECT_GT(financing_cost(100, {61, 12}, p), base);
  EXPECT_GT(financing_cost(100, {60, 13}, p), base);
}

TEST(RateBackCalculation, PaperAnchorsFallInBracket) {
  const double r = back_calculate_rate(15000, 3500, {91, 28});
  EXPECT_GE(r, 0.033);
  EXPECT_LE(r, 0.042);
  // regression constant for the monthly scheme (30-digit root)
  EXPECT_NEAR(r, 0.0348045853481646, 1e-12);
}

TEST(RateBackCalculation, ContinuousOracleRate) {
  // root of the continuous model for the same anchors, found once at high precision
  const double r_cont = 0.0345674250859289;
  EXPECT_NEAR(continuous_financing(15000, 91, 28, r_cont), 3500.0, 1e-6);
  EXPECT_NEAR(back_calculate_rate(15000, 3500, {91, 28}, 1.0 / 64), r_cont, 2e-5);
}

TEST(RateBackCalculation, RoundTrip) {
  for (double r : {0.01, 0.04, 0.10}) {
    const double cfin = financing_cost(15000, {91, 28}, {r, 1.0});
    EXPECT_NEAR(back_calculate_rate(15000, cfin, {91, 28}), r, 1e-8);
  }
}

TEST(RateBackCalculation, Errors) {
  EXPECT_EQ(back_calculate_rate(15000, 0.0, {91, 28}), 0.0);
  EXPECT_THROW(back_calculate_rate(15000, 1e9, {91, 28}), SolverError);
  EXPECT_THROW(back_calculate_rate(15000, -1.0, {91, 28}), DomainError);
}

TEST(FinancingOverrun, Basics) {
  const FinancingParams p;
  EXPECT_EQ(financing_overrun_total(100, {60, 12}, 100, {60, 12}, p), 0.0);
  EXPECT_GT(financing_overrun_total(101, {60, 12}, 100, {60, 12}, p), 0.0);
}

TEST(FinancingCausers, SingleStakeholderTakesAll) {
  EnumArray<S, StakeholderDelta> d;
  d[S::ConstructionSubcontractors] = {50, 3};
  const auto r = attribute_financing_causers(1000, {60, 12}, d, 17.0, {0.05, 1.0});
  EXPECT_EQ(r[S::ConstructionSubcontractors], 17.0);
  EXPECT_DOUBLE_EQ(r.sum(), 17.0);
}

TEST(FinancingCausers, SymmetricDeltasSplitEvenly) {
  EnumArray<S, StakeholderDelta> d;
  d[S::ConstructionSubcontractors] = {50, 3};
  d[S::DesignAndManagement] = {50, 3};
  const auto r = attribute_financing_causers(1000, {60, 12}, d, 20.0, {0.05, 1.0});
  EXPECT_EQ(r[S::ConstructionSubcontractors], r[S::DesignAndManagement]);
  EXPECT_DOUBLE_EQ(r.sum(), 20.0);
}

TEST(FinancingCausers, TwoPointOracle) {
  EnumArray<S, StakeholderDelta> d;
  d[S::ConstructionSubcontractors] = {200, 10};
  d[S::EquipmentSuppliers] = {20, 0};
  const FinancingParams p{0.05, 1.0};
  const double total = financing_overrun_total(1220, {70, 12}, 1000, {60, 12}, p);
  EXPECT_NEAR(total, 71.2577089385526, 1e-9);
  const auto r = attribute_financing_causers(1000, {60, 12}, d, total, p);
  // per-stakeholder overruns 67.0490011022560 and 3.70946938151078
  EXPECT_NEAR(r[S::ConstructionSubcontractors] / total, 0.947575613828993, 1e-12);
  EXPECT_DOUBLE_EQ(r.sum(), total);
}

TEST(FinancingCausers, InconsistentWhenNobodyCauses) {
  EnumArray<S, StakeholderDelta> d;
  EXPECT_THROW(attribute_financing_causers(1000, {60, 12}, d, 5.0, {}), InconsistencyError);
  EXPECT_EQ(attribute_financing_causers(1000, {60, 12}, d, 0.0, {}).sum(), 0.0);
}
