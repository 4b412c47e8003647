#include <gtest/gtest.h>

#include <chrono>
#include <thread>

#include "overrun/service.hpp"
#include "test_support.hpp"

using namespace overrun;
using namespace overrun::service;
using overrun::testing::bundled;
using overrun::testing::data_dir;

namespace {

const Defaults& defaults() {
  static const Defaults d = Defaults::load(data_dir());
  return d;
}

}  // namespace

TEST(Service, DefaultsListsBothScenarios) {
  const auto r = handle_defaults(defaults());
  ASSERT_EQ(r.status, 200);
  EXPECT_TRUE(r.body["configs"].contains("us-experience"));
  EXPECT_TRUE(r.body["configs"].contains("fixed-construction-proficiency"));
  EXPECT_EQ(r.body["configs"].size(), 2u);
  EXPECT_EQ(config_from_json(r.body["configs"]["us-experience"]), bundled("us-experience"));
}

TEST(Service, ScenarioMatchesLibraryExport) {
  const auto c = bundled("fixed-construction-proficiency");
  const auto r = handle_scenario(config_to_json(c).dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(dump(r.body), dump(results_to_json(c.scenario_name, run_scenario(c))));
}

TEST(Service, MalformedBodies) {
  auto r = handle_scenario("{not json");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "malformed_body");

  json j = config_to_json(bundled("us-experience"));
  j["lever_schedule"][0]["aep"] = 7;
  r = handle_scenario(j.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["field"], "lever_schedule[0].aep");

  r = handle_scenario("[1,2]");
  EXPECT_EQ(r.status, 400);
}

TEST(Service, CostPlusCurveIsFlat) {
  const auto r = handle_contract_curve(R"({"terms": {"type": "cost_plus"}, "we": 1000})");
  ASSERT_EQ(r.status, 200);
  ASSERT_EQ(r.body["samples"].size(), 61u);
  for (const auto& s : r.body["samples"]) EXPECT_NEAR(s["margin"].get<double>(), 0.08, 1e-12);
  EXPECT_NEAR(r.body["summary"]["max_margin"].get<double>(), 0.08, 1e-12);
}

TEST(Service, CurveMarkersAndFlags) {
  const auto r = handle_contract_curve(
      R"({"terms": {"type": "fixed_price"}, "we": 1000, "scope": {"or_caused": 200, "or_received": 350}, "n_samples": 5})");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["samples"].size(), 5u);
  EXPECT_NEAR(r.body["flags"]["delta"].get<double>(), -150.0, 1e-9);
  EXPECT_TRUE(r.body["flags"]["litigation_risk_against_causers"].get<bool>());
  EXPECT_TRUE(r.body["summary"]["min_margin"].is_null());
  EXPECT_TRUE(r.body["summary"]["min_margin_unbounded"].get<bool>());
  EXPECT_NEAR(r.body["summary"]["max_margin"].get<double>(), 0.404, 1e-12);
}

TEST(Service, CurveErrors) {
  EXPECT_EQ(handle_contract_curve(R"({"terms": {"type": "cost_plus"}})").body["field"], "we");
  EXPECT_EQ(handle_contract_curve(R"({"terms": {"type": "cost_plus"}, "we": 1, "n_samples": 1})").body["field"],
            "n_samples");
  EXPECT_EQ(handle_contract_curve(R"({"terms": {"type": "cost_plus"}, "we": -1})").status, 400);
}

TEST(Service, FinancingRate) {
  const auto r = handle_financing_rate(R"({"occ": 15000, "cfin": 3500, "schedule": {"tc": 91, "ts": 28}})");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["rate"].get<double>(), back_calculate_rate(15000, 3500, {91, 28}));
  const auto bad = handle_financing_rate(R"({"occ": 15000, "cfin": 1e12, "schedule": {"tc": 91, "ts": 28}})");
  EXPECT_EQ(bad.status, 422);
  EXPECT_EQ(bad.body["error"], "solver_error");
  EXPECT_EQ(handle_financing_rate(R"({"occ": 15000, "cfin": 3500})").body["field"], "schedule");
}

TEST(Service, OverHttp) {
  httplib::Server server;
  register_routes(server, defaults());
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/defaults");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");

  const auto c = bundled("us-experience");
  res = client.Post("/scenario", config_to_json(c).dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body), results_to_json(c.scenario_name, run_scenario(c)));

  res = client.Post("/financing/rate", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);

  server.stop();
  th.join();
}
