#pragma once

// Stateless HTTP scenario-evaluation API. Handlers are plain functions from a
// request body to (status, JSON) so they can be tested without a socket;
// register_routes only wires them into an httplib server.

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

// Eigen must come before httplib: <resolv.h> defines a `_res` macro.
#include "overrun/overrun.hpp"

#include "httplib.h"

namespace overrun::service {

struct Response {
  int status = 200;
  json body;
};

/// Bundled configs served by GET /defaults, keyed by scenario name.
struct Defaults {
  std::map<std::string, ScenarioConfig> configs;

  static Defaults load(const std::filesystem::path& dir,
                       const std::vector<std::string>& names = {"us-experience", "fixed-construction-proficiency"}) {
    Defaults d;
    for (const auto& n : names) d.configs.emplace(n, load_config(dir / (n + ".json")));
    return d;
  }
};

namespace detail {

inline Response error(int status, std::string code, std::string message, std::string field = {}) {
  json body = {{"error", std::move(code)}, {"message", std::move(message)}};
  if (!field.empty()) body["field"] = std::move(field);
  return {status, std::move(body)};
}

/// Maps library exceptions onto HTTP statuses.
template <class F>
Response guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    return error(400, "invalid_field", e.what(), e.field());
  } catch (const json::exception& e) {
    return error(400, "malformed_body", e.what(), "<body>");
  } catch (const SolverError& e) {
    return error(422, "solver_error", e.what());
  } catch (const DomainError& e) {
    return error(422, "domain_error", e.what());
  } catch (const InconsistencyError& e) {
    return error(500, "inconsistency", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal_error", e.what());
  }
}

inline json parse_body(const std::string& body) {
  json j = json::parse(body);
  if (!j.is_object()) throw ConfigError("<body>", "expected a JSON object");
  return j;
}

}  // namespace detail

inline Response handle_defaults(const Defaults& defaults) {
  return detail::guarded([&] {
    json configs = json::object();
    for (const auto& [name, cfg] : defaults.configs) configs[name] = config_to_json(cfg);
    return Response{200, {{"configs", configs}}};
  });
}

/// Body: a ScenarioConfig document. Same output as `overrun_cli run --format json`.
inline Response handle_scenario(const std::string& body) {
  return detail::guarded([&] {
    const ScenarioConfig cfg = config_from_json(detail::parse_body(body));
    return Response{200, results_to_json(cfg.scenario_name, run_scenario(cfg))};
  });
}

/// Body: {terms, we, scope: {or_caused, or_received}, or_max?, n_samples?}.
inline Response handle_contract_curve(const std::string& body) {
  using namespace io_detail;
  return detail::guarded([&] {
    const json j = detail::parse_body(body);
    check_keys(j, "", {"terms", "we", "scope", "or_max", "n_samples"});
    const ContractTerms terms = contract_terms_from_json(require(j, "terms", ""), "terms");
    StakeholderScope scope;
    scope.we = number(j, "we", "");
    if (!(scope.we > 0.0)) throw ConfigError("we", "must be > 0");
    if (j.contains("scope")) {
      check_keys(j["scope"], "scope", {"or_caused", "or_received"});
      scope.or_caused = number_or(j["scope"], "or_caused", "scope", 0.0);
      scope.or_received = number_or(j["scope"], "or_received", "scope", 0.0);
    }
    if (!(scope.or_caused >= 0.0)) throw ConfigError("scope.or_caused", "must be >= 0");
    if (!(scope.or_received >= 0.0)) throw ConfigError("scope.or_received", "must be >= 0");
    const double or_max =
        number_or(j, "or_max", "", std::max(scope.we, 1.2 * std::max(scope.or_caused, scope.or_received)));
    if (!(or_max > 0.0)) throw ConfigError("or_max", "must be > 0");
    const double n = number_or(j, "n_samples", "", 61);
    if (!(n >= 2 && n <= 10000) || n != static_cast<double>(static_cast<std::size_t>(n)))
      throw ConfigError("n_samples", "must be an integer in [2, 10000]");

    const auto curve = profit_curve_samples(terms, scope.we, or_max, static_cast<std::size_t>(n), scope);
    json samples = json::array();
    for (const auto& p : curve.samples)
      samples.push_back({{"overrun", p.overrun}, {"profit", p.profit}, {"margin", p.profit / (scope.we + p.overrun)}});
    const auto summary = summarize_terms(terms, scope.we);
    const auto flags = litigation_flags(terms, scope);
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json out;
    out["terms"] = contract_terms_to_json(terms);
    out["we"] = scope.we;
    out["samples"] = samples;
    out["cause_point"] = {{"overrun", curve.cause_point.overrun}, {"profit", curve.cause_point.profit}};
    out["recipient_point"] = {{"overrun", curve.recipient_point.overrun}, {"profit", curve.recipient_point.profit}};
    out["summary"] = {{"margin_at_0", summary.margin_at_0},
                      {"margin_at_30", summary.margin_at_30},
                      {"margin_at_60", summary.margin_at_60},
                      {"max_margin", summary.max_margin},
                      {"min_margin", finite_or_null(summary.min_margin)},
                      {"min_margin_unbounded", std::isinf(summary.min_margin)}};
    out["flags"] = {{"delta", flags.delta},
                    {"delta_sign", flags.delta_sign},
                    {"cause_in_zero_profit_region", flags.cause_in_zero_profit_region},
                    {"recipient_in_zero_profit_region", flags.recipient_in_zero_profit_region},
                    {"slope_sign_at_recipient", flags.slope_sign_at_recipient},
                    {"litigation_risk_against_causers", flags.litigation_risk_against_causers}};
    return Response{200, out};
  });
}

/// Body: {occ, cfin, schedule: {tc, ts}, time_step_months?}.
inline Response handle_financing_rate(const std::string& body) {
  using namespace io_detail;
  return detail::guarded([&] {
    const json j = detail::parse_body(body);
    check_keys(j, "", {"occ", "cfin", "schedule", "time_step_months"});
    const double occ = number(j, "occ", "");
    const double cfin = number(j, "cfin", "");
    const json& s = require(j, "schedule", "");
    check_keys(s, "schedule", {"tc", "ts"});
    const ScheduleState schedule{number(s, "tc", "schedule"), number(s, "ts", "schedule")};
    const double step = number_or(j, "time_step_months", "", 1.0);
    if (!(occ > 0.0)) throw ConfigError("occ", "must be > 0");
    if (!(cfin >= 0.0)) throw ConfigError("cfin", "must be >= 0");
    if (!(schedule.tc > 0.0)) throw ConfigError("schedule.tc", "must be > 0");
    if (!(schedule.ts >= 0.0)) throw ConfigError("schedule.ts", "must be >= 0");
    if (!(step > 0.0)) throw ConfigError("time_step_months", "must be > 0");
    return Response{200, {{"rate", back_calculate_rate(occ, cfin, schedule, step)}}};
  });
}

inline void register_routes(httplib::Server& server, const Defaults& defaults) {
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
  server.Get("/defaults", [&defaults, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, handle_defaults(defaults));
  });
  server.Post("/scenario", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_scenario(req.body));
  });
  server.Post("/contracts/curve", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_contract_curve(req.body));
  });
  server.Post("/financing/rate", [reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, handle_financing_rate(req.body));
  });
}

}  // namespace overrun::service
