#pragma once

// JSON configuration and result documents, CSV ledger export.
//
// Config documents are strict: unknown keys and wrong types are rejected with
// the dotted path of the offending field. Result documents carry a few derived
// totals for consumers; those are ignored when parsing back.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "overrun/calibration.hpp"
#include "overrun/scenario.hpp"

namespace overrun {

using nlohmann::json;

struct IoError : Error {
  using Error::Error;
};

/// Directory searched for bundled configs when none is given explicitly.
inline constexpr const char* kConfigDirEnv = "OVERRUN_CONFIG_DIR";

namespace io_detail {

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
}

inline void expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
}

inline void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  expect_object(j, path);
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) throw ConfigError(join(path, key), "unknown key");
  }
}

inline const json& require(const json& j, std::string_view key, const std::string& path) {
  expect_object(j, path);
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key), "missing");
  return *it;
}

inline double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

inline double number(const json& j, std::string_view key, const std::string& path) {
  return as_number(require(j, key, path), join(path, key));
}

inline double number_or(const json& j, std::string_view key, const std::string& path, double fallback) {
  return j.contains(key) ? number(j, key, path) : fallback;
}

inline std::string text(const json& j, std::string_view key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

inline std::size_t count(const json& j, std::string_view key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
    throw ConfigError(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

inline bool boolean(const json& j, std::string_view key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

inline std::vector<double> numbers(const json& j, const std::string& path) {
  expect_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], index(path, i)));
  return out;
}

template <class E>
E enum_value(const json& j, std::string_view key, const std::string& path) {
  return parse_enum<E>(text(j, key, path), join(path, key));
}

template <class E>
json enum_map(const EnumArray<E>& a) {
  json j = json::object();
  for (auto e : all_values<E>()) j[std::string(to_string(e))] = a[e];
  return j;
}

template <class E>
EnumArray<E> parse_enum_map(const json& j, const std::string& path) {
  expect_object(j, path);
  EnumArray<E> out;
  for (const auto& [key, v] : j.items()) out[parse_enum<E>(key, join(path, key))] = as_number(v, join(path, key));
  return out;
}

template <class R, class C>
json enum_matrix(const EnumMatrix<R, C>& m) {
  json j = json::object();
  for (auto r : all_values<R>()) j[std::string(to_string(r))] = enum_map(m[r]);
  return j;
}

template <class R, class C>
EnumMatrix<R, C> parse_enum_matrix(const json& j, const std::string& path) {
  expect_object(j, path);
  EnumMatrix<R, C> out{};
  for (const auto& [key, v] : j.items()) out[parse_enum<R>(key, join(path, key))] = parse_enum_map<C>(v, join(path, key));
  return out;
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Config pieces
// ---------------------------------------------------------------------------

inline json contract_terms_to_json(const ContractTerms& terms) {
  json j = {{"type", std::string(contract_kind(terms))}};
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PerformanceBased>) {
          j["pm_at_zero"] = t.pm_at_zero;
          j["zero_profit_overrun_frac"] = t.zero_profit_overrun_frac;
        } else if constexpr (std::is_same_v<T, FixedPrice>) {
          j["contingency_frac"] = t.contingency_frac;
          j["pm_at_contingency"] = t.pm_at_contingency;
        } else {
          j["pm"] = t.pm;
        }
      },
      terms);
  return j;
}

/// Missing numeric fields take the default terms of that contract type.
inline ContractTerms contract_terms_from_json(const json& j, const std::string& path = "terms") {
  using namespace io_detail;
  const std::string type = text(j, "type", path);
  ContractTerms out;
  if (type == "performance_based") {
    check_keys(j, path, {"type", "pm_at_zero", "zero_profit_overrun_frac"});
    PerformanceBased t;
    t.pm_at_zero = number_or(j, "pm_at_zero", path, t.pm_at_zero);
    t.zero_profit_overrun_frac = number_or(j, "zero_profit_overrun_frac", path, t.zero_profit_overrun_frac);
    out = t;
  } else if (type == "fixed_price") {
    check_keys(j, path, {"type", "contingency_frac", "pm_at_contingency"});
    FixedPrice t;
    t.contingency_frac = number_or(j, "contingency_frac", path, t.contingency_frac);
    t.pm_at_contingency = number_or(j, "pm_at_contingency", path, t.pm_at_contingency);
    out = t;
  } else if (type == "cost_plus") {
    check_keys(j, path, {"type", "pm"});
    CostPlus t;
    t.pm = number_or(j, "pm", path, t.pm);
    out = t;
  } else {
    throw ConfigError(io_detail::join(path, "type"), "unknown contract type '" + type + "'");
  }
  validate_terms(out, path);
  return out;
}

inline json responsibility_matrix_to_json(const ResponsibilityMatrix& m) {
  json cats = json::array();
  for (const auto& c : m.categories) {
    json capable = json::array();
    for (auto s : all_values<Stakeholder>())
      if (c.capable[s]) capable.push_back(std::string(to_string(s)));
    cats.push_back({{"name", c.name}, {"hours_per_week", c.hours_per_week}, {"capable", capable}});
  }
  return {{"categories", cats}};
}

inline ResponsibilityMatrix responsibility_matrix_from_json(const json& j,
                                                            const std::string& path = "responsibility_matrix") {
  using namespace io_detail;
  check_keys(j, path, {"categories"});
  const std::string cats_path = join(path, "categories");
  const json& cats = require(j, "categories", path);
  expect_array(cats, cats_path);
  ResponsibilityMatrix m;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const std::string p = index(cats_path, i);
    check_keys(cats[i], p, {"name", "hours_per_week", "capable"});
    ResponsibilityCategory c;
    c.name = text(cats[i], "name", p);
    c.hours_per_week = number(cats[i], "hours_per_week", p);
    const json& capable = require(cats[i], "capable", p);
    expect_array(capable, join(p, "capable"));
    for (std::size_t k = 0; k < capable.size(); ++k) {
      const std::string cp = index(join(p, "capable"), k);
      if (!capable[k].is_string()) throw ConfigError(cp, "expected a stakeholder name");
      c.capable[parse_enum<Stakeholder>(capable[k].get<std::string>(), cp)] = true;
    }
    m.categories.push_back(std::move(c));
  }
  m.validate(path);
  return m;
}

inline json overrun_params_to_json(const OverrunModelParams& p) {
  return {{"rho_c", p.rho_c},         {"rho_ae", p.rho_ae},           {"rho_d", p.rho_d},
          {"lambda_lp", p.lambda_lp}, {"sigma_sched", p.sigma_sched}, {"scd_months_per_plant", p.scd_months_per_plant}};
}

inline OverrunModelParams overrun_params_from_json(const json& j, const std::string& path = "overrun_params") {
  using namespace io_detail;
  check_keys(j, path, {"rho_c", "rho_ae", "rho_d", "lambda_lp", "sigma_sched", "scd_months_per_plant"});
  OverrunModelParams p;
  p.rho_c = number(j, "rho_c", path);
  p.rho_ae = number(j, "rho_ae", path);
  p.rho_d = number(j, "rho_d", path);
  p.lambda_lp = number(j, "lambda_lp", path);
  p.sigma_sched = number(j, "sigma_sched", path);
  p.scd_months_per_plant = numbers(require(j, "scd_months_per_plant", path), join(path, "scd_months_per_plant"));
  return p;
}

// ---------------------------------------------------------------------------
// ScenarioConfig
// ---------------------------------------------------------------------------

inline json config_to_json(const ScenarioConfig& c) {
  using namespace io_detail;
  json occ0 = json::object();
  for (auto a : all_values<Account>()) occ0[std::string(to_string(a))] = enum_map(c.baseline.occ0[a]);
  json levers = json::array();
  for (const auto& l : c.lever_schedule.per_plant) levers.push_back({{"cp", l.cp}, {"aep", l.aep}, {"dc", l.dc}});
  json contracts = json::array();
  for (const auto& a : c.contracts)
    contracts.push_back({{"stakeholder", std::string(to_string(a.stakeholder))}, {"terms", contract_terms_to_json(a.terms)}});
  json position = json::object();
  for (auto s : kNonCreditors) position[std::string(to_string(s))] = c.responsibility_position[s];

  json j;
  j["scenario_name"] = c.scenario_name;
  j["n_plants"] = c.n_plants;
  j["baseline"] = {{"plant_capacity_kwe", c.baseline.plant_capacity_kwe},
                   {"tc0_months", c.baseline.tc0_months},
                   {"ts0_months", c.baseline.ts0_months},
                   {"indirect_subcontractor_share", c.baseline.indirect_subcontractor_share},
                   {"occ0", occ0}};
  j["baseline_learning"] = c.baseline_learning;
  j["lever_schedule"] = levers;
  j["overrun_params"] = overrun_params_to_json(c.overrun_params);
  j["financing"] = {{"rate", c.financing.rate}, {"time_step_months", c.financing.time_step_months}};
  j["contracts"] = contracts;
  j["responsibility_matrix"] = responsibility_matrix_to_json(c.responsibility_matrix);
  j["responsibility_position"] = position;
  return j;
}

/// `base_dir` resolves a responsibility matrix given as a relative file name.
inline ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {});

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.filename().string(), std::string("malformed JSON: ") + e.what());
  }
}

inline ScenarioConfig config_from_json(const json& j, const std::filesystem::path& base_dir) {
  using namespace io_detail;
  check_keys(j, "",
             {"scenario_name", "n_plants", "baseline", "baseline_learning", "lever_schedule", "overrun_params",
              "financing", "contracts", "responsibility_matrix", "responsibility_position"});
  ScenarioConfig c;
  c.scenario_name = text(j, "scenario_name", "");
  c.n_plants = count(j, "n_plants", "");

  const json& b = require(j, "baseline", "");
  check_keys(b, "baseline", {"plant_capacity_kwe", "tc0_months", "ts0_months", "indirect_subcontractor_share", "occ0"});
  c.baseline.plant_capacity_kwe = number(b, "plant_capacity_kwe", "baseline");
  c.baseline.tc0_months = number(b, "tc0_months", "baseline");
  c.baseline.ts0_months = number(b, "ts0_months", "baseline");
  c.baseline.indirect_subcontractor_share =
      number_or(b, "indirect_subcontractor_share", "baseline", kDefaultIndirectSubcontractorShare);
  c.baseline.occ0 = parse_enum_matrix<Account, CostElement>(require(b, "occ0", "baseline"), "baseline.occ0");

  if (j.contains("baseline_learning")) c.baseline_learning = numbers(j["baseline_learning"], "baseline_learning");

  const json& levers = require(j, "lever_schedule", "");
  expect_array(levers, "lever_schedule");
  for (std::size_t i = 0; i < levers.size(); ++i) {
    const std::string p = index("lever_schedule", i);
    check_keys(levers[i], p, {"cp", "aep", "dc"});
    c.lever_schedule.per_plant.push_back({number(levers[i], "cp", p), number(levers[i], "aep", p), number(levers[i], "dc", p)});
  }

  c.overrun_params = overrun_params_from_json(require(j, "overrun_params", ""));

  if (j.contains("financing")) {
    const json& f = j["financing"];
    check_keys(f, "financing", {"rate", "time_step_months"});
    c.financing.rate = number_or(f, "rate", "financing", c.financing.rate);
    c.financing.time_step_months = number_or(f, "time_step_months", "financing", c.financing.time_step_months);
  }

  if (j.contains("contracts")) {
    const json& cs = j["contracts"];
    expect_array(cs, "contracts");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string p = index("contracts", i);
      check_keys(cs[i], p, {"stakeholder", "terms"});
      c.contracts.push_back({enum_value<Stakeholder>(cs[i], "stakeholder", p),
                             contract_terms_from_json(require(cs[i], "terms", p), join(p, "terms"))});
    }
  }

  if (j.contains("responsibility_matrix")) {
    const json& m = j["responsibility_matrix"];
    if (m.is_string()) {
      std::filesystem::path file = m.get<std::string>();
      if (file.is_relative()) file = base_dir / file;
      c.responsibility_matrix = responsibility_matrix_from_json(read_json_file(file));
    } else {
      c.responsibility_matrix = responsibility_matrix_from_json(m);
    }
  }

  if (j.contains("responsibility_position")) {
    const json& pos = j["responsibility_position"];
    expect_object(pos, "responsibility_position");
    for (const auto& [key, v] : pos.items()) {
      const std::string p = join("responsibility_position", key);
      const auto s = parse_enum<Stakeholder>(key, p);
      if (s == Stakeholder::Creditors) throw ConfigError(p, "creditors have no responsibility position");
      c.responsibility_position[s] = as_number(v, p);
    }
  }

  c.validate();
  return c;
}

inline ScenarioConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

/// Pretty JSON with a trailing newline.
inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Bundled config directory: $OVERRUN_CONFIG_DIR if set, else `fallback`.
inline std::filesystem::path config_dir(const std::filesystem::path& fallback) {
  if (const char* env = std::getenv(kConfigDirEnv); env != nullptr && *env != '\0') return env;
  return fallback;
}

/// Replaces `overrun_params` in a config document, keeping everything else as written.
inline void write_overrun_params(const std::filesystem::path& path, const OverrunModelParams& params) {
  json j = read_json_file(path);
  j["overrun_params"] = overrun_params_to_json(params);
  write_text_file(path, dump(j));
}

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

inline json sankey_to_json(const SankeyFlows& f) {
  using namespace io_detail;
  json links = json::array();
  for (const auto& l : f.links()) links.push_back({{"source", l.source}, {"target", l.target}, {"value", l.value}});
  return {{"causer_to_type", enum_matrix(f.causer_to_type)},
          {"type_to_recipient", enum_matrix(f.type_to_recipient)},
          {"links", links}};
}

inline json attribution_to_json(const AttributionResult& a) {
  using namespace io_detail;
  return {{"cost_by_causer_and_type", enum_matrix(a.cost_by_causer_and_type)},
          {"cost_by_type_and_recipient", enum_matrix(a.cost_by_type_and_recipient)},
          {"schedule_by_causer_and_type", enum_matrix(a.schedule_by_causer_and_type)}};
}

inline AttributionResult attribution_from_json(const json& j, const std::string& path) {
  using namespace io_detail;
  AttributionResult a;
  a.cost_by_causer_and_type = parse_enum_matrix<Stakeholder, CostOverrunType>(
      require(j, "cost_by_causer_and_type", path), join(path, "cost_by_causer_and_type"));
  a.cost_by_type_and_recipient = parse_enum_matrix<CostOverrunType, Stakeholder>(
      require(j, "cost_by_type_and_recipient", path), join(path, "cost_by_type_and_recipient"));
  a.schedule_by_causer_and_type = parse_enum_matrix<Stakeholder, ScheduleOverrunType>(
      require(j, "schedule_by_causer_and_type", path), join(path, "schedule_by_causer_and_type"));
  return a;
}

inline json plant_result_to_json(const PlantResult& r) {
  using namespace io_detail;
  const auto& t = r.overrun_totals;
  json outcomes = json::array();
  for (const auto& o : r.contract_outcomes) {
    const auto& f = o.flags;
    outcomes.push_back({
        {"stakeholder", std::string(to_string(o.stakeholder))},
        {"terms", contract_terms_to_json(o.terms)},
        {"scope", {{"we", o.scope.we}, {"or_caused", o.scope.or_caused}, {"or_received", o.scope.or_received}}},
        {"profit_cause", o.profit_cause},
        {"profit_recipient", o.profit_recipient},
        {"delta", o.delta},
        {"flags",
         {{"delta", f.delta},
          {"delta_sign", f.delta_sign},
          {"cause_in_zero_profit_region", f.cause_in_zero_profit_region},
          {"recipient_in_zero_profit_region", f.recipient_in_zero_profit_region},
          {"slope_sign_at_recipient", f.slope_sign_at_recipient},
          {"litigation_risk_against_causers", f.litigation_risk_against_causers}}},
    });
  }
  StakeholderValues caused, received;
  for (auto s : all_values<Stakeholder>()) {
    caused[s] = r.attribution.caused_by(s);
    received[s] = r.attribution.received_by(s);
  }

  json j;
  j["plant_index"] = r.plant_index;
  j["plant_capacity_kwe"] = r.plant_capacity_kwe;
  j["baseline_occ"] = r.baseline_occ;
  j["baseline_financing"] = r.baseline_financing;
  j["baseline_tci"] = r.baseline_tci;
  j["baseline_scope"] = enum_map(r.baseline_scope);
  j["levers"] = {{"cp", r.levers.cp}, {"aep", r.levers.aep}, {"dc", r.levers.dc}};
  j["rework_factors"] = {{"r_c", r.rework_factors.r_c},
                         {"r_ae", r.rework_factors.r_ae},
                         {"r_design", r.rework_factors.r_design}};
  j["overrun_totals"] = {{"dc_rework", t.dc_rework}, {"dc_lp", t.dc_lp}, {"dt_rework", t.dt_rework},
                         {"dt_lp", t.dt_lp},         {"dt_scd", t.dt_scd}};
  j["financing_overrun"] = r.financing_overrun;
  j["attribution"] = attribution_to_json(r.attribution);
  j["schedule"] = {{"tc0", r.schedule.tc0}, {"dt_total", r.schedule.dt_total}, {"ts", r.schedule.ts}};
  j["contract_outcomes"] = outcomes;
  // Derived, for consumers that must not recompute engine math.
  j["occ"] = r.occ();
  j["total_overrun"] = r.total_overrun();
  j["tci"] = r.tci();
  j["caused_by"] = enum_map(caused);
  j["received_by"] = enum_map(received);
  j["sankey"] = sankey_to_json(sankey_flows(r));
  return j;
}

inline PlantResult plant_result_from_json(const json& j, const std::string& path = "plant") {
  using namespace io_detail;
  PlantResult r;
  r.plant_index = count(j, "plant_index", path);
  r.plant_capacity_kwe = number(j, "plant_capacity_kwe", path);
  r.baseline_occ = number(j, "baseline_occ", path);
  r.baseline_financing = number(j, "baseline_financing", path);
  r.baseline_tci = number(j, "baseline_tci", path);
  r.baseline_scope = parse_enum_map<Stakeholder>(require(j, "baseline_scope", path), join(path, "baseline_scope"));
  const json& l = require(j, "levers", path);
  r.levers = {number(l, "cp", join(path, "levers")), number(l, "aep", join(path, "levers")),
              number(l, "dc", join(path, "levers"))};
  const json& f = require(j, "rework_factors", path);
  const std::string fp = join(path, "rework_factors");
  r.rework_factors = {number(f, "r_c", fp), number(f, "r_ae", fp), number(f, "r_design", fp)};
  const json& t = require(j, "overrun_totals", path);
  const std::string tp = join(path, "overrun_totals");
  r.overrun_totals = {number(t, "dc_rework", tp), number(t, "dc_lp", tp), number(t, "dt_rework", tp),
                      number(t, "dt_lp", tp), number(t, "dt_scd", tp)};
  r.financing_overrun = number(j, "financing_overrun", path);
  r.attribution = attribution_from_json(require(j, "attribution", path), join(path, "attribution"));
  const json& s = require(j, "schedule", path);
  const std::string sp = join(path, "schedule");
  r.schedule = {number(s, "tc0", sp), number(s, "dt_total", sp), number(s, "ts", sp)};
  const json& outcomes = require(j, "contract_outcomes", path);
  expect_array(outcomes, join(path, "contract_outcomes"));
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const std::string op = index(join(path, "contract_outcomes"), i);
    const json& o = outcomes[i];
    ContractOutcome c;
    c.stakeholder = enum_value<Stakeholder>(o, "stakeholder", op);
    c.terms = contract_terms_from_json(require(o, "terms", op), join(op, "terms"));
    const json& sc = require(o, "scope", op);
    const std::string scp = join(op, "scope");
    c.scope = {number(sc, "we", scp), number(sc, "or_caused", scp), number(sc, "or_received", scp)};
    c.profit_cause = number(o, "profit_cause", op);
    c.profit_recipient = number(o, "profit_recipient", op);
    c.delta = number(o, "delta", op);
    const json& fl = require(o, "flags", op);
    const std::string flp = join(op, "flags");
    c.flags.delta = number(fl, "delta", flp);
    c.flags.delta_sign = static_cast<int>(number(fl, "delta_sign", flp));
    c.flags.cause_in_zero_profit_region = boolean(fl, "cause_in_zero_profit_region", flp);
    c.flags.recipient_in_zero_profit_region = boolean(fl, "recipient_in_zero_profit_region", flp);
    c.flags.slope_sign_at_recipient = static_cast<int>(number(fl, "slope_sign_at_recipient", flp));
    c.flags.litigation_risk_against_causers = boolean(fl, "litigation_risk_against_causers", flp);
    r.contract_outcomes.push_back(std::move(c));
  }
  return r;
}

inline json aggregate_to_json(const AggregateResult& a) {
  using namespace io_detail;
  return {{"n_plants", a.n_plants},
          {"attribution", attribution_to_json(a.attribution)},
          {"cost_type_totals", enum_map(a.cost_type_totals)},
          {"schedule_type_totals", enum_map(a.schedule_type_totals)}};
}

/// Full results document. Empty series give an empty plant list and a null aggregate.
inline json results_to_json(const std::string& scenario_name, const std::vector<PlantResult>& results) {
  json plants = json::array();
  for (const auto& r : results) plants.push_back(plant_result_to_json(r));
  json j;
  j["scenario_name"] = scenario_name;
  j["metadata"] = {{"currency", "USD (2024)"},
                   {"plant_capacity_kwe", results.empty() ? json(nullptr) : json(results.front().plant_capacity_kwe)},
                   {"n_plants", results.size()}};
  j["plants"] = plants;
  j["aggregate"] = results.empty() ? json(nullptr) : aggregate_to_json(aggregate(results));
  return j;
}

inline std::vector<PlantResult> results_from_json(const json& j) {
  using namespace io_detail;
  const json& plants = require(j, "plants", "");
  expect_array(plants, "plants");
  std::vector<PlantResult> out;
  for (std::size_t i = 0; i < plants.size(); ++i) out.push_back(plant_result_from_json(plants[i], index("plants", i)));
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kCsvHeader = "plant_index,ledger,stakeholder,overrun_type,usd,usd_per_kwe\n";
inline constexpr std::size_t kCsvRowsPerPlant = 2 * enum_size<Stakeholder> * enum_size<CostOverrunType>;

inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// One row per (plant, caused|received, stakeholder, overrun type).
inline std::string results_to_csv(const std::vector<PlantResult>& results) {
  std::string out(kCsvHeader);
  auto row = [&](const PlantResult& r, std::string_view ledger, Stakeholder s, CostOverrunType t, double usd) {
    out += std::to_string(r.plant_index);
    out += ',';
    out += ledger;
    out += ',';
    out += to_string(s);
    out += ',';
    out += to_string(t);
    out += ',';
    out += format_number(usd);
    out += ',';
    out += format_number(r.per_kwe(usd));
    out += '\n';
  };
  for (const auto& r : results) {
    for (auto s : all_values<Stakeholder>())
      for (auto t : all_values<CostOverrunType>()) row(r, "caused", s, t, r.attribution.cost_by_causer_and_type[s][t]);
    for (auto s : all_values<Stakeholder>())
      for (auto t : all_values<CostOverrunType>())
        row(r, "received", s, t, r.attribution.cost_by_type_and_recipient[t][s]);
  }
  return out;
}

}  // namespace overrun
