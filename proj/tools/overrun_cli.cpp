#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "overrun/overrun.hpp"
#include "overrun/service.hpp"

#ifndef OVERRUN_DATA_DIR
#define OVERRUN_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace overrun;

namespace {

fs::path default_dir() { return config_dir(OVERRUN_DATA_DIR); }

// Accepts a path, or a bundled scenario name such as "us-experience".
fs::path resolve_config(const std::string& arg) {
  fs::path p = arg;
  if (fs::exists(p)) return p;
  for (fs::path candidate : {default_dir() / p, default_dir() / (arg + ".json")})
    if (fs::exists(candidate)) return candidate;
  throw IoError("config not found: " + arg + " (also looked in " + default_dir().string() + ")");
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << text;
  else
    write_text_file(out, text);
}

CalibrationAnchors parse_anchors(const std::string& spec) {
  CalibrationAnchors a;
  std::map<std::string, double> kv;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const std::size_t comma = std::min(spec.find(',', pos), spec.size());
    const std::string item = spec.substr(pos, comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("anchors", "expected key=value, got '" + item + "'");
    try {
      kv[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("anchors." + item.substr(0, eq), "not a number");
    }
    pos = comma + 1;
  }
  for (const auto& [k, v] : kv) {
    if (k == "foak")
      a.foak_overrun_per_kwe = v;
    else if (k == "tenoak")
      a.tenoak_overrun_per_kwe = v;
    else if (k == "duration")
      a.foak_duration_months = v;
    else
      throw ConfigError("anchors." + k, "unknown anchor (foak, tenoak, duration)");
  }
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nuclear construction cost-overrun attribution and contract analysis"};
  app.require_subcommand(1);

  std::string config_arg, format = "json", out;
  auto* run = app.add_subcommand("run", "Run a deployment series and export the results");
  run->add_option("config", config_arg, "Scenario config (path or bundled name)")->required();
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--out", out, "Output file (default stdout)");

  std::string anchors_arg = "foak=9500,tenoak=3120,duration=119";
  bool write_back = false;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the overrun model to FOAK / 10-OAK anchors");
  calibrate->add_option("config", config_arg, "Template config")->required();
  calibrate->add_option("--anchors", anchors_arg, "foak=$/kWe,tenoak=$/kWe[,duration=months]");
  calibrate->add_flag("--write", write_back, "Store the fitted params in the config file");

  std::size_t plant = 1;
  auto* sankey = app.add_subcommand("sankey", "Causer -> type -> recipient flows for one plant");
  sankey->add_option("config", config_arg, "Scenario config")->required();
  sankey->add_option("--plant", plant, "1-based plant index")->check(CLI::PositiveNumber);

  double occ = 0, cfin = 0, tc = 0, ts = 0, step = 1.0;
  auto* rate = app.add_subcommand("rate", "Back-calculate the financing rate");
  rate->add_option("--occ", occ, "Overnight capital cost")->required();
  rate->add_option("--cfin", cfin, "Target financing cost (same units)")->required();
  rate->add_option("--tc", tc, "Construction months")->required();
  rate->add_option("--ts", ts, "Startup months")->required();
  rate->add_option("--step", step, "Time step, months");

  int port = 8080;
  std::string host = "127.0.0.1", dir;
  auto* serve = app.add_subcommand("serve", "Start the scenario-evaluation HTTP API");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--config-dir", dir, std::string("Bundled configs (default $") + kConfigDirEnv + ")");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ScenarioConfig cfg = load_config(resolve_config(config_arg));
      const auto results = run_scenario(cfg);
      emit(format == "csv" ? results_to_csv(results) : dump(results_to_json(cfg.scenario_name, results)), out);
    } else if (*calibrate) {
      const fs::path path = resolve_config(config_arg);
      const auto report = calibrate_reference_model_report(parse_anchors(anchors_arg), load_config(path));
      json j = {{"overrun_params", overrun_params_to_json(report.params)},
                {"iterations", report.iterations},
                {"relative_residuals", report.relative_residuals},
                {"fixed_cp_foak_overrun_per_kwe", report.foak_overrun_per_kwe},
                {"fixed_cp_tenoak_overrun_per_kwe", report.tenoak_overrun_per_kwe},
                {"foak_duration_months", report.foak_duration_months}};
      std::cout << dump(j);
      if (write_back) {
        write_overrun_params(path, report.params);
        std::cerr << "wrote overrun_params to " << path.string() << "\n";
      }
    } else if (*sankey) {
      const ScenarioConfig cfg = load_config(resolve_config(config_arg));
      if (plant > cfg.n_plants) throw ConfigError("--plant", "series has " + std::to_string(cfg.n_plants) + " plants");
      const auto results = run_scenario(cfg);
      const auto& r = results.at(plant - 1);
      json j = sankey_to_json(sankey_flows(r));
      j["plant_index"] = plant;
      j["plant_capacity_kwe"] = r.plant_capacity_kwe;
      std::cout << dump(j);
    } else if (*rate) {
      std::cout << dump({{"rate", back_calculate_rate(occ, cfin, {tc, ts}, step)}});
    } else if (*serve) {
      const auto defaults = service::Defaults::load(dir.empty() ? default_dir() : fs::path(dir));
      httplib::Server server;
      service::register_routes(server, defaults);
      std::cerr << "listening on http://" << host << ":" << port << "\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << "\n  residuals:";
    for (double r : e.residuals()) std::cerr << " " << r;
    std::cerr << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
