#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpa/errors.hpp"
#include "dpa/optimizer.hpp"
#include "dpa/report.hpp"
#include "dpa/scenario_io.hpp"
#include "dpa/verification.hpp"

namespace {

using dpa::InputError;
using ojson = nlohmann::ordered_json;

void flatten(const ojson& node, const std::string& prefix, dpa::CsvDoc& csv) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) {
      const std::string key =
          prefix.empty() ? it.key() : prefix + "." + it.key();
      flatten(it.value(), key, csv);
    }
    return;
  }
  if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten(node[i], prefix + "." + std::to_string(i), csv);
    }
    return;
  }
  std::string value;
  if (node.is_string()) {
    value = node.get<std::string>();
  } else if (node.is_boolean()) {
    value = node.get<bool>() ? "true" : "false";
  } else if (node.is_number_float()) {
    value = dpa::format_number(node.get<double>());
  } else if (node.is_number_unsigned()) {
    value = std::to_string(node.get<std::uint64_t>());
  } else if (node.is_number_integer()) {
    value = std::to_string(node.get<std::int64_t>());
  } else {
    value = "null";
  }
  csv.add_row({prefix, value});
}

void emit_report(const ojson& doc, const std::string& format,
                 const std::string& out_path) {
  std::string content;
  if (format == "json") {
    content = dpa::to_deterministic_json(doc);
  } else if (format == "csv") {
    dpa::CsvDoc csv;
    csv.add_row({"key", "value"});
    flatten(doc, "", csv);
    content = csv.str();
  } else {
    throw InputError("unknown report format '" + format + "'");
  }
  if (out_path.empty()) {
    std::cout << content;
  } else {
    dpa::write_text_file(out_path, content);
  }
}

ojson best_response_json(double cost, const dpa::BestResponseReport& br) {
  ojson j;
  j["cost"] = cost;
  j["candidate_price"] = br.candidate_price;
  j["candidate_utility"] = br.candidate_utility;
  j["max_gain"] = br.max_gain;
  j["gain_se"] = br.gain_se;
  j["best_deviation"] = br.best_deviation;
  j["samples"] = static_cast<std::uint64_t>(br.samples);
  j["positive_gain_samples"] =
      static_cast<std::uint64_t>(br.positive_gain_samples);
  j["pass"] = br.pass;
  return j;
}

ojson violation_json(const dpa::ViolationReport& r) {
  ojson j;
  j["check"] = r.check;
  j["pass"] = r.pass;
  j["worst"] = r.worst;
  j["tolerance"] = r.tolerance;
  j["instances"] = static_cast<std::uint64_t>(r.instances);
  j["violations"] = static_cast<std::uint64_t>(r.violations);
  return j;
}

// Exact subset of the scenario grid with at most max_points points, stride
// over indices so every emitted price is bit-identical to a grid point.
dpa::PriceGrid strided_grid(const dpa::PriceGrid& grid,
                            std::size_t max_points) {
  if (grid.points <= max_points) return grid;
  std::size_t stride = (grid.points - 1 + max_points - 2) / (max_points - 1);
  std::size_t points = (grid.points - 1) / stride + 1;
  dpa::PriceGrid out = grid;
  out.points = points;
  // Rebuild bounds so point(k) of the sub-grid matches point(k*stride).
  out.upper = grid.point((points - 1) * stride);
  return out;
}

int cmd_run(const std::string& scenario_path,
            std::optional<std::uint64_t> seed,
            std::optional<std::size_t> samples, const std::string& format,
            const std::string& out_path) {
  dpa::ScenarioDoc doc = dpa::load_scenario_file(scenario_path);
  if (doc.broken) {
    throw InputError("mechanism family '" + doc.family +
                     "' is a verification fixture; only `verify` accepts it");
  }
  dpa::apply_overrides(doc, seed, samples);
  const dpa::SimStats stats = dpa::run_experiment(doc.scenario);

  ojson report;
  report["command"] = "run";
  report["scenario_file"] = scenario_path;
  report["config"] = doc.config;
  ojson s;
  s["samples"] = static_cast<std::uint64_t>(stats.samples);
  s["revenue"] = stats.revenue;
  s["revenue_se"] = stats.revenue_se;
  s["welfare"] = stats.welfare;
  s["welfare_se"] = stats.welfare_se;
  s["sale_probability"] = stats.sale_probability;
  s["win_frequency"] = stats.win_frequency;
  report["stats"] = std::move(s);
  emit_report(report, format, out_path);
  return 0;
}

int cmd_verify(const std::string& scenario_path, const std::string& checks_csv,
               std::optional<std::uint64_t> seed,
               std::optional<std::size_t> samples, const std::string& format,
               const std::string& out_path) {
  dpa::ScenarioDoc doc = dpa::load_scenario_file(scenario_path);
  dpa::apply_overrides(doc, seed, std::nullopt);

  static const std::vector<std::string> all_checks = {
      "ic", "ir", "wbb", "mono", "payment", "efrp", "ef", "rev-eq"};
  std::vector<std::string> checks;
  if (checks_csv.empty()) {
    checks = all_checks;
  } else {
    std::stringstream ss(checks_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (std::find(all_checks.begin(), all_checks.end(), item) ==
          all_checks.end()) {
        throw InputError("unknown check name '" + item + "'");
      }
      checks.push_back(item);
    }
    if (checks.empty()) throw InputError("empty check list");
  }

  const std::size_t instances = samples.value_or(1000);
  const std::size_t deviation_grid = 50;
  const std::size_t cost_grid = 101;
  const std::size_t rev_eq_samples = doc.scenario.samples;
  const std::uint64_t run_seed = doc.scenario.seed;

  const dpa::CheckTarget target =
      dpa::target_by_name(doc.family, doc.scenario.mechanism);
  const auto& advs = doc.scenario.advertisers;

  ojson results = ojson::array();
  bool all_pass = true;
  for (const std::string& check : checks) {
    if (check == "rev-eq") {
      if (doc.broken) {
        throw InputError(
            "rev-eq requires an IC and IR mechanism; verification fixtures "
            "are not eligible");
      }
      std::vector<double> prices;
      if (doc.scenario.price_mode == dpa::PriceMode::Fixed) {
        prices = doc.scenario.fixed_prices;
      } else if (doc.scenario.price_mode == dpa::PriceMode::PiEquilibrium) {
        prices = *doc.scenario.mechanism.pia_prices;
      } else {
        throw InputError(
            "rev-eq needs exogenous display prices (fixed or pi-equilibrium "
            "mode)");
      }
      const dpa::EquivalenceReport eq = dpa::revenue_equivalence_check(
          doc.scenario.mechanism, advs, prices, rev_eq_samples, run_seed);
      ojson j;
      j["check"] = "rev-eq";
      j["pass"] = eq.pass;
      j["revenue"] = eq.revenue;
      j["revenue_se"] = eq.revenue_se;
      j["virtual_welfare"] = eq.virtual_welfare;
      j["virtual_welfare_se"] = eq.virtual_welfare_se;
      j["difference"] = eq.difference;
      j["difference_se"] = eq.difference_se;
      j["samples"] = static_cast<std::uint64_t>(eq.samples);
      results.push_back(std::move(j));
      all_pass = all_pass && eq.pass;
      continue;
    }
    dpa::ViolationReport r;
    if (check == "ic") {
      r = dpa::ic_check(target, advs, instances, deviation_grid, run_seed);
    } else if (check == "ir") {
      r = dpa::ir_check(target, advs, instances, run_seed);
    } else if (check == "wbb") {
      r = dpa::wbb_check(target, advs, instances, run_seed);
    } else if (check == "mono") {
      r = dpa::monotonicity_check(target, advs, instances, cost_grid,
                                  run_seed);
    } else if (check == "payment") {
      r = dpa::payment_identity_check(target, advs, instances, run_seed);
    } else if (check == "efrp") {
      r = dpa::efrp_check(target, advs, instances, run_seed);
    } else {  // ef
      r = dpa::ef_check(advs, instances, doc.scenario.price_grid, run_seed);
    }
    results.push_back(violation_json(r));
    all_pass = all_pass && r.pass;
  }

  ojson report;
  report["command"] = "verify";
  report["scenario_file"] = scenario_path;
  report["config"] = doc.config;
  report["config"]["checks"] = checks;
  report["config"]["instances"] = static_cast<std::uint64_t>(instances);
  report["config"]["deviation_grid"] =
      static_cast<std::uint64_t>(deviation_grid);
  report["config"]["cost_grid"] = static_cast<std::uint64_t>(cost_grid);
  report["config"]["rev_eq_samples"] =
      static_cast<std::uint64_t>(rev_eq_samples);
  report["results"] = std::move(results);
  report["all_pass"] = all_pass;
  emit_report(report, format, out_path);
  return all_pass ? 0 : 1;
}

int cmd_equilibrium(const std::string& scenario_path, std::string mode,
                    std::optional<std::uint64_t> seed,
                    std::optional<std::size_t> samples,
                    const std::string& format, const std::string& out_path) {
  dpa::ScenarioDoc doc = dpa::load_scenario_file(scenario_path);
  dpa::apply_overrides(doc, seed, std::nullopt);
  if (doc.broken) {
    throw InputError("mechanism family '" + doc.family +
                     "' is a verification fixture; only `verify` accepts it");
  }
  const auto family = doc.scenario.mechanism.family;
  if (mode.empty()) {
    switch (family) {
      case dpa::MechanismFamily::VwmPia: mode = "pi"; break;
      case dpa::MechanismFamily::WmRp:
      case dpa::MechanismFamily::Ama: mode = "ama"; break;
      default:
        throw InputError(
            "vwm-rp has no analytic equilibrium mode; pass --mode explicitly "
            "for a supported family");
    }
  }
  if (mode == "pi" && family != dpa::MechanismFamily::VwmPia) {
    throw InputError(
        "pi equilibrium mode requires a price-independent allocation "
        "(vwm-pia)");
  }
  if (mode == "ama" && family != dpa::MechanismFamily::WmRp &&
      family != dpa::MechanismFamily::Ama) {
    throw InputError("ama equilibrium mode requires the wm-rp or ama family");
  }
  if (mode != "pi" && mode != "ama") {
    throw InputError("unknown equilibrium mode '" + mode + "'");
  }

  const std::size_t br_samples = samples.value_or(2000);
  const dpa::PriceGrid br_grid = strided_grid(doc.scenario.price_grid, 201);
  const auto& advs = doc.scenario.advertisers;
  const std::vector<double> check_quantiles = {0.2, 0.5, 0.8};

  ojson report;
  report["command"] = "equilibrium";
  report["scenario_file"] = scenario_path;
  report["mode"] = mode;
  report["config"] = doc.config;
  report["config"]["best_response_samples"] =
      static_cast<std::uint64_t>(br_samples);
  report["config"]["best_response_points"] =
      static_cast<std::uint64_t>(br_grid.points);

  bool all_pass = true;
  if (mode == "pi") {
    ojson rows = ojson::array();
    const auto& pbar = *doc.scenario.mechanism.pia_prices;
    for (std::size_t i = 0; i < advs.size(); ++i) {
      ojson row;
      row["advertiser"] = static_cast<std::uint64_t>(i);
      row["price"] = pbar[i];
      ojson brs = ojson::array();
      for (double q : check_quantiles) {
        const double cost = advs[i].distribution->quantile(q);
        const dpa::BestResponseReport br = dpa::best_response_check(
            doc.scenario.mechanism, advs, i, cost, pbar[i], br_grid,
            br_samples, doc.scenario.seed);
        all_pass = all_pass && br.pass;
        brs.push_back(best_response_json(cost, br));
      }
      row["best_response"] = std::move(brs);
      rows.push_back(std::move(row));
    }
    report["prices"] = std::move(rows);
  } else {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < advs.size(); ++i) {
      ojson row;
      row["advertiser"] = static_cast<std::uint64_t>(i);
      ojson table = ojson::array();
      for (int t = 0; t <= 10; ++t) {
        const double cost =
            advs[i].distribution->quantile(static_cast<double>(t) / 10.0);
        ojson cell;
        cell["cost"] = cost;
        cell["price"] = dpa::ama_equilibrium_price(cost, *advs[i].conversion,
                                                   doc.scenario.price_grid);
        table.push_back(std::move(cell));
      }
      row["table"] = std::move(table);
      ojson brs = ojson::array();
      for (double q : check_quantiles) {
        const double cost = advs[i].distribution->quantile(q);
        const double candidate = dpa::ama_equilibrium_price(
            cost, *advs[i].conversion, doc.scenario.price_grid);
        const dpa::BestResponseReport br = dpa::best_response_check(
            doc.scenario.mechanism, advs, i, cost, candidate, br_grid,
            br_samples, doc.scenario.seed);
        all_pass = all_pass && br.pass;
        brs.push_back(best_response_json(cost, br));
      }
      row["best_response"] = std::move(brs);
      rows.push_back(std::move(row));
    }
    report["strategy"] = std::move(rows);
  }
  report["all_pass"] = all_pass;
  emit_report(report, format, out_path);
  return all_pass ? 0 : 1;
}

std::vector<double> parse_grid_values(const std::string& spec,
                                      const std::string& what) {
  // Either a single value "1" or a range "start:stop:step".
  std::vector<double> out;
  const std::size_t c1 = spec.find(':');
  try {
    if (c1 == std::string::npos) {
      out.push_back(std::stod(spec));
      return out;
    }
    const std::size_t c2 = spec.find(':', c1 + 1);
    if (c2 == std::string::npos) {
      throw InputError("grid spec for " + what +
                       " must be VALUE or START:STOP:STEP");
    }
    const double start = std::stod(spec.substr(0, c1));
    const double stop = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const double step = std::stod(spec.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) {
      throw InputError("grid spec for " + what +
                       " needs stop >= start and step > 0");
    }
    for (int k = 0;; ++k) {
      const double v = start + step * k;
      if (v > stop + 1e-12 * std::max(1.0, std::abs(stop))) break;
      out.push_back(v);
      if (out.size() > 10000) {
        throw InputError("grid spec for " + what + " has too many points");
      }
    }
    return out;
  } catch (const std::invalid_argument&) {
    throw InputError("cannot parse grid spec for " + what + ": '" + spec +
                     "'");
  } catch (const std::out_of_range&) {
    throw InputError("grid spec value out of range for " + what);
  }
}

int cmd_optimize(const std::string& scenario_path,
                 const std::string& grid_spec,
                 std::optional<std::uint64_t> seed,
                 std::optional<std::size_t> samples, const std::string& format,
                 const std::string& out_path) {
  dpa::ScenarioDoc doc = dpa::load_scenario_file(scenario_path);
  dpa::apply_overrides(doc, seed, std::nullopt);
  if (doc.scenario.mechanism.family != dpa::MechanismFamily::Ama) {
    throw InputError("optimize requires an ama scenario");
  }

  std::vector<double> weight_grid = {1.0};
  std::vector<double> boost_grid = parse_grid_values("-0.6:0.2:0.05", "b");
  if (!grid_spec.empty()) {
    std::stringstream ss(grid_spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      if (item.rfind("w=", 0) == 0) {
        weight_grid = parse_grid_values(item.substr(2), "w");
      } else if (item.rfind("b=", 0) == 0) {
        boost_grid = parse_grid_values(item.substr(2), "b");
      } else {
        throw InputError("grid spec entries must start with w= or b=");
      }
    }
  }
  const std::size_t search_samples = samples.value_or(50000);

  const dpa::AmaSearchReport search = dpa::ama_search(
      doc.scenario.advertisers, weight_grid, boost_grid, search_samples,
      doc.scenario.seed, doc.scenario.price_grid);

  ojson report;
  report["command"] = "optimize";
  report["scenario_file"] = scenario_path;
  report["config"] = doc.config;
  report["config"]["weight_grid"] = weight_grid;
  report["config"]["boost_grid"] = boost_grid;
  report["config"]["search_samples"] =
      static_cast<std::uint64_t>(search_samples);
  ojson evals = ojson::array();
  for (const auto& e : search.table) {
    ojson j;
    j["weights"] = e.params.weights;
    j["boosts"] = e.params.boosts;
    j["revenue"] = e.revenue;
    j["se"] = e.se;
    j["stage"] = e.stage;
    evals.push_back(std::move(j));
  }
  report["evaluations"] = std::move(evals);
  ojson best;
  best["weights"] = search.best.weights;
  best["boosts"] = search.best.boosts;
  best["revenue"] = search.best_revenue;
  best["se"] = search.best_se;
  report["incumbent"] = std::move(best);
  emit_report(report, format, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-slot ad auction laboratory with display prices"};
  app.require_subcommand(1);

  std::string scenario_path, out_path, checks_csv, grid_spec, mode;
  std::string format = "json";
  std::uint64_t seed_value = 0;
  std::size_t samples_value = 0;
  bool seed_given = false, samples_given = false;

  auto add_common = [&](CLI::App* cmd, bool positional_scenario = true) {
    if (positional_scenario) {
      cmd->add_option("scenario", scenario_path, "scenario file (JSON)")
          ->required();
    }
    cmd->add_option("--out", out_path, "output path (default: stdout)");
    cmd->add_option("--format", format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", seed_value, "override the scenario seed")
        ->each([&](const std::string&) { seed_given = true; });
    cmd->add_option("--samples", samples_value,
                    "override sample/instance counts")
        ->each([&](const std::string&) { samples_given = true; });
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run a Monte Carlo experiment");
  add_common(run_cmd);
  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the mechanism property checks");
  add_common(verify_cmd);
  verify_cmd->add_option(
      "--checks", checks_csv,
      "comma list from ic,ir,wbb,mono,payment,efrp,ef,rev-eq");
  CLI::App* eq_cmd = app.add_subcommand(
      "equilibrium", "equilibrium display prices with best-response checks");
  add_common(eq_cmd);
  eq_cmd->add_option("--mode", mode, "pi or ama (default from the family)");
  CLI::App* opt_cmd =
      app.add_subcommand("optimize", "search affine maximizer parameters");
  add_common(opt_cmd);
  opt_cmd->add_option("--grid", grid_spec,
                      "parameter grids, e.g. w=1,b=-0.6:0.2:0.05");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::optional<std::uint64_t> seed =
      seed_given ? std::optional<std::uint64_t>(seed_value) : std::nullopt;
  const std::optional<std::size_t> samples =
      samples_given ? std::optional<std::size_t>(samples_value) : std::nullopt;

  try {
    if (run_cmd->parsed()) {
      return cmd_run(scenario_path, seed, samples, format, out_path);
    }
    if (verify_cmd->parsed()) {
      return cmd_verify(scenario_path, checks_csv, seed, samples, format,
                        out_path);
    }
    if (eq_cmd->parsed()) {
      return cmd_equilibrium(scenario_path, mode, seed, samples, format,
                             out_path);
    }
    if (opt_cmd->parsed()) {
      return cmd_optimize(scenario_path, grid_spec, seed, samples, format,
                          out_path);
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
