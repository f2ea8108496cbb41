#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpa/equilibrium.hpp"
#include "dpa/mechanisms.hpp"
#include "dpa/parallel.hpp"

namespace dpa {

enum class PriceMode { Fixed, PiEquilibrium, AmaEquilibrium };

std::string price_mode_name(PriceMode mode);

struct Scenario {
  std::vector<AdvertiserModel> advertisers;
  MechanismSpec mechanism;
  PriceMode price_mode = PriceMode::Fixed;
  std::vector<double> fixed_prices;  // used by PriceMode::Fixed
  PriceGrid price_grid;              // used by the equilibrium price modes
  std::size_t samples = 100000;
  std::uint64_t seed = 1;
  ExecPolicy exec;

  void validate() const;
};

struct SimStats {
  std::size_t samples = 0;
  double revenue = 0.0;
  double revenue_se = 0.0;  // NaN when samples == 1
  double welfare = 0.0;
  double welfare_se = 0.0;
  double sale_probability = 0.0;
  std::vector<double> win_frequency;
};

// Draws truthful cost profiles, resolves display prices per the price mode,
// executes the mechanism and aggregates revenue and welfare. Deterministic in
// (scenario, seed) for any worker count.
SimStats run_experiment(const Scenario& scenario);

struct ComparisonRow {
  std::string label;
  SimStats stats;
  bool common_draws = false;  // cost draws shared with row 0
};

// Runs each scenario; scenarios with equal seeds and identical advertiser
// lists share cost draws by construction (the draws depend only on seed,
// batch and advertiser index). Mismatches are flagged, not an error.
std::vector<ComparisonRow> compare(const std::vector<Scenario>& scenarios,
                                   const std::vector<std::string>& labels = {});

}  // namespace dpa
