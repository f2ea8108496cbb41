#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dpa/mechanisms.hpp"
#include "dpa/parallel.hpp"

namespace dpa {

struct PriceGrid {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t points = 2001;

  void validate() const;
  double point(std::size_t k) const;
};

// Grid points of `grid` that fall inside the curve's price domain.
std::vector<double> admissible_prices(const PriceGrid& grid,
                                      const ConversionCurve& conv);

// argmax of the conversion rate over the grid; smallest price on ties.
// Dominant-strategy equilibrium price for price-independent allocations.
double pi_equilibrium_price(const ConversionCurve& conv,
                            const PriceGrid& grid);

// argmax of (p - cost) * rate(p); smallest price on ties. Dominant-strategy
// equilibrium price under affine maximizer allocations.
double ama_equilibrium_price(double cost, const ConversionCurve& conv,
                             const PriceGrid& grid);

using PriceStrategy = std::function<double(double cost)>;

// The family's analytic equilibrium strategy on the given grid.
PriceStrategy equilibrium_strategy(MechanismFamily family,
                                   const AdvertiserModel& advertiser,
                                   const PriceGrid& grid);

struct BestResponseReport {
  double candidate_price = 0.0;
  double candidate_utility = 0.0;   // Monte Carlo estimate
  double max_gain = 0.0;            // best estimated deviation gain
  double gain_se = 0.0;             // standard error of that paired gain
  double best_deviation = 0.0;      // deviation price attaining max_gain
  std::size_t samples = 0;
  std::size_t positive_gain_samples = 0;  // samples where some deviation wins
  bool pass = false;                // max_gain <= 3 * gain_se
};

// Monte Carlo check of the equilibrium condition for one advertiser at one
// cost: opponents draw costs from their laws and play `opponent_strategies`
// (the family's analytic equilibrium when empty); the advertiser's truthful
// utility at candidate_price is compared against every admissible grid price
// using common random numbers.
BestResponseReport best_response_check(
    const MechanismSpec& spec, const std::vector<AdvertiserModel>& advertisers,
    std::size_t advertiser, double cost, double candidate_price,
    const PriceGrid& grid, std::size_t samples, std::uint64_t seed,
    const std::vector<PriceStrategy>& opponent_strategies = {},
    const ExecPolicy& policy = {});

}  // namespace dpa
