#pragma once

#include <cstddef>

#include "dpa/conversion.hpp"
#include "dpa/distributions.hpp"

namespace dpa {

// Expected margin (price - cost) * rate(price) from winning the slot.
double value(double cost, double price, const ConversionCurve& conv);

// The cost c with value(c, price) == target; requires rate(price) > 0.
double value_inverse(double target, double price, const ConversionCurve& conv);

// density(cost) / cdf(cost); the lower support endpoint is excluded.
double reverse_hazard(const CostDistribution& dist, double cost);

// cdf/density with limit conventions: 0 at and below the lower endpoint,
// +infinity inside interior zero-density gaps (such reports can never win).
double information_rent(const CostDistribution& dist, double cost);

// cost + information_rent(cost). The virtual value factors through this:
// virtual value = rate(price) * (price - zeta(cost)) for every price.
double zeta(const CostDistribution& dist, double cost);

// value(cost, price) - rate(price) * cdf(cost)/density(cost).
double virtual_value(double cost, double price, const CostDistribution& dist,
                     const ConversionCurve& conv);

// Monotone bisection to absolute cost tolerance 1e-10. Requires the virtual
// value to be non-increasing in cost at this price; a non-monotone law is
// detected through the residual and reported as a regularity error.
double virtual_value_inverse(double target, double price,
                             const CostDistribution& dist,
                             const ConversionCurve& conv);

// boost + weight * value(cost, price).
double weighted_value(double cost, double price, const ConversionCurve& conv,
                      double weight, double boost);

// price - (target - boost) / (weight * rate(price)).
double weighted_value_inverse(double target, double price,
                              const ConversionCurve& conv, double weight,
                              double boost);

struct RegularityReport {
  bool regular = true;
  double worst_violation = 0.0;  // largest decrease of zeta between neighbors
  double worst_cost = 0.0;       // grid point where it occurs
  std::size_t grid_size = 0;
};

// Samples zeta on a uniform interior grid (the exact lower endpoint is
// excluded) and certifies that it never decreases by more than 1e-9. This is
// a sampled certificate, not a proof.
RegularityReport regularity_check(const CostDistribution& dist,
                                  std::size_t grid_size = 10001);

}  // namespace dpa
