#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "dpa/conversion.hpp"
#include "dpa/distributions.hpp"

namespace dpa {

// Monotone surrogate for zeta, built in quantile space where interior
// density gaps collapse to a point: H(q) = integral of zeta(quantile(u)) du
// on a uniform q-grid, lower convex hull of the points (q, H), hull-segment
// slopes as the surrogate. Grid points that stay hull vertices keep their
// exact zeta values (clamped between the adjacent segment slopes); points
// strictly inside an ironed segment take the segment slope, so the surrogate
// is constant there.
//
// Evaluation is keyed by cost through the knots quantile(q_k). Inside a
// zero-density gap the surrogate takes the value at the gap's upper edge:
// all gap reports then lose exactly like the type just above the gap, so
// winners' payment thresholds never stretch across a gap.
class IronedTransform {
 public:
  IronedTransform(DistPtr dist, std::vector<double> cost_knots,
                  std::vector<double> values, std::vector<bool> straddles);

  double zeta_tilde(double cost) const;          // non-decreasing in cost
  double zeta_tilde_at_quantile(double q) const;  // the q-grid view

  std::size_t grid_size() const { return values_.size(); }
  const std::vector<double>& grid_values() const { return values_; }
  const CostDistribution& distribution() const { return *dist_; }

 private:
  DistPtr dist_;
  std::vector<double> cost_knots_;  // quantile(q_k), non-decreasing
  std::vector<double> values_;      // surrogate on the uniform q-grid
  std::vector<bool> straddles_;     // knot interval crosses a density gap
};

using IroningPtr = std::shared_ptr<const IronedTransform>;

IroningPtr iron(const DistPtr& dist, std::size_t grid_size = 10001);

// rate(price) * (price - zeta_tilde(cost)); non-increasing in cost for every
// price, and equal to the plain virtual value wherever no ironing applied.
double ironed_virtual_value(const IronedTransform& transform, double cost,
                            double price, const ConversionCurve& conv);

}  // namespace dpa
