#pragma once

#include <memory>
#include <string>

#include "dpa/rng.hpp"

namespace dpa {

// Private-cost law on [lower, upper]. cdf/density are total on the real line
// (0 below the support, cdf exactly 1 at and above the upper end). Sampling is
// inverse-cdf, so a given uniform stream always maps to the same costs.
class CostDistribution {
 public:
  virtual ~CostDistribution() = default;

  double lower() const { return lower_; }
  double upper() const { return upper_; }

  virtual double cdf(double cost) const = 0;
  virtual double density(double cost) const = 0;
  // Smallest cost c with cdf(c) >= u.
  virtual double quantile(double u) const = 0;
  virtual std::string kind() const = 0;

  double sample(RngStream& rng) const { return quantile(rng.uniform01()); }

 protected:
  CostDistribution(double lower, double upper);
  double lower_;
  double upper_;
};

using DistPtr = std::shared_ptr<const CostDistribution>;

DistPtr make_uniform(double lower, double upper);

// density proportional to exp(-alpha * (c - lower)) on [lower, upper].
DistPtr make_truncated_exponential(double lower, double upper, double alpha);

// Two uniform components [a1,b1] (weight w1) and [a2,b2] (weight 1-w1), with
// a1 <= a2 and b1 <= b2. Components may be disjoint (the density then has an
// interior gap) or overlapping (the density jumps).
DistPtr make_uniform_mixture(double w1, double a1, double b1, double a2,
                             double b2);

}  // namespace dpa
