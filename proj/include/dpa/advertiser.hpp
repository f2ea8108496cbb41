#pragma once

#include <cstddef>
#include <vector>

#include "dpa/conversion.hpp"
#include "dpa/distributions.hpp"
#include "dpa/ironing.hpp"

namespace dpa {

// One advertiser: cost law, conversion curve, and a sampled regularity
// certificate. A non-regular law may carry an ironed surrogate so the
// virtual-welfare mechanisms stay implementable.
struct AdvertiserModel {
  std::size_t index = 0;
  DistPtr distribution;
  ConvPtr conversion;
  bool regular = true;
  IroningPtr ironing;  // optional monotone surrogate

  bool can_run_virtual() const { return regular || ironing != nullptr; }

  // Virtual value used by allocation rules: the ironed surrogate when
  // present, otherwise rate(p) * (p - zeta(c)). Total in cost: reports inside
  // density gaps or above the support score -infinity and never win.
  double virtual_score(double cost, double price) const;
};

AdvertiserModel make_advertiser(std::size_t index, DistPtr distribution,
                                ConvPtr conversion, bool with_ironing = false,
                                std::size_t certificate_grid = 10001);

struct Report {
  double cost = 0.0;
  double price = 0.0;
};

using ReportProfile = std::vector<Report>;

struct AmaParams {
  std::vector<double> weights;
  std::vector<double> boosts;

  void validate(std::size_t advertiser_count) const;
};

}  // namespace dpa
