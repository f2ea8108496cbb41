#include "dpa/advertiser.hpp"

#include <sstream>

#include "dpa/errors.hpp"
#include "dpa/valuation.hpp"

namespace dpa {

double AdvertiserModel::virtual_score(double cost, double price) const {
  if (ironing) return ironed_virtual_value(*ironing, cost, price, *conversion);
  const double r = conversion->rate(price);
  if (r <= 0.0) return 0.0;
  return r * (price - zeta(*distribution, cost));
}

AdvertiserModel make_advertiser(std::size_t index, DistPtr distribution,
                                ConvPtr conversion, bool with_ironing,
                                std::size_t certificate_grid) {
  if (!distribution || !conversion) {
    throw InputError("advertiser: distribution and conversion are required");
  }
  AdvertiserModel adv;
  adv.index = index;
  adv.distribution = std::move(distribution);
  adv.conversion = std::move(conversion);
  adv.regular = regularity_check(*adv.distribution, certificate_grid).regular;
  if (with_ironing) adv.ironing = iron(adv.distribution, certificate_grid);
  return adv;
}

void AmaParams::validate(std::size_t advertiser_count) const {
  if (weights.size() != advertiser_count ||
      boosts.size() != advertiser_count) {
    std::ostringstream os;
    os << "affine maximizer parameters: expected " << advertiser_count
       << " weights and boosts, got " << weights.size() << " and "
       << boosts.size();
    throw InputError(os.str());
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) {
      std::ostringstream os;
      os << "affine maximizer parameters: weights[" << i
         << "] must be strictly positive";
      throw InputError(os.str());
    }
  }
}

}  // namespace dpa
