#pragma once

#include <vector>

#include "dpa/advertiser.hpp"
#include "dpa/mechanisms.hpp"

namespace dpa::testfix {

// Two symmetric bidders: uniform [0,1] costs, unit conversion, prices in
// [0,1]. The workhorse fixture with closed-form revenue constants.
inline std::vector<AdvertiserModel> uniform_pair() {
  std::vector<AdvertiserModel> advs;
  for (std::size_t i = 0; i < 2; ++i) {
    advs.push_back(make_advertiser(i, make_uniform(0.0, 1.0),
                                   make_constant_conversion(1.0, 0.0, 1.0)));
  }
  return advs;
}

// Heterogeneous three-bidder pool for the characterization checks.
inline std::vector<AdvertiserModel> mixed_trio() {
  std::vector<AdvertiserModel> advs;
  advs.push_back(make_advertiser(0, make_uniform(0.0, 1.0),
                                 make_constant_conversion(0.8, 0.2, 1.2)));
  advs.push_back(make_advertiser(
      1, make_truncated_exponential(0.0, 1.0, 2.0),
      make_exp_decay_conversion(0.5, 0.2, 1.2)));
  advs.push_back(make_advertiser(
      2, make_uniform(0.1, 0.9),
      make_linear_conversion(1.2, 0.5, 0.2, 1.2)));
  return advs;
}

// The disjoint two-component mixture: non-regular, used with ironing.
inline DistPtr gap_mixture() {
  return make_uniform_mixture(0.5, 0.0, 0.1, 0.9, 1.0);
}

// Overlapping components make the density jump upward, so the quantile-space
// integrand genuinely bends and the convex hull has ironed segments.
inline DistPtr overlap_mixture() {
  return make_uniform_mixture(0.2, 0.0, 1.0, 0.5, 1.0);
}

inline MechanismSpec wm_rp_spec() {
  MechanismSpec spec;
  spec.family = MechanismFamily::WmRp;
  return spec;
}

inline MechanismSpec vwm_rp_spec() {
  MechanismSpec spec;
  spec.family = MechanismFamily::VwmRp;
  return spec;
}

inline MechanismSpec vwm_pia_spec(std::vector<double> pbar) {
  MechanismSpec spec;
  spec.family = MechanismFamily::VwmPia;
  spec.pia_prices = std::move(pbar);
  return spec;
}

inline MechanismSpec ama_spec(std::vector<double> w, std::vector<double> b) {
  MechanismSpec spec;
  spec.family = MechanismFamily::Ama;
  spec.ama = AmaParams{std::move(w), std::move(b)};
  return spec;
}

}  // namespace dpa::testfix
