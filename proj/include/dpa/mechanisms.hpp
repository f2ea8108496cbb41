#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpa/advertiser.hpp"

namespace dpa {

enum class MechanismFamily { WmRp, VwmRp, VwmPia, Ama };

std::string family_name(MechanismFamily family);

struct MechanismSpec {
  MechanismFamily family = MechanismFamily::WmRp;
  std::optional<AmaParams> ama;                     // iff family == Ama
  std::optional<std::vector<double>> pia_prices;    // iff family == VwmPia
  std::string tie_break = "lowest-index";           // the only rule built in

  void validate(std::size_t advertiser_count) const;
};

// Single-slot outcome. At most one allocation is set; the no-sale outcome is
// the all-zero vector. Losers always pay exactly zero.
struct Outcome {
  std::optional<std::size_t> winner;
  std::vector<int> allocations;
  std::vector<double> payments;

  double total_payment() const;
};

// Welfare maximizer with reported prices: highest reported value wins when
// positive, pays the second-highest reported value (threshold payment).
Outcome run_wm_rp(const ReportProfile& profile,
                  const std::vector<AdvertiserModel>& advertisers);

// Virtual welfare maximizer with reported prices: highest virtual value wins
// when positive, pays the value at the threshold cost. Requires regular laws
// or attached ironed surrogates.
Outcome run_vwm_rp(const ReportProfile& profile,
                   const std::vector<AdvertiserModel>& advertisers);

// Price-independent variant: allocation scores use the precomputed
// equilibrium prices, the winner's payment uses her reported price.
Outcome run_vwm_pia(const ReportProfile& profile,
                    const std::vector<AdvertiserModel>& advertisers,
                    const std::vector<double>& pia_prices);

// Affine maximizer auction over weighted and boosted values.
Outcome run_ama(const ReportProfile& profile,
                const std::vector<AdvertiserModel>& advertisers,
                const AmaParams& params);

Outcome run(const MechanismSpec& spec, const ReportProfile& profile,
            const std::vector<AdvertiserModel>& advertisers);

}  // namespace dpa
