#include "dpa/mechanisms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dpa/errors.hpp"
#include "dpa/valuation.hpp"

namespace dpa {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kThresholdTolerance = 1e-10;  // bisection tolerance in cost

void validate_profile(const ReportProfile& profile,
                      const std::vector<AdvertiserModel>& advertisers) {
  if (profile.empty()) throw InputError("mechanism: empty report profile");
  if (profile.size() != advertisers.size()) {
    throw InputError("mechanism: profile and advertiser counts differ");
  }
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (!(profile[i].cost >= 0.0) || !std::isfinite(profile[i].cost)) {
      std::ostringstream os;
      os << "mechanism: reported cost of advertiser " << i
         << " must be finite and non-negative";
      throw InputError(os.str());
    }
    if (!advertisers[i].conversion->in_domain(profile[i].price)) {
      std::ostringstream os;
      os << "mechanism: reported price of advertiser " << i
         << " outside its price domain";
      throw InputError(os.str());
    }
  }
}

struct ScoreBoard {
  std::size_t best = 0;
  double best_score = kNegInf;
  double second_score = kNegInf;  // equals best_score on a tie
};

// Lowest index wins ties: strict improvement moves the leader.
ScoreBoard scan(const std::vector<double>& scores) {
  ScoreBoard sb;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] > sb.best_score) {
      sb.second_score = sb.best_score;
      sb.best_score = scores[i];
      sb.best = i;
    } else if (scores[i] > sb.second_score) {
      sb.second_score = scores[i];
    }
  }
  return sb;
}

Outcome no_sale(std::size_t n) {
  Outcome out;
  out.allocations.assign(n, 0);
  out.payments.assign(n, 0.0);
  return out;
}

Outcome sale(std::size_t n, std::size_t winner, double payment) {
  Outcome out;
  out.winner = winner;
  out.allocations.assign(n, 0);
  out.payments.assign(n, 0.0);
  out.allocations[winner] = 1;
  out.payments[winner] = payment;
  if (!std::isfinite(payment)) {
    throw MathError("mechanism produced a non-finite payment");
  }
  return out;
}

Outcome run_virtual(const ReportProfile& profile,
                    const std::vector<AdvertiserModel>& advertisers,
                    const std::vector<double>& score_prices) {
  const std::size_t n = profile.size();
  for (const auto& adv : advertisers) {
    if (!adv.can_run_virtual()) {
      std::ostringstream os;
      os << "advertiser " << adv.index
         << ": non-regular cost distribution; attach an ironed surrogate";
      throw RegularityError(os.str());
    }
  }
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = advertisers[i].virtual_score(profile[i].cost, score_prices[i]);
  }
  const ScoreBoard sb = scan(scores);
  if (!(sb.best_score > 0.0)) return no_sale(n);

  const std::size_t w = sb.best;
  const double target = std::max(sb.second_score, 0.0);

  // The winner keeps the slot at a tie only against higher-index rivals.
  // Ironed surrogates have flat stretches of positive type mass, so exact
  // score ties are not a null event and the payment threshold has to follow
  // the allocation's tie handling, not just the score level set.
  bool tie_keeps_slot = true;
  for (std::size_t j = 0; j < w; ++j) {
    if (scores[j] == sb.second_score) {
      tie_keeps_slot = false;
      break;
    }
  }
  auto wins_at = [&](double z) {
    const double s = advertisers[w].virtual_score(z, score_prices[w]);
    if (s > target) return true;
    return target > 0.0 && s == target && tie_keeps_slot;
  };

  const double upper = advertisers[w].distribution->upper();
  double threshold_cost;
  if (wins_at(upper)) {
    threshold_cost = upper;  // the winner wins at every cost in her support
  } else {
    double lo = std::min(profile[w].cost, upper);
    double hi = upper;
    while (hi - lo > kThresholdTolerance) {
      const double mid = 0.5 * (lo + hi);
      if (wins_at(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    threshold_cost = 0.5 * (lo + hi);
  }
  const double payment =
      value(threshold_cost, profile[w].price, *advertisers[w].conversion);
  return sale(n, w, payment);
}

}  // namespace

std::string family_name(MechanismFamily family) {
  switch (family) {
    case MechanismFamily::WmRp: return "wm-rp";
    case MechanismFamily::VwmRp: return "vwm-rp";
    case MechanismFamily::VwmPia: return "vwm-pia";
    case MechanismFamily::Ama: return "ama";
  }
  return "unknown";
}

void MechanismSpec::validate(std::size_t advertiser_count) const {
  if (tie_break != "lowest-index") {
    throw InputError("mechanism spec: unsupported tie-break rule '" +
                     tie_break + "'");
  }
  if ((family == MechanismFamily::Ama) != ama.has_value()) {
    throw InputError(
        "mechanism spec: affine maximizer parameters must be present exactly "
        "for the ama family");
  }
  if ((family == MechanismFamily::VwmPia) != pia_prices.has_value()) {
    throw InputError(
        "mechanism spec: equilibrium prices must be present exactly for the "
        "vwm-pia family");
  }
  if (ama) ama->validate(advertiser_count);
  if (pia_prices && pia_prices->size() != advertiser_count) {
    throw InputError(
        "mechanism spec: equilibrium price count differs from advertisers");
  }
}

double Outcome::total_payment() const {
  double total = 0.0;
  for (double x : payments) total += x;
  return total;
}

Outcome run_wm_rp(const ReportProfile& profile,
                  const std::vector<AdvertiserModel>& advertisers) {
  validate_profile(profile, advertisers);
  const std::size_t n = profile.size();
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = value(profile[i].cost, profile[i].price,
                      *advertisers[i].conversion);
  }
  const ScoreBoard sb = scan(scores);
  if (!(sb.best_score > 0.0)) return no_sale(n);

  const std::size_t w = sb.best;
  const double target = std::max(sb.second_score, 0.0);
  const double value_at_upper = value(advertisers[w].distribution->upper(),
                                      profile[w].price,
                                      *advertisers[w].conversion);
  // Threshold payment: the second-highest value when the indifference cost
  // lies inside the support, the value at the upper endpoint otherwise.
  const double payment = std::max(target, value_at_upper);
  return sale(n, w, payment);
}

Outcome run_vwm_rp(const ReportProfile& profile,
                   const std::vector<AdvertiserModel>& advertisers) {
  validate_profile(profile, advertisers);
  std::vector<double> prices(profile.size());
  for (std::size_t i = 0; i < profile.size(); ++i) {
    prices[i] = profile[i].price;
  }
  return run_virtual(profile, advertisers, prices);
}

Outcome run_vwm_pia(const ReportProfile& profile,
                    const std::vector<AdvertiserModel>& advertisers,
                    const std::vector<double>& pia_prices) {
  validate_profile(profile, advertisers);
  if (pia_prices.size() != profile.size()) {
    throw InputError("vwm-pia: equilibrium price count differs from profile");
  }
  return run_virtual(profile, advertisers, pia_prices);
}

Outcome run_ama(const ReportProfile& profile,
                const std::vector<AdvertiserModel>& advertisers,
                const AmaParams& params) {
  validate_profile(profile, advertisers);
  const std::size_t n = profile.size();
  params.validate(n);

  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = params.boosts[i] +
                params.weights[i] * value(profile[i].cost, profile[i].price,
                                          *advertisers[i].conversion);
  }
  const ScoreBoard sb = scan(scores);

  double target;
  if (n == 1) {
    // Lone bidder: the threshold sits at her own boost, so she wins exactly
    // when her value is positive and pays the value at the zero-margin cost.
    if (!(sb.best_score > params.boosts[0])) return no_sale(n);
    target = params.boosts[0];
  } else {
    if (!(sb.best_score > 0.0)) return no_sale(n);
    target = std::max(sb.second_score, 0.0);
  }

  const std::size_t w = sb.best;
  const double bw = params.boosts[w];
  const double ww = params.weights[w];
  const double score_at_upper =
      bw + ww * value(advertisers[w].distribution->upper(), profile[w].price,
                      *advertisers[w].conversion);
  double payment;
  if (target >= score_at_upper) {
    payment = (target - bw) / ww;
  } else {
    payment = value(advertisers[w].distribution->upper(), profile[w].price,
                    *advertisers[w].conversion);
  }
  return sale(n, w, payment);
}

Outcome run(const MechanismSpec& spec, const ReportProfile& profile,
            const std::vector<AdvertiserModel>& advertisers) {
  spec.validate(advertisers.size());
  switch (spec.family) {
    case MechanismFamily::WmRp:
      return run_wm_rp(profile, advertisers);
    case MechanismFamily::VwmRp:
      return run_vwm_rp(profile, advertisers);
    case MechanismFamily::VwmPia:
      return run_vwm_pia(profile, advertisers, *spec.pia_prices);
    case MechanismFamily::Ama:
      return run_ama(profile, advertisers, *spec.ama);
  }
  throw InputError("mechanism spec: unknown family");
}

}  // namespace dpa
