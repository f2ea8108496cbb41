#include "dpa/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dpa/errors.hpp"
#include "dpa/rng.hpp"
#include "dpa/valuation.hpp"

namespace dpa {

void PriceGrid::validate() const {
  if (points < 2) throw InputError("price grid: at least 2 points required");
  if (!(lower <= upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw InputError("price grid: need lower <= upper and finite bounds");
  }
}

double PriceGrid::point(std::size_t k) const {
  if (k + 1 == points) return upper;
  return lower + (upper - lower) * static_cast<double>(k) /
                     static_cast<double>(points - 1);
}

std::vector<double> admissible_prices(const PriceGrid& grid,
                                      const ConversionCurve& conv) {
  grid.validate();
  std::vector<double> prices;
  prices.reserve(grid.points);
  for (std::size_t k = 0; k < grid.points; ++k) {
    const double p = grid.point(k);
    if (conv.in_domain(p)) prices.push_back(p);
  }
  if (prices.empty()) {
    throw InputError("price grid does not intersect the price domain");
  }
  return prices;
}

double pi_equilibrium_price(const ConversionCurve& conv,
                            const PriceGrid& grid) {
  double best_price = 0.0;
  double best_rate = -std::numeric_limits<double>::infinity();
  for (double p : admissible_prices(grid, conv)) {
    const double r = conv.rate(p);
    if (r > best_rate) {
      best_rate = r;
      best_price = p;
    }
  }
  return best_price;
}

double ama_equilibrium_price(double cost, const ConversionCurve& conv,
                             const PriceGrid& grid) {
  double best_price = 0.0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (double p : admissible_prices(grid, conv)) {
    const double v = (p - cost) * conv.rate(p);
    if (v > best_value) {
      best_value = v;
      best_price = p;
    }
  }
  return best_price;
}

PriceStrategy equilibrium_strategy(MechanismFamily family,
                                   const AdvertiserModel& advertiser,
                                   const PriceGrid& grid) {
  switch (family) {
    case MechanismFamily::VwmPia: {
      const double pbar = pi_equilibrium_price(*advertiser.conversion, grid);
      return [pbar](double) { return pbar; };
    }
    case MechanismFamily::WmRp:
    case MechanismFamily::Ama: {
      ConvPtr conv = advertiser.conversion;
      return [conv, grid](double cost) {
        return ama_equilibrium_price(cost, *conv, grid);
      };
    }
    case MechanismFamily::VwmRp:
      throw InputError(
          "vwm-rp has no analytic equilibrium price strategy; supply one "
          "explicitly");
  }
  throw InputError("unknown mechanism family");
}

BestResponseReport best_response_check(
    const MechanismSpec& spec, const std::vector<AdvertiserModel>& advertisers,
    std::size_t advertiser, double cost, double candidate_price,
    const PriceGrid& grid, std::size_t samples, std::uint64_t seed,
    const std::vector<PriceStrategy>& opponent_strategies,
    const ExecPolicy& policy) {
  const std::size_t n = advertisers.size();
  if (advertiser >= n) throw InputError("best response: bad advertiser index");
  if (samples < 1) throw InputError("best response: samples must be >= 1");
  spec.validate(n);
  if (!advertisers[advertiser].conversion->in_domain(candidate_price)) {
    throw InputError("best response: candidate price outside the domain");
  }
  std::vector<PriceStrategy> strategies = opponent_strategies;
  if (strategies.empty()) {
    strategies.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == advertiser) continue;
      strategies[j] = equilibrium_strategy(spec.family, advertisers[j], grid);
    }
  } else if (strategies.size() != n) {
    throw InputError("best response: one strategy per advertiser expected");
  }

  const std::vector<double> deviations =
      admissible_prices(grid, *advertisers[advertiser].conversion);
  const std::size_t ndev = deviations.size();

  // Opponent reports drawn once and shared across the candidate and every
  // deviation price (common random numbers).
  std::vector<double> opp_costs(samples * n, 0.0);
  std::vector<double> opp_prices(samples * n, 0.0);
  map_batches<int>(samples, policy, [&](std::size_t batch, std::size_t begin,
                                        std::size_t end) {
    RngStream rng =
        RngStream::substream(seed, stream_tag::kBestResponse, batch);
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == advertiser) continue;
        const double c = advertisers[j].distribution->sample(rng);
        opp_costs[s * n + j] = c;
        opp_prices[s * n + j] = strategies[j](c);
      }
    }
    return 0;
  });

  struct Partial {
    std::vector<double> gain_sum;
    std::vector<double> gain_sq;
    double cand_sum = 0.0;
    std::size_t positive = 0;
  };

  auto partials = map_batches<Partial>(
      samples, policy,
      [&](std::size_t, std::size_t begin, std::size_t end) {
        Partial part;
        part.gain_sum.assign(ndev, 0.0);
        part.gain_sq.assign(ndev, 0.0);
        ReportProfile profile(n);
        for (std::size_t s = begin; s < end; ++s) {
          for (std::size_t j = 0; j < n; ++j) {
            if (j == advertiser) continue;
            profile[j].cost = opp_costs[s * n + j];
            profile[j].price = opp_prices[s * n + j];
          }
          profile[advertiser].cost = cost;
          auto utility_at = [&](double price) {
            profile[advertiser].price = price;
            const Outcome out = run(spec, profile, advertisers);
            const double v =
                value(cost, price, *advertisers[advertiser].conversion);
            return v * out.allocations[advertiser] -
                   out.payments[advertiser];
          };
          const double u_cand = utility_at(candidate_price);
          part.cand_sum += u_cand;
          bool any_positive = false;
          for (std::size_t d = 0; d < ndev; ++d) {
            const double gain = utility_at(deviations[d]) - u_cand;
            part.gain_sum[d] += gain;
            part.gain_sq[d] += gain * gain;
            if (gain > 1e-12) any_positive = true;
          }
          if (any_positive) ++part.positive;
        }
        return part;
      });

  std::vector<double> gain_sum(ndev, 0.0);
  std::vector<double> gain_sq(ndev, 0.0);
  double cand_sum = 0.0;
  std::size_t positive = 0;
  for (const auto& part : partials) {
    for (std::size_t d = 0; d < ndev; ++d) {
      gain_sum[d] += part.gain_sum[d];
      gain_sq[d] += part.gain_sq[d];
    }
    cand_sum += part.cand_sum;
    positive += part.positive;
  }

  BestResponseReport report;
  report.candidate_price = candidate_price;
  report.samples = samples;
  report.candidate_utility = cand_sum / static_cast<double>(samples);
  report.positive_gain_samples = positive;
  report.max_gain = -std::numeric_limits<double>::infinity();
  const double ns = static_cast<double>(samples);
  for (std::size_t d = 0; d < ndev; ++d) {
    const double mean = gain_sum[d] / ns;
    if (mean > report.max_gain) {
      report.max_gain = mean;
      report.best_deviation = deviations[d];
      if (samples > 1) {
        const double var =
            std::max(0.0, (gain_sq[d] - ns * mean * mean) / (ns - 1.0));
        report.gain_se = std::sqrt(var / ns);
      } else {
        report.gain_se = std::numeric_limits<double>::quiet_NaN();
      }
    }
  }
  report.pass = report.max_gain <= 1e-12 ||
                report.max_gain <= 3.0 * report.gain_se + 1e-12;
  return report;
}

}  // namespace dpa
