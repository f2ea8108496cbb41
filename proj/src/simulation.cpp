#include "dpa/simulation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dpa/errors.hpp"
#include "dpa/rng.hpp"
#include "dpa/valuation.hpp"

namespace dpa {

std::string price_mode_name(PriceMode mode) {
  switch (mode) {
    case PriceMode::Fixed: return "fixed";
    case PriceMode::PiEquilibrium: return "pi-equilibrium";
    case PriceMode::AmaEquilibrium: return "ama-equilibrium";
  }
  return "unknown";
}

void Scenario::validate() const {
  const std::size_t n = advertisers.size();
  if (n == 0) throw InputError("scenario: at least one advertiser required");
  if (samples < 1) throw InputError("scenario: samples must be >= 1");
  mechanism.validate(n);
  switch (price_mode) {
    case PriceMode::Fixed:
      if (fixed_prices.size() != n) {
        throw InputError("scenario: one fixed price per advertiser required");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!advertisers[i].conversion->in_domain(fixed_prices[i])) {
          std::ostringstream os;
          os << "scenario: fixed price of advertiser " << i
             << " outside its price domain";
          throw InputError(os.str());
        }
      }
      break;
    case PriceMode::PiEquilibrium:
      if (mechanism.family != MechanismFamily::VwmPia) {
        throw InputError(
            "scenario: pi-equilibrium prices require a price-independent "
            "allocation (vwm-pia)");
      }
      break;
    case PriceMode::AmaEquilibrium:
      if (mechanism.family != MechanismFamily::Ama &&
          mechanism.family != MechanismFamily::WmRp) {
        throw InputError(
            "scenario: ama-equilibrium prices apply to affine maximizer "
            "allocations (wm-rp, ama)");
      }
      break;
  }
  if (price_mode != PriceMode::Fixed) price_grid.validate();
}

SimStats run_experiment(const Scenario& scenario) {
  scenario.validate();
  const std::size_t n = scenario.advertisers.size();

  std::vector<double> pia_or_fixed;
  switch (scenario.price_mode) {
    case PriceMode::Fixed:
      pia_or_fixed = scenario.fixed_prices;
      break;
    case PriceMode::PiEquilibrium:
      pia_or_fixed = *scenario.mechanism.pia_prices;
      break;
    case PriceMode::AmaEquilibrium:
      break;
  }
  std::vector<std::vector<double>> price_candidates(n);
  if (scenario.price_mode == PriceMode::AmaEquilibrium) {
    for (std::size_t j = 0; j < n; ++j) {
      price_candidates[j] = admissible_prices(
          scenario.price_grid, *scenario.advertisers[j].conversion);
    }
  }

  struct Partial {
    double rev = 0.0, rev2 = 0.0;
    double welf = 0.0, welf2 = 0.0;
    double sales = 0.0;
    std::vector<double> wins;
  };

  auto partials = map_batches<Partial>(
      scenario.samples, scenario.exec,
      [&](std::size_t batch, std::size_t begin, std::size_t end) {
        Partial part;
        part.wins.assign(n, 0.0);
        RngStream rng =
            RngStream::substream(scenario.seed, stream_tag::kCosts, batch);
        ReportProfile profile(n);
        for (std::size_t s = begin; s < end; ++s) {
          for (std::size_t j = 0; j < n; ++j) {
            const double c = scenario.advertisers[j].distribution->sample(rng);
            double p;
            if (scenario.price_mode == PriceMode::AmaEquilibrium) {
              double best_v = -std::numeric_limits<double>::infinity();
              p = price_candidates[j].front();
              for (double cand : price_candidates[j]) {
                const double v =
                    (cand - c) * scenario.advertisers[j].conversion->rate(cand);
                if (v > best_v) {
                  best_v = v;
                  p = cand;
                }
              }
            } else {
              p = pia_or_fixed[j];
            }
            profile[j] = {c, p};
          }
          const Outcome out =
              run(scenario.mechanism, profile, scenario.advertisers);
          const double rev = out.total_payment();
          double welf = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (out.allocations[j]) {
              welf += value(profile[j].cost, profile[j].price,
                            *scenario.advertisers[j].conversion);
              part.wins[j] += 1.0;
            }
          }
          part.rev += rev;
          part.rev2 += rev * rev;
          part.welf += welf;
          part.welf2 += welf * welf;
          if (out.winner) part.sales += 1.0;
        }
        return part;
      });

  Partial total;
  total.wins.assign(n, 0.0);
  for (const auto& p : partials) {
    total.rev += p.rev;
    total.rev2 += p.rev2;
    total.welf += p.welf;
    total.welf2 += p.welf2;
    total.sales += p.sales;
    for (std::size_t j = 0; j < n; ++j) total.wins[j] += p.wins[j];
  }

  const double ns = static_cast<double>(scenario.samples);
  auto se = [ns](double sum, double sumsq) {
    if (ns < 2.0) return std::numeric_limits<double>::quiet_NaN();
    const double mean = sum / ns;
    const double var = std::max(0.0, (sumsq - ns * mean * mean) / (ns - 1.0));
    return std::sqrt(var / ns);
  };

  SimStats stats;
  stats.samples = scenario.samples;
  stats.revenue = total.rev / ns;
  stats.revenue_se = se(total.rev, total.rev2);
  stats.welfare = total.welf / ns;
  stats.welfare_se = se(total.welf, total.welf2);
  stats.sale_probability = total.sales / ns;
  stats.win_frequency.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    stats.win_frequency[j] = total.wins[j] / ns;
  }
  return stats;
}

namespace {

// Structural match: cost draws depend only on (seed, batch, index) and the
// quantile function, so probing the quantiles decides whether two scenarios
// share their draws.
bool same_advertisers(const std::vector<AdvertiserModel>& a,
                      const std::vector<AdvertiserModel>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& da = *a[i].distribution;
    const auto& db = *b[i].distribution;
    if (da.kind() != db.kind() || da.lower() != db.lower() ||
        da.upper() != db.upper()) {
      return false;
    }
    for (int k = 1; k < 16; ++k) {
      if (da.quantile(k / 16.0) != db.quantile(k / 16.0)) return false;
    }
  }
  return true;
}

}  // namespace

std::vector<ComparisonRow> compare(const std::vector<Scenario>& scenarios,
                                   const std::vector<std::string>& labels) {
  if (scenarios.empty()) throw InputError("compare: at least one scenario");
  std::vector<ComparisonRow> rows;
  rows.reserve(scenarios.size());
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    ComparisonRow row;
    row.label = i < labels.size() ? labels[i]
                                  : "scenario-" + std::to_string(i);
    row.stats = run_experiment(scenarios[i]);
    row.common_draws =
        scenarios[i].seed == scenarios[0].seed &&
        same_advertisers(scenarios[i].advertisers, scenarios[0].advertisers);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dpa
