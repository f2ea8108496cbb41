#include "dpa/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpa/errors.hpp"
#include "dpa/rng.hpp"

namespace dpa {

namespace {

// Truthful costs and equilibrium prices, drawn once and reused for every
// parameter setting (common random numbers).
struct DrawMatrix {
  std::size_t samples = 0;
  std::size_t n = 0;
  std::vector<double> costs;
  std::vector<double> prices;
};

DrawMatrix draw_matrix(const std::vector<AdvertiserModel>& advertisers,
                       std::size_t samples, std::uint64_t seed,
                       const PriceGrid& grid, const ExecPolicy& policy) {
  DrawMatrix m;
  m.samples = samples;
  m.n = advertisers.size();
  m.costs.assign(samples * m.n, 0.0);
  m.prices.assign(samples * m.n, 0.0);
  std::vector<std::vector<double>> candidates(m.n);
  for (std::size_t j = 0; j < m.n; ++j) {
    candidates[j] = admissible_prices(grid, *advertisers[j].conversion);
  }
  map_batches<int>(samples, policy, [&](std::size_t batch, std::size_t begin,
                                        std::size_t end) {
    RngStream rng = RngStream::substream(seed, stream_tag::kOptimizer, batch);
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t j = 0; j < m.n; ++j) {
        const double c = advertisers[j].distribution->sample(rng);
        double best_p = candidates[j].front();
        double best_v = -std::numeric_limits<double>::infinity();
        for (double p : candidates[j]) {
          const double v = (p - c) * advertisers[j].conversion->rate(p);
          if (v > best_v) {
            best_v = v;
            best_p = p;
          }
        }
        m.costs[s * m.n + j] = c;
        m.prices[s * m.n + j] = best_p;
      }
    }
    return 0;
  });
  return m;
}

RevenueEstimate evaluate(const AmaParams& params,
                         const std::vector<AdvertiserModel>& advertisers,
                         const DrawMatrix& m, const ExecPolicy& policy) {
  struct Partial {
    double rev = 0.0;
    double rev2 = 0.0;
  };
  auto partials = map_batches<Partial>(
      m.samples, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        Partial part;
        ReportProfile profile(m.n);
        for (std::size_t s = begin; s < end; ++s) {
          for (std::size_t j = 0; j < m.n; ++j) {
            profile[j] = {m.costs[s * m.n + j], m.prices[s * m.n + j]};
          }
          const double rev =
              run_ama(profile, advertisers, params).total_payment();
          part.rev += rev;
          part.rev2 += rev * rev;
        }
        return part;
      });
  double rev = 0.0, rev2 = 0.0;
  for (const auto& p : partials) {
    rev += p.rev;
    rev2 += p.rev2;
  }
  const double ns = static_cast<double>(m.samples);
  RevenueEstimate est;
  est.samples = m.samples;
  est.revenue = rev / ns;
  if (m.samples > 1) {
    const double var =
        std::max(0.0, (rev2 - ns * est.revenue * est.revenue) / (ns - 1.0));
    est.se = std::sqrt(var / ns);
  } else {
    est.se = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

double grid_step(const std::vector<double>& grid) {
  double step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double d = std::abs(grid[i] - grid[i - 1]);
    if (d > 0.0) step = std::min(step, d);
  }
  return std::isfinite(step) ? step : 0.0;
}

}  // namespace

RevenueEstimate ama_revenue(const AmaParams& params,
                            const std::vector<AdvertiserModel>& advertisers,
                            std::size_t samples, std::uint64_t seed,
                            const PriceGrid& grid, const ExecPolicy& policy) {
  if (samples < 1) throw InputError("ama revenue: samples must be >= 1");
  params.validate(advertisers.size());
  const DrawMatrix m = draw_matrix(advertisers, samples, seed, grid, policy);
  return evaluate(params, advertisers, m, policy);
}

AmaSearchReport ama_search(const std::vector<AdvertiserModel>& advertisers,
                           const std::vector<double>& weight_grid,
                           const std::vector<double>& boost_grid,
                           std::size_t samples, std::uint64_t seed,
                           const PriceGrid& grid, const ExecPolicy& policy) {
  const std::size_t n = advertisers.size();
  if (weight_grid.empty() || boost_grid.empty()) {
    throw InputError("ama search: weight and boost grids must be non-empty");
  }
  for (double w : weight_grid) {
    if (!(w > 0.0)) throw InputError("ama search: weights must be positive");
  }
  if (samples < 2) throw InputError("ama search: samples must be >= 2");

  double combos = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    combos *= static_cast<double>(weight_grid.size());
    combos *= static_cast<double>(boost_grid.size());
  }
  if (combos > 2e5) {
    throw InputError("ama search: parameter grid too large");
  }

  const DrawMatrix m = draw_matrix(advertisers, samples, seed, grid, policy);

  AmaSearchReport report;
  report.samples = samples;
  report.best_revenue = -std::numeric_limits<double>::infinity();

  // Odometer over per-advertiser weight and boost choices.
  std::vector<std::size_t> widx(n, 0), bidx(n, 0);
  const std::size_t total = static_cast<std::size_t>(combos);
  for (std::size_t it = 0; it < total; ++it) {
    AmaParams params;
    params.weights.resize(n);
    params.boosts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      params.weights[i] = weight_grid[widx[i]];
      params.boosts[i] = boost_grid[bidx[i]];
    }
    const RevenueEstimate est = evaluate(params, advertisers, m, policy);
    report.table.push_back({params, est.revenue, est.se, "grid"});
    if (est.revenue > report.best_revenue) {
      report.best_revenue = est.revenue;
      report.best_se = est.se;
      report.best = params;
    }
    // Advance the odometer: boosts vary fastest.
    std::size_t d = 0;
    for (; d < n; ++d) {
      if (++bidx[d] < boost_grid.size()) break;
      bidx[d] = 0;
    }
    if (d == n) {
      for (d = 0; d < n; ++d) {
        if (++widx[d] < weight_grid.size()) break;
        widx[d] = 0;
      }
    }
  }

  // One round of coordinate-wise half-step refinement around the incumbent.
  const double wstep = 0.5 * grid_step(weight_grid);
  const double bstep = 0.5 * grid_step(boost_grid);
  for (std::size_t i = 0; i < n; ++i) {
    for (int dir : {-1, +1}) {
      if (wstep <= 0.0) break;
      AmaParams params = report.best;
      params.weights[i] += dir * wstep;
      if (!(params.weights[i] > 0.0)) continue;
      const RevenueEstimate est = evaluate(params, advertisers, m, policy);
      report.table.push_back({params, est.revenue, est.se, "refine"});
      if (est.revenue > report.best_revenue) {
        report.best_revenue = est.revenue;
        report.best_se = est.se;
        report.best = params;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int dir : {-1, +1}) {
      if (bstep <= 0.0) break;
      AmaParams params = report.best;
      params.boosts[i] += dir * bstep;
      const RevenueEstimate est = evaluate(params, advertisers, m, policy);
      report.table.push_back({params, est.revenue, est.se, "refine"});
      if (est.revenue > report.best_revenue) {
        report.best_revenue = est.revenue;
        report.best_se = est.se;
        report.best = params;
      }
    }
  }
  return report;
}

}  // namespace dpa
