#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dpa/equilibrium.hpp"
#include "dpa/mechanisms.hpp"
#include "dpa/parallel.hpp"

namespace dpa {

struct RevenueEstimate {
  double revenue = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
};

// Expected affine-maximizer revenue under truthful costs and per-cost
// equilibrium display prices (the argmax of the value over the grid).
RevenueEstimate ama_revenue(const AmaParams& params,
                            const std::vector<AdvertiserModel>& advertisers,
                            std::size_t samples, std::uint64_t seed,
                            const PriceGrid& grid,
                            const ExecPolicy& policy = {});

struct AmaEvaluation {
  AmaParams params;
  double revenue = 0.0;
  double se = 0.0;
  std::string stage;  // "grid" or "refine"
};

struct AmaSearchReport {
  std::vector<AmaEvaluation> table;
  AmaParams best;
  double best_revenue = 0.0;
  double best_se = 0.0;
  std::size_t samples = 0;
};

// Grid search over per-advertiser weight/boost combinations with common
// random numbers (one shared cost/price draw for every parameter setting),
// followed by one round of coordinate-wise half-step refinement around the
// incumbent. Derivative-free on purpose: the revenue estimate is noisy and
// the parameter space is low-dimensional.
AmaSearchReport ama_search(const std::vector<AdvertiserModel>& advertisers,
                           const std::vector<double>& weight_grid,
                           const std::vector<double>& boost_grid,
                           std::size_t samples, std::uint64_t seed,
                           const PriceGrid& grid,
                           const ExecPolicy& policy = {});

}  // namespace dpa
