#include "dpa/ironing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpa/errors.hpp"
#include "dpa/valuation.hpp"

namespace dpa {

IronedTransform::IronedTransform(DistPtr dist, std::vector<double> cost_knots,
                                 std::vector<double> values,
                                 std::vector<bool> straddles)
    : dist_(std::move(dist)),
      cost_knots_(std::move(cost_knots)),
      values_(std::move(values)),
      straddles_(std::move(straddles)) {}

double IronedTransform::zeta_tilde_at_quantile(double q) const {
  const std::size_t m = values_.size();
  if (q <= 0.0) return values_.front();
  if (q >= 1.0) return values_.back();
  const double pos = q * static_cast<double>(m - 1);
  std::size_t k = static_cast<std::size_t>(pos);
  if (k >= m - 1) k = m - 2;
  const double t = pos - static_cast<double>(k);
  return values_[k] + t * (values_[k + 1] - values_[k]);
}

double IronedTransform::zeta_tilde(double cost) const {
  const auto& x = cost_knots_;
  if (cost <= x.front()) return values_.front();
  if (cost >= x.back()) return values_.back();
  // Largest k with x[k] <= cost; intervals can only repeat at gap edges.
  std::size_t k = static_cast<std::size_t>(
      std::upper_bound(x.begin(), x.end(), cost) - x.begin());
  --k;
  if (cost == x[k]) return values_[k];
  if (straddles_[k] || !(x[k + 1] > x[k])) return values_[k + 1];
  const double t = (cost - x[k]) / (x[k + 1] - x[k]);
  return values_[k] + t * (values_[k + 1] - values_[k]);
}

IroningPtr iron(const DistPtr& dist, std::size_t grid_size) {
  if (!dist) throw InputError("iron: null distribution");
  if (grid_size < 16) throw InputError("iron: grid size must be at least 16");
  if (!(dist->upper() > dist->lower())) {
    throw InputError("iron: zero-width support");
  }

  const std::size_t m = grid_size;
  const double dq = 1.0 / static_cast<double>(m - 1);

  // zeta along the quantile grid. quantile() never lands strictly inside a
  // density gap, so these values are finite whenever the density is positive
  // on the mass points.
  std::vector<double> knots(m);
  std::vector<double> z(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double q = (k == m - 1) ? 1.0 : static_cast<double>(k) * dq;
    knots[k] = dist->quantile(q);
    z[k] = zeta(*dist, knots[k]);
    if (!std::isfinite(z[k])) {
      throw SingularityError(
          "iron: zeta is not finite at a quantile grid point");
    }
  }

  // Trapezoidal cumulative integral of zeta in quantile space.
  std::vector<double> H(m);
  H[0] = 0.0;
  for (std::size_t k = 1; k < m; ++k) {
    H[k] = H[k - 1] + 0.5 * (z[k - 1] + z[k]) * dq;
  }

  // Lower convex hull of the points (q_k, H_k); cross > 0 keeps the middle
  // point strictly below the chord.
  std::vector<std::size_t> hull;
  hull.reserve(m);
  auto cross = [&](std::size_t a, std::size_t b, std::size_t c) {
    const double qa = static_cast<double>(a) * dq;
    const double qb = static_cast<double>(b) * dq;
    const double qc = static_cast<double>(c) * dq;
    return (qb - qa) * (H[c] - H[a]) - (qc - qa) * (H[b] - H[a]);
  };
  for (std::size_t k = 0; k < m; ++k) {
    while (hull.size() >= 2 &&
           cross(hull[hull.size() - 2], hull.back(), k) <= 0.0) {
      hull.pop_back();
    }
    hull.push_back(k);
  }

  const std::size_t nseg = hull.size() - 1;
  std::vector<double> slope(nseg);
  for (std::size_t s = 0; s < nseg; ++s) {
    const std::size_t a = hull[s];
    const std::size_t b = hull[s + 1];
    slope[s] = (H[b] - H[a]) / (static_cast<double>(b - a) * dq);
  }

  std::vector<std::ptrdiff_t> vertex_of(m, -1);
  for (std::size_t j = 0; j < hull.size(); ++j) {
    vertex_of[hull[j]] = static_cast<std::ptrdiff_t>(j);
  }

  std::vector<double> ztilde(m);
  std::size_t seg = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::ptrdiff_t j = vertex_of[k];
    if (j < 0) {
      // Strictly inside an ironed segment: take the segment slope.
      while (hull[seg + 1] < k) ++seg;
      ztilde[k] = slope[seg];
      continue;
    }
    // Hull vertex: keep the exact zeta value, clamped between the adjacent
    // segment slopes so the grid sequence stays non-decreasing.
    const double lo = (j > 0) ? slope[static_cast<std::size_t>(j) - 1]
                              : -std::numeric_limits<double>::infinity();
    const double hi = (static_cast<std::size_t>(j) < nseg)
                          ? slope[static_cast<std::size_t>(j)]
                          : std::numeric_limits<double>::infinity();
    ztilde[k] = std::clamp(z[k], lo, hi);
  }

  // Knot intervals that cross a zero-density gap (the quantile function
  // jumps there) are flagged so evaluation maps gap reports to the value at
  // the gap's upper edge.
  std::vector<bool> straddles(m - 1, false);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    if (knots[k + 1] > knots[k]) {
      const double mid = 0.5 * (knots[k] + knots[k + 1]);
      straddles[k] = dist->density(mid) <= 0.0;
    }
  }

  return std::make_shared<IronedTransform>(dist, std::move(knots),
                                           std::move(ztilde),
                                           std::move(straddles));
}

double ironed_virtual_value(const IronedTransform& transform, double cost,
                            double price, const ConversionCurve& conv) {
  const double r = conv.rate(price);
  if (r <= 0.0) return 0.0;
  return r * (price - transform.zeta_tilde(cost));
}

}  // namespace dpa
