#include "dpa/valuation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dpa/errors.hpp"

namespace dpa {

namespace {
constexpr double kInvTolerance = 1e-10;  // bisection tolerance in cost
}

double value(double cost, double price, const ConversionCurve& conv) {
  return (price - cost) * conv.rate(price);
}

double value_inverse(double target, double price,
                     const ConversionCurve& conv) {
  const double r = conv.rate(price);
  if (!(r > 0.0)) {
    throw NonInvertibleError(
        "value is constant in cost when the conversion rate is zero");
  }
  return price - target / r;
}

double reverse_hazard(const CostDistribution& dist, double cost) {
  const double q = dist.cdf(cost);
  if (!(q > 0.0)) {
    throw SingularityError(
        "reverse hazard rate diverges where the cdf vanishes");
  }
  return dist.density(cost) / q;
}

double information_rent(const CostDistribution& dist, double cost) {
  const double q = dist.cdf(cost);
  if (q <= 0.0) return 0.0;
  const double f = dist.density(cost);
  if (f <= 0.0) return std::numeric_limits<double>::infinity();
  return q / f;
}

double zeta(const CostDistribution& dist, double cost) {
  return cost + information_rent(dist, cost);
}

double virtual_value(double cost, double price, const CostDistribution& dist,
                     const ConversionCurve& conv) {
  const double q = dist.cdf(cost);
  if (q <= 0.0) return value(cost, price, conv);  // no rent at the lowest cost
  const double f = dist.density(cost);
  if (f <= 0.0) {
    std::ostringstream os;
    os << "virtual value undefined: zero density at cost " << cost;
    throw SingularityError(os.str());
  }
  return value(cost, price, conv) - conv.rate(price) * (q / f);
}

namespace {

// Virtual value through the zeta factorization; total in cost (returns
// -infinity inside density gaps and above the support).
double virtual_score(double cost, double price, const CostDistribution& dist,
                     const ConversionCurve& conv) {
  const double r = conv.rate(price);
  if (r <= 0.0) return 0.0;
  return r * (price - zeta(dist, cost));
}

}  // namespace

double virtual_value_inverse(double target, double price,
                             const CostDistribution& dist,
                             const ConversionCurve& conv) {
  const double r = conv.rate(price);
  if (!(r > 0.0)) {
    throw NonInvertibleError(
        "virtual value is constant in cost when the conversion rate is zero");
  }
  double lo = dist.lower();
  double hi = dist.upper();
  const double top = virtual_score(lo, price, dist, conv);
  const double bottom = virtual_score(hi, price, dist, conv);
  const double slack = 1e-12 * std::max(1.0, std::abs(top) + std::abs(bottom));
  if (target > top + slack || target < bottom - slack) {
    std::ostringstream os;
    os << "virtual value target " << target << " outside attained range ["
       << bottom << ", " << top << "]";
    throw RangeError(os.str());
  }
  if (target >= top) return lo;
  if (target <= bottom) return hi;
  // sup{ c : virtual value >= target } by predicate bisection.
  while (hi - lo > kInvTolerance) {
    const double mid = 0.5 * (lo + hi);
    if (virtual_score(mid, price, dist, conv) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double root = 0.5 * (lo + hi);
  const double residual = std::abs(virtual_score(root, price, dist, conv) -
                                   target);
  if (residual > 1e-6 * std::max(1.0, std::abs(target))) {
    throw RegularityError(
        "virtual value is not monotone at this price: no consistent inverse "
        "(apply ironing first)");
  }
  return root;
}

double weighted_value(double cost, double price, const ConversionCurve& conv,
                      double weight, double boost) {
  if (!(weight > 0.0)) {
    throw InputError("weighted value: weight must be strictly positive");
  }
  return boost + weight * value(cost, price, conv);
}

double weighted_value_inverse(double target, double price,
                              const ConversionCurve& conv, double weight,
                              double boost) {
  if (!(weight > 0.0)) {
    throw InputError("weighted value: weight must be strictly positive");
  }
  const double r = conv.rate(price);
  if (!(r > 0.0)) {
    throw NonInvertibleError(
        "weighted value is constant in cost when the conversion rate is zero");
  }
  return price - (target - boost) / (weight * r);
}

RegularityReport regularity_check(const CostDistribution& dist,
                                  std::size_t grid_size) {
  if (grid_size < 3) {
    throw InputError("regularity check: grid size must be at least 3");
  }
  const double lo = dist.lower();
  const double hi = dist.upper();
  const double step = (hi - lo) / static_cast<double>(grid_size);

  RegularityReport report;
  report.grid_size = grid_size;

  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= grid_size; ++k) {
    const double c =
        (k == grid_size) ? hi : lo + static_cast<double>(k) * step;
    const double q = dist.cdf(c);
    const double f = dist.density(c);
    if (q <= 0.0 && f <= 0.0) {
      std::ostringstream os;
      os << "regularity check: cdf and density both vanish at interior cost "
         << c;
      throw SingularityError(os.str());
    }
    const double z = zeta(dist, c);
    if (!(std::isinf(prev) && std::isinf(z))) {
      const double drop = prev - z;
      if (drop > 1e-9 && drop > report.worst_violation) {
        report.regular = false;
        report.worst_violation = drop;
        report.worst_cost = c;
      } else if (drop > 1e-9) {
        report.regular = false;
      }
    }
    prev = z;
  }
  return report;
}

}  // namespace dpa
