#include "dpa/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpa/errors.hpp"

namespace dpa {

CostDistribution::CostDistribution(double lower, double upper)
    : lower_(lower), upper_(upper) {
  if (!(std::isfinite(lower) && std::isfinite(upper)) || !(lower < upper)) {
    throw InputError("cost distribution: support must satisfy lower < upper");
  }
}

namespace {

class Uniform final : public CostDistribution {
 public:
  Uniform(double lower, double upper)
      : CostDistribution(lower, upper), inv_width_(1.0 / (upper - lower)) {}

  double cdf(double c) const override {
    if (c <= lower_) return 0.0;
    if (c >= upper_) return 1.0;
    return (c - lower_) * inv_width_;
  }

  double density(double c) const override {
    if (c < lower_ || c > upper_) return 0.0;
    return inv_width_;
  }

  double quantile(double u) const override {
    if (u <= 0.0) return lower_;
    if (u >= 1.0) return upper_;
    return lower_ + u * (upper_ - lower_);
  }

  std::string kind() const override { return "uniform"; }

 private:
  double inv_width_;
};

class TruncatedExponential final : public CostDistribution {
 public:
  TruncatedExponential(double lower, double upper, double alpha)
      : CostDistribution(lower, upper), alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw InputError("truncated exponential: alpha must be positive");
    }
    // norm_ = 1 - exp(-alpha * width)
    norm_ = -std::expm1(-alpha_ * (upper_ - lower_));
  }

  double cdf(double c) const override {
    if (c <= lower_) return 0.0;
    if (c >= upper_) return 1.0;
    return -std::expm1(-alpha_ * (c - lower_)) / norm_;
  }

  double density(double c) const override {
    if (c < lower_ || c > upper_) return 0.0;
    return alpha_ * std::exp(-alpha_ * (c - lower_)) / norm_;
  }

  double quantile(double u) const override {
    if (u <= 0.0) return lower_;
    if (u >= 1.0) return upper_;
    return lower_ - std::log1p(-u * norm_) / alpha_;
  }

  std::string kind() const override { return "truncated-exponential"; }

 private:
  double alpha_;
  double norm_;
};

class UniformMixture final : public CostDistribution {
 public:
  UniformMixture(double w1, double a1, double b1, double a2, double b2)
      : CostDistribution(a1, std::max(b1, b2)),
        w1_(w1),
        a1_(a1),
        b1_(b1),
        a2_(a2),
        b2_(b2) {
    if (!(w1 > 0.0 && w1 < 1.0)) {
      throw InputError("uniform mixture: weight must be in (0, 1)");
    }
    if (!(a1 < b1 && a2 < b2 && a1 <= a2 && b1 <= b2)) {
      throw InputError(
          "uniform mixture: components must satisfy a1 < b1, a2 < b2, "
          "a1 <= a2, b1 <= b2");
    }
    d1_ = w1_ / (b1_ - a1_);
    d2_ = (1.0 - w1_) / (b2_ - a2_);
    // Breakpoints of the piecewise-linear cdf.
    std::vector<double> xs = {a1_, b1_, a2_, b2_};
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    breaks_ = xs;
    cdf_at_breaks_.resize(breaks_.size());
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      cdf_at_breaks_[i] = cdf_raw(breaks_[i]);
    }
    cdf_at_breaks_.back() = 1.0;
  }

  double cdf(double c) const override {
    if (c <= lower_) return 0.0;
    if (c >= upper_) return 1.0;
    return cdf_raw(c);
  }

  double density(double c) const override {
    double d = 0.0;
    if (c >= a1_ && c <= b1_) d += d1_;
    if (c >= a2_ && c <= b2_) d += d2_;
    return d;
  }

  double quantile(double u) const override {
    if (u <= 0.0) return lower_;
    if (u >= 1.0) return upper_;
    for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
      const double q0 = cdf_at_breaks_[i];
      const double q1 = cdf_at_breaks_[i + 1];
      if (u <= q1) {
        if (q1 == q0) return breaks_[i];  // flat segment: leftmost cost
        const double t = (u - q0) / (q1 - q0);
        return breaks_[i] + t * (breaks_[i + 1] - breaks_[i]);
      }
    }
    return upper_;
  }

  std::string kind() const override { return "uniform-mixture"; }

 private:
  double cdf_raw(double c) const {
    auto piece = [](double c, double a, double b) {
      if (c <= a) return 0.0;
      if (c >= b) return 1.0;
      return (c - a) / (b - a);
    };
    return w1_ * piece(c, a1_, b1_) + (1.0 - w1_) * piece(c, a2_, b2_);
  }

  double w1_, a1_, b1_, a2_, b2_;
  double d1_, d2_;
  std::vector<double> breaks_;
  std::vector<double> cdf_at_breaks_;
};

}  // namespace

DistPtr make_uniform(double lower, double upper) {
  return std::make_shared<Uniform>(lower, upper);
}

DistPtr make_truncated_exponential(double lower, double upper, double alpha) {
  return std::make_shared<TruncatedExponential>(lower, upper, alpha);
}

DistPtr make_uniform_mixture(double w1, double a1, double b1, double a2,
                             double b2) {
  return std::make_shared<UniformMixture>(w1, a1, b1, a2, b2);
}

}  // namespace dpa
