#include "dpa/conversion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpa/errors.hpp"

namespace dpa {

ConversionCurve::ConversionCurve(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo <= hi)) {
    throw InputError("conversion curve: invalid price domain");
  }
}

double ConversionCurve::rate(double price) const {
  if (!in_domain(price)) {
    std::ostringstream os;
    os << "display price " << price << " outside the admissible domain ["
       << lo_ << ", " << hi_ << "]";
    throw InputError(os.str());
  }
  return std::clamp(rate_impl(price), 0.0, 1.0);
}

namespace {

class ConstantConversion final : public ConversionCurve {
 public:
  ConstantConversion(double level, double lo, double hi)
      : ConversionCurve(lo, hi), level_(level) {
    if (!(level >= 0.0 && level <= 1.0)) {
      throw InputError("constant conversion: level must be in [0, 1]");
    }
  }
  std::string kind() const override { return "constant"; }

 protected:
  double rate_impl(double) const override { return level_; }

 private:
  double level_;
};

class LinearConversion final : public ConversionCurve {
 public:
  LinearConversion(double intercept, double slope, double lo, double hi)
      : ConversionCurve(lo, hi), intercept_(intercept), slope_(slope) {}
  std::string kind() const override { return "linear"; }

 protected:
  double rate_impl(double p) const override { return intercept_ - slope_ * p; }

 private:
  double intercept_;
  double slope_;
};

class ExpDecayConversion final : public ConversionCurve {
 public:
  ExpDecayConversion(double alpha, double lo, double hi)
      : ConversionCurve(lo, hi), alpha_(alpha) {
    if (!(alpha >= 0.0)) {
      throw InputError("exp-decay conversion: alpha must be non-negative");
    }
  }
  std::string kind() const override { return "exp-decay"; }

 protected:
  double rate_impl(double p) const override { return std::exp(-alpha_ * p); }

 private:
  double alpha_;
};

class UnimodalConversion final : public ConversionCurve {
 public:
  UnimodalConversion(double lo, double hi) : ConversionCurve(lo, hi) {}
  std::string kind() const override { return "unimodal"; }

 protected:
  double rate_impl(double p) const override { return p * std::exp(-p); }
};

}  // namespace

ConvPtr make_constant_conversion(double level, double lo, double hi) {
  return std::make_shared<ConstantConversion>(level, lo, hi);
}

ConvPtr make_linear_conversion(double intercept, double slope, double lo,
                               double hi) {
  return std::make_shared<LinearConversion>(intercept, slope, lo, hi);
}

ConvPtr make_exp_decay_conversion(double alpha, double lo, double hi) {
  return std::make_shared<ExpDecayConversion>(alpha, lo, hi);
}

ConvPtr make_unimodal_conversion(double lo, double hi) {
  return std::make_shared<UnimodalConversion>(lo, hi);
}

}  // namespace dpa
