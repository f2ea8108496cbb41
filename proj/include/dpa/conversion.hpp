#pragma once

#include <memory>
#include <string>

namespace dpa {

// Conversion probability as a function of the display price, together with
// the closed interval of admissible prices. rate() is clamped to [0, 1] and
// rejects prices outside the domain.
class ConversionCurve {
 public:
  virtual ~ConversionCurve() = default;

  double domain_lower() const { return lo_; }
  double domain_upper() const { return hi_; }
  bool in_domain(double price) const { return price >= lo_ && price <= hi_; }

  double rate(double price) const;
  virtual std::string kind() const = 0;

 protected:
  ConversionCurve(double lo, double hi);
  virtual double rate_impl(double price) const = 0;

 private:
  double lo_;
  double hi_;
};

using ConvPtr = std::shared_ptr<const ConversionCurve>;

ConvPtr make_constant_conversion(double level, double lo, double hi);

// intercept - slope * p, clamped to [0, 1].
ConvPtr make_linear_conversion(double intercept, double slope, double lo,
                               double hi);

// exp(-alpha * p), clamped to [0, 1].
ConvPtr make_exp_decay_conversion(double alpha, double lo, double hi);

// p * exp(-p), clamped to [0, 1]; peaks at p = 1.
ConvPtr make_unimodal_conversion(double lo, double hi);

}  // namespace dpa
