#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dpa/equilibrium.hpp"
#include "dpa/mechanisms.hpp"
#include "dpa/parallel.hpp"

namespace dpa {

using MechanismFn =
    std::function<Outcome(const ReportProfile&,
                          const std::vector<AdvertiserModel>&)>;

// A mechanism under test. The four real families are certified IC/IR by
// construction; the deliberately broken fixtures are not.
struct CheckTarget {
  std::string name;
  MechanismFn fn;
  bool ic_ir_certified = false;
};

CheckTarget make_target(const MechanismSpec& spec);

// Fixtures the suite must be able to reject, each breaking one property of
// the welfare maximizer:
//  - first price: the winner pays her own reported value (not truthful)
//  - loser fee: losers are charged a flat fee (not individually rational)
//  - flat fee: the winner pays an extra flat fee (wrong payment identity)
//  - runner-up allocation: the second-highest value wins (not monotone)
CheckTarget broken_first_price_target();
CheckTarget broken_loser_fee_target(double fee = 0.01);
CheckTarget broken_flat_fee_target(double fee = 0.05);
CheckTarget broken_median_target();

CheckTarget target_by_name(const std::string& name, const MechanismSpec& spec);
bool is_broken_family(const std::string& name);

struct ViolationReport {
  std::string check;
  bool pass = true;
  double worst = 0.0;        // largest violation magnitude observed
  double tolerance = 0.0;
  std::size_t instances = 0;
  std::size_t violations = 0;
};

// Truthful utility vs every deviating cost report on a uniform grid over the
// support; violation = deviation utility - truthful utility.
ViolationReport ic_check(const CheckTarget& target,
                         const std::vector<AdvertiserModel>& advertisers,
                         std::size_t instances, std::size_t deviation_grid,
                         std::uint64_t seed, const ExecPolicy& policy = {});

// Truthful utility must be non-negative on every sampled instance.
ViolationReport ir_check(const CheckTarget& target,
                         const std::vector<AdvertiserModel>& advertisers,
                         std::size_t instances, std::uint64_t seed,
                         const ExecPolicy& policy = {});

// Total payments must be non-negative on every sampled instance.
ViolationReport wbb_check(const CheckTarget& target,
                          const std::vector<AdvertiserModel>& advertisers,
                          std::size_t instances, std::uint64_t seed,
                          const ExecPolicy& policy = {});

// Sweeping one advertiser's reported cost upward must never flip her
// allocation from 0 to 1.
ViolationReport monotonicity_check(
    const CheckTarget& target, const std::vector<AdvertiserModel>& advertisers,
    std::size_t instances, std::size_t cost_grid, std::uint64_t seed,
    const ExecPolicy& policy = {});

// Reconstructs each winner's payment from the allocation indicator alone:
// the single drop of the indicator along the cost axis is located by
// bisection and the integral evaluates to (threshold - reported cost).
ViolationReport payment_identity_check(
    const CheckTarget& target, const std::vector<AdvertiserModel>& advertisers,
    std::size_t instances, std::uint64_t seed, const ExecPolicy& policy = {});

// Realized welfare must equal the best achievable single-slot welfare at the
// reported prices (zero when every value is negative).
ViolationReport efrp_check(const CheckTarget& target,
                           const std::vector<AdvertiserModel>& advertisers,
                           std::size_t instances, std::uint64_t seed,
                           const ExecPolicy& policy = {});

// Runs the welfare maximizer with truthful costs and per-cost equilibrium
// prices; realized welfare must match a grid brute force over all prices.
ViolationReport ef_check(const std::vector<AdvertiserModel>& advertisers,
                         std::size_t instances, const PriceGrid& grid,
                         std::uint64_t seed, const ExecPolicy& policy = {});

struct EquivalenceReport {
  double revenue = 0.0;
  double revenue_se = 0.0;
  double virtual_welfare = 0.0;
  double virtual_welfare_se = 0.0;
  double difference = 0.0;
  double difference_se = 0.0;
  std::size_t samples = 0;
  bool pass = false;
};

// Expected revenue vs expected allocated virtual value under truthful play
// at fixed prices. Only the certified IC/IR families are accepted.
EquivalenceReport revenue_equivalence_check(
    const MechanismSpec& spec, const std::vector<AdvertiserModel>& advertisers,
    const std::vector<double>& fixed_prices, std::size_t samples,
    std::uint64_t seed, const ExecPolicy& policy = {});

}  // namespace dpa
