#include "dpa/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpa/errors.hpp"
#include "dpa/rng.hpp"
#include "dpa/valuation.hpp"

namespace dpa {

namespace {

struct Instance {
  std::vector<double> true_costs;
  std::vector<double> reported_costs;
  std::vector<double> prices;
};

// Draw order is fixed (cost, report, price per advertiser) so every check is
// a pure function of (seed, sizes).
Instance draw_instance(const std::vector<AdvertiserModel>& advs,
                       RngStream& rng) {
  Instance inst;
  const std::size_t n = advs.size();
  inst.true_costs.resize(n);
  inst.reported_costs.resize(n);
  inst.prices.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    inst.true_costs[i] = advs[i].distribution->sample(rng);
    inst.reported_costs[i] = advs[i].distribution->sample(rng);
    inst.prices[i] = rng.uniform(advs[i].conversion->domain_lower(),
                                 advs[i].conversion->domain_upper());
  }
  return inst;
}

struct WorstPartial {
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
};

ViolationReport finish(const std::string& check, std::size_t instances,
                       double tolerance,
                       const std::vector<WorstPartial>& partials) {
  ViolationReport report;
  report.check = check;
  report.tolerance = tolerance;
  report.instances = instances;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : partials) {
    worst = std::max(worst, p.worst);
    report.violations += p.violations;
  }
  report.worst = std::isfinite(worst) ? std::max(worst, 0.0) : 0.0;
  if (!partials.empty() && std::isinf(worst) && worst > 0) {
    report.worst = worst;
  }
  report.pass = report.violations == 0;
  return report;
}

}  // namespace

CheckTarget make_target(const MechanismSpec& spec) {
  CheckTarget target;
  target.name = family_name(spec.family);
  target.ic_ir_certified = true;
  target.fn = [spec](const ReportProfile& profile,
                     const std::vector<AdvertiserModel>& advs) {
    return run(spec, profile, advs);
  };
  return target;
}

CheckTarget broken_first_price_target() {
  CheckTarget target;
  target.name = "broken-first-price";
  target.fn = [](const ReportProfile& profile,
                 const std::vector<AdvertiserModel>& advs) {
    Outcome out = run_wm_rp(profile, advs);
    if (out.winner) {
      const std::size_t w = *out.winner;
      out.payments[w] =
          value(profile[w].cost, profile[w].price, *advs[w].conversion);
    }
    return out;
  };
  return target;
}

CheckTarget broken_loser_fee_target(double fee) {
  CheckTarget target;
  target.name = "broken-loser-fee";
  target.fn = [fee](const ReportProfile& profile,
                    const std::vector<AdvertiserModel>& advs) {
    Outcome out = run_wm_rp(profile, advs);
    for (std::size_t i = 0; i < out.payments.size(); ++i) {
      if (out.allocations[i] == 0) out.payments[i] = fee;
    }
    return out;
  };
  return target;
}

CheckTarget broken_flat_fee_target(double fee) {
  CheckTarget target;
  target.name = "broken-flat-fee";
  target.fn = [fee](const ReportProfile& profile,
                    const std::vector<AdvertiserModel>& advs) {
    Outcome out = run_wm_rp(profile, advs);
    if (out.winner) out.payments[*out.winner] += fee;
    return out;
  };
  return target;
}

CheckTarget broken_median_target() {
  CheckTarget target;
  target.name = "broken-median";
  target.fn = [](const ReportProfile& profile,
                 const std::vector<AdvertiserModel>& advs) {
    const std::size_t n = profile.size();
    Outcome out;
    out.allocations.assign(n, 0);
    out.payments.assign(n, 0.0);
    if (n < 2) return out;
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = value(profile[i].cost, profile[i].price,
                        *advs[i].conversion);
    }
    // Runner-up value wins (the median for three bidders); free of charge.
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (values[i] > values[best]) best = i;
    }
    std::size_t second = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == best) continue;
      if (second == n || values[i] > values[second]) second = i;
    }
    out.winner = second;
    out.allocations[second] = 1;
    return out;
  };
  return target;
}

bool is_broken_family(const std::string& name) {
  return name == "broken-first-price" || name == "broken-loser-fee" ||
         name == "broken-flat-fee" || name == "broken-median";
}

CheckTarget target_by_name(const std::string& name,
                           const MechanismSpec& spec) {
  if (name == "broken-first-price") return broken_first_price_target();
  if (name == "broken-loser-fee") return broken_loser_fee_target();
  if (name == "broken-flat-fee") return broken_flat_fee_target();
  if (name == "broken-median") return broken_median_target();
  return make_target(spec);
}

ViolationReport ic_check(const CheckTarget& target,
                         const std::vector<AdvertiserModel>& advertisers,
                         std::size_t instances, std::size_t deviation_grid,
                         std::uint64_t seed, const ExecPolicy& policy) {
  if (instances < 1 || deviation_grid < 1) {
    throw InputError("ic check: instances and deviation grid must be >= 1");
  }
  const double tol = 1e-7;
  const std::size_t n = advertisers.size();
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kIc, k);
          const Instance inst = draw_instance(advertisers, rng);
          ReportProfile profile(n);
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {inst.reported_costs[j], inst.prices[j]};
          }
          double inst_worst = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < n; ++i) {
            const double c = inst.true_costs[i];
            const double p = inst.prices[i];
            const double v = value(c, p, *advertisers[i].conversion);
            profile[i].cost = c;
            const Outcome truthful = target.fn(profile, advertisers);
            const double u_truth =
                v * truthful.allocations[i] - truthful.payments[i];
            const double lo = advertisers[i].distribution->lower();
            const double hi = advertisers[i].distribution->upper();
            for (std::size_t d = 0; d < deviation_grid; ++d) {
              const double dev =
                  deviation_grid == 1
                      ? lo
                      : lo + (hi - lo) * static_cast<double>(d) /
                                 static_cast<double>(deviation_grid - 1);
              profile[i].cost = dev;
              const Outcome out = target.fn(profile, advertisers);
              const double u = v * out.allocations[i] - out.payments[i];
              inst_worst = std::max(inst_worst, u - u_truth);
            }
            profile[i].cost = inst.reported_costs[i];
          }
          part.worst = std::max(part.worst, inst_worst);
          if (inst_worst > tol) ++part.violations;
        }
        return part;
      });
  return finish("ic", instances, tol, partials);
}

ViolationReport ir_check(const CheckTarget& target,
                         const std::vector<AdvertiserModel>& advertisers,
                         std::size_t instances, std::uint64_t seed,
                         const ExecPolicy& policy) {
  if (instances < 1) throw InputError("ir check: instances must be >= 1");
  const double tol = 1e-9;
  const std::size_t n = advertisers.size();
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kIr, k);
          const Instance inst = draw_instance(advertisers, rng);
          ReportProfile profile(n);
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {inst.true_costs[j], inst.prices[j]};
          }
          const Outcome out = target.fn(profile, advertisers);
          double inst_worst = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < n; ++i) {
            const double v = value(inst.true_costs[i], inst.prices[i],
                                   *advertisers[i].conversion);
            const double u = v * out.allocations[i] - out.payments[i];
            inst_worst = std::max(inst_worst, -u);
          }
          part.worst = std::max(part.worst, inst_worst);
          if (inst_worst > tol) ++part.violations;
        }
        return part;
      });
  return finish("ir", instances, tol, partials);
}

ViolationReport wbb_check(const CheckTarget& target,
                          const std::vector<AdvertiserModel>& advertisers,
                          std::size_t instances, std::uint64_t seed,
                          const ExecPolicy& policy) {
  if (instances < 1) throw InputError("wbb check: instances must be >= 1");
  const double tol = 1e-12;
  const std::size_t n = advertisers.size();
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kWbb, k);
          const Instance inst = draw_instance(advertisers, rng);
          ReportProfile profile(n);
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {inst.reported_costs[j], inst.prices[j]};
          }
          const Outcome out = target.fn(profile, advertisers);
          const double deficit = -out.total_payment();
          part.worst = std::max(part.worst, deficit);
          if (deficit > tol) ++part.violations;
        }
        return part;
      });
  return finish("wbb", instances, tol, partials);
}

ViolationReport monotonicity_check(
    const CheckTarget& target, const std::vector<AdvertiserModel>& advertisers,
    std::size_t instances, std::size_t cost_grid, std::uint64_t seed,
    const ExecPolicy& policy) {
  if (instances < 1 || cost_grid < 2) {
    throw InputError("monotonicity check: need instances >= 1, grid >= 2");
  }
  const std::size_t n = advertisers.size();
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kMono, k);
          const Instance inst = draw_instance(advertisers, rng);
          ReportProfile profile(n);
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {inst.reported_costs[j], inst.prices[j]};
          }
          bool violated = false;
          for (std::size_t i = 0; i < n && !violated; ++i) {
            const double lo = advertisers[i].distribution->lower();
            const double hi = advertisers[i].distribution->upper();
            int prev = 1;
            for (std::size_t g = 0; g < cost_grid; ++g) {
              profile[i].cost = lo + (hi - lo) * static_cast<double>(g) /
                                         static_cast<double>(cost_grid - 1);
              const Outcome out = target.fn(profile, advertisers);
              const int alloc = out.allocations[i];
              if (alloc > prev) {
                violated = true;
                break;
              }
              prev = alloc;
            }
            profile[i].cost = inst.reported_costs[i];
          }
          if (violated) {
            ++part.violations;
            part.worst = std::max(part.worst, 1.0);
          }
        }
        return part;
      });
  return finish("mono", instances, 0.0, partials);
}

ViolationReport payment_identity_check(
    const CheckTarget& target, const std::vector<AdvertiserModel>& advertisers,
    std::size_t instances, std::uint64_t seed, const ExecPolicy& policy) {
  if (instances < 1) throw InputError("payment check: instances must be >= 1");
  const double tol = 1e-4;
  const std::size_t n = advertisers.size();
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kPayment, k);
          const Instance inst = draw_instance(advertisers, rng);
          ReportProfile profile(n);
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {inst.reported_costs[j], inst.prices[j]};
          }
          const Outcome out = target.fn(profile, advertisers);
          if (!out.winner) continue;
          const std::size_t w = *out.winner;
          const double charged = out.payments[w];
          const double c0 = profile[w].cost;
          const double p = profile[w].price;
          const double upper = advertisers[w].distribution->upper();

          // Locate the allocation drop along w's cost axis by bisection on
          // the mechanism's allocation alone; the indicator of a monotone
          // mechanism has a single jump, so the integral is the jump point
          // minus the reported cost.
          auto wins_at = [&](double z) {
            ReportProfile probe = profile;
            probe[w].cost = z;
            return target.fn(probe, advertisers).allocations[w] == 1;
          };
          double threshold;
          if (c0 >= upper) {
            threshold = c0;
          } else if (wins_at(upper)) {
            threshold = upper;
          } else {
            double lo = c0;
            double hi = upper;
            for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
              const double mid = 0.5 * (lo + hi);
              if (wins_at(mid)) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            threshold = 0.5 * (lo + hi);
          }
          const double rate = advertisers[w].conversion->rate(p);
          const double reconstructed =
              value(c0, p, *advertisers[w].conversion) -
              rate * (threshold - c0);
          const double residual = std::abs(reconstructed - charged);
          part.worst = std::max(part.worst, residual);
          if (residual > tol) ++part.violations;
        }
        return part;
      });
  return finish("payment", instances, tol, partials);
}

ViolationReport efrp_check(const CheckTarget& target,
                           const std::vector<AdvertiserModel>& advertisers,
                           std::size_t instances, std::uint64_t seed,
                           const ExecPolicy& policy) {
  if (instances < 1) throw InputError("efrp check: instances must be >= 1");
  const double tol = 1e-12;
  const std::size_t n = advertisers.size();
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kEfrp, k);
          const Instance inst = draw_instance(advertisers, rng);
          ReportProfile profile(n);
          double best = 0.0;  // the no-sale outcome is always available
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {inst.true_costs[j], inst.prices[j]};
            best = std::max(best, value(inst.true_costs[j], inst.prices[j],
                                        *advertisers[j].conversion));
          }
          const Outcome out = target.fn(profile, advertisers);
          double welfare = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (out.allocations[j]) {
              welfare += value(inst.true_costs[j], inst.prices[j],
                               *advertisers[j].conversion);
            }
          }
          const double gap = best - welfare;
          part.worst = std::max(part.worst, gap);
          if (gap > tol) ++part.violations;
        }
        return part;
      });
  return finish("efrp", instances, tol, partials);
}

ViolationReport ef_check(const std::vector<AdvertiserModel>& advertisers,
                         std::size_t instances, const PriceGrid& grid,
                         std::uint64_t seed, const ExecPolicy& policy) {
  if (instances < 1) throw InputError("ef check: instances must be >= 1");
  const double tol = 1e-9;
  const std::size_t n = advertisers.size();
  std::vector<std::vector<double>> prices(n);
  for (std::size_t j = 0; j < n; ++j) {
    prices[j] = admissible_prices(grid, *advertisers[j].conversion);
  }
  auto partials = map_batches<WorstPartial>(
      instances, policy, [&](std::size_t, std::size_t begin, std::size_t end) {
        WorstPartial part;
        for (std::size_t k = begin; k < end; ++k) {
          RngStream rng = RngStream::substream(seed, stream_tag::kEf, k);
          ReportProfile profile(n);
          double best = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            const double c = advertisers[j].distribution->sample(rng);
            // Equilibrium display price: per-cost argmax of the value.
            double best_p = prices[j].front();
            double best_v = -std::numeric_limits<double>::infinity();
            for (double p : prices[j]) {
              const double v = (p - c) * advertisers[j].conversion->rate(p);
              if (v > best_v) {
                best_v = v;
                best_p = p;
              }
            }
            profile[j] = {c, best_p};
            best = std::max(best, best_v);
          }
          const Outcome out = run_wm_rp(profile, advertisers);
          double welfare = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (out.allocations[j]) {
              welfare += value(profile[j].cost, profile[j].price,
                               *advertisers[j].conversion);
            }
          }
          const double gap = std::abs(best - welfare);
          part.worst = std::max(part.worst, gap);
          if (gap > tol) ++part.violations;
        }
        return part;
      });
  return finish("ef", instances, tol, partials);
}

EquivalenceReport revenue_equivalence_check(
    const MechanismSpec& spec, const std::vector<AdvertiserModel>& advertisers,
    const std::vector<double>& fixed_prices, std::size_t samples,
    std::uint64_t seed, const ExecPolicy& policy) {
  if (samples < 2) {
    throw InputError("revenue equivalence: samples must be >= 2");
  }
  const std::size_t n = advertisers.size();
  if (fixed_prices.size() != n) {
    throw InputError("revenue equivalence: one fixed price per advertiser");
  }
  spec.validate(n);

  struct Partial {
    double rev = 0.0, rev2 = 0.0;
    double vw = 0.0, vw2 = 0.0;
    double d = 0.0, d2 = 0.0;
  };
  auto partials = map_batches<Partial>(
      samples, policy,
      [&](std::size_t batch, std::size_t begin, std::size_t end) {
        Partial part;
        RngStream rng = RngStream::substream(seed, stream_tag::kRevEq, batch);
        ReportProfile profile(n);
        for (std::size_t s = begin; s < end; ++s) {
          for (std::size_t j = 0; j < n; ++j) {
            profile[j] = {advertisers[j].distribution->sample(rng),
                          fixed_prices[j]};
          }
          const Outcome out = run(spec, profile, advertisers);
          const double rev = out.total_payment();
          double vw = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            if (out.allocations[j]) {
              vw += virtual_value(profile[j].cost, profile[j].price,
                                  *advertisers[j].distribution,
                                  *advertisers[j].conversion);
            }
          }
          const double d = rev - vw;
          part.rev += rev;
          part.rev2 += rev * rev;
          part.vw += vw;
          part.vw2 += vw * vw;
          part.d += d;
          part.d2 += d * d;
        }
        return part;
      });

  Partial total;
  for (const auto& p : partials) {
    total.rev += p.rev;
    total.rev2 += p.rev2;
    total.vw += p.vw;
    total.vw2 += p.vw2;
    total.d += p.d;
    total.d2 += p.d2;
  }
  const double ns = static_cast<double>(samples);
  auto se = [ns](double sum, double sumsq) {
    const double mean = sum / ns;
    const double var = std::max(0.0, (sumsq - ns * mean * mean) / (ns - 1.0));
    return std::sqrt(var / ns);
  };
  EquivalenceReport report;
  report.samples = samples;
  report.revenue = total.rev / ns;
  report.revenue_se = se(total.rev, total.rev2);
  report.virtual_welfare = total.vw / ns;
  report.virtual_welfare_se = se(total.vw, total.vw2);
  report.difference = total.d / ns;
  report.difference_se = se(total.d, total.d2);
  report.pass =
      std::abs(report.difference) <= 3.0 * report.difference_se + 1e-12;
  return report;
}

}  // namespace dpa
