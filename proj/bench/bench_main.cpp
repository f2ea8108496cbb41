// Compares the OpenMP batch driver against the serial reference on the
// Monte Carlo engine and verifies the two produce bit-identical statistics.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dpa/simulation.hpp"

using namespace dpa;

namespace {

double time_run(const Scenario& scenario, SimStats& stats) {
  const auto t0 = std::chrono::steady_clock::now();
  stats = run_experiment(scenario);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Scenario make_scenario(MechanismFamily family, std::size_t samples) {
  Scenario sc;
  for (std::size_t i = 0; i < 4; ++i) {
    sc.advertisers.push_back(make_advertiser(
        i, make_uniform(0.0, 1.0), make_constant_conversion(1.0, 0.0, 1.0)));
  }
  sc.mechanism.family = family;
  sc.price_mode = PriceMode::Fixed;
  sc.fixed_prices = {1.0, 1.0, 1.0, 1.0};
  sc.samples = samples;
  sc.seed = 7;
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t samples = 2000000;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--samples") == 0) {
      samples = static_cast<std::size_t>(std::strtoull(argv[i + 1], nullptr,
                                                       10));
    }
  }
#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("samples: %zu, threads: %d\n", samples, threads);

  bool ok = true;
  for (MechanismFamily family :
       {MechanismFamily::WmRp, MechanismFamily::VwmRp}) {
    Scenario parallel = make_scenario(family, samples);
    Scenario serial = parallel;
    serial.exec.parallel = false;

    SimStats ps, ss;
    const double tp = time_run(parallel, ps);
    const double ts = time_run(serial, ss);
    const bool identical =
        ps.revenue == ss.revenue && ps.revenue_se == ss.revenue_se &&
        ps.welfare == ss.welfare && ps.welfare_se == ss.welfare_se &&
        ps.sale_probability == ss.sale_probability &&
        ps.win_frequency == ss.win_frequency;
    ok = ok && identical;
    std::printf(
        "%-7s serial %.3fs | openmp %.3fs | speedup %.2fx | revenue %.6f | "
        "bitwise %s\n",
        family_name(family).c_str(), ts, tp, ts / tp, ps.revenue,
        identical ? "equal" : "DIFFERENT");
  }
  if (!ok) {
    std::printf("bench: FAILURE — parallel and serial results differ\n");
    return 1;
  }
  std::printf("bench: parallel results are bit-identical to the serial "
              "reference\n");
  return 0;
}
