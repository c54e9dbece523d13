// Serial reference vs OpenMP kernels. Prints wall time and the speedup; the
// results of each pair are compared for bit-identity.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "eemimo/design_optimizer.hpp"
#include "eemimo/mc_link_sim.hpp"

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %8.3f s  omp %8.3f s  speedup %5.2fx  %s\n", name, serial, parallel, serial / parallel,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  using namespace eemimo;
  std::printf("threads: %d\n", omp_get_max_threads());
  const PowerCoefficients coeffs = coefficients_from_hardware(HardwareProfile{});
  const PropagationModel propagation;
  const double a_lam = a_lambda(propagation);

  SearchSpace space = default_search_space(coeffs);
  DesignPoint serial_best, omp_best;
  const double t_serial = seconds([&] { serial_best = exhaustive_search_serial(space, coeffs, a_lam); });
  const double t_omp = seconds([&] { omp_best = exhaustive_search(space, coeffs, a_lam); });
  report("exhaustive M<=1000 K<=500", t_serial, t_omp,
         serial_best.antennas == omp_best.antennas && serial_best.users == omp_best.users &&
             serial_best.ee == omp_best.ee);

  for (const auto scheme : {mc::Scheme::kZf, mc::Scheme::kRzf, mc::Scheme::kMrt}) {
    mc::PrecoderSpec spec;
    spec.scheme = scheme;
    mc::McConfig config;
    config.trials = 2000;
    const mc::TrialBank bank(100, 40, coeffs.coherence_block, spec, propagation, config);
    mc::LinkStats a, b;
    const int sweeps = 50;
    const double ts = seconds([&] {
      for (int i = 0; i < sweeps; ++i) a = bank.evaluate_serial(0.5 + i);
    });
    const double tp = seconds([&] {
      for (int i = 0; i < sweeps; ++i) b = bank.evaluate(0.5 + i);
    });
    const std::string name = "trial bank " + mc::to_string(scheme) + " M=100 K=40";
    report(name.c_str(), ts, tp,
           a.rate_per_ue == b.rate_per_ue && a.tx_energy == b.tx_energy && a.sum_rate == b.sum_rate);
  }
  return 0;
}
