// Times the OpenMP batch kernels against their serial references on a
// synthetic workload and prints one row per kernel.

#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <functional>

#include "spsdgeo/batch.hpp"
#include "spsdgeo/spsd.hpp"
#include "spsdgeo/synth.hpp"
#include "spsdgeo/transport.hpp"

using namespace spsdgeo;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  double best = 1e300;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    best = std::min(
        best, std::chrono::duration<double, std::milli>(stop - start).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-24s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  int d = 40, r = 5, n = 400, repeats = 3;
  std::uint64_t seed = 7;
  CLI::App app{"serial vs OpenMP batch kernel timings"};
  app.add_option("--d", d);
  app.add_option("--r", r);
  app.add_option("--n", n);
  app.add_option("--seed", seed);
  app.add_option("--repeats", repeats);
  CLI11_PARSE(app, argc, argv);

  SynthConfig cfg;
  cfg.d = d;
  cfg.r = r;
  cfg.classes = 2;
  cfg.per_class = (n + 1) / 2;
  cfg.seed = seed;
  cfg.noise_scale = 0.2;
  const SynthData data = synth_generate(cfg);
  const std::vector<Matrix> dense = data.source.compose_all();

  std::printf("items=%d d=%d r=%d threads=%d\n", static_cast<int>(dense.size()),
              d, r, omp_get_max_threads());
  std::printf("%-24s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  report("factor",
         time_ms([&] { batch::factor_serial(dense, r); }, repeats),
         time_ms([&] { batch::factor(dense, r); }, repeats));

  const std::vector<SpsdPoint> points = batch::factor(dense, r);
  const CanonicalSet canon = spsd_canonicalize(points);

  report("align_to",
         time_ms([&] { batch::align_to_serial(canon.mean_frame, points); }, repeats),
         time_ms([&] { batch::align_to(canon.mean_frame, points); }, repeats));

  report("log_at",
         time_ms([&] { batch::log_at_serial(canon.mean(), points); }, repeats),
         time_ms([&] { batch::log_at(canon.mean(), points); }, repeats));

  DaConfig da_cfg;
  da_cfg.rank = r;
  const SpsdPoint target_mean =
      spsd_mean(batch::factor(data.target.compose_all(), r));
  const SpsdTransport transport =
      build_spsd_transport(canon.mean(), spsd_compose(target_mean), da_cfg);
  report("apply_transport",
         time_ms([&] { batch::apply_transport_serial(transport, canon.items); }, repeats),
         time_ms([&] { batch::apply_transport(transport, canon.items); }, repeats));

  report("compose",
         time_ms([&] { batch::compose_serial(points); }, repeats),
         time_ms([&] { batch::compose(points); }, repeats));

  report("pairwise_curve_length",
         time_ms([&] { batch::pairwise_curve_length_serial(points); }, repeats),
         time_ms([&] { batch::pairwise_curve_length(points); }, repeats));

  return 0;
}
