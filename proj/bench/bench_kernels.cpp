// Serial reference vs OpenMP kernels. Usage: bench_kernels [repeats]
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "asep/kernels.hpp"
#include "asep/simulator.hpp"

using namespace asep;

namespace {

double best_of(int repeats, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %9.4f s  parallel %9.4f s  speedup %5.2fx\n", name, serial, parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d\n", omp_get_max_threads());
  const ModelParams m(0.3);

  const auto circle = circle_rule(default_radius(m), 256);
  report("assemble_K n=256",
         best_of(repeats, [&] { kernels::serial::assemble_K(m, -3, 5, circle); }),
         best_of(repeats, [&] { kernels::parallel::assemble_K(m, -3, 5, circle); }));

  const auto interval = legendre_rule(-20, 20, 400);
  report("assemble_K0 n=400", best_of(repeats, [&] { kernels::serial::assemble_K0(m, interval); }),
         best_of(repeats, [&] { kernels::parallel::assemble_K0(m, interval); }));

  kernels::InnerContour inner;
  for (int l = 0; l < 800; ++l) {
    inner.prefactor.push_back(cplx(1e-3, 1e-3 * l));
    inner.exponent.push_back(cplx(-1e-3 * l, 0.01));
  }
  const auto outer = legendre_rule(0, 50, 120);
  report("assemble_K1 120x120x800",
         best_of(repeats, [&] { kernels::serial::assemble_K1(m, inner, outer); }),
         best_of(repeats, [&] { kernels::parallel::assemble_K1(m, inner, outer); }));

  auto h = kernels::serial::assemble_K(m, 0, 2, circle_rule(default_radius(m), 128));
  hessenberg_reduce(h);
  std::vector<cplx> mus;
  for (int j = 0; j < 512; ++j) mus.push_back(std::polar(1.05, 6.283185307179586 * j / 512));
  report("shifted_dets n=128 x 512",
         best_of(repeats, [&] { kernels::serial::shifted_dets(h, mus); }),
         best_of(repeats, [&] { kernels::parallel::shifted_dets(h, mus); }));

  const std::size_t n = 64;
  ComplexMatrix pair(n, n);
  std::vector<cplx> single(n, cplx(0.01, 0.01));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) pair(i, j) = cplx(0.5, 0.1);
  report("tensor_series_sum k=3 n=64",
         best_of(repeats, [&] { kernels::serial::tensor_series_sum(pair, single, 3); }),
         best_of(repeats, [&] { kernels::parallel::tensor_series_sum(pair, single, 3); }));

  SimConfig cfg;
  cfg.params = m;
  cfg.m = 2;
  cfg.t = 2;
  cfg.trials = 50000;
  cfg.seed = 1;
  report("simulate_trials 5e4", best_of(repeats, [&] { kernels::serial::simulate_trials(cfg); }),
         best_of(repeats, [&] { kernels::parallel::simulate_trials(cfg); }));
  return 0;
}
