// Serial vs OpenMP kernels on a 1024 x 1024 field.
//   bench_kernels [n] [reps]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "nsac/initial.hpp"
#include "nsac/kernels.hpp"

namespace k = nsac::kernels;

namespace {

double best_of(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double ts, double tp) {
  std::printf("%-18s serial %9.3f ms   omp %9.3f ms   speedup %5.2f\n", name, 1e3 * ts, 1e3 * tp,
              ts / tp);
}

volatile double sink = 0.0;

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 1024;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 10;
  const std::size_t size = n * n;
  std::printf("n=%zu threads=%d reps=%d\n", n, k::thread_count(), reps);

  nsac::Rng rng(1);
  std::vector<double> a(size), b(size), out(size), w(size);
  for (std::size_t i = 0; i < size; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
    w[i] = rng.uniform();
  }
  std::vector<k::Complex> c(n * (n / 2 + 1));
  std::vector<double> f(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = {rng.normal(), rng.normal()};
    f[i] = rng.uniform();
  }
  std::vector<k::RowStencil> rows(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int first = j == 0 ? 0 : (j == n - 1 ? static_cast<int>(n) - 3 : static_cast<int>(j) - 1);
    rows[j] = {first, 3, {1.0, -2.0, 1.0, 0.0}};
  }
  const std::size_t nkx = n / 2 + 1;
  std::vector<double> lower(n, 1.0), diag(n, -4.0), upper(n, 1.0), shift_scale(n, 1.0), shift(nkx);
  for (std::size_t i = 0; i < nkx; ++i) shift[i] = -double(i * i);
  const k::TridiagonalBatch sys{lower, diag, upper, shift_scale, shift};

  report("multiply", best_of(reps, [&] { k::serial::multiply(a, b, out); }),
         best_of(reps, [&] { k::omp::multiply(a, b, out); }));
  report("axpby", best_of(reps, [&] { k::serial::axpby(0.5, a, 0.9, out); }),
         best_of(reps, [&] { k::omp::axpby(0.5, a, 0.9, out); }));
  report("double_well", best_of(reps, [&] { k::serial::double_well(a, 25.0, out); }),
         best_of(reps, [&] { k::omp::double_well(a, 25.0, out); }));
  report("scale", best_of(reps, [&] { k::serial::scale(c, f); }),
         best_of(reps, [&] { k::omp::scale(c, f); }));
  report("apply_rows", best_of(reps, [&] { k::serial::apply_rows(rows, a, out, n); }),
         best_of(reps, [&] { k::omp::apply_rows(rows, a, out, n); }));
  std::vector<k::Complex> rhs(c);
  report("solve_tridiagonal", best_of(reps, [&] { rhs = c; k::serial::solve_tridiagonal(sys, rhs, nkx); }),
         best_of(reps, [&] { rhs = c; k::omp::solve_tridiagonal(sys, rhs, nkx); }));
  report("weighted_dot", best_of(reps, [&] { sink = k::serial::weighted_dot(a, b, w); }),
         best_of(reps, [&] { sink = k::omp::weighted_dot(a, b, w); }));
  report("max_abs", best_of(reps, [&] { sink = k::serial::max_abs(a); }),
         best_of(reps, [&] { sink = k::omp::max_abs(a); }));

  const bool same = k::serial::weighted_dot(a, b, w) == k::omp::weighted_dot(a, b, w);
  std::printf("weighted_dot serial == omp: %s\n", same ? "yes" : "no");
  return same ? 0 : 1;
}
