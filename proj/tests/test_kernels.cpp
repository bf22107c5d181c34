#include <cmath>
#include <vector>

#include "doctest.h"
#include "nsac/initial.hpp"
#include "nsac/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace k = nsac::kernels;
using nsac::Rng;

namespace {

// not a multiple of the reduction block
constexpr std::size_t kN = 3 * k::kReductionBlock + 517;

std::vector<double> random_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.normal();
  return v;
}

std::vector<k::Complex> random_cvec(Rng& rng, std::size_t n) {
  std::vector<k::Complex> v(n);
  for (auto& x : v) x = {rng.normal(), rng.normal()};
  return v;
}

}  // namespace

TEST_CASE("elementwise kernels agree bitwise") {
  Rng rng(1);
  const auto a = random_vec(rng, kN), b = random_vec(rng, kN);
  std::vector<double> s(kN), o(kN);

  k::serial::multiply(a, b, s);
  k::omp::multiply(a, b, o);
  CHECK(s == o);

  s = b;
  o = b;
  k::serial::axpby(0.3, a, -1.7, s);
  k::omp::axpby(0.3, a, -1.7, o);
  CHECK(s == o);

  k::serial::double_well(a, 25.0, s);
  k::omp::double_well(a, 25.0, o);
  CHECK(s == o);
  CHECK(s[7] == doctest::Approx((a[7] * a[7] * a[7] - a[7]) * 25.0));

  auto cs = random_cvec(rng, kN);
  auto co = cs;
  k::serial::scale(cs, a);
  k::omp::scale(co, a);
  CHECK(cs == co);
  k::serial::scale_imaginary(cs, b);
  k::omp::scale_imaginary(co, b);
  CHECK(cs == co);
}

TEST_CASE("scale_imaginary multiplies by i*factor") {
  std::vector<k::Complex> d{{1.0, 2.0}};
  std::vector<double> f{3.0};
  k::serial::scale_imaginary(d, f);
  CHECK(d[0] == k::Complex(-6.0, 3.0));
}

TEST_CASE("reductions agree bitwise and do not depend on thread count") {
  Rng rng(2);
  const auto a = random_vec(rng, kN), b = random_vec(rng, kN), w = random_vec(rng, kN);
  CHECK(k::serial::weighted_sum(a, w) == k::omp::weighted_sum(a, w));
  CHECK(k::serial::weighted_dot(a, b, w) == k::omp::weighted_dot(a, b, w));
  CHECK(k::serial::max_abs(a) == k::omp::max_abs(a));
#ifdef _OPENMP
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = k::omp::weighted_dot(a, b, w);
  omp_set_num_threads(3);
  const double three = k::omp::weighted_dot(a, b, w);
  omp_set_num_threads(saved);
  CHECK(one == three);
#endif
  CHECK(k::thread_count() >= 1);
}

TEST_CASE("apply_rows matches a direct stencil sum") {
  const std::size_t nx = 5, ny = 6;
  Rng rng(3);
  const auto in = random_vec(rng, nx * ny);
  std::vector<k::RowStencil> rows(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    rows[j].first = j == 0 ? 0 : (j + 1 == ny ? int(ny) - 3 : int(j) - 1);
    rows[j].width = 3;
    rows[j].weights = {1.0, -2.0, 0.5, 0.0};
  }
  std::vector<double> s(nx * ny), o(nx * ny);
  k::serial::apply_rows(rows, in, s, nx);
  k::omp::apply_rows(rows, in, o, nx);
  CHECK(s == o);
  const std::size_t i = 2, j = 3;
  const double direct = in[2 * nx + i] - 2.0 * in[3 * nx + i] + 0.5 * in[4 * nx + i];
  CHECK(s[j * nx + i] == doctest::Approx(direct));
}

TEST_CASE("tridiagonal batch solve") {
  const std::size_t n = 40, ncols = 7;
  Rng rng(4);
  std::vector<double> lower(n), diag(n), upper(n), scale(n, 1.0), shift(ncols);
  for (std::size_t j = 0; j < n; ++j) {
    lower[j] = rng.uniform() - 0.5;
    upper[j] = rng.uniform() - 0.5;
    diag[j] = 3.0 + rng.uniform();
  }
  for (std::size_t b = 0; b < ncols; ++b) shift[b] = double(b);
  const k::TridiagonalBatch sys{lower, diag, upper, scale, shift};
  const auto rhs = random_cvec(rng, n * ncols);
  auto xs = rhs, xo = rhs;
  k::serial::solve_tridiagonal(sys, xs, ncols);
  k::omp::solve_tridiagonal(sys, xo, ncols);
  CHECK(xs == xo);

  double worst = 0.0;
  for (std::size_t b = 0; b < ncols; ++b) {
    for (std::size_t j = 0; j < n; ++j) {
      k::Complex r = (diag[j] + shift[b]) * xs[j * ncols + b];
      if (j > 0) r += lower[j] * xs[(j - 1) * ncols + b];
      if (j + 1 < n) r += upper[j] * xs[(j + 1) * ncols + b];
      worst = std::max(worst, std::abs(r - rhs[j * ncols + b]));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("difference stencils map constants to exactly zero") {
  const std::size_t nx = 4, ny = 5;
  std::vector<k::RowStencil> rows(ny);
  for (std::size_t j = 0; j < ny; ++j) {
    rows[j] = k::RowStencil{int(std::min<std::size_t>(j, ny - 3)), 3, {0.1 / 3, -0.7, 0.7 - 0.1 / 3, 0.0}, true};
  }
  const std::vector<double> in(nx * ny, 1.2345678);
  std::vector<double> s(nx * ny, 9.0), o(nx * ny, 9.0);
  k::serial::apply_rows(rows, in, s, nx);
  k::omp::apply_rows(rows, in, o, nx);
  for (std::size_t n = 0; n < s.size(); ++n) {
    CHECK(s[n] == 0.0);
    CHECK(o[n] == 0.0);
  }
  Rng rng(5);
  const auto r = random_vec(rng, nx * ny);
  k::serial::apply_rows(rows, r, s, nx);
  k::omp::apply_rows(rows, r, o, nx);
  CHECK(s == o);
}
