#include "nsac/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nsac::kernels {

namespace {

// Thomas algorithm for one column; `work` must hold n doubles.
void thomas_column(const TridiagonalBatch& sys, Complex* rhs, std::size_t n, std::size_t stride,
                   double shift, double* work) {
  auto diag = [&](std::size_t j) { return sys.diag[j] + shift * sys.shift_scale[j]; };
  double denom = diag(0);
  work[0] = n > 1 ? sys.upper[0] / denom : 0.0;
  rhs[0] /= denom;
  for (std::size_t j = 1; j < n; ++j) {
    denom = diag(j) - sys.lower[j] * work[j - 1];
    work[j] = j + 1 < n ? sys.upper[j] / denom : 0.0;
    rhs[j * stride] = (rhs[j * stride] - sys.lower[j] * rhs[(j - 1) * stride]) / denom;
  }
  for (std::size_t j = n - 1; j-- > 0;) {
    rhs[j * stride] -= work[j] * rhs[(j + 1) * stride];
  }
}

}  // namespace

namespace serial {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = alpha * x[i] + beta * y[i];
}

void double_well(std::span<const double> phi, double inv_eps2, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double p = phi[i];
    out[i] = (p * p * p - p) * inv_eps2;
  }
}

void scale(std::span<Complex> data, std::span<const double> factor) {
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= factor[i];
}

void scale_imaginary(std::span<Complex> data, std::span<const double> factor) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = Complex(-data[i].imag() * factor[i], data[i].real() * factor[i]);
  }
}

void apply_rows(std::span<const RowStencil> rows, std::span<const double> in, std::span<double> out,
                std::size_t nx) {
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const RowStencil& s = rows[j];
    for (std::size_t i = 0; i < nx; ++i) {
      const double base = s.difference ? in[s.first * nx + i] : 0.0;
      double acc = 0.0;
      for (int k = 0; k < s.width; ++k) acc += s.weights[k] * (in[(s.first + k) * nx + i] - base);
      out[j * nx + i] = acc;
    }
  }
}

void solve_tridiagonal(const TridiagonalBatch& sys, std::span<Complex> rhs, std::size_t ncols) {
  const std::size_t n = sys.diag.size();
  std::vector<double> work(n);
  for (std::size_t b = 0; b < ncols; ++b) {
    thomas_column(sys, rhs.data() + b, n, ncols, sys.shift[b], work.data());
  }
}

// Sums are taken per kReductionBlock block and then over blocks, the same
// order as the parallel versions, so both give identical bits.
double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < values.size(); lo += kReductionBlock) {
    const std::size_t hi = std::min(values.size(), lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += values[i] * weights[i];
    total += acc;
  }
  return total;
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t lo = 0; lo < a.size(); lo += kReductionBlock) {
    const std::size_t hi = std::min(a.size(), lo + kReductionBlock);
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i] * weights[i];
    total += acc;
  }
  return total;
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace serial

namespace omp {

namespace {

template <class BlockFn>
double blocked_reduce(std::size_t n, BlockFn&& block_sum) {
  const std::size_t nblocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(nblocks, 0.0);
  const auto nb = static_cast<std::ptrdiff_t>(nblocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    partial[b] = block_sum(lo, hi);
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc;
}

}  // namespace

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) y[i] = alpha * x[i] + beta * y[i];
}

void double_well(std::span<const double> phi, double inv_eps2, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double p = phi[i];
    out[i] = (p * p * p - p) * inv_eps2;
  }
}

void scale(std::span<Complex> data, std::span<const double> factor) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) data[i] *= factor[i];
}

void scale_imaginary(std::span<Complex> data, std::span<const double> factor) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    data[i] = Complex(-data[i].imag() * factor[i], data[i].real() * factor[i]);
  }
}

void apply_rows(std::span<const RowStencil> rows, std::span<const double> in, std::span<double> out,
                std::size_t nx) {
  const auto ny = static_cast<std::ptrdiff_t>(rows.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < ny; ++j) {
    const RowStencil& s = rows[j];
    double* dst = out.data() + j * nx;
    for (std::size_t i = 0; i < nx; ++i) dst[i] = 0.0;
    const double* base = in.data() + s.first * nx;
    for (int k = 0; k < s.width; ++k) {
      const double w = s.weights[k];
      const double* src = in.data() + (s.first + k) * nx;
      if (s.difference) {
        for (std::size_t i = 0; i < nx; ++i) dst[i] += w * (src[i] - base[i]);
      } else {
        for (std::size_t i = 0; i < nx; ++i) dst[i] += w * src[i];
      }
    }
  }
}

void solve_tridiagonal(const TridiagonalBatch& sys, std::span<Complex> rhs, std::size_t ncols) {
  const std::size_t n = sys.diag.size();
  const auto nc = static_cast<std::ptrdiff_t>(ncols);
#pragma omp parallel
  {
    std::vector<double> work(n);
#pragma omp for schedule(static)
    for (std::ptrdiff_t b = 0; b < nc; ++b) {
      thomas_column(sys, rhs.data() + b, n, ncols, sys.shift[b], work.data());
    }
  }
}

double weighted_sum(std::span<const double> values, std::span<const double> weights) {
  return blocked_reduce(values.size(), [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += values[i] * weights[i];
    return acc;
  });
}

double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> weights) {
  return blocked_reduce(a.size(), [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += a[i] * b[i] * weights[i];
    return acc;
  });
}

double max_abs(std::span<const double> values) {
  double m = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(values[i]));
  return m;
}

}  // namespace omp

int thread_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace nsac::kernels
