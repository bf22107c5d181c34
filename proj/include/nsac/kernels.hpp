#pragma once

// Data-parallel inner loops shared by the solvers.
//
// Every kernel exists twice: `serial::` is the straightforward reference
// loop kept for testing, `omp::` is the OpenMP version the library calls.
// Reductions in `omp::` sum fixed-size blocks and then combine the block
// partials in index order, so their result does not depend on the number
// of threads.

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace nsac::kernels {

using Complex = std::complex<double>;

/// Block length used by the deterministic reductions.
inline constexpr std::size_t kReductionBlock = 4096;

/// Three- or four-point stencil applied along y for one output row:
/// out(i, row) = sum_k weights[k] * in(i, first + k).
/// With `difference` set (weights summing to zero) it is evaluated as
/// sum_k weights[k] * (in(i, first + k) - in(i, first)), so constants give exactly 0.
struct RowStencil {
  int first = 0;
  int width = 0;
  std::array<double, 4> weights{};
  bool difference = false;
};

/// Tridiagonal system along y, one per spectral column b:
///   lower[j] x[j-1] + (diag[j] + shift[b] * shift_scale[j]) x[j] + upper[j] x[j+1] = rhs[j]
/// lower[0] and upper[n-1] are ignored.
struct TridiagonalBatch {
  std::span<const double> lower;
  std::span<const double> diag;
  std::span<const double> upper;
  std::span<const double> shift_scale;
  std::span<const double> shift;
};

namespace serial {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
void double_well(std::span<const double> phi, double inv_eps2, std::span<double> out);
void scale(std::span<Complex> data, std::span<const double> factor);
void scale_imaginary(std::span<Complex> data, std::span<const double> factor);
void apply_rows(std::span<const RowStencil> rows, std::span<const double> in, std::span<double> out,
                std::size_t nx);
void solve_tridiagonal(const TridiagonalBatch& sys, std::span<Complex> rhs, std::size_t ncols);
double weighted_sum(std::span<const double> values, std::span<const double> weights);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> weights);
double max_abs(std::span<const double> values);

}  // namespace serial

namespace omp {

void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out);
void axpby(double alpha, std::span<const double> x, double beta, std::span<double> y);
void double_well(std::span<const double> phi, double inv_eps2, std::span<double> out);
void scale(std::span<Complex> data, std::span<const double> factor);
void scale_imaginary(std::span<Complex> data, std::span<const double> factor);
void apply_rows(std::span<const RowStencil> rows, std::span<const double> in, std::span<double> out,
                std::size_t nx);
void solve_tridiagonal(const TridiagonalBatch& sys, std::span<Complex> rhs, std::size_t ncols);
double weighted_sum(std::span<const double> values, std::span<const double> weights);
double weighted_dot(std::span<const double> a, std::span<const double> b,
                    std::span<const double> weights);
double max_abs(std::span<const double> values);

}  // namespace omp

/// Number of threads the `omp::` kernels will use (1 without OpenMP).
int thread_count();

}  // namespace nsac::kernels
