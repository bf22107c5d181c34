#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "nsac/error.hpp"
#include "support.hpp"

using namespace nsac;
using namespace nsac::test;

namespace {

ErrorKind build_error(const GridSpec& s, std::string& msg) {
  try {
    build_grid(s);
  } catch (const Error& e) {
    msg = e.what();
    return e.kind();
  }
  FAIL("no error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("torus wavenumbers use the standard FFT layout") {
  GridSpec s;
  s.nx = 8;
  const auto g = build_grid(s);
  const std::vector<double> expect{0, 1, 2, 3, -4, -3, -2, -1};
  REQUIRE(g->wavenumbers_x().size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(g->wavenumbers_x()[i] == expect[i]);
  CHECK(g->nkx() == 5);
}

TEST_CASE("wavenumbers scale with 2 pi / lx") {
  GridSpec s;
  s.nx = 8;
  s.lx = kPi;
  const auto g = build_grid(s);
  CHECK(g->wavenumbers_x()[1] == doctest::Approx(2.0));
  CHECK(g->wavenumbers_x()[4] == doctest::Approx(-8.0));
}

TEST_CASE("uniform channel nodes include both walls") {
  const auto g = channel(8, 5);
  const std::vector<double> expect{0, 0.25, 0.5, 0.75, 1};
  REQUIRE(g->y().size() == 5);
  for (int j = 0; j < 5; ++j) CHECK(g->y()[j] == doctest::Approx(expect[j]).epsilon(1e-15));
}

TEST_CASE("stretched channel keeps walls, clusters nodes, and sums weights to the area") {
  const auto g = channel(16, 33, 2.5);
  CHECK(g->y().front() == 0.0);
  CHECK(g->y().back() == 1.0);
  const auto h = g->y_spacing();
  CHECK(h.front() < h[h.size() / 2]);
  for (std::size_t j = 1; j < g->y().size(); ++j) CHECK(g->y()[j] > g->y()[j - 1]);
  double total = 0.0;
  for (double w : g->quadrature_weights()) total += w;
  CHECK(total == doctest::Approx(2 * kPi * 1.0).epsilon(1e-13));
}

TEST_CASE("invalid specs are rejected naming the field") {
  std::string msg;
  GridSpec s;
  s.nx = 7;
  CHECK(build_error(s, msg) == ErrorKind::InvalidArgument);
  CHECK(msg.find("nx") != std::string::npos);

  s = GridSpec{};
  s.ny = 2;
  CHECK(build_error(s, msg) == ErrorKind::InvalidArgument);
  CHECK(msg.find("ny") != std::string::npos);

  s = GridSpec{};
  s.lx = 0.0;
  CHECK(build_error(s, msg) == ErrorKind::InvalidArgument);
  CHECK(msg.find("lx") != std::string::npos);

  s = GridSpec{};
  s.ly = -1.0;
  CHECK(build_error(s, msg) == ErrorKind::InvalidArgument);
  CHECK(msg.find("ly") != std::string::npos);
}

TEST_CASE("build_grid is deterministic") {
  const auto a = channel(16, 21, 1.5), b = channel(16, 21, 1.5);
  CHECK(std::vector<double>(a->y().begin(), a->y().end()) ==
        std::vector<double>(b->y().begin(), b->y().end()));
  CHECK(std::vector<double>(a->quadrature_weights().begin(), a->quadrature_weights().end()) ==
        std::vector<double>(b->quadrature_weights().begin(), b->quadrature_weights().end()));
}

TEST_CASE("dealias mask keeps modes below the 2/3 cutoff") {
  const auto g = torus(64);
  const auto mask = g->dealias_mask();
  for (int r = 0; r < g->ny(); ++r) {
    for (int c = 0; c < g->nkx(); ++c) {
      const bool keep = 3 * c < 64 && 3 * std::abs(g->mode_y(r)) < 64;
      CHECK(mask[std::size_t(r) * g->nkx() + c] == (keep ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("wall distance is nonnegative and zero exactly on the walls") {
  const auto g = channel(8, 17, 2.0);
  const auto rho = g->wall_distance();
  for (int j = 0; j < g->ny(); ++j) {
    for (int i = 0; i < g->nx(); ++i) {
      const double d = rho[std::size_t(j) * g->nx() + i];
      CHECK(d >= 0.0);
      CHECK((d == 0.0) == (j == 0 || j == g->ny() - 1));
    }
  }
}

TEST_CASE("spectral x-derivative is exact on band-limited data") {
  const auto g = torus(64);
  const auto f = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  const auto c = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  CHECK(max_diff(derivative(f, Axis::X, 1), c) < 1e-12);
  CHECK(max_diff(derivative(f, Axis::X, 2), -1.0 * f) < 1e-12);
}

TEST_CASE("y-derivative of a constant is exactly zero") {
  for (const auto& g : {torus(16), channel(16, 17, 2.0)}) {
    const ScalarField f(g, 3.25);
    for (int order : {1, 2}) {
      for (auto bc : {WallBc::Dirichlet, WallBc::Neumann}) {
        CHECK(max_abs(derivative(f, Axis::Y, order, bc)) == 0.0);
      }
    }
  }
}

TEST_CASE("channel d2/dy2 is second order") {
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const auto g = channel(8, n + 1);
    const auto f = ScalarField::from_function(g, [](double, double y) { return std::sin(kPi * y); });
    const auto exact = ScalarField::from_function(
        g, [](double, double y) { return -kPi * kPi * std::sin(kPi * y); });
    err.push_back(max_diff(derivative(f, Axis::Y, 2, WallBc::Dirichlet), exact));
  }
  // 32 -> 64 is still pre-asymptotic at the walls
  CHECK(err[0] / err[1] > 3.5);
  CHECK(err[1] / err[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("channel first derivative is second order on a stretched grid") {
  std::vector<double> err;
  for (int n : {32, 64, 128}) {
    const auto g = channel(8, n + 1, 2.0);
    const auto f = ScalarField::from_function(g, [](double, double y) { return std::cos(2 * y); });
    const auto exact =
        ScalarField::from_function(g, [](double, double y) { return -2 * std::sin(2 * y); });
    err.push_back(max_diff(derivative(f, Axis::Y, 1, WallBc::Dirichlet), exact));
  }
  CHECK(err[0] / err[1] > 3.0);
  CHECK(err[1] / err[2] > 3.0);
}

TEST_CASE("invert_laplacian examples") {
  const auto g = torus(32);
  const auto c = ScalarField::from_function(g, [](double x, double) { return std::cos(x); });
  CHECK(max_diff(invert_laplacian(c, PoissonBc::TorusZeroMean), -1.0 * c) < 1e-13);

  const ScalarField k(g, 2.0);
  try {
    invert_laplacian(k, PoissonBc::TorusZeroMean);
    FAIL("expected solvability error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Solvability);
    CHECK(std::string(e.what()).find("mean 2") != std::string::npos);
  }

  const auto ch = channel(8, 129);
  const auto s = ScalarField::from_function(ch, [](double, double y) { return std::sin(kPi * y); });
  const auto expect = ScalarField::from_function(
      ch, [](double, double y) { return -std::sin(kPi * y) / (kPi * kPi); });
  CHECK(max_diff(invert_laplacian(s, PoissonBc::DirichletZero), expect) < 1e-5);
}

TEST_CASE("channel Neumann inversion rejects a nonzero mean") {
  const auto ch = channel(8, 33);
  CHECK_THROWS_AS(invert_laplacian(ScalarField(ch, 1.0), PoissonBc::NeumannZero), Error);
  const auto f = ScalarField::from_function(ch, [](double x, double y) {
    return std::cos(kPi * y) + std::sin(x) * std::cos(2 * kPi * y);
  });
  const auto phi = invert_laplacian(f, PoissonBc::NeumannZero);
  CHECK(std::abs(integral(phi)) < 1e-10);
}

TEST_CASE("laplacian inverts invert_laplacian for zero-mean data") {
  Rng rng(11);
  const auto g = torus(32);
  ScalarField f = random_field(g, rng, 5);
  f -= ScalarField(g, integral(f) / (4 * kPi * kPi));
  const auto phi = invert_laplacian(f, PoissonBc::TorusZeroMean);
  CHECK(max_diff(laplacian(phi), f) < 1e-11);
  CHECK(std::abs(integral(phi)) < 1e-11);

  const auto ch = channel(16, 257, 1.0);
  const auto h = ScalarField::from_function(
      ch, [](double x, double y) { return std::sin(kPi * y) * (1 + std::cos(x)); });
  const auto psi = invert_laplacian(h, PoissonBc::DirichletZero);
  const auto lap = laplacian(psi);
  double worst = 0.0;
  for (int j = 1; j + 1 < ch->ny(); ++j) {
    for (int i = 0; i < ch->nx(); ++i) worst = std::max(worst, std::abs(lap(i, j) - h(i, j)));
  }
  CHECK(worst < 1e-10);
  for (int i = 0; i < ch->nx(); ++i) {
    CHECK(psi(i, 0) == 0.0);
    CHECK(psi(i, ch->ny() - 1) == 0.0);
  }
}

TEST_CASE("dealiasing is idempotent") {
  Rng rng(12);
  const auto g = torus(32);
  const auto f = random_field(g, rng, 15);
  auto c = to_spectral(f);
  dealias_in_place(*g, c);
  auto twice = c;
  dealias_in_place(*g, twice);
  CHECK(twice == c);
  const auto once = dealias(f);
  CHECK(max_diff(dealias(once), once) < 1e-14);
  CHECK(max_diff(once, f) > 1e-6);

  const auto ch = channel(32, 9);
  const auto h = ScalarField::from_function(ch, [](double x, double y) { return std::cos(14 * x) + y; });
  auto hc = to_spectral(h);
  dealias_in_place(*ch, hc);
  auto hc2 = hc;
  dealias_in_place(*ch, hc2);
  CHECK(hc2 == hc);
  CHECK(max_abs(dealias(h) - ScalarField::from_function(ch, [](double, double y) { return y; })) < 1e-14);
}

TEST_CASE("physical and spectral L2 norms agree") {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = torus(32);
    const auto f = random_field(g, rng, 10);
    const auto c = to_spectral(f);
    double sum = 0.0;
    for (int r = 0; r < g->ny(); ++r) {
      for (int col = 0; col < g->nkx(); ++col) {
        const double w = (col == 0 || 2 * col == g->nx()) ? 1.0 : 2.0;
        sum += w * std::norm(c[std::size_t(r) * g->nkx() + col]);
      }
    }
    const double n = double(g->size());
    const double spectral = std::sqrt(sum * 4 * kPi * kPi / (n * n));
    const double physical = norm(f, Norm::l2());
    CHECK(std::abs(spectral - physical) < 1e-12 * physical);
  }
}

TEST_CASE("transforms round trip") {
  Rng rng(14);
  for (const auto& g : {torus(16), channel(16, 9, 1.0)}) {
    ScalarField f(g);
    for (double& v : f.values()) v = rng.normal();
    CHECK(max_diff(from_spectral(g, to_spectral(f)), f) < 1e-13);
  }
}

TEST_CASE("fd_weights reproduce polynomials") {
  const std::vector<double> nodes{0.0, 0.1, 0.3, 0.35};
  const auto w2 = fd_weights(0.1, nodes, 2);
  double d2 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) d2 += w2[i] * nodes[i] * nodes[i];
  CHECK(d2 == doctest::Approx(2.0));
  const auto w1 = fd_weights(0.0, nodes, 1);
  double d1 = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) d1 += w1[i] * nodes[i] * nodes[i] * nodes[i];
  CHECK(std::abs(d1) < 1e-12);
}
