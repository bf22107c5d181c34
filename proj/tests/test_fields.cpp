#include <cmath>

#include "doctest.h"
#include "nsac/error.hpp"
#include "support.hpp"

using namespace nsac;
using namespace nsac::test;

namespace {

double max_div(const VectorField& u) { return max_abs(divergence(u)); }

}  // namespace

TEST_CASE("leray_project leaves divergence-free fields unchanged") {
  const auto g = torus(64);
  const auto xi = ScalarField::from_function(
      g, [](double x, double y) { return std::sin(2 * x) * std::cos(y) + 0.3 * std::cos(x + 3 * y); });
  VectorField u(derivative(xi, Axis::Y, 1), derivative(xi, Axis::X, 1));
  u.x *= -1.0;
  const auto p = leray_project(u);
  CHECK(max_diff(p.x, u.x) < 1e-12);
  CHECK(max_diff(p.y, u.y) < 1e-12);
}

TEST_CASE("leray_project removes gradients") {
  const auto g = torus(64);
  const auto q = ScalarField::from_function(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
  const auto p = leray_project(gradient(q));
  CHECK(max_abs(p.x) < 1e-12);
  CHECK(max_abs(p.y) < 1e-12);

  const VectorField s(ScalarField::from_function(g, [](double x, double) { return std::sin(x); }),
                      ScalarField(g));
  const auto ps = leray_project(s);
  CHECK(max_abs(ps.x) < 1e-12);
  CHECK(max_abs(ps.y) < 1e-12);
}

TEST_CASE("leray_project is idempotent, orthogonal and divergence-free") {
  Rng rng(21);
  const auto g = torus(32);
  for (int trial = 0; trial < 5; ++trial) {
    const VectorField u(random_field(g, rng, 8), random_field(g, rng, 8));
    const auto p = leray_project(u);
    const auto pp = leray_project(p);
    CHECK(max_diff(pp.x, p.x) < 1e-13);
    CHECK(max_diff(pp.y, p.y) < 1e-13);
    CHECK(std::abs(inner(u - p, p)) < 1e-10);
    CHECK(max_div(p) < 1e-10);
  }
}

TEST_CASE("leray_project rejects the channel") {
  const auto ch = channel(8, 9);
  try {
    leray_project(VectorField(ch));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedGeometry);
  }
}

TEST_CASE("norm examples") {
  const auto g = torus(64);
  CHECK(norm(ScalarField(g, 1.0), Norm::l2()) == doctest::Approx(2 * kPi).epsilon(1e-13));
  const auto s = ScalarField::from_function(g, [](double x, double) { return std::sin(x); });
  CHECK(norm(s, Norm::l2()) == doctest::Approx(std::sqrt(2 * kPi * kPi)).epsilon(1e-13));
  CHECK(norm(s, Norm::linf()) == doctest::Approx(1.0));
  // int sin^4 = 3/8 * 4 pi^2
  CHECK(norm(s, Norm::l4()) == doctest::Approx(std::pow(1.5 * kPi * kPi, 0.25)).epsilon(1e-13));
  CHECK(norm(s, Norm::h1()) == doctest::Approx(2 * kPi).epsilon(1e-13));
  // multiplier (1 + |k|^2)^s
  CHECK(norm(s, Norm::hs(2)) == doctest::Approx(2 * std::sqrt(2 * kPi * kPi)).epsilon(1e-13));
  CHECK(norm(s, Norm::hs(0)) == doctest::Approx(norm(s, Norm::l2())).epsilon(1e-13));
}

TEST_CASE("strip norm of a uniform shear") {
  // h = 0.04: nodes 0, 0.04, 0.08 lie in the strip and their weights sum to 0.1
  const auto ch = channel(16, 26);
  const VectorField u(ScalarField::from_function(ch, [](double, double y) { return y; }), ScalarField(ch));
  const StripMask m = strip_mask(*ch, 0.1);
  const double n = norm(gradient_magnitude(u), Norm::l2(), &m);
  CHECK(n * n == doctest::Approx(2 * 0.1 * 2 * kPi).epsilon(1e-12));
}

TEST_CASE("strip masks vanish outside the strip and grow with delta") {
  const auto ch = channel(16, 65, 2.0);
  Rng rng(22);
  ScalarField f(ch);
  for (double& v : f.values()) v = rng.normal();
  const double full = norm(f, Norm::l2());
  double prev = 0.0;
  for (double d : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    const StripMask m = strip_mask(*ch, d);
    for (std::size_t n = 0; n < m.weights.size(); ++n) {
      if (ch->wall_distance()[n] >= d) CHECK(m.weights[n] == 0.0);
    }
    const double s = norm(f, Norm::l2(), &m);
    CHECK(s <= full);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("H1 squared is L2 squared plus gradient squared") {
  Rng rng(23);
  const auto g = torus(32);
  const auto f = random_field(g, rng, 6);
  const double h1 = norm(f, Norm::h1());
  const double l2 = norm(f, Norm::l2());
  const double gr = norm(gradient(f), Norm::l2());
  CHECK(h1 * h1 == doctest::Approx(l2 * l2 + gr * gr).epsilon(1e-12));

  const auto ch = channel(16, 33, 1.0);
  const auto h = ScalarField::from_function(ch, [](double x, double y) { return std::cos(x) * y * y; });
  const double a = norm(h, Norm::h1());
  const double b = norm(h, Norm::l2());
  const double c = norm(gradient(h), Norm::l2());
  CHECK(a * a == doctest::Approx(b * b + c * c).epsilon(1e-12));
}

TEST_CASE("unsupported norm combinations are rejected") {
  const auto ch = channel(8, 9);
  CHECK_THROWS_AS(norm(ScalarField(ch, 1.0), Norm::hs(2)), Error);
  CHECK_THROWS_AS(norm(ScalarField(torus(8), 1.0), Norm::hs(5)), Error);
}

TEST_CASE("field arithmetic and grid checks") {
  const auto g = torus(8);
  ScalarField a(g, 1.0), b(g, 2.0);
  CHECK((a + b)(3, 3) == 3.0);
  CHECK((2.0 * b - a)(0, 7) == 3.0);
  a.add_scaled(0.5, b);
  CHECK(a(1, 1) == 2.0);
  CHECK(a.all_finite());
  a(2, 2) = std::nan("");
  CHECK_FALSE(a.all_finite());
  CHECK_THROWS_AS(ScalarField(g) + ScalarField(torus(16)), Error);
}
