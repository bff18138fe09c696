#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "quadembed/polynomial.hpp"

using namespace quadembed;

namespace {

// Independent Gamma-function form of the monomial moment over S^n.
double gamma_moment(const Exponent& e) {
  double num = 2.0;
  int total = 0;
  for (int v : e) {
    if (v % 2) return 0.0;
    num *= std::tgamma((v + 1) / 2.0);
    total += v;
  }
  return num / std::tgamma((total + static_cast<double>(e.size())) / 2.0);
}

Polynomial x(int vars, int i) { return Polynomial::variable(vars, i); }

}  // namespace

TEST_CASE("sphere moments") {
  CHECK(sphere_moment({0, 0, 0}) == doctest::Approx(4 * std::numbers::pi).epsilon(1e-15));
  CHECK(sphere_moment({2, 0, 0}) == doctest::Approx(4 * std::numbers::pi / 3).epsilon(1e-15));
  CHECK(sphere_moment({1, 2, 0}) == 0.0);
  CHECK(sphere_moment({0, 0, 3}) == 0.0);
  CHECK(sphere_area(1) == doctest::Approx(2 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));

  const std::vector<Exponent> cases{{4, 2, 0}, {2, 2, 2}, {6, 0, 0, 2}, {2, 4, 2, 0}, {0, 8}, {4, 4, 2, 2}};
  for (const auto& e : cases) CHECK(sphere_moment(e) == doctest::Approx(gamma_moment(e)).epsilon(1e-13));
}

TEST_CASE("mean moments sum like the sphere identity") {
  // sum_i x_i^2 = 1 on the sphere
  for (int n = 1; n <= 5; ++n) {
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      Exponent e(static_cast<size_t>(n + 1), 0);
      e[static_cast<size_t>(i)] = 2;
      s += sphere_mean_moment(e);
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("arithmetic and evaluation") {
  const Polynomial p = x(3, 0) * x(3, 0) - 2.0 * x(3, 1) + Polynomial::constant(3, 0.5);
  const Eigen::Vector3d pt(0.3, -1.2, 2.0);
  CHECK(p.evaluate(Eigen::VectorXd(pt)) == doctest::Approx(0.09 + 2.4 + 0.5));
  CHECK(p.degree() == 2);
  CHECK_FALSE(p.is_homogeneous());
  CHECK(Polynomial(3).degree() == -1);
  CHECK((p - p).is_zero());
  CHECK(p.coefficient({2, 0, 0}) == 1.0);
  CHECK(p.coefficient({0, 0, 1}) == 0.0);
}

TEST_CASE("derivatives and laplacian") {
  const Polynomial harmonic = x(3, 0) * x(3, 0) - x(3, 1) * x(3, 1);
  CHECK(harmonic.laplacian().is_zero());
  const Polynomial r2 = x(3, 0) * x(3, 0) + x(3, 1) * x(3, 1) + x(3, 2) * x(3, 2);
  CHECK(r2.laplacian() == Polynomial::constant(3, 6.0));
  const Polynomial cubic = x(3, 0) * x(3, 0) * x(3, 2);
  CHECK(cubic.derivative(0) == 2.0 * x(3, 0) * x(3, 2));
  CHECK(cubic.derivative(1).is_zero());

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const Polynomial q = cubic + 3.0 * x(3, 1) * x(3, 2) * x(3, 2) - x(3, 0);
  for (int s = 0; s < 20; ++s) {
    Eigen::VectorXd y(3);
    y << u(rng), u(rng), u(rng);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd a = y, b = y;
      a[i] += h;
      b[i] -= h;
      CHECK(q.derivative(i).evaluate(y) == doctest::Approx((q.evaluate(a) - q.evaluate(b)) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("sphere normal form agrees on the sphere") {
  const Polynomial r2 = x(3, 0) * x(3, 0) + x(3, 1) * x(3, 1) + x(3, 2) * x(3, 2);
  CHECK(r2.sphere_normal_form() == Polynomial::constant(3, 1.0));

  const Polynomial p = x(3, 0) * x(3, 0) * x(3, 0) * x(3, 1) + 2.0 * x(3, 0) * x(3, 0) * x(3, 0) * x(3, 0);
  const Polynomial nf = p.sphere_normal_form();
  for (const auto& [e, c] : nf.terms()) CHECK(e[0] <= 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int s = 0; s < 50; ++s) {
    Eigen::VectorXd y(3);
    y << g(rng), g(rng), g(rng);
    y.normalize();
    CHECK(nf.evaluate(y) == doctest::Approx(p.evaluate(y)).epsilon(1e-13));
  }
}

TEST_CASE("sphere integrals and inner products") {
  // integral of (x^2 - y^2)^2 over S^2 = 2 (m400 - m220) = 2 (4pi/5 - 4pi/15)
  const Polynomial h = x(3, 0) * x(3, 0) - x(3, 1) * x(3, 1);
  CHECK(sphere_inner(h, h) == doctest::Approx(2 * (4 * std::numbers::pi / 5 - 4 * std::numbers::pi / 15)));
  CHECK(sphere_inner(x(3, 0), x(3, 1)) == 0.0);
  CHECK(sphere_integral(Polynomial::constant(4, 1.0)) == doctest::Approx(sphere_area(3)));
}

TEST_CASE("field helpers") {
  const PolyField rot{-1.0 * x(3, 1), x(3, 0), Polynomial(3)};
  CHECK(radial_component(rot).is_zero());
  CHECK(field_degree(rot) == 1);
  Eigen::VectorXd pt(3);
  pt << 1, 2, 3;
  CHECK(evaluate_field(rot, pt).isApprox(Eigen::Vector3d(-2, 1, 0)));
  Eigen::Matrix3d J;
  J << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK(field_jacobian(rot, pt).isApprox(Eigen::MatrixXd(J)));
}
