#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <doctest.h>

#include "quadembed/error.hpp"
#include "quadembed/lattice_fourier.hpp"

using namespace quadembed;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

Eigen::VectorXd uniform_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = u(rng);
  return x;
}

// Random zero-mean divergence-free field: each coefficient is projected
// orthogonally to its frequency.
TorusField random_field(int n, double cutoff, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<FourierTerm> terms;
  for (const auto& k : enumerate_lattice(n, cutoff, true).representatives) {
    Eigen::VectorXd kv(n), a(n), b(n);
    for (int i = 0; i < n; ++i) kv[i] = k[i], a[i] = g(rng), b[i] = g(rng);
    a -= kv * (kv.dot(a) / kv.squaredNorm());
    b -= kv * (kv.dot(b) / kv.squaredNorm());
    terms.push_back({k, a, b});
  }
  return TorusField::from_terms(n, cutoff, terms);
}

ErrorCode code_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("lattice enumeration") {
  const auto l31 = enumerate_lattice(3, 1.0, true);
  CHECK(l31.full_count == 7);
  CHECK(l31.representatives.size() == 3);
  CHECK(l31.embedding_dimension() == 6);
  CHECK(l31.unreduced_embedding_dimension() == 12);

  const auto l20 = enumerate_lattice(2, 0.0, false);
  CHECK(l20.full_count == 1);
  REQUIRE(l20.representatives.size() == 1);
  CHECK(l20.representatives[0].is_zero());

  const auto l2r = enumerate_lattice(2, std::sqrt(2.0), true);
  CHECK(l2r.full_count == 9);
  CHECK(l2r.representatives.size() == 4);
  for (const auto& k : l2r.representatives) {
    CHECK(k.is_canonical());
    CHECK(k.squared_norm() <= 2);
  }

  // Brute-force count in a box.
  for (int n = 1; n <= 3; ++n) {
    for (double cutoff : {0.5, 1.0, 1.5, 2.0, 2.3}) {
      long long count = 0;
      const int r = 3;
      std::vector<int> k(static_cast<size_t>(n), -r);
      while (true) {
        long long s = 0;
        for (int v : k) s += v * v;
        if (s <= cutoff * cutoff + 1e-9) ++count;
        int i = 0;
        while (i < n && ++k[static_cast<size_t>(i)] > r) k[static_cast<size_t>(i++)] = -r;
        if (i == n) break;
      }
      const auto l = enumerate_lattice(n, cutoff, true);
      CHECK(l.full_count == count);
      CHECK(2 * static_cast<long long>(l.representatives.size()) == count - 1);
    }
  }
}

TEST_CASE("reality constraints") {
  std::map<FrequencyVector, FourierCoefficient> coeffs;
  coeffs[FrequencyVector({1, 0})] = {Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 0)};
  coeffs[FrequencyVector({-1, 0})] = {Eigen::Vector2d(0, 1), Eigen::Vector2d(0, 0)};
  const TorusField bad(2, 1.0, coeffs);
  CHECK(code_of([&] { validate_torus_field(bad); }) == ErrorCode::ConstraintViolation);

  std::map<FrequencyVector, FourierCoefficient> far;
  far[FrequencyVector({2, 0})] = {Eigen::Vector2d(0, 0.5), Eigen::Vector2d(0, 0)};
  far[FrequencyVector({-2, 0})] = {Eigen::Vector2d(0, -0.5), Eigen::Vector2d(0, 0)};
  CHECK(code_of([&] { validate_torus_field(TorusField(2, 1.0, far)); }) == ErrorCode::ConstraintViolation);

  CHECK(validate_torus_field(abc_field(1, 1, 1)).valid);
}

TEST_CASE("field evaluation") {
  const auto abc = abc_field(1, 1, 1);
  CHECK((abc.evaluate(Eigen::Vector3d::Zero()) - Eigen::Vector3d(1, 1, 1)).norm() <= 1e-15);

  const auto single = TorusField::from_terms(1, 1.0, {{FrequencyVector({1}), Eigen::VectorXd::Ones(1),
                                                       Eigen::VectorXd::Zero(1)}});
  Eigen::VectorXd x(1);
  x << 0.25;
  CHECK(single.evaluate(x)[0] == doctest::Approx(1.0).epsilon(1e-15));

  // ABC against its closed form with A = 0.7, B = 1.3, C = -0.4.
  const auto g = abc_field(0.7, 1.3, -0.4);
  std::mt19937_64 rng(1);
  for (int s = 0; s < 50; ++s) {
    const Eigen::VectorXd p = uniform_point(3, rng);
    const double X = 0.7 * std::sin(kTwoPi * p[2]) - 0.4 * std::cos(kTwoPi * p[1]);
    const double Y = 1.3 * std::sin(kTwoPi * p[0]) + 0.7 * std::cos(kTwoPi * p[2]);
    const double Z = -0.4 * std::sin(kTwoPi * p[1]) + 1.3 * std::cos(kTwoPi * p[0]);
    CHECK((g.evaluate(p) - Eigen::Vector3d(X, Y, Z)).norm() <= 1e-14);
  }
}

TEST_CASE("embedding map and jacobian") {
  const auto lattice = enumerate_lattice(3, 1.0, true);
  Eigen::VectorXd x(3);
  x << 0.1, 0.2, 0.3;
  const Eigen::VectorXd psi = psi_torus(lattice, x);
  REQUIRE(psi.size() == 6);
  for (size_t r = 0; r < lattice.representatives.size(); ++r) {
    const double phase = kTwoPi * lattice.representatives[r].dot(x);
    CHECK(psi[static_cast<Eigen::Index>(2 * r)] == doctest::Approx(std::sin(phase)));
    CHECK(psi[static_cast<Eigen::Index>(2 * r + 1)] == doctest::Approx(std::cos(phase)));
  }
  const Eigen::MatrixXd J = psi_torus_jacobian(lattice, x);
  const double h = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    const Eigen::VectorXd fd = (psi_torus(lattice, a) - psi_torus(lattice, b)) / (2 * h);
    CHECK((J.col(i) - fd).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("one-dimensional tensor entries") {
  const auto field = TorusField::from_terms(1, 1.0, {{FrequencyVector({1}), Eigen::VectorXd::Ones(1),
                                                      Eigen::VectorXd::Zero(1)}});
  const auto t = build_torus_tensor(field);
  REQUIRE(t.dimension() == 2);
  // dq/dt = 2 pi p q and dp/dt = -2 pi q^2 for X = sin 2 pi x
  const Eigen::Vector2d y(0.6, 0.8);
  CHECK((t.apply(y) - Eigen::Vector2d(kTwoPi * 0.8 * 0.6, -kTwoPi * 0.36)).norm() <= 1e-14);
  CHECK(t.certified());
  double largest = 0.0;
  for (const auto& e : t.entries()) largest = std::max(largest, std::abs(e.value));
  CHECK(largest == doctest::Approx(kTwoPi));
}

TEST_CASE("V(Psi(x)) equals dPsi(x) X(x)") {
  std::mt19937_64 rng(21);
  SUBCASE("abc") {
    const TorusEmbedding emb(abc_field(1, 1, 1));
    CHECK(emb.tensor.dimension() == 6);
    CHECK(emb.tensor.certified());
    for (int s = 0; s < 100; ++s) {
      const Eigen::VectorXd x = uniform_point(3, rng);
      const Eigen::VectorXd lhs = emb.tensor.apply(emb.psi(x));
      const Eigen::VectorXd rhs = emb.psi_jacobian(x) * emb.field.evaluate(x);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("random fields") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 1 + trial % 3;
      const double cutoff = 1.0 + 0.5 * (trial % 3);
      const TorusEmbedding emb(random_field(n, cutoff, rng));
      CHECK(emb.tensor.certified());
      for (int s = 0; s < 20; ++s) {
        const Eigen::VectorXd x = uniform_point(n, rng);
        const Eigen::VectorXd lhs = emb.tensor.apply(emb.psi(x));
        const Eigen::VectorXd rhs = emb.psi_jacobian(x) * emb.field.evaluate(x);
        CHECK((lhs - rhs).norm() <= 1e-12 * (1 + emb.field.coefficient_norm()));
      }
    }
  }
}

TEST_CASE("image is invariant: V is tangent to the embedded torus") {
  // V(Psi(x)) lies in the column space of dPsi(x).
  const TorusEmbedding emb(abc_field(1, 1, 1));
  std::mt19937_64 rng(5);
  for (int s = 0; s < 20; ++s) {
    const Eigen::VectorXd x = uniform_point(3, rng);
    const Eigen::MatrixXd J = emb.psi_jacobian(x);
    const Eigen::VectorXd v = emb.tensor.apply(emb.psi(x));
    const Eigen::VectorXd coef = J.colPivHouseholderQr().solve(v);
    CHECK((J * coef - v).norm() <= 1e-12);
  }
}

TEST_CASE("embedding is injective on samples") {
  const auto lattice = enumerate_lattice(3, 1.0, true);
  std::mt19937_64 rng(9);
  std::vector<Eigen::VectorXd> pts;
  for (int s = 0; s < 200; ++s) pts.push_back(uniform_point(3, rng));
  double min_ratio = 1e300;
  for (size_t a = 0; a < pts.size(); ++a) {
    for (size_t b = a + 1; b < pts.size(); ++b) {
      Eigen::VectorXd d = pts[a] - pts[b];
      for (Eigen::Index i = 0; i < 3; ++i) d[i] -= std::round(d[i]);
      min_ratio = std::min(min_ratio, (psi_torus(lattice, pts[a]) - psi_torus(lattice, pts[b])).norm() / d.norm());
    }
  }
  CHECK(min_ratio > 1.0);
}

TEST_CASE("divergence") {
  const auto r = torus_divergence_check(abc_field(1, 1, 1));
  CHECK(r.field_divergence_free);
  CHECK(r.tensor_divergence_free);

  const auto compressible = TorusField::from_terms(1, 1.0, {{FrequencyVector({1}), Eigen::VectorXd::Ones(1),
                                                             Eigen::VectorXd::Zero(1)}});
  const auto c = torus_divergence_check(compressible);
  CHECK_FALSE(c.field_divergence_free);
  CHECK_FALSE(c.tensor_divergence_free);
  CHECK(c.max_field_contraction == doctest::Approx(1.0));
}

TEST_CASE("fields with a mean keep the zero frequency") {
  auto terms = abc_field(1, 1, 1).terms();
  terms.push_back({FrequencyVector({0, 0, 0}), Eigen::Vector3d::Zero(), Eigen::Vector3d(0.2, 0, 0)});
  const TorusEmbedding emb(TorusField::from_terms(3, 1.0, terms));
  CHECK(emb.lattice.includes_zero);
  CHECK(emb.tensor.dimension() == 8);
  std::mt19937_64 rng(2);
  for (int s = 0; s < 20; ++s) {
    const Eigen::VectorXd x = uniform_point(3, rng);
    CHECK((emb.tensor.apply(emb.psi(x)) - emb.psi_jacobian(x) * emb.field.evaluate(x)).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("zero field and one-dimensional examples") {
  const TorusField zero(2, 1.0);
  CHECK(validate_torus_field(zero).valid);
  CHECK(zero.evaluate(Eigen::Vector2d(0.3, 0.8)).norm() == 0.0);
  const auto t = build_torus_tensor(zero);
  CHECK(t.nonzeros() == 0);
  const auto div = torus_divergence_check(zero);
  CHECK(div.field_divergence_free);
  CHECK(div.tensor_divergence_free);

  const auto line = enumerate_lattice(1, 1.0, true);
  Eigen::VectorXd x(1);
  x << 0.0;
  CHECK((psi_torus(line, x) - Eigen::Vector2d(0, 1)).norm() == 0.0);
  x << 0.25;
  CHECK((psi_torus(line, x) - Eigen::Vector2d(1, 0)).norm() <= 1e-16);

  const auto sin_field = build_torus_tensor(TorusField::from_terms(
      1, 1.0, {{FrequencyVector({1}), Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(1)}}));
  CHECK(sin_field.nonzeros() == 2);
  CHECK(sin_field.value(0, 0, 1) == doctest::Approx(kTwoPi).epsilon(1e-15));
  CHECK(sin_field.value(1, 0, 0) == doctest::Approx(-kTwoPi).epsilon(1e-15));

  const auto single = TorusField::from_terms(2, 1.0, {{FrequencyVector({1, 0}), Eigen::Vector2d(1, 0),
                                                       Eigen::Vector2d::Zero()}});
  CHECK((single.evaluate(Eigen::Vector2d(0.25, 0)) - Eigen::Vector2d(1, 0)).norm() <= 1e-15);
}
