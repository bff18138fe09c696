#include <cmath>

#include <doctest.h>

#include "quadembed/error.hpp"
#include "quadembed/integrator.hpp"

using namespace quadembed;

TEST_CASE("exponential decay") {
  const OdeRhs rhs = [](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = -y; };
  Eigen::VectorXd y0(1);
  y0 << 1.0;
  for (double tol : {1e-6, 1e-9, 1e-12}) {
    const auto traj = integrate(rhs, y0, 5.0, {tol, tol});
    CHECK(traj.end_time() == 5.0);
    CHECK(std::abs(traj.states().back()[0] - std::exp(-5.0)) <= 50 * tol);
    CHECK(traj.stats.accepted == static_cast<long>(traj.size()) - 1);
  }
}

TEST_CASE("harmonic oscillator") {
  const OdeRhs rhs = [](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(2);
    dy << y[1], -y[0];
  };
  const auto traj = integrate(rhs, Eigen::Vector2d(1, 0), 20.0, {1e-11, 1e-13});
  double worst = 0.0;
  for (size_t i = 0; i < traj.size(); ++i) {
    const double t = traj.times()[i];
    worst = std::max(worst, (traj.state(i) - Eigen::Vector2d(std::cos(t), -std::sin(t))).norm());
  }
  CHECK(worst <= 1e-9);

  // Dense output between steps.
  double dense = 0.0;
  for (int s = 0; s <= 400; ++s) {
    const double t = 0.05 * s;
    dense = std::max(dense, (traj.at(t) - Eigen::Vector2d(std::cos(t), -std::sin(t))).norm());
  }
  CHECK(dense <= 1e-6);
}

TEST_CASE("cubic hermite interpolation reproduces cubics") {
  auto p = [](double t) { return 1 - 2 * t + 0.5 * t * t + 0.25 * t * t * t; };
  auto dp = [](double t) { return -2 + t + 0.75 * t * t; };
  Eigen::VectorXd y0(1), f0(1), y1(1), f1(1);
  y0 << p(0.3);
  f0 << dp(0.3);
  y1 << p(1.1);
  f1 << dp(1.1);
  for (double t : {0.3, 0.5, 0.77, 1.1})
    CHECK(hermite_interpolate(0.3, y0, f0, 1.1, y1, f1, t)[0] == doctest::Approx(p(t)).epsilon(1e-14));
}

TEST_CASE("advance_to stops exactly on the requested time") {
  const OdeRhs rhs = [](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = 0.5 * y; };
  DormandPrince dp(rhs, Eigen::VectorXd::Ones(1), 0.0, {1e-10, 1e-12});
  for (double t : {0.1, 0.35, 1.0, 2.5}) {
    dp.advance_to(t);
    CHECK(dp.time() == t);
    CHECK(dp.state()[0] == doctest::Approx(std::exp(0.5 * t)).epsilon(1e-9));
    CHECK(dp.derivative()[0] == doctest::Approx(0.5 * dp.state()[0]).epsilon(1e-15));
  }
  CHECK(dp.stats().evaluations > dp.stats().accepted);
}

TEST_CASE("blow-up raises StepFailure") {
  const OdeRhs rhs = [](const Eigen::VectorXd& y, Eigen::VectorXd& dy) { dy = y.cwiseProduct(y); };
  bool failed = false;
  try {
    integrate(rhs, Eigen::VectorXd::Ones(1), 2.0, {1e-9, 1e-12});
  } catch (const Error& e) {
    failed = e.code() == ErrorCode::StepFailure;
  }
  CHECK(failed);

  IntegratorOptions few{1e-9, 1e-12};
  few.max_steps = 10;
  const OdeRhs osc = [](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(2);
    dy << y[1], -y[0];
  };
  CHECK_THROWS_AS(integrate(osc, Eigen::Vector2d(1, 0), 1000.0, few), Error);
}

TEST_CASE("tolerance controls the error") {
  const OdeRhs rhs = [](const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
    dy.resize(2);
    dy << y[1], -y[0];
  };
  double previous = 1.0;
  for (double tol : {1e-6, 1e-8, 1e-10}) {
    const auto traj = integrate(rhs, Eigen::Vector2d(1, 0), 10.0, {tol, tol});
    const double err = (traj.states().back() - Eigen::Vector2d(std::cos(10.0), -std::sin(10.0))).norm();
    CHECK(err < previous);
    previous = err;
  }
}
