#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "quadembed/flow.hpp"

using namespace quadembed;

namespace {

PolyField z_rotation() {
  const auto x = Polynomial::variable(3, 0), y = Polynomial::variable(3, 1);
  return {-1.0 * y, x, Polynomial(3)};
}

}  // namespace

TEST_CASE("zero tensor leaves the state unchanged") {
  const auto traj = integrate_quadratic(QuadraticTensor(4, {}), Eigen::Vector4d(1, 2, 3, 4), 10, {});
  CHECK((traj.states().back() - Eigen::Vector4d(1, 2, 3, 4)).norm() == 0.0);
}

TEST_CASE("one-dimensional torus embeds into the unit circle") {
  const TorusEmbedding emb(TorusField::from_terms(1, 1.0, {{FrequencyVector({1}), Eigen::VectorXd::Ones(1),
                                                           Eigen::VectorXd::Zero(1)}}));
  Eigen::VectorXd x0(1);
  x0 << 0.1;
  const auto traj = integrate_quadratic(emb.tensor, emb.psi(x0), 50, {1e-11, 1e-13});
  for (const auto& y : traj.states()) CHECK(std::abs(y.norm() - 1) <= 1e-9);
}

TEST_CASE("norm drift of the embedded ABC flow") {
  const TorusEmbedding emb(abc_field(1, 1, 1));
  const auto traj = integrate_quadratic(emb.tensor, emb.psi(Eigen::Vector3d(0.1, 0.2, 0.3)), 100, {1e-11, 1e-11});
  CHECK(norm_drift(traj) <= 1e-8);
  CHECK(std::abs(traj.state(0).squaredNorm() - 3.0) <= 1e-15);
}

TEST_CASE("ABC conjugacy") {
  const TorusEmbedding emb(abc_field(1, 1, 1));
  const Eigen::Vector3d x0(0.1, 0.2, 0.3);
  const auto r = conjugacy_error(emb, x0, 20, {1e-10, 1e-10});
  CHECK(r.grid_points == 1001);
  CHECK(r.sup_error <= 1e-6);

  double previous = 1.0;
  for (double tol : {1e-7, 1e-8, 1e-9}) {
    const double e = conjugacy_error(emb, x0, 20, {tol, tol}, 201).sup_error;
    CHECK(e < previous);
    previous = e;
  }
}

TEST_CASE("sphere rotation conjugacy") {
  const SphereEmbedding emb(z_rotation(), 1);
  const auto r = conjugacy_error(emb, Eigen::Vector3d(0.6, 0, 0.8), 50, {1e-10, 1e-12});
  CHECK(r.sup_error <= 1e-7);

  const auto traj = integrate_manifold_field(FlowSource::sphere(z_rotation()), Eigen::Vector3d(0.6, 0, 0.8), 50,
                                             {1e-11, 1e-13});
  CHECK(sphere_drift(traj) <= 1e-9);
  // Exact solution is a rotation by angle t.
  const double t = traj.end_time();
  CHECK((traj.states().back() - Eigen::Vector3d(0.6 * std::cos(t), 0.6 * std::sin(t), 0.8)).norm() <= 1e-8);
}

TEST_CASE("flow sources") {
  const auto torus = FlowSource::torus(abc_field(1, 1, 1));
  CHECK(torus.dimension() == 3);
  CHECK(torus.kind() == FlowSource::Kind::Torus);
  const auto sphere = FlowSource::sphere(z_rotation());
  CHECK(sphere.dimension() == 3);

  // jvp against central differences.
  const Eigen::Vector3d x(0.3, 0.1, 0.7), v(0.2, -0.5, 0.4);
  for (const auto* src : {&torus, &sphere}) {
    Eigen::VectorXd out(3);
    src->jvp(x, v, out);
    const double h = 1e-6;
    const Eigen::VectorXd fd = (src->field(x + h * v) - src->field(x - h * v)) / (2 * h);
    CHECK((out - fd).norm() <= 1e-7);
  }
}

TEST_CASE("Lyapunov exponents") {
  SUBCASE("rotation is regular") {
    const auto r = lyapunov_max(FlowSource::sphere(z_rotation()), Eigen::Vector3d(0.6, 0, 0.8), 500);
    CHECK(std::abs(r.estimate) <= 1e-3);
    CHECK(r.converged);
  }
  SUBCASE("ABC is chaotic from a scanned initial condition") {
    const auto field = abc_field(1, 1, 1);
    LyapunovOptions opts;
    opts.integrator = {1e-10, 1e-10};
    const auto scan = scan_chaotic_initial_condition(field, 20, 200, 42, opts);
    CHECK(scan.candidates == 20);
    CHECK(scan.short_estimate > 0.1);
    const auto r = lyapunov_max(FlowSource::torus(field), scan.initial_condition, 2000, opts);
    CHECK(r.estimate > 0.15);
    CHECK(r.trace.size() == r.trace_times.size());
    CHECK(r.trace_times.front() >= 0.2 * 2000);
  }
  SUBCASE("linear growth rate") {
    // dy/dt = y y_0 restricted to y_0 = const gives exponent y_0 for y_1.
    const QuadraticTensor t(2, {{1, 0, 1, 1.0}});
    const auto r = lyapunov_max(FlowSource::quadratic(t), Eigen::Vector2d(0.5, 1e-3), 20, {}, Eigen::Vector2d(0, 1));
    CHECK(r.estimate == doctest::Approx(0.5).epsilon(1e-6));
  }
}

TEST_CASE("Poincare sections") {
  Hyperplane plane{Eigen::Vector3d(0, 1, 0), 0.0, false, 1};
  const auto pts = poincare_section(FlowSource::sphere(z_rotation()), Eigen::Vector3d(0.6, 0, 0.8), 60, plane,
                                    {1e-11, 1e-13});
  CHECK(pts.size() == 9);
  for (const auto& p : pts) {
    CHECK(std::abs(p.state[1]) <= 1e-9);
    CHECK((p.state - Eigen::Vector3d(0.6, 0, 0.8)).norm() <= 1e-8);
    CHECK(std::abs(std::remainder(p.time, 2 * std::numbers::pi)) <= 1e-8);
  }

  const auto none =
      poincare_section(FlowSource::quadratic(QuadraticTensor(3, {})), Eigen::Vector3d(0.6, 0.1, 0.8), 10, plane, {});
  CHECK(none.empty());

  // Periodic plane on the torus: x_2 = 0 mod 1 for a constant field.
  const auto drift = TorusField::from_terms(
      3, 0.0, {{FrequencyVector({0, 0, 0}), Eigen::Vector3d::Zero(), Eigen::Vector3d(0.3, 0.1, 1.0)}});
  Hyperplane wrap{Eigen::Vector3d(0, 0, 1), 0.0, true, 0};
  const auto hits = poincare_section(FlowSource::torus(drift), Eigen::Vector3d(0.1, 0.2, 0.3), 5.0, wrap, {});
  REQUIRE(hits.size() == 5);
  for (size_t i = 0; i < hits.size(); ++i) CHECK(hits[i].time == doctest::Approx(0.7 + static_cast<double>(i)));
}

TEST_CASE("box counting classification") {
  std::vector<Eigen::Vector2d> line, cloud;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 20000; ++i) {
    const double s = u(rng);
    line.emplace_back(s, 0.3 + 0.2 * s);
  }
  for (int i = 0; i < 400000; ++i) cloud.emplace_back(u(rng), u(rng));
  const auto bl = box_counting(line), bc = box_counting(cloud);
  CHECK(bl.dimension == doctest::Approx(1.0).epsilon(0.05));
  CHECK(bc.dimension == doctest::Approx(2.0).epsilon(0.05));
  CHECK(classify_section(bl) == SectionClass::Regular);
  CHECK(classify_section(bc) == SectionClass::Chaotic);
  CHECK(classify_section(box_counting({})) == SectionClass::Empty);
  CHECK(bl.counts.size() == 5);
  CHECK(section_class_name(SectionClass::Chaotic) == "chaotic");
}

TEST_CASE("ABC sections depend on the initial condition") {
  const auto src = FlowSource::torus(abc_field(1, 1, 1));
  const Hyperplane plane{Eigen::Vector3d(0, 0, 1), 0.0, true, 0};
  auto classify = [&](const Eigen::Vector3d& x0) {
    std::vector<Eigen::Vector2d> cloud;
    for (const auto& p : poincare_section(src, x0, 20000, plane, {1e-10, 1e-10})) cloud.emplace_back(p.state[0], p.state[1]);
    return classify_section(box_counting(cloud));
  };
  CHECK(classify(Eigen::Vector3d(0.1, 0.2, 0.3)) == SectionClass::Regular);
  CHECK(classify(Eigen::Vector3d(0.57457, 0.372888, 0.273874)) == SectionClass::Chaotic);
}

TEST_CASE("manifold flow examples") {
  const auto pole = integrate_manifold_field(FlowSource::sphere(z_rotation()), Eigen::Vector3d(0, 0, 1), 20, {});
  CHECK((pole.states().back() - Eigen::Vector3d(0, 0, 1)).norm() == 0.0);

  const auto abc = integrate_manifold_field(FlowSource::torus(abc_field(1, 1, 1)), Eigen::Vector3d::Zero(), 100, {});
  CHECK(abc.end_time() == doctest::Approx(100.0));
  CHECK(abc.states().back().allFinite());

  const TorusEmbedding zero(TorusField(3, 1.0));
  const Eigen::Vector3d x0(0.4, 0.5, 0.6);
  const auto still = integrate_manifold_field(FlowSource::torus(zero.field), x0, 10, {});
  CHECK((still.states().back() - x0).norm() == 0.0);
  CHECK(conjugacy_error(zero, x0, 10, {}).sup_error == 0.0);
}

TEST_CASE("rotation section has two accumulation points") {
  Hyperplane plane{Eigen::Vector3d(0, 1, 0), 0.0};
  const auto pts = poincare_section(FlowSource::sphere(z_rotation()), Eigen::Vector3d(0.6, 0, 0.8), 60, plane,
                                    {1e-11, 1e-13});
  REQUIRE(pts.size() > 4);
  std::vector<Eigen::VectorXd> distinct;
  for (const auto& p : pts) {
    bool seen = false;
    for (const auto& q : distinct) seen = seen || (p.state - q).norm() <= 1e-6;
    if (!seen) distinct.push_back(p.state);
  }
  CHECK(distinct.size() == 2);
}
