#include "quadembed/nhim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

Eigen::Vector3d on_equator(double phi, double s = 0.0) {
  return {std::cos(s) * std::cos(phi), std::cos(s) * std::sin(phi), std::sin(s)};
}

}  // namespace

void NhimConfig::validate() const {
  if (!(contraction > 0.0)) throw Error(ErrorCode::InvalidArgument, "contraction C must be positive");
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order r must be at least 1");
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "rate constant c must be positive");
  if (!(mu >= 0.0 && mu < lambda)) throw Error(ErrorCode::InvalidArgument, "rates must satisfy 0 <= mu < lambda");
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation size must be nonnegative");
}

void ApproxParams::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "smoothness gap k must be at least 1");
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "norm index m must be nonnegative");
  if (!(jackson_constant > 0.0)) throw Error(ErrorCode::InvalidArgument, "Jackson constant must be positive");
}

PolyField equator_rotation_field() {
  return {Polynomial::variable(3, 1) * -1.0, Polynomial::variable(3, 0), Polynomial(3)};
}

PolyField extend_with_contraction(const PolyField& base, double contraction, std::string_view manifold) {
  if (manifold != kEquatorS2)
    throw Error(ErrorCode::UnsupportedManifold, "no contraction extension for manifold '" + std::string(manifold) + "'");
  if (base.size() != 3) throw Error(ErrorCode::InvalidArgument, "base field must act on R^3");
  for (const auto& p : base)
    if (p.variables() != 3) throw Error(ErrorCode::InvalidArgument, "base field must act on R^3");
  if (!(contraction >= 0.0)) throw Error(ErrorCode::InvalidArgument, "contraction must be nonnegative");
  for (int s = 0; s < 64; ++s) {
    const Eigen::VectorXd x = on_equator(2 * std::numbers::pi * s / 64);
    if (std::abs(base[2].evaluate(x)) > 1e-12)
      throw Error(ErrorCode::InvalidArgument, "base field is not tangent to the equator");
  }
  const Polynomial z = Polynomial::variable(3, 2);
  PolyField out = base;
  // -C z e_2 + C z^2 x
  out[2] -= contraction * z;
  for (int i = 0; i < 3; ++i) out[static_cast<size_t>(i)] += contraction * (z * z * Polynomial::variable(3, i));
  return out;
}

double default_contraction(const PolyField& base, int order, int samples) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "order r must be at least 1");
  double L = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::MatrixXd J = field_jacobian(base, on_equator(2 * std::numbers::pi * s / samples));
    L = std::max(L, Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues()(0));
  }
  return order * L + 1.0;
}

double normal_eigenvalue(const PolyField& field, double phi, double h) {
  auto central = [&](double s) {
    const double up = field[2].evaluate(Eigen::VectorXd(on_equator(phi, s)));
    const double down = field[2].evaluate(Eigen::VectorXd(on_equator(phi, -s)));
    return (up - down) / (2.0 * s);
  };
  // One Richardson level removes the O(h^2) term.
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one node");
  nodes.assign(static_cast<size_t>(n), 0.0);
  weights.assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<size_t>(i)] = -x;
    nodes[static_cast<size_t>(n - 1 - i)] = x;
    weights[static_cast<size_t>(i)] = w;
    weights[static_cast<size_t>(n - 1 - i)] = w;
  }
}

SphereQuadrature sphere_quadrature(int polar, int azimuthal) {
  if (azimuthal < 1) throw Error(ErrorCode::InvalidArgument, "azimuthal rule needs at least one node");
  std::vector<double> z, w;
  gauss_legendre(polar, z, w);
  SphereQuadrature q;
  const double dphi = 2 * std::numbers::pi / azimuthal;
  for (size_t i = 0; i < z.size(); ++i) {
    const double r = std::sqrt(std::max(0.0, 1.0 - z[i] * z[i]));
    for (int j = 0; j < azimuthal; ++j) {
      const double phi = (j + 0.5) * dphi;
      Eigen::VectorXd x(3);
      x << r * std::cos(phi), r * std::sin(phi), z[i];
      q.points.push_back(x);
      q.weights.push_back(w[i] * dphi);
    }
  }
  return q;
}

Projection polynomial_project(const PointField& field, int degree, const SphereQuadrature& grid) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be nonnegative");
  auto basis = std::make_shared<const HarmonicBasis>(harmonic_basis(2, degree));
  GeneratorSet gens = so_generators(2);
  const int m = gens.size(), d = basis->size();
  const auto npts = static_cast<Eigen::Index>(grid.points.size());

  Eigen::MatrixXd A(3 * npts, m * d);
  Eigen::VectorXd b(3 * npts);
  std::vector<Eigen::VectorXd> targets;
  targets.reserve(grid.points.size());
  for (Eigen::Index q = 0; q < npts; ++q) {
    const Eigen::VectorXd& x = grid.points[static_cast<size_t>(q)];
    const double sw = std::sqrt(grid.weights[static_cast<size_t>(q)]);
    const Eigen::VectorXd Y = basis->evaluate(x);
    targets.push_back(field(x));
    for (int mu = 0; mu < m; ++mu) {
      const Eigen::VectorXd h = gens.evaluate(mu, x);
      for (int i = 0; i < 3; ++i)
        for (int a = 0; a < d; ++a) A(3 * q + i, mu * d + a) = sw * Y[a] * h[i];
    }
    b.segment(3 * q, 3) = sw * targets.back();
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  cod.setThreshold(1e-10);
  const Eigen::VectorXd sol = cod.solve(b);

  Eigen::MatrixXd coeffs(m, d);
  for (int mu = 0; mu < m; ++mu)
    for (int a = 0; a < d; ++a) coeffs(mu, a) = sol[mu * d + a];
  Projection out{SphereField(basis, gens, coeffs)};

  double wsum = 0.0, rsum = 0.0;
  for (Eigen::Index q = 0; q < npts; ++q) {
    const auto& x = grid.points[static_cast<size_t>(q)];
    const double r = (out.field.evaluate(x) - targets[static_cast<size_t>(q)]).norm();
    const double w = grid.weights[static_cast<size_t>(q)];
    wsum += w;
    rsum += w * r * r;
    out.max_residual = std::max(out.max_residual, r);
  }
  out.rms_residual = std::sqrt(rsum / wsum);
  return out;
}

Projection polynomial_project(const PointField& field, int degree) {
  static const SphereQuadrature grid = sphere_quadrature(24, 48);
  return polynomial_project(field, degree, grid);
}

PolyField random_tangent_perturbation(int degree, std::uint64_t seed) {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "degree must be nonnegative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  PolyField raw(3, Polynomial(3));
  for (auto& p : raw)
    for (int e0 = 0; e0 <= degree; ++e0)
      for (int e1 = 0; e0 + e1 <= degree; ++e1)
        for (int e2 = 0; e0 + e1 + e2 <= degree; ++e2) p.add_term({e0, e1, e2}, normal(rng));
  const Polynomial radial = radial_component(raw);
  PolyField out(3, Polynomial(3));
  for (int i = 0; i < 3; ++i)
    out[static_cast<size_t>(i)] = raw[static_cast<size_t>(i)] - radial * Polynomial::variable(3, i);
  double sup = 0.0;
  for (const auto& x : sphere_quadrature(16, 32).points) sup = std::max(sup, evaluate_field(out, x).norm());
  if (sup > 0.0)
    for (auto& p : out) p *= 1.0 / sup;
  return out;
}

InvariantCircle invariant_circle_locate(const PolyField& field, double t_settle, const CircleLocateOptions& options) {
  if (field.size() != 3) throw Error(ErrorCode::UnsupportedManifold, "circle location is implemented on S^2 only");
  if (options.fan < 1 || options.bins < 1 || !(options.window > 0.0))
    throw Error(ErrorCode::InvalidArgument, "fan, bins and window must be positive");

  OdeRhs rhs = [&field](const Eigen::VectorXd& x, Eigen::VectorXd& dx) { dx = evaluate_field(field, x); };
  std::vector<DormandPrince> fan;
  fan.reserve(static_cast<size_t>(options.fan));
  for (int j = 0; j < options.fan; ++j) {
    const double phi = 2 * std::numbers::pi * j / options.fan;
    const double s = (j % 2 == 0 ? 1.0 : -1.0) * options.offset;
    fan.emplace_back(rhs, Eigen::VectorXd(on_equator(phi, s)), 0.0, options.integrator);
  }

  const int B = options.bins;
  const double width = 2 * std::numbers::pi / B;
  auto azimuth = [](const Eigen::VectorXd& x) { return std::atan2(x[1], x[0]); };

  double t = std::min(options.initial_settle, t_settle);
  for (auto& s : fan) s.advance_to(t);

  // Each bin records the height where trajectories cross its center angle.
  std::vector<double> previous;
  InvariantCircle out;
  while (true) {
    std::vector<double> sum(static_cast<size_t>(B), 0.0);
    std::vector<int> count(static_cast<size_t>(B), 0);
    std::vector<Eigen::Vector3d> samples;
    const double t_end = t + options.window;
    for (auto& s : fan) {
      while (s.time() < t_end) {
        s.step(t_end);
        const double a0 = azimuth(s.previous_state());
        const double turn = std::remainder(azimuth(s.state()) - a0, 2 * std::numbers::pi);
        if (turn == 0.0) continue;
        // Bin centers c_b = (b + 1/2) width strictly inside the swept arc.
        const double lo = std::min(a0, a0 + turn), hi = std::max(a0, a0 + turn);
        for (long q = static_cast<long>(std::ceil(lo / width - 0.5)); (q + 0.5) * width <= hi; ++q) {
          const double center = (q + 0.5) * width;
          if (center <= lo) continue;
          double tl = s.previous_time(), th = s.time();
          auto offset = [&](double tt) {
            return std::remainder(azimuth(s.interpolate(tt)) - center, 2 * std::numbers::pi);
          };
          const double sign_lo = offset(tl);
          while (th - tl > 1e-12 * std::max(1.0, th)) {
            const double mid = 0.5 * (tl + th);
            if ((offset(mid) < 0.0) == (sign_lo < 0.0))
              tl = mid;
            else
              th = mid;
          }
          Eigen::VectorXd x = s.interpolate(0.5 * (tl + th));
          x /= x.norm();
          long b = q % B;
          if (b < 0) b += B;
          sum[static_cast<size_t>(b)] += x[2];
          ++count[static_cast<size_t>(b)];
          samples.emplace_back(x[0], x[1], x[2]);
        }
      }
    }
    t = t_end;

    std::vector<double> height(static_cast<size_t>(B), std::numeric_limits<double>::quiet_NaN());
    bool filled = true;
    for (int b = 0; b < B; ++b) {
      if (count[static_cast<size_t>(b)] == 0)
        filled = false;
      else
        height[static_cast<size_t>(b)] = sum[static_cast<size_t>(b)] / count[static_cast<size_t>(b)];
    }
    double change = std::numeric_limits<double>::infinity();
    if (filled && !previous.empty()) {
      change = 0.0;
      for (int b = 0; b < B; ++b)
        change = std::max(change, std::abs(height[static_cast<size_t>(b)] - previous[static_cast<size_t>(b)]));
    }
    if (filled && change <= options.settle_tolerance) {
      out.bin_height = std::move(height);
      out.samples = std::move(samples);
      out.settle_time = t;
      out.last_change = change;
      break;
    }
    if (t + options.window > t_settle)
      throw Error(ErrorCode::NoConvergence, filled ? "attractor bins did not settle within the time limit"
                                                   : "attractor does not cross every angular bin");
    if (filled) previous = std::move(height);
  }

  out.bin_angle.resize(static_cast<size_t>(B));
  for (int b = 0; b < B; ++b) {
    out.bin_angle[static_cast<size_t>(b)] = (b + 0.5) * width;
    out.hausdorff = std::max(out.hausdorff, std::asin(std::min(1.0, std::abs(out.bin_height[static_cast<size_t>(b)]))));
  }
  return out;
}

long long jackson_degree_bound(const ApproxParams& params, double norm) {
  params.validate();
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "norm must be positive");
  const double base = params.jackson_constant * norm / params.epsilon;
  return static_cast<long long>(std::ceil(std::pow(base, 1.0 / params.k)));
}

long long so_torus_dimension(long long d) { return d * (d - 1) / 2 + d; }

DimensionBound manifold_dim_bound(const ApproxParams& params, int n, double norm) {
  params.validate();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sphere dimension must be positive");
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidArgument, "norm must be positive");
  DimensionBound out;
  const double base = params.jackson_constant * norm / params.epsilon;
  out.bound = std::pow(base, 2.0 * (n + 1) / params.k);
  out.vacuous = out.bound <= 1.0;
  out.degree = jackson_degree_bound(params, norm);
  out.harmonic_dimension = harmonic_dimension(n, static_cast<int>(out.degree), DimensionMode::Cumulative).value;
  out.so_torus_dimension = so_torus_dimension(out.harmonic_dimension);
  return out;
}

}  // namespace quadembed
