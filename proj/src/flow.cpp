#include "quadembed/flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "quadembed/error.hpp"

namespace quadembed {

FlowSource FlowSource::torus(TorusField field) {
  auto f = std::make_shared<const TorusField>(std::move(field));
  const int n = f->dimension();
  return FlowSource(
      Kind::Torus, n, [f](const Eigen::VectorXd& x, Eigen::VectorXd& out) { out = f->evaluate(x); },
      [f](const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& out) { out = f->jacobian(x) * v; });
}

FlowSource FlowSource::sphere(PolyField field) {
  if (field.empty()) throw Error(ErrorCode::InvalidArgument, "empty sphere field");
  const int dim = static_cast<int>(field.size());
  for (const auto& p : field)
    if (p.variables() != dim) throw Error(ErrorCode::InvalidArgument, "field components must act on R^{n+1}");
  auto derivs = std::make_shared<std::vector<Polynomial>>();
  for (const auto& p : field)
    for (int j = 0; j < dim; ++j) derivs->push_back(p.derivative(j));
  auto f = std::make_shared<const PolyField>(std::move(field));
  return FlowSource(
      Kind::Sphere, dim, [f](const Eigen::VectorXd& x, Eigen::VectorXd& out) { out = evaluate_field(*f, x); },
      [derivs, dim](const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        out.setZero(dim);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            if (v[j] == 0.0) continue;
            out[i] += (*derivs)[static_cast<size_t>(i * dim + j)].evaluate(x) * v[j];
          }
      });
}

FlowSource FlowSource::quadratic(QuadraticTensor tensor) {
  auto t = std::make_shared<const QuadraticTensor>(std::move(tensor));
  const int d = t->dimension();
  return FlowSource(
      Kind::Quadratic, d,
      [t](const Eigen::VectorXd& y, Eigen::VectorXd& out) {
        out.resize(y.size());
        t->apply(std::span<const double>(y.data(), static_cast<size_t>(y.size())),
                 std::span<double>(out.data(), static_cast<size_t>(out.size())));
      },
      [t](const Eigen::VectorXd& y, const Eigen::VectorXd& v, Eigen::VectorXd& out) {
        out.resize(y.size());
        t->jvp(std::span<const double>(y.data(), static_cast<size_t>(y.size())),
               std::span<const double>(v.data(), static_cast<size_t>(v.size())),
               std::span<double>(out.data(), static_cast<size_t>(out.size())));
      });
}

std::string_view FlowSource::kind_name() const {
  switch (kind_) {
    case Kind::Torus:
      return "torus";
    case Kind::Sphere:
      return "sphere";
    case Kind::Quadratic:
      return "quadratic";
  }
  return "unknown";
}

Eigen::VectorXd FlowSource::field(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(x.size());
  field_(x, out);
  return out;
}

Trajectory integrate_manifold_field(const FlowSource& source, const Eigen::VectorXd& x0, double T,
                                    const IntegratorOptions& options) {
  if (x0.size() != source.dimension()) throw Error(ErrorCode::InvalidArgument, "initial condition has wrong size");
  return integrate(source.rhs(), x0, T, options);
}

Trajectory integrate_quadratic(const QuadraticTensor& tensor, const Eigen::VectorXd& y0, double T,
                               const IntegratorOptions& options) {
  return integrate_manifold_field(FlowSource::quadratic(tensor), y0, T, options);
}

double norm_drift(const Trajectory& trajectory) {
  if (trajectory.size() == 0) return 0.0;
  const double r0 = trajectory.state(0).squaredNorm();
  double m = 0.0;
  for (const auto& y : trajectory.states()) m = std::max(m, std::abs(y.squaredNorm() - r0));
  return m;
}

double sphere_drift(const Trajectory& trajectory) {
  double m = 0.0;
  for (const auto& x : trajectory.states()) m = std::max(m, std::abs(x.norm() - 1.0));
  return m;
}

ConjugacyResult conjugacy_error(const FlowSource& manifold, const EmbeddingMap& psi, const QuadraticTensor& tensor,
                                const Eigen::VectorXd& x0, double T, const IntegratorOptions& options,
                                int grid_points) {
  if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "need at least two grid points");
  const Eigen::VectorXd y0 = psi(x0);
  if (y0.size() != tensor.dimension()) throw Error(ErrorCode::InvalidArgument, "embedding and tensor sizes differ");
  DormandPrince direct(manifold.rhs(), x0, 0.0, options);
  DormandPrince embedded(FlowSource::quadratic(tensor).rhs(), y0, 0.0, options);
  ConjugacyResult out;
  out.grid_points = grid_points;
  for (int g = 0; g < grid_points; ++g) {
    const double t = g == grid_points - 1 ? T : T * g / (grid_points - 1);
    direct.advance_to(t);
    embedded.advance_to(t);
    const double e = (psi(direct.state()) - embedded.state()).norm();
    if (e > out.sup_error) {
      out.sup_error = e;
      out.time_of_max = t;
    }
  }
  out.manifold_stats = direct.stats();
  out.quadratic_stats = embedded.stats();
  return out;
}

ConjugacyResult conjugacy_error(const TorusEmbedding& embedding, const Eigen::VectorXd& x0, double T,
                                const IntegratorOptions& options, int grid_points) {
  return conjugacy_error(
      FlowSource::torus(embedding.field), [&](const Eigen::VectorXd& x) { return embedding.psi(x); },
      embedding.tensor, x0, T, options, grid_points);
}

ConjugacyResult conjugacy_error(const SphereEmbedding& embedding, const Eigen::VectorXd& x0, double T,
                                const IntegratorOptions& options, int grid_points) {
  return conjugacy_error(
      FlowSource::sphere(embedding.source), [&](const Eigen::VectorXd& x) { return embedding.psi(x); },
      embedding.tensor, x0, T, options, grid_points);
}

LyapunovResult lyapunov_max(const FlowSource& source, const Eigen::VectorXd& x0, double T,
                            const LyapunovOptions& options, const Eigen::VectorXd& v0) {
  const int n = source.dimension();
  if (x0.size() != n) throw Error(ErrorCode::InvalidArgument, "initial condition has wrong size");
  if (!(options.renormalization_interval > 0.0) || !(T > 0.0))
    throw Error(ErrorCode::InvalidArgument, "horizon and renormalization interval must be positive");

  Eigen::VectorXd v(n);
  if (v0.size() == n) {
    v = v0;
  } else {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    for (int i = 0; i < n; ++i) v[i] = normal(rng);
  }
  if (!(v.norm() > 0.0)) throw Error(ErrorCode::InvalidArgument, "tangent vector must be nonzero");
  v.normalize();

  OdeRhs rhs = [&source, n](const Eigen::VectorXd& z, Eigen::VectorXd& dz) {
    Eigen::VectorXd fx(n), jv(n);
    const Eigen::VectorXd x = z.head(n);
    source.field(x, fx);
    source.jvp(x, z.tail(n), jv);
    dz.resize(2 * n);
    dz.head(n) = fx;
    dz.tail(n) = jv;
  };
  Eigen::VectorXd z(2 * n);
  z << x0, v;
  DormandPrince solver(rhs, z, 0.0, options.integrator);

  LyapunovResult out;
  const double transient = options.transient_fraction * T;
  double sum = 0.0, elapsed = 0.0;
  for (long k = 1;; ++k) {
    const double t_prev = solver.time();
    const double t = std::min(T, static_cast<double>(k) * options.renormalization_interval);
    solver.advance_to(t);
    Eigen::VectorXd state = solver.state();
    const double growth = state.tail(n).norm();
    if (!(growth > 0.0) || !std::isfinite(growth))
      throw Error(ErrorCode::StepFailure, "tangent vector degenerated");
    if (t_prev >= transient) {
      sum += std::log(growth);
      elapsed += t - t_prev;
      out.trace_times.push_back(t);
      out.trace.push_back(sum / elapsed);
    }
    state.tail(n) /= growth;
    solver.reset_state(state);
    if (t >= T) break;
  }
  if (out.trace.empty()) throw Error(ErrorCode::InvalidArgument, "horizon too short for the transient discard");
  out.estimate = out.trace.back();

  const size_t start = out.trace.size() * 3 / 4;
  const auto first = out.trace.begin() + static_cast<std::ptrdiff_t>(start);
  const double count = static_cast<double>(out.trace.end() - first);
  double mean = 0.0;
  for (auto it = first; it != out.trace.end(); ++it) mean += *it;
  mean /= count;
  double var = 0.0;
  for (auto it = first; it != out.trace.end(); ++it) var += (*it - mean) * (*it - mean);
  out.variability = std::sqrt(var / count);
  const auto [lo, hi] = std::minmax_element(first, out.trace.end());
  out.last_quarter_range = *hi - *lo;
  out.converged = out.last_quarter_range <= options.cauchy_rel * std::abs(out.estimate) + options.cauchy_abs;
  return out;
}

ChaoticScan scan_chaotic_initial_condition(const TorusField& field, int candidates, double horizon,
                                           std::uint64_t seed, const LyapunovOptions& options) {
  if (candidates < 1) throw Error(ErrorCode::InvalidArgument, "need at least one candidate");
  const FlowSource source = FlowSource::torus(field);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  ChaoticScan best;
  best.candidates = candidates;
  best.short_estimate = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < candidates; ++c) {
    Eigen::VectorXd x(field.dimension());
    for (int i = 0; i < x.size(); ++i) x[i] = uniform(rng);
    const double est = lyapunov_max(source, x, horizon, options).estimate;
    if (est > best.short_estimate) {
      best.short_estimate = est;
      best.initial_condition = x;
    }
  }
  return best;
}

std::vector<SectionPoint> poincare_section(const FlowSource& source, const Eigen::VectorXd& x0, double T,
                                           const Hyperplane& plane, const IntegratorOptions& options,
                                           double time_tol) {
  if (plane.normal.size() != source.dimension())
    throw Error(ErrorCode::InvalidArgument, "hyperplane normal has wrong size");
  auto level = [&](const Eigen::VectorXd& x) { return plane.normal.dot(x) - plane.offset; };
  DormandPrince solver(source.rhs(), x0, 0.0, options);
  std::vector<SectionPoint> out;
  double g_prev = level(x0);
  while (solver.time() < T) {
    solver.step(T);
    const double g = level(solver.state());
    // Levels crossed during this step, in time order.
    std::vector<double> shifts;
    int dir;
    if (plane.periodic) {
      const double a = std::floor(g_prev), b = std::floor(g);
      dir = b > a ? 1 : -1;
      if (b > a)
        for (double m = a + 1; m <= b; ++m) shifts.push_back(m);
      else
        for (double m = a; m > b; --m) shifts.push_back(m);
    } else {
      dir = g > g_prev ? 1 : -1;
      if ((g_prev < 0.0) != (g < 0.0)) shifts.push_back(0.0);
    }
    g_prev = g;
    if (shifts.empty() || (plane.direction != 0 && plane.direction != dir)) continue;

    for (double shift : shifts) {
      double lo = solver.previous_time(), hi = solver.time();
      auto h = [&](double t) { return level(solver.interpolate(t)) - shift; };
      const bool lo_negative = dir > 0;
      while (hi - lo > time_tol) {
        const double mid = 0.5 * (lo + hi);
        if ((h(mid) < 0.0) == lo_negative)
          lo = mid;
        else
          hi = mid;
      }
      const double tc = 0.5 * (lo + hi);
      out.push_back({tc, solver.interpolate(tc)});
    }
  }
  return out;
}

BoxCount box_counting(const std::vector<Eigen::Vector2d>& points, const std::vector<int>& grid_sizes) {
  BoxCount out;
  for (int g : grid_sizes) {
    if (g < 1) throw Error(ErrorCode::InvalidArgument, "grid size must be positive");
    std::set<std::pair<long, long>> boxes;
    for (const auto& p : points) {
      const double u = p[0] - std::floor(p[0]), v = p[1] - std::floor(p[1]);
      boxes.emplace(std::min<long>(g - 1, static_cast<long>(u * g)), std::min<long>(g - 1, static_cast<long>(v * g)));
    }
    out.box_sizes.push_back(1.0 / g);
    out.counts.push_back(static_cast<long long>(boxes.size()));
  }
  if (points.empty() || grid_sizes.size() < 2) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(grid_sizes.size());
  for (size_t i = 0; i < grid_sizes.size(); ++i) {
    const double x = std::log(static_cast<double>(grid_sizes[i]));
    const double y = std::log(static_cast<double>(out.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.dimension = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return out;
}

std::string_view section_class_name(SectionClass c) {
  switch (c) {
    case SectionClass::Empty:
      return "empty";
    case SectionClass::Regular:
      return "regular";
    case SectionClass::Chaotic:
      return "chaotic";
  }
  return "unknown";
}

SectionClass classify_section(const BoxCount& count, double threshold) {
  if (count.counts.empty() || count.counts.back() == 0) return SectionClass::Empty;
  return count.dimension >= threshold ? SectionClass::Chaotic : SectionClass::Regular;
}

}  // namespace quadembed
