#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadembed/integrator.hpp"
#include "quadembed/lattice_fourier.hpp"
#include "quadembed/polynomial.hpp"
#include "quadembed/quadratic_tensor.hpp"
#include "quadembed/sphere_harmonics.hpp"

namespace quadembed {

// A vector field together with its tangent dynamics.
class FlowSource {
 public:
  enum class Kind { Torus, Sphere, Quadratic };

  static FlowSource torus(TorusField field);
  // Polynomial field on R^{n+1} tangent to S^n.
  static FlowSource sphere(PolyField field);
  static FlowSource quadratic(QuadraticTensor tensor);

  Kind kind() const { return kind_; }
  std::string_view kind_name() const;
  int dimension() const { return dim_; }
  void field(const Eigen::VectorXd& x, Eigen::VectorXd& out) const { field_(x, out); }
  Eigen::VectorXd field(const Eigen::VectorXd& x) const;
  // Derivative of the field at x along v.
  void jvp(const Eigen::VectorXd& x, const Eigen::VectorXd& v, Eigen::VectorXd& out) const { jvp_(x, v, out); }
  OdeRhs rhs() const { return field_; }

 private:
  using Jvp = std::function<void(const Eigen::VectorXd&, const Eigen::VectorXd&, Eigen::VectorXd&)>;
  FlowSource(Kind kind, int dim, OdeRhs field, Jvp jvp)
      : kind_(kind), dim_(dim), field_(std::move(field)), jvp_(std::move(jvp)) {}

  Kind kind_;
  int dim_;
  OdeRhs field_;
  Jvp jvp_;
};

Trajectory integrate_manifold_field(const FlowSource& source, const Eigen::VectorXd& x0, double T,
                                    const IntegratorOptions& options);
Trajectory integrate_quadratic(const QuadraticTensor& tensor, const Eigen::VectorXd& y0, double T,
                               const IntegratorOptions& options);

// max_t | |y(t)|^2 - |y(0)|^2 | over the stored steps.
double norm_drift(const Trajectory& trajectory);
// max_t | |x(t)| - 1 | for sphere trajectories.
double sphere_drift(const Trajectory& trajectory);

using EmbeddingMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct ConjugacyResult {
  double sup_error = 0.0;
  double time_of_max = 0.0;
  int grid_points = 0;
  StepStats manifold_stats;
  StepStats quadratic_stats;
};

// Sup over a uniform time grid of |Psi(phi_X^t(x0)) - phi_V^t(Psi(x0))|.
// Both flows are integrated independently and stopped exactly on the grid.
ConjugacyResult conjugacy_error(const FlowSource& manifold, const EmbeddingMap& psi, const QuadraticTensor& tensor,
                                const Eigen::VectorXd& x0, double T, const IntegratorOptions& options,
                                int grid_points = 1001);
ConjugacyResult conjugacy_error(const TorusEmbedding& embedding, const Eigen::VectorXd& x0, double T,
                                const IntegratorOptions& options, int grid_points = 1001);
ConjugacyResult conjugacy_error(const SphereEmbedding& embedding, const Eigen::VectorXd& x0, double T,
                                const IntegratorOptions& options, int grid_points = 1001);

struct LyapunovOptions {
  double renormalization_interval = 1.0;
  double transient_fraction = 0.2;
  // The trace is converged when its range over the last quarter is below
  // cauchy_rel * |estimate| + cauchy_abs.
  double cauchy_rel = 0.1;
  double cauchy_abs = 1e-3;
  std::uint64_t seed = 1;
  IntegratorOptions integrator{1e-9, 1e-12};
};

struct LyapunovResult {
  double estimate = 0.0;
  // Running estimate after every renormalization past the transient.
  std::vector<double> trace_times;
  std::vector<double> trace;
  // Standard deviation of the trace over its last quarter.
  double variability = 0.0;
  double last_quarter_range = 0.0;
  bool converged = false;
};

// Benettin estimate of the largest exponent. The initial tangent vector is
// random (from options.seed) unless given.
LyapunovResult lyapunov_max(const FlowSource& source, const Eigen::VectorXd& x0, double T,
                            const LyapunovOptions& options = {}, const Eigen::VectorXd& v0 = {});

struct ChaoticScan {
  Eigen::VectorXd initial_condition;
  double short_estimate = 0.0;
  int candidates = 0;
};

// Samples candidates uniformly on T^n from seed and keeps the one with the
// largest short-horizon exponent.
ChaoticScan scan_chaotic_initial_condition(const TorusField& field, int candidates, double horizon,
                                           std::uint64_t seed, const LyapunovOptions& options = {});

struct Hyperplane {
  Eigen::VectorXd normal;
  double offset = 0.0;
  // Crossings of normal.x = offset + m for every integer m; for torus flows.
  bool periodic = false;
  // +1 upward crossings only, -1 downward only, 0 both.
  int direction = 0;
};

struct SectionPoint {
  double time;
  Eigen::VectorXd state;
};

// Crossing times refined by bisection on the dense output to time_tol.
std::vector<SectionPoint> poincare_section(const FlowSource& source, const Eigen::VectorXd& x0, double T,
                                           const Hyperplane& plane, const IntegratorOptions& options,
                                           double time_tol = 1e-10);

struct BoxCount {
  std::vector<double> box_sizes;
  std::vector<long long> counts;
  // Least-squares slope of log N against log(1/size).
  double dimension = 0.0;
};

// Box counting on the unit square for 2-D section coordinates, wrapped mod 1.
BoxCount box_counting(const std::vector<Eigen::Vector2d>& points, const std::vector<int>& grid_sizes = {8, 16, 32, 64, 128});

enum class SectionClass { Empty, Regular, Chaotic };
std::string_view section_class_name(SectionClass c);
// Scattered clouds fill boxes like a 2-D set, regular ones like a curve.
SectionClass classify_section(const BoxCount& count, double threshold = 1.25);

}  // namespace quadembed
