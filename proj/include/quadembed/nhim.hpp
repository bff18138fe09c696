#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "quadembed/integrator.hpp"
#include "quadembed/polynomial.hpp"
#include "quadembed/sphere_harmonics.hpp"

namespace quadembed {

struct NhimConfig {
  double contraction = 5.0;  // C
  int order = 1;             // r
  double c = 1.0;
  double mu = 0.0;
  double lambda = 1.0;
  double delta = 0.0;

  // Throws InvalidArgument unless C > 0, r >= 1, c > 0 and 0 <= mu < lambda.
  void validate() const;
};

struct ApproxParams {
  double epsilon = 0.1;
  int m = 1;
  int k = 2;
  double jackson_constant = 1.0;  // C', not determined; default is a placeholder

  void validate() const;
};

// The only shipped instance: the equator {x_2 = 0} of S^2.
inline constexpr std::string_view kEquatorS2 = "equator-s2";

// Z = X - C x_2 (e_2 - x_2 x), contracting towards the equator. Throws
// UnsupportedManifold for any other manifold name and InvalidArgument if X
// is not a field on R^3 tangent to the equator.
PolyField extend_with_contraction(const PolyField& base, double contraction, std::string_view manifold = kEquatorS2);

// z-rotation h_z = (-x_1, x_0, 0).
PolyField equator_rotation_field();

// C = r L + 1 with L the largest spectral norm of the ambient Jacobian of X
// sampled along the equator.
double default_contraction(const PolyField& base, int order, int samples = 256);

// Central difference of dz/dt across the equator at azimuth phi, with one
// Richardson level.
double normal_eigenvalue(const PolyField& field, double phi, double h = 1e-5);

using PointField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SphereQuadrature {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;  // sum to the area of S^2
};

// Gauss-Legendre in x_2 times the uniform rule in azimuth.
SphereQuadrature sphere_quadrature(int polar, int azimuthal);
// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct Projection {
  SphereField field;
  double rms_residual = 0.0;  // sqrt(sum w |r|^2 / sum w)
  double max_residual = 0.0;
};

// Weighted least squares onto span{Y_alpha h_mu : deg Y_alpha <= D} on S^2.
// The default grid is fixed so residuals for different D are comparable.
Projection polynomial_project(const PointField& field, int degree, const SphereQuadrature& grid);
Projection polynomial_project(const PointField& field, int degree);

// Radially projected polynomial field with random coefficients of degree
// <= degree, scaled to unit sup norm on a sample of S^2.
PolyField random_tangent_perturbation(int degree, std::uint64_t seed);

struct CircleLocateOptions {
  int fan = 64;
  double offset = 0.3;  // initial height above/below the seed circle
  int bins = 128;
  double window = 6.283185307179586;
  double settle_tolerance = 1e-7;
  double initial_settle = 10.0;
  IntegratorOptions integrator{1e-10, 1e-12};
};

struct InvariantCircle {
  std::vector<double> bin_angle;
  std::vector<double> bin_height;  // mean x_2 of the samples in each bin
  std::vector<Eigen::Vector3d> samples;
  // Geodesic Hausdorff distance to the equator, measured bin by bin.
  double hausdorff = 0.0;
  double settle_time = 0.0;
  double last_change = 0.0;
};

// Settles a fan of trajectories and bins the attractor by azimuth. Throws
// NoConvergence if some bin stays empty or the bins keep moving past
// t_settle.
InvariantCircle invariant_circle_locate(const PolyField& field, double t_settle,
                                        const CircleLocateOptions& options = {});

long long jackson_degree_bound(const ApproxParams& params, double norm);

struct DimensionBound {
  double bound = 0.0;
  bool vacuous = false;
  long long degree = 0;
  long long harmonic_dimension = 0;
  long long so_torus_dimension = 0;
};

DimensionBound manifold_dim_bound(const ApproxParams& params, int n, double norm);

// dim SO(d) x T^d = d(d-1)/2 + d.
long long so_torus_dimension(long long d);

}  // namespace quadembed
