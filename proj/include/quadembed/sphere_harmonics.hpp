#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "quadembed/polynomial.hpp"
#include "quadembed/quadratic_tensor.hpp"

namespace quadembed {

enum class DimensionMode { PerDegree, Cumulative };

struct HarmonicDimension {
  long long value = 0;        // direct count, canonical
  double closed_form_sum = 0;  // the binomial-ratio sum, evaluated literally
  double closed_form = 0;      // the product closed form, evaluated literally
  bool closed_form_matches = false;
};

// Dimension of the degree-j harmonic polynomials on R^{n+1} is
// C(n+j, j) - C(n+j-2, j-2); cumulative mode sums j = 0..D.
HarmonicDimension harmonic_dimension(int n, int degree, DimensionMode mode);
long long binomial(long long a, long long b);

// Basis A_mu of so(n+1): one per coordinate plane (i, j), i < j, in
// lexicographic order, with h_mu(x) = A_mu x = x_i e_j - x_j e_i.
struct GeneratorSet {
  int n = 0;
  std::vector<std::pair<int, int>> planes;
  std::vector<Eigen::MatrixXd> matrices;

  int size() const { return static_cast<int>(planes.size()); }
  PolyField field(int mu) const;
  Eigen::VectorXd evaluate(int mu, const Eigen::VectorXd& x) const { return matrices[static_cast<size_t>(mu)] * x; }
  // Derivative of p along h_mu, as a polynomial.
  Polynomial apply(int mu, const Polynomial& p) const;
};

GeneratorSet so_generators(int n);

// L^2(S^n)-orthonormal spherical harmonics of degree <= N, ordered by
// increasing degree. Each element is a homogeneous harmonic polynomial.
class HarmonicBasis {
 public:
  HarmonicBasis(int n, int max_degree, std::vector<Polynomial> elements, std::vector<int> degrees);

  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const Polynomial& element(int alpha) const { return elements_[static_cast<size_t>(alpha)]; }
  const std::vector<Polynomial>& elements() const { return elements_; }
  int degree(int alpha) const { return degrees_[static_cast<size_t>(alpha)]; }
  const std::vector<int>& degrees() const { return degrees_; }

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  // d x (n+1) matrix of ambient gradients.
  Eigen::MatrixXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd gram() const;
  // FNV-1a over the canonical text form; identical bases hash identically.
  std::uint64_t content_hash() const;

 private:
  int n_;
  int max_degree_;
  std::vector<Polynomial> elements_;
  std::vector<int> degrees_;
  std::vector<std::vector<Polynomial>> gradients_;
};

// Throws DegenerateBasis when a Gram-Schmidt pivot drops below 1e-12.
HarmonicBasis harmonic_basis(int n, int max_degree);

// theta(mu, gamma, beta) = integral over S^n of h_mu(Y_beta) Y_gamma.
class ThetaTensor {
 public:
  ThetaTensor(int m, int d) : m_(m), d_(d), data_(static_cast<size_t>(m) * d * d, 0.0) {}

  int generators() const { return m_; }
  int dimension() const { return d_; }
  double operator()(int mu, int gamma, int beta) const { return data_[index(mu, gamma, beta)]; }
  double& operator()(int mu, int gamma, int beta) { return data_[index(mu, gamma, beta)]; }

  // Diagnostics of the raw quadrature-free integrals before the stored
  // values were antisymmetrized and cleared across degree blocks.
  double raw_antisymmetry_violation = 0.0;
  double raw_cross_degree_max = 0.0;
  double expansion_residual = 0.0;

 private:
  size_t index(int mu, int gamma, int beta) const {
    return (static_cast<size_t>(mu) * static_cast<size_t>(d_) + static_cast<size_t>(gamma)) * static_cast<size_t>(d_) +
           static_cast<size_t>(beta);
  }
  int m_, d_;
  std::vector<double> data_;
};

// Throws ExpansionResidual if h_mu(Y_beta) = sum_gamma theta Y_gamma fails
// by more than 1e-10 at random sphere points.
ThetaTensor theta_coefficients(const HarmonicBasis& basis, const GeneratorSet& generators);

// Tangent field X = sum_mu f_mu h_mu with f_mu = sum_alpha c(mu, alpha) Y_alpha.
class SphereField {
 public:
  SphereField(std::shared_ptr<const HarmonicBasis> basis, GeneratorSet generators, Eigen::MatrixXd coefficients);

  const HarmonicBasis& basis() const { return *basis_; }
  std::shared_ptr<const HarmonicBasis> basis_ptr() const { return basis_; }
  const GeneratorSet& generators() const { return generators_; }
  const Eigen::MatrixXd& coefficients() const { return coefficients_; }

  Eigen::VectorXd component_functions(const Eigen::VectorXd& x) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  // Ambient polynomial field sum_mu f_mu h_mu.
  PolyField polynomial_field() const;
  // True when no f_mu has a component along the constant harmonic.
  bool zero_mean(double tol = 1e-14) const;

 private:
  std::shared_ptr<const HarmonicBasis> basis_;
  GeneratorSet generators_;
  Eigen::MatrixXd coefficients_;  // m x d
};

struct Decomposition {
  SphereField field;
  // Residual of the linear system in normal-form coefficients.
  double system_residual = 0.0;
  // Max |P(x) - X(x)| over random sphere points.
  double reconstruction_residual = 0.0;
  double tangency_residual = 0.0;
};

// Minimal-norm coefficients reproducing the polynomial field P on S^n.
// Throws NotTangent or DegreeOverflow.
Decomposition decompose_sphere_field(const PolyField& field, std::shared_ptr<const HarmonicBasis> basis,
                                     const GeneratorSet& generators, std::uint64_t seed = 11);

struct SphereTensorOptions {
  // Drop the constant harmonic from the embedding when every f_mu has zero mean.
  bool drop_constant = false;
};

// B(beta, alpha, gamma) = sum_mu theta(mu, gamma, beta) c(mu, alpha). With
// drop_constant active the constant coordinate is removed and indices shift
// down by one.
QuadraticTensor build_sphere_tensor(const SphereField& field, const ThetaTensor& theta,
                                    const SphereTensorOptions& options = {});

// Throws OffSphere when | |x| - 1 | > 1e-12.
Eigen::VectorXd psi_sphere(const HarmonicBasis& basis, const Eigen::VectorXd& x, bool drop_constant = false);
Eigen::MatrixXd psi_sphere_jacobian(const HarmonicBasis& basis, const Eigen::VectorXd& x, bool drop_constant = false);

struct SphereDivergenceReport {
  bool field_divergence_free = true;
  bool tensor_divergence_free = true;
  double max_contraction = 0.0;
  double max_tensor_divergence = 0.0;
  Eigen::VectorXd contraction;  // sum_{mu, alpha} c(mu, alpha) theta(mu, alpha, beta), per beta
};

SphereDivergenceReport sphere_divergence_check(const SphereField& field, const ThetaTensor& theta,
                                               double tol = 1e-10);

// Real and imaginary parts of the homogeneous field attached to a triangle
// with angles l1, l2, l3, radially projected so both are tangent to S^3.
struct BilliardFields {
  PolyField real_part;
  PolyField imaginary_part;
};

// Throws BadAngles unless all angles are positive and sum to pi within 1e-12.
BilliardFields billiard_field(double l1, double l2, double l3);

// Everything needed to compare the sphere flow with the quadratic flow.
struct SphereEmbedding {
  PolyField source;
  std::shared_ptr<const HarmonicBasis> basis;
  GeneratorSet generators;
  ThetaTensor theta;
  Decomposition decomposition;
  bool drop_constant = false;
  QuadraticTensor tensor;

  SphereEmbedding(PolyField field, int max_degree, bool drop_constant = false);
  // Unchecked: evaluates the polynomial extension, so integrated points that
  // drift slightly off the sphere are accepted.
  Eigen::VectorXd psi(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd psi_jacobian(const Eigen::VectorXd& x) const;
};

Eigen::VectorXd random_sphere_point(int n, std::mt19937_64& rng);

}  // namespace quadembed
