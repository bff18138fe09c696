#pragma once

#include <map>
#include <vector>

#include <Eigen/Core>

#include "quadembed/quadratic_tensor.hpp"

namespace quadembed {

// Integer frequency vector k in Z^n.
class FrequencyVector {
 public:
  FrequencyVector() = default;
  explicit FrequencyVector(std::vector<int> entries) : entries_(std::move(entries)) {}

  int dimension() const { return static_cast<int>(entries_.size()); }
  const std::vector<int>& entries() const { return entries_; }
  int operator[](int i) const { return entries_[static_cast<size_t>(i)]; }
  long long squared_norm() const;
  bool is_zero() const;
  FrequencyVector negated() const;
  // A vector is canonical when it is lexicographically larger than its
  // negation, i.e. its first nonzero entry is positive.
  bool is_canonical() const;
  FrequencyVector canonical() const { return is_canonical() || is_zero() ? *this : negated(); }
  double dot(const Eigen::VectorXd& v) const;

  friend auto operator<=>(const FrequencyVector&, const FrequencyVector&) = default;

 private:
  std::vector<int> entries_;
};

struct FourierCoefficient {
  Eigen::VectorXd a;  // multiplies sin(2 pi k.x)
  Eigen::VectorXd b;  // multiplies cos(2 pi k.x)
};

// One record per antipodal class: the field contains the term
//   a sin(2 pi k.x) + b cos(2 pi k.x).
struct FourierTerm {
  FrequencyVector k;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
};

// Trigonometric-polynomial vector field on T^n = (R/Z)^n,
//   X(x) = sum_k a_k sin(2 pi k.x) + b_k cos(2 pi k.x),
// with the sum over every stored k (both members of an antipodal pair are
// stored, so the reality constraints read a_{-k} = -a_k, b_{-k} = b_k).
class TorusField {
 public:
  TorusField(int n, double cutoff);

  // Raw coefficient map; no constraint is enforced (see validate_torus_field).
  TorusField(int n, double cutoff, std::map<FrequencyVector, FourierCoefficient> coefficients);

  // Builds the field sum_t a_t sin(2 pi k_t.x) + b_t cos(2 pi k_t.x) by
  // splitting each record evenly between k and -k. Records sharing an
  // antipodal class are summed.
  static TorusField from_terms(int n, double cutoff, const std::vector<FourierTerm>& terms);

  int dimension() const { return n_; }
  double cutoff() const { return cutoff_; }
  const std::map<FrequencyVector, FourierCoefficient>& coefficients() const { return coefficients_; }

  // Effective term per antipodal class, canonical representative first:
  // a_eff = a_k - a_{-k}, b_eff = b_k + b_{-k} (b_0 for the zero class).
  std::vector<FourierTerm> terms() const;
  bool has_mean() const;
  // Degree = |k|^2 of the highest stored frequency.
  long long degree() const;
  double coefficient_norm() const;

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;

 private:
  int n_;
  double cutoff_;
  std::map<FrequencyVector, FourierCoefficient> coefficients_;
};

TorusField abc_field(double A, double B, double C);

struct LatticeSet {
  int n = 0;
  double cutoff = 0.0;
  // One canonical representative per antipodal pair, lexicographic order,
  // with the zero vector first when included.
  std::vector<FrequencyVector> representatives;
  bool includes_zero = false;
  // Number of lattice points in the closed ball, before any reduction.
  long long full_count = 0;

  int embedding_dimension() const { return 2 * static_cast<int>(representatives.size()); }
  // Coordinates when every k (not only representatives) gets its own pair;
  // the zero vector counts only when it is included.
  long long unreduced_embedding_dimension() const { return 2 * (full_count - (includes_zero ? 0 : 1)); }
};

LatticeSet enumerate_lattice(int n, double cutoff, bool zero_mean);

struct TorusValidation {
  bool valid = true;
  double max_violation = 0.0;
  double max_cutoff_excess = 0.0;
};

// Throws ConstraintViolation when a reality constraint is violated beyond
// tol or a stored frequency lies outside the cutoff ball.
TorusValidation validate_torus_field(const TorusField& field, double tol = 1e-14);

Eigen::VectorXd eval_torus_field(const TorusField& field, const Eigen::VectorXd& x);

// Coordinates ordered (q_k, p_k) = (sin 2 pi k.x, cos 2 pi k.x) per
// representative in lattice order.
Eigen::VectorXd psi_torus(const LatticeSet& lattice, const Eigen::VectorXd& x);
Eigen::MatrixXd psi_torus_jacobian(const LatticeSet& lattice, const Eigen::VectorXd& x);

// Lattice used for the embedding of a given field: cutoff from the field,
// zero frequency kept only when the field has a nonzero mean.
LatticeSet field_lattice(const TorusField& field);

QuadraticTensor build_torus_tensor(const TorusField& field, const LatticeSet& lattice);
inline QuadraticTensor build_torus_tensor(const TorusField& field) {
  return build_torus_tensor(field, field_lattice(field));
}

struct TorusDivergenceReport {
  bool field_divergence_free = true;
  bool tensor_divergence_free = true;
  // Largest |a_k.k|, |b_k.k| over effective terms.
  double max_field_contraction = 0.0;
  // Largest coefficient of the divergence form of the built tensor.
  double max_tensor_divergence = 0.0;
};

TorusDivergenceReport torus_divergence_check(const TorusField& field, double tol = 1e-12);

// Everything needed to compare the torus flow with the quadratic flow.
struct TorusEmbedding {
  TorusField field;
  LatticeSet lattice;
  QuadraticTensor tensor;

  explicit TorusEmbedding(TorusField f);
  Eigen::VectorXd psi(const Eigen::VectorXd& x) const { return psi_torus(lattice, x); }
  Eigen::MatrixXd psi_jacobian(const Eigen::VectorXd& x) const { return psi_torus_jacobian(lattice, x); }
};

}  // namespace quadembed
