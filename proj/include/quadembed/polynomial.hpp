#pragma once

#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace quadembed {

using Exponent = std::vector<int>;

// Sparse multivariate polynomial with real coefficients. Terms are kept in a
// std::map keyed by exponent vector, so iteration order is the canonical
// lexicographic order of exponents and two equal polynomials serialize
// identically.
class Polynomial {
 public:
  explicit Polynomial(int variables = 1);

  static Polynomial constant(int variables, double value);
  static Polynomial variable(int variables, int index);
  static Polynomial monomial(Exponent exponent, double coefficient = 1.0);

  int variables() const { return variables_; }
  // -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_homogeneous() const;

  const std::map<Exponent, double>& terms() const { return terms_; }
  double coefficient(const Exponent& e) const;
  void add_term(const Exponent& e, double coefficient);

  double evaluate(std::span<const double> x) const;
  double evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), static_cast<size_t>(x.size())));
  }

  Polynomial derivative(int index) const;
  Polynomial laplacian() const;

  // Normal form modulo the ideal (|x|^2 - 1): every x_0^2 is rewritten as
  // 1 - sum_{i>0} x_i^2, so the result has x_0-degree at most one. Two
  // polynomials agree on the unit sphere iff their normal forms coincide.
  Polynomial sphere_normal_form() const;

  double max_abs_coefficient() const;
  // Drops terms with |c| <= tol.
  Polynomial pruned(double tol) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  int variables_;
  std::map<Exponent, double> terms_;
};

// Vector field on R^{n+1} given by polynomial components.
using PolyField = std::vector<Polynomial>;

Eigen::VectorXd evaluate_field(const PolyField& field, const Eigen::VectorXd& x);
// Rows are components, columns are partial derivatives.
Eigen::MatrixXd field_jacobian(const PolyField& field, const Eigen::VectorXd& x);
// Sum_i P_i x_i as a polynomial.
Polynomial radial_component(const PolyField& field);
int field_degree(const PolyField& field);

// Surface area of the unit sphere S^n in R^{n+1}.
double sphere_area(int n);
// Integral of x^e over S^n, where n = e.size() - 1. Zero when any entry is odd.
double sphere_moment(const Exponent& e);
// Moment divided by the area; a rational number computed by a finite product.
double sphere_mean_moment(const Exponent& e);
double sphere_integral(const Polynomial& p);
// L^2(S^n) inner product of the restrictions of p and q.
double sphere_inner(const Polynomial& p, const Polynomial& q);

}  // namespace quadembed
