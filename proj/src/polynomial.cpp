#include "quadembed/polynomial.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

#include "quadembed/error.hpp"

namespace quadembed {

Polynomial::Polynomial(int variables) : variables_(variables) {
  if (variables < 1) throw Error(ErrorCode::InvalidArgument, "polynomial needs at least one variable");
}

Polynomial Polynomial::constant(int variables, double value) {
  Polynomial p(variables);
  p.add_term(Exponent(static_cast<size_t>(variables), 0), value);
  return p;
}

Polynomial Polynomial::variable(int variables, int index) {
  Exponent e(static_cast<size_t>(variables), 0);
  e.at(static_cast<size_t>(index)) = 1;
  return monomial(std::move(e));
}

Polynomial Polynomial::monomial(Exponent exponent, double coefficient) {
  Polynomial p(static_cast<int>(exponent.size()));
  p.add_term(exponent, coefficient);
  return p;
}

int Polynomial::degree() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    deg = std::max(deg, s);
  }
  return deg;
}

bool Polynomial::is_homogeneous() const {
  int deg = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (int v : e) s += v;
    if (deg >= 0 && s != deg) return false;
    deg = s;
  }
  return true;
}

double Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Exponent& e, double coefficient) {
  if (static_cast<int>(e.size()) != variables_)
    throw Error(ErrorCode::InvalidArgument, "exponent length does not match variable count");
  for (int v : e)
    if (v < 0) throw Error(ErrorCode::InvalidArgument, "negative exponent");
  if (coefficient == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> x) const {
  assert(static_cast<int>(x.size()) == variables_);
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (size_t i = 0; i < e.size(); ++i) {
      for (int p = 0; p < e[i]; ++p) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::derivative(int index) const {
  Polynomial out(variables_);
  const auto idx = static_cast<size_t>(index);
  for (const auto& [e, c] : terms_) {
    if (e[idx] == 0) continue;
    Exponent f = e;
    f[idx] -= 1;
    out.add_term(f, c * e[idx]);
  }
  return out;
}

Polynomial Polynomial::laplacian() const {
  Polynomial out(variables_);
  for (int i = 0; i < variables_; ++i) out += derivative(i).derivative(i);
  return out;
}

Polynomial Polynomial::sphere_normal_form() const {
  Polynomial out(variables_);
  // Work list of pending terms; each rewrite lowers the x_0 exponent by two.
  std::map<Exponent, double> pending = terms_;
  while (!pending.empty()) {
    auto node = pending.extract(pending.begin());
    const Exponent& e = node.key();
    const double c = node.mapped();
    if (e[0] < 2) {
      out.add_term(e, c);
      continue;
    }
    Exponent base = e;
    base[0] -= 2;
    auto push = [&](const Exponent& f, double v) {
      auto [it, inserted] = pending.try_emplace(f, v);
      if (!inserted) {
        it->second += v;
        if (it->second == 0.0) pending.erase(it);
      }
    };
    push(base, c);
    for (size_t i = 1; i < base.size(); ++i) {
      Exponent f = base;
      f[i] += 2;
      push(f, -c);
    }
  }
  return out;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial out(variables_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > tol) out.terms_.emplace(e, c);
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.variables_ != variables_) throw Error(ErrorCode::InvalidArgument, "variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.variables_ != variables_) throw Error(ErrorCode::InvalidArgument, "variable count mismatch");
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.variables_ != b.variables_) throw Error(ErrorCode::InvalidArgument, "variable count mismatch");
  Polynomial out(a.variables_);
  Exponent f(static_cast<size_t>(a.variables_));
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (size_t i = 0; i < f.size(); ++i) f[i] = ea[i] + eb[i];
      out.add_term(f, ca * cb);
    }
  }
  return out;
}

Eigen::VectorXd evaluate_field(const PolyField& field, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(field.size()));
  for (size_t i = 0; i < field.size(); ++i) out[static_cast<Eigen::Index>(i)] = field[i].evaluate(x);
  return out;
}

Eigen::MatrixXd field_jacobian(const PolyField& field, const Eigen::VectorXd& x) {
  Eigen::MatrixXd J(static_cast<Eigen::Index>(field.size()), x.size());
  for (size_t i = 0; i < field.size(); ++i)
    for (Eigen::Index j = 0; j < x.size(); ++j)
      J(static_cast<Eigen::Index>(i), j) = field[i].derivative(static_cast<int>(j)).evaluate(x);
  return J;
}

Polynomial radial_component(const PolyField& field) {
  if (field.empty()) throw Error(ErrorCode::InvalidArgument, "empty field");
  const int vars = field.front().variables();
  Polynomial out(vars);
  for (size_t i = 0; i < field.size(); ++i) out += field[i] * Polynomial::variable(vars, static_cast<int>(i));
  return out;
}

int field_degree(const PolyField& field) {
  int deg = -1;
  for (const auto& p : field) deg = std::max(deg, p.degree());
  return deg;
}

double sphere_area(int n) {
  const double half = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double sphere_mean_moment(const Exponent& e) {
  const int n = static_cast<int>(e.size()) - 1;
  int total = 0;
  double num = 1.0;
  for (int v : e) {
    if (v % 2 != 0) return 0.0;
    total += v;
    for (int t = v - 1; t > 0; t -= 2) num *= t;
  }
  double den = 1.0;
  for (int t = 0; t < total / 2; ++t) den *= (n + 1 + 2 * t);
  return num / den;
}

double sphere_moment(const Exponent& e) {
  return sphere_area(static_cast<int>(e.size()) - 1) * sphere_mean_moment(e);
}

double sphere_integral(const Polynomial& p) {
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) sum += c * sphere_mean_moment(e);
  return sum * sphere_area(p.variables() - 1);
}

double sphere_inner(const Polynomial& p, const Polynomial& q) {
  if (p.variables() != q.variables()) throw Error(ErrorCode::InvalidArgument, "variable count mismatch");
  Exponent f(static_cast<size_t>(p.variables()));
  double sum = 0.0;
  for (const auto& [ea, ca] : p.terms()) {
    for (const auto& [eb, cb] : q.terms()) {
      for (size_t i = 0; i < f.size(); ++i) f[i] = ea[i] + eb[i];
      sum += ca * cb * sphere_mean_moment(f);
    }
  }
  return sum * sphere_area(p.variables() - 1);
}

}  // namespace quadembed
