#include "quadembed/sphere_harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>

#include <Eigen/Dense>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

constexpr double kGramSchmidtPivot = 1e-12;
constexpr double kExpansionTol = 1e-10;
constexpr double kSphereTol = 1e-12;

// Exponents of total degree `degree` over `vars` variables, descending
// lexicographic order.
void exponents_of_degree(int vars, int degree, std::vector<Exponent>& out) {
  Exponent e(static_cast<size_t>(vars), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == vars - 1) {
      e[static_cast<size_t>(pos)] = remaining;
      out.push_back(e);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      e[static_cast<size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, degree);
}

// Laplacian in the variables x_1..x_n only.
Polynomial partial_laplacian(const Polynomial& p) {
  Polynomial out(p.variables());
  for (int i = 1; i < p.variables(); ++i) out += p.derivative(i).derivative(i);
  return out;
}

// Unique harmonic polynomial whose part of x_0-degree <= 1 is the seed
// monomial x^e (with e_0 in {0, 1}). Writing H = sum_t x_0^{a+2t} f_t,
// harmonicity forces f_{t+1} = -Lap'(f_t) / ((a+2t+2)(a+2t+1)).
Polynomial harmonic_from_seed(const Exponent& seed) {
  const int vars = static_cast<int>(seed.size());
  const int a = seed[0];
  Exponent rest = seed;
  rest[0] = 0;
  Polynomial f = Polynomial::monomial(rest);
  Polynomial h(vars);
  for (int t = 0; !f.is_zero(); ++t) {
    Exponent lift(static_cast<size_t>(vars), 0);
    lift[0] = a + 2 * t;
    h += Polynomial::monomial(lift) * f;
    f = partial_laplacian(f) * (-1.0 / ((a + 2 * t + 2) * (a + 2 * t + 1)));
  }
  return h;
}

bool on_sphere(const Eigen::VectorXd& x) { return std::abs(x.norm() - 1.0) <= kSphereTol; }

void require_on_sphere(const Eigen::VectorXd& x) {
  if (!on_sphere(x)) throw Error(ErrorCode::OffSphere, "point is not on the unit sphere");
}

}  // namespace

long long binomial(long long a, long long b) {
  if (b < 0 || a < 0 || b > a) return 0;
  b = std::min(b, a - b);
  long long r = 1;
  for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

HarmonicDimension harmonic_dimension(int n, int degree, DimensionMode mode) {
  if (n < 1 || degree < 0) throw Error(ErrorCode::InvalidArgument, "harmonic_dimension needs n >= 1, D >= 0");
  auto per_degree = [n](int j) { return binomial(n + j, j) - binomial(n + j - 2, j - 2); };
  auto closed_term = [n](int j) {
    const double den = j + n - 1;
    if (den == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(binomial(j + n - 1, n)) * (2.0 * j + n - 1) / den;
  };
  HarmonicDimension out;
  if (mode == DimensionMode::PerDegree) {
    out.value = per_degree(degree);
    out.closed_form_sum = closed_term(degree);
    out.closed_form = out.closed_form_sum;
  } else {
    double sum = 0.0;
    for (int j = 0; j <= degree; ++j) {
      out.value += per_degree(j);
      sum += closed_term(j);
    }
    out.closed_form_sum = sum;
    const double D = degree;
    out.closed_form = static_cast<double>(binomial(degree + n, n)) * D * (2 * D * n + n * n + 1) /
                      (static_cast<double>(n) * (n + 1) * (D + n));
  }
  out.closed_form_matches = std::abs(out.closed_form_sum - static_cast<double>(out.value)) < 1e-9 &&
                            std::abs(out.closed_form - static_cast<double>(out.value)) < 1e-9;
  return out;
}

PolyField GeneratorSet::field(int mu) const {
  const int vars = n + 1;
  const auto [i, j] = planes.at(static_cast<size_t>(mu));
  PolyField h(static_cast<size_t>(vars), Polynomial(vars));
  h[static_cast<size_t>(i)] = Polynomial::variable(vars, j) * -1.0;
  h[static_cast<size_t>(j)] = Polynomial::variable(vars, i);
  return h;
}

Polynomial GeneratorSet::apply(int mu, const Polynomial& p) const {
  const int vars = n + 1;
  const auto [i, j] = planes.at(static_cast<size_t>(mu));
  // h = x_i e_j - x_j e_i
  return Polynomial::variable(vars, i) * p.derivative(j) - Polynomial::variable(vars, j) * p.derivative(i);
}

GeneratorSet so_generators(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "so_generators needs n >= 1");
  GeneratorSet set;
  set.n = n;
  for (int i = 0; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      set.planes.emplace_back(i, j);
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
      A(j, i) = 1.0;
      A(i, j) = -1.0;
      set.matrices.push_back(std::move(A));
    }
  }
  return set;
}

HarmonicBasis::HarmonicBasis(int n, int max_degree, std::vector<Polynomial> elements, std::vector<int> degrees)
    : n_(n), max_degree_(max_degree), elements_(std::move(elements)), degrees_(std::move(degrees)) {
  if (elements_.size() != degrees_.size()) throw Error(ErrorCode::InvalidArgument, "degree list length mismatch");
  for (const auto& y : elements_) {
    if (y.variables() != n + 1) throw Error(ErrorCode::InvalidArgument, "harmonic has wrong variable count");
    std::vector<Polynomial> grad;
    for (int i = 0; i <= n; ++i) grad.push_back(y.derivative(i));
    gradients_.push_back(std::move(grad));
  }
}

Eigen::VectorXd HarmonicBasis::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(size());
  for (int a = 0; a < size(); ++a) out[a] = elements_[static_cast<size_t>(a)].evaluate(x);
  return out;
}

Eigen::MatrixXd HarmonicBasis::gradient(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd J(size(), n_ + 1);
  for (int a = 0; a < size(); ++a)
    for (int i = 0; i <= n_; ++i) J(a, i) = gradients_[static_cast<size_t>(a)][static_cast<size_t>(i)].evaluate(x);
  return J;
}

Eigen::MatrixXd HarmonicBasis::gram() const {
  Eigen::MatrixXd G(size(), size());
  for (int a = 0; a < size(); ++a)
    for (int b = a; b < size(); ++b) G(a, b) = G(b, a) = sphere_inner(element(a), element(b));
  return G;
}

std::uint64_t HarmonicBasis::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto feed = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  char buf[64];
  feed("n=" + std::to_string(n_) + ";N=" + std::to_string(max_degree_) + ";");
  for (const auto& y : elements_) {
    for (const auto& [e, c] : y.terms()) {
      for (int v : e) feed(std::to_string(v) + ",");
      std::snprintf(buf, sizeof buf, "%.17g;", c);
      feed(buf);
    }
    feed("|");
  }
  return h;
}

HarmonicBasis harmonic_basis(int n, int max_degree) {
  if (n < 1 || max_degree < 0) throw Error(ErrorCode::InvalidArgument, "harmonic_basis needs n >= 1, N >= 0");
  const int vars = n + 1;
  std::vector<Polynomial> elements;
  std::vector<int> degrees;
  for (int j = 0; j <= max_degree; ++j) {
    std::vector<Exponent> all;
    exponents_of_degree(vars, j, all);
    std::vector<Polynomial> block;
    for (const auto& e : all) {
      if (e[0] > 1) continue;
      Polynomial v = harmonic_from_seed(e);
      const double original = std::sqrt(sphere_inner(v, v));
      // Two passes of modified Gram-Schmidt against the block so far.
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : block) v -= u * sphere_inner(u, v);
      const double norm = std::sqrt(sphere_inner(v, v));
      if (!(norm > kGramSchmidtPivot * original))
        throw Error(ErrorCode::DegenerateBasis, "Gram-Schmidt pivot below tolerance at degree " + std::to_string(j));
      block.push_back((v * (1.0 / norm)).pruned(0.0));
    }
    const long long expected = harmonic_dimension(n, j, DimensionMode::PerDegree).value;
    if (static_cast<long long>(block.size()) != expected)
      throw Error(ErrorCode::DegenerateBasis, "harmonic block has the wrong size");
    for (auto& y : block) {
      elements.push_back(std::move(y));
      degrees.push_back(j);
    }
  }
  return HarmonicBasis(n, max_degree, std::move(elements), std::move(degrees));
}

Eigen::VectorXd random_sphere_point(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n + 1);
  for (int i = 0; i <= n; ++i) x[i] = normal(rng);
  return x.normalized();
}

ThetaTensor theta_coefficients(const HarmonicBasis& basis, const GeneratorSet& generators) {
  if (basis.n() != generators.n) throw Error(ErrorCode::InvalidArgument, "basis and generators differ in n");
  const int m = generators.size();
  const int d = basis.size();
  ThetaTensor raw(m, d);
  std::vector<std::vector<Polynomial>> derived(static_cast<size_t>(m));
  for (int mu = 0; mu < m; ++mu) {
    for (int beta = 0; beta < d; ++beta) {
      derived[static_cast<size_t>(mu)].push_back(generators.apply(mu, basis.element(beta)));
      const Polynomial& hy = derived[static_cast<size_t>(mu)].back();
      for (int gamma = 0; gamma < d; ++gamma) raw(mu, gamma, beta) = sphere_inner(hy, basis.element(gamma));
    }
  }

  ThetaTensor theta(m, d);
  for (int mu = 0; mu < m; ++mu) {
    for (int gamma = 0; gamma < d; ++gamma) {
      for (int beta = 0; beta < d; ++beta) {
        const double r = raw(mu, gamma, beta);
        const double t = raw(mu, beta, gamma);
        theta.raw_antisymmetry_violation = std::max(theta.raw_antisymmetry_violation, std::abs(r + t));
        if (basis.degree(gamma) != basis.degree(beta)) {
          theta.raw_cross_degree_max = std::max(theta.raw_cross_degree_max, std::abs(r));
          continue;
        }
        theta(mu, gamma, beta) = 0.5 * (r - t);
      }
    }
  }

  std::mt19937_64 rng(0x5eedULL);
  for (int s = 0; s < 20; ++s) {
    const Eigen::VectorXd x = random_sphere_point(basis.n(), rng);
    const Eigen::VectorXd y = basis.evaluate(x);
    for (int mu = 0; mu < m; ++mu) {
      for (int beta = 0; beta < d; ++beta) {
        double expansion = 0.0;
        for (int gamma = 0; gamma < d; ++gamma) expansion += theta(mu, gamma, beta) * y[gamma];
        const double direct = derived[static_cast<size_t>(mu)][static_cast<size_t>(beta)].evaluate(x);
        theta.expansion_residual = std::max(theta.expansion_residual, std::abs(direct - expansion));
      }
    }
  }
  if (theta.expansion_residual > kExpansionTol)
    throw Error(ErrorCode::ExpansionResidual,
                "rotation derivatives leave the harmonic span by " + std::to_string(theta.expansion_residual));
  return theta;
}

SphereField::SphereField(std::shared_ptr<const HarmonicBasis> basis, GeneratorSet generators,
                         Eigen::MatrixXd coefficients)
    : basis_(std::move(basis)), generators_(std::move(generators)), coefficients_(std::move(coefficients)) {
  if (!basis_) throw Error(ErrorCode::InvalidArgument, "null basis");
  if (basis_->n() != generators_.n) throw Error(ErrorCode::InvalidArgument, "basis and generators differ in n");
  if (coefficients_.rows() != generators_.size() || coefficients_.cols() != basis_->size())
    throw Error(ErrorCode::InvalidArgument, "coefficient matrix has the wrong shape");
}

Eigen::VectorXd SphereField::component_functions(const Eigen::VectorXd& x) const {
  return coefficients_ * basis_->evaluate(x);
}

Eigen::VectorXd SphereField::evaluate(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd f = component_functions(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int mu = 0; mu < generators_.size(); ++mu) out += f[mu] * generators_.evaluate(mu, x);
  return out;
}

PolyField SphereField::polynomial_field() const {
  const int vars = basis_->n() + 1;
  PolyField out(static_cast<size_t>(vars), Polynomial(vars));
  for (int mu = 0; mu < generators_.size(); ++mu) {
    Polynomial f(vars);
    for (int a = 0; a < basis_->size(); ++a)
      if (coefficients_(mu, a) != 0.0) f += basis_->element(a) * coefficients_(mu, a);
    const PolyField h = generators_.field(mu);
    for (int i = 0; i < vars; ++i) out[static_cast<size_t>(i)] += f * h[static_cast<size_t>(i)];
  }
  return out;
}

bool SphereField::zero_mean(double tol) const {
  for (int a = 0; a < basis_->size(); ++a)
    if (basis_->degree(a) == 0 && coefficients_.col(a).cwiseAbs().maxCoeff() > tol) return false;
  return true;
}

Decomposition decompose_sphere_field(const PolyField& field, std::shared_ptr<const HarmonicBasis> basis,
                                     const GeneratorSet& generators, std::uint64_t seed) {
  if (!basis) throw Error(ErrorCode::InvalidArgument, "null basis");
  const int n = basis->n();
  const int vars = n + 1;
  if (static_cast<int>(field.size()) != vars) throw Error(ErrorCode::InvalidArgument, "field needs n+1 components");
  for (const auto& p : field)
    if (p.variables() != vars) throw Error(ErrorCode::InvalidArgument, "component has wrong variable count");

  double scale = 1.0;
  for (const auto& p : field) scale = std::max(scale, p.max_abs_coefficient());

  const double tangency = radial_component(field).sphere_normal_form().max_abs_coefficient();
  if (tangency > 1e-12 * scale)
    throw Error(ErrorCode::NotTangent, "field is not tangent to the sphere (residual " + std::to_string(tangency) + ")");
  if (field_degree(field) > basis->max_degree() + 1)
    throw Error(ErrorCode::DegreeOverflow, "field degree exceeds N + 1");

  const int m = generators.size();
  const int d = basis->size();

  // Rows are (component, normal-form monomial); columns are (mu, alpha).
  std::map<std::pair<int, Exponent>, int> rows;
  auto row_of = [&rows](int comp, const Exponent& e) {
    auto [it, inserted] = rows.try_emplace({comp, e}, static_cast<int>(rows.size()));
    return it->second;
  };
  std::vector<std::vector<std::pair<int, double>>> columns(static_cast<size_t>(m * d));
  for (int mu = 0; mu < m; ++mu) {
    const PolyField h = generators.field(mu);
    for (int a = 0; a < d; ++a) {
      auto& col = columns[static_cast<size_t>(mu * d + a)];
      for (int i = 0; i < vars; ++i) {
        if (h[static_cast<size_t>(i)].is_zero()) continue;
        const Polynomial nf = (basis->element(a) * h[static_cast<size_t>(i)]).sphere_normal_form();
        for (const auto& [e, c] : nf.terms()) col.emplace_back(row_of(i, e), c);
      }
    }
  }
  std::vector<std::pair<int, double>> rhs_entries;
  for (int i = 0; i < vars; ++i) {
    const Polynomial nf = field[static_cast<size_t>(i)].sphere_normal_form();
    for (const auto& [e, c] : nf.terms()) rhs_entries.emplace_back(row_of(i, e), c);
  }

  const auto nrows = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nrows, m * d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nrows);
  for (size_t c = 0; c < columns.size(); ++c)
    for (const auto& [r, v] : columns[c]) A(r, static_cast<Eigen::Index>(c)) += v;
  for (const auto& [r, v] : rhs_entries) b[r] += v;

  Eigen::VectorXd solution = Eigen::VectorXd::Zero(m * d);
  if (b.size() > 0 && b.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
    cod.setThreshold(1e-10);
    solution = cod.solve(b);
  }
  const double system_residual = b.size() ? (A * solution - b).cwiseAbs().maxCoeff() : 0.0;
  if (system_residual > 1e-9 * scale)
    throw Error(ErrorCode::DegreeOverflow,
                "harmonics up to degree " + std::to_string(basis->max_degree()) + " cannot represent the field");

  Eigen::MatrixXd coeffs(m, d);
  for (int mu = 0; mu < m; ++mu)
    for (int a = 0; a < d; ++a) coeffs(mu, a) = solution[mu * d + a];

  Decomposition out{SphereField(basis, generators, coeffs), system_residual, 0.0, tangency};
  std::mt19937_64 rng(seed);
  for (int s = 0; s < 200; ++s) {
    const Eigen::VectorXd x = random_sphere_point(n, rng);
    const double r = (evaluate_field(field, x) - out.field.evaluate(x)).cwiseAbs().maxCoeff();
    out.reconstruction_residual = std::max(out.reconstruction_residual, r);
  }
  return out;
}

QuadraticTensor build_sphere_tensor(const SphereField& field, const ThetaTensor& theta,
                                    const SphereTensorOptions& options) {
  const int m = field.generators().size();
  const int d = field.basis().size();
  if (theta.generators() != m || theta.dimension() != d)
    throw Error(ErrorCode::InvalidArgument, "theta tensor does not match the field basis");
  int offset = 0;
  if (options.drop_constant) {
    if (!field.zero_mean()) throw Error(ErrorCode::InvalidArgument, "cannot drop the constant harmonic: nonzero mean");
    offset = 1;
  }
  const Eigen::MatrixXd& c = field.coefficients();
  std::vector<TensorEntry> entries;
  for (int beta = offset; beta < d; ++beta) {
    for (int alpha = offset; alpha < d; ++alpha) {
      for (int gamma = offset; gamma < d; ++gamma) {
        double v = 0.0;
        for (int mu = 0; mu < m; ++mu) v += theta(mu, gamma, beta) * c(mu, alpha);
        if (v != 0.0) entries.push_back({beta - offset, alpha - offset, gamma - offset, v});
      }
    }
  }
  QuadraticTensor tensor(d - offset, std::move(entries));
  if (!tensor.certified()) throw Error(ErrorCode::ConstraintViolation, "sphere tensor lost antisymmetry");
  return tensor;
}

Eigen::VectorXd psi_sphere(const HarmonicBasis& basis, const Eigen::VectorXd& x, bool drop_constant) {
  require_on_sphere(x);
  const Eigen::VectorXd y = basis.evaluate(x);
  return drop_constant ? Eigen::VectorXd(y.tail(y.size() - 1)) : y;
}

Eigen::MatrixXd psi_sphere_jacobian(const HarmonicBasis& basis, const Eigen::VectorXd& x, bool drop_constant) {
  require_on_sphere(x);
  const Eigen::MatrixXd J = basis.gradient(x);
  return drop_constant ? Eigen::MatrixXd(J.bottomRows(J.rows() - 1)) : J;
}

SphereDivergenceReport sphere_divergence_check(const SphereField& field, const ThetaTensor& theta, double tol) {
  const int m = field.generators().size();
  const int d = field.basis().size();
  SphereDivergenceReport report;
  report.contraction = Eigen::VectorXd::Zero(d);
  const Eigen::MatrixXd& c = field.coefficients();
  for (int beta = 0; beta < d; ++beta) {
    double s = 0.0;
    for (int mu = 0; mu < m; ++mu)
      for (int alpha = 0; alpha < d; ++alpha) s += c(mu, alpha) * theta(mu, alpha, beta);
    report.contraction[beta] = s;
  }
  report.max_contraction = d ? report.contraction.cwiseAbs().maxCoeff() : 0.0;
  report.field_divergence_free = report.max_contraction <= tol;
  const Eigen::VectorXd div = tensor_divergence(build_sphere_tensor(field, theta));
  report.max_tensor_divergence = div.size() ? div.cwiseAbs().maxCoeff() : 0.0;
  report.tensor_divergence_free = report.max_tensor_divergence <= tol;
  return report;
}

BilliardFields billiard_field(double l1, double l2, double l3) {
  if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0) || std::abs(l1 + l2 + l3 - std::numbers::pi) > 1e-12)
    throw Error(ErrorCode::BadAngles, "angles must be positive and sum to pi");
  constexpr int vars = 4;
  struct Complex {
    Polynomial re, im;
  };
  auto var = [](int i) { return Polynomial::variable(vars, i); };
  auto mul = [](const Complex& a, const Complex& b) {
    return Complex{a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  };
  auto lin = [](double s, const Complex& a, double t, const Complex& b) {
    return Complex{a.re * s + b.re * t, a.im * s + b.im * t};
  };
  const Complex z1{var(0), var(1)};
  const Complex z2{var(2), var(3)};
  // z1 (l3 z2 + l2 (z2 - z1)) and z2 (l3 z1 + l1 (z1 - z2))
  const Complex f1 = mul(z1, lin(l3 + l2, z2, -l2, z1));
  const Complex f2 = mul(z2, lin(l3 + l1, z1, -l1, z2));

  auto project = [&](const PolyField& w) {
    const Polynomial radial = radial_component(w);
    PolyField out;
    for (int i = 0; i < vars; ++i) out.push_back(w[static_cast<size_t>(i)] - radial * var(i));
    return out;
  };
  const PolyField re_field{f1.re, f1.im, f2.re, f2.im};
  const PolyField im_field{f1.im * -1.0, f1.re, f2.im * -1.0, f2.re};
  return {project(re_field), project(im_field)};
}

namespace {

std::shared_ptr<const HarmonicBasis> make_basis(const PolyField& field, int max_degree) {
  if (field.empty()) throw Error(ErrorCode::InvalidArgument, "empty field");
  return std::make_shared<const HarmonicBasis>(harmonic_basis(field.front().variables() - 1, max_degree));
}

}  // namespace

SphereEmbedding::SphereEmbedding(PolyField field, int max_degree, bool drop)
    : source(std::move(field)),
      basis(make_basis(source, max_degree)),
      generators(so_generators(basis->n())),
      theta(theta_coefficients(*basis, generators)),
      decomposition(decompose_sphere_field(source, basis, generators)),
      drop_constant(drop),
      tensor(build_sphere_tensor(decomposition.field, theta, SphereTensorOptions{drop})) {}

Eigen::VectorXd SphereEmbedding::psi(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd y = basis->evaluate(x);
  return drop_constant ? Eigen::VectorXd(y.tail(y.size() - 1)) : y;
}

Eigen::MatrixXd SphereEmbedding::psi_jacobian(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd J = basis->gradient(x);
  return drop_constant ? Eigen::MatrixXd(J.bottomRows(J.rows() - 1)) : J;
}

}  // namespace quadembed
