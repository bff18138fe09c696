#include "quadembed/lattice_fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool within_cutoff(long long squared_norm, double cutoff) {
  return static_cast<double>(squared_norm) <= cutoff * cutoff * (1.0 + 1e-12);
}

void check_vector(const Eigen::VectorXd& v, int n, const char* what) {
  if (v.size() != n) throw Error(ErrorCode::InvalidArgument, std::string(what) + " has wrong length");
}

}  // namespace

long long FrequencyVector::squared_norm() const {
  long long s = 0;
  for (int v : entries_) s += static_cast<long long>(v) * v;
  return s;
}

bool FrequencyVector::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(), [](int v) { return v == 0; });
}

FrequencyVector FrequencyVector::negated() const {
  std::vector<int> out(entries_);
  for (int& v : out) v = -v;
  return FrequencyVector(std::move(out));
}

bool FrequencyVector::is_canonical() const {
  for (int v : entries_) {
    if (v != 0) return v > 0;
  }
  return false;
}

double FrequencyVector::dot(const Eigen::VectorXd& v) const {
  double s = 0.0;
  for (size_t i = 0; i < entries_.size(); ++i) s += entries_[i] * v[static_cast<Eigen::Index>(i)];
  return s;
}

TorusField::TorusField(int n, double cutoff) : n_(n), cutoff_(cutoff) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "torus dimension must be positive");
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must be nonnegative");
}

TorusField::TorusField(int n, double cutoff, std::map<FrequencyVector, FourierCoefficient> coefficients)
    : TorusField(n, cutoff) {
  for (const auto& [k, c] : coefficients) {
    if (k.dimension() != n) throw Error(ErrorCode::InvalidArgument, "frequency has wrong dimension");
    check_vector(c.a, n, "sine coefficient");
    check_vector(c.b, n, "cosine coefficient");
  }
  coefficients_ = std::move(coefficients);
}

TorusField TorusField::from_terms(int n, double cutoff, const std::vector<FourierTerm>& terms) {
  TorusField field(n, cutoff);
  auto accumulate = [&](const FrequencyVector& k, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    auto [it, inserted] = field.coefficients_.try_emplace(k, FourierCoefficient{a, b});
    if (!inserted) {
      it->second.a += a;
      it->second.b += b;
    }
  };
  for (const auto& t : terms) {
    if (t.k.dimension() != n) throw Error(ErrorCode::InvalidArgument, "frequency has wrong dimension");
    check_vector(t.a, n, "sine coefficient");
    check_vector(t.b, n, "cosine coefficient");
    if (t.k.is_zero()) {
      accumulate(t.k, Eigen::VectorXd::Zero(n), t.b);
      continue;
    }
    const bool flip = !t.k.is_canonical();
    const FrequencyVector k = t.k.canonical();
    const Eigen::VectorXd a = flip ? Eigen::VectorXd(-t.a) : t.a;
    accumulate(k, 0.5 * a, 0.5 * t.b);
    accumulate(k.negated(), -0.5 * a, 0.5 * t.b);
  }
  return field;
}

std::vector<FourierTerm> TorusField::terms() const {
  std::vector<FourierTerm> out;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_);
  for (const auto& [k, c] : coefficients_) {
    if (k.is_zero()) {
      out.push_back({k, zero, c.b});
      continue;
    }
    const FrequencyVector rep = k.canonical();
    if (std::any_of(out.begin(), out.end(), [&](const FourierTerm& t) { return t.k == rep; })) continue;
    auto pos = coefficients_.find(rep);
    auto neg = coefficients_.find(rep.negated());
    Eigen::VectorXd a = zero, b = zero;
    if (pos != coefficients_.end()) {
      a += pos->second.a;
      b += pos->second.b;
    }
    if (neg != coefficients_.end()) {
      a -= neg->second.a;
      b += neg->second.b;
    }
    out.push_back({rep, a, b});
  }
  std::sort(out.begin(), out.end(), [](const FourierTerm& x, const FourierTerm& y) {
    if (x.k.is_zero() != y.k.is_zero()) return x.k.is_zero();
    return x.k < y.k;
  });
  return out;
}

bool TorusField::has_mean() const {
  for (const auto& [k, c] : coefficients_)
    if (k.is_zero() && c.b.cwiseAbs().maxCoeff() > 0.0) return true;
  return false;
}

long long TorusField::degree() const {
  long long deg = 0;
  for (const auto& [k, c] : coefficients_) {
    if (c.a.cwiseAbs().maxCoeff() > 0.0 || c.b.cwiseAbs().maxCoeff() > 0.0) deg = std::max(deg, k.squared_norm());
  }
  return deg;
}

double TorusField::coefficient_norm() const {
  double s = 0.0;
  for (const auto& [k, c] : coefficients_) s += c.a.squaredNorm() + c.b.squaredNorm();
  return std::sqrt(s);
}

Eigen::VectorXd TorusField::evaluate(const Eigen::VectorXd& x) const {
  check_vector(x, n_, "point");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_);
  for (const auto& [k, c] : coefficients_) {
    const double phase = kTwoPi * k.dot(x);
    out += std::sin(phase) * c.a + std::cos(phase) * c.b;
  }
  return out;
}

Eigen::MatrixXd TorusField::jacobian(const Eigen::VectorXd& x) const {
  check_vector(x, n_, "point");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n_, n_);
  Eigen::VectorXd kv(n_);
  for (const auto& [k, c] : coefficients_) {
    const double phase = kTwoPi * k.dot(x);
    for (int i = 0; i < n_; ++i) kv[i] = kTwoPi * k[i];
    J += (std::cos(phase) * c.a - std::sin(phase) * c.b) * kv.transpose();
  }
  return J;
}

TorusField abc_field(double A, double B, double C) {
  auto vec = [](double x, double y, double z) { return Eigen::Vector3d(x, y, z).eval(); };
  std::vector<FourierTerm> terms{
      {FrequencyVector({1, 0, 0}), vec(0, B, 0), vec(0, 0, B)},
      {FrequencyVector({0, 1, 0}), vec(0, 0, C), vec(C, 0, 0)},
      {FrequencyVector({0, 0, 1}), vec(A, 0, 0), vec(0, A, 0)},
  };
  return TorusField::from_terms(3, 1.0, terms);
}

LatticeSet enumerate_lattice(int n, double cutoff, bool zero_mean) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "lattice dimension must be positive");
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must be nonnegative");
  LatticeSet set;
  set.n = n;
  set.cutoff = cutoff;
  const int r = static_cast<int>(std::floor(cutoff * (1.0 + 1e-12)));
  std::vector<int> k(static_cast<size_t>(n), -r);
  // Odometer over the box [-r, r]^n in lexicographic order.
  while (true) {
    FrequencyVector f(k);
    if (within_cutoff(f.squared_norm(), cutoff)) {
      ++set.full_count;
      if (f.is_zero()) {
        set.includes_zero = !zero_mean;
      } else if (f.is_canonical()) {
        set.representatives.push_back(f);
      }
    }
    int pos = n - 1;
    while (pos >= 0 && k[static_cast<size_t>(pos)] == r) {
      k[static_cast<size_t>(pos)] = -r;
      --pos;
    }
    if (pos < 0) break;
    ++k[static_cast<size_t>(pos)];
  }
  if (set.includes_zero)
    set.representatives.insert(set.representatives.begin(), FrequencyVector(std::vector<int>(static_cast<size_t>(n), 0)));
  return set;
}

TorusValidation validate_torus_field(const TorusField& field, double tol) {
  TorusValidation report;
  const int n = field.dimension();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  for (const auto& [k, c] : field.coefficients()) {
    if (!within_cutoff(k.squared_norm(), field.cutoff()) &&
        (c.a.cwiseAbs().maxCoeff() > 0.0 || c.b.cwiseAbs().maxCoeff() > 0.0)) {
      report.max_cutoff_excess =
          std::max(report.max_cutoff_excess, std::sqrt(static_cast<double>(k.squared_norm())) - field.cutoff());
    }
    auto partner = field.coefficients().find(k.negated());
    const Eigen::VectorXd& pa = partner == field.coefficients().end() ? zero : partner->second.a;
    const Eigen::VectorXd& pb = partner == field.coefficients().end() ? zero : partner->second.b;
    const double va = (c.a + pa).cwiseAbs().maxCoeff();
    const double vb = (c.b - pb).cwiseAbs().maxCoeff();
    report.max_violation = std::max({report.max_violation, va, vb});
  }
  report.valid = report.max_violation <= tol && report.max_cutoff_excess == 0.0;
  if (report.max_violation > tol)
    throw Error(ErrorCode::ConstraintViolation,
                "reality constraint violated by " + std::to_string(report.max_violation));
  if (report.max_cutoff_excess > 0.0)
    throw Error(ErrorCode::ConstraintViolation, "stored frequency outside the cutoff ball");
  return report;
}

Eigen::VectorXd eval_torus_field(const TorusField& field, const Eigen::VectorXd& x) { return field.evaluate(x); }

Eigen::VectorXd psi_torus(const LatticeSet& lattice, const Eigen::VectorXd& x) {
  check_vector(x, lattice.n, "point");
  Eigen::VectorXd y(lattice.embedding_dimension());
  for (size_t r = 0; r < lattice.representatives.size(); ++r) {
    const double phase = kTwoPi * lattice.representatives[r].dot(x);
    y[static_cast<Eigen::Index>(2 * r)] = std::sin(phase);
    y[static_cast<Eigen::Index>(2 * r + 1)] = std::cos(phase);
  }
  return y;
}

Eigen::MatrixXd psi_torus_jacobian(const LatticeSet& lattice, const Eigen::VectorXd& x) {
  check_vector(x, lattice.n, "point");
  Eigen::MatrixXd J(lattice.embedding_dimension(), lattice.n);
  for (size_t r = 0; r < lattice.representatives.size(); ++r) {
    const auto& k = lattice.representatives[r];
    const double phase = kTwoPi * k.dot(x);
    const double s = std::sin(phase), c = std::cos(phase);
    for (int i = 0; i < lattice.n; ++i) {
      J(static_cast<Eigen::Index>(2 * r), i) = kTwoPi * k[i] * c;
      J(static_cast<Eigen::Index>(2 * r + 1), i) = -kTwoPi * k[i] * s;
    }
  }
  return J;
}

LatticeSet field_lattice(const TorusField& field) {
  return enumerate_lattice(field.dimension(), field.cutoff(), !field.has_mean());
}

QuadraticTensor build_torus_tensor(const TorusField& field, const LatticeSet& lattice) {
  if (lattice.n != field.dimension()) throw Error(ErrorCode::InvalidArgument, "lattice dimension mismatch");
  auto index_of = [&](const FrequencyVector& k) -> int {
    auto it = std::lower_bound(lattice.representatives.begin() + (lattice.includes_zero ? 1 : 0),
                               lattice.representatives.end(), k);
    if (k.is_zero()) {
      if (!lattice.includes_zero) throw Error(ErrorCode::InvalidArgument, "field has a mean but lattice drops zero");
      return 0;
    }
    if (it == lattice.representatives.end() || *it != k)
      throw Error(ErrorCode::InvalidArgument, "field frequency missing from lattice");
    return static_cast<int>(it - lattice.representatives.begin());
  };

  // Rows q_k and p_k carry the common factor
  //   s_k(q, p) = 2 pi sum_{k'} (a_{k'}.k) q_{k'} + (b_{k'}.k) p_{k'},
  // with dq_k/dt = s_k p_k and dp_k/dt = -s_k q_k.
  std::vector<TensorEntry> entries;
  const auto terms = field.terms();
  for (size_t r = 0; r < lattice.representatives.size(); ++r) {
    const auto& k = lattice.representatives[r];
    const int q = static_cast<int>(2 * r), p = q + 1;
    for (const auto& t : terms) {
      if (t.a.isZero(0.0) && t.b.isZero(0.0)) continue;
      const int rp = index_of(t.k);
      const int qp = 2 * rp, pp = qp + 1;
      const double ca = kTwoPi * k.dot(t.a);
      const double cb = kTwoPi * k.dot(t.b);
      if (ca != 0.0) {
        entries.push_back({q, qp, p, ca});
        entries.push_back({p, qp, q, -ca});
      }
      if (cb != 0.0) {
        entries.push_back({q, pp, p, cb});
        entries.push_back({p, pp, q, -cb});
      }
    }
  }
  QuadraticTensor tensor(lattice.embedding_dimension(), std::move(entries));
  if (!tensor.certified()) throw Error(ErrorCode::ConstraintViolation, "torus tensor lost antisymmetry");
  return tensor;
}

TorusDivergenceReport torus_divergence_check(const TorusField& field, double tol) {
  TorusDivergenceReport report;
  for (const auto& t : field.terms()) {
    report.max_field_contraction =
        std::max({report.max_field_contraction, std::abs(t.k.dot(t.a)), std::abs(t.k.dot(t.b))});
  }
  report.field_divergence_free = report.max_field_contraction <= tol;
  const auto tensor = build_torus_tensor(field);
  const Eigen::VectorXd div = tensor_divergence(tensor);
  report.max_tensor_divergence = div.size() ? div.cwiseAbs().maxCoeff() : 0.0;
  report.tensor_divergence_free = report.max_tensor_divergence <= tol;
  return report;
}

namespace {

TorusField validated(TorusField f) {
  validate_torus_field(f);
  return f;
}

}  // namespace

TorusEmbedding::TorusEmbedding(TorusField f)
    : field(validated(std::move(f))), lattice(field_lattice(field)), tensor(build_torus_tensor(field, lattice)) {}

}  // namespace quadembed
