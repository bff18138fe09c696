#include "quadembed/quadratic_tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

auto key(const TensorEntry& e) { return std::tie(e.i, e.j, e.k); }

}  // namespace

QuadraticTensor::QuadraticTensor(int dimension, std::vector<TensorEntry> entries) : dim_(dimension) {
  if (dimension < 0) throw Error(ErrorCode::InvalidArgument, "negative tensor dimension");
  for (const auto& e : entries) {
    if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= dim_ || e.j >= dim_ || e.k >= dim_)
      throw Error(ErrorCode::InvalidArgument, "tensor index out of range");
    if (!std::isfinite(e.value)) throw Error(ErrorCode::InvalidArgument, "non-finite tensor entry");
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const TensorEntry& a, const TensorEntry& b) { return key(a) < key(b); });
  for (const auto& e : entries) {
    if (!entries_.empty() && key(entries_.back()) == key(e)) {
      entries_.back().value += e.value;
    } else {
      entries_.push_back(e);
    }
  }
  std::erase_if(entries_, [](const TensorEntry& e) { return e.value == 0.0; });

  compressed_.dim = dim_;
  compressed_.row_ptr.assign(static_cast<size_t>(dim_) + 1, 0);
  for (const auto& e : entries_) compressed_.row_ptr[static_cast<size_t>(e.i) + 1]++;
  for (int i = 0; i < dim_; ++i) compressed_.row_ptr[i + 1] += compressed_.row_ptr[i];
  compressed_.j.reserve(entries_.size());
  compressed_.k.reserve(entries_.size());
  compressed_.value.reserve(entries_.size());
  for (const auto& e : entries_) {
    compressed_.j.push_back(e.j);
    compressed_.k.push_back(e.k);
    compressed_.value.push_back(e.value);
  }

  certified_ = std::all_of(entries_.begin(), entries_.end(),
                           [this](const TensorEntry& e) { return value(e.k, e.j, e.i) == -e.value; });
}

double QuadraticTensor::value(int i, int j, int k) const {
  const TensorEntry probe{i, j, k, 0.0};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                             [](const TensorEntry& a, const TensorEntry& b) { return key(a) < key(b); });
  if (it != entries_.end() && key(*it) == key(probe)) return it->value;
  return 0.0;
}

double QuadraticTensor::frobenius_norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.value * e.value;
  return std::sqrt(s);
}

Eigen::VectorXd QuadraticTensor::apply(const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(dim_);
  apply(std::span<const double>(y.data(), static_cast<size_t>(y.size())),
        std::span<double>(out.data(), static_cast<size_t>(out.size())));
  return out;
}

void QuadraticTensor::apply(std::span<const double> y, std::span<double> out) const {
  simd::quadratic_apply(compressed_, y, out);
}

Eigen::VectorXd QuadraticTensor::jvp(const Eigen::VectorXd& y, const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(dim_);
  jvp(std::span<const double>(y.data(), static_cast<size_t>(y.size())),
      std::span<const double>(v.data(), static_cast<size_t>(v.size())),
      std::span<double>(out.data(), static_cast<size_t>(out.size())));
  return out;
}

void QuadraticTensor::jvp(std::span<const double> y, std::span<const double> v, std::span<double> out) const {
  simd::quadratic_jvp(compressed_, y, v, out);
}

Eigen::MatrixXd QuadraticTensor::jacobian(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim_, dim_);
  for (const auto& e : entries_) {
    J(e.i, e.j) += e.value * y[e.k];
    J(e.i, e.k) += e.value * y[e.j];
  }
  return J;
}

double QuadraticTensor::cubic_form(const Eigen::VectorXd& y) const {
  return simd::cubic_form(compressed_, std::span<const double>(y.data(), static_cast<size_t>(y.size())));
}

SymmetrizedTensor::SymmetrizedTensor(const QuadraticTensor& source) : source_certified_(source.certified()) {
  std::vector<TensorEntry> out;
  out.reserve(2 * source.nonzeros());
  for (const auto& e : source.entries()) {
    if (e.j == e.k) {
      out.push_back(e);
    } else {
      out.push_back({e.i, e.j, e.k, 0.5 * e.value});
      out.push_back({e.i, e.k, e.j, 0.5 * e.value});
    }
  }
  tensor_ = QuadraticTensor(source.dimension(), std::move(out));
}

SymmetrizedTensor symmetrize(const QuadraticTensor& tensor) { return SymmetrizedTensor(tensor); }

double AntisymmetryViolation::violation() const { return std::abs(value + partner); }

AntisymmetryReport check_antisymmetry(const QuadraticTensor& tensor, double report_tol) {
  AntisymmetryReport report;
  auto visit = [&](int i, int j, int k) {
    const double v = tensor.value(i, j, k);
    const double p = tensor.value(k, j, i);
    AntisymmetryViolation viol{i, j, k, v, p};
    const double mag = viol.violation();
    report.max_violation = std::max(report.max_violation, mag);
    if (mag > report_tol) report.violations.push_back(viol);
  };
  for (const auto& e : tensor.entries()) visit(e.i, e.j, e.k);
  // Keep one record per unordered pair {ijk, kji}.
  std::erase_if(report.violations, [](const AntisymmetryViolation& v) {
    return v.partner != 0.0 && std::make_tuple(v.k, v.j, v.i) < std::make_tuple(v.i, v.j, v.k);
  });
  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const auto& a, const auto& b) { return a.violation() > b.violation(); });
  return report;
}

TaoConditionReport check_tao_condition(const SymmetrizedTensor& tensor, int samples, std::uint64_t seed) {
  TaoConditionReport report;
  report.samples = samples;
  std::map<std::array<int, 3>, double> cubic;
  for (const auto& e : tensor.entries()) {
    std::array<int, 3> idx{e.i, e.j, e.k};
    std::sort(idx.begin(), idx.end());
    cubic[idx] += e.value;
  }
  for (const auto& [idx, c] : cubic) report.symbolic_residual = std::max(report.symbolic_residual, std::abs(c));

  const int d = tensor.dimension();
  if (d == 0) return report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd y(d);
  for (int s = 0; s < samples; ++s) {
    for (int i = 0; i < d; ++i) y[i] = normal(rng);
    y.normalize();
    report.sampled_residual = std::max(report.sampled_residual, std::abs(tensor.as_tensor().cubic_form(y)));
  }
  return report;
}

Eigen::VectorXd tensor_divergence(const QuadraticTensor& tensor) {
  // d/dy_i sum_jk B_ijk y_j y_k = sum_k B_iik y_k + sum_j B_iji y_j
  Eigen::VectorXd c = Eigen::VectorXd::Zero(tensor.dimension());
  for (const auto& e : tensor.entries()) {
    if (e.j == e.i) c[e.k] += e.value;
    if (e.k == e.i) c[e.j] += e.value;
  }
  return c;
}

}  // namespace quadembed
