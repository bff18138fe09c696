#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "quadembed/simd/quadratic_kernels.hpp"

namespace quadembed {

struct TensorEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;

  friend bool operator==(const TensorEntry&, const TensorEntry&) = default;
};

// Sparse structure tensor of the homogeneous quadratic ODE
//   dy_i/dt = sum_{jk} B_ijk y_j y_k.
// Entries are stored sorted by (i, j, k) with duplicates summed and exact
// zeros removed. The tensor is "certified" when B_ijk == -B_kji holds
// exactly for every entry, which makes |y|^2 a first integral.
class QuadraticTensor {
 public:
  QuadraticTensor() = default;
  QuadraticTensor(int dimension, std::vector<TensorEntry> entries);

  int dimension() const { return dim_; }
  std::span<const TensorEntry> entries() const { return entries_; }
  size_t nonzeros() const { return entries_.size(); }
  bool certified() const { return certified_; }
  double value(int i, int j, int k) const;
  double frobenius_norm() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;
  void apply(std::span<const double> y, std::span<double> out) const;
  // Directional derivative of the quadratic map at y along v.
  Eigen::VectorXd jvp(const Eigen::VectorXd& y, const Eigen::VectorXd& v) const;
  void jvp(std::span<const double> y, std::span<const double> v, std::span<double> out) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& y) const;
  // sum_ijk B_ijk y_i y_j y_k = y . V(y)
  double cubic_form(const Eigen::VectorXd& y) const;

  const simd::CompressedTensor& compressed() const { return compressed_; }

 private:
  int dim_ = 0;
  std::vector<TensorEntry> entries_;
  simd::CompressedTensor compressed_;
  bool certified_ = false;
};

// Same quadratic map with B~_ijk = B~_ikj.
class SymmetrizedTensor {
 public:
  explicit SymmetrizedTensor(const QuadraticTensor& source);

  int dimension() const { return tensor_.dimension(); }
  std::span<const TensorEntry> entries() const { return tensor_.entries(); }
  bool source_certified() const { return source_certified_; }
  const QuadraticTensor& as_tensor() const { return tensor_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& y) const { return tensor_.apply(y); }

 private:
  QuadraticTensor tensor_;
  bool source_certified_ = false;
};

SymmetrizedTensor symmetrize(const QuadraticTensor& tensor);

struct AntisymmetryViolation {
  int i, j, k;
  double value;    // B_ijk
  double partner;  // B_kji
  double violation() const;
};

struct AntisymmetryReport {
  double max_violation = 0.0;
  // Entries whose |B_ijk + B_kji| exceeds the reporting tolerance, worst first.
  std::vector<AntisymmetryViolation> violations;
};

AntisymmetryReport check_antisymmetry(const QuadraticTensor& tensor, double report_tol = 0.0);

struct TaoConditionReport {
  // Max |coefficient| of the cubic form sum B~_ijk y_i y_j y_k expanded over
  // sorted index triples.
  double symbolic_residual = 0.0;
  // Max |cubic form| over random points of the unit sphere in R^d.
  double sampled_residual = 0.0;
  int samples = 0;
};

TaoConditionReport check_tao_condition(const SymmetrizedTensor& tensor, int samples = 1000,
                                       std::uint64_t seed = 7);

// Coefficients c of the linear form div V(y) = sum_m c_m y_m.
Eigen::VectorXd tensor_divergence(const QuadraticTensor& tensor);

}  // namespace quadembed
