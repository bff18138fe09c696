#include "quadembed/lift_structure.hpp"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

void check_word(int d, const std::vector<int>& word) {
  const int m = d * (d - 1) / 2;
  for (int a : word)
    if (a < 0 || a >= m) throw Error(ErrorCode::InvalidArgument, "basis index out of range");
}

Eigen::MatrixXd basis_matrix(int d, int alpha) {
  static thread_local std::vector<std::vector<SoBasisElement>> cache;
  if (static_cast<int>(cache.size()) <= d) cache.resize(static_cast<size_t>(d) + 1);
  auto& b = cache[static_cast<size_t>(d)];
  if (b.empty()) b = standard_so_basis(d);
  return b[static_cast<size_t>(alpha)].matrix;
}

std::pair<int, int> basis_plane(int d, int alpha) {
  for (int i = 0; i < d; ++i) {
    const int row = d - 1 - i;
    if (alpha < row) return {i, i + 1 + alpha};
    alpha -= row;
  }
  throw Error(ErrorCode::InvalidArgument, "basis index out of range");
}

}  // namespace

std::vector<SoBasisElement> standard_so_basis(int d) {
  if (d < 2) throw Error(ErrorCode::InvalidArgument, "so(d) needs d >= 2");
  std::vector<SoBasisElement> out;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(d, d);
      E(i, j) = 1.0;
      E(j, i) = -1.0;
      out.push_back({i, j, std::move(E)});
    }
  return out;
}

int so_basis_index(int d, int i, int j) {
  if (i < 0 || j >= d || i >= j) throw Error(ErrorCode::InvalidArgument, "need 0 <= i < j < d");
  return i * d - i * (i + 1) / 2 + (j - i - 1);
}

void check_orthogonal(const Eigen::MatrixXd& Q, double tol) {
  if (Q.rows() != Q.cols()) throw Error(ErrorCode::NotOrthogonal, "matrix is not square");
  const double err = (Q.transpose() * Q - Eigen::MatrixXd::Identity(Q.rows(), Q.cols())).norm();
  if (!(err <= tol)) throw Error(ErrorCode::NotOrthogonal, "|Q^T Q - I| = " + std::to_string(err));
}

LiftEvaluator::LiftEvaluator(LiftData data) : data_(std::move(data)) {
  if (data_.d < 2) throw Error(ErrorCode::InvalidArgument, "lift needs d >= 2");
  if (static_cast<int>(data_.S.size()) != data_.d) throw Error(ErrorCode::InvalidArgument, "need one S_mu per mu");
  for (const auto& S : data_.S) {
    if (S.rows() != data_.d || S.cols() != data_.d) throw Error(ErrorCode::InvalidArgument, "S_mu has wrong shape");
    if ((S + S.transpose()).cwiseAbs().maxCoeff() > 1e-14)
      throw Error(ErrorCode::InvalidArgument, "S_mu is not antisymmetric");
  }
}

LiftValue LiftEvaluator::evaluate(int mu, const Eigen::MatrixXd& Q) const {
  if (mu < 0 || mu >= data_.d) throw Error(ErrorCode::InvalidArgument, "mu out of range");
  if (Q.rows() != data_.d) throw Error(ErrorCode::InvalidArgument, "Q has wrong shape");
  check_orthogonal(Q);
  return {data_.S[static_cast<size_t>(mu)] * Q, Q.col(mu)};
}

Eigen::MatrixXd random_rotation(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j)
    if (R(j, j) < 0) Q.col(j) *= -1.0;
  if (Q.determinant() < 0) Q.col(0) *= -1.0;
  return Q;
}

Eigen::MatrixXd random_antisymmetric(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      S(i, j) = normal(rng);
      S(j, i) = -S(i, j);
    }
  return S;
}

Eigen::MatrixXd so_exponential(int d, int alpha, double t) {
  const auto [i, j] = basis_plane(d, alpha);
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(d, d);
  R(i, i) = R(j, j) = std::cos(t);
  R(i, j) = std::sin(t);
  R(j, i) = -std::sin(t);
  return R;
}

double f_derivative(int mu, int nu, const Eigen::MatrixXd& Q, const std::vector<int>& word) {
  const int d = static_cast<int>(Q.rows());
  check_word(d, word);
  check_orthogonal(Q);
  Eigen::VectorXd v = Eigen::VectorXd::Unit(d, mu);
  for (int a : word) v = basis_matrix(d, a) * v;
  return (Q * v)[nu];
}

double default_fd_step(size_t order) {
  static constexpr double steps[] = {1e-4, 1e-4, 1e-3, 1e-2};
  return order < 4 ? steps[order] : 1e-1;
}

double f_derivative_fd(int mu, int nu, const Eigen::MatrixXd& Q, const std::vector<int>& word, double step) {
  const int d = static_cast<int>(Q.rows());
  check_word(d, word);
  check_orthogonal(Q);
  const size_t k = word.size();
  if (k == 0) return Q(nu, mu);
  if (k > 20) throw Error(ErrorCode::InvalidArgument, "word too long for the difference stencil");
  const double h0 = step > 0.0 ? step : default_fd_step(k);

  auto stencil = [&](double h) {
    double sum = 0.0;
    for (unsigned long mask = 0; mask < (1UL << k); ++mask) {
      Eigen::MatrixXd M = Q;
      int sign = 1;
      // Q exp(t_k E_k) ... exp(t_1 E_1): apply the last letter first.
      for (size_t p = k; p-- > 0;) {
        const bool neg = (mask >> p) & 1UL;
        if (neg) sign = -sign;
        M = M * so_exponential(d, word[p], neg ? -h : h);
      }
      sum += sign * M(nu, mu);
    }
    return sum / std::pow(2.0 * h, static_cast<double>(k));
  };
  const double coarse = stencil(h0), fine = stencil(0.5 * h0);
  return (4.0 * fine - coarse) / 3.0;
}

SparsityReport product_sparsity_check(int d, const std::vector<int>& word) {
  check_word(d, word);
  SparsityReport out;
  out.product = Eigen::MatrixXd::Identity(d, d);
  for (int a : word) out.product = basis_matrix(d, a) * out.product;
  for (int r = 0; r < d && out.holds; ++r) {
    int row_nz = 0, col_nz = 0;
    for (int c = 0; c < d; ++c) {
      const double v = out.product(r, c), w = out.product(c, r);
      if (v != 0.0) {
        ++row_nz;
        if (v != 1.0 && v != -1.0) out.holds = false;
      }
      if (w != 0.0) ++col_nz;
    }
    if (row_nz > 1 || col_nz > 1) out.holds = false;
  }
  return out;
}

CommutatorClass commutator_check(int d, int alpha, int beta) {
  check_word(d, {alpha, beta});
  const Eigen::MatrixXd A = basis_matrix(d, alpha), B = basis_matrix(d, beta);
  const Eigen::MatrixXd C = A * B - B * A;
  CommutatorClass out;
  if (C.cwiseAbs().maxCoeff() == 0.0) return out;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      if (C(i, j) == 0.0) continue;
      const int g = so_basis_index(d, i, j);
      const double s = C(i, j);
      if ((s == 1.0 || s == -1.0) && (C - s * basis_matrix(d, g)).cwiseAbs().maxCoeff() == 0.0) {
        out.zero = false;
        out.sign = s > 0 ? 1 : -1;
        out.gamma = g;
        return out;
      }
      throw Error(ErrorCode::UnclassifiedCommutator,
                  "[E_" + std::to_string(alpha) + ", E_" + std::to_string(beta) + "] is not 0 or +-E_gamma");
    }
  throw Error(ErrorCode::UnclassifiedCommutator, "bracket has no upper-triangular entry");
}

long commutator_closure(int d) {
  const int m = d * (d - 1) / 2;
  long count = 0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b, ++count) commutator_check(d, a, b);
  return count;
}

IteratedCommutatorBound iterated_commutator_bound(const Eigen::MatrixXd& S, int K, long exhaustive_limit, int samples,
                                                  std::uint64_t seed) {
  const int d = static_cast<int>(S.rows());
  if (S.cols() != d || d < 2) throw Error(ErrorCode::InvalidArgument, "S must be square with d >= 2");
  if ((S + S.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw Error(ErrorCode::InvalidArgument, "S must be antisymmetric");
  if (K < 0) throw Error(ErrorCode::InvalidArgument, "K must be nonnegative");
  const int m = d * (d - 1) / 2;
  std::vector<Eigen::MatrixXd> E;
  for (int a = 0; a < m; ++a) E.push_back(basis_matrix(d, a));
  auto bracket = [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) { return Eigen::MatrixXd(A * B - B * A); };

  IteratedCommutatorBound out;
  out.max_norm_by_length.push_back(S.norm());
  long total = 0, level_size = 1;
  for (int k = 1; k <= K; ++k) {
    level_size *= m;
    total += level_size;
    if (level_size > exhaustive_limit) out.exhaustive = false;
  }

  if (out.exhaustive) {
    std::vector<Eigen::MatrixXd> level{S};
    for (int k = 1; k <= K; ++k) {
      std::vector<Eigen::MatrixXd> next;
      next.reserve(level.size() * static_cast<size_t>(m));
      double mx = 0.0;
      for (const auto& M : level)
        for (const auto& Ea : E) {
          next.push_back(bracket(Ea, M));
          mx = std::max(mx, next.back().norm());
        }
      out.max_norm_by_length.push_back(mx);
      level = std::move(next);
    }
    out.words = total;
  } else {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, m - 1);
    out.max_norm_by_length.resize(static_cast<size_t>(K) + 1, 0.0);
    for (int s = 0; s < samples; ++s) {
      Eigen::MatrixXd M = S;
      for (int k = 1; k <= K; ++k) {
        M = bracket(E[static_cast<size_t>(pick(rng))], M);
        out.max_norm_by_length[static_cast<size_t>(k)] = std::max(out.max_norm_by_length[static_cast<size_t>(k)], M.norm());
      }
    }
    out.words = static_cast<long>(samples) * K;
  }
  for (double v : out.max_norm_by_length) out.max_norm = std::max(out.max_norm, v);
  out.observed_constant = S.norm() > 0.0 ? out.max_norm / S.norm() : 0.0;
  return out;
}

}  // namespace quadembed
