#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace quadembed {

// E_(i,j), i < j: +1 at (i, j) and -1 at (j, i).
struct SoBasisElement {
  int i = 0;
  int j = 0;
  Eigen::MatrixXd matrix;
};

// d(d-1)/2 elements ordered lexicographically by (i, j).
std::vector<SoBasisElement> standard_so_basis(int d);
int so_basis_index(int d, int i, int j);

struct LiftData {
  int d = 0;
  std::vector<Eigen::MatrixXd> S;  // one per mu = 0..d-1
};

struct LiftValue {
  Eigen::MatrixXd so_part;      // U_mu(Q) = S_mu Q
  Eigen::VectorXd torus_part;  // (F_{mu nu}(Q))_nu
};

// Evaluates w_mu = T(e_mu) on SO(d) x T^d. F_{mu nu}(Q) = Q_{nu mu}, so the
// torus part of w_mu is column mu of Q.
class LiftEvaluator {
 public:
  // Throws InvalidArgument unless every S_mu is d x d and antisymmetric to 1e-14.
  explicit LiftEvaluator(LiftData data);

  int dimension() const { return data_.d; }
  // Throws NotOrthogonal when |Q^T Q - I| > 1e-10.
  LiftValue evaluate(int mu, const Eigen::MatrixXd& Q) const;

 private:
  LiftData data_;
};

void check_orthogonal(const Eigen::MatrixXd& Q, double tol = 1e-10);

// Random element of SO(d) from the QR factorization of a Gaussian matrix.
Eigen::MatrixXd random_rotation(int d, std::uint64_t seed);
Eigen::MatrixXd random_antisymmetric(int d, std::uint64_t seed);
// exp(t E_alpha), a Givens rotation.
Eigen::MatrixXd so_exponential(int d, int alpha, double t);

// Derivative of F_{mu nu} along the word (alpha_1, ..., alpha_k) at Q:
//   e_nu . Q E_{alpha_k} ... E_{alpha_1} e_mu.
double f_derivative(int mu, int nu, const Eigen::MatrixXd& Q, const std::vector<int>& word);

// Same derivative by nested central differences of
//   t -> F_{mu nu}(Q exp(t_k E_{alpha_k}) ... exp(t_1 E_{alpha_1}))
// with one Richardson level. The default step grows with the word length.
double f_derivative_fd(int mu, int nu, const Eigen::MatrixXd& Q, const std::vector<int>& word, double step = 0.0);
double default_fd_step(size_t order);

struct SparsityReport {
  bool holds = true;
  Eigen::MatrixXd product;
};

// E_{alpha_k} ... E_{alpha_1} has at most one nonzero per row and column,
// each equal to +-1.
SparsityReport product_sparsity_check(int d, const std::vector<int>& word);

struct CommutatorClass {
  bool zero = true;
  int sign = 0;
  int gamma = -1;
};

// [E_alpha, E_beta] classified as 0 or sign * E_gamma. Throws
// UnclassifiedCommutator otherwise.
CommutatorClass commutator_check(int d, int alpha, int beta);
// Number of pairs checked; throws on the first unclassified bracket.
long commutator_closure(int d);

struct IteratedCommutatorBound {
  std::vector<double> max_norm_by_length;  // index k = word length, k = 0 is |S|
  double max_norm = 0.0;
  double observed_constant = 0.0;  // max_norm / |S|, 0 when S = 0
  bool exhaustive = true;
  long words = 0;
};

// Frobenius norms of [E_{a_1}, [E_{a_2}, ..., [E_{a_k}, S]...]] for k <= K.
// Exhaustive while the number of words stays below exhaustive_limit,
// sampled from seed otherwise.
IteratedCommutatorBound iterated_commutator_bound(const Eigen::MatrixXd& S, int K, long exhaustive_limit = 200000,
                                                  int samples = 20000, std::uint64_t seed = 5);

}  // namespace quadembed
