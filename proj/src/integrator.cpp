#include "quadembed/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// Difference between the 5th and 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

}  // namespace

DormandPrince::DormandPrince(OdeRhs rhs, Eigen::VectorXd y0, double t0, IntegratorOptions options)
    : rhs_(std::move(rhs)), options_(options), t_(t0), t_prev_(t0), h_(0.0), y_(std::move(y0)) {
  if (!(options_.rtol > 0.0) || !(options_.atol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  if (!y_.allFinite()) throw Error(ErrorCode::InvalidArgument, "initial state is not finite");
  const auto n = y_.size();
  f_.resize(n);
  for (auto* v : {&k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y_new_, &err_}) v->resize(n);
  rhs_(y_, f_);
  ++stats_.evaluations;
  y_prev_ = y_;
  f_prev_ = f_;
  h_ = options_.initial_step > 0.0 ? options_.initial_step : initial_step_size();
}

double DormandPrince::error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y_new) const {
  double m = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = options_.atol + options_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
    m = std::max(m, std::abs(err[i]) / sc);
  }
  return m;
}

double DormandPrince::initial_step_size() const {
  // Hairer, Norsett & Wanner, Solving ODEs I, section II.4.
  auto scaled_norm = [this](const Eigen::VectorXd& v) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
      m = std::max(m, std::abs(v[i]) / (options_.atol + options_.rtol * std::abs(y_[i])));
    return m;
  };
  if (y_.size() == 0) return 1.0;
  const double d0 = scaled_norm(y_), d1 = scaled_norm(f_);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, options_.max_step);
  Eigen::VectorXd y1 = y_ + h0 * f_, f1(y_.size());
  rhs_(y1, f1);
  const double d2 = scaled_norm(f1 - f_) / h0;
  const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min({100 * h0, h1, options_.max_step});
}

void DormandPrince::step(double t_stop) {
  if (t_ >= t_stop) return;
  const long n = y_.size();
  while (true) {
    if (stats_.accepted + stats_.rejected >= options_.max_steps)
      throw Error(ErrorCode::StepFailure, "maximum number of steps exceeded");
    double h = std::min(h_, options_.max_step);
    bool last = false;
    if (t_ + h >= t_stop) {
      h = t_stop - t_;
      last = true;
    }
    if (!(h > 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))))
      throw Error(ErrorCode::StepFailure, "step size underflow at t = " + std::to_string(t_));

    tmp_ = y_ + h * a21 * f_;
    rhs_(tmp_, k2_);
    tmp_ = y_ + h * (a31 * f_ + a32 * k2_);
    rhs_(tmp_, k3_);
    tmp_ = y_ + h * (a41 * f_ + a42 * k2_ + a43 * k3_);
    rhs_(tmp_, k4_);
    tmp_ = y_ + h * (a51 * f_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    rhs_(tmp_, k5_);
    tmp_ = y_ + h * (a61 * f_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    rhs_(tmp_, k6_);
    y_new_ = y_ + h * (a71 * f_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
    rhs_(y_new_, k7_);
    stats_.evaluations += 6;
    err_ = h * (e1 * f_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);

    const double err = n ? error_norm(err_, y_new_) : 0.0;
    if (!std::isfinite(err) || !y_new_.allFinite()) {
      ++stats_.rejected;
      h_ = h * kMinFactor;
      continue;
    }
    if (err <= 1.0) {
      const double factor = err == 0.0 ? kMaxFactor : std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
      t_prev_ = t_;
      y_prev_.swap(y_);
      f_prev_.swap(f_);
      t_ = last ? t_stop : t_ + h;
      y_ = y_new_;
      f_ = k7_;
      ++stats_.accepted;
      // A step shortened to hit t_stop says nothing about the natural size.
      if (!last || factor < 1.0) h_ = h * factor;
      return;
    }
    ++stats_.rejected;
    h_ = h * std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, 1.0);
  }
}

void DormandPrince::reset_state(const Eigen::VectorXd& y) {
  if (y.size() != y_.size()) throw Error(ErrorCode::InvalidArgument, "state size mismatch");
  y_ = y;
  rhs_(y_, f_);
  ++stats_.evaluations;
}

Eigen::VectorXd DormandPrince::interpolate(double t) const {
  return hermite_interpolate(t_prev_, y_prev_, f_prev_, t_, y_, f_, t);
}

Eigen::VectorXd hermite_interpolate(double t0, const Eigen::VectorXd& y0, const Eigen::VectorXd& f0, double t1,
                                    const Eigen::VectorXd& y1, const Eigen::VectorXd& f1, double t) {
  const double h = t1 - t0;
  if (h == 0.0) return y1;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

void Trajectory::push(double t, Eigen::VectorXd y, Eigen::VectorXd f) {
  if (!times_.empty() && !(t > times_.back())) throw Error(ErrorCode::InvalidArgument, "times must increase");
  if (!y.allFinite()) throw Error(ErrorCode::StepFailure, "non-finite state");
  times_.push_back(t);
  states_.push_back(std::move(y));
  derivatives_.push_back(std::move(f));
}

size_t Trajectory::interval(double t) const {
  if (times_.size() < 2) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  size_t i = it == times_.begin() ? 0 : static_cast<size_t>(it - times_.begin()) - 1;
  return std::min(i, times_.size() - 2);
}

Eigen::VectorXd Trajectory::interpolate_in(size_t i, double t) const {
  if (times_.size() == 1) return states_.front();
  return hermite_interpolate(times_[i], states_[i], derivatives_[i], times_[i + 1], states_[i + 1],
                             derivatives_[i + 1], t);
}

Eigen::VectorXd Trajectory::at(double t) const {
  if (times_.empty()) throw Error(ErrorCode::InvalidArgument, "empty trajectory");
  return interpolate_in(interval(t), t);
}

Trajectory integrate(const OdeRhs& rhs, const Eigen::VectorXd& y0, double t_end, const IntegratorOptions& options) {
  if (!(t_end >= 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon must be nonnegative");
  DormandPrince solver(rhs, y0, 0.0, options);
  Trajectory traj;
  traj.rtol = options.rtol;
  traj.atol = options.atol;
  traj.push(0.0, solver.state(), solver.derivative());
  solver.advance_to(t_end, [&traj](const DormandPrince& s) { traj.push(s.time(), s.state(), s.derivative()); });
  traj.stats = solver.stats();
  return traj;
}

}  // namespace quadembed
