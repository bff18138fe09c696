#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

namespace quadembed {

// Autonomous right-hand side dy/dt = f(y).
using OdeRhs = std::function<void(const Eigen::VectorXd& y, Eigen::VectorXd& dy)>;

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects one automatically
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 50'000'000;
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

// Dormand-Prince 5(4) embedded pair with local error control in the max
// norm, error per step <= atol + rtol * |y|.
class DormandPrince {
 public:
  DormandPrince(OdeRhs rhs, Eigen::VectorXd y0, double t0, IntegratorOptions options);

  // Takes one accepted step without passing t_stop. Throws StepFailure when
  // the step size underflows or the state stops being finite.
  void step(double t_stop);
  // Steps until t == t_end, calling observer(*this) after every accepted step.
  template <class Observer>
  void advance_to(double t_end, Observer&& observer) {
    while (t_ < t_end) {
      step(t_end);
      observer(*this);
    }
  }
  void advance_to(double t_end) {
    advance_to(t_end, [](const DormandPrince&) {});
  }

  // Replaces the current state (e.g. after renormalizing a tangent vector).
  void reset_state(const Eigen::VectorXd& y);

  double time() const { return t_; }
  const Eigen::VectorXd& state() const { return y_; }
  const Eigen::VectorXd& derivative() const { return f_; }
  double previous_time() const { return t_prev_; }
  const Eigen::VectorXd& previous_state() const { return y_prev_; }
  const Eigen::VectorXd& previous_derivative() const { return f_prev_; }
  // Cubic Hermite interpolant on the last accepted step.
  Eigen::VectorXd interpolate(double t) const;
  const StepStats& stats() const { return stats_; }
  const IntegratorOptions& options() const { return options_; }

 private:
  double error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& y_new) const;
  double initial_step_size() const;

  OdeRhs rhs_;
  IntegratorOptions options_;
  double t_, t_prev_;
  double h_;
  Eigen::VectorXd y_, f_, y_prev_, f_prev_;
  Eigen::VectorXd k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_, err_;
  StepStats stats_;
};

Eigen::VectorXd hermite_interpolate(double t0, const Eigen::VectorXd& y0, const Eigen::VectorXd& f0, double t1,
                                    const Eigen::VectorXd& y1, const Eigen::VectorXd& f1, double t);

class Trajectory {
 public:
  Trajectory() = default;

  void push(double t, Eigen::VectorXd y, Eigen::VectorXd f);

  size_t size() const { return times_.size(); }
  int dimension() const { return states_.empty() ? 0 : static_cast<int>(states_.front().size()); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Eigen::VectorXd>& states() const { return states_; }
  const Eigen::VectorXd& state(size_t i) const { return states_[i]; }
  double start_time() const { return times_.front(); }
  double end_time() const { return times_.back(); }
  // Dense output by cubic Hermite interpolation between stored steps.
  Eigen::VectorXd at(double t) const;
  // Index of the step interval [t_i, t_{i+1}] containing t.
  size_t interval(double t) const;
  Eigen::VectorXd interpolate_in(size_t i, double t) const;

  StepStats stats;
  double rtol = 0.0;
  double atol = 0.0;

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<Eigen::VectorXd> derivatives_;
};

Trajectory integrate(const OdeRhs& rhs, const Eigen::VectorXd& y0, double t_end, const IntegratorOptions& options);

}  // namespace quadembed
