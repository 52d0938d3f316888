#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <string>

namespace cir::env {

struct EnvSpec {
    long obs_dim = 0;
    long act_dim = 0;
    long horizon = 0;
};

struct StepResult {
    Eigen::VectorXd obs;
    double reward = 0.0;
    bool done = false;
};

/// Toy continuous-control environment. Actions live in [-1,1]^act_dim;
/// out-of-range components are clamped and counted, not rejected. Dynamics
/// are a pure function of (state, action, rng): one seed, one trajectory.
class Env {
  public:
    virtual ~Env() = default;
    virtual const EnvSpec& spec() const = 0;
    virtual Eigen::VectorXd reset(std::mt19937_64& rng) = 0;
    virtual StepResult step(const Eigen::VectorXd& action) = 0;
    /// Actions clamped so far; only scripted policies can trigger this.
    long clamp_count() const { return clamp_count_; }

  protected:
    double clamp_action(double a) {
        if (a < -1.0 || a > 1.0) {
            ++clamp_count_;
            return a < -1.0 ? -1.0 : 1.0;
        }
        return a;
    }

  private:
    long clamp_count_ = 0;
};

/// Classic pendulum swing-up. State (angle from upright, angular velocity);
/// obs (cos, sin, angular velocity); torque = 2*a; semi-implicit Euler at
/// dt = 0.05; reward -(angle^2 + 0.1*vel^2 + 0.001*torque^2); horizon 200.
class PendulumEnv final : public Env {
  public:
    const EnvSpec& spec() const override;
    Eigen::VectorXd reset(std::mt19937_64& rng) override;
    StepResult step(const Eigen::VectorXd& action) override;

    void set_state(double angle, double velocity); // test hook
    double angle() const { return theta_; }
    double velocity() const { return theta_dot_; }

  private:
    Eigen::VectorXd obs() const;
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    long t_ = 0;
};

/// 2-D double integrator reaching a random goal. Obs (pos, vel, goal - pos);
/// reward -|pos - goal|; horizon 100.
class PointMassEnv final : public Env {
  public:
    const EnvSpec& spec() const override;
    Eigen::VectorXd reset(std::mt19937_64& rng) override;
    StepResult step(const Eigen::VectorXd& action) override;

    void set_state(const Eigen::Vector2d& pos, const Eigen::Vector2d& vel,
                   const Eigen::Vector2d& goal); // test hook

  private:
    Eigen::VectorXd obs() const;
    Eigen::Vector2d pos_{0, 0}, vel_{0, 0}, goal_{0, 0};
    long t_ = 0;
};

/// Env selection by name: "pendulum" or "pointmass".
std::unique_ptr<Env> make_env(const std::string& name);

} // namespace cir::env
