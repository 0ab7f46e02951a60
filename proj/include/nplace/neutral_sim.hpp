#pragma once

// Method-of-steps integration of scalar neutral delay equations in Hale form
//
//     d/dt [ y(t) + alpha y(t - tau) ] = f(y(t), y(t - tau))
//
// with classical RK4 on z = y + alpha y(t - tau) and cubic Hermite dense output.

#include <functional>
#include <optional>
#include <vector>

#include "nplace/core_math.hpp"
#include "nplace/placement.hpp"

namespace nplace {

/// Initial function on [-tau, 0], interpolated by cubic Hermite splines.
class History {
public:
    History() = default;
    History(std::vector<double> grid, std::vector<double> values, std::vector<double> derivatives);

    /// y0 == c on [-tau, 0].
    static History constant(double c, double tau, int n_intervals = 16);

    /// Samples f (and df when given, else centred differences of f) on a uniform grid.
    static History from_function(const std::function<double(double)>& f, double tau,
                                 const std::optional<std::function<double(double)>>& df = std::nullopt,
                                 int n_intervals = 4096);

    /// Samples on an ascending grid spanning [-tau, 0]; derivatives by centred differences of the samples.
    static History from_samples(std::vector<double> grid, std::vector<double> values);

    [[nodiscard]] double tau() const { return -grid_.front(); }
    [[nodiscard]] double value(double t) const;
    [[nodiscard]] double derivative(double t) const;
    [[nodiscard]] double sup_norm() const;

    [[nodiscard]] const std::vector<double>& grid() const { return grid_; }
    [[nodiscard]] const std::vector<double>& values() const { return values_; }
    [[nodiscard]] const std::vector<double>& derivatives() const { return derivs_; }

private:
    std::size_t locate(double t) const;

    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> derivs_;
};

enum class Nonlinearity { tanh, linearized };

struct PlantSpec {
    double nu = 1.0;
    double mu = 2.0;
    Nonlinearity nonlinearity = Nonlinearity::tanh;
};

/// Uniformly sampled solution on [0, t_end].
struct Trajectory {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> derivs;  ///< right derivative of y at each sample
    double step = 0.0;
    double delay = 0.0;
};

/// Right-hand side f(y, y_delayed).
using NeutralRhs = std::function<double(double, double)>;

/// Generic Hale-form integrator. Rejects h > tau/16 and mismatched history length.
[[nodiscard]] Trajectory integrate_neutral(const NeutralRhs& f, double alpha, double tau, const History& y0,
                                           double t_end, double h);

/// d/dt[y + alpha y(t-tau)] = -a y - beta y(t-tau).
[[nodiscard]] Trajectory integrate_linear_neutral(const NeutralQuasiPoly& qp, const History& y0, double t_end,
                                                  double h);

/// d/dt[y + kd y(t-tau)] = -nu y + mu sigma(y) - kp y(t-tau).
[[nodiscard]] Trajectory integrate_hopfield(const PlantSpec& plant, const ControllerDesign& ctrl,
                                            const History& y0, double t_end, double h);

/// Least-squares slope of log(sup |y|) per delay interval against the time of each sup.
/// Throws FitError when fewer than three intervals fit or the signal is at the floor.
[[nodiscard]] double estimate_decay_rate(const Trajectory& traj, double t_start, double t_end);

}  // namespace nplace
