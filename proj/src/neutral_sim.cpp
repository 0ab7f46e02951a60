#include "nplace/neutral_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nplace/errors.hpp"

namespace nplace {

namespace {

double hermite(double y0, double d0, double y1, double d1, double h, double s) {
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

double hermite_deriv(double y0, double d0, double y1, double d1, double h, double s) {
    const double s2 = s * s;
    return ((6 * s2 - 6 * s) * y0 + (3 * s2 - 4 * s + 1) * h * d0 + (-6 * s2 + 6 * s) * y1 + (3 * s2 - 2 * s) * h * d1) /
           h;
}

std::vector<double> centred_differences(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    for (std::size_t i = 0; i < n; ++i) {
        if (i == 0) {
            d[i] = (y[1] - y[0]) / (x[1] - x[0]);
        } else if (i + 1 == n) {
            d[i] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
        } else {
            d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
        }
    }
    return d;
}

}  // namespace

History::History(std::vector<double> grid, std::vector<double> values, std::vector<double> derivatives)
    : grid_(std::move(grid)), values_(std::move(values)), derivs_(std::move(derivatives)) {
    if (grid_.size() < 2 || values_.size() != grid_.size() || derivs_.size() != grid_.size()) {
        throw InvalidArgument("history needs at least two samples with matching values and derivatives");
    }
    for (std::size_t i = 1; i < grid_.size(); ++i) {
        if (!(grid_[i] > grid_[i - 1])) throw InvalidArgument("history grid must be strictly ascending");
    }
    if (grid_.back() != 0.0 || !(grid_.front() < 0.0)) {
        throw InvalidArgument("history grid must span [-tau, 0]");
    }
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        if (!std::isfinite(values_[i]) || !std::isfinite(derivs_[i])) {
            throw InvalidArgument("history samples must be finite");
        }
    }
}

History History::constant(double c, double tau, int n_intervals) {
    if (!(tau > 0.0)) throw InvalidArgument("history delay must be positive");
    std::vector<double> g(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) g[i] = -tau + tau * i / n_intervals;
    g.back() = 0.0;
    return History(g, std::vector<double>(g.size(), c), std::vector<double>(g.size(), 0.0));
}

History History::from_function(const std::function<double(double)>& f, double tau,
                               const std::optional<std::function<double(double)>>& df, int n_intervals) {
    if (!(tau > 0.0)) throw InvalidArgument("history delay must be positive");
    if (n_intervals < 1) throw InvalidArgument("history needs at least one interval");
    std::vector<double> g(n_intervals + 1), v(n_intervals + 1), d(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) {
        g[i] = (i == n_intervals) ? 0.0 : -tau + tau * i / n_intervals;
        v[i] = f(g[i]);
        if (df) {
            d[i] = (*df)(g[i]);
        } else {
            const double hd = 6e-6 * std::max(1.0, std::abs(g[i]));
            d[i] = (f(g[i] + hd) - f(g[i] - hd)) / (2.0 * hd);
        }
    }
    return History(std::move(g), std::move(v), std::move(d));
}

History History::from_samples(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() < 2 || grid.size() != values.size()) {
        throw InvalidArgument("history needs at least two samples with matching values");
    }
    std::vector<double> d = centred_differences(grid, values);
    return History(std::move(grid), std::move(values), std::move(d));
}

std::size_t History::locate(double t) const {
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    if (it == grid_.begin()) return 0;
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
    return std::min(i, grid_.size() - 2);
}

double History::value(double t) const {
    const std::size_t i = locate(t);
    const double h = grid_[i + 1] - grid_[i];
    const double s = std::clamp((t - grid_[i]) / h, 0.0, 1.0);
    return hermite(values_[i], derivs_[i], values_[i + 1], derivs_[i + 1], h, s);
}

double History::derivative(double t) const {
    const std::size_t i = locate(t);
    const double h = grid_[i + 1] - grid_[i];
    const double s = std::clamp((t - grid_[i]) / h, 0.0, 1.0);
    return hermite_deriv(values_[i], derivs_[i], values_[i + 1], derivs_[i + 1], h, s);
}

double History::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

Trajectory integrate_neutral(const NeutralRhs& f, double alpha, double tau, const History& y0, double t_end,
                             double h) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("delay tau must be positive and finite");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InvalidArgument("t_end must be positive");
    if (!(h > 0.0) || h > tau / 16.0) throw InvalidArgument("step must resolve the delay: require 0 < h <= tau/16");
    if (std::abs(y0.tau() - tau) > 1e-12 * tau) {
        throw InvalidArgument("history must span [-tau, 0] for the delay being integrated");
    }

    const long m = static_cast<long>(std::ceil(tau / h - 1e-9));
    const double he = tau / static_cast<double>(m);
    const long n = static_cast<long>(std::ceil(t_end / he - 1e-9));

    Trajectory tr;
    tr.step = he;
    tr.delay = tau;
    tr.times.resize(n + 1);
    tr.values.resize(n + 1);
    tr.derivs.resize(n + 1);
    std::vector<double> z(n + 1), dleft(n + 1), dright(n + 1);

    // Delayed value at t_j + c*he - tau, i.e. inside [t_{j-m}, t_{j-m+1}] at fraction c.
    auto delayed = [&](long j, double c) {
        const long i = j - m;
        if (i < 0 || (i == 0 && c == 0.0)) return y0.value((static_cast<double>(i) + c) * he);
        if (c == 0.0) return tr.values[i];
        return hermite(tr.values[i], dright[i], tr.values[i + 1], dleft[i + 1], he, c);
    };
    auto delayed_dleft = [&](long j) {
        const long i = j - m;
        return i <= 0 ? y0.derivative(static_cast<double>(i) * he) : dleft[i];
    };
    auto delayed_dright = [&](long j) {
        const long i = j - m;
        return i < 0 ? y0.derivative(static_cast<double>(i) * he) : dright[i];
    };
    auto zdot = [&](double zv, double yd) { return f(zv - alpha * yd, yd); };

    auto set_node = [&](long j, double zj) {
        const double yd = delayed(j, 0.0);
        z[j] = zj;
        tr.times[j] = static_cast<double>(j) * he;
        tr.values[j] = zj - alpha * yd;
        const double zd = zdot(zj, yd);
        dright[j] = zd - alpha * delayed_dright(j);
        dleft[j] = zd - alpha * delayed_dleft(j);
        tr.derivs[j] = dright[j];
    };

    // Node 0: right derivative uses the solution itself, left derivative the history.
    {
        const double yd = y0.value(-tau);
        z[0] = y0.value(0.0) + alpha * yd;
        tr.times[0] = 0.0;
        tr.values[0] = y0.value(0.0);
        const double zd = zdot(z[0], yd);
        dright[0] = zd - alpha * y0.derivative(-tau);
        dleft[0] = y0.derivative(0.0);
        tr.derivs[0] = dright[0];
    }

    for (long j = 0; j < n; ++j) {
        const double yd0 = delayed(j, 0.0);
        const double ydh = delayed(j, 0.5);
        const double yd1 = delayed(j, 1.0);
        const double k1 = zdot(z[j], yd0);
        const double k2 = zdot(z[j] + 0.5 * he * k1, ydh);
        const double k3 = zdot(z[j] + 0.5 * he * k2, ydh);
        const double k4 = zdot(z[j] + he * k3, yd1);
        const double znext = z[j] + he / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(znext)) throw SolverError("integration diverged at t = " + std::to_string(tr.times[j]));
        set_node(j + 1, znext);
    }
    return tr;
}

Trajectory integrate_linear_neutral(const NeutralQuasiPoly& qp, const History& y0, double t_end, double h) {
    validate(qp);
    const double a = qp.a, beta = qp.beta;
    return integrate_neutral([a, beta](double y, double yd) { return -a * y - beta * yd; }, qp.alpha, qp.tau, y0,
                             t_end, h);
}

Trajectory integrate_hopfield(const PlantSpec& plant, const ControllerDesign& ctrl, const History& y0,
                              double t_end, double h) {
    const double nu = plant.nu, mu = plant.mu, kp = ctrl.kp;
    if (plant.nonlinearity == Nonlinearity::tanh) {
        return integrate_neutral([=](double y, double yd) { return -nu * y + mu * std::tanh(y) - kp * yd; }, ctrl.kd,
                                 ctrl.tau, y0, t_end, h);
    }
    return integrate_neutral([=](double y, double yd) { return -nu * y + mu * y - kp * yd; }, ctrl.kd, ctrl.tau, y0,
                             t_end, h);
}

double estimate_decay_rate(const Trajectory& traj, double t_start, double t_end) {
    if (traj.times.empty() || !(traj.delay > 0.0)) throw FitError("trajectory has no samples or no delay");
    if (!(t_end > t_start)) throw FitError("fit window must satisfy t_start < t_end");
    const double slack = 1e-9 * std::max(1.0, std::abs(t_end));
    if (t_start < traj.times.front() - slack || t_end > traj.times.back() + slack) {
        throw FitError("fit window is not covered by the trajectory");
    }
    const int n_int = static_cast<int>(std::floor((t_end - t_start) / traj.delay + 1e-9));
    if (n_int < 3) throw FitError("window too short: fewer than three delay intervals");

    std::vector<double> ts, ls;
    for (int k = 0; k < n_int; ++k) {
        const double lo = t_start + k * traj.delay - slack;
        const double hi = t_start + (k + 1) * traj.delay + slack;
        double best = -1.0, best_t = 0.0;
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            if (traj.times[i] < lo || traj.times[i] > hi) continue;
            const double v = std::abs(traj.values[i]);
            if (v > best) {
                best = v;
                best_t = traj.times[i];
            }
        }
        if (best < 1e-13) throw FitError("signal at floor: sup |y| below 1e-13 in the fit window");
        ts.push_back(best_t);
        ls.push_back(std::log(best));
    }
    const double n = static_cast<double>(ts.size());
    double mt = 0.0, ml = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        mt += ts[i];
        ml += ls[i];
    }
    mt /= n;
    ml /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        sxx += (ts[i] - mt) * (ts[i] - mt);
        sxy += (ts[i] - mt) * (ls[i] - ml);
    }
    if (sxx == 0.0) throw FitError("degenerate fit window");
    return sxy / sxx;
}

}  // namespace nplace
