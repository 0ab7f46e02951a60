#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "nplace/errors.hpp"
#include "nplace/placement.hpp"

namespace nplace {

namespace {

constexpr double pi = std::numbers::pi;

/// (scale/pi) * integral_{-T}^{T} dT' / (|Delta(c + i T')| sqrt(offset^2 + T'^2)) + 1/pi
double integral_constant(const NeutralQuasiPoly& qp, double c, double offset, double scale, double T) {
    auto integrand = [&](double t) {
        return 1.0 / (std::abs(eval_delta(qp, Complex{c, t})) * std::hypot(offset, t));
    };
    double err = 0.0;
    const double val =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, -T, T, 20, 1e-11, &err);
    return scale / pi * val + 1.0 / pi;
}

void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("epsilon must be positive");
}

}  // namespace

ExpEstimate exp_estimate(const NeutralQuasiPoly& design, const RootTriple& roots, double epsilon) {
    require_epsilon(epsilon);
    validate(design);
    validate(roots);
    const double tau = design.tau;
    const double s1 = roots.s1;
    const double c = s1;
    const double zeta = f1(tau, roots.s2 - c, roots.s3 - c) / (tau * f2(tau, 0.0, roots.s2 - c, roots.s3 - c));
    const double alpha = design.alpha;
    const double ratio = alpha * std::exp(-tau * s1);
    if (!(ratio < 1.0)) throw InvalidArgument("exp_estimate requires alpha < exp(tau s1)");

    ExpEstimate est;
    est.epsilon = epsilon;
    est.rate = s1 + epsilon;
    est.T_cut = 4.0 * zeta / (1.0 - ratio);
    est.k0 = integral_constant(design, s1 + epsilon, epsilon, zeta, est.T_cut);
    est.k = (1.0 + est.k0) * (1.0 + alpha) / (1.0 - alpha * std::exp(-tau * (s1 + epsilon)));
    return est;
}

ExpEstimate exp_estimate(const NeutralQuasiPoly& design, const RootPair& roots, double epsilon) {
    require_epsilon(epsilon);
    validate(design);
    validate(roots, true);
    const double tau = design.tau;
    const double s1 = roots.s1;
    const double alpha = design.alpha;
    const double e1 = std::exp(tau * s1);
    const double ratio = alpha / e1;
    if (!(1.0 + ratio > 0.0)) throw InvalidArgument("exp_estimate requires alpha > -exp(tau s1)");

    const double kappa = (alpha + e1) / (tau * f1(tau, roots.s1, roots.s2));
    ExpEstimate est;
    est.epsilon = epsilon;
    est.rate = s1 + epsilon;
    est.T_cut = 4.0 * kappa / (1.0 + ratio);
    est.k0 = integral_constant(design, s1 + epsilon, roots.delta() + epsilon, kappa, est.T_cut);
    est.k = (1.0 + est.k0) * (1.0 + std::abs(alpha)) / (1.0 + alpha * std::exp(-tau * (s1 + epsilon)));
    return est;
}

ExpEstimate exp_estimate(const NeutralQuasiPoly& design, const AssignedRoots& roots, double epsilon) {
    return std::visit([&](const auto& r) { return exp_estimate(design, r, epsilon); }, roots);
}

}  // namespace nplace
