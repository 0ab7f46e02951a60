#include "nplace/core_math.hpp"

#include <algorithm>
#include <cmath>

#include "nplace/errors.hpp"

namespace nplace {

namespace {

void require_positive_u(double u, const char* who) {
    if (!(u > 0.0) || !std::isfinite(u)) {
        throw InvalidArgument(std::string(who) + ": scaled gap u must be positive and finite");
    }
}

}  // namespace

void validate(const NeutralQuasiPoly& qp) {
    if (!(qp.tau > 0.0) || !std::isfinite(qp.tau)) {
        throw InvalidArgument("delay tau must be positive and finite");
    }
    if (!std::isfinite(qp.a) || !std::isfinite(qp.alpha) || !std::isfinite(qp.beta)) {
        throw InvalidArgument("quasipolynomial coefficients must be finite");
    }
}

Complex eval_delta(const NeutralQuasiPoly& qp, Complex s) {
    const Complex e = std::exp(-qp.tau * s);
    return s + qp.a + e * (qp.alpha * s + qp.beta);
}

Complex eval_delta_deriv(const NeutralQuasiPoly& qp, Complex s) {
    const Complex e = std::exp(-qp.tau * s);
    return 1.0 + e * (qp.alpha - qp.tau * (qp.alpha * s + qp.beta));
}

double delta_magnitude(const NeutralQuasiPoly& qp, Complex s) {
    const double e = std::exp(-qp.tau * s.real());
    return std::abs(s) + std::abs(qp.a) + e * (std::abs(qp.alpha) * std::abs(s) + std::abs(qp.beta));
}

double eval_delta_real(const NeutralQuasiPoly& qp, double t) {
    return t + qp.a + std::exp(-qp.tau * t) * (qp.alpha * t + qp.beta);
}

double f1(double tau, double u, double v) {
    const double hi = std::max(u, v);
    const double lo = std::min(u, v);
    const double x = tau * (lo - hi);
    const double base = std::exp(tau * hi);
    if (std::abs(x) < 1e-6) {
        return base * (1.0 + x / 2.0 + x * x / 6.0 + x * x * x / 24.0);
    }
    return base * (std::expm1(x) / x);
}

double f2(double tau, double s1, double s2, double s3) {
    double p = s1, r = s2, q = s3;
    if (p < r) std::swap(p, r);
    if (r < q) std::swap(r, q);
    if (p < r) std::swap(p, r);

    const double spread = tau * (p - q);
    if (spread < 1.0) {
        const double m = (p + r + q) / 3.0;
        const double z1 = tau * (p - m), z2 = tau * (r - m), z3 = tau * (q - m);
        const double e1 = z1 + z2 + z3;
        const double e2 = z1 * z2 + z1 * z3 + z2 * z3;
        const double e3 = z1 * z2 * z3;
        // h_j: complete homogeneous symmetric polynomials of (z1, z2, z3).
        double h1 = 1.0, hm2 = 0.0, hm3 = 0.0;  // h_{j-1}, h_{j-2}, h_{j-3}
        double sum = 0.5;                      // h_0 / 2!
        double fact = 2.0;
        const double r = std::max({std::abs(z1), std::abs(z2), std::abs(z3)});
        double rj = 1.0;  // r^j bounds |h_j| / C(j+2, 2)
        for (int j = 1; j < 80; ++j) {
            const double hj = e1 * h1 - e2 * hm2 + e3 * hm3;
            fact *= static_cast<double>(j + 2);
            const double term = hj / fact;
            sum += term;
            hm3 = hm2;
            hm2 = h1;
            h1 = hj;
            rj *= r;
            if (0.5 * (j + 2) * (j + 1) * rj / fact < 1e-18 * sum) break;
        }
        return std::exp(tau * m) * sum;
    }
    return (f1(tau, p, r) - f1(tau, r, q)) / spread;
}

double coth(double x) {
    if (std::abs(x) < 1e-4) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

double x_coth_half(double x) {
    if (std::abs(x) < 1e-4) return 2.0 + x * x / 6.0;
    return x / std::tanh(x / 2.0);
}

double fvl_V(const NeutralQuasiPoly& qp, double s0) {
    return (std::abs(qp.alpha) * (1.0 + std::abs(s0) * qp.tau) + std::abs(qp.beta) * qp.tau) *
           std::exp(-s0 * qp.tau);
}

double gcrrid_W(double u, double v) {
    require_positive_u(u, "gcrrid_W");
    return (1.0 - 2.0 * v + u + x_coth_half(u)) * std::exp(-u);
}

double gcrrid_W_natural(double tau, double d, double s1) { return gcrrid_W(tau * d, tau * s1); }

double gcrrid_v_boundary(double u) {
    require_positive_u(u, "gcrrid_v_boundary");
    return (x_coth_half(u) + u - std::expm1(u)) / 2.0;
}

double icrrid_Z(double A, double u, double v) {
    require_positive_u(u, "icrrid_Z");
    const double uz = std::exp(-u) * (A + v - u) * (-1.0 + 2.0 * v) + (A + v) * (1.0 - 2.0 * v + u);
    return uz / u;
}

double icrrid_Z(const ScaledParams& p) { return icrrid_Z(p.A, p.u, p.v); }

double icrrid_Z_natural(double tau, double a, double delta, double s1) {
    return icrrid_Z(tau * a, tau * delta, tau * s1);
}

}  // namespace nplace
