#pragma once

// Evaluation kernel for the scalar neutral quasipolynomial
//
//     Delta(s) = s + a + exp(-tau s) (alpha s + beta)
//
// together with the integral functions F1/F2 used by the coefficient
// assignment formulas and the scalar dominance criteria (V, W, Z).

#include <complex>

namespace nplace {

using Complex = std::complex<double>;

/// Characteristic function of d/dt[y(t) + alpha y(t-tau)] = -a y(t) - beta y(t-tau).
struct NeutralQuasiPoly {
    double a = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 1.0;
};

/// Characteristic function of y'(t) = -a y(t) - kp y(t-tau) (delayed P control).
struct RetardedQuasiPoly {
    double a = 0.0;
    double kp = 0.0;
    double tau = 1.0;

    [[nodiscard]] NeutralQuasiPoly as_neutral() const { return {a, 0.0, kp, tau}; }
};

/// Delay-scaled parameters: u = tau*gap, v = tau*s1, A = tau*a.
struct ScaledParams {
    double u = 0.0;
    double v = 0.0;
    double A = 0.0;
};

/// Throws InvalidArgument unless tau > 0 and all coefficients are finite.
void validate(const NeutralQuasiPoly& qp);

[[nodiscard]] Complex eval_delta(const NeutralQuasiPoly& qp, Complex s);
[[nodiscard]] Complex eval_delta_deriv(const NeutralQuasiPoly& qp, Complex s);

/// Sum of the absolute values of the terms of Delta(s); used to scale residuals.
[[nodiscard]] double delta_magnitude(const NeutralQuasiPoly& qp, Complex s);

/// Real restriction t -> Delta(t).
[[nodiscard]] double eval_delta_real(const NeutralQuasiPoly& qp, double t);

/**
 * F_{-tau,1}(u, v) = integral_0^1 exp(tau (t u + (1-t) v)) dt
 *                  = (e^{tau u} - e^{tau v}) / (tau (u - v)).
 *
 * Strictly positive. The coincident limit u == v is e^{tau u}.
 */
[[nodiscard]] double f1(double tau, double u, double v);

/**
 * F_{-tau,2}(s1, s2, s3): the second divided difference of x -> e^{tau x}
 * divided by tau^2, i.e. the simplex integral of e^{tau(.)}.
 *
 * Symmetric in its arguments (arguments are sorted internally so every
 * permutation takes the same code path). Strictly positive.
 */
[[nodiscard]] double f2(double tau, double s1, double s2, double s3);

/// coth(x) with a 1/x + x/3 expansion for |x| < 1e-4.
[[nodiscard]] double coth(double x);

/// x * coth(x / 2), continuous at 0 with value 2.
[[nodiscard]] double x_coth_half(double x);

/// Frasson-Verduyn Lunel quantity (|alpha|(1+|s0| tau) + |beta| tau) e^{-s0 tau}.
/// V < 1 is sufficient for s0 to be a simple dominant root.
[[nodiscard]] double fvl_V(const NeutralQuasiPoly& qp, double s0);

/// V evaluated on an equidistributed design, in scaled variables u = tau d, v = tau s1.
[[nodiscard]] double gcrrid_W(double u, double v);
[[nodiscard]] double gcrrid_W_natural(double tau, double d, double s1);

/// Level set W(u, v) = 1 solved for v. Strictly decreasing, tends to 1 as u -> 0+.
[[nodiscard]] double gcrrid_v_boundary(double u);

/// V evaluated on a two-root design with 0 <= (a+s1)/delta < 1 and s1 <= 0,
/// in scaled variables A = tau a, u = tau delta, v = tau s1.
[[nodiscard]] double icrrid_Z(double A, double u, double v);
[[nodiscard]] double icrrid_Z(const ScaledParams& p);
[[nodiscard]] double icrrid_Z_natural(double tau, double a, double delta, double s1);

}  // namespace nplace
