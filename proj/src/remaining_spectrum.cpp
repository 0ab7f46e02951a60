#include <cmath>
#include <limits>
#include <numbers>

#include "nplace/errors.hpp"
#include "nplace/placement.hpp"

namespace nplace {

namespace {

constexpr double pi = std::numbers::pi;

/// Root of h on (lo, hi) where h changes sign: bisection to 1e-6 then Newton to 1e-12.
template <class H, class DH>
double branch_root(H h, DH dh, double lo, double hi) {
    double hlo = h(lo);
    while (hi - lo > 1e-6) {
        const double mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if ((hm < 0.0) == (hlo < 0.0)) {
            lo = mid;
            hlo = hm;
        } else {
            hi = mid;
        }
    }
    const double a = lo, b = hi;
    double w = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double d = dh(w);
        if (d == 0.0) break;
        const double step = h(w) / d;
        const double next = w - step;
        if (next <= a - 1e-6 || next >= b + 1e-6) break;
        w = next;
        if (std::abs(step) < 1e-12) break;
    }
    return w;
}

void chain_roots(const NeutralQuasiPoly& qp, double re, double im_offset, int n_branches,
                 SpectrumCharacterization& out) {
    for (int k = 1; k <= n_branches; ++k) {
        const double im = (2.0 * pi * k - 2.0 * pi + im_offset) / qp.tau;
        const Complex seed{re, im};
        const Complex z = newton_polish(qp, seed, 80);
        out.roots.push_back(z);
        out.omegas.push_back(qp.tau * z.imag());
    }
}

}  // namespace

SpectrumCharacterization remaining_spectrum_three(const RootTriple& roots, double tau, int n_branches) {
    validate(roots);
    if (n_branches < 1) throw InvalidArgument("n_branches must be at least 1");
    const NeutralQuasiPoly qp = assign_three(roots, tau);
    const double c = roots.s1;

    SpectrumCharacterization sc;
    sc.theta = qp.alpha * std::exp(-tau * roots.s2);
    sc.xi = f1(tau, roots.s1 - c, roots.s3 - c) / f2(tau, roots.s1 - c, roots.s2 - c, roots.s3 - c);
    const double lhs = std::log(sc.theta);
    const double rhs = sc.xi * (sc.theta - 1.0) / (2.0 * sc.theta);
    sc.on_axis = std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs));
    sc.axis_re = roots.s2 + lhs / tau;

    if (sc.on_axis) {
        const double cc = (sc.theta + 1.0) / (2.0 * sc.theta);
        const double xi = sc.xi;
        auto h = [&](double w) { return cc * std::sin(w / 2.0) - (w / xi) * std::cos(w / 2.0); };
        auto dh = [&](double w) {
            return 0.5 * cc * std::cos(w / 2.0) - std::cos(w / 2.0) / xi + 0.5 * (w / xi) * std::sin(w / 2.0);
        };
        for (int k = 1; k <= n_branches; ++k) {
            const double w = branch_root(h, dh, (2.0 * k - 1.0) * pi, (2.0 * k + 1.0) * pi);
            sc.omegas.push_back(w);
            sc.roots.push_back(newton_polish(qp, Complex{sc.axis_re, w / tau}, 20));
        }
    } else {
        sc.note = "chain asymptotic to the vertical line Re(s) = ln(alpha)/tau";
        chain_roots(qp, sc.axis_re, 3.0 * pi, n_branches, sc);
    }
    return sc;
}

SpectrumCharacterization remaining_spectrum_two(const RootPair& pair, double a, double tau, int n_branches) {
    validate(pair);
    if (n_branches < 1) throw InvalidArgument("n_branches must be at least 1");
    const RegionLabel label = classify_two_root(pair, a, tau);
    if (label.region == Region::R1 || label.region == Region::R2 || label.region == Region::R3) {
        throw InvalidArgument("third real root present; use the three-root characterization");
    }
    const NeutralQuasiPoly qp = assign_two_exact(pair, a, tau);
    const double e1 = std::exp(tau * pair.s1);

    SpectrumCharacterization sc;
    sc.theta = qp.alpha * std::exp(-tau * pair.s2);
    sc.xi = (qp.alpha + e1) / f1(tau, pair.s1, pair.s2);

    if (std::abs(qp.alpha + e1) <= 1e-12 * e1) {
        sc.note = "boundary: remaining roots s1 + 2 pi i k / tau";
        sc.on_axis = true;
        sc.axis_re = pair.s1;
        sc.xi = 0.0;
        for (int k = 1; k <= n_branches; ++k) {
            sc.omegas.push_back(2.0 * pi * k);
            sc.roots.emplace_back(pair.s1, 2.0 * pi * k / tau);
        }
        return sc;
    }
    if (std::abs(qp.alpha) <= 1e-14 * e1) {
        sc.note = "retarded: no neutral chain";
        sc.on_axis = false;
        sc.axis_re = -std::numeric_limits<double>::infinity();
        sc.omegas.push_back(0.0);
        return sc;
    }

    const double lhs = std::log(-sc.theta);
    const double rhs = sc.xi * (sc.theta - 1.0) / (2.0 * sc.theta);
    sc.on_axis = std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs));
    sc.axis_re = pair.s2 + lhs / tau;

    if (sc.on_axis) {
        const double cc = (sc.theta + 1.0) / (2.0 * sc.theta);
        const double xi = sc.xi;
        auto h = [&](double w) { return cc * std::cos(w / 2.0) + (w / xi) * std::sin(w / 2.0); };
        auto dh = [&](double w) {
            return -0.5 * cc * std::sin(w / 2.0) + std::sin(w / 2.0) / xi + 0.5 * (w / xi) * std::cos(w / 2.0);
        };
        for (int k = 1; k <= n_branches; ++k) {
            const double w = branch_root(h, dh, 2.0 * (k - 1.0) * pi, 2.0 * k * pi);
            sc.omegas.push_back(w);
            sc.roots.push_back(newton_polish(qp, Complex{sc.axis_re, w / tau}, 20));
        }
    } else {
        sc.note = "chain asymptotic to the vertical line Re(s) = ln|alpha|/tau";
        chain_roots(qp, sc.axis_re, 2.0 * pi, n_branches, sc);
    }
    return sc;
}

}  // namespace nplace
