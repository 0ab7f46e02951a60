#include "nplace/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nplace/errors.hpp"

namespace nplace {

namespace {

constexpr double tie_tol = 1e-12;

void require_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("delay tau must be positive and finite");
}

/// F1(s2 - c, t - c) / (tau * delta * F2(s1 - c, s2 - c, t - c)) with c = max(s1, t).
double phi_of_t(double tau, double s1, double s2, double t) {
    const double c = std::max(s1, t);
    return f1(tau, s2 - c, t - c) / (tau * (s1 - s2) * f2(tau, s1 - c, s2 - c, t - c));
}

double bisect_increasing(double (*fn)(double, double, double, double), double tau, double s1, double s2,
                         double target, double lo, double hi) {
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (fn(tau, s1, s2, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double polish_real_root(const NeutralQuasiPoly& qp, double t) {
    double best = t;
    double best_f = std::abs(eval_delta_real(qp, t));
    for (int it = 0; it < 30; ++it) {
        const double f = eval_delta_real(qp, t);
        const double df = eval_delta_deriv(qp, Complex{t, 0.0}).real();
        if (df == 0.0 || !std::isfinite(df)) break;
        t -= f / df;
        const double ft = std::abs(eval_delta_real(qp, t));
        if (!std::isfinite(ft)) break;
        if (ft < best_f) {
            best_f = ft;
            best = t;
        }
        if (std::abs(f / df) <= 1e-15 * (1.0 + std::abs(t))) break;
    }
    return best;
}

}  // namespace

bool RootTriple::equidistributed() const {
    const double scale = std::max({1.0, std::abs(s1), std::abs(s2), std::abs(s3)});
    return std::abs(s1 - 2.0 * s2 + s3) < 1e-12 * scale;
}

void validate(const RootTriple& roots) {
    if (!std::isfinite(roots.s1) || !std::isfinite(roots.s2) || !std::isfinite(roots.s3)) {
        throw InvalidArgument("roots must be finite");
    }
    if (!(roots.s3 < roots.s2 && roots.s2 < roots.s1)) {
        throw InvalidArgument("roots must satisfy s3 < s2 < s1");
    }
}

void validate(const RootPair& pair, bool allow_coincident) {
    if (!std::isfinite(pair.s1) || !std::isfinite(pair.s2)) throw InvalidArgument("roots must be finite");
    if (pair.s2 < pair.s1) return;
    if (allow_coincident && pair.s2 == pair.s1) return;
    throw InvalidArgument(allow_coincident ? "roots must satisfy s2 <= s1" : "roots must satisfy s2 < s1");
}

const char* to_string(Region r) {
    switch (r) {
        case Region::R1: return "R1";
        case Region::R2: return "R2";
        case Region::R3: return "R3";
        case Region::R4: return "R4";
        case Region::R5: return "R5";
    }
    return "?";
}

const char* to_string(ImidVerdict v) {
    switch (v) {
        case ImidVerdict::strictly_dominant: return "strictly_dominant";
        case ImidVerdict::dominant_not_strict: return "dominant_not_strict";
        case ImidVerdict::not_dominant: return "not_dominant";
    }
    return "?";
}

const char* to_string(ControllerKind k) { return k == ControllerKind::P ? "P" : "PD"; }

double ControllerDesign::s1() const {
    return std::visit([](const auto& r) { return r.s1; }, assigned_roots);
}

double coefficient_a(const RootTriple& roots, double tau) {
    require_tau(tau);
    const double c = roots.s1;
    const double zeta = f1(tau, roots.s2 - c, roots.s3 - c) /
                        (tau * f2(tau, roots.s1 - c, roots.s2 - c, roots.s3 - c));
    return -roots.s1 - zeta;
}

NeutralQuasiPoly assign_three(const RootTriple& roots, double tau) {
    validate(roots);
    require_tau(tau);
    const double s1 = roots.s1, s2 = roots.s2, s3 = roots.s3;
    const double den = f2(tau, 0.0, s2 - s1, s3 - s1);
    const double num = f2(tau, 0.0, s3 - s2, s2 + s3 - s1 - s2);
    const double alpha = std::exp(tau * s2) * num / den;
    const double zeta = f1(tau, s2 - s1, s3 - s1) / (tau * den);
    const double a = -s1 - zeta;
    const double beta = -alpha * s1 + zeta * std::exp(tau * s1);
    return {a, alpha, beta, tau};
}

NeutralQuasiPoly assign_two_exact(const RootPair& pair, double a, double tau) {
    validate(pair);
    require_tau(tau);
    if (!std::isfinite(a)) throw InvalidArgument("coefficient a must be finite");
    const double lambda3 = (a + pair.s1) / (pair.s1 - pair.s2);
    const double e1 = std::exp(tau * pair.s1);
    const double e2 = std::exp(tau * pair.s2);
    const double alpha = -(lambda3 * e1 + (1.0 - lambda3) * e2);
    const double beta = -alpha * pair.s1 - e1 * (a + pair.s1);
    return {a, alpha, beta, tau};
}

NeutralQuasiPoly assign_double(double s1, double a, double tau) {
    require_tau(tau);
    if (!std::isfinite(s1) || !std::isfinite(a)) throw InvalidArgument("s1 and a must be finite");
    const double e1 = std::exp(tau * s1);
    const double alpha = -(tau * (a + s1) + 1.0) * e1;
    const double beta = -alpha * s1 - e1 * (a + s1);
    return {a, alpha, beta, tau};
}

PhiBoundaries phi_boundaries(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("phi boundaries need x = tau*(s1-s2) > 0");
    PhiBoundaries p;
    if (x <= 1.0) {
        // x e^x - expm1(x) = sum_{k>=2} (k-1) x^k / k!,  expm1(x) - x = sum_{k>=2} x^k / k!
        double term = x;  // x^k / k! for k = 1
        double d1 = 0.0, d2 = 0.0;
        for (int k = 2; k < 40; ++k) {
            term *= x / k;
            d1 += (k - 1) * term;
            d2 += term;
            if (term < 1e-18 * d2) break;
        }
        const double em1 = std::expm1(x);
        p.phi1 = -em1 / d1;
        p.phi2 = -x / d2;
        p.phi3 = -1.0 / em1;
    } else {
        const double e = std::exp(-x);
        p.phi1 = -(1.0 - e) / (x - 1.0 + e);
        p.phi2 = -x * e / (1.0 - (1.0 + x) * e);
        p.phi3 = -e / (1.0 - e);
    }
    return p;
}

RegionLabel classify_two_root(const RootPair& pair, double a, double tau) {
    validate(pair);
    require_tau(tau);
    if (!std::isfinite(a)) throw InvalidArgument("coefficient a must be finite");
    const double delta = pair.s1 - pair.s2;
    const PhiBoundaries phi = phi_boundaries(tau * delta);

    RegionLabel label;
    label.lambda3 = (a + pair.s1) / delta;
    label.phi1 = phi.phi1;
    label.phi2 = phi.phi2;
    label.phi3 = phi.phi3;
    const double l3 = label.lambda3;
    auto tie = [&](double b) { return std::abs(l3 - b) <= tie_tol * std::max(1.0, std::abs(b)); };

    if (tie(phi.phi1)) {
        label.region = Region::R1;
        label.on_boundary = true;
        label.adjacent = Region::R2;
    } else if (tie(phi.phi2)) {
        label.region = Region::R2;
        label.on_boundary = true;
        label.adjacent = Region::R3;
    } else if (tie(phi.phi3)) {
        label.region = Region::R4;
        label.on_boundary = true;
        label.adjacent = Region::R3;
    } else if (tie(1.0)) {
        label.region = Region::R5;
        label.on_boundary = true;
        label.adjacent = Region::R4;
    } else if (l3 < phi.phi1) {
        label.region = Region::R1;
    } else if (l3 < phi.phi2) {
        label.region = Region::R2;
    } else if (l3 < phi.phi3) {
        label.region = Region::R3;
    } else if (l3 < 1.0) {
        label.region = Region::R4;
    } else {
        label.region = Region::R5;
    }

    const double target = -l3;
    const NeutralQuasiPoly qp = assign_two_exact(pair, a, tau);
    std::optional<double> x;
    switch (label.region) {
        case Region::R1: {
            if (label.on_boundary) {
                x = pair.s1;
                break;
            }
            double lo = pair.s1, step = std::max(delta, 1.0 / tau);
            double hi = pair.s1 + step;
            while (phi_of_t(tau, pair.s1, pair.s2, hi) < target && step < 1e12) {
                lo = hi;
                step *= 2.0;
                hi = pair.s1 + step;
            }
            x = bisect_increasing(phi_of_t, tau, pair.s1, pair.s2, target, lo, hi);
            break;
        }
        case Region::R2:
            x = label.on_boundary ? pair.s2 : bisect_increasing(phi_of_t, tau, pair.s1, pair.s2, target, pair.s2, pair.s1);
            break;
        case Region::R3: {
            double hi = pair.s2, step = std::max(delta, 1.0 / tau);
            double lo = pair.s2 - step;
            while (phi_of_t(tau, pair.s1, pair.s2, lo) > target && step < 1e12) {
                hi = lo;
                step *= 2.0;
                lo = pair.s2 - step;
            }
            x = bisect_increasing(phi_of_t, tau, pair.s1, pair.s2, target, lo, hi);
            break;
        }
        default:
            break;
    }
    if (x && !label.on_boundary) x = polish_real_root(qp, *x);
    label.x = x;
    return label;
}

ImidVerdict imid_check(double s1, double a, double tau) {
    require_tau(tau);
    const double v = tau * (a + s1);
    if (std::abs(v) <= tie_tol) return ImidVerdict::dominant_not_strict;
    if (v < 0.0 && v >= -1.0 - tie_tol) return ImidVerdict::strictly_dominant;
    return ImidVerdict::not_dominant;
}

TauSolution solve_tau_numeric(const RootTriple& roots, double a_target) {
    validate(roots);
    if (!std::isfinite(a_target)) throw InvalidArgument("target coefficient must be finite");
    if (a_target >= -roots.s1) {
        throw UnreachableRate("prescribed rate unreachable: the target coefficient must be below -s1");
    }
    const double lo = 1e-6 / roots.delta();
    const double hi = 700.0 / roots.d();
    const int n = 4000;
    const double ratio = std::log(hi / lo) / n;
    auto g = [&](double tau) { return coefficient_a(roots, tau) - a_target; };

    std::vector<std::pair<double, double>> brackets;
    double t_prev = lo;
    double g_prev = g(lo);
    for (int i = 1; i <= n; ++i) {
        const double t = lo * std::exp(ratio * i);
        const double gt = g(t);
        if (gt == 0.0) {
            brackets.emplace_back(t, t);
        } else if (g_prev != 0.0 && (g_prev < 0.0) != (gt < 0.0)) {
            brackets.emplace_back(t_prev, t);
        }
        t_prev = t;
        g_prev = gt;
    }
    if (brackets.empty()) throw SolverError("no delay found with a(tau) equal to the target coefficient");

    auto [a, b] = brackets.front();
    if (a != b) {
        double ga = g(a);
        for (int it = 0; it < 300; ++it) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            const double gm = g(m);
            if (gm == 0.0) {
                a = b = m;
                break;
            }
            if ((gm < 0.0) == (ga < 0.0)) {
                a = m;
                ga = gm;
            } else {
                b = m;
            }
        }
    }
    return {0.5 * (a + b), static_cast<int>(brackets.size())};
}

double solve_tau_for_a(const RootTriple& roots, double a_target) {
    validate(roots);
    if (!std::isfinite(a_target)) throw InvalidArgument("target coefficient must be finite");
    if (a_target >= -roots.s1) {
        throw UnreachableRate("prescribed rate unreachable: the target coefficient must be below -s1");
    }
    if (roots.equidistributed()) {
        return std::log((-roots.s3 - a_target) / (-roots.s1 - a_target)) / roots.d();
    }
    return solve_tau_numeric(roots, a_target).tau;
}

double tau_star_three(const RootTriple& roots) {
    validate(roots);
    if (roots.s1 >= 0.0) throw InvalidArgument("no stabilizing tau* exists: s1 must be negative");
    if (roots.equidistributed()) return std::log(roots.s3 / roots.s1) / roots.d();
    return solve_tau_numeric(roots, 0.0).tau;
}

double tau_star_pair(const RootPair& pair) {
    validate(pair);
    if (pair.s1 >= 0.0) throw InvalidArgument("no stabilizing tau* exists: s1 must be negative");
    return std::log(pair.s2 / pair.s1) / (pair.s1 - pair.s2);
}

ControllerDesign design_pd(double nu, double mu, const RootTriple& roots) {
    validate(roots);
    if (!std::isfinite(nu) || !std::isfinite(mu)) throw InvalidArgument("plant parameters must be finite");
    const double a = nu - mu;
    if (a >= -roots.s1) throw UnreachableRate("prescribed rate unreachable: require s1 < mu - nu");

    ControllerDesign d;
    d.kind = ControllerKind::PD;
    d.nu = nu;
    d.mu = mu;
    d.plant_a = a;
    d.assigned_roots = roots;
    if (roots.equidistributed()) {
        d.tau = solve_tau_for_a(roots, a);
        d.n_brackets = 1;
    } else {
        const TauSolution sol = solve_tau_numeric(roots, a);
        d.tau = sol.tau;
        d.n_brackets = sol.n_brackets;
    }
    const NeutralQuasiPoly qp = assign_three(roots, d.tau);
    d.kd = qp.alpha;
    d.kp = qp.beta;
    return d;
}

ControllerDesign design_p(double nu, double mu, const RootPair& pair) {
    validate(pair, true);
    if (!std::isfinite(nu) || !std::isfinite(mu)) throw InvalidArgument("plant parameters must be finite");
    const double a = nu - mu;
    if (a >= -pair.s1) throw UnreachableRate("prescribed rate unreachable: require s1 < mu - nu");

    ControllerDesign d;
    d.kind = ControllerKind::P;
    d.nu = nu;
    d.mu = mu;
    d.plant_a = a;
    d.assigned_roots = pair;
    d.kd = 0.0;
    if (pair.coincident()) {
        d.tau = -1.0 / (a + pair.s1);
        d.kp = std::exp(d.tau * pair.s1) / d.tau;
    } else {
        const double delta = pair.s1 - pair.s2;
        d.tau = std::log((-pair.s2 - a) / (-pair.s1 - a)) / delta;
        d.kp = std::exp(d.tau * (pair.s1 + pair.s2)) / (d.tau * f1(d.tau, pair.s1, pair.s2));
    }
    return d;
}

ControllerDesign design_uncontrolled(double nu, double mu, double tau) {
    require_tau(tau);
    ControllerDesign d;
    d.kind = ControllerKind::P;
    d.nu = nu;
    d.mu = mu;
    d.plant_a = nu - mu;
    d.tau = tau;
    d.assigned_roots = RootPair{mu - nu, mu - nu};
    return d;
}

void attach_certificate(ControllerDesign& design, double im_limit) {
    design.certificate = certify_dominance(design.quasipoly(), design.s1(), im_limit);
}

WitnessBox icrrid_witness_box(double u) {
    if (!(u > 0.0) || !std::isfinite(u)) throw InvalidArgument("icrrid_witness_box: u must be positive");
    const double E = -std::expm1(-u);
    const double K = (1.0 + u) * E - u * std::exp(-u);
    WitnessBox box;
    box.A2 = E * u / (E + u);
    box.A3 = K / (2.0 * E);

    const double c2 = 4.0 * E * E;
    const double c1 = -4.0 * E * K + 8.0 * E * (E + u);
    const double c0 = K * K - 8.0 * E * E * u;
    const double disc = std::max(0.0, c1 * c1 - 4.0 * c2 * c0);
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    const double r1 = q / c2;
    const double r2 = (q != 0.0) ? c0 / q : r1;
    box.A1 = std::max(r1, r2);

    const double vb = (K - 2.0 * box.A2 * E) / (2.0 * E);
    box.v1 = std::min(0.0, vb);
    box.v2 = std::max(0.0, vb);
    return box;
}

}  // namespace nplace
