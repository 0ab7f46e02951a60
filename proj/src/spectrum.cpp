#include "nplace/spectrum.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "nplace/errors.hpp"

namespace nplace {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double max_phase_step = pi / 4.0;
constexpr double linearity = 0.3;
constexpr double boundary_rel = 1e-14;
constexpr double dilation = 1e-6;
constexpr int max_dilations = 5;
constexpr int max_depth = 80;

struct PhaseWalker {
    const NeutralQuasiPoly& qp;
    bool hit = false;

    bool near_zero(Complex z, Complex f) const { return std::abs(f) <= boundary_rel * delta_magnitude(qp, z); }

    double segment(Complex a, Complex fa, Complex b, Complex fb, int depth) {
        if (hit) return 0.0;
        const Complex m = 0.5 * (a + b);
        const Complex fm = eval_delta(qp, m);
        if (near_zero(m, fm)) {
            hit = true;
            return 0.0;
        }
        const double d1 = std::arg(fm / fa);
        const double d2 = std::arg(fb / fm);
        const double d = std::arg(fb / fa);
        const double bend = std::abs(fm - 0.5 * (fa + fb));
        const double floor = linearity * std::min({std::abs(fa), std::abs(fm), std::abs(fb)});
        if (std::abs(d1) < max_phase_step && std::abs(d2) < max_phase_step && std::abs(d1 + d2 - d) < 1e-9 &&
            bend <= floor) {
            return d1 + d2;
        }
        if (depth >= 64 || std::abs(b - a) < 1e-13 * (1.0 + std::abs(a))) {
            hit = true;
            return 0.0;
        }
        return segment(a, fa, m, fm, depth + 1) + segment(m, fm, b, fb, depth + 1);
    }

    double edge(Complex za, Complex zb) {
        const double len = std::abs(zb - za);
        const double max_seg = std::min(0.2 / qp.tau, len / 16.0);
        const int n = std::max(16, static_cast<int>(std::ceil(len / max_seg)));
        double total = 0.0;
        Complex prev = za;
        Complex fprev = eval_delta(qp, za);
        if (near_zero(za, fprev)) {
            hit = true;
            return 0.0;
        }
        for (int i = 1; i <= n && !hit; ++i) {
            const Complex z = (i == n) ? zb : za + (zb - za) * (static_cast<double>(i) / n);
            const Complex f = eval_delta(qp, z);
            if (near_zero(z, f)) {
                hit = true;
                return 0.0;
            }
            total += segment(prev, fprev, z, f, 0);
            prev = z;
            fprev = f;
        }
        return total;
    }
};

std::optional<int> try_count(const NeutralQuasiPoly& qp, const Rectangle& r) {
    PhaseWalker w{qp};
    const Complex c0{r.re_min, r.im_min}, c1{r.re_max, r.im_min}, c2{r.re_max, r.im_max}, c3{r.re_min, r.im_max};
    double total = w.edge(c0, c1);
    if (!w.hit) total += w.edge(c1, c2);
    if (!w.hit) total += w.edge(c2, c3);
    if (!w.hit) total += w.edge(c3, c0);
    if (w.hit) return std::nullopt;
    const double turns = total / (2.0 * pi);
    const double n = std::round(turns);
    if (std::abs(turns - n) > 0.05 || n < 0) return std::nullopt;
    return static_cast<int>(n);
}

Rectangle dilate(const Rectangle& r, double by) {
    return {r.re_min - by, r.re_max + by, r.im_min - by, r.im_max + by};
}

struct NewtonResult {
    Complex z;
    bool converged = false;
};

NewtonResult newton(const NeutralQuasiPoly& qp, Complex z, int max_iter) {
    for (int it = 0; it < max_iter; ++it) {
        const Complex f = eval_delta(qp, z);
        if (std::abs(f) <= 1e-15 * delta_magnitude(qp, z)) return {z, true};
        const Complex df = eval_delta_deriv(qp, z);
        if (df == Complex{0.0, 0.0} || !std::isfinite(std::abs(df))) return {z, false};
        const Complex step = f / df;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return {z, false};
        if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) {
            return {z, std::abs(eval_delta(qp, z)) <= 1e-10 * delta_magnitude(qp, z)};
        }
    }
    return {z, std::abs(eval_delta(qp, z)) <= 1e-10 * delta_magnitude(qp, z)};
}

struct Found {
    Complex z;
    bool cluster = false;
};

class Subdivider {
public:
    Subdivider(const NeutralQuasiPoly& qp, std::vector<Found>& out) : qp_(qp), out_(out) {}

    void run(const Rectangle& cell, int n, int depth) {
        if (n == 0) return;
        const double w = cell.re_max - cell.re_min;
        const double h = cell.im_max - cell.im_min;
        const double diam = std::hypot(w, h);
        const Complex centre{cell.re_min + 0.5 * w, cell.im_min + 0.5 * h};
        const double slack = 1e-12 * (1.0 + std::abs(centre));
        if (n == 1) {
            const NewtonResult nr = newton(qp_, centre, 60);
            if (nr.converged && dilate(cell, slack).contains(nr.z)) {
                out_.push_back({nr.z, false});
                return;
            }
            if (diam < 1e-8) {
                out_.push_back({nr.converged ? nr.z : centre, false});
                return;
            }
        } else if (diam < 1e-8) {
            const NewtonResult nr = newton(qp_, centre, 60);
            const Complex z = (nr.converged && std::abs(nr.z - centre) < diam) ? nr.z : centre;
            for (int i = 0; i < n; ++i) out_.push_back({z, true});
            return;
        }
        if (depth >= max_depth) {
            throw SolverError("max subdivision depth exceeded in cell [" + std::to_string(cell.re_min) + ", " +
                              std::to_string(cell.re_max) + "] x [" + std::to_string(cell.im_min) + ", " +
                              std::to_string(cell.im_max) + "]");
        }
        static constexpr std::array<double, 6> ratios{0.5371, 0.4623, 0.5871, 0.4137, 0.5113, 0.6329};
        for (std::size_t k = 0; k < ratios.size(); ++k) {
            const double rx = ratios[k];
            const double ry = ratios[(k + 3) % ratios.size()];
            const double xs = cell.re_min + w * rx;
            const double ys = cell.im_min + h * ry;
            const std::array<Rectangle, 4> sub{Rectangle{cell.re_min, xs, cell.im_min, ys},
                                               Rectangle{xs, cell.re_max, cell.im_min, ys},
                                               Rectangle{cell.re_min, xs, ys, cell.im_max},
                                               Rectangle{xs, cell.re_max, ys, cell.im_max}};
            std::array<int, 4> counts{};
            bool ok = true;
            int sum = 0;
            for (std::size_t i = 0; i < 4 && ok; ++i) {
                const auto c = try_count(qp_, sub[i]);
                if (!c) {
                    ok = false;
                } else {
                    counts[i] = *c;
                    sum += *c;
                }
            }
            if (!ok || sum != n) continue;
            for (std::size_t i = 0; i < 4; ++i) run(sub[i], counts[i], depth + 1);
            return;
        }
        const bool wide = w >= h;
        for (double r : ratios) {
            const std::array<Rectangle, 2> sub =
                wide ? std::array<Rectangle, 2>{Rectangle{cell.re_min, cell.re_min + w * r, cell.im_min, cell.im_max},
                                                Rectangle{cell.re_min + w * r, cell.re_max, cell.im_min, cell.im_max}}
                     : std::array<Rectangle, 2>{Rectangle{cell.re_min, cell.re_max, cell.im_min, cell.im_min + h * r},
                                                Rectangle{cell.re_min, cell.re_max, cell.im_min + h * r, cell.im_max}};
            const auto c0 = try_count(qp_, sub[0]);
            const auto c1 = c0 ? try_count(qp_, sub[1]) : std::nullopt;
            if (!c0 || !c1 || *c0 + *c1 != n) continue;
            run(sub[0], *c0, depth + 1);
            run(sub[1], *c1, depth + 1);
            return;
        }
        if (n >= 2 && diam < 1e-5 * (1.0 + std::abs(centre))) {
            const NewtonResult nr = newton(qp_, centre, 200);
            const Complex z = (nr.converged && dilate(cell, slack).contains(nr.z)) ? nr.z : centre;
            for (int i = 0; i < n; ++i) out_.push_back({z, true});
            return;
        }
        throw SolverError("could not split cell without hitting a root on a cell edge");
    }

private:
    const NeutralQuasiPoly& qp_;
    std::vector<Found>& out_;
};

void polish_real(const NeutralQuasiPoly& qp, Complex& z) {
    double t = z.real();
    for (int it = 0; it < 40; ++it) {
        const double f = eval_delta_real(qp, t);
        const double df = eval_delta_deriv(qp, Complex{t, 0.0}).real();
        if (df == 0.0) break;
        const double step = f / df;
        t -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(t))) break;
    }
    const Complex zr{t, 0.0};
    if (std::abs(eval_delta(qp, zr)) <= std::max(std::abs(eval_delta(qp, z)), 1e-13 * delta_magnitude(qp, zr))) {
        z = zr;
    }
}

void sort_roots(std::vector<Complex>& roots) {
    std::sort(roots.begin(), roots.end(), [](Complex x, Complex y) {
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() < y.imag();
    });
}

std::vector<Complex> chain_seed_witnesses(const NeutralQuasiPoly& qp, double s1, double im_limit) {
    std::vector<Complex> out;
    if (qp.alpha == 0.0) return out;
    const double re = std::log(std::abs(qp.alpha)) / qp.tau;
    const double offset = qp.alpha > 0.0 ? pi : 0.0;
    for (int k = 1; k < 4000 && out.empty(); ++k) {
        const double im = (2.0 * pi * k + offset) / qp.tau;
        const NewtonResult nr = newton(qp, Complex{re, im}, 80);
        if (nr.converged && nr.z.real() > s1 + 1e-9) {
            out.push_back(nr.z);
            out.push_back(std::conj(nr.z));
        }
        if (im > 1e3 * im_limit) break;
    }
    return out;
}

}  // namespace

void validate(const Rectangle& rect) {
    const bool finite = std::isfinite(rect.re_min) && std::isfinite(rect.re_max) && std::isfinite(rect.im_min) &&
                        std::isfinite(rect.im_max);
    if (!finite || !(rect.re_min < rect.re_max) || !(rect.im_min < rect.im_max)) {
        throw InvalidArgument("window must satisfy re_min < re_max and im_min < im_max");
    }
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::certified_strict: return "certified_strict";
        case Verdict::certified_boundary: return "certified_boundary";
        case Verdict::refuted: return "refuted";
    }
    return "unknown";
}

double chain_abscissa(const NeutralQuasiPoly& qp) {
    if (qp.alpha == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(qp.alpha)) / qp.tau;
}

double default_im_limit(double tau) { return 20.0 * pi / tau; }

int count_roots(const NeutralQuasiPoly& qp, const Rectangle& rect) {
    validate(qp);
    validate(rect);
    for (int attempt = 0; attempt <= max_dilations; ++attempt) {
        if (auto n = try_count(qp, dilate(rect, attempt * dilation))) return *n;
    }
    throw SolverError("root on boundary");
}

Complex newton_polish(const NeutralQuasiPoly& qp, Complex z0, int max_iter) { return newton(qp, z0, max_iter).z; }

SpectrumReport find_roots(const NeutralQuasiPoly& qp, const Rectangle& rect) {
    validate(qp);
    validate(rect);
    Rectangle window = rect;
    std::optional<int> n;
    for (int attempt = 0; attempt <= max_dilations && !n; ++attempt) {
        window = dilate(rect, attempt * dilation);
        n = try_count(qp, window);
    }
    if (!n) throw SolverError("root on boundary");

    std::vector<Found> found;
    Subdivider(qp, found).run(window, *n, 0);

    std::vector<Found> kept;
    for (const Found& f : found) {
        const bool dup = !f.cluster && std::any_of(kept.begin(), kept.end(), [&](const Found& k) {
            return !k.cluster && std::abs(k.z - f.z) < 1e-7;
        });
        if (!dup) kept.push_back(f);
    }

    std::vector<Complex> roots;
    roots.reserve(kept.size());
    for (Found& f : kept) {
        if (std::abs(f.z.imag()) < 1e-7 * (1.0 + std::abs(f.z.real())) && window.contains({f.z.real(), 0.0})) {
            polish_real(qp, f.z);
        }
        roots.push_back(f.z);
    }
    if (window.conjugate_symmetric()) {
        std::vector<bool> paired(roots.size(), false);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            if (paired[i] || roots[i].imag() <= 0.0) continue;
            std::size_t best = roots.size();
            double best_d = 1e-6 * (1.0 + std::abs(roots[i]));
            for (std::size_t j = 0; j < roots.size(); ++j) {
                if (j == i || paired[j] || roots[j].imag() >= 0.0) continue;
                const double d = std::abs(roots[j] - std::conj(roots[i]));
                if (d < best_d) {
                    best_d = d;
                    best = j;
                }
            }
            if (best < roots.size()) {
                roots[best] = std::conj(roots[i]);
                paired[i] = paired[best] = true;
            }
        }
    }
    sort_roots(roots);

    SpectrumReport rep;
    rep.window = window;
    rep.count_by_argument_principle = *n;
    rep.chain_abscissa = chain_abscissa(qp);
    rep.residuals.reserve(roots.size());
    for (Complex z : roots) rep.residuals.push_back(std::abs(eval_delta(qp, z)));
    rep.roots = std::move(roots);
    return rep;
}

DominanceCertificate certify_dominance(const NeutralQuasiPoly& qp, double s1, double im_limit) {
    validate(qp);
    if (!std::isfinite(s1)) throw InvalidArgument("s1 must be finite");
    if (!(im_limit >= 4.0 * pi / qp.tau * (1.0 - 1e-12))) {
        throw InvalidArgument("im_limit must be at least 4 pi / tau");
    }
    DominanceCertificate cert;
    cert.s1 = s1;
    cert.chain_abscissa = chain_abscissa(qp);

    double re_max = s1 + std::max(5.0, 10.0 / qp.tau);
    const double decay = std::abs(qp.alpha) * std::exp(-qp.tau * s1);
    double bound = std::numeric_limits<double>::infinity();
    if (decay < 1.0) {
        bound = (std::abs(qp.a) + std::abs(qp.beta) * std::exp(-qp.tau * s1)) / (1.0 - decay);
        if (std::isfinite(bound) && bound + 1.0 > re_max && bound < 1e4) re_max = bound + 1.0;
    }
    const double below = std::min(0.25 / qp.tau, 0.1 * im_limit);
    cert.window = Rectangle{s1 + 1e-9, re_max, -below, im_limit};
    cert.half_plane_covered = std::isfinite(bound) && bound < im_limit && bound < re_max;

    const SpectrumReport rep = find_roots(qp, cert.window);
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        const Complex z = rep.roots[i];
        if (z.real() > s1 + 1e-9 && rep.residuals[i] < 1e-9 * (1.0 + std::abs(z))) cert.witnesses.push_back(z);
    }
    if (!cert.witnesses.empty()) {
        cert.verdict = Verdict::refuted;
        return cert;
    }
    if (cert.chain_abscissa < s1 - 1e-9) {
        cert.verdict = Verdict::certified_strict;
        return cert;
    }
    if (cert.chain_abscissa <= s1 + 1e-9) {
        cert.verdict = Verdict::certified_boundary;
        const Rectangle strip{s1 - 1e-6, s1 + 1e-9, 0.5 / qp.tau, im_limit};
        const SpectrumReport edge = find_roots(qp, strip);
        for (Complex z : edge.roots) {
            cert.witnesses.push_back(z);
            cert.witnesses.push_back(std::conj(z));
        }
        sort_roots(cert.witnesses);
        cert.half_plane_covered = false;
        return cert;
    }
    cert.verdict = Verdict::refuted;
    cert.witnesses = chain_seed_witnesses(qp, s1, im_limit);
    sort_roots(cert.witnesses);
    return cert;
}

double spectral_abscissa(const NeutralQuasiPoly& qp, double im_limit) {
    validate(qp);
    if (!(im_limit >= 4.0 * pi / qp.tau * (1.0 - 1e-12))) {
        throw InvalidArgument("im_limit must be at least 4 pi / tau");
    }
    const double below = std::min(0.25 / qp.tau, 0.1 * im_limit);
    const Rectangle window{-50.0 / qp.tau, 50.0 / qp.tau, -below, im_limit};
    const SpectrumReport rep = find_roots(qp, window);
    double best = chain_abscissa(qp);
    for (Complex z : rep.roots) best = std::max(best, z.real());
    return best;
}

}  // namespace nplace
