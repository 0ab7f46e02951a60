#pragma once

// Root localisation for the neutral quasipolynomial: argument-principle
// counting, quadrisection + Newton root finding, and dominance certificates.

#include <vector>

#include "nplace/core_math.hpp"

namespace nplace {

/// Axis-aligned search window in the complex plane.
struct Rectangle {
    double re_min = 0.0;
    double re_max = 0.0;
    double im_min = 0.0;
    double im_max = 0.0;

    [[nodiscard]] bool contains(Complex z) const {
        return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
    }
    [[nodiscard]] bool conjugate_symmetric() const { return im_min == -im_max; }
};

/// Throws InvalidArgument unless the rectangle is finite and non-degenerate.
void validate(const Rectangle& rect);

struct SpectrumReport {
    std::vector<Complex> roots;     ///< sorted by (re desc, im asc); multiple roots are repeated
    std::vector<double> residuals;  ///< |Delta(root)|
    Rectangle window;               ///< window actually used (after any boundary dilation)
    int count_by_argument_principle = 0;
    double chain_abscissa = 0.0;    ///< ln|alpha|/tau, or -inf for retarded quasipolynomials
};

enum class Verdict { certified_strict, certified_boundary, refuted };

[[nodiscard]] const char* to_string(Verdict v);

struct DominanceCertificate {
    double s1 = 0.0;
    Rectangle window;
    double chain_abscissa = 0.0;
    Verdict verdict = Verdict::refuted;
    std::vector<Complex> witnesses;
    /// True when every root right of s1 is provably inside the searched window,
    /// which makes the verdict a half-plane statement rather than a window statement.
    bool half_plane_covered = false;
};

/// ln|alpha|/tau: the vertical line the neutral root chain approaches.
[[nodiscard]] double chain_abscissa(const NeutralQuasiPoly& qp);

/// 20 pi / tau.
[[nodiscard]] double default_im_limit(double tau);

/// Number of roots (with multiplicity) inside rect by the argument principle.
/// Throws SolverError("root on boundary") when dilation retries are exhausted.
[[nodiscard]] int count_roots(const NeutralQuasiPoly& qp, const Rectangle& rect);

/// Locate every root in rect. Throws SolverError on depth exhaustion.
[[nodiscard]] SpectrumReport find_roots(const NeutralQuasiPoly& qp, const Rectangle& rect);

/// Newton iteration on Delta from z0; returns the final iterate.
[[nodiscard]] Complex newton_polish(const NeutralQuasiPoly& qp, Complex z0, int max_iter = 60);

[[nodiscard]] DominanceCertificate certify_dominance(const NeutralQuasiPoly& qp, double s1, double im_limit);

/// Window-limited estimate of the spectral abscissa.
[[nodiscard]] double spectral_abscissa(const NeutralQuasiPoly& qp, double im_limit);

}  // namespace nplace
