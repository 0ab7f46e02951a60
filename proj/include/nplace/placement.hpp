#pragma once

// Closed-form partial pole placement for the scalar neutral quasipolynomial:
// coefficient assignment from prescribed real roots, delay solving, region
// classification for two-root designs, remaining-spectrum characterisation,
// controller synthesis and exponential-estimate constants.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nplace/core_math.hpp"
#include "nplace/spectrum.hpp"

namespace nplace {

/// Three prescribed real roots s3 < s2 < s1.
struct RootTriple {
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;

    [[nodiscard]] double d() const { return s1 - s2; }
    [[nodiscard]] double delta() const { return s1 - s3; }
    [[nodiscard]] bool equidistributed() const;
};

/// Two prescribed real roots s2 < s1 (s2 == s1 only for the multiplicity entry points).
struct RootPair {
    double s1 = 0.0;
    double s2 = 0.0;

    [[nodiscard]] double delta() const { return s1 - s2; }
    [[nodiscard]] bool coincident() const { return s1 == s2; }
};

using AssignedRoots = std::variant<RootTriple, RootPair>;

/// Throws InvalidArgument unless s3 < s2 < s1, all finite.
void validate(const RootTriple& roots);
/// Throws InvalidArgument unless s2 < s1 (or s2 == s1 when allow_coincident), all finite.
void validate(const RootPair& pair, bool allow_coincident = false);

enum class Region { R1, R2, R3, R4, R5 };

[[nodiscard]] const char* to_string(Region r);

/// Location of (a, tau) relative to the boundaries phi1 < phi2 < phi3 of a two-root design.
struct RegionLabel {
    Region region = Region::R4;
    std::optional<double> x;          ///< coexisting third real root (R1, R2, R3)
    double lambda3 = 0.0;             ///< (a + s1) / (s1 - s2)
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
    bool on_boundary = false;         ///< lambda3 within 1e-12 of a boundary
    std::optional<Region> adjacent;   ///< the other label at a boundary tie
};

/// The three region boundaries as functions of x = tau * (s1 - s2) > 0.
struct PhiBoundaries {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
};
[[nodiscard]] PhiBoundaries phi_boundaries(double x);

enum class ImidVerdict { strictly_dominant, dominant_not_strict, not_dominant };

[[nodiscard]] const char* to_string(ImidVerdict v);

enum class ControllerKind { P, PD };

[[nodiscard]] const char* to_string(ControllerKind k);

struct ControllerDesign {
    ControllerKind kind = ControllerKind::PD;
    double kp = 0.0;      ///< k_p (PD) or k_p' (P)
    double kd = 0.0;      ///< 0 for P designs
    double tau = 0.0;
    double plant_a = 0.0; ///< nu - mu
    double nu = 0.0;
    double mu = 0.0;
    AssignedRoots assigned_roots;
    int n_brackets = 1;   ///< number of delay solutions detected while solving a(tau) = plant_a
    std::optional<DominanceCertificate> certificate;

    [[nodiscard]] NeutralQuasiPoly quasipoly() const { return {plant_a, kd, kp, tau}; }
    [[nodiscard]] double s1() const;
};

struct SpectrumCharacterization {
    bool on_axis = false;
    double axis_re = 0.0;
    double theta = 0.0;
    double xi = 0.0;
    std::vector<double> omegas;  ///< scaled imaginary parts (tau * Im), one per branch
    std::vector<Complex> roots;  ///< corresponding roots in the upper half plane
    std::string note;            ///< non-empty for special cases
};

struct ExpEstimate {
    double epsilon = 0.0;
    double k = 1.0;
    double k0 = 0.0;
    double rate = 0.0;   ///< s1 + epsilon
    double T_cut = 0.0;
};

struct WitnessBox {
    double A1 = 0.0;
    double A2 = 0.0;
    double A3 = 0.0;
    double v1 = 0.0;
    double v2 = 0.0;
};

struct TauSolution {
    double tau = 0.0;
    int n_brackets = 0;
};

/// Coefficients (a, alpha, beta) placing s1, s2, s3 as roots for the given delay.
[[nodiscard]] NeutralQuasiPoly assign_three(const RootTriple& roots, double tau);

/// The instantaneous coefficient a(tau) of assign_three.
[[nodiscard]] double coefficient_a(const RootTriple& roots, double tau);

/// (alpha, beta) placing s1 and s2 as roots for a prescribed a.
[[nodiscard]] NeutralQuasiPoly assign_two_exact(const RootPair& pair, double a, double tau);

/// (alpha, beta) making s1 a root of multiplicity two for a prescribed a.
[[nodiscard]] NeutralQuasiPoly assign_double(double s1, double a, double tau);

[[nodiscard]] RegionLabel classify_two_root(const RootPair& pair, double a, double tau);

[[nodiscard]] ImidVerdict imid_check(double s1, double a, double tau);

/// Delay with a(tau) = 0. Throws InvalidArgument when s1 >= 0.
[[nodiscard]] double tau_star_three(const RootTriple& roots);

/// Smallest tau > 0 with a(tau) = a_target. Throws UnreachableRate when a_target >= -s1.
[[nodiscard]] double solve_tau_for_a(const RootTriple& roots, double a_target);

/// Numeric path of solve_tau_for_a (log-grid bracket scan then bisection), with the bracket count.
[[nodiscard]] TauSolution solve_tau_numeric(const RootTriple& roots, double a_target);

[[nodiscard]] ControllerDesign design_pd(double nu, double mu, const RootTriple& roots);
[[nodiscard]] ControllerDesign design_p(double nu, double mu, const RootPair& pair);

/// Design for the open-loop plant (no feedback); the delay is only used by the simulator.
[[nodiscard]] ControllerDesign design_uncontrolled(double nu, double mu, double tau);

/// Certify the dominance of the design's largest assigned root and store the certificate.
void attach_certificate(ControllerDesign& design, double im_limit);

/// Delay with a(tau) = 0 for the delayed P controller. Throws InvalidArgument when s1 >= 0.
[[nodiscard]] double tau_star_pair(const RootPair& pair);

[[nodiscard]] SpectrumCharacterization remaining_spectrum_three(const RootTriple& roots, double tau, int n_branches);
[[nodiscard]] SpectrumCharacterization remaining_spectrum_two(const RootPair& pair, double a, double tau,
                                                              int n_branches);

[[nodiscard]] ExpEstimate exp_estimate(const NeutralQuasiPoly& design, const RootTriple& roots, double epsilon);
[[nodiscard]] ExpEstimate exp_estimate(const NeutralQuasiPoly& design, const RootPair& roots, double epsilon);
[[nodiscard]] ExpEstimate exp_estimate(const NeutralQuasiPoly& design, const AssignedRoots& roots, double epsilon);

[[nodiscard]] WitnessBox icrrid_witness_box(double u);

}  // namespace nplace
