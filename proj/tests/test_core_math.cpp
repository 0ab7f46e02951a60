#include <doctest.h>

#include <cmath>

#include "nplace/core_math.hpp"
#include "nplace/errors.hpp"
#include "nplace/placement.hpp"
#include "oracles.hpp"

using namespace nplace;

namespace {

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

}  // namespace

TEST_SUITE("core_math") {
    TEST_CASE("eval_delta vanishes at an assigned root of the (-5,-6,-7) design") {
        const double tau = std::log(1.5);
        const double kd = std::pow(2.0 / 3.0, 6);
        const double kp = kd * (6.0 + 1.0 / std::tanh(tau / 2.0));
        const NeutralQuasiPoly qp{1.0, kd, kp, tau};
        CHECK(std::abs(eval_delta(qp, Complex{-5.0, 0.0})) < 1e-12 * 5.0);
    }

    TEST_CASE("eval_delta of the zero quasipolynomial at the origin") {
        CHECK(eval_delta(NeutralQuasiPoly{0, 0, 0, 1}, Complex{0, 0}) == Complex{0, 0});
    }

    TEST_CASE("eval_delta agrees with a 50-digit straight-line evaluation") {
        const NeutralQuasiPoly qp{2.0, 0.5, 1.0, 0.3};
        const Complex s{1.0, 2.0};
        const Complex ref = oracle::delta_mp(2.0, 0.5, 1.0, 0.3, s);
        CHECK(std::abs(eval_delta(qp, s) - ref) < 1e-14 * std::abs(ref));

        oracle::Rng rng(11);
        for (int i = 0; i < 200; ++i) {
            const NeutralQuasiPoly q{rng.uniform(-5, 5), rng.uniform(-2, 2), rng.uniform(-5, 5), rng.uniform(0.05, 3)};
            const Complex z{rng.uniform(-10, 5), rng.uniform(-40, 40)};
            const Complex r = oracle::delta_mp(q.a, q.alpha, q.beta, q.tau, z);
            CHECK(std::abs(eval_delta(q, z) - r) <= 1e-13 * delta_magnitude(q, z));
        }
    }

    TEST_CASE("eval_delta commutes with conjugation") {
        oracle::Rng rng(12);
        for (int i = 0; i < 200; ++i) {
            const NeutralQuasiPoly q{rng.uniform(-5, 5), rng.uniform(-2, 2), rng.uniform(-5, 5), rng.uniform(0.05, 3)};
            const Complex z{rng.uniform(-10, 5), rng.uniform(-40, 40)};
            CHECK(eval_delta(q, std::conj(z)) == std::conj(eval_delta(q, z)));
        }
    }

    TEST_CASE("eval_delta_deriv vanishes at a double root") {
        const double s1 = -2.0, a = 1.3, tau = 0.7;
        const NeutralQuasiPoly qp = assign_double(s1, a, tau);
        CHECK(std::abs(eval_delta(qp, Complex{s1, 0})) < 1e-13);
        CHECK(std::abs(eval_delta_deriv(qp, Complex{s1, 0})) < 1e-13);
    }

    TEST_CASE("eval_delta_deriv is identically one without delayed terms") {
        const NeutralQuasiPoly qp{3.0, 0.0, 0.0, 1.0};
        CHECK(eval_delta_deriv(qp, Complex{-4.0, 7.0}) == Complex{1.0, 0.0});
        CHECK(eval_delta_deriv(qp, Complex{2.0, -1.0}) == Complex{1.0, 0.0});
    }

    TEST_CASE("eval_delta_deriv matches a central difference") {
        oracle::Rng rng(13);
        const double h = 1e-6;
        for (int i = 0; i < 100; ++i) {
            const NeutralQuasiPoly q{rng.uniform(-3, 3), rng.uniform(-1, 1), rng.uniform(-3, 3), rng.uniform(0.1, 2)};
            const Complex z{rng.uniform(-3, 2), rng.uniform(-5, 5)};
            const Complex fd = (oracle::delta_mp(q.a, q.alpha, q.beta, q.tau, z + h) -
                                oracle::delta_mp(q.a, q.alpha, q.beta, q.tau, z - h)) /
                               (2.0 * h);
            CHECK(std::abs(eval_delta_deriv(q, z) - fd) < 1e-8 * (1.0 + std::abs(fd)));
        }
    }

    TEST_CASE("f1 removable limit and simple values") {
        CHECK(f1(1.0, 0.0, 0.0) == 1.0);
        for (double u : {-3.0, -0.5, 0.0, 2.0}) {
            for (double tau : {0.1, 1.0, 3.0}) CHECK(rel(f1(tau, u, u), std::exp(tau * u)) < 1e-15);
        }
    }

    TEST_CASE("f1 agrees with quadrature") {
        CHECK(rel(f1(0.5, -1.0, -3.0), oracle::f1_quad(0.5, -1.0, -3.0)) < 1e-12);
    }

    TEST_CASE("f2 on a coincident triple") {
        for (double s : {-4.0, 0.0, 1.5}) {
            for (double tau : {0.2, 1.0, 2.5}) CHECK(rel(f2(tau, s, s, s), std::exp(tau * s) / 2.0) < 1e-15);
        }
    }

    TEST_CASE("f2 agrees with 2-D quadrature") {
        CHECK(rel(f2(1.0, -1.0, -2.0, -3.0), oracle::f2_quad(1.0, -1.0, -2.0, -3.0)) < 1e-10);
    }

    TEST_CASE("f2 is exactly invariant under argument permutations") {
        CHECK(f2(1, -1, -2, -3) == f2(1, -2, -3, -1));
        CHECK(f2(1, -1, -2, -3) == f2(1, -3, -1, -2));
        CHECK(f2(1, -1, -2, -3) == f2(1, -2, -1, -3));
        oracle::Rng rng(14);
        for (int i = 0; i < 500; ++i) {
            const double t = rng.uniform(0.01, 5), a = rng.uniform(-5, 5), b = rng.uniform(-5, 5), c = rng.uniform(-5, 5);
            CHECK(f2(t, a, b, c) == f2(t, b, c, a));
            CHECK(f2(t, a, b, c) == f2(t, c, a, b));
        }
    }

    TEST_CASE("f1 and f2 are strictly positive") {
        oracle::Rng rng(15);
        for (int i = 0; i < 1000; ++i) {
            const double t = rng.uniform(1e-3, 10);
            const double a = rng.uniform(-20, 20), b = rng.uniform(-20, 20), c = rng.uniform(-20, 20);
            CHECK(f1(t, a, b) > 0.0);
            CHECK(f2(t, a, b, c) > 0.0);
        }
    }

    TEST_CASE("f1 and f2 match their oracles across the series crossover") {
        oracle::Rng rng(16);
        for (int i = 0; i < 300; ++i) {
            const double tau = rng.uniform(0.2, 3.0);
            const double gap = std::pow(10.0, rng.uniform(-8.0, 1.0)) / tau;  // tau*gap in [1e-8, 10]
            const double u = rng.uniform(-3, 1);
            CHECK(rel(f1(tau, u, u - gap), oracle::f1_quad(tau, u, u - gap)) < 1e-10);
            const double g2 = std::pow(10.0, rng.uniform(-8.0, 1.0)) / tau;
            const double w = rng.uniform(0.05, 0.95);
            const double s1 = u, s3 = u - g2, s2 = s3 + w * g2;
            if (!(s3 < s2 && s2 < s1)) continue;
            CHECK(rel(f2(tau, s1, s2, s3), oracle::f2_quad(tau, s1, s2, s3)) < 1e-10);
            CHECK(rel(f2(tau, s1, s2, s3), oracle::f2_mp(tau, s1, s2, s3)) < 1e-12);
        }
    }

    TEST_CASE("coth uses a stable expansion near zero") {
        CHECK(rel(coth(1e-6), 1e6 + 1e-6 / 3.0) < 1e-15);
        CHECK(rel(coth(0.7), 1.0 / std::tanh(0.7)) < 1e-15);
        CHECK(coth(-2.0) == doctest::Approx(-1.0 / std::tanh(2.0)).epsilon(1e-15));
    }

    TEST_CASE("fvl_V vanishes without delayed terms") {
        CHECK(fvl_V(NeutralQuasiPoly{3.0, 0.0, 0.0, 1.0}, -3.0) == 0.0);
    }

    TEST_CASE("fvl_V is inconclusive on the (-5,-6,-7) design") {
        const NeutralQuasiPoly qp = assign_three(RootTriple{-5, -6, -7}, std::log(1.5));
        const double v = fvl_V(qp, -5.0);
        CHECK(v >= 1.0);
        CHECK(v == doctest::Approx(4.99).epsilon(0.01));
    }

    TEST_CASE("fvl_V equals gcrrid_W on equidistributed designs") {
        oracle::Rng rng(17);
        for (int i = 0; i < 200; ++i) {
            const double s1 = rng.uniform(-10.0, 0.0), d = rng.uniform(0.05, 3.0), tau = rng.uniform(0.05, 2.0);
            const NeutralQuasiPoly qp = assign_three(RootTriple{s1, s1 - d, s1 - 2 * d}, tau);
            CHECK(rel(fvl_V(qp, s1), gcrrid_W(tau * d, tau * s1)) < 1e-12);
            CHECK(gcrrid_W_natural(tau, d, s1) == gcrrid_W(tau * d, tau * s1));
        }
    }

    TEST_CASE("gcrrid_W on its boundary and in the small-u limit") {
        for (double u : {0.5, 1.0, 2.0}) CHECK(std::abs(gcrrid_W(u, gcrrid_v_boundary(u)) - 1.0) < 1e-10);
        CHECK(gcrrid_W(1e-9, -1.0) == doctest::Approx(5.0).epsilon(1e-8));
        CHECK(gcrrid_W(1e-9, 0.25) == doctest::Approx(2.5).epsilon(1e-8));
        CHECK_THROWS_AS((void)gcrrid_W(0.0, 1.0), InvalidArgument);
    }

    TEST_CASE("gcrrid_W matches a direct V computation") {
        const NeutralQuasiPoly qp = assign_three(RootTriple{-1, -2, -3}, 1.0);
        CHECK(rel(gcrrid_W(1.0, -1.0), fvl_V(qp, -1.0)) < 1e-12);
    }

    TEST_CASE("gcrrid_v_boundary values and monotonicity") {
        CHECK(gcrrid_v_boundary(1e-9) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(gcrrid_v_boundary(1.0) == doctest::Approx((1.0 / std::tanh(0.5) + 2.0 - std::exp(1.0)) / 2.0).epsilon(1e-14));
        CHECK(gcrrid_v_boundary(1.0) == doctest::Approx(0.723).epsilon(1e-3));
        CHECK(gcrrid_v_boundary(10.0) < 0.0);
        double prev = gcrrid_v_boundary(1e-3);
        for (int i = 2; i <= 20000; ++i) {
            const double v = gcrrid_v_boundary(1e-3 * i);
            CHECK_MESSAGE(v < prev, "u = " << 1e-3 * i);
            prev = v;
        }
    }

    TEST_CASE("icrrid_Z is at least one between the roots of its numerator across [A1, A2]") {
        for (double u : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const WitnessBox box = icrrid_witness_box(u);
            CHECK(box.A1 <= box.A2);
            CHECK(box.A2 <= box.A3);
            const double em = 1.0 - std::exp(-u);
            for (int i = 0; i <= 10; ++i) {
                const double A = box.A1 + (box.A2 - box.A1) * i / 10.0;
                // roots in v of the numerator of Z - 1 at this A
                const double ca = -2.0 * em;
                const double cb = -2.0 * em * A + (1.0 + u) * em - u * std::exp(-u);
                const double cc = (em + u) * A - em * u;
                const double disc = std::max(0.0, cb * cb - 4.0 * ca * cc);
                const double lo = (-cb + std::sqrt(disc)) / (2.0 * ca);
                const double hi = (-cb - std::sqrt(disc)) / (2.0 * ca);
                // both roots are positive below A2, so only the corner A = A2 reaches v <= 0
                if (i < 10) CHECK(lo > 0.0);
                if (i == 10) CHECK(std::abs(lo) < 1e-12);
                for (int j = 0; j <= 10; ++j) {
                    const double v = lo + (hi - lo) * j / 10.0;
                    const double z = icrrid_Z(A, u, v);
                    INFO("u = " << u << " A = " << A << " v = " << v);
                    CHECK(z >= 1.0 - 1e-9);
                    CHECK(std::abs((z - 1.0) * u - (ca * v * v + cb * v + cc)) < 1e-10 * (1.0 + std::abs(z) * u));
                }
            }
        }
    }

    TEST_CASE("icrrid_Z scaled identity at A2 and v2") {
        for (double u : {0.1, 0.5, 1.0, 2.0, 5.0}) {
            const WitnessBox box = icrrid_witness_box(u);
            const double ratio = (box.A2 + box.v2) / u;
            const double ref = 0.5 * ((2.0 - std::exp(u)) / (1.0 - std::exp(u)) + 1.0 / u);
            CHECK(rel(ratio, ref) < 1e-12);
            CHECK(ratio >= 0.5 - 1e-12);
            CHECK(ratio <= 0.75 + 1e-12);
            CHECK(std::abs(icrrid_Z(box.A2, u, box.v2) - 1.0) < 1e-12);
            CHECK(std::abs(icrrid_Z(box.A2, u, box.v1) - 1.0) < 1e-12);
        }
    }

    TEST_CASE("icrrid_Z equals V of the two-root design at s1") {
        oracle::Rng rng(18);
        for (int i = 0; i < 20; ++i) {
            const double tau = rng.uniform(0.2, 2.0), delta = rng.uniform(0.2, 2.0), s1 = rng.uniform(-3.0, 0.0);
            const double lambda3 = rng.uniform(0.01, 0.99);
            const double a = lambda3 * delta - s1;
            const NeutralQuasiPoly qp = assign_two_exact(RootPair{s1, s1 - delta}, a, tau);
            CHECK(rel(icrrid_Z_natural(tau, a, delta, s1), fvl_V(qp, s1)) < 1e-11);
            CHECK(icrrid_Z(ScaledParams{tau * delta, tau * s1, tau * a}) == icrrid_Z(tau * a, tau * delta, tau * s1));
        }
    }
}
