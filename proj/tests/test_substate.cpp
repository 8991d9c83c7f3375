// Substate constructions: classical Good/Bad, pure-state two-dimensional
// construction, lifting step, saddle extension, and the assembled pipeline.
//
// Frozen example (worked by hand):
//   P = (0.4, 0.4, 0.2), Q = (0.01, 0.5, 0.49), r = 2, k = 1:
//     threshold 2^{rk} = 4, Good = {1, 2} (0.4/4 = 0.1 > 0.01 expels index 0),
//     bad mass 0.4, P' = (0, 2/3, 1/3), ||P - P'||_1 = 0.8,
//     alpha = (r-1)/(r 2^{rk}) = 1/8.

#include "doctest.h"

#include "qslab/divergence.hpp"
#include "qslab/linalg.hpp"
#include "qslab/qstate.hpp"
#include "qslab/rng.hpp"
#include "qslab/substate.hpp"

#include <cmath>

using namespace qslab;

namespace {

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

PureState plus() {
    Vec v(2);
    v << std::sqrt(0.5), std::sqrt(0.5);
    return PureState(v);
}

LiftingParams light_params() {
    LiftingParams prm = LiftingParams::defaults_for(1.0);
    prm.l = 2;
    prm.game_iters = 200;
    return prm;
}

} // namespace

TEST_CASE("classical substate: frozen worked example") {
    std::vector<double> p = {0.4, 0.4, 0.2}, q = {0.01, 0.5, 0.49};
    ClassicalSubstateResult res = classical_substate(p, q, 2.0, 1.0);
    CHECK(res.threshold == doctest::Approx(4.0).epsilon(1e-15));
    REQUIRE(res.good == std::vector<int>{1, 2});
    CHECK(res.bad_mass == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(res.p_prime[0] == doctest::Approx(0.0));
    CHECK(res.p_prime[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(res.p_prime[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(res.l1_dist == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(res.alpha == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(res.guarantees_hold);
    // Q decomposes as alpha P' + (1 - alpha) P'' with P'' the witness
    for (size_t i = 0; i < q.size(); ++i) {
        CHECK(std::abs(res.alpha * res.p_prime[i] + (1 - res.alpha) * res.witness[i] - q[i]) <
              1e-12);
        CHECK(res.witness[i] >= -1e-12);
    }
}

TEST_CASE("classical substate: guarantees hold whenever k >= D(P||Q)") {
    Rng rng(21);
    for (int t = 0; t < 200; ++t) {
        int n = rng.uniform_int(2, 10);
        std::vector<double> p = rng.distribution(n), q = rng.distribution(n);
        double k = obs_divergence_classical(p, q).value;
        for (double r : {1.5, 2.0, 4.0, 10.0}) {
            ClassicalSubstateResult res = classical_substate(p, q, r, k);
            CHECK(res.guarantees_hold);
            CHECK(res.l1_dist <= 2.0 / r + 1e-12);
            CHECK(res.bad_mass <= 1.0 / r + 1e-12);
            for (size_t i = 0; i < q.size(); ++i)
                CHECK(res.alpha * res.p_prime[i] <= q[i] + 1e-12);
        }
    }
    // Result-2' parameterization: k = S(P||Q) + 1
    std::vector<double> p = {0.6, 0.3, 0.1}, q = {0.2, 0.5, 0.3};
    CHECK(result2prime_k(p, q) == doctest::Approx(relative_entropy(p, q) + 1.0).epsilon(1e-14));
}

TEST_CASE("pure substate: trivial branch when the scaled state already fits") {
    PureState zero{[] { Vec v(2); v << 1, 0; return v; }()};
    PureSubstateResult res = pure_substate(zero, Mat::Identity(2, 2) * 0.5, 2.0, 1.0);
    CHECK(res.trivial);
    CHECK(res.distance == doctest::Approx(0.0));
    CHECK(res.overlap_sq == doctest::Approx(1.0));
    CHECK(substate_check(res.phi.density().m, Mat::Identity(2, 2) * 0.5, res.alpha));
}

TEST_CASE("pure substate: two-dimensional construction and block identities") {
    // force the non-trivial branch with a small k
    PureState psi = plus();
    Mat sigma = diag2(0.999, 0.001);
    double rk = 2.0 * 2.0; // r = 2, k = 2
    PureSubstateResult res = pure_substate(psi, sigma, 2.0, 2.0);
    REQUIRE_FALSE(res.trivial);
    // exact domination claim: phi phi^dag / 2^{rk} <= sigma regardless of k
    CHECK(substate_margin(res.phi.density().m, sigma, std::pow(2.0, -rk)) >= -1e-10);
    CHECK(substate_margin(res.phi.density().m, sigma, res.alpha) >= -1e-10);
    // block identities of the construction:  x + z = 2^{-rk},  x z = |y|^2
    CHECK(std::abs(res.x + res.z - std::pow(2.0, -rk)) < 1e-12);
    CHECK(std::abs(res.x * res.z - std::norm(res.y)) < 1e-12);
    CHECK(std::abs(res.z - (res.c + res.alpha_neg)) < 1e-12);
    CHECK(res.phi.norm() == doctest::Approx(1.0).epsilon(1e-12));

    // with k >= D the distance and overlap guarantees kick in
    Rng rng(22);
    for (int t = 0; t < 100; ++t) {
        int d = rng.uniform_int(2, 5);
        PureState ps(rng.pure(d));
        Mat sg = rng.density(d, d);
        double k = obs_divergence_quantum(ps.density().m, sg).value;
        for (double r : {2.0, 4.0, 10.0}) {
            PureSubstateResult pr = pure_substate(ps, sg, r, k);
            CHECK(substate_margin(pr.phi.density().m, sg, pr.alpha) >= -1e-9);
            CHECK(pr.distance <= 2.0 / std::sqrt(r) + 1e-9);
            CHECK(pr.overlap_sq >= 1.0 - 1.0 / r - 1e-9);
            // Both sides equal sqrt(1 - overlap^2); near overlap = 1 the
            // square root amplifies eigenvalue noise to ~sqrt(eps), so the
            // cross-check tolerance has to sit above 2^-26.
            CHECK(std::abs(pr.distance - trace_distance(ps, pr.phi)) < 1e-7);
        }
    }
}

TEST_CASE("lifting step: tilted purification, guarantee, and closest recovery") {
    Rng rng(23);
    for (int t = 0; t < 15; ++t) {
        Mat rho = rng.density(2, 2), sigma = rng.density(2, 2);
        PureState psi = canonical_purification(DensityMatrix(rho));

        // identity POVM element: theta = psi, p = 1, q = 1
        PovmElement id{Mat::Identity(4, 4)};
        LiftingStepResult full = lifting_step(psi, sigma, id, 4.0);
        CHECK(full.p == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(full.q == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(full.overlap - fidelity(rho, sigma)) < 1e-9);

        // random projector: the lemma's guarantee q >= p 2^{-k'/p}
        Mat u = rng.unitary(4);
        Mat f = Mat::Zero(4, 4);
        int rank = rng.uniform_int(1, 3);
        for (int j = 0; j < rank; ++j) f += u.col(j) * u.col(j).adjoint();
        LiftingStepResult step = lifting_step(psi, sigma, PovmElement{f}, 4.0);
        if (step.p > 1e-8) {
            CHECK(step.theta.norm() == doctest::Approx(1.0).epsilon(1e-10));
            Mat back = partial_trace(step.phi, SubsystemLayout::pair(2, 2), {0}).m;
            CHECK((back - sigma).cwiseAbs().maxCoeff() < 1e-9);
            CHECK(step.guarantee == doctest::Approx(step.p * std::pow(2.0, -step.k_prime / step.p))
                                        .epsilon(1e-10));
            CHECK(step.q >= step.guarantee - 1e-9);
            CHECK(step.k_prime == doctest::Approx(4.0 * step.d_base -
                                                  2.0 * std::log2(1.0 - 0.5))
                                      .epsilon(1e-10));
        }
    }
}

TEST_CASE("saddle extension: omega extends sigma and certification is sound") {
    Rng rng(24);
    Mat rho = rng.density(2, 2), sigma = rng.density(2, 2);
    PureState psi = canonical_purification(DensityMatrix(rho));
    LiftingParams prm = light_params();
    SaddleResult res = saddle_extension(psi, sigma, 0.7, prm.beta, prm);

    REQUIRE(res.omega.dim() == 4);
    CHECK(validate_density(res.omega.m).ok());
    Mat back = partial_trace(res.omega, SubsystemLayout::pair(2, 2), {0}).m;
    CHECK((back - sigma).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(res.p == doctest::Approx(0.7));
    CHECK(res.target == doctest::Approx(res.p * std::pow(2.0, -res.k_prime / res.p))
                            .epsilon(1e-12));
    if (res.certified) CHECK(res.certified_value >= res.target - prm.game_tol);
    CHECK(res.iterations >= 1);

    // weak duality: every feasible F (tr(F psi psi^dag) >= p) has
    // tr(F omega) >= certified_value - tol; check on the hardest rank-one
    // feasible candidates tied to psi
    Mat pp = psi.density().m;
    Eigh eg = eigh(res.omega.m - pp);
    // F = projector family from omega - psi psi^dag eigenvectors
    for (int j = 0; j < 4; ++j) {
        Mat f = Mat::Zero(4, 4);
        for (int i = 0; i <= j; ++i) f += eg.v.col(i) * eg.v.col(i).adjoint();
        double fp = re_trace(f * pp);
        if (fp >= res.p - 1e-12)
            CHECK(re_trace(f * res.omega.m) >= res.certified_value - 1e-6);
    }
}

TEST_CASE("divergence lifting: reduction, bound formula, certification") {
    Rng rng(25);
    for (int t = 0; t < 5; ++t) {
        Mat rho = rng.density(2, 2), sigma = rng.density(2, 2);
        PureState psi = canonical_purification(DensityMatrix(rho));
        LiftingOutcome out = divergence_lifting(psi, sigma, light_params());

        CHECK(out.reduction_err <= 1e-9);
        CHECK(validate_density(out.omega.m).ok());
        double d = out.base_d;
        CHECK(std::abs(out.bound - (d + 4.0 * std::sqrt(d + 1.0) +
                                    2.0 * std::log2(d + 1.0) + 4.0)) < 1e-12);
        CHECK(out.measured_d <= out.bound + 0.1);
        CHECK(out.measured_d >= -1e-12);
        CHECK(static_cast<int>(out.levels.size()) == out.params.l);
    }
}

TEST_CASE("quantum substate pipeline: assembled guarantees at r = 4") {
    Mat rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;
    Mat sigma = diag2(0.75, 0.25);
    QuantumSubstateResult res = quantum_substate(DensityMatrix(rho), sigma, 4.0, light_params());

    // zeta purifies sigma on the first factor
    REQUIRE(res.zeta.layout.has_value());
    REQUIRE(res.zeta.layout->factors() == 3);
    DensityMatrix red = partial_trace(res.zeta, *res.zeta.layout, {0});
    CHECK((red.m - sigma).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(res.reduction_err <= 1e-6);

    // achieved weight matches its formula, distance within the r = 4 budget
    CHECK(res.alpha == doctest::Approx((4.0 - 1.0) / (4.0 * std::pow(2.0, 4.0 * res.k_lift)))
                           .epsilon(1e-12));
    CHECK(res.distance <= 2.0 / std::sqrt(4.0) + 1e-9);
    CHECK(res.alpha > 0.0);
    CHECK(res.alpha < 1.0);

    // theory-side numbers are consistent
    double k = res.s_base;
    CHECK(std::abs(res.k_prime_theory - (k + 4.0 * std::sqrt(k + 2.0) +
                                         2.0 * std::log2(k + 2.0) + 5.0)) < 1e-12);
    CHECK(res.alpha_theory ==
          doctest::Approx((4.0 - 1.0) / (4.0 * std::pow(2.0, 4.0 * res.k_prime_theory)))
              .epsilon(1e-12));
    CHECK(res.k_base <= res.s_base + 1.0 + 1e-9);

    // alpha phi phi^dag <= omega (the lifted target)
    CHECK(substate_margin(res.phi.density().m, res.lifting.omega.m, res.alpha) >= -1e-9);
}

TEST_CASE("quantum substate from purification validates its layout") {
    PureState bare{[] { Vec v(4); v << 1, 0, 0, 0; return v; }()}; // no layout
    CHECK_THROWS_AS(quantum_substate_from_purification(bare, Mat::Identity(2, 2) * 0.5, 2.0,
                                                       light_params()),
                    qslab_error);
}
