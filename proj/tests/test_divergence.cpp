// Distinguishability measures and the observational divergence solvers.
//
// Frozen constants and their derivations:
//   sqrt(2)            = 1.41421356237309504880
//   1/sqrt(2)          = 0.70710678118654752440
//   h(1/4)             = 0.81127812445913283    (= 2 - (3/4) log2 3)
//   B(diag(1/4,3/4), diag(1/2,1/2))
//                      = sqrt(1/8) + sqrt(3/8) = 0.96592582628906829
//   D((3/4,1/4)||(1/4,3/4))
//                      = (3/4) log2 3 = 1.18872187554086717  (witness {0})
//   S(|+><+| || diag(3/4,1/4))
//                      = 1/2 log2(4/3) + 1/2 log2 4 = 1.20751874963942190

#include "doctest.h"

#include "qslab/divergence.hpp"
#include "qslab/linalg.hpp"
#include "qslab/qstate.hpp"
#include "qslab/rng.hpp"

#include <cmath>
#include <limits>

using namespace qslab;

namespace {

constexpr double SQRT2 = 1.41421356237309504880;
constexpr double INV_SQRT2 = 0.70710678118654752440;

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Mat plus_proj() {
    Mat m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    return m;
}

} // namespace

TEST_CASE("trace distance: diagonal, pure, and measurement-attained") {
    CHECK(trace_distance(diag2(1, 0), diag2(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    // orthogonal pure states are maximally far
    CHECK(trace_distance(diag2(1, 0), diag2(0, 1)) == doctest::Approx(2.0).epsilon(1e-12));
    // |0> vs |+>: 2 sqrt(1 - 1/2) = sqrt(2)
    PureState z{[] { Vec v(2); v << 1, 0; return v; }()};
    PureState p{[] { Vec v(2); v << INV_SQRT2, INV_SQRT2; return v; }()};
    CHECK(trace_distance(z, p) == doctest::Approx(SQRT2).epsilon(1e-12));
    CHECK(trace_distance(z.density().m, p.density().m) == doctest::Approx(SQRT2).epsilon(1e-10));

    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        int d = rng.uniform_int(2, 5);
        Mat a = rng.density(d, d), b = rng.density(d, d);
        auto [povm, tv] = optimal_distinguishing_measurement(a, b);
        CHECK(std::abs(tv - trace_distance(a, b)) < 1e-10);
        REQUIRE(povm.outcomes() == 2);
        // the induced two-outcome distributions realize the same total variation
        std::vector<double> pa = apply_povm(povm, DensityMatrix(a));
        std::vector<double> pb = apply_povm(povm, DensityMatrix(b));
        CHECK(std::abs(l1_distance(pa, pb) - tv) < 1e-10);
    }
}

TEST_CASE("fidelity: closed forms, symmetry, Fuchs-Caves attainment") {
    CHECK(fidelity(diag2(0.25, 0.75), diag2(0.5, 0.5)) ==
          doctest::Approx(0.96592582628906829).epsilon(1e-12));
    CHECK(bhattacharyya({0.25, 0.75}, {0.5, 0.5}) ==
          doctest::Approx(0.96592582628906829).epsilon(1e-14));
    CHECK(fidelity(plus_proj(), diag2(1, 0)) == doctest::Approx(INV_SQRT2).epsilon(1e-10));

    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        int d = rng.uniform_int(2, 5);
        Mat a = rng.density(d, d), b = rng.density(d, d);
        double f = fidelity(a, b);
        CHECK(std::abs(f - fidelity(b, a)) < 1e-10);
        CHECK(f <= 1.0 + 1e-12);
        CHECK(f >= 0.0);
        CHECK(std::abs(fidelity(a, a) - 1.0) < 1e-10);

        Povm m = fuchs_caves_measurement(a, b);
        std::vector<double> pa = apply_povm(m, DensityMatrix(a));
        std::vector<double> pb = apply_povm(m, DensityMatrix(b));
        CHECK(std::abs(bhattacharyya(pa, pb) - f) < 1e-9);
        // no measurement can fall below the fidelity
        Povm rnd = rng.povm(d, 3);
        CHECK(bhattacharyya(apply_povm(rnd, DensityMatrix(a)),
                            apply_povm(rnd, DensityMatrix(b))) >= f - 1e-9);
    }
}

TEST_CASE("entropies: closed forms and ranges") {
    CHECK(binary_entropy(0.25) == doctest::Approx(0.81127812445913283).epsilon(1e-14));
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(shannon_entropy({0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(von_neumann_entropy(diag2(0.25, 0.75)) ==
          doctest::Approx(0.81127812445913283).epsilon(1e-12));
    CHECK(von_neumann_entropy(plus_proj()) == doctest::Approx(0.0).epsilon(1e-10));
    // entropy is basis-independent
    Rng rng(13);
    Mat u = rng.unitary(4);
    Mat rho = rng.density(4, 4);
    CHECK(std::abs(von_neumann_entropy(u * rho * u.adjoint()) - von_neumann_entropy(rho)) <
          1e-10);
}

TEST_CASE("relative entropy: supports, classical reduction, zero on equality") {
    CHECK(relative_entropy(diag2(1, 0), diag2(0.5, 0.5)) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> det = {1.0, 0.0}, unif = {0.5, 0.5};
    CHECK(relative_entropy(det, unif) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::isinf(relative_entropy(diag2(0.5, 0.5), diag2(1, 0))));
    CHECK(std::isinf(relative_entropy(unif, det)));
    CHECK(relative_entropy(plus_proj(), diag2(0.75, 0.25)) ==
          doctest::Approx(1.20751874963942190).epsilon(1e-12));

    Rng rng(14);
    for (int t = 0; t < 20; ++t) {
        int n = rng.uniform_int(2, 6);
        std::vector<double> p = rng.distribution(n), q = rng.distribution(n);
        Mat dp = Mat::Zero(n, n), dq = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            dp(i, i) = p[i];
            dq(i, i) = q[i];
        }
        CHECK(std::abs(relative_entropy(dp, dq) - relative_entropy(p, q)) < 1e-10);
        CHECK(relative_entropy(p, q) >= -1e-12); // nonnegativity
        Mat rho = rng.density(n, n);
        CHECK(std::abs(relative_entropy(rho, rho)) < 1e-10);
    }
}

TEST_CASE("mutual information: Bell pair, product states, cq ensembles") {
    Mat bell = Mat::Zero(4, 4);
    bell(0, 0) = bell(0, 3) = bell(3, 0) = bell(3, 3) = 0.5;
    CHECK(mutual_information(DensityMatrix(bell, SubsystemLayout::pair(2, 2)),
                             SubsystemLayout::pair(2, 2)) == doctest::Approx(2.0).epsilon(1e-10));

    Rng rng(15);
    Mat a = rng.density(2, 2), b = rng.density(3, 3);
    CHECK(std::abs(mutual_information(DensityMatrix(kron(a, b), SubsystemLayout::pair(2, 3)),
                                      SubsystemLayout::pair(2, 3))) < 1e-10);

    CHECK(cq_mutual_information({0.5, 0.5}, {diag2(1, 0), diag2(0, 1)}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(cq_mutual_information({0.5, 0.5}, {diag2(0.3, 0.7), diag2(0.3, 0.7)})) <
          1e-12);
    // cq MI equals the average relative entropy to the ensemble average
    std::vector<double> prior = rng.distribution(3);
    std::vector<Mat> states = {rng.density(3, 3), rng.density(3, 3), rng.density(3, 3)};
    Mat avg = Mat::Zero(3, 3);
    for (size_t i = 0; i < states.size(); ++i) avg += prior[i] * states[i];
    double acc = 0;
    for (size_t i = 0; i < states.size(); ++i) acc += prior[i] * relative_entropy(states[i], avg);
    CHECK(std::abs(cq_mutual_information(prior, states) - acc) < 1e-9);
}

TEST_CASE("classical divergence oracle: closed forms and witness certification") {
    DivergenceResult r = obs_divergence_classical({1.0, 0.0}, {0.5, 0.5});
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(r.witness_subset.has_value());
    CHECK(*r.witness_subset == std::vector<int>{0});

    r = obs_divergence_classical({0.75, 0.25}, {0.25, 0.75});
    CHECK(r.value == doctest::Approx(1.18872187554086717).epsilon(1e-14));
    REQUIRE(r.witness_subset.has_value());
    CHECK(*r.witness_subset == std::vector<int>{0});

    // equal distributions: the supremum is 0
    r = obs_divergence_classical({0.5, 0.5}, {0.5, 0.5});
    CHECK(r.value == doctest::Approx(0.0).epsilon(1e-14));

    // support violation
    CHECK(obs_divergence_classical({0.5, 0.5}, {1.0, 0.0}).infinite());

    // the witness re-evaluates to the reported value
    Rng rng(16);
    for (int t = 0; t < 50; ++t) {
        int n = rng.uniform_int(2, 8);
        std::vector<double> p = rng.distribution(n), q = rng.distribution(n);
        DivergenceResult d = obs_divergence_classical(p, q);
        REQUIRE(d.witness_subset.has_value());
        double ps = 0, qs = 0;
        for (int i : *d.witness_subset) {
            ps += p[i];
            qs += q[i];
        }
        double val = (ps <= 0) ? 0.0 : ps * std::log2(ps / qs);
        CHECK(std::abs(val - d.value) < 1e-12);
        CHECK(d.value >= -1e-15);
        // D <= S + 1 (classical form)
        CHECK(d.value <= relative_entropy(p, q) + 1.0 + 1e-9);
    }
}

TEST_CASE("quantum divergence solver: commuting exactness and certified witnesses") {
    Rng rng(17);
    for (int t = 0; t < 30; ++t) {
        int n = rng.uniform_int(2, 6);
        std::vector<double> p = rng.distribution(n), q = rng.distribution(n);
        Mat dp = Mat::Zero(n, n), dq = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            dp(i, i) = p[i];
            dq(i, i) = q[i];
        }
        DivergenceResult quantum = obs_divergence_quantum(dp, dq);
        DivergenceResult classical = obs_divergence_classical(p, q);
        CHECK(std::abs(quantum.value - classical.value) < 1e-9);
    }

    // witness certification on non-commuting pairs: 0 <= F <= 1 and the
    // reported value equals tr(F rho) log2(tr(F rho)/tr(F sigma))
    for (int t = 0; t < 30; ++t) {
        int d = rng.uniform_int(2, 5);
        Mat rho = rng.density(d, d), sigma = rng.density(d, d);
        DivergenceResult r = obs_divergence_quantum(rho, sigma);
        REQUIRE(r.witness_op.has_value());
        const Mat& f = r.witness_op->m;
        Eigen::VectorXd ev = eigvalsh(f);
        CHECK(ev.minCoeff() >= -1e-10);
        CHECK(ev.maxCoeff() <= 1.0 + 1e-10);
        double tp = re_trace(f * rho), tq = re_trace(f * sigma);
        double val = (tp <= 0) ? 0.0 : tp * std::log2(tp / tq);
        CHECK(std::abs(val - r.value) < 1e-9);
        // sandwich: D <= S + 1
        double s = relative_entropy(rho, sigma);
        CHECK(r.value <= s + 1.0 + 1e-9);
        CHECK(r.value >= -1e-12);
        CHECK(r.stats.grid_size > 0);
    }

    // support violation is detected
    CHECK(obs_divergence_quantum(plus_proj(), diag2(1, 0)).infinite());

    // |+><+| vs diag(3/4,1/4): measuring in the sigma eigenbasis gives
    // (1/2,1/2) vs (3/4,1/4), so D >= 1/2 log2 2 = 1/2
    DivergenceResult r = obs_divergence_quantum(plus_proj(), diag2(0.75, 0.25));
    CHECK(r.value >= 0.5 - 1e-9);
    CHECK(r.value <= 1.20751874963942190 + 1.0 + 1e-9);

    // unitary invariance of the solver value
    Mat rho = rng.density(3, 3), sigma = rng.density(3, 3);
    Mat u = rng.unitary(3);
    double base = obs_divergence_quantum(rho, sigma).value;
    double rot = obs_divergence_quantum(u * rho * u.adjoint(), u * sigma * u.adjoint()).value;
    CHECK(std::abs(base - rot) < 1e-6);
}
