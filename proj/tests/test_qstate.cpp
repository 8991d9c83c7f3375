// State algebra: validation, tensor products, partial trace, canonical
// purification, POVM application, closest purification.
//
// Frozen constants are derived from closed forms noted next to each value.

#include "doctest.h"

#include "qslab/divergence.hpp"
#include "qslab/linalg.hpp"
#include "qslab/qstate.hpp"
#include "qslab/rng.hpp"

#include <cmath>
#include <complex>

using namespace qslab;

namespace {

constexpr double INV_SQRT2 = 0.70710678118654752440; // 1/sqrt(2)

Mat ketbra(const Vec& v) { return v * v.adjoint(); }

Vec ket(int i, int d) {
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    return v;
}

Vec plus_state() {
    Vec v(2);
    v << INV_SQRT2, INV_SQRT2;
    return v;
}

Mat diag2(double a, double b) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

} // namespace

TEST_CASE("validate_density accepts states and localizes violations") {
    CHECK(validate_density(Mat::Identity(2, 2) * 0.5).ok());
    CHECK(validate_density(diag2(0.75, 0.25)).ok());

    Mat nh = Mat::Zero(2, 2);
    nh(0, 1) = cxd(0.3, 0.0); // not hermitian
    nh(0, 0) = nh(1, 1) = 0.5;
    ValidationReport r = validate_density(nh);
    CHECK_FALSE(r.hermitian);
    CHECK(r.herm_err == doctest::Approx(0.3).epsilon(1e-12));

    ValidationReport neg = validate_density(diag2(1.5, -0.5));
    CHECK_FALSE(neg.psd);
    CHECK(neg.min_eig == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(neg.unit_trace);

    ValidationReport tr = validate_density(Mat::Identity(2, 2));
    CHECK_FALSE(tr.unit_trace);
    CHECK(tr.trace_err == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(require_density(Mat::Identity(2, 2), "test"), qslab_error);
}

TEST_CASE("tensor products multiply dimensions and factor layouts") {
    DensityMatrix a(diag2(1.0, 0.0));
    DensityMatrix b(diag2(0.5, 0.5));
    DensityMatrix ab = tensor(a, b);
    REQUIRE(ab.dim() == 4);
    CHECK((ab.m - kron(a.m, b.m)).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(ab.layout.has_value());
    CHECK(ab.layout->factors() == 2);

    PureState z(ket(0, 2)), p(plus_state());
    PureState zp = tensor(z, p);
    REQUIRE(zp.dim() == 4);
    CHECK(std::abs(zp.a(0) - INV_SQRT2) < 1e-15);
    CHECK(std::abs(zp.a(1) - INV_SQRT2) < 1e-15);
    CHECK(std::abs(zp.a(2)) == 0.0);
    CHECK(std::abs(zp.a(3)) == 0.0);
}

TEST_CASE("partial trace of a Bell pair is maximally mixed on both sides") {
    Vec bell = Vec::Zero(4);
    bell(0) = bell(3) = INV_SQRT2; // (|00> + |11>)/sqrt(2)
    PureState psi(bell, SubsystemLayout::pair(2, 2));

    DensityMatrix left = partial_trace(psi, SubsystemLayout::pair(2, 2), {0});
    DensityMatrix right = partial_trace(psi, SubsystemLayout::pair(2, 2), {1});
    CHECK((left.m - Mat::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((right.m - Mat::Identity(2, 2) * 0.5).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("partial trace inverts tensor and respects multi-factor layouts") {
    Rng rng(101);
    Mat a = rng.density(2, 2), b = rng.density(3, 3), c = rng.density(2, 2);
    Mat abc = kron(kron(a, b), c);
    SubsystemLayout lay({2, 3, 2});
    DensityMatrix joint(abc, lay);

    CHECK((partial_trace(joint, lay, {0}).m - a).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((partial_trace(joint, lay, {1}).m - b).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((partial_trace(joint, lay, {2}).m - c).cwiseAbs().maxCoeff() < 1e-14);
    DensityMatrix ac = partial_trace(joint, lay, {0, 2});
    CHECK((ac.m - kron(a, c)).cwiseAbs().maxCoeff() < 1e-14);

    // tracing an entangled state still yields a valid state
    PureState ent(rng.pure(12), lay);
    DensityMatrix mid = partial_trace(ent, lay, {1});
    CHECK(validate_density(mid.m).ok());
    CHECK(std::abs(mid.m.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("canonical purification reproduces its state and fixes order and phase") {
    Rng rng(202);
    for (int d = 2; d <= 5; ++d) {
        Mat rho = rng.density(d, d);
        PureState psi = canonical_purification(DensityMatrix(rho));
        REQUIRE(psi.dim() == d * d);
        DensityMatrix back = partial_trace(psi, SubsystemLayout::pair(d, d), {0});
        CHECK((back.m - rho).cwiseAbs().maxCoeff() < 1e-12);
    }

    // diagonal input with distinct eigenvalues: amplitudes are sqrt of the
    // eigenvalues, descending, with real nonnegative phases
    PureState psi = canonical_purification(DensityMatrix(diag2(0.25, 0.75)));
    // largest eigenvalue 0.75 belongs to |1>, paired with reference index 0
    CHECK(std::abs(psi.a(2) - std::sqrt(0.75)) < 1e-14); // |1>|0>
    CHECK(std::abs(psi.a(1) - std::sqrt(0.25)) < 1e-14); // |0>|1>
    CHECK(std::abs(psi.a(0)) < 1e-14);
    CHECK(std::abs(psi.a(3)) < 1e-14);

    // pure input stays rank one
    PureState pp = canonical_purification(DensityMatrix(ketbra(plus_state())));
    CHECK(std::abs(std::abs(pp.a(0)) - INV_SQRT2) < 1e-12);
    CHECK(std::abs(std::abs(pp.a(2)) - INV_SQRT2) < 1e-12);
    CHECK(std::abs(pp.a(1)) < 1e-12);
    CHECK(std::abs(pp.a(3)) < 1e-12);
}

TEST_CASE("apply_povm validates elements and returns clamped probabilities") {
    Povm comp;
    comp.elements = {diag2(1, 0), diag2(0, 1)};
    std::vector<double> pr = apply_povm(comp, DensityMatrix(ketbra(plus_state())));
    REQUIRE(pr.size() == 2);
    CHECK(pr[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pr[1] == doctest::Approx(0.5).epsilon(1e-14));

    Rng rng(303);
    for (int t = 0; t < 10; ++t) {
        Povm m = rng.povm(3, 4);
        std::vector<double> q = rng.distribution(3);
        std::vector<double> probs = apply_povm(m, DensityMatrix(rng.density(3, 3)));
        double sum = 0;
        for (double v : probs) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
        (void)q;
    }

    Povm broken;
    broken.elements = {diag2(1, 0), diag2(0, 0.5)}; // does not sum to identity
    CHECK_THROWS_AS(apply_povm(broken, DensityMatrix(diag2(0.5, 0.5))), qslab_error);
}

TEST_CASE("closest purification attains the fidelity and purifies sigma") {
    // theta = |+>|0> purifies |+><+|; against sigma = |0><0| the best overlap
    // is B(|+><+|, |0><0|) = 1/sqrt(2)
    PureState theta(tensor(PureState(plus_state()), PureState(ket(0, 2))).a,
                    SubsystemLayout::pair(2, 2));
    auto [phi, overlap] = uhlmann_closest_purification(DensityMatrix(diag2(1, 0)), theta);
    CHECK(overlap == doctest::Approx(INV_SQRT2).epsilon(1e-12));
    DensityMatrix red = partial_trace(phi, SubsystemLayout::pair(2, 2), {0});
    CHECK((red.m - diag2(1, 0)).cwiseAbs().maxCoeff() < 1e-12);

    // random pairs: overlap equals B(tr_K theta, sigma), and phi purifies sigma
    Rng rng(404);
    for (int t = 0; t < 25; ++t) {
        int d = rng.uniform_int(2, 4);
        PureState th(rng.pure(d * d), SubsystemLayout::pair(d, d));
        Mat sigma = rng.density(d, d);
        auto [p2, ov] = uhlmann_closest_purification(DensityMatrix(sigma), th);
        Mat reduced = partial_trace(th, SubsystemLayout::pair(d, d), {0}).m;
        CHECK(std::abs(ov - fidelity(reduced, sigma)) < 1e-9);
        Mat back = partial_trace(p2, SubsystemLayout::pair(d, d), {0}).m;
        CHECK((back - sigma).cwiseAbs().maxCoeff() < 1e-10);
        // no purification can overlap more than the fidelity
        CHECK(std::abs(herm_inner(p2.density().m, th.density().m)) <= ov * ov + 1e-9);
    }

    // theta already purifies sigma: overlap 1
    Mat rho = Rng(505).density(3, 3);
    PureState self = canonical_purification(DensityMatrix(rho));
    auto [p3, ov3] = uhlmann_closest_purification(DensityMatrix(rho), self);
    CHECK(ov3 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(std::abs(p3.a.dot(self.a)) - 1.0) < 1e-9);
}
