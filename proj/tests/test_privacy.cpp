// Privacy demos: honest protocol runs, the Hadamard cheating attack,
// superpositional privacy loss, the 2->1 random access code, the information
// bound, and the masquerade claim.
//
// Frozen constants:
//   cos^2(pi/8) = (2 + sqrt 2)/4            = 0.85355339059327376
//   cos^2(pi/8) - 1/2 = sqrt(2)/4           = 0.35355339059327376
//   clean-index privacy loss (n = 4): 1 + (log2 4)/2 = 2
//   clean-index masquerade (n = 2): I(Y : X) = 0.5, so k_avg = 0.5

#include "doctest.h"

#include "qslab/divergence.hpp"
#include "qslab/privacy.hpp"
#include "qslab/qstate.hpp"
#include "qslab/rng.hpp"

#include <cmath>

using namespace qslab;

namespace {
constexpr double COS2_PI8 = 0.85355339059327376; // (2 + sqrt 2)/4
} // namespace

TEST_CASE("bits_from_string parses and validates") {
    CHECK(bits_from_string("0110") == std::vector<int>{0, 1, 1, 0});
    CHECK(bits_from_string("1") == std::vector<int>{1});
    CHECK_THROWS_AS(bits_from_string("01x"), qslab_error);
}

TEST_CASE("honest clean-index runs produce the correct basis state and output") {
    // exhaustive at n = 3: output always equals x_i, the joint state is the
    // basis vector |x>|i>|x_i>
    for (int x = 0; x < 8; ++x) {
        std::vector<int> bits(3);
        for (int b = 0; b < 3; ++b) bits[b] = (x >> (2 - b)) & 1; // x_1 is the MSB
        for (int i = 1; i <= 3; ++i) {
            ProtocolState st = simulate_index_protocol(3, bits, i);
            CHECK(st.output == bits[i - 1]);
            REQUIRE(st.joint.dim() == 8 * 3 * 2);
            int expect = (x * 3 + (i - 1)) * 2 + bits[i - 1];
            CHECK(std::abs(st.joint.a(expect) - 1.0) < 1e-15);
            CHECK(std::abs(st.joint.norm() - 1.0) < 1e-15);
            CHECK(st.rounds == 2);
        }
    }
    CHECK_THROWS_AS(simulate_index_protocol(2, {0, 1, 1}, 1), qslab_error); // wrong length
    CHECK_THROWS_AS(simulate_index_protocol(2, {0, 1}, 3), qslab_error);    // index range
}

TEST_CASE("Hadamard attack: half a bit per doubling, perfectly localized") {
    for (int n : {2, 4, 8, 16}) {
        HadamardAttackReport rep = hadamard_attack(n);
        CHECK(rep.analytic == doctest::Approx(0.5 * std::log2(n)).epsilon(1e-15));
        CHECK(std::abs(rep.mi - rep.analytic) < 1e-9);
        CHECK(rep.per_position_ok);
        // outcome pattern is 0...0 or e_i, each with probability 1/2
        CHECK(rep.max_offdiag_pr_one < 1e-12);
        CHECK(rep.min_diag_pr_one == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.max_diag_pr_one == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(hadamard_attack(3), qslab_error); // power of two only
}

TEST_CASE("superpositional privacy loss: closed forms and literal cross-check") {
    PrivacyLossReport rep = superpositional_privacy_loss(BuiltinProtocol::CleanIndex, 4);
    CHECK(rep.analytic == doctest::Approx(2.0).epsilon(1e-15)); // 1 + (log2 4)/2
    CHECK(std::abs(rep.loss - rep.analytic) < 1e-9);

    PrivacyLossReport small = superpositional_privacy_loss(BuiltinProtocol::CleanIndex, 2);
    CHECK(std::abs(small.loss - 1.5) < 1e-9);
    REQUIRE(small.loss_literal.has_value());
    CHECK(std::abs(*small.loss_literal - small.loss) < 1e-9);

    CHECK(std::abs(superpositional_privacy_loss(BuiltinProtocol::SendNothing, 4).loss) < 1e-12);
    CHECK(std::abs(superpositional_privacy_loss(BuiltinProtocol::SendAll, 3).loss - 3.0) <
          1e-9);

    // superposed vs mixture success: identical for the honest protocol
    SuccessComparison cmp = index_success_superposed_vs_mixture(2);
    CHECK(std::abs(cmp.superposed - cmp.mixture) < 1e-10);
    CHECK(cmp.superposed == doctest::Approx(1.0).epsilon(1e-12)); // errorless
}

TEST_CASE("2->1 random access code: cos^2(pi/8) on every query") {
    AntvReport rep = antv_code();
    REQUIRE(rep.states.size() == 4);
    for (const PureState& s : rep.states) CHECK(std::abs(s.norm() - 1.0) < 1e-14);
    CHECK(rep.closed_form == doctest::Approx(COS2_PI8).epsilon(1e-15));
    CHECK(std::abs(rep.success_x1 - COS2_PI8) < 1e-12);
    CHECK(std::abs(rep.success_x2 - COS2_PI8) < 1e-12);
    CHECK(rep.success_x1 > 0.5);
    // 1-degree grid search cannot beat the analytic optimum by more than the
    // grid resolution allows, and must come within 1e-3 of it
    CHECK(std::abs(rep.grid_best - COS2_PI8) < 1e-3);
    CHECK(rep.grid_best <= COS2_PI8 + 1e-12);
    // best deterministic classical 2->1 code: 3/4
    CHECK(rep.classical_best == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(rep.closed_form > rep.classical_best);
}

TEST_CASE("random access bound: chain holds for the code and random encodings") {
    AntvReport antv = antv_code();
    RandomAccessReport rep = random_access_bound_check(antv.ensemble, antv.decoders);
    REQUIRE(rep.rows.size() == 2);
    for (const RandomAccessRow& row : rep.rows) {
        CHECK(row.lambda == doctest::Approx(1.0).epsilon(1e-12)); // never abstains
        CHECK(std::abs(row.eps - (COS2_PI8 - 0.5)) < 1e-12);
    }
    CHECK(rep.m == doctest::Approx(1.0));
    // four symmetric pure states average to the maximally mixed qubit
    CHECK(rep.mi == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.chain_ok);

    // identical states carry no information; the chain forces eps = 0
    EncodingEnsemble flat;
    flat.n_bits = 2;
    flat.m_qubits = 1;
    flat.prior.assign(4, 0.25);
    flat.states.assign(4, Mat::Identity(2, 2) * 0.5);
    std::vector<Povm> dec(2, antv.decoders[0]);
    RandomAccessReport frep = random_access_bound_check(flat, dec);
    CHECK(frep.mi == doctest::Approx(0.0).epsilon(1e-12));
    for (const RandomAccessRow& row : frep.rows) CHECK(row.eps < 1e-12);
    CHECK(frep.chain_ok);

    Rng rng(41);
    for (int t = 0; t < 50; ++t) {
        EncodingEnsemble e;
        e.n_bits = 2;
        e.m_qubits = 2;
        e.prior.assign(4, 0.25);
        for (int x = 0; x < 4; ++x) e.states.push_back(rng.density(4, rng.uniform_int(1, 4)));
        std::vector<Povm> decs = {rng.povm(4, 3), rng.povm(4, 3)};
        CHECK(random_access_bound_check(e, decs).chain_ok);
    }
}

TEST_CASE("masquerade claim at n = 2, r = 4") {
    LiftingParams prm = LiftingParams::defaults_for(1.0);
    prm.l = 3;
    prm.game_iters = 300;
    MasqueradeReport rep = masquerade_check(2, 4.0, prm);

    REQUIRE(rep.rows.size() == 2);
    // I(Y : XA) of the uniform-index run equals the average divergence
    CHECK(rep.i1 == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::abs(rep.k_avg - rep.i1) < 1e-10);
    for (const MasqueradeRow& row : rep.rows) {
        CHECK(row.k_i == doctest::Approx(0.5).epsilon(1e-10)); // symmetric at n = 2
        CHECK(row.eps_i == doctest::Approx(0.5).epsilon(1e-12)); // errorless protocol
        CHECK(row.transport_err < 1e-6);
        CHECK(std::abs(row.pr_not_abstain - row.alpha) <= 1e-9);
        CHECK(row.cond_correct >= row.cond_bound - 1e-6);
        CHECK(row.abstain_consistent);
        CHECK(row.cond_ok);
        CHECK(row.alpha > 0.0);
        CHECK(row.alpha < 1.0);
    }
    CHECK(rep.all_ok);
}
