#pragma once

// Exact small-scale simulator of two-party set-membership protocols: honest
// runs of the built-in clean index protocol, the Hadamard cheating attack,
// superpositional privacy loss, the 2->1 random access code, the
// random-access information bound, and the substate-based masquerade claim.
//
// Built-ins only (clean index; send-nothing; send-all) -- the claims being
// checked are about existence of attacks and bounds, so a general protocol
// IR is out of scope.  All simulation is exact; no sampling noise anywhere.

#include "qslab/substate.hpp"
#include "qslab/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qslab {

enum class BuiltinProtocol { CleanIndex, SendNothing, SendAll };

std::string protocol_name(BuiltinProtocol p);

// Final state of an honest run.  Registers, most significant first:
// X (Alice's input, dim 2^n), Y (Bob's index, dim n), Ans (answer qubit).
// Alice's work register A is empty for the built-in protocol, and Bob's work
// qubits other than the answer are |0> throughout (the protocol is clean).
struct ProtocolState {
    PureState joint;
    SubsystemLayout layout; // {2^n, n, 2}
    int n = 0;
    int rounds = 2; // Bob sends i, Alice replies with the answer qubit
    int output = -1;
};

std::vector<int> bits_from_string(const std::string& s);

// Honest run on classical inputs: x is x_1..x_n, i is 1-based.  The output
// equals x_i always (the built-in protocol is errorless).
ProtocolState simulate_index_protocol(int n, const std::vector<int>& x, int i);

struct HadamardAttackReport {
    int n = 0;
    double mi = 0;                // I(J : Hadamard-basis outcome pattern)
    double analytic = 0;          // (log2 n) / 2
    double max_offdiag_pr_one = 0; // max over i, j != i of Pr[outcome_j = 1 | i]
    double min_diag_pr_one = 0;   // min/max over i of Pr[outcome_i = 1 | i]
    double max_diag_pr_one = 0;   // (both should be exactly 1/2)
    bool per_position_ok = false;
};

// Alice feeds a uniform superposition into X against honest Bob with uniform
// J, Hadamards every X_j at the end and measures.  Exact statevector
// simulation (per fixed index, on X (x) Ans).
HadamardAttackReport hadamard_attack(int n);

struct PrivacyLossReport {
    BuiltinProtocol protocol = BuiltinProtocol::CleanIndex;
    int n = 0;
    double loss = 0;                    // I'(X : BY), cheating run
    std::optional<double> loss_literal; // joint-density cross-check (small n)
    double analytic = 0;                // closed form for the built-in
};

// Mixture mu_X into X, superposition |mu_Y> into Y (both uniform), then
// I'(X : BY).  Conditionals are pure, so the loss is the entropy of the
// Gram matrix sqrt(p_x p_x') <Psi_x|Psi_x'>; for small n the literal joint
// density-matrix computation is run as a cross-check.
PrivacyLossReport superpositional_privacy_loss(BuiltinProtocol protocol, int n);

struct SuccessComparison {
    double superposed = 0; // Bob's input register fed |mu_Y>
    double mixture = 0;    // Bob's input register fed the mixture mu_Y
};

// Success probability of the clean index protocol (X superposed) with Bob's
// input superposed vs mixed -- the two agree for any protocol.
SuccessComparison index_success_superposed_vs_mixture(int n);

struct EncodingEnsemble {
    std::vector<double> prior; // over bitstrings x, size 2^n_bits
    std::vector<Mat> states;   // rho_x, each of dim 2^m_qubits
    int n_bits = 0;
    int m_qubits = 0;
};

struct AntvReport {
    std::vector<PureState> states; // indexed by 2 x_1 + x_2
    Povm meas_x1, meas_x2;         // computational / Hadamard basis
    std::vector<Povm> decoders;    // 3-outcome {0, 1, ?} with ? = 0 (never abstain)
    EncodingEnsemble ensemble;     // uniform prior over the four inputs
    double success_x1 = 0, success_x2 = 0;
    double closed_form = 0;    // cos^2(pi/8) = (2 + sqrt 2)/4
    double grid_best = 0;      // brute-force 1-degree angle grid optimum
    double classical_best = 0; // best deterministic 2-bit -> 1-bit code: 3/4
};

// The 2->1 quantum random access code: four single-qubit states such that
// either bit is recoverable with probability cos^2(pi/8) > 1/2.
AntvReport antv_code();

struct RandomAccessRow {
    int i = 0;               // 1-based bit index
    double lambda = 0;       // Pr[Y_i != ?]
    double cond_success = 0; // Pr[Y_i = X_i | Y_i != ?]
    double eps = 0;          // max(0, cond_success - 1/2)
};

struct RandomAccessReport {
    std::vector<RandomAccessRow> rows;
    double lhs_quad = 0;    // sum_i lambda_i eps_i^2
    double lhs_entropy = 0; // sum_i lambda_i (1 - H(1/2 + eps_i))
    double mi = 0;          // I(X : M)
    double m = 0;           // qubit count of the encoding
    bool chain_ok = false;  // quad <= entropy <= mi <= m, each within 1e-9
};

// The random-access bound for a uniform n-bit source, a quantum encoding on
// m qubits, and per-bit 3-outcome decoders with outcomes {0, 1, ?}.
RandomAccessReport random_access_bound_check(const EncodingEnsemble& e,
                                             const std::vector<Povm>& decoders);

struct MasqueradeRow {
    int i = 0;                  // 1-based index fed to Bob
    double k_i = 0;             // S((rho_i)_XA || rho_XA)
    double k_lift = 0;          // measured divergence after lifting
    double eps_i = 0;           // success(psi_i) - 1/2 (0.5 for the errorless built-in)
    double alpha = 0;           // substate-stage weight (r-1)/(r 2^{r k_lift})
    double pr_not_abstain = 0;  // measured Pr[Z_i' != ?]
    double cond_correct = 0;    // measured Pr[Z_i' = X_i' | Z_i' != ?]
    double distance = 0;        // trace distance |psi_i><psi_i| vs |psi_i'><psi_i'|
    double cond_bound = 0;      // 1/2 + eps_i - distance/2
    double transport_err = 0;   // || (1 (x) U_i)|phi>|0> - |zeta_i> ||
    bool abstain_consistent = false; // |pr_not_abstain - alpha| <= 1e-9
    bool cond_ok = false;            // cond_correct >= cond_bound - 1e-6
    bool certified = true;           // lifting stage fully certified
};

struct MasqueradeReport {
    int n = 0;
    double r = 0;
    double k_avg = 0; // (1/n) sum_i k_i
    double i1 = 0;    // I(Y : XA) of the mixed-index run; equals k_avg
    std::vector<MasqueradeRow> rows;
    bool all_ok = false;
};

// The claim inside the trade-off proof, at toy scale: for each index i, the
// POVM M_i (ancilla Q, transport unitary U_i on YBQ from the substate
// pipeline, measure Q, on |1> measure the answer qubit, on |0> abstain)
// applied to the doubly-superposed run satisfies Pr[Z != ?] = alpha_i and
// Pr[Z = X_i' | Z != ?] >= 1/2 + eps_i - dist_i/2.  Bob's work register is
// padded with |0> qubits so that dim(YBQ) can carry the transport.
MasqueradeReport masquerade_check(int n, double r,
                                  const std::optional<LiftingParams>& prm = std::nullopt);

} // namespace qslab
