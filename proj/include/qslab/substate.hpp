#pragma once

// Substate constructions and the divergence-lifting pipeline:
//   * classical Good/Bad construction,
//   * pure-state two-dimensional construction,
//   * single-POVM lifting step (tilted purification + closest purification),
//   * saddle-point extension solver (fictitious play, certified-or-shortfall),
//   * weighted lifting mixture, and the end-to-end theorem assembly.

#include "qslab/divergence.hpp"
#include "qslab/types.hpp"

#include <optional>
#include <vector>

namespace qslab {

struct ClassicalSubstateResult {
    std::vector<int> good;        // surviving indices
    std::vector<double> p_prime;  // renormalized restriction of P to Good
    std::vector<double> witness;  // P'' with Q = alpha P' + (1 - alpha) P''
    double alpha = 0;             // (r-1) / (r 2^{rk})
    double threshold = 0;         // 2^{rk}
    double bad_mass = 0;          // P(Bad)
    double l1_dist = 0;           // ||P - P'||_1
    bool guarantees_hold = false; // l1 <= 2/r and alpha P' <= Q (holds when k >= D(P||Q))
};

// Good = { i : P(i)/2^{rk} <= Q(i) }.  Pass k = D(P||Q) from the oracle for
// the appendix normalization, or result2prime_k(P, Q) for the body's variant.
ClassicalSubstateResult classical_substate(const std::vector<double>& p,
                                           const std::vector<double>& q,
                                           double r, double k);

// k = S(P||Q) + 1, the Result-2' parameterization of the same construction.
double result2prime_k(const std::vector<double>& p, const std::vector<double>& q);

struct PureSubstateResult {
    PureState phi;
    double alpha = 0;
    double distance = 0;     // trace distance between psi and phi
    double overlap_sq = 0;   // |<phi|psi>|^2
    bool trivial = false;    // M = sigma - psi psi^dag / 2^{rk} was already PSD
    // block data of the two-dimensional construction (Claim instrumentation):
    // x + z = 2^{-rk}, x z = |y|^2, b = y, z = c + alpha_neg
    double x = 0, z = 0, c = 0, alpha_neg = 0;
    cxd y{0, 0}, b{0, 0};
};

// Two-dimensional construction in span{psi, w} with w the (unique) negative
// eigenvector of sigma - psi psi^dag / 2^{rk}.  Guarantees, for k >= D:
// alpha phi phi^dag <= sigma, distance < 2/sqrt(r), overlap^2 > 1 - 1/r.
PureSubstateResult pure_substate(const PureState& psi, const Mat& sigma, double r, double k);

// min-eig(sigma - c rho') >= -tol
double substate_margin(const Mat& rho_prime, const Mat& sigma, double c);
bool substate_check(const Mat& rho_prime, const Mat& sigma, double c, double tol = 1e-9);

struct LiftingStepResult {
    PureState theta;      // F-tilted purification  F|psi> / ||F|psi>||
    PureState phi;        // purification of sigma closest to theta
    double p = 0;         // tr(F psi psi^dag)
    double q = 0;         // tr(F phi phi^dag)
    double overlap = 0;   // |<phi|theta>|
    double d_base = 0;    // D(tr_K psi psi^dag || sigma), from the solver
    double k_prime = 0;   // beta D - 2 log2(1 - beta^{-1/2})
    double guarantee = 0; // p / 2^{k'/p}
};

// One lifting step against a fixed POVM element F on H (x) K.
LiftingStepResult lifting_step(const PureState& psi, const Mat& sigma,
                               const PovmElement& f, double beta);

struct LiftingParams {
    double beta = 4.0;
    double gamma = 1.0;
    int l = 8;
    int game_iters = 2000;
    double game_tol = 1e-4;

    // beta = (1 + (D+1)^{-1/2})^2, gamma = sqrt(D+1)
    static LiftingParams defaults_for(double d);
};

struct SaddleResult {
    DensityMatrix omega;        // extension of sigma on H (x) K
    double p = 0;               // constraint level
    double k_prime = 0;
    double target = 0;          // p / 2^{k'/p}
    double certified_value = 0; // dual lower bound on min_F tr(F omega)
    bool certified = false;     // certified_value >= target - game_tol
    int iterations = 0;
};

// max over extensions omega of sigma of  min { tr(F omega) : 0 <= F <= 1,
// tr(F psi psi^dag) >= p }, by fictitious play: best-response F's are
// projectors onto negative eigenspaces of omega - lambda psi psi^dag (lambda
// bisected), replies are lifting-step purifications against the running
// average F.  The certified value is a weak-duality lower bound, so a
// `certified` result is sound regardless of convergence quality.
SaddleResult saddle_extension(const PureState& psi, const Mat& sigma, double p,
                              double beta, const LiftingParams& prm);

struct LiftingOutcome {
    DensityMatrix omega;       // T_gamma(l)^{-1} sum_i i^{gamma-1} omega(i/l)
    double base_d = 0;         // D(tr_K psi psi^dag || sigma)
    double measured_d = 0;     // D(psi psi^dag || omega), solver value
    double bound = 0;          // D + 4 sqrt(D+1) + 2 log2(D+1) + 4
    double reduction_err = 0;  // tr | tr_K omega - sigma |
    bool all_certified = true;
    LiftingParams params;
    std::vector<SaddleResult> levels;
};

LiftingOutcome divergence_lifting(const PureState& psi, const Mat& sigma,
                                  const std::optional<LiftingParams>& prm = std::nullopt);

struct QuantumSubstateResult {
    PureState psi;   // purification of rho used by the pipeline
    PureState phi;   // pure substate close to psi with alpha phi phi^dag <= omega
    PureState theta; // purification of the complement state tau2
    PureState zeta;  // sqrt(alpha) phi |1> + sqrt(1-alpha) theta |0>, purifies sigma
    double r = 0;
    double alpha = 0;          // (r-1)/(r 2^{r k_lift}) -- achieved weight
    double k_base = 0;         // D(rho||sigma), solver
    double k_lift = 0;         // measured D(psi psi^dag || omega)
    double s_base = 0;         // S(rho||sigma)
    double k_prime_theory = 0; // k + 4 sqrt(k+2) + 2 log2(k+2) + 5 at k = S(rho||sigma)
    double alpha_theory = 0;   // (r-1)/(r 2^{r k'_theory})
    double distance = 0;       // trace distance psi vs phi
    double reduction_err = 0;  // tr | tr_{K,Q} zeta zeta^dag - sigma |
    double clamped_mass = 0;   // negative mass clamped in tau2
    LiftingOutcome lifting;
};

QuantumSubstateResult quantum_substate(const DensityMatrix& rho, const Mat& sigma, double r,
                                       const std::optional<LiftingParams>& prm = std::nullopt);

// Same pipeline starting from a caller-supplied purification psi of rho on
// H (x) K (bipartite layout, dim K >= dim H); used by the privacy module
// where psi is the protocol state.
QuantumSubstateResult quantum_substate_from_purification(
    const PureState& psi, const Mat& sigma, double r,
    const std::optional<LiftingParams>& prm = std::nullopt);

} // namespace qslab
