#pragma once

// Structural properties tying observational divergence, relative entropy and
// the substate property together: the property checker, the converse bound
// D <= 2k + 2, the strong-substate entropy bound, the D/S sandwich, the
// explicit gap family, and the two-outcome measurement bound.

#include "qslab/substate.hpp"
#include "qslab/types.hpp"

#include <string>
#include <vector>

namespace qslab {

enum class SubstateMode { Standard, Weak, Strong };

struct PropertyQuery {
    Mat rho, sigma;
    double k = 0;
    SubstateMode mode = SubstateMode::Standard;
    std::vector<double> r_grid; // ignored in Strong mode
};

struct PropertyRow {
    double r = 0;
    bool found = false;
    bool conclusive = false; // definitive answer (exact path or refutation)
    double distance = 0;     // achieved distance of the witness (when found)
    double bound = 0;        // 2/r (standard) or 2/sqrt(r) (weak)
    double margin = 0;       // substate-check margin of the witness
};

struct PropertyReport {
    SubstateMode mode = SubstateMode::Standard;
    std::string path;         // "strong" | "commuting" | "pure" | "search"
    bool support_ok = true;   // supp(rho) inside supp(sigma)
    bool overall_found = false;      // every grid row found
    bool overall_conclusive = false; // every grid row conclusive, or refuted
    // The for-all-r property is disproved outright: support violation, or
    // (standard mode) the converse bound D > 2k + 2.  Grid rows may still
    // pass -- refutation speaks about the full property, not the grid.
    bool full_property_refuted = false;
    double strong_margin = 0; // Strong mode: min-eig(sigma - rho/2^k)
    std::vector<PropertyRow> rows;
};

// Witness-driven property decision.  Exact paths: Strong mode (eigenvalue
// check), commuting pairs (pinching reduces the existential to a capped-mass
// L1 problem with closed-form optimum), and support violation (conclusive
// negative for every finite k).  The pure path certifies positives via the
// two-dimensional construction; remaining negatives are conclusive only when
// the converse bound D > 2k + 2 refutes (standard mode), otherwise rows come
// back found=false, conclusive=false.
PropertyReport substate_property_check(const PropertyQuery& q);

struct ConverseReport {
    double d = 0;      // measured divergence (exact oracle when commuting)
    double bound = 0;  // 2k + 2
    bool property_verified = false;
    bool ok = false;   // d <= bound + 1e-6
};

// Verifies the standard k-substate property on r_grid, then checks D <= 2k+2.
ConverseReport converse_divergence_bound(const Mat& rho, const Mat& sigma, double k,
                                         const std::vector<double>& r_grid);

struct EntropyBoundReport {
    double s = 0;      // S(rho||sigma)
    double k = 0;
    double margin = 0; // min-eig(sigma - rho/2^k)
    bool ok = false;   // s <= k + 1e-6
};

// Precondition sigma >= rho/2^k (margin >= -1e-9); asserts S(rho||sigma) <= k.
EntropyBoundReport strong_substate_entropy_bound(const Mat& rho, const Mat& sigma, double k);

struct SandwichReport {
    int n = 0;
    bool commuting = false;
    double s = 0, d = 0;
    double upper = 0;   // D(n-1) [+ log2 n in the quantum case]
    bool ok_lower = false; // D - 1 <= S
    bool ok_upper = false; // S <= upper
};

SandwichReport d_s_sandwich_check(const Mat& rho, const Mat& sigma);

struct GapFamily {
    int n = 0;
    double k = 0, a = 0;
    std::vector<double> p, q;
    std::vector<double> log2_q;   // exact log2 q_i (q_i itself may underflow)
    double s = 0;                 // S(P||Q), closed form
    double s_lower = 0;           // k(n-1) - k(n-2)/a - 1
    double d = 0;                 // exact subset maximum (log-domain oracle)
    double d_upper = 0;           // 2(k+1)
    bool s_bound_ok = false;      // s > s_lower
    bool d_bound_ok = false;      // d <= d_upper + 1e-9
    bool separation_ok = false;   // s > (d/2 - 1)(n-2) - 1
};

// The explicit family p_i = a^{-i}(a-1), q_i = p_i 2^{-k a^{i-1}} with small
// relative entropy gap: S nearly k(n-1) while D <= 2(k+1).
GapFamily gap_family(int n, double k, double a);

struct TruncationCheck {
    double r = 0;
    int kept = 0;                 // floor(log_a r) + 1 indices kept
    std::vector<double> p_trunc;
    double l1 = 0;                // || P - P~ ||_1, must be <= 2/r
    double alpha = 0;             // (r-1)/(r 2^{rk})
    bool substate_ok = false;     // alpha * P~ <= Q (checked in log space)
    bool ok = false;
};

// The proof's truncation witness for the family's k-substate property at r.
TruncationCheck gap_truncation(const GapFamily& fam, double r);

struct TwoOutcomeReport {
    int n = 0;
    double s_full = 0;   // S(rho||sigma)
    double s_two = 0;    // S(F rho || F sigma) for F = (F*, 1 - F*)
    double d_witness = 0;
    double lower = 0;    // (s_full - log2 n)/(n-1) - 1
    bool ok_monotone = false; // s_two <= s_full
    bool ok_lower = false;    // s_two >= lower - 1e-4
};

// F* is the divergence-maximizing witness; the induced two-outcome
// measurement already captures S up to dimension factors.
TwoOutcomeReport two_outcome_relentropy_bound(const Mat& rho, const Mat& sigma);

} // namespace qslab
