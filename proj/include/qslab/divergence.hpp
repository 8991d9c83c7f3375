#pragma once

// Distinguishability measures: trace distance, fidelity (Bhattacharyya
// coefficient), Fuchs-Caves measurement, entropies, relative entropy, mutual
// information, and the observational divergence
//     D(rho||sigma) = sup_F tr(F rho) log2( tr(F rho) / tr(F sigma) )
// with an exact subset oracle for classical inputs and a projector-sweep
// solver (certified lower bound + witness) for quantum ones.

#include "qslab/types.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace qslab {

double trace_distance(const Mat& rho, const Mat& sigma);   // tr|rho - sigma|, in [0, 2]
double trace_distance(const PureState& a, const PureState& b);
double l1_distance(const std::vector<double>& p, const std::vector<double>& q);

// Two-outcome projective measurement achieving the trace distance as the
// total-variation distance of the induced distributions: {F, 1-F} with F the
// projector onto the nonnegative eigenspace of rho - sigma.
std::pair<Povm, double> optimal_distinguishing_measurement(const Mat& rho, const Mat& sigma);

// Bhattacharyya / fidelity coefficient B(rho, sigma) = tr sqrt(sqrt(rho) sigma sqrt(rho)).
double fidelity(const Mat& rho, const Mat& sigma);
double bhattacharyya(const std::vector<double>& p, const std::vector<double>& q);

// Complete orthogonal measurement M with B(M(rho), M(sigma)) = B(rho, sigma):
// the eigenbasis of rho^{-1/2} (rho^{1/2} sigma rho^{1/2})^{1/2} rho^{-1/2}
// (rho perturbed by 1e-12*I when singular).
Povm fuchs_caves_measurement(const Mat& rho, const Mat& sigma);

double von_neumann_entropy(const Mat& rho);                 // base-2
double shannon_entropy(const std::vector<double>& p);
double binary_entropy(double p);

// S(rho||sigma), base-2; +infinity when supp(rho) is not contained in
// supp(sigma) (eigenvalue cutoff 1e-10 relative to the largest eigenvalue).
double relative_entropy(const Mat& rho, const Mat& sigma);
double relative_entropy(const std::vector<double>& p, const std::vector<double>& q);

// I(A:B) = S(A) + S(B) - S(AB) for a two-factor layout.
double mutual_information(const DensityMatrix& joint, const SubsystemLayout& lay);

// I(X:M) for a classical-quantum ensemble {prior_x, rho_x}:
// S(avg) - sum_x prior_x S(rho_x)  ( = avg_x S(rho_x || avg) ).
double cq_mutual_information(const std::vector<double>& prior, const std::vector<Mat>& states);

struct SweepConfig {
    int grid = 2000;            // log-spaced t values in [t_min, t_max], plus t = 0
    double t_min = 1e-6;
    double t_max = 1e6;
    int refine_iters = 60;      // golden-section refinement steps
    double rel_tol = 1e-7;
    bool augment_pencil = true; // add generalized-eigenvalue breakpoints of (rho, sigma)
};

struct SolverStats {
    long evaluations = 0;
    long grid_size = 0;
    double refinement_gap = 0;  // best value minus best grid value
    double best_t = 0;
};

struct DivergenceResult {
    double value = 0;                                  // +infinity on support violation
    std::optional<PovmElement> witness_op;             // quantum witness
    std::optional<std::vector<int>> witness_subset;    // classical witness (0-based)
    SolverStats stats;

    bool infinite() const;
};

// Exact classical oracle: maximum of P(S) log2(P(S)/Q(S)) over all 2^n
// subsets (n <= 24).  Justified as an exact supremum because p log2(p/q) is
// jointly convex, so the max over [0,1]^n tests sits at a subset indicator.
DivergenceResult obs_divergence_classical(const std::vector<double>& p,
                                          const std::vector<double>& q);

// Quantum solver: sweeps F_t = projector onto the positive eigenspace of
// rho - t sigma over a log grid in t (augmented with the eigenvalues of the
// pencil (rho, sigma) and their midpoints), golden-section refines around the
// best t, and handles the kernel projector at the boundary.  The returned
// value is re-evaluated exactly at the witness, so it is a certified lower
// bound on D.
DivergenceResult obs_divergence_quantum(const Mat& rho, const Mat& sigma,
                                        const SweepConfig& cfg = {});

} // namespace qslab
