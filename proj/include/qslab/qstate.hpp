#pragma once

// State algebra: validation, tensor products, partial trace, canonical
// purification, POVM application, and the closest-purification construction.

#include "qslab/types.hpp"

#include <utility>
#include <vector>

namespace qslab {

// Hermiticity / positivity / unit-trace check with per-violation magnitudes.
ValidationReport validate_density(const Mat& m, double tol = 1e-10);

// Throws qslab_error when the matrix fails validation.
void require_density(const Mat& m, const char* what, double tol = 1e-8);

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);
PureState tensor(const PureState& a, const PureState& b);

// Trace out the factors NOT listed in `keep` (0-based, strictly increasing).
// The result lives on the kept factors in their original order.
DensityMatrix partial_trace(const DensityMatrix& st, const SubsystemLayout& lay,
                            const std::vector<int>& keep);
DensityMatrix partial_trace(const PureState& st, const SubsystemLayout& lay,
                            const std::vector<int>& keep);

// Canonical purification of rho on H (x) H:  sum_i sqrt(l_i) |v_i>|i>, with
// eigenvalues sorted descending and each eigenvector's global phase fixed so
// that its largest-magnitude component is real positive.
PureState canonical_purification(const DensityMatrix& rho);

// Outcome probabilities tr(F_i rho); validates the POVM (completeness,
// element bounds) and clamps probabilities in [-1e-10, 0) to zero.
std::vector<double> apply_povm(const Povm& m, const DensityMatrix& rho);

// The purification phi of sigma on H (x) K maximizing |<phi|theta>|; returns
// (phi, overlap).  theta must carry a bipartite layout {dim H, dim K} with
// dim K >= dim H; the overlap equals the fidelity B(tr_K theta, sigma).
std::pair<PureState, double> uhlmann_closest_purification(const DensityMatrix& sigma,
                                                          const PureState& theta);

} // namespace qslab
