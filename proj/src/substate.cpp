#include "qslab/substate.hpp"

#include "qslab/linalg.hpp"
#include "qslab/qstate.hpp"

#include <algorithm>
#include <cmath>

namespace qslab {

namespace {

void check_r(double r) {
    if (!(r > 1.0)) throw qslab_error("substate: r must exceed 1");
}

void check_dist_pair(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw qslab_error("substate: length mismatch");
    auto chk = [](const std::vector<double>& v) {
        double s = 0;
        for (double x : v) {
            if (x < -1e-12) throw qslab_error("substate: negative probability");
            s += x;
        }
        if (std::abs(s - 1) > 1e-9) throw qslab_error("substate: input not normalized");
    };
    chk(p);
    chk(q);
}

} // namespace

ClassicalSubstateResult classical_substate(const std::vector<double>& p,
                                           const std::vector<double>& q,
                                           double r, double k) {
    check_r(r);
    check_dist_pair(p, q);
    if (!std::isfinite(k)) throw qslab_error("classical_substate: k must be finite");
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] > 0 && q[i] <= 0)
            throw qslab_error("classical_substate: support violation, no finite k works");

    ClassicalSubstateResult res;
    res.threshold = std::exp2(r * k);
    res.alpha = (r - 1) / (r * res.threshold);

    double pg = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] / res.threshold <= q[i]) {
            res.good.push_back(static_cast<int>(i));
            pg += p[i];
        }
    }
    res.bad_mass = 1.0 - pg;
    if (pg <= 0) throw qslab_error("classical_substate: Good set has zero mass (k too small)");

    res.p_prime.assign(p.size(), 0.0);
    for (int i : res.good) res.p_prime[i] = p[i] / pg;

    res.l1_dist = l1_distance(p, res.p_prime);

    res.witness.assign(p.size(), 0.0);
    bool dominated = true;
    for (size_t i = 0; i < p.size(); ++i) {
        double w = (q[i] - res.alpha * res.p_prime[i]) / (1 - res.alpha);
        if (w < -1e-12) dominated = false;
        res.witness[i] = std::max(0.0, w);
    }
    res.guarantees_hold = dominated && res.l1_dist <= 2.0 / r + 1e-12;
    return res;
}

double result2prime_k(const std::vector<double>& p, const std::vector<double>& q) {
    double s = relative_entropy(p, q);
    if (!std::isfinite(s)) throw qslab_error("result2prime_k: S(P||Q) infinite");
    return s + 1.0;
}

PureSubstateResult pure_substate(const PureState& psi, const Mat& sigma, double r, double k) {
    check_r(r);
    if (psi.dim() != sigma.rows()) throw qslab_error("pure_substate: dimension mismatch");
    if (std::abs(psi.norm() - 1) > 1e-9) throw qslab_error("pure_substate: psi not normalized");
    require_density(sigma, "pure_substate(sigma)");

    PureSubstateResult res;
    const double thr = std::exp2(r * k);
    res.alpha = (r - 1) / (r * thr);

    Mat m = herm(sigma - (psi.a * psi.a.adjoint()) / thr);
    Eigh e = eigh(m);
    const double neg_tol = 1e-12 * std::max(1.0, std::abs(e.w[0]));
    std::vector<int> negs;
    for (int i = 0; i < e.w.size(); ++i)
        if (e.w[i] < -neg_tol) negs.push_back(i);

    if (negs.empty()) {
        // sigma already dominates psi psi^dag / 2^{rk}
        res.phi = psi;
        res.trivial = true;
        res.distance = 0;
        res.overlap_sq = 1;
        return res;
    }
    if (negs.size() > 1)
        throw qslab_error("pure_substate: more than one negative eigenvalue (k below divergence)");

    Vec w = e.v.col(negs[0]);
    res.alpha_neg = -e.w[negs[0]];

    cxd wpsi = w.dot(psi.a); // <w|psi>
    Vec resid = psi.a - wpsi * w;
    double nv = resid.norm();
    if (nv <= 1e-12)
        throw qslab_error("pure_substate: psi parallel to the negative eigenvector");
    Vec v = resid / nv;

    cxd vpsi = v.dot(psi.a); // = nv up to phase
    res.x = std::norm(vpsi) / thr;
    res.z = std::norm(wpsi) / thr;
    res.y = vpsi * std::conj(wpsi) / thr;
    res.b = (v.adjoint() * sigma * w)(0, 0);
    res.c = (w.adjoint() * sigma * w)(0, 0).real();
    if (res.c <= 1e-15)
        throw qslab_error("pure_substate: degenerate block (c = 0)");

    Vec phi = (res.b / std::sqrt(res.c)) * v + std::sqrt(res.c) * w;
    double nphi = phi.norm();
    if (nphi <= 1e-15) throw qslab_error("pure_substate: degenerate phi");
    phi /= nphi;

    res.phi = PureState(std::move(phi), psi.layout);
    double ov = std::abs(res.phi.a.dot(psi.a));
    res.overlap_sq = ov * ov;
    res.distance = 2.0 * std::sqrt(std::max(0.0, 1.0 - res.overlap_sq));
    return res;
}

double substate_margin(const Mat& rho_prime, const Mat& sigma, double c) {
    if (rho_prime.rows() != sigma.rows()) throw qslab_error("substate_check: dimension mismatch");
    return eigvalsh(sigma - c * rho_prime)[0];
}

bool substate_check(const Mat& rho_prime, const Mat& sigma, double c, double tol) {
    return substate_margin(rho_prime, sigma, c) >= -tol;
}

// ---------------------------------------------------------------------------
// lifting
// ---------------------------------------------------------------------------

namespace {

struct KPrime {
    double d = 0, k_prime = 0;
};

KPrime kprime_for(double d, double beta) {
    if (!(beta > 1.0)) throw qslab_error("lifting: beta must exceed 1");
    if (!std::isfinite(d)) throw qslab_error("lifting: divergence is infinite (support violation)");
    KPrime k;
    k.d = d;
    k.k_prime = beta * d - 2.0 * std::log2(1.0 - 1.0 / std::sqrt(beta));
    return k;
}

DensityMatrix reduce_h(const PureState& psi) {
    if (!psi.layout || psi.layout->factors() != 2)
        throw qslab_error("lifting: psi needs a bipartite {H, K} layout");
    return partial_trace(psi, *psi.layout, {0});
}

// theta = F|psi> normalized (the lemma's tilted purification).
PureState tilted_state(const PureState& psi, const Mat& f) {
    Vec t = f * psi.a;
    double n = t.norm();
    if (n <= 1e-150) throw qslab_error("lifting: F annihilates psi");
    return PureState(t / n, psi.layout);
}

} // namespace

LiftingStepResult lifting_step(const PureState& psi, const Mat& sigma,
                               const PovmElement& f, double beta) {
    DensityMatrix rho = reduce_h(psi);
    if (sigma.rows() != rho.dim()) throw qslab_error("lifting_step: sigma dimension mismatch");
    if (f.m.rows() != psi.dim()) throw qslab_error("lifting_step: F dimension mismatch");
    {
        Eigen::VectorXd w = eigvalsh(f.m);
        if (w[0] < -1e-9 || w[w.size() - 1] > 1 + 1e-9)
            throw qslab_error("lifting_step: F outside [0, 1]");
    }

    LiftingStepResult res;
    DivergenceResult dres = obs_divergence_quantum(rho.m, sigma);
    KPrime kp = kprime_for(dres.value, beta);
    res.d_base = kp.d;
    res.k_prime = kp.k_prime;

    res.p = std::clamp((psi.a.adjoint() * f.m * psi.a)(0, 0).real(), 0.0, 1.0);
    if (res.p <= 0) throw qslab_error("lifting_step: tr(F psi psi^dag) = 0");

    res.theta = tilted_state(psi, f.m);
    auto [phi, overlap] = uhlmann_closest_purification(DensityMatrix(sigma), res.theta);
    res.phi = std::move(phi);
    res.overlap = overlap;
    res.q = std::max(0.0, (res.phi.a.adjoint() * f.m * res.phi.a)(0, 0).real());
    res.guarantee = res.p * std::exp2(-res.k_prime / res.p);
    return res;
}

LiftingParams LiftingParams::defaults_for(double d) {
    if (!std::isfinite(d) || d < 0) throw qslab_error("LiftingParams: bad divergence");
    LiftingParams p;
    p.gamma = std::sqrt(d + 1.0);
    double inv = 1.0 / p.gamma;
    p.beta = (1.0 + inv) * (1.0 + inv);
    return p;
}

namespace {

// Best response: minimize tr(F omega) over 0 <= F <= 1 with tr(F P) >= p,
// P = psi psi^dag.  F_lambda = projector onto the negative eigenspace of
// omega - lambda P; g(lambda) = tr(F_lambda P) is nondecreasing, and
// d(lambda) = lambda p + sum_i min(0, eig_i(omega - lambda P)) is a weak-
// duality lower bound on the minimum for every lambda >= 0.
struct BestResponse {
    Mat f;
    double primal = 0;   // tr(F omega) at the returned (feasible) F
    double dual = 0;     // best certified lower bound seen
};

BestResponse best_response(const Mat& omega, const Vec& psi, double p) {
    const int n = static_cast<int>(omega.rows());
    auto eval = [&](double lam, Mat* f_out) {
        Eigh e = eigh(omega - lam * (psi * psi.adjoint()));
        double g = 0, dual = lam * p, primal_omega = 0;
        Mat f;
        if (f_out) f = Mat::Zero(n, n);
        for (int i = 0; i < e.w.size(); ++i) {
            if (e.w[i] >= 0) continue;
            dual += e.w[i];
            double pvi = std::norm(psi.dot(e.v.col(i)));
            g += pvi;
            primal_omega += e.w[i] + lam * pvi; // <v|omega|v> = eig + lam <v|P|v>
            if (f_out) f += e.v.col(i) * e.v.col(i).adjoint();
        }
        if (f_out) *f_out = f;
        return std::tuple<double, double, double>(g, dual, primal_omega);
    };

    BestResponse br;
    br.dual = -1e300;

    // bracket: find lambda with g >= p
    double lo = 0, hi = 1;
    double g_hi = 0;
    for (int it = 0; it < 60; ++it) {
        auto [g, dual, prim] = eval(hi, nullptr);
        br.dual = std::max(br.dual, dual);
        g_hi = g;
        if (g >= p) break;
        lo = hi;
        hi *= 2;
    }
    if (g_hi < p) {
        // p ~ 1 and omega nearly orthogonal complement; settle at the cap
        auto [g, dual, prim] = eval(hi, &br.f);
        br.dual = std::max(br.dual, dual);
        br.primal = prim;
        return br;
    }
    for (int it = 0; it < 64; ++it) {
        double mid = 0.5 * (lo + hi);
        auto [g, dual, prim] = eval(mid, nullptr);
        br.dual = std::max(br.dual, dual);
        if (g >= p) hi = mid; else lo = mid;
    }
    auto [g, dual, prim] = eval(hi, &br.f); // feasible side
    br.dual = std::max(br.dual, dual);
    br.primal = prim;
    return br;
}

} // namespace

SaddleResult saddle_extension(const PureState& psi, const Mat& sigma, double p,
                              double beta, const LiftingParams& prm) {
    if (!(p > 0 && p <= 1)) throw qslab_error("saddle_extension: p must lie in (0, 1]");
    DensityMatrix rho = reduce_h(psi);
    if (sigma.rows() != rho.dim()) throw qslab_error("saddle_extension: sigma dimension mismatch");

    DivergenceResult dres = obs_divergence_quantum(rho.m, sigma);
    KPrime kp = kprime_for(dres.value, beta);

    SaddleResult res;
    res.p = p;
    res.k_prime = kp.k_prime;
    res.target = p * std::exp2(-kp.k_prime / p);

    DensityMatrix sigma_dm(sigma);
    auto reply = [&](const Mat& f) {
        PureState theta = tilted_state(psi, f);
        return uhlmann_closest_purification(sigma_dm, theta).first;
    };

    // start from the purification of sigma closest to psi itself
    PureState phi0 = uhlmann_closest_purification(sigma_dm, psi).first;
    Mat omega_sum = phi0.a * phi0.a.adjoint();
    int count = 1;
    Mat omega_avg = omega_sum;

    Mat f_avg;
    Mat omega_best = omega_avg;
    double best_cert = -1e300;
    int last_gain = 0;
    const int patience = std::max(100, prm.game_iters / 10);

    for (int t = 0; t < prm.game_iters; ++t) {
        res.iterations = t + 1;
        BestResponse br = best_response(omega_avg, psi.a, p);
        if (br.dual > best_cert + 1e-15) {
            if (br.dual > best_cert + prm.game_tol * 1e-2) last_gain = t;
            best_cert = br.dual;
            omega_best = omega_avg;
        }
        if (best_cert >= res.target - 1e-12) break;         // certified early
        if (t - last_gain > patience) break;                 // stalled
        f_avg = (t == 0) ? br.f : Mat((static_cast<double>(t) * f_avg + br.f) / static_cast<double>(t + 1));
        PureState phi = reply(f_avg);
        omega_sum += phi.a * phi.a.adjoint();
        ++count;
        omega_avg = omega_sum / static_cast<double>(count);
    }

    res.certified_value = best_cert;
    res.certified = best_cert >= res.target - prm.game_tol;
    res.omega = DensityMatrix(herm(omega_best), psi.layout);
    return res;
}

LiftingOutcome divergence_lifting(const PureState& psi, const Mat& sigma,
                                  const std::optional<LiftingParams>& prm) {
    DensityMatrix rho = reduce_h(psi);
    DivergenceResult dres = obs_divergence_quantum(rho.m, sigma);
    if (dres.infinite())
        throw qslab_error("divergence_lifting: D(rho||sigma) infinite (support violation)");

    LiftingOutcome out;
    out.base_d = dres.value;
    out.params = prm ? *prm : LiftingParams::defaults_for(out.base_d);
    if (out.params.l < 1) throw qslab_error("divergence_lifting: l must be >= 1");

    const int l = out.params.l;
    const double gamma = out.params.gamma;
    double t_gamma = 0;
    Mat omega = Mat::Zero(psi.dim(), psi.dim());
    for (int i = 1; i <= l; ++i) {
        double wgt = std::pow(static_cast<double>(i), gamma - 1.0);
        SaddleResult lvl = saddle_extension(psi, sigma, static_cast<double>(i) / l,
                                            out.params.beta, out.params);
        out.all_certified = out.all_certified && lvl.certified;
        omega += wgt * lvl.omega.m;
        t_gamma += wgt;
        out.levels.push_back(std::move(lvl));
    }
    omega /= t_gamma;

    // Regularize with a sliver of the product extension sigma (x) I/d_K: the
    // reduction to sigma stays exact while the support is forced to cover
    // psi (the game's finite-iteration omega can be rank deficient, which
    // would report an infinite divergence).  The measured value grows by at
    // most log2(1/(1 - delta)) ~ 1.4e-6.
    const double delta = 1e-6;
    const int dk = psi.dim() / sigma.rows();
    omega = (1.0 - delta) * omega +
            delta * kron(sigma, Mat::Identity(dk, dk) / static_cast<double>(dk));
    out.omega = DensityMatrix(herm(omega), psi.layout);

    out.measured_d = obs_divergence_quantum(psi.density().m, out.omega.m).value;
    out.bound = out.base_d + 4.0 * std::sqrt(out.base_d + 1.0) +
                2.0 * std::log2(out.base_d + 1.0) + 4.0;
    out.reduction_err =
        trace_distance(partial_trace(out.omega, *psi.layout, {0}).m, sigma);
    return out;
}

QuantumSubstateResult quantum_substate(const DensityMatrix& rho, const Mat& sigma, double r,
                                       const std::optional<LiftingParams>& prm) {
    require_density(rho.m, "quantum_substate(rho)");
    PureState psi = canonical_purification(rho);
    return quantum_substate_from_purification(psi, sigma, r, prm);
}

QuantumSubstateResult quantum_substate_from_purification(
    const PureState& psi, const Mat& sigma, double r,
    const std::optional<LiftingParams>& prm) {
    check_r(r);
    require_density(sigma, "quantum_substate(sigma)");
    if (!psi.layout || psi.layout->factors() != 2)
        throw qslab_error("quantum_substate: psi needs a bipartite layout");
    const int dh = psi.layout->factor_dims[0];
    const int dk = psi.layout->factor_dims[1];
    if (dh != sigma.rows()) throw qslab_error("quantum_substate: sigma dimension mismatch");
    if (dk < dh) throw qslab_error("quantum_substate: dim(K) < dim(H)");

    QuantumSubstateResult res;
    res.psi = psi;
    res.r = r;

    res.lifting = divergence_lifting(psi, sigma, prm);
    res.k_base = res.lifting.base_d;
    res.k_lift = res.lifting.measured_d;

    DensityMatrix rho = partial_trace(psi, *psi.layout, {0});
    res.s_base = relative_entropy(rho.m, sigma);
    if (std::isfinite(res.s_base)) {
        res.k_prime_theory = res.s_base + 4.0 * std::sqrt(res.s_base + 2.0) +
                             2.0 * std::log2(res.s_base + 2.0) + 5.0;
        res.alpha_theory = (r - 1) / (r * std::exp2(r * res.k_prime_theory));
    }

    PureSubstateResult ps = pure_substate(psi, res.lifting.omega.m, r, res.k_lift);
    res.phi = ps.phi;
    res.phi.layout = psi.layout;
    res.alpha = ps.alpha;
    res.distance = ps.distance;

    // complement state tau2 = (sigma - alpha tau1)/(1 - alpha), clamped
    DensityMatrix tau1 = partial_trace(res.phi, *psi.layout, {0});
    Mat tau2 = (sigma - res.alpha * tau1.m) / (1.0 - res.alpha);
    Eigh e = eigh(tau2);
    double clamped = 0, kept = 0;
    Eigen::VectorXd w(e.w.size());
    for (int i = 0; i < e.w.size(); ++i) {
        if (e.w[i] < 0) { clamped += -e.w[i]; w[i] = 0; }
        else { w[i] = e.w[i]; kept += e.w[i]; }
    }
    res.clamped_mass = clamped;
    if (clamped > 1e-6)
        throw qslab_error("quantum_substate: tau2 clamping exceeded 1e-6 mass");
    if (kept <= 0) throw qslab_error("quantum_substate: tau2 vanished");
    tau2 = e.v * (w / kept).asDiagonal() * e.v.adjoint();

    PureState theta_hh = canonical_purification(DensityMatrix(herm(tau2)));
    // embed the purifying register H into K (dk >= dh)
    Vec theta = Vec::Zero(static_cast<long>(dh) * dk);
    for (int i = 0; i < dh; ++i)
        for (int j = 0; j < dh; ++j)
            theta[static_cast<long>(i) * dk + j] = theta_hh.a[static_cast<long>(i) * dh + j];
    res.theta = PureState(std::move(theta), psi.layout);

    // zeta = sqrt(alpha) phi |1> + sqrt(1-alpha) theta |0> on H (x) K (x) C^2
    Vec zeta = Vec::Zero(static_cast<long>(dh) * dk * 2);
    for (long u = 0; u < static_cast<long>(dh) * dk; ++u) {
        zeta[2 * u + 1] = std::sqrt(res.alpha) * res.phi.a[u];
        zeta[2 * u + 0] = std::sqrt(1.0 - res.alpha) * res.theta.a[u];
    }
    res.zeta = PureState(std::move(zeta), SubsystemLayout{{dh, dk, 2}});

    res.reduction_err =
        trace_distance(partial_trace(res.zeta, *res.zeta.layout, {0}).m, sigma);
    return res;
}

} // namespace qslab
