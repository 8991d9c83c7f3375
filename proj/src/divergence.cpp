#include "qslab/divergence.hpp"

#include "qslab/linalg.hpp"
#include "qslab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qslab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSupportCutoff = 1e-10; // relative eigenvalue threshold
} // namespace

bool DivergenceResult::infinite() const { return std::isinf(value); }

double trace_distance(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows())
        throw qslab_error("trace_distance: dimension mismatch");
    return eigvalsh(rho - sigma).cwiseAbs().sum();
}

double trace_distance(const PureState& a, const PureState& b) {
    // 2 sqrt(1 - |<a|b>|^2) for unit vectors
    double ov = std::abs(a.a.dot(b.a));
    double s = 1.0 - ov * ov;
    return 2.0 * std::sqrt(std::max(0.0, s));
}

double l1_distance(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw qslab_error("l1_distance: length mismatch");
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return s;
}

std::pair<Povm, double> optimal_distinguishing_measurement(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows())
        throw qslab_error("optimal_distinguishing_measurement: dimension mismatch");
    Eigh e = eigh(rho - sigma);
    Mat f = eig_projector(e, [](double w) { return w >= 0; });
    Mat g = Mat::Identity(rho.rows(), rho.rows()) - f;
    double tv = std::abs(herm_inner(f, rho) - herm_inner(f, sigma)) +
                std::abs(herm_inner(g, rho) - herm_inner(g, sigma));
    Povm m;
    m.elements = {f, g};
    return {std::move(m), tv};
}

double fidelity(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows()) throw qslab_error("fidelity: dimension mismatch");
    // nuclear norm of sqrt(sigma) sqrt(rho): its squared singular values are
    // the eigenvalues of sqrt(rho) sigma sqrt(rho)
    Mat prod = msqrt_psd(sigma) * msqrt_psd(rho);
    Eigen::JacobiSVD<Mat> svd(prod);
    return svd.singularValues().sum();
}

double bhattacharyya(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw qslab_error("bhattacharyya: length mismatch");
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i)
        s += std::sqrt(std::max(0.0, p[i]) * std::max(0.0, q[i]));
    return s;
}

Povm fuchs_caves_measurement(const Mat& rho, const Mat& sigma) {
    const int d = static_cast<int>(rho.rows());
    if (sigma.rows() != d) throw qslab_error("fuchs_caves_measurement: dimension mismatch");
    // regularize so rho^{-1/2} exists; the basis is all we keep, and the
    // postcondition tolerance (1e-6) absorbs the 1e-12 shift
    Mat rho_e = herm(rho) + 1e-12 * Mat::Identity(d, d);
    Mat a = msqrt_psd(rho_e, 1e-9);
    Mat ai = matfunc_herm(rho_e, [](double x) { return x > 0 ? 1.0 / std::sqrt(x) : 0.0; });
    Mat b = msqrt_psd(herm(a * herm(sigma) * a), 1e-8);
    Mat m = herm(ai * b * ai); // solves M rho M = sigma on the joint support
    Eigh e = eigh(m);
    Povm out;
    for (int i = 0; i < d; ++i)
        out.elements.push_back(e.v.col(i) * e.v.col(i).adjoint());
    return out;
}

double von_neumann_entropy(const Mat& rho) {
    Eigen::VectorXd w = eigvalsh(rho);
    double s = 0;
    for (int i = 0; i < w.size(); ++i) {
        if (w[i] < -1e-10)
            throw qslab_error("von_neumann_entropy: input not PSD");
        s -= xlog2x(std::max(0.0, w[i]));
    }
    return s;
}

double shannon_entropy(const std::vector<double>& p) {
    double s = 0;
    for (double x : p) {
        if (x < -1e-12) throw qslab_error("shannon_entropy: negative probability");
        s -= xlog2x(std::max(0.0, x));
    }
    return s;
}

double binary_entropy(double p) {
    if (p < -1e-12 || p > 1 + 1e-12) throw qslab_error("binary_entropy: p outside [0,1]");
    p = std::min(1.0, std::max(0.0, p));
    return -xlog2x(p) - xlog2x(1 - p);
}

double relative_entropy(const Mat& rho, const Mat& sigma) {
    if (rho.rows() != sigma.rows()) throw qslab_error("relative_entropy: dimension mismatch");
    Eigh er = eigh(rho);
    Eigh es = eigh(sigma);
    const double smax = es.w.size() ? es.w[es.w.size() - 1] : 0.0;
    const double cut = kSupportCutoff * std::max(smax, 1e-300);

    double out_of_support = 0, s = 0;
    for (int j = 0; j < es.w.size(); ++j) {
        double wj_rho = std::max(0.0, (es.v.col(j).adjoint() * rho * es.v.col(j))(0, 0).real());
        if (es.w[j] <= cut)
            out_of_support += wj_rho;
        else
            s -= wj_rho * std::log2(es.w[j]);
    }
    if (out_of_support > kSupportCutoff) return kInf;
    for (int i = 0; i < er.w.size(); ++i) {
        if (er.w[i] < -1e-10) throw qslab_error("relative_entropy: rho not PSD");
        s += xlog2x(std::max(0.0, er.w[i]));
    }
    return s;
}

double relative_entropy(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw qslab_error("relative_entropy: length mismatch");
    double s = 0;
    for (size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0) continue;
        if (q[i] <= 0) return kInf;
        s += p[i] * std::log2(p[i] / q[i]);
    }
    return s;
}

double mutual_information(const DensityMatrix& joint, const SubsystemLayout& lay) {
    if (lay.factors() != 2)
        throw qslab_error("mutual_information: layout must have exactly two factors");
    DensityMatrix a = partial_trace(joint, lay, {0});
    DensityMatrix b = partial_trace(joint, lay, {1});
    double v = von_neumann_entropy(a.m) + von_neumann_entropy(b.m) - von_neumann_entropy(joint.m);
    if (v < 0) {
        if (v < -1e-8) throw qslab_error("mutual_information: negative beyond tolerance");
        v = 0;
    }
    return v;
}

double cq_mutual_information(const std::vector<double>& prior, const std::vector<Mat>& states) {
    if (prior.size() != states.size())
        throw qslab_error("cq_mutual_information: prior/state count mismatch");
    if (states.empty()) throw qslab_error("cq_mutual_information: empty ensemble");
    Mat avg = Mat::Zero(states[0].rows(), states[0].cols());
    double cond = 0;
    for (size_t i = 0; i < states.size(); ++i) {
        avg += prior[i] * states[i];
        cond += prior[i] * von_neumann_entropy(states[i]);
    }
    double v = von_neumann_entropy(avg) - cond;
    return v < 0 && v > -1e-9 ? 0.0 : v;
}

// ---------------------------------------------------------------------------
// observational divergence
// ---------------------------------------------------------------------------

namespace {

double subset_objective(double p, double q) {
    if (p <= 0) return 0.0;
    if (q <= 0) return kInf;
    return p * std::log2(p / q);
}

void check_distribution(const std::vector<double>& p, const char* what) {
    double s = 0;
    for (double x : p) {
        if (x < -1e-12) throw qslab_error(std::string(what) + ": negative entry");
        s += x;
    }
    if (std::abs(s - 1.0) > 1e-9)
        throw qslab_error(std::string(what) + ": entries sum to " + std::to_string(s));
}

} // namespace

DivergenceResult obs_divergence_classical(const std::vector<double>& p,
                                          const std::vector<double>& q) {
    const int n = static_cast<int>(p.size());
    if (static_cast<int>(q.size()) != n)
        throw qslab_error("obs_divergence_classical: length mismatch");
    if (n > 24) throw qslab_error("obs_divergence_classical: n > 24 refused");
    if (n == 0) throw qslab_error("obs_divergence_classical: empty input");
    check_distribution(p, "obs_divergence_classical(P)");
    check_distribution(q, "obs_divergence_classical(Q)");

    DivergenceResult res;
    res.stats.grid_size = 1L << n;

    // support violation: some singleton already certifies +infinity
    for (int i = 0; i < n; ++i) {
        if (p[i] > 0 && q[i] <= 0) {
            res.value = kInf;
            res.witness_subset = std::vector<int>{i};
            return res;
        }
    }

    // Gray-code walk over all subsets with incremental sums; the winner is
    // re-evaluated from scratch at the end to shed accumulated rounding.
    double ps = 0, qs = 0, best = 0;
    std::uint32_t best_mask = 0, prev_gray = 0;
    const std::uint32_t total = 1u << n;
    for (std::uint32_t c = 1; c < total; ++c) {
        std::uint32_t gray = c ^ (c >> 1);
        std::uint32_t flipped = gray ^ prev_gray;
        int bit = __builtin_ctz(flipped);
        if (gray & flipped) { ps += p[bit]; qs += q[bit]; }
        else { ps -= p[bit]; qs -= q[bit]; }
        prev_gray = gray;
        double v = subset_objective(ps, qs);
        if (v > best) { best = v; best_mask = gray; }
        ++res.stats.evaluations;
    }

    std::vector<int> subset;
    double pe = 0, qe = 0;
    for (int i = 0; i < n; ++i)
        if (best_mask & (1u << i)) { subset.push_back(i); pe += p[i]; qe += q[i]; }
    res.value = subset_objective(pe, qe);
    if (res.value < 0) res.value = 0; // empty-set convention
    res.witness_subset = std::move(subset);
    return res;
}

namespace {

// Working data for the sweep, restricted to supp(sigma).
struct SweepSpace {
    Mat rho, sigma;  // projected
    Mat basis;       // columns: support basis vectors (lift = basis * F * basis^dagger)
    int d = 0;
};

struct SweepEval {
    double value = 0, p = 0, q = 0;
};

// F_t = projector onto eigenvalues of rho - t*sigma above ktol.
SweepEval eval_t(const SweepSpace& sp, double t, bool include_kernel, Mat* f_out) {
    Eigh e = eigh(sp.rho - t * sp.sigma);
    double scale = 0;
    for (int i = 0; i < e.w.size(); ++i) scale = std::max(scale, std::abs(e.w[i]));
    const double ktol = 1e-12 * std::max(1.0, scale);
    double p = 0, q = 0;
    Mat f;
    if (f_out) f = Mat::Zero(sp.d, sp.d);
    for (int i = 0; i < e.w.size(); ++i) {
        bool in = include_kernel ? (e.w[i] >= -ktol) : (e.w[i] > ktol);
        if (!in) continue;
        p += (e.v.col(i).adjoint() * sp.rho * e.v.col(i))(0, 0).real();
        q += (e.v.col(i).adjoint() * sp.sigma * e.v.col(i))(0, 0).real();
        if (f_out) f += e.v.col(i) * e.v.col(i).adjoint();
    }
    if (f_out) *f_out = f;
    SweepEval ev;
    ev.p = std::max(0.0, p);
    ev.q = std::max(0.0, q);
    ev.value = subset_objective(ev.p, ev.q);
    if (std::isinf(ev.value)) ev.value = subset_objective(ev.p, 1e-300); // kernel dust guard
    return ev;
}

} // namespace

DivergenceResult obs_divergence_quantum(const Mat& rho, const Mat& sigma,
                                        const SweepConfig& cfg) {
    const int d = static_cast<int>(rho.rows());
    if (sigma.rows() != d) throw qslab_error("obs_divergence_quantum: dimension mismatch");

    DivergenceResult res;

    // support test, cutoff relative to the largest eigenvalue of sigma
    Eigh es = eigh(sigma);
    const double smax = es.w[es.w.size() - 1];
    const double cut = kSupportCutoff * std::max(smax, 1e-300);
    Mat null_proj = Mat::Zero(d, d);
    int rank = 0;
    for (int j = 0; j < es.w.size(); ++j) {
        if (es.w[j] <= cut) null_proj += es.v.col(j) * es.v.col(j).adjoint();
        else ++rank;
    }
    if (rank < d) {
        double mass = herm_inner(null_proj, rho);
        if (mass > kSupportCutoff) {
            res.value = kInf;
            res.witness_op = PovmElement{null_proj};
            return res;
        }
    }

    SweepSpace sp;
    sp.d = rank;
    sp.basis = es.v.rightCols(rank); // eigenvalues ascend: support sits on the right
    sp.rho = herm(sp.basis.adjoint() * rho * sp.basis);
    sp.sigma = herm(sp.basis.adjoint() * sigma * sp.basis);

    // t grid: 0, a log-spaced sweep, and the pencil breakpoints t where
    // det(rho - t sigma) = 0 (plus geometric midpoints).  Between consecutive
    // breakpoints the projector is constant for commuting pairs, so the
    // breakpoint set makes diagonal inputs exact.
    std::vector<double> ts;
    ts.push_back(0.0);
    for (int i = 0; i < cfg.grid; ++i) {
        double u = static_cast<double>(i) / std::max(1, cfg.grid - 1);
        ts.push_back(cfg.t_min * std::pow(cfg.t_max / cfg.t_min, u));
    }
    if (cfg.augment_pencil) {
        Mat isq = matfunc_herm(sp.sigma, [&](double x) { return x > cut ? 1.0 / std::sqrt(x) : 0.0; });
        Eigen::VectorXd pw = eigvalsh(herm(isq * sp.rho * isq));
        std::vector<double> bp;
        for (int i = 0; i < pw.size(); ++i)
            if (pw[i] > 0) bp.push_back(pw[i]);
        std::sort(bp.begin(), bp.end());
        for (size_t i = 0; i < bp.size(); ++i) {
            ts.push_back(bp[i]);
            if (i + 1 < bp.size() && bp[i + 1] > bp[i])
                ts.push_back(std::sqrt(bp[i] * bp[i + 1]));
        }
        if (!bp.empty()) {
            ts.push_back(bp.front() * 0.5);
            ts.push_back(bp.back() * 2.0);
        }
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    res.stats.grid_size = static_cast<long>(ts.size());

    double best_v = -1;
    size_t best_i = 0;
    for (size_t i = 0; i < ts.size(); ++i) {
        SweepEval ev = eval_t(sp, ts[i], false, nullptr);
        ++res.stats.evaluations;
        if (ev.value > best_v) { best_v = ev.value; best_i = i; }
    }
    const double grid_best = std::max(0.0, best_v);

    // golden-section polish between the neighbors of the best grid point
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = ts[best_i > 0 ? best_i - 1 : 0];
    double hi = ts[best_i + 1 < ts.size() ? best_i + 1 : ts.size() - 1];
    double best_t = ts[best_i];
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = eval_t(sp, x1, false, nullptr).value;
    double f2 = eval_t(sp, x2, false, nullptr).value;
    res.stats.evaluations += 2;
    for (int it = 0; it < cfg.refine_iters; ++it) {
        if (hi - lo <= cfg.rel_tol * std::max(1e-300, best_t)) break;
        if (f1 >= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = eval_t(sp, x1, false, nullptr).value;
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = eval_t(sp, x2, false, nullptr).value;
        }
        ++res.stats.evaluations;
        double cand = std::max(f1, f2);
        if (cand > best_v) { best_v = cand; best_t = f1 >= f2 ? x1 : x2; }
    }

    // kernel boundary: at the winning t evaluate both the strictly-positive
    // projector and the one including the kernel, keep the better
    Mat f_excl, f_incl;
    SweepEval ev_excl = eval_t(sp, best_t, false, &f_excl);
    SweepEval ev_incl = eval_t(sp, best_t, true, &f_incl);
    res.stats.evaluations += 2;
    SweepEval ev = ev_excl;
    Mat f = f_excl;
    if (ev_incl.value > ev_excl.value) { ev = ev_incl; f = f_incl; }

    if (ev.value <= 0) {
        // the supremum candidate went nonpositive; F = 0 certifies value 0
        res.value = 0;
        res.witness_op = PovmElement{Mat::Zero(d, d)};
    } else {
        res.value = ev.value;
        res.witness_op = PovmElement{sp.basis * f * sp.basis.adjoint()};
    }
    res.stats.refinement_gap = res.value - grid_best;
    res.stats.best_t = best_t;
    return res;
}

} // namespace qslab
