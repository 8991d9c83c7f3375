#include "qslab/qstate.hpp"

#include "qslab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qslab {

std::string ValidationReport::describe() const {
    std::ostringstream os;
    os << "hermitian=" << (hermitian ? "yes" : "no") << " (err " << herm_err << "), "
       << "psd=" << (psd ? "yes" : "no") << " (min eig " << min_eig << "), "
       << "unit_trace=" << (unit_trace ? "yes" : "no") << " (err " << trace_err << ")";
    return os.str();
}

ValidationReport validate_density(const Mat& m, double tol) {
    if (m.rows() != m.cols()) throw qslab_error("validate_density: matrix not square");
    ValidationReport r;
    r.tol = tol;
    r.herm_err = (m - m.adjoint()).cwiseAbs().maxCoeff();
    r.hermitian = r.herm_err <= tol;
    Eigen::VectorXd w = eigvalsh(m);
    r.min_eig = w.size() ? w[0] : 0.0;
    r.psd = r.min_eig >= -tol;
    r.trace_err = std::abs(m.trace() - cxd(1, 0));
    r.unit_trace = r.trace_err <= tol;
    return r;
}

void require_density(const Mat& m, const char* what, double tol) {
    ValidationReport r = validate_density(m, tol);
    if (!r.ok())
        throw qslab_error(std::string(what) + ": not a density matrix: " + r.describe());
}

namespace {

SubsystemLayout combined_layout(const std::optional<SubsystemLayout>& a, int da,
                                const std::optional<SubsystemLayout>& b, int db) {
    SubsystemLayout out;
    if (a) out.factor_dims = a->factor_dims; else out.factor_dims = {da};
    if (b) out.factor_dims.insert(out.factor_dims.end(), b->factor_dims.begin(), b->factor_dims.end());
    else out.factor_dims.push_back(db);
    return out;
}

// Decompose the layout into kept/traced index tables: base offsets such that
// full_index = kept_base[a] + traced_base[t].
struct TraceTables {
    std::vector<long> kept_base, traced_base;
    std::vector<int> kept_dims;
    int dk = 1, dt = 1;
};

TraceTables make_tables(const SubsystemLayout& lay, const std::vector<int>& keep) {
    const int nf = lay.factors();
    for (size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 0 || keep[i] >= nf)
            throw qslab_error("partial_trace: keep index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw qslab_error("partial_trace: keep indices must be strictly increasing");
    }
    std::vector<long> stride(nf, 1);
    for (int f = nf - 2; f >= 0; --f) stride[f] = stride[f + 1] * lay.factor_dims[f + 1];

    std::vector<int> traced;
    {
        size_t j = 0;
        for (int f = 0; f < nf; ++f) {
            if (j < keep.size() && keep[j] == f) { ++j; continue; }
            traced.push_back(f);
        }
    }

    TraceTables t;
    for (int f : keep) { t.dk *= lay.factor_dims[f]; t.kept_dims.push_back(lay.factor_dims[f]); }
    for (int f : traced) t.dt *= lay.factor_dims[f];

    t.kept_base.assign(t.dk, 0);
    for (int a = 0; a < t.dk; ++a) {
        int rem = a;
        long base = 0;
        for (int j = static_cast<int>(keep.size()) - 1; j >= 0; --j) {
            int d = lay.factor_dims[keep[j]];
            base += static_cast<long>(rem % d) * stride[keep[j]];
            rem /= d;
        }
        t.kept_base[a] = base;
    }
    t.traced_base.assign(t.dt, 0);
    for (int a = 0; a < t.dt; ++a) {
        int rem = a;
        long base = 0;
        for (int j = static_cast<int>(traced.size()) - 1; j >= 0; --j) {
            int d = lay.factor_dims[traced[j]];
            base += static_cast<long>(rem % d) * stride[traced[j]];
            rem /= d;
        }
        t.traced_base[a] = base;
    }
    return t;
}

SubsystemLayout kept_layout(const SubsystemLayout& lay, const std::vector<int>& keep) {
    SubsystemLayout out;
    for (int f : keep) out.factor_dims.push_back(lay.factor_dims[f]);
    return out;
}

} // namespace

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    return DensityMatrix(kron(a.m, b.m), combined_layout(a.layout, a.dim(), b.layout, b.dim()));
}

PureState tensor(const PureState& a, const PureState& b) {
    return PureState(kron(a.a, b.a), combined_layout(a.layout, a.dim(), b.layout, b.dim()));
}

DensityMatrix partial_trace(const DensityMatrix& st, const SubsystemLayout& lay,
                            const std::vector<int>& keep) {
    if (lay.dim() != st.dim())
        throw qslab_error("partial_trace: layout does not match state dimension");
    TraceTables t = make_tables(lay, keep);
    Mat out = Mat::Zero(t.dk, t.dk);
    for (int a = 0; a < t.dk; ++a)
        for (int b = 0; b < t.dk; ++b) {
            cxd s(0, 0);
            for (int u = 0; u < t.dt; ++u)
                s += st.m(t.kept_base[a] + t.traced_base[u], t.kept_base[b] + t.traced_base[u]);
            out(a, b) = s;
        }
    return DensityMatrix(std::move(out), kept_layout(lay, keep));
}

DensityMatrix partial_trace(const PureState& st, const SubsystemLayout& lay,
                            const std::vector<int>& keep) {
    if (lay.dim() != st.dim())
        throw qslab_error("partial_trace: layout does not match state dimension");
    TraceTables t = make_tables(lay, keep);
    Mat amp(t.dk, t.dt);
    for (int a = 0; a < t.dk; ++a)
        for (int u = 0; u < t.dt; ++u)
            amp(a, u) = st.a[t.kept_base[a] + t.traced_base[u]];
    return DensityMatrix(amp * amp.adjoint(), kept_layout(lay, keep));
}

PureState canonical_purification(const DensityMatrix& rho) {
    require_density(rho.m, "canonical_purification");
    const int d = rho.dim();
    Eigh e = eigh_desc(rho.m);
    Vec amps = Vec::Zero(static_cast<long>(d) * d);
    for (int i = 0; i < d; ++i) {
        double lam = e.w[i];
        if (lam < 0) {
            if (lam < -1e-10)
                throw qslab_error("canonical_purification: negative eigenvalue below clamp window");
            lam = 0;
        }
        if (lam == 0) continue;
        Vec v = e.v.col(i);
        // phase fix: largest-magnitude component (first within 1e-12 of the max)
        // becomes real positive
        int arg = 0;
        double mx = 0;
        for (int a = 0; a < d; ++a) mx = std::max(mx, std::abs(v[a]));
        for (int a = 0; a < d; ++a)
            if (std::abs(v[a]) >= mx - 1e-12) { arg = a; break; }
        if (std::abs(v[arg]) > 0) v *= std::conj(v[arg]) / std::abs(v[arg]);
        double s = std::sqrt(lam);
        for (int a = 0; a < d; ++a) amps[static_cast<long>(a) * d + i] = s * v[a];
    }
    return PureState(std::move(amps), SubsystemLayout::pair(d, d));
}

std::vector<double> apply_povm(const Povm& m, const DensityMatrix& rho) {
    if (m.elements.empty()) throw qslab_error("apply_povm: empty POVM");
    const int d = rho.dim();
    Mat sum = Mat::Zero(d, d);
    for (const Mat& f : m.elements) {
        if (f.rows() != d || f.cols() != d)
            throw qslab_error("apply_povm: element dimension mismatch");
        if ((f - f.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw qslab_error("apply_povm: element not hermitian");
        Eigen::VectorXd w = eigvalsh(f);
        if (w[0] < -1e-10 || w[w.size() - 1] > 1 + 1e-10)
            throw qslab_error("apply_povm: element outside [0, 1]");
        sum += f;
    }
    if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
        throw qslab_error("apply_povm: completeness violated");
    std::vector<double> p;
    p.reserve(m.elements.size());
    for (const Mat& f : m.elements) {
        double v = herm_inner(f, rho.m);
        if (v < 0) {
            if (v < -1e-10) throw qslab_error("apply_povm: probability below clamp window");
            v = 0;
        }
        p.push_back(v);
    }
    return p;
}

std::pair<PureState, double> uhlmann_closest_purification(const DensityMatrix& sigma,
                                                          const PureState& theta) {
    if (!theta.layout || theta.layout->factors() != 2)
        throw qslab_error("uhlmann_closest_purification: theta needs a bipartite layout");
    const int dh = theta.layout->factor_dims[0];
    const int dk = theta.layout->factor_dims[1];
    if (dh != sigma.dim())
        throw qslab_error("uhlmann_closest_purification: sigma dimension mismatch");
    if (dk < dh)
        throw qslab_error("uhlmann_closest_purification: dim(K) < dim(H)");
    require_density(sigma.m, "uhlmann_closest_purification(sigma)");

    // theta = (X (x) 1)|Gamma>, X = amplitude matrix; the maximizer aligns the
    // polar phases of X^dagger sqrt(sigma), realized here through the thin SVD
    // of sqrt(sigma) X.
    Mat x(dh, dk);
    for (int i = 0; i < dh; ++i)
        for (int j = 0; j < dk; ++j) x(i, j) = theta.a[static_cast<long>(i) * dk + j];
    Mat sq = msqrt_psd(sigma.m);
    Eigen::JacobiSVD<Mat> svd(sq * x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Mat s = sq * svd.matrixU() * svd.matrixV().adjoint(); // dh x dk, s s^dagger = sigma
    Vec amps(static_cast<long>(dh) * dk);
    for (int i = 0; i < dh; ++i)
        for (int j = 0; j < dk; ++j) amps[static_cast<long>(i) * dk + j] = s(i, j);
    double nrm = amps.norm();
    if (nrm <= 0) throw qslab_error("uhlmann_closest_purification: degenerate result");
    amps /= nrm;
    PureState phi(std::move(amps), theta.layout);
    double overlap = std::abs(phi.a.dot(theta.a));
    return {std::move(phi), overlap};
}

} // namespace qslab
