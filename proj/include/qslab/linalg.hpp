#pragma once

// Small shared dense-linear-algebra helpers on top of Eigen.  Everything here
// assumes desk-scale operators (dim <= a few hundred) and works on hermitized
// copies so that callers can pass matrices carrying ~1e-16 asymmetry dust.

#include "qslab/types.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace qslab {

inline Mat herm(const Mat& a) { return 0.5 * (a + a.adjoint()); }

struct Eigh {
    Eigen::VectorXd w; // eigenvalues
    Mat v;             // columns are eigenvectors, same order as w
};

// Hermitian eigendecomposition, eigenvalues ascending (Eigen's order).
inline Eigh eigh(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(a));
    if (es.info() != Eigen::Success)
        throw qslab_error("eigendecomposition failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

// Eigenvalues only (cheaper inner loops).
inline Eigen::VectorXd eigvalsh(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(herm(a), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw qslab_error("eigendecomposition failed to converge");
    return es.eigenvalues();
}

// Descending variant; ties keep the ascending solver's relative order reversed,
// which is deterministic for a fixed input.
inline Eigh eigh_desc(const Mat& a) {
    Eigh e = eigh(a);
    e.w.reverseInPlace();
    e.v = e.v.rowwise().reverse().eval();
    return e;
}

// f applied to the spectrum of a hermitian matrix.
inline Mat matfunc_herm(const Mat& a, const std::function<double(double)>& f) {
    Eigh e = eigh(a);
    Eigen::VectorXd fw(e.w.size());
    for (int i = 0; i < e.w.size(); ++i) fw[i] = f(e.w[i]);
    return e.v * fw.asDiagonal() * e.v.adjoint();
}

// PSD square root; eigenvalues in [-clamp_tol, 0) are snapped to zero, more
// negative ones indicate an invalid input.
inline Mat msqrt_psd(const Mat& a, double clamp_tol = 1e-10) {
    Eigh e = eigh(a);
    if (e.w.size() && e.w[0] < -clamp_tol)
        throw qslab_error("msqrt_psd: matrix not PSD (min eig " + std::to_string(e.w[0]) + ")");
    Eigen::VectorXd s(e.w.size());
    for (int i = 0; i < e.w.size(); ++i) s[i] = e.w[i] > 0 ? std::sqrt(e.w[i]) : 0.0;
    return e.v * s.asDiagonal() * e.v.adjoint();
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vec kron(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (int i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

// Projector onto the span of eigenvectors selected by pred(eigenvalue).
inline Mat eig_projector(const Eigh& e, const std::function<bool(double)>& pred) {
    Mat p = Mat::Zero(e.v.rows(), e.v.rows());
    for (int i = 0; i < e.w.size(); ++i)
        if (pred(e.w[i])) p += e.v.col(i) * e.v.col(i).adjoint();
    return p;
}

inline double re_trace(const Mat& a) { return a.trace().real(); }

// tr(A B) for hermitian A, B without forming the product.
inline double herm_inner(const Mat& a, const Mat& b) {
    return a.cwiseProduct(b.conjugate()).sum().real();
}

inline double xlog2x(double x) { return x > 0 ? x * std::log2(x) : 0.0; }

} // namespace qslab
