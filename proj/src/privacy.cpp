#include "qslab/privacy.hpp"

#include "qslab/divergence.hpp"
#include "qslab/linalg.hpp"
#include "qslab/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qslab {

namespace {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_protocol_n(int n, int max_n) {
    if (!is_pow2(n) || n < 2 || n > max_n)
        throw qslab_error("index protocol: n must be a power of two in [2, " +
                          std::to_string(max_n) + "]");
}

// x_i of the bitstring encoded as an integer, i 1-based, x_1 the most
// significant bit (matching the register layout convention).
int xbit(int x, int i, int n) { return (x >> (n - i)) & 1; }

ProtocolState final_layout_state(int n, Vec v) {
    ProtocolState st;
    st.n = n;
    st.layout = SubsystemLayout{{1 << n, n, 2}};
    st.joint = PureState(std::move(v), st.layout);
    return st;
}

// In-place Walsh-Hadamard transform on the given index-bit position.
void hadamard_bit(Vec& v, int pos) {
    const double inv = 1.0 / std::sqrt(2.0);
    const int stride = 1 << pos;
    for (int base = 0; base < v.size(); base += 2 * stride)
        for (int off = 0; off < stride; ++off) {
            cxd a = v[base + off], b = v[base + stride + off];
            v[base + off] = (a + b) * inv;
            v[base + stride + off] = (a - b) * inv;
        }
}

// Registers and dimensions for the masquerade run: H = X (Alice), K = Y (x)
// Ans (x) Pad (Bob), with enough |0> padding for dim K >= dim H so that the
// substate pipeline's purifications and the transport unitary fit on K.
struct IndexWorld {
    int n = 0, dim_h = 0, pad = 0, dim_k = 0;
    int kidx(int y, int ans, int p) const { return (y * 2 + ans) * pad + p; }
};

IndexWorld make_world(int n) {
    IndexWorld w;
    w.n = n;
    w.dim_h = 1 << n;
    w.pad = std::max(1, (w.dim_h + 2 * n - 1) / (2 * n));
    w.dim_k = n * 2 * w.pad;
    return w;
}

// Protocol state with X superposed and Bob's index fixed to i.
PureState psi_state(const IndexWorld& w, int i) {
    Vec v = Vec::Zero(w.dim_h * static_cast<long>(w.dim_k));
    const double amp = std::pow(2.0, -w.n / 2.0);
    for (int x = 0; x < w.dim_h; ++x)
        v[x * w.dim_k + w.kidx(i - 1, xbit(x, i, w.n), 0)] = amp;
    return PureState(std::move(v), SubsystemLayout::pair(w.dim_h, w.dim_k));
}

// Success probability of the answer measurement against the measured X.
double run_success(const IndexWorld& w, const PureState& psi, int i) {
    double s = 0;
    for (int x = 0; x < w.dim_h; ++x)
        for (int y = 0; y < w.n; ++y)
            for (int p = 0; p < w.pad; ++p)
                s += std::norm(psi.a[x * w.dim_k + w.kidx(y, xbit(x, i, w.n), p)]);
    return s;
}

// Extend orthonormal columns to a full unitary: the near-unit eigenvectors
// of 1 - W W^dag span the orthocomplement.
Mat complete_columns(const Mat& w) {
    const int d = static_cast<int>(w.rows());
    const int j = static_cast<int>(w.cols());
    Mat out(d, d);
    out.leftCols(j) = w;
    if (j < d) {
        Eigh e = eigh(Mat::Identity(d, d) - w * w.adjoint());
        out.rightCols(d - j) = e.v.rightCols(d - j);
    }
    return out;
}

double gram_entropy(const std::vector<Vec>& conditionals, double prior) {
    const int n = static_cast<int>(conditionals.size());
    Mat g(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y <= x; ++y) {
            g(y, x) = prior * conditionals[y].dot(conditionals[x]);
            g(x, y) = std::conj(g(y, x));
        }
    Eigen::VectorXd w = eigvalsh(g);
    double s = 0;
    for (int i = 0; i < w.size(); ++i) s -= xlog2x(std::max(0.0, w[i]));
    return s;
}

} // namespace

std::string protocol_name(BuiltinProtocol p) {
    switch (p) {
    case BuiltinProtocol::CleanIndex: return "clean-index";
    case BuiltinProtocol::SendNothing: return "send-nothing";
    case BuiltinProtocol::SendAll: return "send-all";
    }
    throw qslab_error("protocol_name: unknown protocol");
}

std::vector<int> bits_from_string(const std::string& s) {
    std::vector<int> bits;
    for (char c : s) {
        if (c != '0' && c != '1') throw qslab_error("bits_from_string: expected 0/1");
        bits.push_back(c - '0');
    }
    return bits;
}

ProtocolState simulate_index_protocol(int n, const std::vector<int>& x, int i) {
    // Honest runs are defined for any n; the power-of-two restriction only
    // matters for the superposition analyses below.
    if (n < 2 || n > 16)
        throw qslab_error("simulate_index_protocol: n must be in [2, 16]");
    if (static_cast<int>(x.size()) != n)
        throw qslab_error("simulate_index_protocol: x must have n bits");
    for (int b : x)
        if (b != 0 && b != 1) throw qslab_error("simulate_index_protocol: bits must be 0/1");
    if (i < 1 || i > n) throw qslab_error("simulate_index_protocol: index out of range");

    int xv = 0;
    for (int b : x) xv = xv * 2 + b;
    Vec v = Vec::Zero((1L << n) * n * 2);
    const int out = x[i - 1];
    v[(static_cast<long>(xv) * n + (i - 1)) * 2 + out] = 1.0;
    ProtocolState st = final_layout_state(n, std::move(v));
    st.output = out;
    return st;
}

HadamardAttackReport hadamard_attack(int n) {
    check_protocol_n(n, 16);
    HadamardAttackReport rep;
    rep.n = n;
    rep.analytic = std::log2(static_cast<double>(n)) / 2.0;
    rep.max_offdiag_pr_one = 0;
    rep.min_diag_pr_one = 1;
    rep.max_diag_pr_one = 0;

    const int dx = 1 << n;
    std::vector<double> avg(dx, 0.0);
    double cond_entropy = 0;
    for (int i = 1; i <= n; ++i) {
        // X (x) Ans statevector, index (x << 1) | ans
        Vec v = Vec::Zero(2L * dx);
        const double amp = std::pow(2.0, -n / 2.0);
        for (int x = 0; x < dx; ++x) v[(x << 1) | xbit(x, i, n)] = amp;
        for (int pos = 1; pos <= n; ++pos) hadamard_bit(v, pos);

        std::vector<double> pz(dx, 0.0);
        for (int z = 0; z < dx; ++z) pz[z] = std::norm(v[z << 1]) + std::norm(v[(z << 1) | 1]);

        for (int j = 1; j <= n; ++j) {
            double pr_one = 0;
            for (int z = 0; z < dx; ++z)
                if (xbit(z, j, n)) pr_one += pz[z];
            if (j == i) {
                rep.min_diag_pr_one = std::min(rep.min_diag_pr_one, pr_one);
                rep.max_diag_pr_one = std::max(rep.max_diag_pr_one, pr_one);
            } else {
                rep.max_offdiag_pr_one = std::max(rep.max_offdiag_pr_one, pr_one);
            }
        }
        cond_entropy += shannon_entropy(pz) / n;
        for (int z = 0; z < dx; ++z) avg[z] += pz[z] / n;
    }
    rep.mi = shannon_entropy(avg) - cond_entropy;
    rep.per_position_ok = rep.max_offdiag_pr_one <= 1e-12 &&
                          std::abs(rep.min_diag_pr_one - 0.5) <= 1e-12 &&
                          std::abs(rep.max_diag_pr_one - 0.5) <= 1e-12;
    return rep;
}

PrivacyLossReport superpositional_privacy_loss(BuiltinProtocol protocol, int n) {
    if (n < 1 || n > 8) throw qslab_error("superpositional_privacy_loss: n must be in [1, 8]");
    if (protocol == BuiltinProtocol::CleanIndex) check_protocol_n(n, 8);

    PrivacyLossReport rep;
    rep.protocol = protocol;
    rep.n = n;

    // Bob's end-of-run conditional states |Psi_x> on Y B, which are pure for
    // every built-in, so I'(X : BY) is the entropy of the Gram matrix.
    const int dx = 1 << n;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    std::vector<Vec> cond(dx);
    int bdim = 0;
    switch (protocol) {
    case BuiltinProtocol::CleanIndex:
        bdim = 2 * n; // Y (x) Ans
        for (int x = 0; x < dx; ++x) {
            cond[x] = Vec::Zero(bdim);
            for (int i = 1; i <= n; ++i)
                cond[x][(i - 1) * 2 + xbit(x, i, n)] = inv_sqrt_n;
        }
        rep.analytic = 1.0 + std::log2(static_cast<double>(n)) / 2.0;
        break;
    case BuiltinProtocol::SendNothing:
        bdim = n; // Y only
        for (int x = 0; x < dx; ++x) {
            cond[x] = Vec::Constant(bdim, cxd(inv_sqrt_n, 0));
        }
        rep.analytic = 0.0;
        break;
    case BuiltinProtocol::SendAll:
        bdim = n * dx; // Y (x) message holding x
        for (int x = 0; x < dx; ++x) {
            cond[x] = Vec::Zero(bdim);
            for (int i = 0; i < n; ++i) cond[x][i * dx + x] = inv_sqrt_n;
        }
        rep.analytic = static_cast<double>(n);
        break;
    }
    rep.loss = gram_entropy(cond, 1.0 / dx);

    if (static_cast<long>(dx) * bdim <= 1024) {
        // literal cross-check: I(X : BY) from the joint density matrix
        Mat joint = Mat::Zero(dx * bdim, dx * bdim);
        for (int x = 0; x < dx; ++x)
            joint.block(x * bdim, x * bdim, bdim, bdim) =
                (cond[x] * cond[x].adjoint()) / static_cast<double>(dx);
        SubsystemLayout lay = SubsystemLayout::pair(dx, bdim);
        rep.loss_literal = mutual_information(DensityMatrix(joint, lay), lay);
    }
    return rep;
}

SuccessComparison index_success_superposed_vs_mixture(int n) {
    check_protocol_n(n, 8);
    IndexWorld w = make_world(n);
    SuccessComparison out;
    for (int i = 1; i <= n; ++i)
        out.mixture += run_success(w, psi_state(w, i), i) / n;

    PureState phi(Vec::Zero(w.dim_h * static_cast<long>(w.dim_k)),
                  SubsystemLayout::pair(w.dim_h, w.dim_k));
    for (int i = 1; i <= n; ++i)
        phi.a += psi_state(w, i).a / std::sqrt(static_cast<double>(n));
    // success projector: X, Y and the answer measured jointly consistent
    double s = 0;
    for (int x = 0; x < w.dim_h; ++x)
        for (int y = 0; y < w.n; ++y)
            for (int p = 0; p < w.pad; ++p)
                s += std::norm(phi.a[x * w.dim_k + w.kidx(y, xbit(x, y + 1, w.n), p)]);
    out.superposed = s;
    return out;
}

AntvReport antv_code() {
    using std::numbers::pi;
    AntvReport r;
    auto ket = [](double th) {
        Vec v(2);
        v << std::cos(th), std::sin(th);
        return v;
    };
    // (x1, x2) -> angle, indexed by 2 x1 + x2; the four states sit at
    // +-pi/8 around the measurement axes so both decodings succeed equally.
    const double ang[4] = {pi / 8, -pi / 8, 3 * pi / 8, 5 * pi / 8};
    for (double a : ang) r.states.emplace_back(ket(a));

    Vec k0 = ket(0), k1 = ket(pi / 2), kp = ket(pi / 4), km = ket(-pi / 4);
    r.meas_x1.elements = {k0 * k0.adjoint(), k1 * k1.adjoint()};
    r.meas_x2.elements = {kp * kp.adjoint(), km * km.adjoint()};
    for (const Povm& m : {r.meas_x1, r.meas_x2})
        r.decoders.push_back(Povm{{m.elements[0], m.elements[1], Mat::Zero(2, 2)}});

    r.ensemble.prior.assign(4, 0.25);
    r.ensemble.n_bits = 2;
    r.ensemble.m_qubits = 1;
    for (const PureState& st : r.states) r.ensemble.states.push_back(st.density().m);

    for (int idx = 0; idx < 4; ++idx) {
        const int x1 = idx >> 1, x2 = idx & 1;
        DensityMatrix d = r.states[idx].density();
        r.success_x1 += 0.25 * apply_povm(r.meas_x1, d)[x1];
        r.success_x2 += 0.25 * apply_povm(r.meas_x2, d)[x2];
    }
    r.closed_form = (2.0 + std::sqrt(2.0)) / 4.0;

    // 1-degree brute force over encoding angles, decoders fixed: the average
    // success separates per input, so each input's angle optimizes alone.
    for (int idx = 0; idx < 4; ++idx) {
        const int x1 = idx >> 1, x2 = idx & 1;
        double best = 0;
        for (int deg = 0; deg < 180; ++deg) {
            DensityMatrix d = PureState(ket(deg * pi / 180.0)).density();
            double v = 0.5 * (apply_povm(r.meas_x1, d)[x1] + apply_povm(r.meas_x2, d)[x2]);
            best = std::max(best, v);
        }
        r.grid_best += 0.25 * best;
    }

    // all deterministic classical 2-bit -> 1-bit codes and decoders
    for (int enc = 0; enc < 16; ++enc)
        for (int d1 = 0; d1 < 4; ++d1)
            for (int d2 = 0; d2 < 4; ++d2) {
                double s = 0;
                for (int idx = 0; idx < 4; ++idx) {
                    const int bit = (enc >> idx) & 1;
                    s += 0.125 * (((d1 >> bit) & 1) == (idx >> 1)) +
                         0.125 * (((d2 >> bit) & 1) == (idx & 1));
                }
                r.classical_best = std::max(r.classical_best, s);
            }
    return r;
}

RandomAccessReport random_access_bound_check(const EncodingEnsemble& e,
                                             const std::vector<Povm>& decoders) {
    const int n = e.n_bits;
    const int dx = 1 << n;
    if (static_cast<int>(e.prior.size()) != dx || static_cast<int>(e.states.size()) != dx)
        throw qslab_error("random_access_bound_check: ensemble must cover 2^n_bits strings");
    for (double p : e.prior)
        if (std::abs(p - 1.0 / dx) > 1e-12)
            throw qslab_error("random_access_bound_check: X must be uniform");
    const int dim = 1 << e.m_qubits;
    for (const Mat& st : e.states)
        if (st.rows() != dim) throw qslab_error("random_access_bound_check: state dim mismatch");
    if (static_cast<int>(decoders.size()) != n)
        throw qslab_error("random_access_bound_check: need one decoder per bit");
    for (const Povm& m : decoders)
        if (m.outcomes() != 3)
            throw qslab_error("random_access_bound_check: decoders must have outcomes {0,1,?}");

    RandomAccessReport rep;
    rep.m = e.m_qubits;
    rep.mi = cq_mutual_information(e.prior, e.states);
    for (int i = 1; i <= n; ++i) {
        RandomAccessRow row;
        row.i = i;
        double win = 0;
        for (int x = 0; x < dx; ++x) {
            std::vector<double> pr = apply_povm(decoders[i - 1], DensityMatrix(e.states[x]));
            row.lambda += e.prior[x] * (pr[0] + pr[1]);
            win += e.prior[x] * pr[xbit(x, i, n)];
        }
        row.cond_success = row.lambda > 1e-15 ? win / row.lambda : 0.5;
        row.eps = std::max(0.0, row.cond_success - 0.5);
        rep.lhs_quad += row.lambda * row.eps * row.eps;
        rep.lhs_entropy += row.lambda * (1.0 - binary_entropy(0.5 + row.eps));
        rep.rows.push_back(row);
    }
    rep.chain_ok = rep.lhs_quad <= rep.lhs_entropy + 1e-9 &&
                   rep.lhs_entropy <= rep.mi + 1e-9 && rep.mi <= rep.m + 1e-9;
    return rep;
}

MasqueradeReport masquerade_check(int n, double r, const std::optional<LiftingParams>& prm) {
    check_protocol_n(n, 4);
    if (!(r > 1)) throw qslab_error("masquerade_check: r must exceed 1");

    IndexWorld w = make_world(n);
    MasqueradeReport rep;
    rep.n = n;
    rep.r = r;

    std::vector<PureState> psis;
    std::vector<Mat> rhos;
    PureState phi(Vec::Zero(w.dim_h * static_cast<long>(w.dim_k)),
                  SubsystemLayout::pair(w.dim_h, w.dim_k));
    for (int i = 1; i <= n; ++i) {
        psis.push_back(psi_state(w, i));
        rhos.push_back(partial_trace(psis.back(), *psis.back().layout, {0}).m);
        phi.a += psis.back().a / std::sqrt(static_cast<double>(n));
    }
    Mat rho_bar = Mat::Zero(w.dim_h, w.dim_h);
    for (const Mat& m : rhos) rho_bar += m / static_cast<double>(n);

    std::vector<double> prior(n, 1.0 / n);
    rep.i1 = cq_mutual_information(prior, rhos);

    // spectral data of rho_bar shared by every transport construction
    Eigh eb = eigh_desc(rho_bar);
    const double cut = 1e-12 * std::max(eb.w[0], 1e-300);
    int rank = 0;
    while (rank < eb.w.size() && eb.w[rank] > cut) ++rank;

    const int dkq = w.dim_k * 2;
    Mat phat = Mat::Zero(w.dim_h, dkq); // |phi>|0>_Q reshaped H x (K Q)
    for (int h = 0; h < w.dim_h; ++h)
        for (int k = 0; k < w.dim_k; ++k) phat(h, 2 * k) = phi.a[h * w.dim_k + k];
    Mat amat(dkq, rank);
    for (int j = 0; j < rank; ++j)
        amat.col(j) = phat.transpose() * eb.v.col(j).conjugate() / std::sqrt(eb.w[j]);
    Mat afull = complete_columns(amat);

    rep.all_ok = true;
    for (int i = 1; i <= n; ++i) {
        MasqueradeRow row;
        row.i = i;
        row.k_i = relative_entropy(rhos[i - 1], rho_bar);
        rep.k_avg += row.k_i / n;
        row.eps_i = run_success(w, psis[i - 1], i) - 0.5;

        QuantumSubstateResult qs = quantum_substate_from_purification(psis[i - 1], rho_bar, r, prm);
        row.k_lift = qs.k_lift;
        row.alpha = qs.alpha;
        row.distance = qs.distance;
        row.certified = qs.lifting.all_certified;

        // transport unitary U_i on K Q: match the Schmidt sides of
        // |phi>|0>_Q and |zeta_i> through rho_bar's eigenbasis
        Mat zmat(w.dim_h, dkq);
        for (int h = 0; h < w.dim_h; ++h)
            for (int k = 0; k < w.dim_k; ++k)
                for (int q = 0; q < 2; ++q)
                    zmat(h, 2 * k + q) = qs.zeta.a[(static_cast<long>(h) * w.dim_k + k) * 2 + q];
        Mat bmat(dkq, rank);
        for (int j = 0; j < rank; ++j)
            bmat.col(j) = zmat.transpose() * eb.v.col(j).conjugate() / std::sqrt(eb.w[j]);
        // Loewdin-orthonormalize the zeta side (its reduction carries the
        // pipeline's tiny clamping error)
        Eigh eg = eigh(bmat.adjoint() * bmat);
        Mat corr = eg.v *
                   eg.w.cwiseMax(1e-30).cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix() *
                   eg.v.adjoint();
        Mat u = complete_columns(bmat * corr) * afull.adjoint();

        Mat chi = phat * u.transpose(); // (1_H (x) U) |phi>|0>
        row.transport_err = (chi - zmat).norm();

        double pr = 0;
        for (int k = 0; k < w.dim_k; ++k) pr += chi.col(2 * k + 1).squaredNorm();
        row.pr_not_abstain = pr;
        row.abstain_consistent = std::abs(pr - row.alpha) <= 1e-9;

        double correct = 0;
        for (int x = 0; x < w.dim_h; ++x)
            for (int y = 0; y < w.n; ++y)
                for (int p = 0; p < w.pad; ++p)
                    correct += std::norm(chi(x, 2 * w.kidx(y, xbit(x, i, w.n), p) + 1));
        row.cond_correct = pr > 1e-300 ? correct / pr : 0.0;
        row.cond_bound = 0.5 + row.eps_i - row.distance / 2.0;
        row.cond_ok = row.cond_correct >= row.cond_bound - 1e-6;

        rep.all_ok = rep.all_ok && row.abstain_consistent && row.cond_ok;
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

} // namespace qslab
