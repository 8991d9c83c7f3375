#pragma once

// Seeded random inputs for tests and sweeps.  Gaussian sampling is hand-rolled
// (Box-Muller) because std::normal_distribution's stream is implementation
// defined and the reports must be byte-stable for a fixed seed.

#include "qslab/linalg.hpp"
#include "qslab/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace qslab {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(seed), seed_(seed) {}

    double u01() {
        // 53-bit mantissa uniform in [0,1)
        return (g_() >> 11) * 0x1.0p-53;
    }

    double gauss() {
        double u1 = 0.0;
        while (u1 <= 0.0) u1 = u01();
        double u2 = u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    cxd cgauss() { return cxd(gauss(), gauss()) / std::sqrt(2.0); }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(u01() * (hi - lo + 1));
    }

    Vec pure(int d) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = cgauss();
        v /= v.norm();
        return v;
    }

    // Full-rank Ginibre density matrix.
    Mat density(int d, int rank = 0) {
        if (rank <= 0 || rank > d) rank = d;
        Mat g(d, rank);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < rank; ++j) g(i, j) = cgauss();
        Mat rho = g * g.adjoint();
        return rho / rho.trace().real();
    }

    // Haar unitary via QR of a Ginibre matrix with phase-fixed R diagonal.
    Mat unitary(int d) {
        Mat g(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) g(i, j) = cgauss();
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int j = 0; j < d; ++j) {
            cxd rd = r(j, j);
            q.col(j) *= (std::abs(rd) > 0 ? rd / std::abs(rd) : cxd(1, 0));
        }
        return q;
    }

    // Dirichlet(1,...,1) distribution.
    std::vector<double> distribution(int n) {
        std::vector<double> p(n);
        double s = 0;
        for (double& x : p) {
            double u = 1.0 - u01();
            x = -std::log(u);
            s += x;
        }
        for (double& x : p) x /= s;
        return p;
    }

    // Random POVM with `outcomes` elements: normalized Ginibre pieces.
    Povm povm(int d, int outcomes) {
        std::vector<Mat> gs;
        Mat total = Mat::Zero(d, d);
        for (int k = 0; k < outcomes; ++k) {
            Mat g(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) g(i, j) = cgauss();
            gs.push_back(g * g.adjoint());
            total += gs.back();
        }
        Mat isq = matfunc_herm(total, [](double x) { return x > 1e-14 ? 1.0 / std::sqrt(x) : 0.0; });
        Povm m;
        for (auto& g : gs) m.elements.push_back(herm(isq * g * isq));
        return m;
    }

    // Independent child stream (splitmix64 on seed ^ label).
    Rng child(std::uint64_t label) const {
        std::uint64_t z = seed_ ^ (label * 0xc2b2ae3d27d4eb4fULL);
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z = z ^ (z >> 31);
        return Rng(z);
    }

private:
    std::mt19937_64 g_;
    std::uint64_t seed_ = 0;
};

} // namespace qslab
