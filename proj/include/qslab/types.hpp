#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qslab {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Thrown on contract violations (bad dimensions, invalid states, domain errors).
class qslab_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A budget-exceeded outcome from an iterative solver that still carries a
// usable (certified) partial result.  Callers decide whether to treat it as
// fatal; the CLI maps it to exit code 3.
class solver_shortfall : public qslab_error {
public:
    using qslab_error::qslab_error;
};

// Tensor-factor structure of a register: factor_dims[i] is the dimension of
// the i-th factor, most significant first (row-major index composition).
struct SubsystemLayout {
    std::vector<int> factor_dims;

    int dim() const {
        int d = 1;
        for (int f : factor_dims) d *= f;
        return d;
    }
    int factors() const { return static_cast<int>(factor_dims.size()); }

    static SubsystemLayout single(int d) { return {{d}}; }
    static SubsystemLayout pair(int a, int b) { return {{a, b}}; }
};

struct DensityMatrix {
    Mat m;
    std::optional<SubsystemLayout> layout;

    DensityMatrix() = default;
    explicit DensityMatrix(Mat mat, std::optional<SubsystemLayout> lay = std::nullopt)
        : m(std::move(mat)), layout(std::move(lay)) {}

    int dim() const { return static_cast<int>(m.rows()); }
};

struct PureState {
    Vec a;
    std::optional<SubsystemLayout> layout;

    PureState() = default;
    explicit PureState(Vec amps, std::optional<SubsystemLayout> lay = std::nullopt)
        : a(std::move(amps)), layout(std::move(lay)) {}

    int dim() const { return static_cast<int>(a.size()); }
    DensityMatrix density() const { return DensityMatrix(a * a.adjoint(), layout); }
    double norm() const { return a.norm(); }
};

// Single POVM element F with 0 <= F <= 1.
struct PovmElement {
    Mat m;
    int dim() const { return static_cast<int>(m.rows()); }
};

struct Povm {
    std::vector<Mat> elements;
    int dim() const { return elements.empty() ? 0 : static_cast<int>(elements[0].rows()); }
    int outcomes() const { return static_cast<int>(elements.size()); }
};

struct ValidationReport {
    double herm_err = 0;    // max entrywise |A - A^dagger|
    double min_eig = 0;     // smallest eigenvalue of the hermitized matrix
    double trace_err = 0;   // |tr A - 1|
    double tol = 0;
    bool hermitian = false, psd = false, unit_trace = false;

    bool ok() const { return hermitian && psd && unit_trace; }
    std::string describe() const;
};

} // namespace qslab
