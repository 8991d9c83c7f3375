// Python bindings for the main operations.  Matrices cross the boundary as
// numpy complex arrays (pybind11/eigen); composite results come back as
// plain dicts so the Python side needs no wrapper classes.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qslab/appendix.hpp"
#include "qslab/divergence.hpp"
#include "qslab/privacy.hpp"
#include "qslab/qstate.hpp"
#include "qslab/rng.hpp"
#include "qslab/substate.hpp"

namespace py = pybind11;
using namespace qslab;

namespace {

py::dict divergence_dict(const DivergenceResult& r) {
    py::dict d;
    d["value"] = r.value;
    if (r.witness_subset) d["witness_subset"] = *r.witness_subset;
    if (r.witness_op) d["witness_op"] = r.witness_op->m;
    return d;
}

} // namespace

PYBIND11_MODULE(_qslab, m) {
    m.doc() = "substate theorems and observational divergence toolkit";

    py::register_exception<qslab_error>(m, "QslabError");

    // ---- states ----
    m.def(
        "validate_density",
        [](const Mat& rho) {
            ValidationReport r = validate_density(rho);
            py::dict d;
            d["ok"] = r.ok();
            d["herm_err"] = r.herm_err;
            d["min_eig"] = r.min_eig;
            d["trace_err"] = r.trace_err;
            return d;
        },
        py::arg("rho"));
    m.def(
        "partial_trace",
        [](const Mat& joint, const std::vector<int>& dims, const std::vector<int>& keep) {
            return partial_trace(DensityMatrix(joint), SubsystemLayout{dims}, keep).m;
        },
        py::arg("joint"), py::arg("dims"), py::arg("keep"));
    m.def(
        "canonical_purification",
        [](const Mat& rho) { return canonical_purification(DensityMatrix(rho)).a; },
        py::arg("rho"));
    m.def(
        "apply_povm",
        [](const std::vector<Mat>& elements, const Mat& rho) {
            return apply_povm(Povm{elements}, DensityMatrix(rho));
        },
        py::arg("elements"), py::arg("rho"));
    m.def(
        "uhlmann_closest_purification",
        [](const Mat& sigma, const Vec& theta, int dim_h, int dim_k) {
            auto [phi, overlap] = uhlmann_closest_purification(
                DensityMatrix(sigma), PureState(theta, SubsystemLayout::pair(dim_h, dim_k)));
            py::dict d;
            d["phi"] = phi.a;
            d["overlap"] = overlap;
            return d;
        },
        py::arg("sigma"), py::arg("theta"), py::arg("dim_h"), py::arg("dim_k"));

    // ---- divergences ----
    m.def("trace_distance", [](const Mat& a, const Mat& b) { return trace_distance(a, b); },
          py::arg("rho"), py::arg("sigma"));
    m.def("fidelity", &fidelity, py::arg("rho"), py::arg("sigma"));
    m.def("von_neumann_entropy", &von_neumann_entropy, py::arg("rho"));
    m.def("relative_entropy",
          [](const Mat& a, const Mat& b) { return relative_entropy(a, b); }, py::arg("rho"),
          py::arg("sigma"));
    m.def("relative_entropy_classical",
          [](const std::vector<double>& p, const std::vector<double>& q) {
              return relative_entropy(p, q);
          },
          py::arg("p"), py::arg("q"));
    m.def("obs_divergence_classical",
          [](const std::vector<double>& p, const std::vector<double>& q) {
              return divergence_dict(obs_divergence_classical(p, q));
          },
          py::arg("p"), py::arg("q"));
    m.def("obs_divergence_quantum",
          [](const Mat& rho, const Mat& sigma) {
              return divergence_dict(obs_divergence_quantum(rho, sigma));
          },
          py::arg("rho"), py::arg("sigma"));

    // ---- substate ----
    m.def("classical_substate",
          [](const std::vector<double>& p, const std::vector<double>& q, double r, double k) {
              ClassicalSubstateResult res = classical_substate(p, q, r, k);
              py::dict d;
              d["good"] = res.good;
              d["p_prime"] = res.p_prime;
              d["alpha"] = res.alpha;
              d["bad_mass"] = res.bad_mass;
              d["l1_dist"] = res.l1_dist;
              d["guarantees_hold"] = res.guarantees_hold;
              return d;
          },
          py::arg("p"), py::arg("q"), py::arg("r"), py::arg("k"));
    m.def("pure_substate",
          [](const Vec& psi, const Mat& sigma, double r, double k) {
              PureSubstateResult res = pure_substate(PureState(psi), sigma, r, k);
              py::dict d;
              d["phi"] = res.phi.a;
              d["alpha"] = res.alpha;
              d["distance"] = res.distance;
              d["overlap_sq"] = res.overlap_sq;
              d["trivial"] = res.trivial;
              return d;
          },
          py::arg("psi"), py::arg("sigma"), py::arg("r"), py::arg("k"));
    m.def("quantum_substate",
          [](const Mat& rho, const Mat& sigma, double r, int levels, int game_iters) {
              std::optional<LiftingParams> prm;
              if (levels > 0) {
                  LiftingParams p = LiftingParams::defaults_for(1.0);
                  p.l = levels;
                  p.game_iters = game_iters;
                  prm = p;
              }
              QuantumSubstateResult res = quantum_substate(DensityMatrix(rho), sigma, r, prm);
              py::dict d;
              d["alpha"] = res.alpha;
              d["k_base"] = res.k_base;
              d["k_lift"] = res.k_lift;
              d["s_base"] = res.s_base;
              d["distance"] = res.distance;
              d["reduction_err"] = res.reduction_err;
              d["zeta"] = res.zeta.a;
              return d;
          },
          py::arg("rho"), py::arg("sigma"), py::arg("r"), py::arg("levels") = 0,
          py::arg("game_iters") = 300);

    // ---- privacy ----
    m.def("hadamard_attack", [](int n) {
        HadamardAttackReport rep = hadamard_attack(n);
        py::dict d;
        d["mi"] = rep.mi;
        d["analytic"] = rep.analytic;
        d["per_position_ok"] = rep.per_position_ok;
        return d;
    });
    m.def("antv_code", [] {
        AntvReport rep = antv_code();
        py::dict d;
        d["success_x1"] = rep.success_x1;
        d["success_x2"] = rep.success_x2;
        d["closed_form"] = rep.closed_form;
        d["classical_best"] = rep.classical_best;
        return d;
    });
    m.def("superpositional_privacy_loss", [](const std::string& protocol, int n) {
        BuiltinProtocol proto;
        if (protocol == "clean-index")
            proto = BuiltinProtocol::CleanIndex;
        else if (protocol == "send-nothing")
            proto = BuiltinProtocol::SendNothing;
        else if (protocol == "send-all")
            proto = BuiltinProtocol::SendAll;
        else
            throw qslab_error("unknown protocol " + protocol);
        PrivacyLossReport rep = superpositional_privacy_loss(proto, n);
        py::dict d;
        d["loss"] = rep.loss;
        d["analytic"] = rep.analytic;
        return d;
    });

    // ---- appendix ----
    m.def("gap_family", [](int n, double k, double a) {
        GapFamily f = gap_family(n, k, a);
        py::dict d;
        d["p"] = f.p;
        d["log2_q"] = f.log2_q;
        d["s"] = f.s;
        d["s_lower"] = f.s_lower;
        d["d"] = f.d;
        d["d_upper"] = f.d_upper;
        d["separation_ok"] = f.separation_ok;
        return d;
    });

    // ---- deterministic test-data helper ----
    m.def("random_density", [](std::uint64_t seed, int dim, int rank) {
        return Rng(seed).density(dim, rank);
    });
}
