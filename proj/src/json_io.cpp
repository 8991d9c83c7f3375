#include "qslab/json_io.hpp"

#include <fstream>

namespace qslab {

namespace {

json layout_to_json(const SubsystemLayout& lay) {
    json j;
    j["factors"] = lay.factor_dims;
    return j;
}

std::optional<SubsystemLayout> layout_from_json(const json& j) {
    if (!j.contains("layout")) return std::nullopt;
    SubsystemLayout lay;
    lay.factor_dims = j.at("layout").at("factors").get<std::vector<int>>();
    return lay;
}

} // namespace

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw qslab_error("mat_from_json: expected non-empty array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.at(0).size());
    Mat m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        const json& row = j.at(r);
        if (static_cast<int>(row.size()) != cols)
            throw qslab_error("mat_from_json: ragged rows");
        for (int c = 0; c < cols; ++c) {
            const json& e = row.at(c);
            if (e.is_number()) {
                m(r, c) = cxd(e.get<double>(), 0.0);
            } else {
                if (!e.is_array() || e.size() != 2)
                    throw qslab_error("mat_from_json: entries must be numbers or [re, im]");
                m(r, c) = cxd(e.at(0).get<double>(), e.at(1).get<double>());
            }
        }
    }
    return m;
}

json density_to_json(const DensityMatrix& rho) {
    json j;
    j["dim"] = rho.dim();
    if (rho.layout) j["layout"] = layout_to_json(*rho.layout);
    j["entries"] = mat_to_json(rho.m);
    return j;
}

DensityMatrix density_from_json(const json& j) {
    Mat m = mat_from_json(j.at("entries"));
    if (j.contains("dim") && j.at("dim").get<int>() != m.rows())
        throw qslab_error("density_from_json: dim field does not match entries");
    DensityMatrix rho(std::move(m), layout_from_json(j));
    if (rho.layout && rho.layout->dim() != rho.dim())
        throw qslab_error("density_from_json: layout does not match dim");
    return rho;
}

json pure_to_json(const PureState& psi) {
    json j;
    j["dim"] = psi.dim();
    if (psi.layout) j["layout"] = layout_to_json(*psi.layout);
    json amps = json::array();
    for (int i = 0; i < psi.dim(); ++i)
        amps.push_back(json::array({psi.a[i].real(), psi.a[i].imag()}));
    j["amps"] = std::move(amps);
    return j;
}

PureState pure_from_json(const json& j) {
    const json& amps = j.at("amps");
    Vec v(static_cast<int>(amps.size()));
    for (int i = 0; i < v.size(); ++i) {
        const json& e = amps.at(i);
        if (e.is_number())
            v[i] = cxd(e.get<double>(), 0.0);
        else
            v[i] = cxd(e.at(0).get<double>(), e.at(1).get<double>());
    }
    PureState psi(std::move(v), layout_from_json(j));
    if (psi.layout && psi.layout->dim() != psi.dim())
        throw qslab_error("pure_from_json: layout does not match dim");
    return psi;
}

json povm_to_json(const Povm& m) {
    json j;
    j["dim"] = m.dim();
    j["elements"] = json::array();
    for (const Mat& e : m.elements) j["elements"].push_back(mat_to_json(e));
    return j;
}

Povm povm_from_json(const json& j) {
    Povm m;
    for (const json& e : j.at("elements")) m.elements.push_back(mat_from_json(e));
    if (m.elements.empty()) throw qslab_error("povm_from_json: no elements");
    return m;
}

json divergence_to_json(const DivergenceResult& r) {
    json j;
    j["value"] = num_or_inf(r.value);
    if (r.witness_subset) j["witness_subset"] = *r.witness_subset;
    if (r.witness_op) j["witness_op"] = mat_to_json(r.witness_op->m);
    json stats;
    stats["evaluations"] = r.stats.evaluations;
    stats["grid_size"] = r.stats.grid_size;
    stats["refinement_gap"] = r.stats.refinement_gap;
    stats["best_t"] = r.stats.best_t;
    j["stats"] = std::move(stats);
    return j;
}

namespace {

// A matrix entry may be a bare row-major array or a {"dim","entries"} object.
Mat flexible_mat(const json& j) {
    if (j.is_object() && j.contains("entries")) return density_from_json(j).m;
    return mat_from_json(j);
}

} // namespace

StatePair state_pair_from_json(const json& j) {
    if (!j.is_object()) throw qslab_error("state_pair_from_json: expected a JSON object");
    StatePair sp;
    if (j.contains("p") || j.contains("q")) {
        if (!j.contains("p") || !j.contains("q"))
            throw qslab_error("state_pair_from_json: classical pairs need both p and q");
        try {
            sp.p = j.at("p").get<std::vector<double>>();
            sp.q = j.at("q").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw qslab_error(std::string("state_pair_from_json: bad p/q arrays: ") + e.what());
        }
        if (sp.p->size() != sp.q->size())
            throw qslab_error("state_pair_from_json: p and q must have equal length");
        return sp;
    }
    if (!j.contains("rho") || !j.contains("sigma"))
        throw qslab_error("state_pair_from_json: need either {p,q} or {rho,sigma}");
    sp.rho = flexible_mat(j.at("rho"));
    sp.sigma = flexible_mat(j.at("sigma"));
    if (sp.rho->rows() != sp.sigma->rows())
        throw qslab_error("state_pair_from_json: rho and sigma must have equal dimension");
    return sp;
}

json load_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw qslab_error("load_json_file: cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw qslab_error("load_json_file: parse error in " + path + ": " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw qslab_error("save_json_file: cannot open " + path);
    f << j.dump(2) << '\n';
}

} // namespace qslab
