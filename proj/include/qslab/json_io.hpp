#pragma once

// JSON encodings for states, POVMs, and divergence results, plus state-pair
// input files for the CLI.  Matrices serialize entrywise as [re, im] pairs;
// infinities as the strings "inf"/"-inf".

#include "qslab/divergence.hpp"
#include "qslab/report.hpp"
#include "qslab/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qslab {

json mat_to_json(const Mat& m);
Mat mat_from_json(const json& j);

json density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const json& j);

json pure_to_json(const PureState& psi);
PureState pure_from_json(const json& j);

json povm_to_json(const Povm& m);
Povm povm_from_json(const json& j);

json divergence_to_json(const DivergenceResult& r);

// A CLI input: either a quantum pair {"rho":…,"sigma":…} or a classical pair
// {"p":[…],"q":[…]}.
struct StatePair {
    std::optional<Mat> rho, sigma;
    std::optional<std::vector<double>> p, q;

    bool classical() const { return p.has_value(); }
};

StatePair state_pair_from_json(const json& j);

json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const json& j);

} // namespace qslab
