#pragma once

#include "ccrm/diagnostics.hpp"
#include "ccrm/problem_gen.hpp"
#include "ccrm/solvers.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <optional>
#include <string>

namespace ccrm::io {

using json = nlohmann::json;

json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j);
/// Row-major array of rows.
json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const json& j);

/// {"kind": "halfspace" | "ball" | "box" | "affine" | "ellipsoid", ...payload}.
/// Sublevel sets hold code and cannot be serialized.
json set_to_json(const ConvexSet<double>& set);
ConvexSet<double> set_from_json(const json& j);

json problem_to_json(const FeasibilityProblem<double>& problem);
FeasibilityProblem<double> problem_from_json(const json& j);

/// Instance file: the problem plus generator config, seed and per-set generation log.
json instance_to_json(const GeneratedInstance& instance);

struct LoadedInstance {
    FeasibilityProblem<double> problem;
    std::optional<EllipsoidGenConfig> generator;
};
LoadedInstance instance_from_json(const json& j);

json config_to_json(const SolverConfig& config);
SolverConfig config_from_json(const json& j);

json selection_to_json(const SelectionRecord& record);
json trace_to_json(const IterationTrace<double>& trace);
/// Header "k,e_k,step_norm,proj_evals,time"; step_norm is empty on the row of x^0.
void write_trace_csv(std::ostream& out, const IterationTrace<double>& trace);

json fejer_to_json(const FejerCertificate& cert);
json rates_to_json(const RateReport& report);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ccrm::io
