#include "ccrm/io.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace ccrm::io {

json vector_to_json(const VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw InvalidArgument("expected a numeric array");
    VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw InvalidArgument("expected a numeric array");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

json matrix_to_json(const MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw InvalidArgument("expected an array of rows");
    if (j.empty()) return MatrixXd(0, 0);
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const VectorXd row = vector_from_json(j[r]);
        if (row.size() != cols) throw InvalidArgument("ragged matrix rows");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

json set_to_json(const ConvexSet<double>& set) {
    json j;
    j["kind"] = std::string(set.kind_name());
    if (const auto* h = set.as<Halfspace<double>>()) {
        j["normal"] = vector_to_json(h->normal);
        j["offset"] = h->offset;
    } else if (const auto* b = set.as<Ball<double>>()) {
        j["center"] = vector_to_json(b->center);
        j["radius"] = b->radius;
    } else if (const auto* x = set.as<Box<double>>()) {
        j["lower"] = vector_to_json(x->lower);
        j["upper"] = vector_to_json(x->upper);
    } else if (const auto* a = set.as<AffineSubspace<double>>()) {
        j["point"] = vector_to_json(a->point);
        j["directions"] = matrix_to_json(a->basis.transpose());
    } else if (const auto* e = set.as<EllipsoidQuadratic<double>>()) {
        j["A"] = matrix_to_json(e->A);
        j["b"] = vector_to_json(e->b);
        j["c"] = e->c;
    } else {
        throw ConfigurationError("sublevel sets cannot be serialized");
    }
    return j;
}

ConvexSet<double> set_from_json(const json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "halfspace") {
            return ConvexSet<double>::halfspace(vector_from_json(j.at("normal")),
                                                j.at("offset").get<double>());
        }
        if (kind == "ball") {
            return ConvexSet<double>::ball(vector_from_json(j.at("center")),
                                           j.at("radius").get<double>());
        }
        if (kind == "box") {
            return ConvexSet<double>::box(vector_from_json(j.at("lower")),
                                          vector_from_json(j.at("upper")));
        }
        if (kind == "affine") {
            VectorXd point = vector_from_json(j.at("point"));
            MatrixXd rows = matrix_from_json(j.value("directions", json::array()));
            MatrixXd directions = rows.size() == 0 ? MatrixXd(point.size(), 0) : MatrixXd(rows.transpose());
            return ConvexSet<double>::affine_subspace(std::move(point), directions);
        }
        if (kind == "ellipsoid") {
            return ConvexSet<double>::ellipsoid(matrix_from_json(j.at("A")),
                                                vector_from_json(j.at("b")), j.at("c").get<double>());
        }
        throw InvalidArgument("unknown set kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed set: ") + e.what());
    }
}

json problem_to_json(const FeasibilityProblem<double>& problem) {
    json j;
    j["instance_id"] = problem.instance_id();
    j["dimension"] = problem.dimension();
    j["sets"] = json::array();
    for (const auto& s : problem.sets()) j["sets"].push_back(set_to_json(s));
    if (problem.certified_point()) j["certified_point"] = vector_to_json(*problem.certified_point());
    return j;
}

FeasibilityProblem<double> problem_from_json(const json& j) {
    try {
        std::vector<ConvexSet<double>> sets;
        for (const auto& s : j.at("sets")) sets.push_back(set_from_json(s));
        std::optional<VectorXd> point;
        if (j.contains("certified_point") && !j["certified_point"].is_null()) {
            point = vector_from_json(j["certified_point"]);
        }
        FeasibilityProblem<double> problem(std::move(sets), std::move(point),
                                           j.value("instance_id", std::string{}));
        if (j.contains("dimension") && j["dimension"].get<Eigen::Index>() != problem.dimension()) {
            throw InvalidArgument("declared dimension disagrees with the sets");
        }
        return problem;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed problem: ") + e.what());
    }
}

namespace {

json generator_to_json(const EllipsoidGenConfig& c) {
    return {{"n", c.n},
            {"m", c.m},
            {"gamma", c.gamma},
            {"lambda", c.lambda_scale},
            {"seed", c.seed}};
}

json record_to_json(const EllipsoidRecord& r) {
    json j;
    j["index"] = r.index;
    if (r.index == 0) {
        j["form"] = "quadratic";
        j["B"] = matrix_to_json(r.factor);
        j["A"] = matrix_to_json(r.A);
        j["b"] = vector_to_json(r.b);
        j["c"] = r.c;
    } else {
        j["form"] = "center";
        j["center"] = vector_to_json(r.center);
        j["axis"] = vector_to_json(r.axis);
        j["Q"] = matrix_to_json(r.rotation);
        j["semi_axes"] = vector_to_json(r.semi_axes);
        j["center_draws"] = r.center_draws;
    }
    return j;
}

}  // namespace

json instance_to_json(const GeneratedInstance& instance) {
    json j = problem_to_json(instance.problem);
    j["format"] = "ccrm-instance";
    j["version"] = 1;
    j["generator"] = generator_to_json(instance.config);
    j["attempts"] = instance.attempts;
    j["generation_log"] = json::array();
    for (const auto& r : instance.log) j["generation_log"].push_back(record_to_json(r));
    return j;
}

LoadedInstance instance_from_json(const json& j) {
    LoadedInstance out{problem_from_json(j), std::nullopt};
    if (j.contains("generator")) {
        const auto& g = j["generator"];
        EllipsoidGenConfig c;
        c.n = g.at("n").get<std::size_t>();
        c.m = g.at("m").get<std::size_t>();
        c.gamma = g.at("gamma").get<double>();
        c.lambda_scale = g.at("lambda").get<double>();
        c.seed = g.at("seed").get<std::uint64_t>();
        out.generator = c;
    }
    return out;
}

json config_to_json(const SolverConfig& c) {
    return {{"method", std::string(to_string(c.method))},
            {"control", std::string(to_string(c.control))},
            {"epsilon", c.epsilon},
            {"max_iter", c.max_iter},
            {"seed", c.seed},
            {"record_iterates", c.record_iterates},
            {"step_test", c.step_test}};
}

SolverConfig config_from_json(const json& j) {
    SolverConfig c;
    try {
        if (j.contains("method")) c.method = parse_method(j["method"].get<std::string>());
        if (j.contains("control")) c.control = parse_control(j["control"].get<std::string>());
        c.epsilon = j.value("epsilon", c.epsilon);
        c.max_iter = j.value("max_iter", c.max_iter);
        c.seed = j.value("seed", c.seed);
        c.record_iterates = j.value("record_iterates", c.record_iterates);
        c.step_test = j.value("step_test", c.step_test);
    } catch (const json::exception& e) {
        throw ConfigurationError(std::string("malformed solver config: ") + e.what());
    }
    c.validate();
    return c;
}

json selection_to_json(const SelectionRecord& r) {
    return {{"k", r.k},
            {"ell", r.ell},
            {"r", r.r},
            {"criterion_values", r.criterion_values},
            {"r_criterion_values", r.r_criterion_values}};
}

json trace_to_json(const IterationTrace<double>& t) {
    json j;
    j["iterations"] = t.iterations();
    j["termination"] = std::string(to_string(t.termination));
    j["final_residual"] = t.final_residual();
    j["wall_time_s"] = t.wall_time_s;
    j["residuals"] = t.residuals;
    j["step_norms"] = t.step_norms;
    j["projection_evals"] = t.projection_evals;
    j["diagnostic_projection_evals"] = t.diagnostic_projection_evals;
    j["elapsed_s"] = t.elapsed_s;
    j["final_iterate"] = vector_to_json(t.final_iterate);
    if (!t.iterates.empty()) {
        j["iterates"] = json::array();
        for (const auto& x : t.iterates) j["iterates"].push_back(vector_to_json(x));
    }
    if (!t.selections.empty()) {
        j["selections"] = json::array();
        for (const auto& s : t.selections) j["selections"].push_back(selection_to_json(s));
    }
    return j;
}

void write_trace_csv(std::ostream& out, const IterationTrace<double>& t) {
    out << "k,e_k,step_norm,proj_evals,time\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < t.residuals.size(); ++k) {
        out << k << ',' << t.residuals[k] << ',';
        if (k > 0) out << t.step_norms[k - 1];
        out << ',' << t.projection_evals[k] << ',' << t.elapsed_s[k] << '\n';
    }
}

json fejer_to_json(const FejerCertificate& c) {
    return {{"reference_point", vector_to_json(c.reference_point)},
            {"max_violation", c.max_violation},
            {"tolerance", c.tolerance},
            {"passed", c.passed},
            {"per_step_margins", c.per_step_margins}};
}

json rates_to_json(const RateReport& r) {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"q_ratios", r.q_ratios},
            {"q_estimate", finite_or_null(r.q_estimate)},
            {"r_estimate", finite_or_null(r.r_estimate)},
            {"superlinear_flag", r.superlinear_flag},
            {"window", r.window}};
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path + "'");
    out << text;
}

}  // namespace ccrm::io
