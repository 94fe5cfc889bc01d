#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ccrm/io.hpp"
#include "oracles.hpp"

#include <sstream>

using ccrm::ConvexSet;
using ccrm::FeasibilityProblem;
using ccrm::MatrixXd;
using ccrm::VectorXd;
using ccrm::io::json;
using oracle::vec;

namespace {

// Same set, judged by projections of a batch of random points.
void check_same_set(const ConvexSet<double>& a, const ConvexSet<double>& b, oracle::Rng& rng) {
    REQUIRE(std::string(a.kind_name()) == std::string(b.kind_name()));
    REQUIRE(a.dimension() == b.dimension());
    for (int t = 0; t < 20; ++t) {
        const VectorXd z = oracle::gaussian(rng, a.dimension(), 5.0);
        CHECK((ccrm::project(a, z) - ccrm::project(b, z)).norm() <= 1e-12 * (1 + z.norm()));
    }
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("vectors and matrices") {
    const VectorXd v = vec({1.0, -2.5, 1e-300, 0.1});
    CHECK(ccrm::io::vector_from_json(ccrm::io::vector_to_json(v)) == v);
    MatrixXd m(2, 3);
    m << 1, 2, 3, 4, 5, 6.000000000000001;
    CHECK(ccrm::io::matrix_to_json(m) == json::parse("[[1,2,3],[4,5,6.000000000000001]]"));
    CHECK(ccrm::io::matrix_from_json(ccrm::io::matrix_to_json(m)) == m);
    CHECK_THROWS_AS(ccrm::io::vector_from_json(json::parse(R"([1, "x"])")), ccrm::InvalidArgument);
    CHECK_THROWS_AS(ccrm::io::vector_from_json(json::parse("3")), ccrm::InvalidArgument);
    CHECK_THROWS_AS(ccrm::io::matrix_from_json(json::parse("[[1,2],[3]]")), ccrm::InvalidArgument);
}

TEST_CASE("every serializable set kind round trips") {
    oracle::Rng rng(2);
    for (int t = 0; t < 50; ++t) {
        const auto kind = oracle::random_kind(rng);
        const auto set = oracle::random_set_through(rng, kind, oracle::gaussian(rng, 4));
        const json j = ccrm::io::set_to_json(set);
        const auto back = ccrm::io::set_from_json(json::parse(j.dump()));
        check_same_set(set, back, rng);
        // affine bases are re-orthonormalized on load, which may move the last bits
        if (kind != oracle::Kind::Affine) CHECK(ccrm::io::set_to_json(back) == j);
    }
}

TEST_CASE("set json layout") {
    const json h = ccrm::io::set_to_json(ConvexSet<double>::halfspace(vec({1, 0}), 2.0));
    CHECK(h == json::parse(R"({"kind":"halfspace","normal":[1.0,0.0],"offset":2.0})"));
    const json b = ccrm::io::set_to_json(ConvexSet<double>::ball(vec({0, 1}), 3.0));
    CHECK(b.at("kind") == "ball");
    CHECK(b.at("radius") == 3.0);
    // an affine set given without directions is a single point
    const auto pt = ccrm::io::set_from_json(json::parse(R"({"kind":"affine","point":[1,2]})"));
    CHECK(ccrm::project(pt, VectorXd(vec({5, 5}))) == vec({1, 2}));
    const auto sub = ConvexSet<double>::sublevel(
        2, [](const VectorXd& x) { return x.squaredNorm() - 1; },
        [](const VectorXd& x) -> VectorXd { return 2 * x; });
    CHECK_THROWS_AS(ccrm::io::set_to_json(sub), ccrm::ConfigurationError);
}

TEST_CASE("malformed sets") {
    for (const char* text : {R"({"normal":[1,0],"offset":0})", R"({"kind":"cone"})",
                             R"({"kind":"ball","center":[0,0]})", R"({"kind":"ball","center":[0,0],"radius":"one"})",
                             R"({"kind":"ball","center":[0,0],"radius":-1})",
                             R"({"kind":"box","lower":[0,1],"upper":[1,0]})"}) {
        CAPTURE(text);
        CHECK_THROWS_AS(ccrm::io::set_from_json(json::parse(text)), ccrm::Error);
    }
    CHECK_THROWS_AS(ccrm::io::set_from_json(json::parse(R"({"kind":"cone"})")), ccrm::InvalidArgument);
}

TEST_CASE("problems and instances") {
    oracle::Rng rng(4);
    ccrm::EllipsoidGenConfig c;
    c.n = 6;
    c.m = 4;
    c.seed = 31;
    const auto inst = ccrm::generate_instance(c);
    const json j = json::parse(ccrm::io::instance_to_json(inst).dump());
    CHECK(j.at("format") == "ccrm-instance");
    CHECK(j.at("generation_log").size() == 4);
    CHECK(j.at("generation_log")[0].at("form") == "quadratic");
    CHECK(j.at("generation_log")[1].at("form") == "center");

    const auto loaded = ccrm::io::instance_from_json(j);
    REQUIRE(loaded.generator);
    CHECK(loaded.generator->n == 6);
    CHECK(loaded.generator->m == 4);
    CHECK(loaded.generator->seed == 31);
    CHECK(loaded.generator->lambda_scale == c.lambda_scale);
    CHECK(loaded.problem.instance_id() == inst.problem.instance_id());
    REQUIRE(loaded.problem.size() == 4);
    CHECK(*loaded.problem.certified_point() == inst.common_point);
    for (std::size_t i = 0; i < 4; ++i) {
        const auto* a = inst.problem.set(i).as<ccrm::EllipsoidQuadratic<double>>();
        const auto* b = loaded.problem.set(i).as<ccrm::EllipsoidQuadratic<double>>();
        REQUIRE(b);
        CHECK(a->A == b->A);  // shortest round-trip decimal output keeps every bit
        CHECK(a->b == b->b);
        CHECK(a->c == b->c);
    }

    // a plain problem without generator info
    FeasibilityProblem<double> quadrant({ConvexSet<double>::halfspace(vec({1, 0}), 0.0),
                                         ConvexSet<double>::halfspace(vec({0, 1}), 0.0)},
                                        VectorXd(vec({-1, -1})), "quadrant");
    const auto plain = ccrm::io::instance_from_json(ccrm::io::problem_to_json(quadrant));
    CHECK_FALSE(plain.generator);
    CHECK(plain.problem.instance_id() == "quadrant");
    CHECK(plain.problem.dimension() == 2);

    json bad = ccrm::io::problem_to_json(quadrant);
    bad["dimension"] = 3;
    CHECK_THROWS_AS(ccrm::io::problem_from_json(bad), ccrm::InvalidArgument);
    bad = ccrm::io::problem_to_json(quadrant);
    bad["certified_point"] = json::array({1, 1});
    CHECK_THROWS_AS(ccrm::io::problem_from_json(bad), ccrm::InvalidArgument);
    CHECK_THROWS_AS(ccrm::io::problem_from_json(json::object()), ccrm::InvalidArgument);
}

TEST_CASE("solver configs") {
    ccrm::SolverConfig c;
    c.method = ccrm::Method::CCRM;
    c.control = ccrm::ControlKind::MostViolatedFunction;
    c.epsilon = 1e-8;
    c.max_iter = 77;
    c.seed = 5;
    c.step_test = false;
    const auto back = ccrm::io::config_from_json(json::parse(ccrm::io::config_to_json(c).dump()));
    CHECK(back.method == c.method);
    CHECK(back.control == c.control);
    CHECK(back.epsilon == c.epsilon);
    CHECK(back.max_iter == 77);
    CHECK(back.seed == 5);
    CHECK_FALSE(back.step_test);

    const auto defaults = ccrm::io::config_from_json(json::object());
    CHECK(defaults.epsilon == ccrm::SolverConfig{}.epsilon);
    CHECK_THROWS_AS(ccrm::io::config_from_json(json::parse(R"({"epsilon":0})")), ccrm::ConfigurationError);
    CHECK_THROWS_AS(ccrm::io::config_from_json(json::parse(R"({"epsilon":"small"})")), ccrm::ConfigurationError);
    CHECK_THROWS_AS(ccrm::io::config_from_json(json::parse(R"({"method":"newton"})")), ccrm::Error);
}

TEST_CASE("trace json and csv") {
    FeasibilityProblem<double> quadrant({ConvexSet<double>::halfspace(vec({1, 0}), 0.0),
                                         ConvexSet<double>::halfspace(vec({0, 1}), 0.0)});
    ccrm::SolverConfig cfg;
    cfg.method = ccrm::Method::SEPM;
    cfg.record_iterates = true;
    const auto trace = ccrm::solve(quadrant, cfg, VectorXd(vec({3, 4})));
    REQUIRE(trace.iterations() >= 1);

    const json j = ccrm::io::trace_to_json(trace);
    CHECK(j.at("iterations") == trace.iterations());
    CHECK(j.at("residuals").size() == trace.residuals.size());
    CHECK(j.at("step_norms").size() == trace.iterations());
    CHECK(j.at("iterates").size() == trace.residuals.size());
    CHECK(j.at("termination") == std::string(ccrm::to_string(trace.termination)));

    std::ostringstream out;
    ccrm::io::write_trace_csv(out, trace);
    const auto lines = lines_of(out.str());
    REQUIRE(lines.size() == trace.residuals.size() + 1);
    CHECK(lines[0] == "k,e_k,step_norm,proj_evals,time");
    CHECK(lines[1].rfind("0,7,,0,", 0) == 0);
    for (std::size_t k = 1; k < lines.size(); ++k) {
        CHECK(std::count(lines[k].begin(), lines[k].end(), ',') == 4);
        CHECK(lines[k].rfind(std::to_string(k - 1) + ",", 0) == 0);
    }
    const std::string second = lines[2];
    const auto step = second.substr(second.find(',', second.find(',') + 1) + 1);
    CHECK(std::stod(step) == doctest::Approx(trace.step_norms[0]));
}

TEST_CASE("fejer and rate reports") {
    ccrm::FejerCertificate cert;
    cert.reference_point = vec({1, 2});
    cert.max_violation = -0.5;
    cert.tolerance = 1e-10;
    cert.passed = true;
    cert.per_step_margins = {-1.0, -0.5};
    const json f = ccrm::io::fejer_to_json(cert);
    CHECK(f == json::parse(R"({"reference_point":[1.0,2.0],"max_violation":-0.5,"tolerance":1e-10,
                              "passed":true,"per_step_margins":[-1.0,-0.5]})"));

    const auto rep = ccrm::estimate_rates_from_distances({1.0, 0.5, 0.25, 0.125, 0.0625});
    const json r = ccrm::io::rates_to_json(rep);
    CHECK(r.at("q_estimate") == 0.5);
    CHECK(r.at("superlinear_flag") == false);
    CHECK(r.at("q_ratios").size() == 4);
    ccrm::RateReport empty;
    empty.q_estimate = std::numeric_limits<double>::quiet_NaN();
    CHECK(ccrm::io::rates_to_json(empty).at("q_estimate").is_null());
}

TEST_CASE("files") {
    CHECK_THROWS_AS(ccrm::io::read_json_file("/nonexistent/x.json"), ccrm::InvalidArgument);
    const std::string path = "test_io_tmp.json";
    ccrm::io::write_text_file(path, "{\"a\": [1, 2");
    CHECK_THROWS_AS(ccrm::io::read_json_file(path), ccrm::InvalidArgument);
    ccrm::io::write_text_file(path, "{\"a\": [1, 2]}");
    CHECK(ccrm::io::read_json_file(path).at("a").size() == 2);
    std::remove(path.c_str());
    CHECK_THROWS_AS(ccrm::io::write_text_file("/nonexistent/dir/x.json", "{}"), ccrm::InvalidArgument);
}
