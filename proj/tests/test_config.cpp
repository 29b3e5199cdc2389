#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "ybx/config.hpp"
#include "ybx/error.hpp"

using namespace ybx;

namespace {

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

const char* kE = R"J({
  "family": "E_general",
  "constants": {"x_f": 0.3, "xbar0": 0.7},
  "functions": {"d": "0.6*sin(u)", "f_g": "0.5*sinh(u)"},
  "sampling": {"samples": 25, "seed": 9, "box": {"u": [-0.5, 0.5]}, "tolerances": {"ybe_rel": 1e-8}}
})J";

}  // namespace

TEST_CASE("every shipped config loads and builds") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(YBX_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        CAPTURE(entry.path().string());
        const auto cfg = load_config(entry.path());
        const auto m = build(cfg);
        CHECK(m->n() == (cfg.is_r33 ? 3 : 2));
        ++count;
    }
    CHECK(count == 14);
}

TEST_CASE("fields are read into the family description") {
    const auto cfg = parse_config(kE);
    CHECK(cfg.family == "E_general");
    CHECK_FALSE(cfg.is_r33);
    CHECK(cfg.r22.branch == Branch::E_general);
    CHECK(cfg.r22.constants.at("xbar0") == 0.7);
    CHECK(cfg.sampling.samples == 25);
    CHECK(cfg.sampling.seed == 9u);
    CHECK(cfg.sampling.tolerances.ybe_rel == 1e-8);
    CHECK(cfg.sampling.tolerances.constraint_abs == 1e-10);
    const auto m = build(cfg);
    CHECK(m->coordinates().box.at("u").hi == 0.5);
}

TEST_CASE("malformed JSON reports line and column") {
    const auto msg = error_of("{\n  \"family\": \"A\",\n  \"constants\": {\"d0\": }\n}");
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("schema errors name the offending key") {
    CHECK(error_of(R"J({"family": "A", "constants": {"d0": 1}, "functions": {"dd": "u"}})J").find("'dd'") != std::string::npos);
    CHECK(error_of(R"J({"family": "A", "constants": {"d0": 1}, "functions": {"d": "u"}, "extra": 1})J").find("'extra'") !=
          std::string::npos);
    CHECK(error_of(R"J({"constants": {}})J").find("'family'") != std::string::npos);
    CHECK(error_of(R"J({"family": "Q"})J") != "");
    CHECK(error_of(R"J({"family": "A", "constants": {"d0": "x"}, "functions": {"d": "u"}})J").find("'d0'") != std::string::npos);
    CHECK(error_of(R"J({"family": "A", "constants": {"d0": 1}, "functions": {"d": "u+"}})J").find("offset") != std::string::npos);
    CHECK(error_of(R"J({"family": "A", "constants": {"d0": 1}, "functions": {"d": "u"}, "sampling": {"samples": 0}})J") != "");
    CHECK(error_of(R"J({"family": "A", "constants": {"d0": 1}, "functions": {"d": "u"}, "sampling": {"box": {"u": [1, 0]}}})J") != "");
    CHECK(error_of(R"J({"family": "r33", "functions": {"f": "1+u", "c1": "1"}})J").find("c3") != std::string::npos);
    CHECK(error_of(R"J({"family": "r33", "constants": {"alpha": 0.5}, "functions": {"f": "1+u"}})J").find("alpha") !=
          std::string::npos);
}

TEST_CASE("typo in a function name is caught before evaluation") {
    const auto msg = error_of(R"J({"family": "E_general", "constants": {"x_f": 0.3, "xbar0": 0.7},
                                 "functions": {"d": "0.6*sin(u)", "fg": "u"}})J");
    CHECK(msg.find("'fg'") != std::string::npos);
    const auto missing = error_of(R"J({"family": "E_general", "constants": {"x_f": 0.3, "xbar0": 0.7},
                                     "functions": {"d": "0.6*sin(u)"}})J");
    CHECK(missing.find("'f_g'") != std::string::npos);
}

TEST_CASE("gauge blocks") {
    auto cfg = parse_config(R"J({"family": "A", "constants": {"d0": 1}, "functions": {"d": "tanh(u)"},
                                "gauge": {"f0": "1", "f1": "exp(0.3*u)"}})J");
    CHECK(cfg.gauge.size() == 2);
    CHECK(check_ybe(*build(cfg), 10, 1).pass);
    cfg = parse_config(R"J({"family": "r33", "constants": {"eps1": 0.1, "eps3": 0.2},
                           "functions": {"f": "1+u"}, "gauge": {"s": "exp(u)", "t": "1+u^2"}})J");
    CHECK(cfg.r33.gauge_s.has_value());
    CHECK(check_ybe(*build(cfg), 10, 1).pass);
    CHECK(error_of(R"J({"family": "r33", "functions": {"f": "1+u", "c1": "1", "c3": "1"}, "gauge": {"s": "u"}})J") != "");
}

TEST_CASE("point parsing") {
    const auto m = build(parse_config(R"J({"family": "B_xxz", "constants": {"u0": 0.4, "c0": 1.3}})J"));
    const auto p = parse_point("u=0.5,p=pi/4", m->coordinates());
    CHECK(p.at("u") == 0.5);
    CHECK(p.at("p") == doctest::Approx(0.7853981634));
    CHECK(p.at("t") == 1.0);
    CHECK_THROWS_AS(parse_point("q=1", m->coordinates()), ConfigError);
    CHECK_THROWS_AS(parse_point("u", m->coordinates()), ConfigError);
    CHECK_THROWS_AS(parse_point("u=i", m->coordinates()), ConfigError);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
    const auto cfg = parse_config(kE);
    const auto m = build(cfg);
    auto a = make_report(cfg, to_json(run_suite(*m, 20, 42)), true);
    auto b = make_report(cfg, to_json(run_suite(*m, 20, 42)), true);
    CHECK(a.contains("meta"));
    CHECK(a["version"] == kReportVersion);
    CHECK(a["checks"].is_array());
    CHECK(a["checks"][0].contains("argmax"));
    a.erase("meta");
    b.erase("meta");
    CHECK(a.dump() == b.dump());

    const auto mat = to_json(ComplexMatrix::identity(2));
    CHECK(mat.dump() == "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]");
}
