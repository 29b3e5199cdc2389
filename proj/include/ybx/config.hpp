#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ybx/classify.hpp"
#include "ybx/r22.hpp"
#include "ybx/r33.hpp"
#include "ybx/verify.hpp"

namespace ybx {

struct SamplingConfig {
    int samples = 100;
    std::optional<std::uint64_t> seed;
    ToleranceConfig tolerances;
};

// A parsed config document. Exactly one of r22 / r33 is meaningful.
struct Config {
    std::string family;
    bool is_r33 = false;
    FamilySpec r22;
    R33Spec r33;
    std::vector<Expr> gauge;  // 4x4 gauge basis (f0, f1); empty when absent
    SamplingConfig sampling;
    std::vector<double> direction;  // classifier direction; empty: first axis
    nlohmann::json source;
};

// ConfigError with line:column for malformed JSON and the key name for schema errors.
Config parse_config(const std::string& text);
Config load_config(const std::filesystem::path& path);

ModelPtr build(const Config& cfg);

// "u=0.3,p=1.1" -> point over the model's coordinates; unspecified ones take their zero value.
SpectralPoint parse_point(const std::string& text, const Coordinates& coords);

inline constexpr const char* kReportVersion = "1";

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const ResidualReport& r);
nlohmann::json to_json(const ClassificationReport& r);
nlohmann::json to_json(const ComplexMatrix& m);  // row-major [[re,im],...]

// {version, config, <fields>, pass}; the timestamp is isolated under "meta".
nlohmann::json make_report(const Config& cfg, nlohmann::json fields, bool pass);

}  // namespace ybx
