#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "ybx/model.hpp"

namespace ybx {

struct ToleranceConfig {
    double ybe_rel = 1e-9;
    double identity_abs = 1e-12;
    double constraint_abs = 1e-10;
    double constancy_std = 1e-9;

    void validate() const;  // ConfigError unless all positive
};

struct CheckResult {
    std::string name;
    double max_abs = 0.0;
    double max_rel = 0.0;
    std::string argmax;
    double tolerance = 0.0;
    bool asserted = true;  // false: reported only, never fails the run
    bool pass = true;
    std::map<std::string, double> extra;
    std::string note;
};

struct ResidualReport {
    std::string family;
    int samples = 0;
    int resample_count = 0;
    std::vector<CheckResult> checks;
    bool pass = true;

    // Sets r.pass from max_rel and tolerance, then records it.
    void add(CheckResult r);
    void merge(const ResidualReport& other);
    const CheckResult* find(std::string_view name) const;
};

// Deterministic point sampler over a model's box. Coordinates closer than
// kAvoid to their zero-point value are redrawn.
class Sampler {
public:
    static constexpr double kAvoid = 1e-3;

    Sampler(const Coordinates& coords, std::uint64_t seed);
    SpectralPoint draw();
    double uniform();  // [0,1), platform independent

private:
    const Coordinates& coords_;
    std::mt19937_64 rng_;
};

// Resolves the seed: explicit value, else YBX_SEED, else 42.
std::uint64_t default_seed(std::optional<std::uint64_t> explicit_seed = std::nullopt);

ResidualReport check_ybe(const RMatrixModel& model, int samples, std::uint64_t seed,
                         const ToleranceConfig& tol = {});

std::vector<SpectralPoint> sample_grid(const RMatrixModel& model, int count, std::uint64_t seed);

ResidualReport check_normalization(const RMatrixModel& model, const std::vector<SpectralPoint>& grid,
                                   const ToleranceConfig& tol = {});

ResidualReport check_unitarity(const RMatrixModel& model, int samples, std::uint64_t seed,
                               const ToleranceConfig& tol = {});

ResidualReport check_free_fermion(const RMatrixModel& model, int samples, std::uint64_t seed,
                                  const ToleranceConfig& tol = {});

ResidualReport check_constraints(const RMatrixModel& model, int samples, std::uint64_t seed,
                                 const ToleranceConfig& tol = {});

ResidualReport check_independent_eqs(const RMatrixModel& model, int samples, std::uint64_t seed,
                                     const ToleranceConfig& tol = {});

// The six independent equations at one triple, c = 1 and d1 = d2 assumed.
std::vector<Complex> independent_equations(const RMatrixModel& model, const SpectralPoint& u,
                                           const SpectralPoint& v, const SpectralPoint& w);

struct DeterminantFactors {
    Complex factor1;  // b-c cross term
    Complex factor2;  // free-fermionic term
    std::string winner;  // "factor1", "factor2", "both", "none"
};

DeterminantFactors consistency_determinant(const RMatrixModel& model, const SpectralPoint& u,
                                           const SpectralPoint& v, const SpectralPoint& w);

ResidualReport check_r33_relations(const RMatrixModel& model, int samples, std::uint64_t seed,
                                   const ToleranceConfig& tol = {});

// Every check that applies to the model's dimension and branch.
ResidualReport run_suite(const RMatrixModel& model, int samples, std::uint64_t seed,
                         const ToleranceConfig& tol = {});

}  // namespace ybx
