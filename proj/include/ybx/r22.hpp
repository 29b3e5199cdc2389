#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ybx/model.hpp"

namespace ybx {

enum class Branch {
    A,
    B_xxz,
    B_ff,
    C_xyz,
    C_ff2,
    D_sym,
    D_colored,
    E_general,
    preset_xyz8v,
    preset_ff2p,
    preset_ising,
    preset_colored,
};

std::string_view branch_name(Branch b);
Branch branch_from_name(std::string_view name);  // ConfigError on unknown tag
bool is_preset(Branch b);

using ConstantMap = std::map<std::string, double, std::less<>>;
using FunctionMap = std::map<std::string, Expr, std::less<>>;

struct FamilySpec {
    Branch branch = Branch::A;
    ConstantMap constants;
    FunctionMap functions;
    Env zero;                                          // overrides of the default zero point
    std::map<std::string, Interval, std::less<>> box;  // overrides of the default sampling box
};

struct BranchSchema {
    std::vector<std::string> constants;           // required
    std::map<std::string, double> defaults;       // optional constants
    std::vector<std::string> functions;           // required
};

const BranchSchema& schema(Branch b);

EightVertexElements eval_family_A(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w);
EightVertexElements eval_family_B(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w);
EightVertexElements eval_family_C(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w);
EightVertexElements eval_family_D(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w);
EightVertexElements eval_family_E(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w);
EightVertexElements eval_preset(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w);

// Validates the family (names, domains, normalization at the zero point) and builds the model.
ModelPtr build_model(const FamilySpec& spec);

ModelPtr preset(Branch b, const ConstantMap& params);

// c-normalized view used by constraint checks and the classifier:
// everything divided by sqrt(c1 c2); d = sqrt(d1 d2) / sqrt(c1 c2).
struct NormalizedElements {
    Complex a1, a2, b1, b2, d;
};
NormalizedElements normalize(const EightVertexElements& e);

// Elementary functions of D_sym at f = f_x(u): {a1, a2, b1, b2, d}.
NormalizedElements dsym_elementary(Complex f, double x0, double f0);

}  // namespace ybx
