#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ybx/model.hpp"
#include "ybx/r22.hpp"

namespace ybx {

struct ElementDerivatives {
    Complex a1, a2, b1, b2, d;
};

struct DerivativeData {
    Complex a1p, a2p, b1p, b2p, dp;
    std::vector<double> direction;  // unit length, one entry per coordinate
    std::optional<ElementDerivatives> higher;  // second derivatives, reported only
    bool d_identically_zero = false;
    bool b_identically_zero = false;
    double error_estimate = 0.0;
};

// First derivatives of the c-normalized elementary functions f(u) = f(u, 0)
// along `direction` (empty: first coordinate axis). Fourth-order central
// stencil, Richardson-extrapolated from h and h/2.
DerivativeData derivatives_at_zero(const RMatrixModel& model, std::vector<double> direction = {},
                                   double h = 1e-3);

struct ClassificationReport {
    Branch branch = Branch::A;
    std::map<std::string, Complex> constants;
    std::map<std::string, double> confidence;  // distance from each decision boundary
    bool degenerate = false;
    std::string x_f_definition;
};

ClassificationReport classify(const DerivativeData& dd, double tol = 1e-6);

struct RecoveredConstants {
    std::map<std::string, Complex> from_derivatives;
    std::map<std::string, Complex> from_least_squares;
    double gap = 0.0;
};

// Constants of `branch` estimated from derivatives at 0 and by least squares
// over the elementary constraint residuals. ClassificationError when the
// estimates differ by more than max_gap.
RecoveredConstants recover_constants(const RMatrixModel& model, Branch branch, int samples = 50,
                                     std::uint64_t seed = 42, double max_gap = 1e-4);

}  // namespace ybx
