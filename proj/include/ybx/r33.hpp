#pragma once

#include <optional>

#include "ybx/model.hpp"

namespace ybx {

struct R33Spec {
    Expr f;   // rapidity function, f(0) = 1
    Expr c1;  // color functions
    Expr c3;
    double x_f = 1.0;
    int alpha = 1;
    int alphabar = 1;
    double gamma = 1.0;
    // constant-color shorthand c1 = exp(eps1/2), c3 = exp(eps3/2); used when c1/c3 are empty
    std::optional<double> eps1, eps3;
    // optional basis renormalization (1, s, t)
    std::optional<Expr> gauge_s, gauge_t;
    Env zero;
    std::map<std::string, Interval, std::less<>> box;
};

// Nonzero entries of the 9x9 solution; basis 11,12,13,21,22,23,31,32,33.
struct FifteenVertexElements {
    Complex a1, a2, a3;
    Complex b1, b2, b3;
    Complex bb1, bb2, bb3;  // barred b's
    Complex c1, c2, c3;
    Complex cb1, cb2, cb3;  // barred c's

    ComplexMatrix to_matrix() const;
    static FifteenVertexElements from_matrix(const ComplexMatrix& m);
};

// Fills c1/c3 from eps1/eps3 when needed, checks signs and gamma. Throws ConfigError.
R33Spec resolve(R33Spec spec);

FifteenVertexElements eval_r33(const R33Spec& spec, const SpectralPoint& u, const SpectralPoint& w);

// Scalar s(u) = x_f + f(u)(1 - x_f) with R(u,u) = s(u) P.
Complex r33_scalar(const R33Spec& spec, const SpectralPoint& u);

ModelPtr build_r33_model(const R33Spec& spec);

struct SpinOperators {
    ComplexMatrix Jp, Jm, Jz;
    ComplexMatrix e_plus, e_zero, e_minus;
    ComplexMatrix S_zp, S_mz, S_pz, S_zm, S_pp, S_mm;  // S^{z+}, S^{-z}, S^{+z}, S^{z-}, S^{++}, S^{--}

    static const SpinOperators& get();
};

ComplexMatrix build_P(int alpha, int alphabar, double gamma, double eps1, double eps3);

// printed: factor 2 on the bracketed hopping terms as displayed; consistent: factor 1,
// which is what the finite-difference expansion of the solution produces.
enum class PbarForm { consistent, printed };

ComplexMatrix build_Pbar(int alpha, int alphabar, double gamma, double eps1, double eps3,
                         PbarForm form = PbarForm::consistent);

struct HamiltonianOptions {
    double h = 1e-5;
    bool richardson = true;
    double max_disagreement = 1e-4;  // relative, between the h and h/2 estimates
};

// H = -d/dw [Ř(u,w) / s(u)] at w = u, differentiating along the coordinate "u".
ComplexMatrix extract_hamiltonian(const RMatrixModel& model, const SpectralPoint& u,
                                  const HamiltonianOptions& opt = {});
ComplexMatrix extract_hamiltonian(const R33Spec& spec, const SpectralPoint& u,
                                  const HamiltonianOptions& opt = {});

// [P + (x_f - 1) Pbar] / (1 + u(1 - x_f)) with eps_i = 2 log c_i(u).
ComplexMatrix analytic_hamiltonian(const R33Spec& spec, const SpectralPoint& u,
                                   PbarForm form = PbarForm::consistent);

}  // namespace ybx
