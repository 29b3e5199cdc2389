#include "ybx/r33.hpp"

#include <cmath>
#include <set>

#include "ybx/error.hpp"

namespace ybx {

namespace {

class R33Model final : public RMatrixModel {
public:
    explicit R33Model(R33Spec spec) : spec_(std::move(spec)) {
        std::set<std::string> vars{"u"};
        for (const Expr* e : {&spec_.f, &spec_.c1, &spec_.c3})
            for (const auto& v : free_vars(*e)) vars.insert(v);
        if (spec_.gauge_s)
            for (const auto& v : free_vars(*spec_.gauge_s)) vars.insert(v);
        if (spec_.gauge_t)
            for (const auto& v : free_vars(*spec_.gauge_t)) vars.insert(v);
        coords_.names = {"u"};
        Env zero;
        for (const auto& v : vars) {
            if (v != "u") coords_.names.push_back(v);
            zero[v] = 0.0;
            coords_.box[v] = {-1.0, 1.0};
        }
        for (const auto& [n, x] : spec_.zero) {
            if (!zero.count(n)) throw ConfigError("zero point names unknown coordinate '" + n + "'");
            zero[n] = x;
        }
        for (const auto& [n, iv] : spec_.box) {
            if (!zero.count(n)) throw ConfigError("sampling box names unknown coordinate '" + n + "'");
            if (!(iv.lo < iv.hi)) throw ConfigError("sampling box for '" + n + "' is empty");
            coords_.box[n] = iv;
        }
        coords_.zero = SpectralPoint(zero);
        const Complex f0 = eval(spec_.f, coords_.zero.env());
        if (std::abs(f0 - 1.0) > 1e-10) throw ConfigError("f must equal 1 at the zero point");
    }

    int n() const override { return 3; }
    std::string family() const override { return "r33"; }
    const Coordinates& coordinates() const override { return coords_; }
    const R33Spec* r33_spec() const override { return &spec_; }

    ComplexMatrix evaluate(const SpectralPoint& u, const SpectralPoint& w) const override {
        return eval_r33(spec_, u, w).to_matrix();
    }
    Complex coincident_scalar(const SpectralPoint& u) const override { return r33_scalar(spec_, u); }

private:
    R33Spec spec_;
    Coordinates coords_;
};

Expr constant_color(double eps) { return make_literal(std::exp(eps / 2)); }

}  // namespace

ComplexMatrix FifteenVertexElements::to_matrix() const {
    ComplexMatrix m(9);
    m(0, 0) = a1;
    m(1, 1) = b1;
    m(1, 3) = cb1;
    m(2, 2) = b3;
    m(2, 6) = cb3;
    m(3, 1) = c1;
    m(3, 3) = bb1;
    m(4, 4) = a2;
    m(5, 5) = b2;
    m(5, 7) = cb2;
    m(6, 2) = c3;
    m(6, 6) = bb3;
    m(7, 5) = c2;
    m(7, 7) = bb2;
    m(8, 8) = a3;
    return m;
}

FifteenVertexElements FifteenVertexElements::from_matrix(const ComplexMatrix& m) {
    if (m.dim() != 9) throw DimensionError("fifteen-vertex elements need a 9x9 matrix");
    FifteenVertexElements e;
    e.a1 = m(0, 0);
    e.b1 = m(1, 1);
    e.cb1 = m(1, 3);
    e.b3 = m(2, 2);
    e.cb3 = m(2, 6);
    e.c1 = m(3, 1);
    e.bb1 = m(3, 3);
    e.a2 = m(4, 4);
    e.b2 = m(5, 5);
    e.cb2 = m(5, 7);
    e.c3 = m(6, 2);
    e.bb3 = m(6, 6);
    e.c2 = m(7, 5);
    e.bb2 = m(7, 7);
    e.a3 = m(8, 8);
    return e;
}

R33Spec resolve(R33Spec spec) {
    if (spec.alpha != 1 && spec.alpha != -1) throw ConfigError("alpha must be +1 or -1");
    if (spec.alphabar != 1 && spec.alphabar != -1) throw ConfigError("alphabar must be +1 or -1");
    if (spec.gamma == 0.0 || !std::isfinite(spec.gamma)) throw ConfigError("gamma must be nonzero");
    if (!std::isfinite(spec.x_f)) throw ConfigError("x_f must be finite");
    if (spec.f.empty()) throw ConfigError("r33: missing function 'f'");
    if (spec.c1.empty()) {
        if (!spec.eps1) throw ConfigError("r33: missing function 'c1' (or constant eps1)");
        spec.c1 = constant_color(*spec.eps1);
    }
    if (spec.c3.empty()) {
        if (!spec.eps3) throw ConfigError("r33: missing function 'c3' (or constant eps3)");
        spec.c3 = constant_color(*spec.eps3);
    }
    if (spec.gauge_s.has_value() != spec.gauge_t.has_value())
        throw ConfigError("r33 gauge needs both 's' and 't'");
    return spec;
}

Complex r33_scalar(const R33Spec& spec, const SpectralPoint& u) {
    const Complex f = eval(spec.f, u.env());
    return spec.x_f + f * (1.0 - spec.x_f);
}

FifteenVertexElements eval_r33(const R33Spec& spec, const SpectralPoint& u, const SpectralPoint& w) {
    const double xf = spec.x_f, al = spec.alpha, alb = spec.alphabar, gam = spec.gamma;
    const Complex fu = eval(spec.f, u.env()), fw = eval(spec.f, w.env());
    const Complex C1u = eval(spec.c1, u.env()), C1w = eval(spec.c1, w.env());
    const Complex C3u = eval(spec.c3, u.env()), C3w = eval(spec.c3, w.env());
    if (C1u == Complex{} || C1w == Complex{} || C3u == Complex{} || C3w == Complex{})
        throw SingularPoint("color function vanishes");

    const Complex su = xf + fu * (1.0 - xf), sw = xf + fw * (1.0 - xf);
    const Complex A = fu + xf * (1.0 - fw), B = fw + xf * (1.0 - fu), D = fu - fw;
    const Complex r1 = C1u * C1u / (C1w * C1w), r3 = C3u * C3u / (C3w * C3w);

    FifteenVertexElements e;
    e.a1 = A;
    e.a2 = r1 * ((al + 1.0) * A + (1.0 - al) * B) / 2.0;
    e.a3 = r3 * ((alb + 1.0) * A + (1.0 - alb) * B) / 2.0;
    const Complex root = std::sqrt(su) * std::sqrt(sw);
    e.c1 = e.cb1 = C1u * root / C1w;
    e.c3 = e.cb3 = C3u * root / C3w;
    e.c2 = C1u * C3u * su / (C1w * C3w);
    e.cb2 = C1u * C3u * sw / (C1w * C3w);
    e.b1 = C1u * C1u * D;
    e.b3 = xf * C3u * C3u * D;
    e.bb1 = xf * D / (C1w * C1w);
    e.b2 = xf * gam * C3u * C3u * D / (C1w * C1w);
    e.bb3 = D / (C3w * C3w);
    e.bb2 = C1u * C1u * D / (gam * C3w * C3w);
    return e;
}

ModelPtr build_r33_model(const R33Spec& spec) {
    R33Spec s = resolve(spec);
    std::optional<Expr> gs = s.gauge_s, gt = s.gauge_t;
    ModelPtr m = std::make_shared<R33Model>(std::move(s));
    if (gs) m = gauge_transform(m, {make_literal(1.0), *gs, *gt});
    return m;
}

const SpinOperators& SpinOperators::get() {
    static const SpinOperators ops = [] {
        SpinOperators o;
        const double r2 = std::sqrt(2.0);
        o.Jp = ComplexMatrix(3);
        o.Jp(0, 1) = o.Jp(1, 2) = 1.0 / r2;
        o.Jm = o.Jp.transpose();
        o.Jz = ComplexMatrix(3);
        o.Jz(0, 0) = 1.0;
        o.Jz(2, 2) = -1.0;
        const auto I = ComplexMatrix::identity(3);
        const auto Sp = o.Jp * r2, Sm = o.Jm * r2, Sz = o.Jz;
        o.e_plus = Sz * (Sz + I) * 0.5;
        o.e_minus = Sz * (Sz - I) * 0.5;
        o.e_zero = I - Sz * Sz;
        o.S_zp = Sz * Sp;
        o.S_mz = Sm * Sz;
        o.S_pz = Sp * Sz;
        o.S_zm = Sz * Sm;
        o.S_pp = Sp * Sp;
        o.S_mm = Sm * Sm;
        return o;
    }();
    return ops;
}

ComplexMatrix build_P(int alpha, int alphabar, double gamma, double eps1, double eps3) {
    if (gamma == 0.0) throw ConfigError("gamma must be nonzero");
    const auto& o = SpinOperators::get();
    ComplexMatrix P = kron(o.e_plus, o.e_plus);
    P += kron(o.e_zero, o.e_zero) * double(alpha);
    P += kron(o.e_minus, o.e_minus) * double(alphabar);
    P += kron(o.S_zp, o.S_mz) * std::exp(eps1);
    P += kron(o.S_mz, o.S_zp) * std::exp(-eps1);
    P += kron(o.S_pz, o.S_zm) * (std::exp(eps3 - eps1) * gamma);
    P += kron(o.S_zm, o.S_pz) * (std::exp(eps1 - eps3) / gamma);
    P += kron(o.S_pp, o.S_mm) * std::exp(eps3);
    P += kron(o.S_mm, o.S_pp) * std::exp(-eps3);
    return P;
}

ComplexMatrix build_Pbar(int alpha, int alphabar, double gamma, double eps1, double eps3, PbarForm form) {
    if (gamma == 0.0) throw ConfigError("gamma must be nonzero");
    const auto& o = SpinOperators::get();
    const double fac = form == PbarForm::printed ? 2.0 : 1.0;
    ComplexMatrix P = kron(o.e_plus, o.e_plus);
    P += kron(o.e_zero, o.e_zero) * ((1.0 + alpha) / 2.0);
    P += kron(o.e_minus, o.e_minus) * ((1.0 + alphabar) / 2.0);
    P += (kron(o.e_zero, o.e_plus) + kron(o.e_plus, o.e_zero) + kron(o.e_minus, o.e_plus) +
          kron(o.e_plus, o.e_minus)) * 0.5;
    P += kron(o.e_zero, o.e_minus);
    P += kron(o.S_pp, o.S_mm) * (fac * std::exp(eps3));
    P += kron(o.S_mz, o.S_zp) * (fac * std::exp(-eps1));
    P += kron(o.S_pz, o.S_zm) * (fac * std::exp(eps3 - eps1) * gamma);
    return P;
}

ComplexMatrix extract_hamiltonian(const RMatrixModel& model, const SpectralPoint& u,
                                  const HamiltonianOptions& opt) {
    if (!(opt.h > 0.0)) throw ConfigError("finite-difference step must be positive");
    const double u0 = u.at("u");
    const Complex s = model.coincident_scalar(u);
    if (s == Complex{}) throw SingularPoint("normalization scalar vanishes");
    auto at = [&](double dw) {
        SpectralPoint w = u;
        w.set("u", u0 + dw);
        return model.check(u, w);
    };
    auto central = [&](double h) { return (at(h) - at(-h)) * (1.0 / (2.0 * h)); };
    const auto d1 = central(opt.h);
    ComplexMatrix H = d1;
    if (opt.richardson) {
        const auto d2 = central(opt.h / 2);
        const double gap = max_abs_diff(d1, d2);
        if (gap > opt.max_disagreement * std::max(1.0, d2.max_abs()))
            throw ConvergenceError("finite-difference estimates at h and h/2 disagree by " + std::to_string(gap));
        H = (d2 * 4.0 - d1) * (1.0 / 3.0);
    }
    return H * (-1.0 / s);
}

ComplexMatrix extract_hamiltonian(const R33Spec& spec, const SpectralPoint& u, const HamiltonianOptions& opt) {
    return extract_hamiltonian(*build_r33_model(spec), u, opt);
}

ComplexMatrix analytic_hamiltonian(const R33Spec& spec, const SpectralPoint& u, PbarForm form) {
    const R33Spec s = resolve(spec);
    for (const Expr* c : {&s.c1, &s.c3})
        if (!free_vars(*c).empty()) throw DomainError("analytic Hamiltonian needs constant colors");
    const double eps1 = s.eps1 && spec.c1.empty() ? *s.eps1 : 2.0 * std::log(eval(s.c1, u.env())).real();
    const double eps3 = s.eps3 && spec.c3.empty() ? *s.eps3 : 2.0 * std::log(eval(s.c3, u.env())).real();
    const ComplexMatrix P = build_P(s.alpha, s.alphabar, s.gamma, eps1, eps3);
    const ComplexMatrix Pb = build_Pbar(s.alpha, s.alphabar, s.gamma, eps1, eps3, form);
    const double uu = u.at("u");
    return (P + Pb * (s.x_f - 1.0)) * (1.0 / (1.0 + uu * (1.0 - s.x_f)));
}

}  // namespace ybx
