#include "ybx/r22.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "ybx/ellip.hpp"
#include "ybx/error.hpp"

namespace ybx {

namespace {

constexpr double kZeroTol = 1e-10;

struct BranchEntry {
    Branch branch;
    std::string_view name;
};

constexpr std::array<BranchEntry, 12> kBranches{{
    {Branch::A, "A"},
    {Branch::B_xxz, "B_xxz"},
    {Branch::B_ff, "B_ff"},
    {Branch::C_xyz, "C_xyz"},
    {Branch::C_ff2, "C_ff2"},
    {Branch::D_sym, "D_sym"},
    {Branch::D_colored, "D_colored"},
    {Branch::E_general, "E_general"},
    {Branch::preset_xyz8v, "preset_xyz8v"},
    {Branch::preset_ff2p, "preset_ff2p"},
    {Branch::preset_ising, "preset_ising"},
    {Branch::preset_colored, "preset_colored"},
}};

double constant(const FamilySpec& s, std::string_view name) {
    if (auto it = s.constants.find(name); it != s.constants.end()) return it->second;
    const auto& d = schema(s.branch).defaults;
    if (auto it = d.find(std::string(name)); it != d.end()) return it->second;
    throw ConfigError(std::string(branch_name(s.branch)) + ": missing constant '" + std::string(name) + "'");
}

Complex fn(const FamilySpec& s, std::string_view name, const SpectralPoint& x) {
    auto it = s.functions.find(name);
    if (it == s.functions.end())
        throw ConfigError(std::string(branch_name(s.branch)) + ": missing function '" + std::string(name) + "'");
    return eval(it->second, x.env());
}

Complex divide(Complex num, Complex den, const char* what) {
    if (den == Complex{}) throw SingularPoint(std::string("vanishing denominator in ") + what);
    return num / den;
}

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

EightVertexElements finish(EightVertexElements e, const char* what) {
    for (Complex z : {e.a1, e.a2, e.b1, e.b2, e.c1, e.c2, e.d1, e.d2})
        if (!finite(z)) throw SingularPoint(std::string("non-finite entry in ") + what);
    return e;
}

EightVertexElements symmetric(Complex a1, Complex a2, Complex b1, Complex b2, Complex d) {
    return {a1, a2, b1, b2, 1.0, 1.0, d, d};
}

// ---- E_general closed form (shared by D_sym) ----

struct EPart {
    Complex d, f, df, G, g, fp, a2;
};

EPart e_part(Complex d, Complex f, double xf, double xb) {
    EPart p;
    p.d = d;
    p.f = f;
    p.df = 2.0 * d / (1.0 + d * d);
    p.G = xf * p.df + std::sqrt(1.0 - (xb * xb - xf * xf) * p.df * p.df);
    const Complex den = 1.0 - xb * f * p.df;
    p.g = divide(p.G, den, "g_x");
    p.fp = divide(-xb * p.df + f, -1.0 + xb * f * p.df, "f_p");
    p.a2 = std::sqrt(divide((1.0 + d * d) * den, (1.0 - f * f) * p.g, "a2"));
    return p;
}

EightVertexElements e_closed(const EPart& U, const EPart& W, double xf, double xb) {
    const Complex den = U.df * W.G + W.df * U.G - 2.0 * xf * U.df * W.df;
    if (den == Complex{}) throw SingularPoint("shared denominator vanishes");
    const Complex du2 = U.d * U.d, dw2 = W.d * W.d;
    const Complex D = 2.0 * (du2 - dw2) / ((1.0 + du2) * (1.0 + dw2) * den);

    auto a1f = [&](const EPart& X, const EPart& Y) {
        const Complex num = std::sqrt((1.0 - xb * X.f * X.df) * (1.0 - xb * Y.f * Y.df));
        const Complex rad = std::sqrt(X.g * Y.g * (1.0 + X.d * X.d) * (1.0 + Y.d * Y.d) *
                                      (1.0 - X.f * X.f) * (1.0 - Y.f * Y.f));
        const Complex br = X.d * (X.g * Y.g - X.fp * Y.fp) + Y.d * (1.0 - X.f * Y.f * X.g * Y.g);
        return 2.0 * divide(num, rad, "a1") * br / den;
    };
    const Complex q = -1.0 + du2 * dw2;
    if (q == Complex{}) throw SingularPoint("d(u)^2 d(w)^2 = 1");
    const Complex pre = U.a2 * W.a2 / q;
    const Complex s1 = W.g * W.f - U.g * U.f;
    const Complex s2 = U.g * W.fp - W.g * U.fp;
    const Complex dd = U.d * W.d;
    return symmetric(a1f(U, W), a1f(W, U), pre * (s1 + dd * s2), pre * (s2 + dd * s1), D);
}

// ---- D_colored closed form ----

Complex g_colored(Complex d, double xf) {
    const Complex df = 2.0 * d / (1.0 + d * d);
    return xf * df + std::sqrt(1.0 + xf * xf * df * df);
}

EightVertexElements dcolored_closed(Complex du, Complex fu, Complex dw, Complex fw, double xf) {
    const Complex gu = g_colored(du, xf), gw = g_colored(dw, xf);
    const Complex dfu = 2.0 * du / (1.0 + du * du), dfw = 2.0 * dw / (1.0 + dw * dw);
    const Complex den = dfu * gw + dfw * gu - 2.0 * xf * dfu * dfw;
    if (den == Complex{}) throw SingularPoint("shared denominator vanishes");
    const Complex du2 = du * du, dw2 = dw * dw;
    const Complex D = 2.0 * (du2 - dw2) / ((1.0 + du2) * (1.0 + dw2) * den);

    const Complex norm = std::sqrt((1.0 + du2) * (1.0 + dw2) * (1.0 - fu * fu) * (1.0 - fw * fw));
    if (norm == Complex{}) throw SingularPoint("f_z^2 = 1");
    auto a1f = [&](Complex dx, Complex dy, Complex fx, Complex fy, Complex gx, Complex gy) {
        const Complex sg = std::sqrt(gx * gy);
        return 2.0 / norm / den * (dx * sg + dy / sg - fx * fy * (dx / sg + dy * sg));
    };
    const Complex q = -1.0 + du2 * dw2;
    if (q == Complex{}) throw SingularPoint("d(u)^2 d(w)^2 = 1");
    const Complex pre = std::sqrt((1.0 + du2) * (1.0 + dw2) / ((1.0 - fu * fu) * (1.0 - fw * fw))) / q;
    const Complex r1 = std::sqrt(gu / gw), r2 = std::sqrt(gw / gu);
    const Complex dd = du * dw;
    return symmetric(a1f(du, dw, fu, fw, gu, gw), a1f(dw, du, fw, fu, gw, gu),
                     pre * (fu * (r1 - dd * r2) - fw * (r2 - dd * r1)),
                     pre * (fw * (r1 - dd * r2) - fu * (r2 - dd * r1)), D);
}

// ---- coordinates ----

std::vector<std::string> function_coordinates(const FamilySpec& s) {
    std::set<std::string> vars;
    for (const auto& [name, e] : s.functions)
        for (const auto& v : free_vars(e)) vars.insert(v);
    vars.insert("u");
    std::vector<std::string> out{"u"};
    for (const auto& v : vars)
        if (v != "u") out.push_back(v);
    return out;
}

Coordinates make_coordinates(const FamilySpec& s) {
    Coordinates c;
    Env zero;
    std::map<std::string, Interval, std::less<>> box;
    switch (s.branch) {
        case Branch::B_xxz:
            c.names = {"u", "p", "t"};
            zero = {{"u", 0.0}, {"p", 1.0}, {"t", 1.0}};
            break;
        case Branch::B_ff:
            c.names = {"u", "p", "pbar", "t"};
            zero = {{"u", 0.0}, {"p", 1.0}, {"pbar", 1.0}, {"t", 1.0}};
            break;
        case Branch::preset_xyz8v:
        case Branch::preset_ising:
            c.names = {"u"};
            break;
        case Branch::preset_ff2p:
            c.names = {"u", "v"};
            break;
        case Branch::preset_colored:
            c.names = {"u", "p"};
            box["p"] = {-0.8, 0.8};
            break;
        default:
            c.names = function_coordinates(s);
    }
    for (const auto& n : c.names) {
        if (!zero.count(n)) zero[n] = 0.0;
        if (!box.count(n)) {
            const double z = zero[n];
            box[n] = z == 0.0 ? Interval{-1.0, 1.0} : Interval{z - 0.5, z + 0.5};
        }
    }
    if (s.branch == Branch::preset_ising) box["u"] = {-0.6, 0.6};
    for (const auto& [n, v] : s.zero) {
        if (!zero.count(n)) throw ConfigError("zero point names unknown coordinate '" + n + "'");
        zero[n] = v;
    }
    for (const auto& [n, iv] : s.box) {
        if (!zero.count(n)) throw ConfigError("sampling box names unknown coordinate '" + n + "'");
        if (!(iv.lo < iv.hi)) throw ConfigError("sampling box for '" + n + "' is empty");
        box[n] = iv;
    }
    c.zero = SpectralPoint(zero);
    c.box = std::move(box);
    return c;
}

// ---- model ----

class FamilyModel final : public RMatrixModel {
public:
    explicit FamilyModel(FamilySpec spec) : spec_(std::move(spec)), coords_(make_coordinates(spec_)) {}

    int n() const override { return 2; }
    std::string family() const override { return std::string(branch_name(spec_.branch)); }
    const Coordinates& coordinates() const override { return coords_; }

    ComplexMatrix evaluate(const SpectralPoint& u, const SpectralPoint& w) const override {
        return elements(u, w).to_matrix();
    }

    EightVertexElements elements(const SpectralPoint& u, const SpectralPoint& w) const {
        switch (spec_.branch) {
            case Branch::A: return eval_family_A(spec_, u, w);
            case Branch::B_xxz:
            case Branch::B_ff: return eval_family_B(spec_, u, w);
            case Branch::C_xyz:
            case Branch::C_ff2: return eval_family_C(spec_, u, w);
            case Branch::D_sym:
            case Branch::D_colored: return eval_family_D(spec_, u, w);
            case Branch::E_general: return eval_family_E(spec_, u, w);
            default: return eval_preset(spec_, u, w);
        }
    }

    Complex coincident_scalar(const SpectralPoint& u) const override {
        if (spec_.branch == Branch::preset_colored) {
            const double p = u.at("p");
            return 1.0 - p * p;
        }
        return 1.0;
    }

    bool unit_c_symmetric_d() const override {
        switch (spec_.branch) {
            case Branch::A:
            case Branch::C_xyz:
            case Branch::C_ff2:
            case Branch::D_sym:
            case Branch::D_colored:
            case Branch::E_general: return true;
            case Branch::preset_xyz8v:
            case Branch::preset_ising: return constant(spec_, "gamma") == 0.0;
            default: return false;
        }
    }

    std::map<std::string, Complex> expected_constants() const override {
        const auto c = [&](std::string_view n) { return constant(spec_, n); };
        switch (spec_.branch) {
            case Branch::A: return {{"d0", c("d0")}};
            case Branch::B_xxz:
                return {{"Delta", 2.0 * std::cos(c("u0")) * c("c0")}, {"k", c("c0") * c("c0")}};
            case Branch::B_ff: return {{"Delta", 0.0}};
            case Branch::C_xyz: {
                const auto t = jacobi(c("phi0"), c("k"));
                return {{"k", c("k") * t.sn * t.sn}, {"Delta", t.cn * t.dn},
                        {"modulus", c("k")}, {"phi0", c("phi0")}};
            }
            case Branch::D_sym:
                return {{"x0", c("x0")}, {"f0", c("f0")}, {"x_f", c("x0") / c("f0")},
                        {"xbar0", 1.0 / c("f0")}};
            case Branch::D_colored: return {{"x_f", c("x_f")}};
            case Branch::E_general: return {{"x_f", c("x_f")}, {"xbar0", c("xbar0")}};
            case Branch::preset_xyz8v: {
                const auto t = jacobi(c("lambda"), c("k"));
                return {{"k", c("k") * t.sn * t.sn}, {"Delta", t.cn * t.dn}};
            }
            default: return {};
        }
    }

    std::optional<Complex> free_fermion_defect(const EightVertexElements& e) const override {
        switch (spec_.branch) {
            case Branch::A: return -constant(spec_, "d0") * e.d1;
            case Branch::C_xyz: {
                const auto t = jacobi(constant(spec_, "phi0"), constant(spec_, "k"));
                return 2.0 * t.cn * t.dn * e.a1 * e.b1;
            }
            case Branch::preset_xyz8v: {
                const auto t = jacobi(constant(spec_, "lambda"), constant(spec_, "k"));
                return 2.0 * t.cn * t.dn * e.a1 * e.b1;
            }
            case Branch::B_xxz: return std::nullopt;
            default: return Complex{};
        }
    }

    const FamilySpec* family_spec() const override { return &spec_; }

private:
    FamilySpec spec_;
    Coordinates coords_;
};

void require_near(Complex got, double want, const std::string& what) {
    if (std::abs(got - want) > kZeroTol)
        throw ConfigError(what + " must equal " + std::to_string(want) + " at the zero point, got " +
                          std::to_string(got.real()) + (got.imag() != 0.0 ? "+" + std::to_string(got.imag()) + "i" : ""));
}

void require_sign(const FamilySpec& s, std::string_view name, bool allow_minus) {
    const double v = constant(s, name);
    if (v != 1.0 && v != -1.0) throw ConfigError(std::string(name) + " must be +1 or -1");
    if (v == -1.0 && !allow_minus)
        throw ConfigError(std::string(name) + " = -1 breaks the normalization a(0) = 1; only +1 is supported");
}

void validate(const FamilySpec& s) {
    const auto& sc = schema(s.branch);
    for (const auto& n : sc.constants) {
        auto it = s.constants.find(n);
        if (it == s.constants.end())
            throw ConfigError(std::string(branch_name(s.branch)) + ": missing constant '" + n + "'");
        if (!std::isfinite(it->second)) throw ConfigError("constant '" + n + "' is not finite");
    }
    for (const auto& [n, v] : s.constants) {
        const bool known = std::find(sc.constants.begin(), sc.constants.end(), n) != sc.constants.end() ||
                           sc.defaults.count(n);
        if (!known) throw ConfigError(std::string(branch_name(s.branch)) + ": unknown constant '" + n + "'");
    }
    for (const auto& n : sc.functions)
        if (!s.functions.count(n))
            throw ConfigError(std::string(branch_name(s.branch)) + ": missing function '" + n + "'");
    for (const auto& [n, e] : s.functions)
        if (std::find(sc.functions.begin(), sc.functions.end(), n) == sc.functions.end())
            throw ConfigError(std::string(branch_name(s.branch)) + ": unknown function '" + n + "'");

    const auto modulus = [&](std::string_view n) {
        const double k = constant(s, n);
        if (!(k >= 0.0 && k < 1.0)) throw ConfigError(std::string(n) + ": elliptic modulus must lie in [0,1)");
        return k;
    };
    const auto nonzero = [&](std::string_view n) {
        if (constant(s, n) == 0.0) throw ConfigError(std::string(n) + " must be nonzero");
    };

    switch (s.branch) {
        case Branch::A: require_sign(s, "sign_a", true); break;
        case Branch::B_xxz:
        case Branch::B_ff:
            if (std::sin(constant(s, "u0")) == 0.0) throw ConfigError("sin(u0) must be nonzero");
            if (s.branch == Branch::B_xxz) nonzero("c0");
            break;
        case Branch::C_xyz:
            if (jacobi(constant(s, "phi0"), modulus("k")).sn == 0.0) throw ConfigError("sn(phi0, k) must be nonzero");
            break;
        case Branch::D_sym:
            nonzero("f0");
            require_sign(s, "sign", false);
            break;
        case Branch::D_colored: require_sign(s, "sign_g", false); break;
        case Branch::E_general: require_sign(s, "sign_G", false); break;
        case Branch::preset_xyz8v:
            if (jacobi(constant(s, "lambda"), modulus("k")).sn == 0.0) throw ConfigError("sn(lambda, k) must be nonzero");
            break;
        case Branch::preset_ising: {
            const double k = modulus("k");
            require_sign(s, "sign", true);
            if (s.constants.count("u0") && jacobi(constant(s, "u0"), k).sn == 0.0)
                throw ConfigError("sn(u0, k) must be nonzero");
            break;
        }
        case Branch::preset_colored: modulus("k"); break;
        default: break;
    }
}

// Elementary normalization a(0)=1, d(0)=0 in terms of the user functions.
void validate_zero(const FamilySpec& s, const SpectralPoint& zero) {
    const auto at0 = [&](std::string_view n) { return fn(s, n, zero); };
    switch (s.branch) {
        case Branch::A: require_near(at0("d"), 0.0, "d"); break;
        case Branch::C_xyz: require_near(at0("phi"), 0.0, "phi"); break;
        case Branch::C_ff2:
            require_near(at0("phi"), 0.0, "phi");
            require_near(at0("g"), 1.0, "g");
            break;
        case Branch::D_sym: require_near(at0("f_x"), 0.0, "f_x"); break;
        case Branch::D_colored:
            require_near(at0("d"), 0.0, "d");
            require_near(at0("f_z"), 0.0, "f_z");
            break;
        case Branch::E_general:
            require_near(at0("d"), 0.0, "d");
            require_near(at0("f_g"), 0.0, "f_g");
            break;
        default: break;
    }
}

double ising_u0(const FamilySpec& s) {
    if (auto it = s.constants.find("u0"); it != s.constants.end()) return it->second;
    return complete_K(constant(s, "k"));
}

}  // namespace

std::string_view branch_name(Branch b) {
    for (const auto& e : kBranches)
        if (e.branch == b) return e.name;
    return "?";
}

Branch branch_from_name(std::string_view name) {
    for (const auto& e : kBranches)
        if (e.name == name) return e.branch;
    throw ConfigError("unknown family '" + std::string(name) + "'");
}

bool is_preset(Branch b) {
    return b == Branch::preset_xyz8v || b == Branch::preset_ff2p || b == Branch::preset_ising ||
           b == Branch::preset_colored;
}

const BranchSchema& schema(Branch b) {
    static const std::map<Branch, BranchSchema> table{
        {Branch::A, {{"d0"}, {{"sign_a", 1.0}}, {"d"}}},
        {Branch::B_xxz, {{"u0", "c0"}, {}, {}}},
        {Branch::B_ff, {{"u0"}, {}, {}}},
        {Branch::C_xyz, {{"phi0", "k"}, {}, {"phi"}}},
        {Branch::C_ff2, {{}, {}, {"phi", "g"}}},
        {Branch::D_sym, {{"x0", "f0"}, {{"sign", 1.0}}, {"f_x"}}},
        {Branch::D_colored, {{"x_f"}, {{"sign_g", 1.0}}, {"d", "f_z"}}},
        {Branch::E_general, {{"x_f", "xbar0"}, {{"sign_G", 1.0}}, {"d", "f_g"}}},
        {Branch::preset_xyz8v, {{"lambda", "k"}, {{"gamma", 0.0}}, {}}},
        {Branch::preset_ff2p, {{}, {{"gamma", 0.0}}, {}}},
        {Branch::preset_ising, {{"k"}, {{"gamma", 0.0}, {"sign", 1.0}, {"u0", 0.0}}, {}}},
        {Branch::preset_colored, {{"k"}, {}, {}}},
    };
    return table.at(b);
}

EightVertexElements eval_family_A(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w) {
    const double d0 = constant(s, "d0");
    const double sign = constant(s, "sign_a");
    const Complex du = fn(s, "d", u), dw = fn(s, "d", w);
    const auto a = [&](Complex d) { return sign * std::sqrt(d * d + 1.0 - d * d0); };
    const Complex den = 1.0 + (du - d0) * dw;
    const Complex a1 = divide(a(du) * a(dw), den, "family A");
    const Complex d = (du - dw) / den;
    return finish(symmetric(a1, a1, 0.0, 0.0, d), "family A");
}

EightVertexElements eval_family_B(const FamilySpec& s, const SpectralPoint& U, const SpectralPoint& W) {
    const double u0 = constant(s, "u0");
    const double u = U.at("u"), w = W.at("u");
    const double p = U.at("p"), q = W.at("p");
    const double t = U.at("t"), sw = W.at("t");
    if (p == 0.0 || q == 0.0 || t == 0.0 || sw == 0.0) throw SingularPoint("zero color");
    EightVertexElements e;
    e.c1 = t / sw;
    e.c2 = sw / t;
    if (s.branch == Branch::B_xxz) {
        const double c0 = constant(s, "c0");
        const double s0 = std::sin(u0), sd = std::sin(u - w), sa = std::sin(u - w + u0);
        e.a1 = q * sa / (p * s0);
        e.a2 = p * sa / (q * s0);
        e.b1 = p * q * sd / (c0 * s0);
        e.b2 = c0 * sd / (p * q * s0);
    } else {
        const double pb = U.at("pbar"), qb = W.at("pbar");
        if (pb == 0.0 || qb == 0.0) throw SingularPoint("zero color");
        const double s2 = std::sinh(u0) * std::sinh(u0);
        const double shu = std::sinh(u), shw = std::sinh(w);
        e.a1 = p * std::sinh(u + u0) * std::sinh(u0 - w) / (q * s2) + qb * shu * shw / (pb * s2);
        e.a2 = q * std::sinh(w + u0) * std::sinh(u0 - u) / (p * s2) + pb * shu * shw / (qb * s2);
        e.b1 = pb * shu * std::sinh(u0 - w) / (q * s2) - qb * std::sinh(u0 - u) * shw / (p * s2);
        e.b2 = q * std::sinh(w + u0) * shu / (pb * s2) - p * std::sinh(u + u0) * shw / (qb * s2);
    }
    e.d1 = e.d2 = 0.0;
    return finish(e, "family B");
}

EightVertexElements eval_family_C(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w) {
    const Complex pu = fn(s, "phi", u), pw = fn(s, "phi", w);
    if (s.branch == Branch::C_xyz) {
        const double phi0 = constant(s, "phi0"), k = constant(s, "k");
        const double s0 = jacobi(phi0, k).sn;
        const double K = k * s0 * s0;
        const auto real = [](Complex z, const char* what) {
            if (z.imag() != 0.0) throw DomainError(std::string(what) + " must be real for C_xyz");
            return z.real();
        };
        const double xu = real(pu, "phi"), xw = real(pw, "phi");
        const double au = jacobi(xu + phi0, k).sn / s0, aw = jacobi(xw + phi0, k).sn / s0;
        const double bu = jacobi(xu, k).sn / s0, bw = jacobi(xw, k).sn / s0;
        const double K2 = K * K;
        if (aw == 0.0) throw SingularPoint("a(w) = 0");
        const double den_a = 1.0 - K2 * au * au * bw * bw;
        const double den_b = 1.0 - K2 * au * aw * bu * bw;
        if (den_a == 0.0 || den_b == 0.0) throw SingularPoint("C_xyz denominator vanishes");
        const double A = (au / aw * (1.0 - bw * bw) + (1.0 - K2 * au * au) * bu * bw) / den_a;
        const double B = (aw * bu - au * bw) / den_b;
        return finish(symmetric(A, A, B, B, K * A * B), "family C_xyz");
    }
    const Complex gu = fn(s, "g", u), gw = fn(s, "g", w);
    const Complex hu = std::sqrt(gu * gu - 1.0), hw = std::sqrt(gw * gw - 1.0);
    const Complex den = 1.0 + hu * hw;
    const Complex a = divide(std::cosh(pu - pw) * gu * gw, den, "family C_ff2");
    const Complex b = std::sinh(pu - pw) * gu * gw / den;
    return finish(symmetric(a, a, b, -b, (hu - hw) / den), "family C_ff2");
}

NormalizedElements dsym_elementary(Complex f, double x0, double f0) {
    // rationalized form: no cancellation as f -> 0
    const Complex r = std::sqrt(1.0 - f * f);
    const Complex hf = f / (1.0 + r);  // (1 - sqrt(1-f^2)) / f
    const Complex F2 = (1.0 + r) / (std::sqrt(1.0 - x0 * x0 * f * f) +
                                    std::sqrt(1.0 - (x0 * x0 + f0 * f0) * f * f));
    const Complex F = std::sqrt(F2);
    const Complex sp = std::sqrt(1.0 + x0 * f), sm = std::sqrt(1.0 - x0 * f);
    return {sp * F, sm * F, sm * hf * F, sp * hf * F, f0 * F2 * hf};
}

EightVertexElements eval_family_D(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w) {
    if (s.branch == Branch::D_sym) {
        const double x0 = constant(s, "x0"), f0 = constant(s, "f0");
        const auto eu = dsym_elementary(fn(s, "f_x", u), x0, f0);
        const auto ew = dsym_elementary(fn(s, "f_x", w), x0, f0);
        const double xf = x0 / f0, xb = 1.0 / f0;
        const auto pu = e_part(eu.d, eu.b1 / eu.a1, xf, xb);
        const auto pw = e_part(ew.d, ew.b1 / ew.a1, xf, xb);
        return finish(e_closed(pu, pw, xf, xb), "family D_sym");
    }
    const double xf = constant(s, "x_f");
    return finish(dcolored_closed(fn(s, "d", u), fn(s, "f_z", u), fn(s, "d", w), fn(s, "f_z", w), xf),
                  "family D_colored");
}

EightVertexElements eval_family_E(const FamilySpec& s, const SpectralPoint& u, const SpectralPoint& w) {
    const double xf = constant(s, "x_f"), xb = constant(s, "xbar0");
    const auto pu = e_part(fn(s, "d", u), fn(s, "f_g", u), xf, xb);
    const auto pw = e_part(fn(s, "d", w), fn(s, "f_g", w), xf, xb);
    return finish(e_closed(pu, pw, xf, xb), "family E_general");
}

EightVertexElements eval_preset(const FamilySpec& s, const SpectralPoint& U, const SpectralPoint& W) {
    const double x = U.at("u") - W.at("u");
    const double gamma = s.branch == Branch::preset_colored ? 0.0 : constant(s, "gamma");
    const double up = std::exp(gamma / 2), dn_ = std::exp(-gamma / 2);
    switch (s.branch) {
        case Branch::preset_xyz8v: {
            const double lam = constant(s, "lambda"), k = constant(s, "k");
            const double s0 = jacobi(lam, k).sn;
            const double sa = jacobi(x + lam, k).sn, sx = jacobi(x, k).sn;
            const double a = sa / s0, b = sx / s0, d = k * sa * sx;
            return finish({a, a, b, b, 1.0, 1.0, up * d, dn_ * d}, "preset xyz8v");
        }
        case Branch::preset_ff2p: {
            const double y = U.at("v") - W.at("v");
            const double a = std::cosh(x), b = std::sinh(x), c = std::cos(y), sy = std::sin(y);
            return finish({a, a, b, -b, c, c, up * sy, dn_ * sy}, "preset ff2p");
        }
        case Branch::preset_ising: {
            const double k = constant(s, "k"), sign = constant(s, "sign");
            const double u0 = ising_u0(s);
            const auto t0 = jacobi(u0, k);
            const auto t = jacobi(x, k);
            if (t.cn == 0.0) throw SingularPoint("cn(u) = 0");
            const double A = t.dn / t.cn, B = t0.dn * t.sn / t0.sn;
            const double b = t.sn / t0.sn, d = t.dn * t.sn / t.cn;
            return finish({A + sign * B, A - sign * B, b, b, 1.0, 1.0, up * d, dn_ * d}, "preset ising");
        }
        case Branch::preset_colored: {
            const double k = constant(s, "k");
            const double p = U.at("p"), q = W.at("p");
            const auto t = jacobi(x, k);
            const Complex e{t.cn, t.sn};
            const auto h = jacobi(x / 2, k);
            const double Dd = 1.0 - k * k * std::pow(h.sn, 4);
            const Complex r = std::sqrt(Complex((1.0 - p * p) * (1.0 - q * q)));
            const Complex c = r * (h.dn / Dd) * Complex(h.cn, h.sn * h.dn);
            const Complex d = k * r * (1.0 + e) * h.sn / 2.0;
            // b1 and b2 exchanged relative to the printed matrix, see README
            return finish({1.0 - e * p * q, e - p * q, p - q * e, q - p * e, c, c, d, d}, "preset colored");
        }
        default: throw ConfigError("not a preset branch");
    }
}

ModelPtr build_model(const FamilySpec& spec) {
    validate(spec);
    auto m = std::make_shared<FamilyModel>(spec);
    for (const auto& [name, e] : spec.functions)
        for (const auto& v : free_vars(e))
            if (!m->coordinates().zero.has(v))
                throw ConfigError("function '" + name + "' uses unknown coordinate '" + v + "'");
    validate_zero(spec, m->coordinates().zero);
    return m;
}

ModelPtr preset(Branch b, const ConstantMap& params) {
    if (!is_preset(b)) throw ConfigError(std::string(branch_name(b)) + " is not a preset");
    FamilySpec s;
    s.branch = b;
    s.constants = params;
    return build_model(s);
}

NormalizedElements normalize(const EightVertexElements& e) {
    const auto nearest = [](Complex root, Complex ref) {
        return std::abs(root - ref) <= std::abs(-root - ref) ? root : -root;
    };
    const Complex c = nearest(std::sqrt(e.c1 * e.c2), e.c1);
    if (c == Complex{}) throw SingularPoint("c1 c2 = 0");
    const Complex d = nearest(std::sqrt(e.d1 * e.d2), e.d1);
    return {e.a1 / c, e.a2 / c, e.b1 / c, e.b2 / c, d / c};
}

}  // namespace ybx
