#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <functional>

#include "ybx/error.hpp"
#include "ybx/r22.hpp"
#include "ybx/r33.hpp"
#include "ybx/verify.hpp"

using namespace ybx;

namespace {

// Forwards everything to `base` and lets the test edit the evaluated matrix.
class Perturbed final : public RMatrixModel {
public:
    using Edit = std::function<void(ComplexMatrix&, const SpectralPoint&, const SpectralPoint&)>;
    Perturbed(ModelPtr base, Edit edit) : base_(std::move(base)), edit_(std::move(edit)) {}

    int n() const override { return base_->n(); }
    std::string family() const override { return base_->family(); }
    ComplexMatrix evaluate(const SpectralPoint& u, const SpectralPoint& w) const override {
        auto m = base_->evaluate(u, w);
        edit_(m, u, w);
        return m;
    }
    Complex coincident_scalar(const SpectralPoint& u) const override { return base_->coincident_scalar(u); }
    std::map<std::string, Complex> expected_constants() const override { return base_->expected_constants(); }
    std::optional<Complex> free_fermion_defect(const EightVertexElements& e) const override {
        return base_->free_fermion_defect(e);
    }
    bool unit_c_symmetric_d() const override { return base_->unit_c_symmetric_d(); }
    const Coordinates& coordinates() const override { return base_->coordinates(); }
    const FamilySpec* family_spec() const override { return base_->family_spec(); }
    const R33Spec* r33_spec() const override { return base_->r33_spec(); }

private:
    ModelPtr base_;
    Edit edit_;
};

ModelPtr family_E() {
    FamilySpec s;
    s.branch = Branch::E_general;
    s.constants = {{"x_f", 0.3}, {"xbar0", 0.7}};
    s.functions = {{"d", parse("0.6*sin(u)")}, {"f_g", parse("0.5*sinh(u)")}};
    return build_model(s);
}

ModelPtr r33_generic() {
    R33Spec s;
    s.f = parse("1+u");
    s.c1 = parse("exp(0.1*u)");
    s.c3 = parse("1+0.2*u");
    s.x_f = 0.4, s.alphabar = -1, s.gamma = 2.0;
    return build_r33_model(s);
}

}  // namespace

TEST_CASE("report bookkeeping") {
    ResidualReport r;
    CheckResult ok{.name = "a", .max_rel = 1e-12, .tolerance = 1e-9};
    CheckResult bad{.name = "b", .max_rel = 1e-3, .tolerance = 1e-9};
    CheckResult info{.name = "c", .max_rel = 1.0, .tolerance = 1e-9, .asserted = false};
    r.add(ok);
    r.add(info);
    CHECK(r.pass);
    CHECK(r.find("c")->pass);
    r.add(bad);
    CHECK_FALSE(r.pass);
    CHECK_FALSE(r.find("b")->pass);
    CHECK(r.find("zz") == nullptr);
    CheckResult nan{.name = "n", .max_rel = std::nan(""), .tolerance = 1.0};
    ResidualReport r2;
    r2.add(nan);
    CHECK_FALSE(r2.pass);
    ResidualReport r3;
    r3.merge(r);
    CHECK(r3.checks.size() == 3);
    CHECK_FALSE(r3.pass);
}

TEST_CASE("seed resolution") {
    CHECK(default_seed(7) == 7);
    ::unsetenv("YBX_SEED");
    CHECK(default_seed() == 42);
    ::setenv("YBX_SEED", "123", 1);
    CHECK(default_seed() == 123);
    CHECK(default_seed(5) == 5);
    ::setenv("YBX_SEED", "abc", 1);
    CHECK_THROWS_AS(default_seed(), ConfigError);
    ::unsetenv("YBX_SEED");
}

TEST_CASE("sampler is deterministic and avoids the zero point") {
    Coordinates c;
    c.names = {"u", "p"};
    c.zero = SpectralPoint(Env{{"u", 0.0}, {"p", 1.0}});
    c.box = {{"u", {-1e-3 * 2, 1e-3 * 2}}, {"p", {0.5, 1.5}}};
    Sampler a(c, 9), b(c, 9);
    for (int i = 0; i < 200; ++i) {
        const auto x = a.draw(), y = b.draw();
        CHECK(x.env() == y.env());
        CHECK(std::abs(x.at("u")) >= Sampler::kAvoid);
        CHECK(std::abs(x.at("p") - 1.0) >= Sampler::kAvoid);
        CHECK(x.at("p") >= 0.5);
        CHECK(x.at("p") < 1.5);
    }
    // the uniform stream depends only on the seed
    Sampler s(c, 1);
    const double first = s.uniform();
    CHECK(first >= 0.0);
    CHECK(first < 1.0);
    CHECK(Sampler(c, 1).uniform() == first);
}

TEST_CASE("the suite passes on a solution and is reproducible") {
    const auto m = family_E();
    const auto r1 = run_suite(*m, 40, 42), r2 = run_suite(*m, 40, 42);
    CHECK(r1.pass);
    REQUIRE(r1.checks.size() == r2.checks.size());
    for (std::size_t i = 0; i < r1.checks.size(); ++i) {
        CHECK(r1.checks[i].max_rel == r2.checks[i].max_rel);
        CHECK(r1.checks[i].argmax == r2.checks[i].argmax);
    }
    CHECK(r1.find("ybe") != nullptr);
    CHECK(r1.find("relatz.elementary") != nullptr);
    CHECK(r1.find("independent_eq6") != nullptr);
}

TEST_CASE("a corrupted entry is caught and located") {
    const auto m = std::make_shared<Perturbed>(family_E(), [](ComplexMatrix& r, const auto&, const auto&) {
        r(1, 1) *= 1.01;  // b1
    });
    const auto rep = run_suite(*m, 30, 42);
    CHECK_FALSE(rep.pass);
    const auto* y = rep.find("ybe");
    REQUIRE(y != nullptr);
    CHECK_FALSE(y->pass);
    CHECK(y->argmax.find("u=") != std::string::npos);
    CHECK_FALSE(rep.find("free_fermion")->pass);
    CHECK_FALSE(rep.find("relatz.elementary")->pass);
}

TEST_CASE("independent equations") {
    const auto m = family_E();
    SpectralPoint u(Env{{"u", 0.3}}), v(Env{{"u", -0.5}}), w(Env{{"u", 0.8}});
    const auto eqs = independent_equations(*m, u, v, w);
    REQUIRE(eqs.size() == 6);
    for (auto e : eqs) CHECK(std::abs(e) < 1e-12);

    const auto bad = std::make_shared<Perturbed>(m, [](ComplexMatrix& r, const auto&, const auto&) { r(0, 3) *= 1.05; });
    const auto broken = independent_equations(*bad, u, v, w);
    double worst = 0;
    for (auto e : broken) worst = std::max(worst, std::abs(e));
    CHECK(worst > 1e-4);
    CHECK_FALSE(check_independent_eqs(*bad, 20, 1).find("independent_eq1")->pass);

    const auto rep = check_independent_eqs(*m, 50, 2);
    CHECK(rep.pass);
    CHECK(rep.find("implication")->extra.at("premise_samples") == 50);

    FamilySpec b;
    b.branch = Branch::B_xxz;
    b.constants = {{"u0", 0.4}, {"c0", 1.3}};
    CHECK_THROWS_AS(check_independent_eqs(*build_model(b), 5, 1), DomainError);
}

TEST_CASE("consistency determinant factors") {
    FamilySpec b;
    b.branch = Branch::B_xxz;
    b.constants = {{"u0", 0.4}, {"c0", 1.3}};
    const auto xxz = build_model(b);
    SpectralPoint u(Env{{"u", 0.3}, {"p", 1.2}, {"t", 0.9}});
    SpectralPoint v(Env{{"u", -0.4}, {"p", 0.8}, {"t", 1.1}});
    SpectralPoint w(Env{{"u", 0.9}, {"p", 0.8}, {"t", 1.3}});
    CHECK(consistency_determinant(*xxz, u, v, w).winner == "factor1");
    w.set("p", 1.4);
    CHECK(consistency_determinant(*xxz, u, v, w).winner == "none");

    FamilySpec f;
    f.branch = Branch::B_ff;
    f.constants = {{"u0", 0.6}};
    const auto ff = build_model(f);
    SpectralPoint a(Env{{"u", 0.3}, {"p", 1.2}, {"pbar", 0.9}, {"t", 1.0}});
    SpectralPoint c(Env{{"u", -0.2}, {"p", 0.7}, {"pbar", 1.1}, {"t", 1.0}});
    SpectralPoint d(Env{{"u", 0.6}, {"p", 1.3}, {"pbar", 0.8}, {"t", 1.0}});
    const auto det = consistency_determinant(*ff, a, c, d);
    CHECK(std::abs(det.factor2) < 1e-12);
    CHECK((det.winner == "factor2" || det.winner == "both"));
}

TEST_CASE("free-fermion check") {
    FamilySpec s;
    s.branch = Branch::C_xyz;
    s.constants = {{"phi0", 0.5}, {"k", 0.6}};
    s.functions = {{"phi", parse("u")}};
    const auto m = build_model(s);
    const auto rep = check_free_fermion(*m, 50, 4);
    CHECK(rep.pass);
    CHECK(rep.checks[0].max_rel < 1e-9);
    CHECK_THROWS_AS(check_free_fermion(*r33_generic(), 5, 1), DimensionError);
}

TEST_CASE("fifteen-vertex relations") {
    const auto m = r33_generic();
    const auto rep = check_r33_relations(*m, 40, 42);
    CHECK(rep.pass);
    CHECK(rep.checks.size() == 18);

    SUBCASE("u-dependent corruption of b2 breaks the relations") {
        const auto bad = std::make_shared<Perturbed>(m, [](ComplexMatrix& r, const SpectralPoint& u, const auto&) {
            r(5, 5) *= 1.0 + 0.05 * u.at("u");
        });
        CHECK_FALSE(check_r33_relations(*bad, 40, 42).pass);
        CHECK_FALSE(check_ybe(*bad, 20, 42).pass);
    }
    SUBCASE("constant rescaling of b2 is invisible to the relations but not to the YBE") {
        const auto bad = std::make_shared<Perturbed>(m, [](ComplexMatrix& r, const auto&, const auto&) { r(5, 5) *= 1.05; });
        CHECK(check_r33_relations(*bad, 40, 42).pass);
        CHECK_FALSE(check_ybe(*bad, 20, 42).pass);
    }
}

TEST_CASE("unitarity and normalization") {
    const auto m = r33_generic();
    CHECK(check_unitarity(*m, 50, 42).pass);
    CHECK(check_normalization(*m, sample_grid(*m, 20, 1)).pass);
    const auto bad = std::make_shared<Perturbed>(family_E(), [](ComplexMatrix& r, const auto&, const auto&) { r(0, 0) += 1e-6; });
    CHECK_FALSE(check_normalization(*bad, sample_grid(*bad, 5, 1)).pass);
}

TEST_CASE("argument checks") {
    const auto m = family_E();
    CHECK_THROWS_AS(check_ybe(*m, 0, 1), ConfigError);
    ToleranceConfig t;
    t.ybe_rel = -1;
    CHECK_THROWS_AS(run_suite(*m, 5, 1, t), ConfigError);
}
