#include "ybx/model.hpp"

#include <charconv>
#include <array>

#include "ybx/error.hpp"

namespace ybx {

double SpectralPoint::at(std::string_view name) const {
    auto it = coords_.find(name);
    if (it == coords_.end()) throw DomainError("spectral point has no coordinate '" + std::string(name) + "'");
    return it->second;
}

std::string SpectralPoint::describe() const {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : coords_) {
        if (!first) out += ", ";
        first = false;
        std::array<char, 32> buf{};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out += k + "=" + std::string(buf.data(), ptr);
    }
    return out + "}";
}

ComplexMatrix EightVertexElements::to_matrix() const {
    ComplexMatrix m(4);
    m(0, 0) = a1;
    m(0, 3) = d1;
    m(1, 1) = b1;
    m(1, 2) = c1;
    m(2, 1) = c2;
    m(2, 2) = b2;
    m(3, 0) = d2;
    m(3, 3) = a2;
    return m;
}

EightVertexElements EightVertexElements::from_matrix(const ComplexMatrix& m) {
    if (m.dim() != 4) throw DimensionError("eight-vertex elements need a 4x4 matrix");
    return {m(0, 0), m(3, 3), m(1, 1), m(2, 2), m(1, 2), m(2, 1), m(0, 3), m(3, 0)};
}

ComplexMatrix RMatrixModel::check(const SpectralPoint& u, const SpectralPoint& w) const {
    return evaluate(u, w) * permutation_matrix(n());
}

Residual ybe_residual(const RMatrixModel& model, const SpectralPoint& u, const SpectralPoint& v,
                      const SpectralPoint& w) {
    return ybe_residual(model.evaluate(u, v), model.evaluate(u, w), model.evaluate(v, w), model.n());
}

namespace {

class GaugedModel final : public RMatrixModel {
public:
    GaugedModel(ModelPtr base, std::vector<Expr> basis)
        : base_(std::move(base)), basis_(std::move(basis)) {}

    int n() const override { return base_->n(); }
    std::string family() const override { return base_->family(); }
    const Coordinates& coordinates() const override { return base_->coordinates(); }
    Complex coincident_scalar(const SpectralPoint& u) const override {
        return base_->coincident_scalar(u);
    }
    std::map<std::string, Complex> expected_constants() const override {
        return base_->expected_constants();
    }
    std::optional<Complex> free_fermion_defect(const EightVertexElements& e) const override {
        return base_->free_fermion_defect(e);
    }
    const FamilySpec* family_spec() const override { return base_->family_spec(); }
    const R33Spec* r33_spec() const override { return base_->r33_spec(); }

    ComplexMatrix evaluate(const SpectralPoint& u, const SpectralPoint& w) const override {
        ComplexMatrix m = base_->evaluate(u, w);
        const auto fu = values(u), fw = values(w);
        const auto nn = static_cast<std::size_t>(n());
        for (std::size_t r = 0; r < m.dim(); ++r)
            for (std::size_t c = 0; c < m.dim(); ++c) {
                if (m(r, c) == Complex{}) continue;
                const std::size_t ni = r / nn, nj = r % nn, pi = c / nn, pj = c % nn;
                // diagonal entries (ni,nj) = (pi,pj) keep their exact bits
                if (ni == pi && nj == pj) continue;
                m(r, c) *= fu[ni] * fw[nj] / (fu[pi] * fw[pj]);
            }
        return m;
    }

private:
    std::vector<Complex> values(const SpectralPoint& x) const {
        std::vector<Complex> out;
        out.reserve(basis_.size());
        for (const auto& f : basis_) {
            const Complex v = eval(f, x.env());
            if (v == Complex{}) throw SingularPoint("gauge function vanishes at " + x.describe());
            out.push_back(v);
        }
        return out;
    }

    ModelPtr base_;
    std::vector<Expr> basis_;
};

}  // namespace

ModelPtr gauge_transform(ModelPtr model, std::vector<Expr> basis) {
    if (!model) throw ConfigError("gauge_transform: null model");
    if (static_cast<int>(basis.size()) != model->n())
        throw ConfigError("gauge_transform: expected " + std::to_string(model->n()) +
                          " basis functions, got " + std::to_string(basis.size()));
    for (const auto& f : basis)
        for (const auto& v : free_vars(f))
            if (!model->coordinates().zero.has(v))
                throw ConfigError("gauge function uses unknown coordinate '" + v + "'");
    return std::make_shared<GaugedModel>(std::move(model), std::move(basis));
}

}  // namespace ybx
