#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ybx/expr.hpp"
#include "ybx/tensor.hpp"

namespace ybx {

struct FamilySpec;
struct R33Spec;

// Composite spectral parameter: named real coordinates (u, p, t, ...).
class SpectralPoint {
public:
    SpectralPoint() = default;
    explicit SpectralPoint(Env coords) : coords_(std::move(coords)) {}

    double at(std::string_view name) const;
    void set(const std::string& name, double value) { coords_[name] = value; }
    bool has(std::string_view name) const { return coords_.find(name) != coords_.end(); }
    const Env& env() const noexcept { return coords_; }

    std::string describe() const;

private:
    Env coords_;
};

struct Interval {
    double lo = -1.0;
    double hi = 1.0;
};

struct Coordinates {
    std::vector<std::string> names;
    SpectralPoint zero;                                // normalization point
    std::map<std::string, Interval, std::less<>> box;  // sampling box
};

// Entries of the 4x4 eight-vertex ansatz
//   [[a1,0,0,d1],[0,b1,c1,0],[0,c2,b2,0],[d2,0,0,a2]]
// in the basis 00,01,10,11 (row = lower indices).
struct EightVertexElements {
    Complex a1{1.0}, a2{1.0}, b1{}, b2{}, c1{1.0}, c2{1.0}, d1{}, d2{};

    ComplexMatrix to_matrix() const;
    static EightVertexElements from_matrix(const ComplexMatrix& m);
};

class RMatrixModel {
public:
    virtual ~RMatrixModel() = default;

    virtual int n() const = 0;
    virtual std::string family() const = 0;

    // R(u,w)
    virtual ComplexMatrix evaluate(const SpectralPoint& u, const SpectralPoint& w) const = 0;

    // R(u,u) = scalar(u) * P
    virtual Complex coincident_scalar(const SpectralPoint&) const { return 1.0; }

    // Branch constants implied by the construction parameters.
    virtual std::map<std::string, Complex> expected_constants() const { return {}; }

    // Expected value of a1a2 + b1b2 - c1c2 - d1d2; nullopt when no closed form is asserted.
    virtual std::optional<Complex> free_fermion_defect(const EightVertexElements&) const {
        return std::nullopt;
    }

    // c1 = c2 = 1 and d1 = d2: the form the six independent equations assume.
    virtual bool unit_c_symmetric_d() const { return false; }

    virtual const Coordinates& coordinates() const = 0;

    // Construction parameters, when the model was built from a spec.
    virtual const FamilySpec* family_spec() const { return nullptr; }
    virtual const R33Spec* r33_spec() const { return nullptr; }

    // Ř = R P
    ComplexMatrix check(const SpectralPoint& u, const SpectralPoint& w) const;
};

using ModelPtr = std::shared_ptr<const RMatrixModel>;

Residual ybe_residual(const RMatrixModel& model, const SpectralPoint& u, const SpectralPoint& v,
                      const SpectralPoint& w);

// Similarity of (auf): entry [(ni nj),(pi pj)] scaled by f_ni(u) f_nj(w) / (f_pi(u) f_pj(w)).
// One basis function per local state; n = 2 takes (f0, f1), n = 3 takes (1, s, t).
ModelPtr gauge_transform(ModelPtr model, std::vector<Expr> basis);

}  // namespace ybx
