#include "ybx/tensor.hpp"

#include <algorithm>
#include <string>

#include "ybx/error.hpp"

namespace ybx {

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {
    if (dim > kMaxDim)
        throw DimensionError("matrix dimension " + std::to_string(dim) + " exceeds limit " +
                             std::to_string(kMaxDim));
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
    ComplexMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (dim_ != rhs.dim_) throw DimensionError("matrix product: dimension mismatch");
    ComplexMatrix out(dim_);
    // i-k-j order, skipping zero entries: the R-matrices here are sparse
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = 0; k < dim_; ++k) {
            const Complex a = (*this)(i, k);
            if (a == Complex{}) continue;
            const Complex* row = &rhs.data_[k * dim_];
            Complex* dst = &out.data_[i * dim_];
            for (std::size_t j = 0; j < dim_; ++j) dst[j] += a * row[j];
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    ComplexMatrix out = *this;
    out += rhs;
    return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
    if (dim_ != rhs.dim_) throw DimensionError("matrix sum: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (dim_ != rhs.dim_) throw DimensionError("matrix difference: dimension mismatch");
    ComplexMatrix out = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
    return out;
}

ComplexMatrix ComplexMatrix::operator*(Complex s) const {
    ComplexMatrix out = *this;
    for (auto& x : out.data_) x *= s;
    return out;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix out(dim_);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

double ComplexMatrix::max_abs() const noexcept {
    double m = 0.0;
    for (const auto& x : data_) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionError("max_abs_diff: dimension mismatch");
    double m = 0.0;
    auto ea = a.entries();
    auto eb = b.entries();
    for (std::size_t i = 0; i < ea.size(); ++i) m = std::max(m, std::abs(ea[i] - eb[i]));
    return m;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    if (na * nb > ComplexMatrix::kMaxDim)
        throw DimensionError("kron: result dimension " + std::to_string(na * nb) +
                             " exceeds limit");
    ComplexMatrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j) {
            const Complex x = a(i, j);
            if (x == Complex{}) continue;
            for (std::size_t k = 0; k < nb; ++k)
                for (std::size_t l = 0; l < nb; ++l) out(i * nb + k, j * nb + l) = x * b(k, l);
        }
    return out;
}

ComplexMatrix permutation_matrix(int n) {
    if (n != 2 && n != 3) throw DimensionError("permutation_matrix: unsupported n=" + std::to_string(n));
    const auto un = static_cast<std::size_t>(n);
    ComplexMatrix p(un * un);
    for (std::size_t i = 0; i < un; ++i)
        for (std::size_t j = 0; j < un; ++j) p(i * un + j, j * un + i) = 1.0;
    return p;
}

ComplexMatrix embed(const ComplexMatrix& r, SitePair pair, int n) {
    if (n != 2 && n != 3) throw DimensionError("embed: unsupported n=" + std::to_string(n));
    const auto un = static_cast<std::size_t>(n);
    if (r.dim() != un * un) throw DimensionError("embed: operator dimension does not match n^2");
    const auto id = ComplexMatrix::identity(un);
    switch (pair) {
        case SitePair::s12: return kron(r, id);
        case SitePair::s23: return kron(id, r);
        case SitePair::s13: {
            const auto q = kron(id, permutation_matrix(n));
            return q * kron(r, id) * q;
        }
    }
    throw DimensionError("embed: bad site pair");
}

Residual ybe_residual(const ComplexMatrix& r_uv, const ComplexMatrix& r_uw,
                      const ComplexMatrix& r_vw, int n) {
    const auto r12 = embed(r_uv, SitePair::s12, n);
    const auto r13 = embed(r_uw, SitePair::s13, n);
    const auto r23 = embed(r_vw, SitePair::s23, n);
    const auto lhs = r12 * r13 * r23;
    const auto rhs = r23 * r13 * r12;
    Residual res;
    res.abs = max_abs_diff(lhs, rhs);
    res.rel = res.abs / std::max(lhs.max_abs(), 1e-300);
    return res;
}

}  // namespace ybx
