#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ybx {

using Complex = std::complex<double>;

// Dense square complex matrix, row-major.
class ComplexMatrix {
public:
    static constexpr std::size_t kMaxDim = 729;

    ComplexMatrix() = default;
    explicit ComplexMatrix(std::size_t dim);

    static ComplexMatrix identity(std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }

    Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
    const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

    std::span<const Complex> entries() const noexcept { return data_; }

    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(Complex s) const;
    ComplexMatrix& operator+=(const ComplexMatrix& rhs);

    ComplexMatrix transpose() const;
    double max_abs() const noexcept;

    bool operator==(const ComplexMatrix&) const = default;

private:
    std::size_t dim_ = 0;
    std::vector<Complex> data_;
};

inline ComplexMatrix operator*(Complex s, const ComplexMatrix& m) { return m * s; }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// P(e_i (x) e_j) = e_j (x) e_i on C^n (x) C^n, n in {2,3}.
ComplexMatrix permutation_matrix(int n);

enum class SitePair { s12, s13, s23 };

// Two-site operator acting on slots (1,2), (1,3) or (2,3) of C^n (x) C^n (x) C^n.
ComplexMatrix embed(const ComplexMatrix& r, SitePair pair, int n);

struct Residual {
    double abs = 0.0;
    double rel = 0.0;
};

// K = R12(u,v) R13(u,w) R23(v,w) - R23(v,w) R13(u,w) R12(u,v), max-entry norm.
Residual ybe_residual(const ComplexMatrix& r_uv, const ComplexMatrix& r_uw,
                      const ComplexMatrix& r_vw, int n);

}  // namespace ybx
