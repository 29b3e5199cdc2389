#pragma once

#include "ybx/tensor.hpp"

namespace ybx {

struct EllipticTriple {
    double sn = 0.0;
    double cn = 1.0;
    double dn = 1.0;
};

// Jacobi sn, cn, dn for real u and modulus 0 <= k < 1.
EllipticTriple jacobi(double u, double k);

// Complete elliptic integral of the first kind, K(k).
double complete_K(double k);

// cn(u,k) + i sn(u,k)
Complex e_fn(double u, double k);

}  // namespace ybx
