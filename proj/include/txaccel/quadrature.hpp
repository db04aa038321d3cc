#pragma once

#include <vector>

namespace txaccel {

/// Gauss-Legendre rule on [-1, 1]. Nodes ascend; nodes and weights are mirror-symmetric.
struct QuadratureSet {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline constexpr int kMinQuadratureOrder = 2;
inline constexpr int kMaxQuadratureOrder = 64;

/// Even-order Gauss-Legendre nodes and weights. Throws InvalidArgument for odd or
/// out-of-range orders.
QuadratureSet gauss_legendre(int order);

}  // namespace txaccel
