#pragma once

#include <cstddef>
#include <vector>

namespace apstab {

/// Gauss-Legendre rule on [-1, 1]. Nodes via Newton iteration on P_n; results
/// are cached per n, so repeated calls are cheap.
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const GaussLegendreRule& gauss_legendre(std::size_t n);

}  // namespace apstab
