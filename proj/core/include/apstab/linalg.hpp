#pragma once

#include <cstddef>
#include <vector>

namespace apstab {

/// Dense row-major square matrix, sized for the small systems that arise here.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;  // n*n, row-major

    Matrix() = default;
    explicit Matrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws std::runtime_error on a (numerically) singular system.
std::vector<double> solve_linear(Matrix a, std::vector<double> b);

}  // namespace apstab
