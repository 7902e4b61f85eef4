#include "apstab/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace apstab {

std::vector<double> solve_linear(Matrix a, std::vector<double> b) {
    const std::size_t n = a.n;
    if (b.size() != n) throw std::invalid_argument("solve_linear: size mismatch");

    double scale = 0.0;
    for (double v : a.a) scale = std::max(scale, std::abs(v));
    const double tiny = 1e-13 * std::max(1.0, scale);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t row = col + 1; row < n; ++row) {
            if (std::abs(a(row, col)) > std::abs(a(pivot, col))) pivot = row;
        }
        if (std::abs(a(pivot, col)) <= tiny) {
            throw std::runtime_error("solve_linear: singular system");
        }
        if (pivot != col) {
            for (std::size_t j = col; j < n; ++j) std::swap(a(col, j), a(pivot, j));
            std::swap(b[col], b[pivot]);
        }
        for (std::size_t row = col + 1; row < n; ++row) {
            const double factor = a(row, col) / a(col, col);
            if (factor == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(row, j) -= factor * a(col, j);
            b[row] -= factor * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t row = n; row-- > 0;) {
        double acc = b[row];
        for (std::size_t j = row + 1; j < n; ++j) acc -= a(row, j) * x[j];
        x[row] = acc / a(row, row);
    }
    return x;
}

}  // namespace apstab
