#pragma once

// Independent reference implementations used only by the tests. Nothing here
// may call into the library paths it is checking.

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "apstab/linalg.hpp"

namespace testsupport {

/// Deterministic uniform draws, identical on every platform (no reliance on
/// std::uniform_real_distribution's unspecified algorithm).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }  // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 gen_;
};

/// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol);

/// Characteristic polynomial of a square matrix via the Faddeev-LeVerrier
/// recurrence; coefficients returned monic, highest degree first:
/// p(x) = x^n + c[1] x^(n-1) + ... + c[n].
std::vector<double> characteristic_polynomial(const apstab::Matrix& m);

/// All roots of a monic polynomial (coefficients highest-first) by the
/// Durand-Kerner simultaneous iteration.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& monic_coeffs);

/// Spectral radius as max |eigenvalue| from the characteristic polynomial.
double spectral_radius_oracle(const apstab::Matrix& m);

/// Bisection for a root of f on [lo, hi]; requires a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi, int iterations = 200);

}  // namespace testsupport
