#include "apstab/kernel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace apstab {

namespace {

double factorial(int q) {
    double r = 1.0;
    for (int k = 2; k <= q; ++k) r *= k;
    return r;
}

void check_density(const KernelDensity& density) {
    if (density.poly_degree < 0) {
        throw std::invalid_argument("kernel density poly_degree must be >= 0");
    }
    if (!(density.decay > 0.0)) {
        throw std::invalid_argument("kernel density decay must be > 0");
    }
}

/// integral_s^inf x^q e^(-lambda x) dx = q!/lambda^(q+1) * e^(-lambda s) * sum_{m<=q} (lambda s)^m / m!
double poly_exp_tail(int q, double lambda, double s) {
    double partial = 1.0;  // sum_{m=0}^{q} (lambda s)^m / m!
    double term = 1.0;
    for (int m = 1; m <= q; ++m) {
        term *= lambda * s / m;
        partial += term;
    }
    return factorial(q) / std::pow(lambda, q + 1) * std::exp(-lambda * s) * partial;
}

}  // namespace

double DelayKernel::min_decay() const {
    double m = std::numeric_limits<double>::infinity();
    for (const KernelDensity& density : densities) m = std::min(m, density.decay);
    return m;
}

double DelayKernel::max_atom_lag() const {
    double m = 0.0;
    for (const KernelAtom& atom : atoms) m = std::max(m, atom.lag);
    return m;
}

double kernel_moment(const DelayKernel& kernel, double beta) {
    double total = 0.0;
    for (const KernelAtom& atom : kernel.atoms) {
        if (atom.lag < 0.0) throw std::invalid_argument("kernel atom lag must be >= 0");
        total += atom.weight.sup_abs() * std::exp(beta * atom.lag);
    }
    for (const KernelDensity& density : kernel.densities) {
        check_density(density);
        if (beta >= density.decay) {
            throw std::domain_error("kernel moment diverges: beta >= density decay");
        }
        const int q = density.poly_degree;
        total += density.coefficient.sup_abs() * std::abs(density.scale) * factorial(q) /
                 std::pow(density.decay - beta, q + 1);
    }
    return total;
}

double kernel_moment_at(const DelayKernel& kernel, double t, double beta) {
    double total = 0.0;
    for (const KernelAtom& atom : kernel.atoms) {
        if (atom.lag < 0.0) throw std::invalid_argument("kernel atom lag must be >= 0");
        total += std::abs(atom.weight.value(t)) * std::exp(beta * atom.lag);
    }
    for (const KernelDensity& density : kernel.densities) {
        check_density(density);
        if (beta >= density.decay) {
            throw std::domain_error("kernel moment diverges: beta >= density decay");
        }
        const int q = density.poly_degree;
        total += std::abs(density.coefficient.value(t)) * std::abs(density.scale) * factorial(q) /
                 std::pow(density.decay - beta, q + 1);
    }
    return total;
}

double kernel_mass_at(const DelayKernel& kernel, double t) {
    double total = 0.0;
    for (const KernelAtom& atom : kernel.atoms) total += atom.weight.value(t);
    for (const KernelDensity& density : kernel.densities) {
        check_density(density);
        const int q = density.poly_degree;
        total += density.coefficient.value(t) * density.scale * factorial(q) /
                 std::pow(density.decay, q + 1);
    }
    return total;
}

double truncation_bound(const DelayKernel& kernel, double s_max, double f_sup) {
    if (s_max < kernel.max_atom_lag()) {
        throw std::invalid_argument("truncation cut must cover every kernel atom lag");
    }
    double total = 0.0;
    for (const KernelDensity& density : kernel.densities) {
        check_density(density);
        total += density.coefficient.sup_abs() * std::abs(density.scale) *
                 poly_exp_tail(density.poly_degree, density.decay, s_max);
    }
    return f_sup * total;
}

}  // namespace apstab
