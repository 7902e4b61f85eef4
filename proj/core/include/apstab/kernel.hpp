#pragma once

#include <vector>

#include "apstab/signal.hpp"

namespace apstab {

/// Point mass at a fixed lag, with a time-varying weight: weight(t) * delta(s - lag).
struct KernelAtom {
    double lag = 0.0;  // >= 0
    QuasiPeriodicSignal weight;
};

/// Exponential-polynomial density: coefficient(t) * scale * s^poly_degree * e^(-decay * s) ds.
/// The class is closed under the exponentially weighted moments the stability
/// criterion needs, for every beta < decay.
struct KernelDensity {
    QuasiPeriodicSignal coefficient;
    int poly_degree = 0;   // q >= 0
    double scale = 1.0;    // p, sign allowed
    double decay = 1.0;    // lambda > 0
};

/// Lebesgue-Stieltjes delay measure dK(t, s) = atoms + densities.
/// The time-independent envelope |dK|(s) replaces each time-varying factor by
/// its sup magnitude, so |dK(t, s)| <= |dK|(s) holds for every t.
struct DelayKernel {
    std::vector<KernelAtom> atoms;
    std::vector<KernelDensity> densities;

    bool empty() const { return atoms.empty() && densities.empty(); }
    bool has_densities() const { return !densities.empty(); }

    /// Smallest density decay rate; +infinity when there are no densities.
    double min_decay() const;
    double max_atom_lag() const;
};

/// kappa(beta) = integral_0^inf e^(beta s) |dK|(s)
///             = sum_atoms sup|w| e^(beta lag) + sum_densities sup|c| |p| q! / (decay - beta)^(q+1).
/// Throws std::domain_error when beta >= min decay (the moment diverges).
double kernel_moment(const DelayKernel& kernel, double beta);

/// Same moment but with the kernel factors evaluated at time t instead of
/// their sup envelope: |w(t)|, |c(t)|. Used by the pointwise criterion audit.
double kernel_moment_at(const DelayKernel& kernel, double t, double beta);

/// Signed total mass at time t: sum_atoms w(t) + sum_densities c(t) p q! / decay^(q+1).
/// For constant-coefficient models this is the algebraic weight of the
/// delayed term at an equilibrium.
double kernel_mass_at(const DelayKernel& kernel, double t);

/// Tail of the envelope beyond s_max, scaled by a bound on |f|:
///   f_sup * sum_densities sup|c| |p| * integral_{s_max}^inf s^q e^(-decay s) ds
/// (closed form via the incomplete-gamma recurrence). Atoms contribute nothing;
/// s_max must exceed every atom lag.
double truncation_bound(const DelayKernel& kernel, double s_max, double f_sup);

}  // namespace apstab
