#pragma once

#include <string>
#include <vector>

namespace apstab {

enum class ActivationKind {
    HyperbolicTangent,
    PiecewiseLinearSaturating,  // clamp(x, -1, 1)
    Linear,                     // slope * x
    CustomTable,                // piecewise-linear interpolation of (x, y) samples
};

/// Activation function together with its declared Lipschitz bound (G_i or F_i).
/// The bound is what certificates consume; validate_activation audits that the
/// function actually honors it on a sampling grid.
struct ActivationSpec {
    ActivationKind kind = ActivationKind::HyperbolicTangent;
    double lipschitz_bound = 1.0;   // must be > 0
    bool requires_monotone = false; // set for g-type activations
    double slope = 1.0;             // Linear only
    std::vector<double> table_x;    // CustomTable only, strictly increasing
    std::vector<double> table_y;

    double eval(double x) const;

    static ActivationSpec tanh_unit(bool monotone = true);
    static ActivationSpec saturating(bool monotone = true);
    static ActivationSpec linear(double slope, double bound, bool monotone = false);
};

struct ActivationGrid {
    double half_width = 5.0;  // grid spans [-half_width, half_width]
    int points = 2001;
};

struct ActivationReport {
    bool lipschitz_ok = true;
    bool monotone_ok = true;
    double worst_quotient = 0.0;     // max adjacent-pair difference quotient seen
    double worst_pair_x0 = 0.0;      // left endpoint of the worst pair
    double worst_pair_x1 = 0.0;
    bool passed() const { return lipschitz_ok && monotone_ok; }
};

/// Samples adjacent difference quotients of the activation on the grid and
/// checks them against lipschitz_bound (plus monotonicity when required).
/// Adjacent pairs suffice: any two-point quotient is bounded by the largest
/// adjacent one along the chain between them.
/// Throws std::invalid_argument on a degenerate grid (< 2 points).
ActivationReport validate_activation(const ActivationSpec& spec, const ActivationGrid& grid = {});

std::string to_string(ActivationKind kind);

}  // namespace apstab
