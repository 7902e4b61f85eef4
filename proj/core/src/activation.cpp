#include "apstab/activation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace apstab {

namespace {

double table_eval(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace

double ActivationSpec::eval(double x) const {
    switch (kind) {
        case ActivationKind::HyperbolicTangent:
            return std::tanh(x);
        case ActivationKind::PiecewiseLinearSaturating:
            return std::clamp(x, -1.0, 1.0);
        case ActivationKind::Linear:
            return slope * x;
        case ActivationKind::CustomTable:
            return table_eval(table_x, table_y, x);
    }
    return 0.0;
}

ActivationSpec ActivationSpec::tanh_unit(bool monotone) {
    ActivationSpec s;
    s.kind = ActivationKind::HyperbolicTangent;
    s.lipschitz_bound = 1.0;
    s.requires_monotone = monotone;
    return s;
}

ActivationSpec ActivationSpec::saturating(bool monotone) {
    ActivationSpec s;
    s.kind = ActivationKind::PiecewiseLinearSaturating;
    s.lipschitz_bound = 1.0;
    s.requires_monotone = monotone;
    return s;
}

ActivationSpec ActivationSpec::linear(double slope, double bound, bool monotone) {
    ActivationSpec s;
    s.kind = ActivationKind::Linear;
    s.slope = slope;
    s.lipschitz_bound = bound;
    s.requires_monotone = monotone;
    return s;
}

ActivationReport validate_activation(const ActivationSpec& spec, const ActivationGrid& grid) {
    if (grid.points < 2) {
        throw std::invalid_argument("activation grid needs at least 2 points");
    }
    if (!(grid.half_width > 0.0)) {
        throw std::invalid_argument("activation grid half_width must be > 0");
    }
    if (spec.kind == ActivationKind::CustomTable) {
        if (spec.table_x.size() != spec.table_y.size() || spec.table_x.size() < 2) {
            throw std::invalid_argument("table activation needs matching x/y samples, >= 2 each");
        }
        for (std::size_t k = 1; k < spec.table_x.size(); ++k) {
            if (!(spec.table_x[k] > spec.table_x[k - 1])) {
                throw std::invalid_argument("table activation x samples must be strictly increasing");
            }
        }
    }
    if (!(spec.lipschitz_bound > 0.0)) {
        throw std::invalid_argument("activation lipschitz_bound must be > 0");
    }

    // Uniform grid plus (for tables) the breakpoints, so exact segment slopes
    // appear among the adjacent difference quotients.
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(grid.points) + spec.table_x.size());
    const double dx = 2.0 * grid.half_width / (grid.points - 1);
    for (int k = 0; k < grid.points; ++k) xs.push_back(-grid.half_width + k * dx);
    if (spec.kind == ActivationKind::CustomTable) {
        xs.insert(xs.end(), spec.table_x.begin(), spec.table_x.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    }

    ActivationReport report;
    double prev_x = xs.front();
    double prev_y = spec.eval(prev_x);
    for (std::size_t k = 1; k < xs.size(); ++k) {
        const double x = xs[k];
        const double y = spec.eval(x);
        const double gap = x - prev_x;
        if (gap > 0.0) {
            const double quotient = std::abs(y - prev_y) / gap;
            if (quotient > report.worst_quotient) {
                report.worst_quotient = quotient;
                report.worst_pair_x0 = prev_x;
                report.worst_pair_x1 = x;
            }
            // Tiny slack absorbs rounding in the quotient itself.
            if (quotient > spec.lipschitz_bound * (1.0 + 1e-12) + 1e-12) {
                report.lipschitz_ok = false;
            }
            if (spec.requires_monotone && y - prev_y < -1e-12) {
                report.monotone_ok = false;
            }
        }
        prev_x = x;
        prev_y = y;
    }
    return report;
}

std::string to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::HyperbolicTangent: return "tanh";
        case ActivationKind::PiecewiseLinearSaturating: return "piecewise_linear";
        case ActivationKind::Linear: return "linear";
        case ActivationKind::CustomTable: return "table";
    }
    return "unknown";
}

}  // namespace apstab
