#pragma once

#include <vector>

#include "apstab/signal.hpp"

namespace apstab {

enum class HistoryKind {
    Constant,  // fixed vector for all t <= 0
    Signal,    // quasi-periodic vector signal evaluated at t
    Table,     // sampled (t, value) rows with linear interpolation
};

/// Initial history phi on (-inf, 0]. The finite representation horizon is
/// `window`: for t < -window the value at -window is used (constant extension).
struct HistoryFunction {
    HistoryKind kind = HistoryKind::Constant;
    std::vector<double> values;                  // Constant
    std::vector<QuasiPeriodicSignal> signals;    // Signal
    std::vector<double> table_times;             // Table, increasing, all <= 0
    std::vector<std::vector<double>> table_rows; // Table, one state row per time
    double window = 1.0;                         // T_hist > 0

    static HistoryFunction constant(std::vector<double> v);

    std::size_t dimension() const;

    /// Value of component i at time t <= 0 (clamped to -window below).
    double eval_component(std::size_t i, double t) const;
    std::vector<double> eval(double t) const;
};

}  // namespace apstab
