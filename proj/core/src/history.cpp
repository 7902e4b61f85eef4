#include "apstab/history.hpp"

#include <algorithm>
#include <stdexcept>

namespace apstab {

HistoryFunction HistoryFunction::constant(std::vector<double> v) {
    HistoryFunction h;
    h.kind = HistoryKind::Constant;
    h.values = std::move(v);
    return h;
}

std::size_t HistoryFunction::dimension() const {
    switch (kind) {
        case HistoryKind::Constant: return values.size();
        case HistoryKind::Signal: return signals.size();
        case HistoryKind::Table: return table_rows.empty() ? 0 : table_rows.front().size();
    }
    return 0;
}

double HistoryFunction::eval_component(std::size_t i, double t) const {
    t = std::clamp(t, -window, 0.0);
    switch (kind) {
        case HistoryKind::Constant:
            return values.at(i);
        case HistoryKind::Signal:
            return signals.at(i).value(t);
        case HistoryKind::Table: {
            if (table_times.empty() || table_rows.size() != table_times.size()) {
                throw std::logic_error("history table is malformed");
            }
            if (t <= table_times.front()) return table_rows.front().at(i);
            if (t >= table_times.back()) return table_rows.back().at(i);
            const auto it = std::upper_bound(table_times.begin(), table_times.end(), t);
            const std::size_t hi = static_cast<std::size_t>(it - table_times.begin());
            const std::size_t lo = hi - 1;
            const double w = (t - table_times[lo]) / (table_times[hi] - table_times[lo]);
            return table_rows[lo].at(i) + w * (table_rows[hi].at(i) - table_rows[lo].at(i));
        }
    }
    return 0.0;
}

std::vector<double> HistoryFunction::eval(double t) const {
    std::vector<double> out(dimension());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval_component(i, t);
    return out;
}

}  // namespace apstab
