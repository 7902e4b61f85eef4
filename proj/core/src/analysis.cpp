#include "apstab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace apstab {

double weighted_norm(const std::vector<double>& x, const std::vector<double>& xi) {
    if (x.size() != xi.size()) throw std::invalid_argument("weighted_norm: size mismatch");
    double norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(xi[i] > 0.0)) throw std::invalid_argument("weighted_norm: xi must be positive");
        norm = std::max(norm, std::abs(x[i]) / xi[i]);
    }
    return norm;
}

DistanceSeries trajectory_distance(const Trajectory& a, const Trajectory& b,
                                   const std::vector<double>& xi) {
    if (a.n != b.n) throw std::invalid_argument("trajectory_distance: dimension mismatch");
    if (a.times.size() != b.times.size()) {
        throw std::invalid_argument("trajectory_distance: time grids differ in length");
    }
    for (std::size_t r = 0; r < a.times.size(); ++r) {
        if (a.times[r] != b.times[r]) {
            throw std::invalid_argument("trajectory_distance: time grids differ");
        }
    }
    DistanceSeries series;
    series.times = a.times;
    series.values.resize(a.times.size());
    std::vector<double> diff(a.n);
    for (std::size_t r = 0; r < a.times.size(); ++r) {
        for (std::size_t i = 0; i < a.n; ++i) diff[i] = a.state(r, i) - b.state(r, i);
        series.values[r] = weighted_norm(diff, xi);
    }
    return series;
}

DecayReport fit_exponential_rate(const DistanceSeries& series, double window_begin,
                                 double window_end, double noise_floor) {
    if (series.times.size() != series.values.size()) {
        throw std::invalid_argument("fit_exponential_rate: malformed series");
    }
    if (!(window_end > window_begin)) {
        throw std::invalid_argument("fit_exponential_rate: window must have positive length");
    }
    DecayReport report;
    report.window_begin = window_begin;
    report.window_end = window_end;
    report.series_floor = std::numeric_limits<double>::infinity();

    std::vector<double> ts;
    std::vector<double> logs;
    for (std::size_t r = 0; r < series.times.size(); ++r) {
        const double t = series.times[r];
        if (t < window_begin || t > window_end) continue;
        const double v = series.values[r];
        if (v < 0.0) throw std::invalid_argument("fit_exponential_rate: negative series value");
        report.series_floor = std::min(report.series_floor, v);
        if (v <= noise_floor) {
            ++report.points_excluded;
            continue;
        }
        ts.push_back(t);
        logs.push_back(std::log(v));
    }
    report.points_used = ts.size();
    if (ts.size() < 5) return report;  // sufficient_data stays false
    report.sufficient_data = true;

    const double m = static_cast<double>(ts.size());
    double t_mean = 0.0;
    double l_mean = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        t_mean += ts[k];
        l_mean += logs[k];
    }
    t_mean /= m;
    l_mean /= m;
    double stt = 0.0;
    double stl = 0.0;
    double sll = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double dt = ts[k] - t_mean;
        const double dl = logs[k] - l_mean;
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    if (stt == 0.0) return report;  // all samples at one time; keep rate 0
    const double slope = stl / stt;
    report.rate = -slope;
    report.intercept = l_mean - slope * t_mean;
    if (sll <= 1e-30) {
        report.r_squared = 1.0;  // perfectly flat series: the line fits exactly
    } else {
        report.r_squared = std::clamp((stl * stl) / (stt * sll), 0.0, 1.0);
    }
    return report;
}

BoundednessReport boundedness_check(const Trajectory& traj, const std::vector<double>& xi,
                                    double i_hat, double eta, double tolerance) {
    if (!(eta > 0.0)) throw std::invalid_argument("boundedness_check: eta must be > 0");
    if (traj.times.empty()) throw std::invalid_argument("boundedness_check: empty trajectory");
    BoundednessReport report;
    report.ultimate = 2.0 * i_hat / eta;
    report.times = traj.times;
    report.running_max.resize(traj.times.size());

    std::vector<double> u(traj.n);
    double running = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        for (std::size_t i = 0; i < traj.n; ++i) u[i] = traj.state(r, i);
        const double norm = weighted_norm(u, xi);
        running = std::max(running, norm);
        report.running_max[r] = running;
        if (r == 0) {
            report.m0 = norm;
            report.bound = std::max(report.m0, report.ultimate);
        }
        const double margin = report.bound + tolerance - running;
        if (margin < worst_margin) {
            worst_margin = margin;
            report.t_at_worst = traj.times[r];
        }
    }
    report.worst_margin = worst_margin;
    report.passed = worst_margin >= 0.0;
    return report;
}

double almost_period_defect(const Trajectory& traj, double omega, double window_begin,
                            double window_end, const std::vector<double>& xi) {
    if (!(omega > 0.0)) throw std::invalid_argument("almost_period_defect: omega must be > 0");
    if (traj.times.empty()) throw std::invalid_argument("almost_period_defect: empty trajectory");
    const double eps = (traj.dt > 0.0 ? traj.dt : 1.0) * 1e-9;
    if (window_begin < traj.times.front() - eps || window_end + omega > traj.times.back() + eps ||
        !(window_end > window_begin)) {
        throw std::invalid_argument(
            "almost_period_defect: window plus omega must lie inside the recorded range");
    }

    std::vector<double> diff(traj.n);
    double defect = 0.0;
    const auto probe = [&](double t) {
        t = std::clamp(t, traj.times.front(), traj.times.back() - omega);
        for (std::size_t i = 0; i < traj.n; ++i) {
            diff[i] = traj.value_at(t + omega, i) - traj.value_at(t, i);
        }
        defect = std::max(defect, weighted_norm(diff, xi));
    };

    // Recorded grid points inside the window, plus segment midpoints.
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        const double t = traj.times[r];
        if (t < window_begin - eps || t > window_end + eps) continue;
        probe(t);
        if (r + 1 < traj.times.size()) {
            const double tm = 0.5 * (t + traj.times[r + 1]);
            if (tm <= window_end + eps) probe(tm);
        }
    }
    return defect;
}

EquilibriumResult solve_equilibrium(const NetworkModel& model, double tol,
                                    std::size_t max_iterations) {
    model.check_dimensions();
    if (!model.is_constant_coefficient()) {
        throw std::invalid_argument("solve_equilibrium: model must be constant-coefficient");
    }
    const std::size_t n = model.n;
    std::vector<double> d(n);
    std::vector<double> inputs(n);
    std::vector<double> a(n * n);
    std::vector<double> mass(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = model.d[i].value(0.0);
        if (!(d[i] > 0.0)) {
            throw std::invalid_argument("solve_equilibrium: self-inhibition must be positive");
        }
        inputs[i] = model.inputs[i].value(0.0);
    }
    for (std::size_t k = 0; k < n * n; ++k) {
        a[k] = model.a[k].value(0.0);
        mass[k] = kernel_mass_at(model.kernels[k], 0.0);
    }

    const auto map = [&](const std::vector<double>& u, std::vector<double>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = inputs[i];
            for (std::size_t j = 0; j < n; ++j) {
                acc += a[i * n + j] * model.g_spec[j].eval(u[j]) +
                       mass[i * n + j] * model.f_spec[j].eval(u[j]);
            }
            out[i] = acc / d[i];
        }
    };

    const double theta = 0.8;  // damping; the criterion at beta = 0 makes this contract
    EquilibriumResult result;
    result.u.assign(n, 0.0);
    std::vector<double> tu(n);
    for (std::size_t iter = 1; iter <= max_iterations; ++iter) {
        map(result.u, tu);
        double shift = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double next = result.u[i] + theta * (tu[i] - result.u[i]);
            shift = std::max(shift, std::abs(next - result.u[i]));
            result.u[i] = next;
        }
        result.iterations = iter;
        if (shift <= tol) {
            result.converged = true;
            break;
        }
    }
    map(result.u, tu);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        residual = std::max(residual, std::abs(d[i] * (tu[i] - result.u[i])));
    }
    result.residual = residual;
    return result;
}

}  // namespace apstab
