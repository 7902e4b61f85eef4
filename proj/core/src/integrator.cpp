#include "apstab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "apstab/quadrature.hpp"

namespace apstab {

namespace {

/// Cubic Hermite on a segment of width h, theta = (t - t0)/h. Exact at
/// theta = 0 and 1; theta outside [0, 1] extends the same cubic.
double hermite(double u0, double f0, double u1, double f1, double h, double theta) {
    const double t2 = theta * theta;
    const double t3 = t2 * theta;
    return (1.0 - 3.0 * t2 + 2.0 * t3) * u0 + (3.0 * t2 - 2.0 * t3) * u1 +
           h * ((theta - 2.0 * t2 + t3) * f0 + (t3 - t2) * f1);
}

/// Precomputed Gauss-Legendre data for one kernel entry's densities:
/// flattened nodes s_k on [0, s_max] and, per density, the time-independent
/// factor scale * s^q * e^(-decay s) * w_k.
struct EntryQuadrature {
    std::vector<double> s;
    std::vector<double> factors;  // density-major: factors[d * s.size() + k]
};

EntryQuadrature build_entry_quadrature(const DelayKernel& kernel, double s_max,
                                       double panel_width, int nodes_per_panel) {
    EntryQuadrature eq;
    if (!kernel.has_densities() || s_max <= 0.0) return eq;
    const GaussLegendreRule& rule = gauss_legendre(static_cast<std::size_t>(nodes_per_panel));
    const std::size_t panels =
        static_cast<std::size_t>(std::ceil(s_max / panel_width - 1e-12));
    std::vector<double> weights;
    for (std::size_t p = 0; p < panels; ++p) {
        const double p0 = p * panel_width;
        const double p1 = std::min(p0 + panel_width, s_max);
        if (p1 <= p0) continue;
        const double half = 0.5 * (p1 - p0);
        const double mid = 0.5 * (p0 + p1);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            eq.s.push_back(mid + half * rule.nodes[k]);
            weights.push_back(half * rule.weights[k]);
        }
    }
    const std::size_t nodes = eq.s.size();
    eq.factors.resize(kernel.densities.size() * nodes);
    for (std::size_t d = 0; d < kernel.densities.size(); ++d) {
        const KernelDensity& density = kernel.densities[d];
        for (std::size_t k = 0; k < nodes; ++k) {
            eq.factors[d * nodes + k] = density.scale *
                                        std::pow(eq.s[k], density.poly_degree) *
                                        std::exp(-density.decay * eq.s[k]) * weights[k];
        }
    }
    return eq;
}

void check_sim_config(const SimConfig& cfg) {
    if (!(cfg.step > 0.0) || !std::isfinite(cfg.step)) {
        throw std::invalid_argument("sim config: step must be > 0");
    }
    if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) {
        throw std::invalid_argument("sim config: horizon must be > 0");
    }
    if (!(cfg.tail_tolerance > 0.0)) {
        throw std::invalid_argument("sim config: tail_tolerance must be > 0");
    }
    if (cfg.quadrature_nodes < 8) {
        throw std::invalid_argument("sim config: quadrature_nodes must be >= 8");
    }
    if (cfg.record_stride < 1) {
        throw std::invalid_argument("sim config: record_stride must be >= 1");
    }
}

constexpr double kBlowupLimit = 1e12;

}  // namespace

double Trajectory::value_at(double t, std::size_t i) const {
    if (times.empty()) throw std::out_of_range("trajectory is empty");
    const double eps = (dt > 0.0 ? dt : 1.0) * 1e-9;
    if (t < times.front() - eps || t > times.back() + eps) {
        std::ostringstream msg;
        msg << "time " << t << " outside recorded range [" << times.front() << ", "
            << times.back() << "]";
        throw std::out_of_range(msg.str());
    }
    t = std::clamp(t, times.front(), times.back());
    if (times.size() == 1) return states[i];

    const double pos = (t - times.front()) / dt;
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) <= 1e-9 && nearest >= 0.0 &&
        nearest < static_cast<double>(times.size())) {
        return state(static_cast<std::size_t>(nearest), i);
    }
    std::size_t seg = static_cast<std::size_t>(pos);
    seg = std::min(seg, times.size() - 2);
    const double theta = pos - static_cast<double>(seg);
    return hermite(state(seg, i), deriv(seg, i), state(seg + 1, i), deriv(seg + 1, i), dt, theta);
}

std::vector<double> Trajectory::value_at(double t) const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = value_at(t, i);
    return out;
}

double choose_tail_cut(const DelayKernel& kernel, double tail_tolerance) {
    if (!(tail_tolerance > 0.0)) {
        throw std::invalid_argument("tail_tolerance must be > 0");
    }
    const double lag = kernel.max_atom_lag();
    if (!kernel.has_densities()) return lag;
    if (truncation_bound(kernel, lag, 1.0) <= tail_tolerance) return lag;

    double lo = lag;
    double hi = std::max(lag, 1.0);
    int guard = 0;
    while (truncation_bound(kernel, hi, 1.0) > tail_tolerance && guard++ < 200) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (truncation_bound(kernel, mid, 1.0) <= tail_tolerance) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

SimPlan plan_simulation(const NetworkModel& model, const SimConfig& cfg) {
    model.check_dimensions();
    check_sim_config(cfg);
    const std::size_t n = model.n;
    SimPlan plan;
    plan.s_max.resize(n * n, 0.0);
    for (std::size_t k = 0; k < n * n; ++k) {
        const DelayKernel& kernel = model.kernels[k];
        double cut = kernel.max_atom_lag();
        if (kernel.has_densities()) {
            cut = std::max(cut, choose_tail_cut(kernel, cfg.tail_tolerance));
            plan.tail_bound = std::max(plan.tail_bound, truncation_bound(kernel, cut, 1.0));
        }
        plan.s_max[k] = cut;
        plan.max_s_max = std::max(plan.max_s_max, cut);
        plan.t_hist = std::max(plan.t_hist, model.tau[k].upper_bound() + cut);
    }
    return plan;
}

double kernel_convolve(const DelayKernel& kernel, double t, double tau_t,
                       const ActivationSpec& f,
                       const std::function<double(double)>& lookup,
                       const ConvolutionQuadrature& quad) {
    if (!(tau_t >= 0.0)) throw std::invalid_argument("kernel_convolve: tau_t must be >= 0");
    double acc = 0.0;
    for (const KernelAtom& atom : kernel.atoms) {
        acc += atom.weight.value(t) * f.eval(lookup(t - tau_t - atom.lag));
    }
    if (kernel.has_densities()) {
        if (!(quad.s_max > 0.0) || !(quad.panel_width > 0.0) || quad.nodes_per_panel < 2) {
            throw std::invalid_argument("kernel_convolve: bad quadrature setup");
        }
        const EntryQuadrature eq =
            build_entry_quadrature(kernel, quad.s_max, quad.panel_width, quad.nodes_per_panel);
        const std::size_t nodes = eq.s.size();
        for (std::size_t k = 0; k < nodes; ++k) {
            const double val = f.eval(lookup(t - tau_t - eq.s[k]));
            double w = 0.0;
            for (std::size_t d = 0; d < kernel.densities.size(); ++d) {
                w += kernel.densities[d].coefficient.value(t) * eq.factors[d * nodes + k];
            }
            acc += w * val;
        }
    }
    return acc;
}

std::vector<double> rhs(const NetworkModel& model, double t, const std::vector<double>& u,
                        const DelayedLookup& lookup, const ConvolutionQuadrature& quad) {
    model.check_dimensions();
    const std::size_t n = model.n;
    if (u.size() != n) throw std::invalid_argument("rhs: state size mismatch");

    std::vector<double> gj(n);
    for (std::size_t j = 0; j < n; ++j) gj[j] = model.g_spec[j].eval(u[j]);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = -model.d[i].value(t) * u[i] + model.inputs[i].value(t);
        for (std::size_t j = 0; j < n; ++j) {
            acc += model.a_at(i, j).value(t) * gj[j];
            const DelayKernel& kernel = model.kernel_at(i, j);
            if (kernel.empty()) continue;
            acc += kernel_convolve(
                kernel, t, model.tau_at(i, j).value(t), model.f_spec[j],
                [&lookup, j](double tq) { return lookup(j, tq); }, quad);
        }
        out[i] = acc;
    }
    return out;
}

std::vector<double> history_eval(const Trajectory& traj, const HistoryFunction& hist, double t) {
    if (t <= 0.0) return hist.eval(t);
    return traj.value_at(t);
}

Trajectory integrate(const NetworkModel& model, const SimConfig& cfg) {
    model.check_dimensions();
    check_sim_config(cfg);
    const std::size_t n = model.n;
    const double h = cfg.step;
    const std::size_t stride = static_cast<std::size_t>(cfg.record_stride);

    // Whole-step horizon, rounded up so the recorded grid stays uniform.
    const double raw = cfg.horizon / h;
    std::size_t steps = (std::abs(raw - std::round(raw)) < 1e-6)
                            ? static_cast<std::size_t>(std::llround(raw))
                            : static_cast<std::size_t>(std::ceil(raw));
    steps = std::max<std::size_t>(steps, 1);
    steps = ((steps + stride - 1) / stride) * stride;
    if (steps > 60'000'000) {
        throw std::invalid_argument("sim config: horizon/step asks for too many steps");
    }

    const SimPlan plan = plan_simulation(model, cfg);
    const double panel_width =
        std::max<double>(1.0, std::floor(0.25 / h + 1e-9)) * h;
    std::vector<EntryQuadrature> quads(n * n);
    std::size_t max_densities = 0;
    for (std::size_t k = 0; k < n * n; ++k) {
        quads[k] = build_entry_quadrature(model.kernels[k], plan.s_max[k], panel_width,
                                          cfg.quadrature_nodes);
        max_densities = std::max(max_densities, model.kernels[k].densities.size());
    }

    // Dense step-resolution buffer; `complete` marks the last node whose
    // derivative is already stored (the Hermite frontier).
    std::vector<double> states((steps + 1) * n);
    std::vector<double> derivs((steps + 1) * n);
    std::size_t complete = 0;

    const auto lookup = [&](std::size_t j, double tq) -> double {
        if (tq <= 0.0) return model.history.eval_component(j, tq);
        const double pos = tq / h;
        const double nearest = std::round(pos);
        if (std::abs(pos - nearest) <= 1e-9 && nearest <= static_cast<double>(complete)) {
            return states[static_cast<std::size_t>(nearest) * n + j];
        }
        std::size_t seg;
        if (pos >= static_cast<double>(complete)) {
            // Beyond the frontier: extend the last complete segment's cubic,
            // or the tangent line at t = 0 before any segment is complete.
            if (complete == 0) return states[j] + tq * derivs[j];
            seg = complete - 1;
        } else {
            seg = std::min(static_cast<std::size_t>(pos), complete - 1);
        }
        const double theta = pos - static_cast<double>(seg);
        return hermite(states[seg * n + j], derivs[seg * n + j], states[(seg + 1) * n + j],
                       derivs[(seg + 1) * n + j], h, theta);
    };

    std::vector<double> gj(n);
    std::vector<double> coeff(max_densities);
    const auto eval_rhs = [&](double t, const double* u, double* out) {
        for (std::size_t j = 0; j < n; ++j) gj[j] = model.g_spec[j].eval(u[j]);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = -model.d[i].value(t) * u[i] + model.inputs[i].value(t);
            for (std::size_t j = 0; j < n; ++j) {
                acc += model.a_at(i, j).value(t) * gj[j];
                const DelayKernel& kernel = model.kernel_at(i, j);
                if (kernel.empty()) continue;
                const double base = t - model.tau_at(i, j).value(t);
                const ActivationSpec& f = model.f_spec[j];
                for (const KernelAtom& atom : kernel.atoms) {
                    acc += atom.weight.value(t) * f.eval(lookup(j, base - atom.lag));
                }
                const EntryQuadrature& eq = quads[i * n + j];
                const std::size_t nodes = eq.s.size();
                if (nodes == 0) continue;
                const std::size_t dcount = kernel.densities.size();
                for (std::size_t d = 0; d < dcount; ++d) {
                    coeff[d] = kernel.densities[d].coefficient.value(t);
                }
                for (std::size_t k = 0; k < nodes; ++k) {
                    const double val = f.eval(lookup(j, base - eq.s[k]));
                    double w = coeff[0] * eq.factors[k];
                    for (std::size_t d = 1; d < dcount; ++d) {
                        w += coeff[d] * eq.factors[d * nodes + k];
                    }
                    acc += w * val;
                }
            }
            out[i] = acc;
        }
    };

    const std::vector<double> u0 = model.history.eval(0.0);
    std::copy(u0.begin(), u0.end(), states.begin());
    eval_rhs(0.0, states.data(), derivs.data());

    std::vector<double> k2(n), k3(n), k4(n), stage(n);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const double* uk = states.data() + k * n;
        const double* k1 = derivs.data() + k * n;

        for (std::size_t i = 0; i < n; ++i) stage[i] = uk[i] + 0.5 * h * k1[i];
        eval_rhs(t + 0.5 * h, stage.data(), k2.data());
        for (std::size_t i = 0; i < n; ++i) stage[i] = uk[i] + 0.5 * h * k2[i];
        eval_rhs(t + 0.5 * h, stage.data(), k3.data());
        for (std::size_t i = 0; i < n; ++i) stage[i] = uk[i] + h * k3[i];
        eval_rhs(t + h, stage.data(), k4.data());

        double* next = states.data() + (k + 1) * n;
        for (std::size_t i = 0; i < n; ++i) {
            next[i] = uk[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(next[i]) || std::abs(next[i]) > kBlowupLimit) {
                std::ostringstream msg;
                msg << "solution component " << i << " reached " << next[i] << " at t = "
                    << (static_cast<double>(k + 1) * h);
                throw BlowupError(static_cast<double>(k + 1) * h, msg.str());
            }
        }
        eval_rhs(t + h, next, derivs.data() + (k + 1) * n);
        complete = k + 1;
    }

    Trajectory traj;
    traj.n = n;
    traj.dt = h * static_cast<double>(stride);
    traj.model_tag = model.name;
    const std::size_t rows = steps / stride + 1;
    traj.times.reserve(rows);
    traj.states.reserve(rows * n);
    traj.derivs.reserve(rows * n);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t node = r * stride;
        traj.times.push_back(static_cast<double>(node) * h);
        for (std::size_t i = 0; i < n; ++i) {
            traj.states.push_back(states[node * n + i]);
            traj.derivs.push_back(derivs[node * n + i]);
        }
    }
    return traj;
}

}  // namespace apstab
