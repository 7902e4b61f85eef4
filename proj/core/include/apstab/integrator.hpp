#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "apstab/model.hpp"

namespace apstab {

struct SimConfig {
    double step = 1e-2;          // h > 0
    double horizon = 10.0;       // T > 0
    double tail_tolerance = 1e-8;  // per-kernel truncation budget for the density tails
    int quadrature_nodes = 8;    // Gauss-Legendre nodes per panel, >= 8
    int record_stride = 1;       // every record_stride-th step lands in the trajectory
};

/// Dense solution record. Samples are uniformly spaced at step * record_stride;
/// stored derivatives make the record a C1 cubic Hermite interpolant, so
/// delayed evaluation and diagnostics can query any time in range.
struct Trajectory {
    std::size_t n = 0;
    double dt = 0.0;  // record spacing
    std::vector<double> times;
    std::vector<double> states;  // times.size() * n, row-major
    std::vector<double> derivs;  // same layout
    std::string model_tag;

    std::size_t rows() const { return times.size(); }
    double state(std::size_t row, std::size_t i) const { return states[row * n + i]; }
    double deriv(std::size_t row, std::size_t i) const { return derivs[row * n + i]; }
    double start_time() const { return times.empty() ? 0.0 : times.front(); }
    double end_time() const { return times.empty() ? 0.0 : times.back(); }

    /// Hermite interpolation at t in [start_time, end_time]; exact at samples.
    /// Throws std::out_of_range outside the recorded range.
    double value_at(double t, std::size_t i) const;
    std::vector<double> value_at(double t) const;
};

/// Integration aborted on a non-finite or overflowing state.
class BlowupError : public std::runtime_error {
public:
    BlowupError(double t, std::string what_arg)
        : std::runtime_error(std::move(what_arg)), time_(t) {}
    double time() const { return time_; }

private:
    double time_;
};

/// Delayed-state accessor: component j of the solution at an earlier time.
using DelayedLookup = std::function<double(std::size_t j, double t)>;

/// Composite Gauss-Legendre setup for the distributed-delay convolution.
struct ConvolutionQuadrature {
    double s_max = 10.0;      // tail cut; must exceed every atom lag
    double panel_width = 0.25;
    int nodes_per_panel = 8;
};

/// Smallest tail cut with truncation_bound(kernel, s_max, 1) <= tail_tolerance.
double choose_tail_cut(const DelayKernel& kernel, double tail_tolerance);

/// Tail cuts and history horizon the integrator will use for this model.
struct SimPlan {
    std::vector<double> s_max;   // per kernel entry (n*n)
    double max_s_max = 0.0;
    double tail_bound = 0.0;     // largest truncation_bound achieved at unit f_sup
    double t_hist = 0.0;         // max tau* + max s_max
};

SimPlan plan_simulation(const NetworkModel& model, const SimConfig& cfg);

/// One delayed term: atoms evaluate the lookup exactly at t - tau_t - lag;
/// each density is integrated over [0, s_max] by composite Gauss-Legendre.
double kernel_convolve(const DelayKernel& kernel, double t, double tau_t,
                       const ActivationSpec& f,
                       const std::function<double(double)>& lookup,
                       const ConvolutionQuadrature& quad);

/// Full right-hand side at (t, u) with delayed values supplied by `lookup`.
std::vector<double> rhs(const NetworkModel& model, double t, const std::vector<double>& u,
                        const DelayedLookup& lookup, const ConvolutionQuadrature& quad);

/// Solution value at any t <= the trajectory frontier: history for t <= 0,
/// Hermite interpolation on the recorded grid otherwise. Querying beyond the
/// frontier throws std::out_of_range.
std::vector<double> history_eval(const Trajectory& traj, const HistoryFunction& hist, double t);

/// Fixed-step classical RK4 from t = 0 to the horizon. Delayed evaluations go
/// through the dense step-resolution buffer; delays shorter than one step are
/// resolved against the cubic extension of the previous accepted step.
/// Throws BlowupError when a state leaves [-1e12, 1e12] or turns non-finite.
Trajectory integrate(const NetworkModel& model, const SimConfig& cfg);

}  // namespace apstab
