#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "apstab/integrator.hpp"
#include "apstab/model.hpp"

namespace apstab {

/// Weighted sup-norm max_i |x_i| / xi_i. xi must be strictly positive.
double weighted_norm(const std::vector<double>& x, const std::vector<double>& xi);

struct DistanceSeries {
    std::vector<double> times;
    std::vector<double> values;
};

/// Pointwise weighted distance between two trajectories recorded on the same
/// time grid. Throws std::invalid_argument on a grid or dimension mismatch.
DistanceSeries trajectory_distance(const Trajectory& a, const Trajectory& b,
                                   const std::vector<double>& xi);

/// Least-squares fit of log(values) ~ intercept - rate * t over the window,
/// skipping samples at or below the noise floor.
struct DecayReport {
    double rate = 0.0;       // positive means contraction
    double intercept = 0.0;  // log of the fitted amplitude
    double r_squared = 0.0;
    double window_begin = 0.0;
    double window_end = 0.0;
    double series_floor = 0.0;  // smallest series value seen inside the window
    std::size_t points_used = 0;
    std::size_t points_excluded = 0;  // at or below the noise floor
    bool sufficient_data = false;     // at least 5 usable samples
};

DecayReport fit_exponential_rate(const DistanceSeries& series, double window_begin,
                                 double window_end, double noise_floor = 1e-10);

/// Running-max check of the weighted norm against the ultimate bound
/// max{M(0), 2 i_hat / eta}: passes when the running max M(t) stays within
/// `tolerance` of the bound at every recorded sample. Requires eta > 0.
struct BoundednessReport {
    bool passed = false;
    double m0 = 0.0;             // M(0)
    double ultimate = 0.0;       // 2 i_hat / eta
    double bound = 0.0;          // max{M(0), ultimate}
    double worst_margin = 0.0;   // min over t of bound + tolerance - M(t)
    double t_at_worst = 0.0;
    std::vector<double> times;       // recorded grid
    std::vector<double> running_max; // M(t) on that grid
};

BoundednessReport boundedness_check(const Trajectory& traj, const std::vector<double>& xi,
                                    double i_hat, double eta, double tolerance = 0.0);

/// Max over the recorded grid points (plus segment midpoints) in
/// [window_begin, window_end] of |u(t + omega) - u(t)| in the weighted norm.
/// Both the window and its omega-shift must lie inside the recorded range.
double almost_period_defect(const Trajectory& traj, double omega, double window_begin,
                            double window_end, const std::vector<double>& xi);

/// Fixed point of the constant-coefficient system: u_i = (1/d_i) * (sum_j
/// a_ij g_j(u_j) + sum_j mass_ij f_j(u_j) + I_i), solved by damped iteration.
/// Requires a constant-coefficient model; the damped map contracts whenever
/// the stability criterion holds at beta = 0.
struct EquilibriumResult {
    std::vector<double> u;
    double residual = 0.0;   // sup-norm of the vector field at u
    std::size_t iterations = 0;
    bool converged = false;
};

EquilibriumResult solve_equilibrium(const NetworkModel& model, double tol = 1e-13,
                                    std::size_t max_iterations = 100000);

}  // namespace apstab
