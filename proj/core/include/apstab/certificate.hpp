#pragma once

#include <optional>
#include <string>
#include <vector>

#include "apstab/linalg.hpp"
#include "apstab/model.hpp"

namespace apstab {

/// Nonnegative comparison matrix of the criterion at rate beta:
///   entry(i, j) = [ G_j |a*_ij| + F_j e^(beta tau*_ij) kappa_ij(beta) ] / (d_i - beta).
/// Defined for 0 <= beta < min_i d_i and beta < min kernel decay. The strict
/// row inequalities admit a positive weight vector iff the Perron root of this
/// matrix is < 1.
struct ComparisonMatrix {
    double beta = 0.0;
    Matrix entries;
};

/// (xi, beta, eta) witness: substituting the weights xi and rate beta into the
/// criterion leaves slack >= eta > 0 in every row. xi is normalized so that
/// max_i xi_i = 1.
struct StabilityCertificate {
    std::vector<double> xi;
    double beta = 0.0;
    double eta = 0.0;
    std::string method = "spectral";  // "spectral" | "brute-force"
    bool pointwise_checked = false;
    std::optional<double> pointwise_min_slack;
};

struct SpectralResult {
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct PointwiseReport {
    double min_slack = 0.0;
    double t_at_min = 0.0;
    std::size_t row_at_min = 0;
    int samples = 0;
};

struct UltimateBound {
    double eta = 0.0;                 // min_i [ d_i xi_i - sum_j |a*_ij| G_j xi_j - sum_j F_j xi_j kappa_ij(0) ]
    std::optional<double> bound;     // 2 I-hat / eta when eta > 0
    bool criterion_holds() const { return eta > 0.0; }
};

struct BruteForceResult {
    bool feasible = false;
    std::vector<double> xi;     // best weights found (max-normalized)
    double best_slack = 0.0;    // min row slack at xi
};

struct TimeGrid {
    double begin = 0.0;
    double end = 100.0;
    int samples = 4096;
};

/// Throws std::invalid_argument when beta is outside [0, min d) or >= min decay.
ComparisonMatrix build_comparison_matrix(const BoundsSummary& bounds, double beta);

/// Perron root of a nonnegative matrix. Power iteration on the shifted matrix
/// m + I with the all-ones start vector, converged when the Collatz-Wielandt
/// ratio gap closes to relative 1e-12. Falls back to closed-form
/// characteristic-polynomial roots for n <= 3 when iteration stalls
/// (reducible or cyclic structure); otherwise reports non-convergence.
SpectralResult spectral_radius(const Matrix& m, int max_iterations = 200000);

/// Row slacks of the criterion at (xi, beta):
///   slack_i = (d_i - beta) xi_i - sum_j [ G_j |a*_ij| + F_j e^(beta tau*_ij) kappa_ij(beta) ] xi_j.
/// Positive in every row means the certificate holds.
std::vector<double> criterion_slacks(const BoundsSummary& bounds,
                                     const std::vector<double>& xi, double beta);

/// Decides feasibility at a fixed rate: feasible iff rho(B(beta)) < 1, in
/// which case xi = (I - B)^\{-1\} 1 is strictly positive; the witness is
/// max-normalized and re-verified by direct substitution before return.
/// Returns std::nullopt when infeasible.
std::optional<StabilityCertificate> certify_at_beta(const BoundsSummary& bounds, double beta);

/// Largest certifiable rate: bisection on [0, beta_cap) with
/// beta_cap = min(min_i d_i, min kernel decay). Returns the certificate at the
/// largest feasible beta found, |beta - beta_sup| <= tol, or std::nullopt when
/// the criterion already fails at beta = 0.
std::optional<StabilityCertificate> maximize_beta(const BoundsSummary& bounds, double tol = 1e-6);

/// Boundedness slack at rate 0 and the ultimate bound 2 I-hat / eta it yields
/// for a given weight vector: every solution's weighted running max settles
/// under max{M(0), bound}. Throws std::invalid_argument on nonpositive xi.
UltimateBound ultimate_bound(const BoundsSummary& bounds, const std::vector<double>& xi);

/// Sampled audit of the pointwise form of the criterion: instantaneous
/// d_i(t), |a_ij(t)| and the time-t kernel envelope at every grid point.
/// This is a check on a grid, not a proof; the certificate's claim rests on
/// the sup-bound form.
PointwiseReport check_pointwise_criterion(const NetworkModel& model,
                                          const StabilityCertificate& cert,
                                          const TimeGrid& grid = {});

/// Independent feasibility search: maximizes the minimum row slack over the
/// positive unit box by iterated grid refinement (the slack minimum is concave
/// in xi, so refinement around the running best converges to the box optimum).
/// Restricted to n <= 4.
BruteForceResult brute_force_feasibility(const BoundsSummary& bounds, double beta,
                                         int resolution = 12);

}  // namespace apstab
