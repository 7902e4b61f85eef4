#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "apstab/activation.hpp"
#include "apstab/history.hpp"
#include "apstab/kernel.hpp"
#include "apstab/signal.hpp"

namespace apstab {

/// The delayed network
///   u_i' = -d_i(t) u_i + sum_j a_ij(t) g_j(u_j)
///          + sum_j integral_0^inf f_j(u_j(t - tau_ij(t) - s)) dK_ij(t, s) + I_i(t)
/// with initial history u(s) = phi(s) on (-inf, 0].
///
/// Fields are laid out row-major: a[i*n + j], kernels[i*n + j], tau[i*n + j].
/// Direct aggregate construction is open (the assumption validator reports on
/// whatever it is given); the from_* factories reject inconsistent input.
struct NetworkModel {
    std::size_t n = 0;
    std::vector<QuasiPeriodicSignal> d;        // n self-inhibitions
    std::vector<QuasiPeriodicSignal> a;        // n*n instantaneous weights
    std::vector<DelayKernel> kernels;          // n*n delay measures
    std::vector<QuasiPeriodicSignal> tau;      // n*n discrete delays
    std::vector<QuasiPeriodicSignal> inputs;   // n external inputs
    std::vector<ActivationSpec> g_spec;        // n, monotone Lipschitz activations
    std::vector<ActivationSpec> f_spec;        // n, Lipschitz activations
    HistoryFunction history;
    std::string name = "model";

    const QuasiPeriodicSignal& a_at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
    const DelayKernel& kernel_at(std::size_t i, std::size_t j) const { return kernels[i * n + j]; }
    const QuasiPeriodicSignal& tau_at(std::size_t i, std::size_t j) const { return tau[i * n + j]; }

    /// Throws std::invalid_argument when any array size disagrees with n.
    void check_dimensions() const;

    /// True when every coefficient signal is constant (no sinusoidal terms).
    bool is_constant_coefficient() const;

    /// All coefficient signals, in a fixed order (d, a, tau, inputs, kernel
    /// weights and density coefficients). Input to the almost-period scan.
    std::vector<QuasiPeriodicSignal> coefficient_signals() const;
};

/// Scalar bounds the certificate criterion consumes. kappa(i, j, beta) is the
/// exponentially weighted moment of kernel (i, j)'s envelope.
struct BoundsSummary {
    std::size_t n = 0;
    std::vector<double> d_inf;        // inf_t d_i(t), all > 0
    std::vector<double> a_sup;        // n*n, sup_t |a_ij(t)|
    std::vector<double> tau_sup;      // n*n, sup_t tau_ij(t)
    std::vector<double> b_sup;        // n*n, kappa_ij(0) = sup_t total kernel mass
    std::vector<double> G;            // Lipschitz bounds of g
    std::vector<double> F;            // Lipschitz bounds of f
    std::vector<double> g_offset;     // |g_j(0)|
    std::vector<double> f_offset;     // |f_j(0)|
    std::vector<double> input_sup;    // |I*_i|
    std::vector<DelayKernel> kernels; // copies for kappa evaluation
    double i_hat = 0.0;               // max_i { |I*_i| + sum_j [ a_sup |g_j(0)| + b_sup |f_j(0)| ] }
    double min_kernel_decay = 0.0;    // +infinity when no densities anywhere

    double kappa(std::size_t i, std::size_t j, double beta) const;
    double min_d_inf() const;
};

/// Envelope bounds for every coefficient plus the input aggregate I-hat.
/// Throws std::invalid_argument when some inf_t d_i(t) <= 0.
BoundsSummary derive_bounds(const NetworkModel& model);

/// BUILDER for discrete delays: every kernel is a single atom at lag 0 with
/// weight b_ij(t), so the delayed term is b_ij(t) f_j(u_j(t - tau_ij(t))).
NetworkModel from_discrete_delays(std::vector<QuasiPeriodicSignal> d,
                                  std::vector<QuasiPeriodicSignal> a,
                                  std::vector<QuasiPeriodicSignal> b,
                                  std::vector<QuasiPeriodicSignal> tau,
                                  std::vector<QuasiPeriodicSignal> inputs,
                                  std::vector<ActivationSpec> g_spec,
                                  std::vector<ActivationSpec> f_spec,
                                  HistoryFunction history);

/// Parameters of one distributed-delay density b_ij(t) k_ij(s) ds with
/// k(s) = scale * s^degree * e^(-decay s).
struct DistributedKernelParams {
    double scale = 1.0;
    int poly_degree = 0;
    double decay = 1.0;  // > 0
};

/// BUILDER for distributed delays: every kernel is a single density with
/// coefficient b_ij(t). Rejects nonpositive decay.
NetworkModel from_distributed_delays(std::vector<QuasiPeriodicSignal> d,
                                     std::vector<QuasiPeriodicSignal> a,
                                     std::vector<QuasiPeriodicSignal> b,
                                     std::vector<DistributedKernelParams> k_params,
                                     std::vector<QuasiPeriodicSignal> tau,
                                     std::vector<QuasiPeriodicSignal> inputs,
                                     std::vector<ActivationSpec> g_spec,
                                     std::vector<ActivationSpec> f_spec,
                                     HistoryFunction history);

struct AssumptionItem {
    int id = 0;
    std::string description;
    bool passed = true;
    std::string detail;
};

struct AssumptionReport {
    std::vector<AssumptionItem> items;
    bool passed() const;
    std::string summary() const;
};

/// Checks the standing model assumptions:
///   1. activations honor their declared Lipschitz bounds (g additionally monotone),
///   2. inf d_i > 0 and inf tau_ij >= 0,
///   3. kernel measures well-formed (holds by construction; flagged if a decay <= 0),
///   4. coefficients almost periodic (holds by construction of the signal class),
///   5. exponentially weighted kernel moments finite at a small probe beta > 0.
/// Failures are carried in the report, not thrown.
AssumptionReport validate_assumptions(const NetworkModel& model,
                                      const ActivationGrid& grid = {});

}  // namespace apstab
