#include "apstab/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace apstab {

namespace {

void check_beta_domain(const BoundsSummary& bounds, double beta) {
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
    if (!(beta < bounds.min_d_inf())) {
        throw std::invalid_argument("beta must be < min inf d_i");
    }
    if (bounds.n > 0 && !(beta < bounds.min_kernel_decay)) {
        throw std::invalid_argument("beta must be < min kernel decay");
    }
}

/// Row-interaction weights of the criterion at rate beta:
///   w(i, j) = G_j |a*_ij| + F_j e^(beta tau*_ij) kappa_ij(beta).
std::vector<double> interaction_weights(const BoundsSummary& bounds, double beta) {
    const std::size_t n = bounds.n;
    std::vector<double> w(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            w[i * n + j] = bounds.G[j] * bounds.a_sup[i * n + j] +
                           bounds.F[j] * std::exp(beta * bounds.tau_sup[i * n + j]) *
                               bounds.kappa(i, j, beta);
        }
    }
    return w;
}

/// Largest real root of x^3 - c2 x^2 + c1 x - c0 for a nonnegative matrix's
/// characteristic polynomial: Newton from an upper bound of the Perron root,
/// where the polynomial is convex (start >= max row sum >= rho >= trace/3).
double cubic_perron_root(double c2, double c1, double c0, double start) {
    double x = std::max(start, c2 / 3.0 + 1e-9);
    for (int iter = 0; iter < 200; ++iter) {
        const double p = ((x - c2) * x + c1) * x - c0;
        const double dp = (3.0 * x - 2.0 * c2) * x + c1;
        if (dp <= 0.0) break;
        const double dx = p / dp;
        x -= dx;
        if (std::abs(dx) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

double closed_form_radius(const Matrix& m) {
    const std::size_t n = m.n;
    if (n == 1) return std::abs(m(0, 0));
    if (n == 2) {
        const double tr = m(0, 0) + m(1, 1);
        const double disc = (m(0, 0) - m(1, 1)) * (m(0, 0) - m(1, 1)) + 4.0 * m(0, 1) * m(1, 0);
        return 0.5 * (tr + std::sqrt(std::max(disc, 0.0)));
    }
    // n == 3: coefficients of det(xI - m) = x^3 - c2 x^2 + c1 x - c0.
    const double c2 = m(0, 0) + m(1, 1) + m(2, 2);
    const double c1 = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                      m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    const double c0 = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                      m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                      m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    double row_max = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        row_max = std::max(row_max, m(i, 0) + m(i, 1) + m(i, 2));
    }
    return cubic_perron_root(c2, c1, c0, row_max);
}

}  // namespace

ComparisonMatrix build_comparison_matrix(const BoundsSummary& bounds, double beta) {
    check_beta_domain(bounds, beta);
    const std::size_t n = bounds.n;
    ComparisonMatrix cm;
    cm.beta = beta;
    cm.entries = Matrix(n);
    const std::vector<double> w = interaction_weights(bounds, beta);
    for (std::size_t i = 0; i < n; ++i) {
        const double gap = bounds.d_inf[i] - beta;
        for (std::size_t j = 0; j < n; ++j) {
            cm.entries(i, j) = w[i * n + j] / gap;
        }
    }
    return cm;
}

SpectralResult spectral_radius(const Matrix& m, int max_iterations) {
    SpectralResult result;
    const std::size_t n = m.n;
    if (n == 0) {
        result.converged = true;
        return result;
    }
    for (double v : m.a) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw std::invalid_argument("spectral_radius: matrix must be nonnegative and finite");
        }
    }

    // Power iteration on m + I (spectrum shifted by +1, so the Perron root of
    // the shift dominates in magnitude and the iteration cannot cycle).
    std::vector<double> x(n, 1.0);
    std::vector<double> y(n, 0.0);
    for (int iter = 1; iter <= max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = x[i];  // identity shift
            for (std::size_t j = 0; j < n; ++j) acc += m(i, j) * x[j];
            y[i] = acc;
        }
        double ratio_min = std::numeric_limits<double>::infinity();
        double ratio_max = 0.0;
        double y_max = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] / x[i];
            ratio_min = std::min(ratio_min, r);
            ratio_max = std::max(ratio_max, r);
            y_max = std::max(y_max, y[i]);
        }
        result.iterations = iter;
        if (ratio_max - ratio_min <= 1e-12 * ratio_max) {
            // Collatz-Wielandt: ratio_min <= rho(m+I) <= ratio_max for x > 0.
            result.value = 0.5 * (ratio_min + ratio_max) - 1.0;
            result.converged = true;
            return result;
        }
        if (!std::isfinite(y_max) || y_max == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) x[i] = std::max(y[i] / y_max, 1e-300);
    }

    if (n <= 3) {
        result.value = closed_form_radius(m);
        result.converged = true;
        return result;
    }
    // Report the best available estimate without claiming convergence.
    double estimate = 0.0;
    for (std::size_t i = 0; i < n; ++i) estimate = std::max(estimate, y[i] / x[i]);
    result.value = estimate - 1.0;
    result.converged = false;
    return result;
}

std::vector<double> criterion_slacks(const BoundsSummary& bounds,
                                     const std::vector<double>& xi, double beta) {
    check_beta_domain(bounds, beta);
    const std::size_t n = bounds.n;
    if (xi.size() != n) throw std::invalid_argument("criterion_slacks: xi size mismatch");
    const std::vector<double> w = interaction_weights(bounds, beta);
    std::vector<double> slack(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = (bounds.d_inf[i] - beta) * xi[i];
        for (std::size_t j = 0; j < n; ++j) acc -= w[i * n + j] * xi[j];
        slack[i] = acc;
    }
    return slack;
}

std::optional<StabilityCertificate> certify_at_beta(const BoundsSummary& bounds, double beta) {
    const ComparisonMatrix cm = build_comparison_matrix(bounds, beta);
    const std::size_t n = bounds.n;

    SpectralResult sr = spectral_radius(cm.entries);
    if (!sr.converged) {
        // Reducible or cyclic structure can stall the iteration; perturbing
        // every entry by +1e-12 makes the matrix positive (hence primitive)
        // and only increases the Perron root, so the decision stays sound.
        Matrix perturbed = cm.entries;
        for (double& v : perturbed.a) v += 1e-12;
        sr = spectral_radius(perturbed);
        if (!sr.converged) return std::nullopt;  // cannot establish rho < 1
    }
    if (!(sr.value < 1.0)) return std::nullopt;

    // xi = (I - B)^(-1) * 1 > 0 whenever rho(B) < 1.
    Matrix system(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            system(i, j) = (i == j ? 1.0 : 0.0) - cm.entries(i, j);
        }
    }
    std::vector<double> xi;
    try {
        xi = solve_linear(system, std::vector<double>(n, 1.0));
    } catch (const std::runtime_error&) {
        return std::nullopt;  // numerically at the feasibility boundary
    }
    double xi_max = 0.0;
    for (double v : xi) {
        if (!(v > 0.0)) return std::nullopt;  // boundary rounding produced a bad witness
        xi_max = std::max(xi_max, v);
    }
    for (double& v : xi) v /= xi_max;

    // Final soundness gate: direct substitution into the criterion.
    const std::vector<double> slack = criterion_slacks(bounds, xi, beta);
    const double eta = *std::min_element(slack.begin(), slack.end());
    if (!(eta > 0.0)) return std::nullopt;

    StabilityCertificate cert;
    cert.xi = std::move(xi);
    cert.beta = beta;
    cert.eta = eta;
    cert.method = "spectral";
    return cert;
}

std::optional<StabilityCertificate> maximize_beta(const BoundsSummary& bounds, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("maximize_beta: tol must be > 0");
    std::optional<StabilityCertificate> best = certify_at_beta(bounds, 0.0);
    if (!best) return std::nullopt;

    const double cap = std::min(bounds.min_d_inf(), bounds.min_kernel_decay);
    double lo = 0.0;
    double hi = cap;
    for (int iter = 0; iter < 200 && hi - lo > tol; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= cap) break;  // ran out of representable probes
        std::optional<StabilityCertificate> probe = certify_at_beta(bounds, mid);
        if (probe) {
            best = std::move(probe);
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return best;
}

UltimateBound ultimate_bound(const BoundsSummary& bounds, const std::vector<double>& xi) {
    const std::size_t n = bounds.n;
    if (xi.size() != n) throw std::invalid_argument("ultimate_bound: xi size mismatch");
    for (double v : xi) {
        if (!(v > 0.0)) throw std::invalid_argument("ultimate_bound: xi must be positive");
    }
    const std::vector<double> slack = criterion_slacks(bounds, xi, 0.0);
    UltimateBound result;
    result.eta = *std::min_element(slack.begin(), slack.end());
    if (result.eta > 0.0) result.bound = 2.0 * bounds.i_hat / result.eta;
    return result;
}

PointwiseReport check_pointwise_criterion(const NetworkModel& model,
                                          const StabilityCertificate& cert,
                                          const TimeGrid& grid) {
    model.check_dimensions();
    const std::size_t n = model.n;
    if (cert.xi.size() != n) {
        throw std::invalid_argument("check_pointwise_criterion: certificate dimension mismatch");
    }
    if (grid.samples < 1 || !(grid.end >= grid.begin)) {
        throw std::invalid_argument("check_pointwise_criterion: bad time grid");
    }

    PointwiseReport report;
    report.min_slack = std::numeric_limits<double>::infinity();
    report.samples = grid.samples;
    const double dt = grid.samples > 1 ? (grid.end - grid.begin) / (grid.samples - 1) : 0.0;
    for (int k = 0; k < grid.samples; ++k) {
        const double t = grid.begin + k * dt;
        for (std::size_t i = 0; i < n; ++i) {
            double slack = (model.d[i].value(t) - cert.beta) * cert.xi[i];
            for (std::size_t j = 0; j < n; ++j) {
                const double w =
                    model.g_spec[j].lipschitz_bound * std::abs(model.a_at(i, j).value(t)) +
                    model.f_spec[j].lipschitz_bound *
                        std::exp(cert.beta * model.tau_at(i, j).value(t)) *
                        kernel_moment_at(model.kernel_at(i, j), t, cert.beta);
                slack -= w * cert.xi[j];
            }
            if (slack < report.min_slack) {
                report.min_slack = slack;
                report.t_at_min = t;
                report.row_at_min = i;
            }
        }
    }
    return report;
}

BruteForceResult brute_force_feasibility(const BoundsSummary& bounds, double beta,
                                         int resolution) {
    check_beta_domain(bounds, beta);
    const std::size_t n = bounds.n;
    if (n > 4) throw std::invalid_argument("brute_force_feasibility: n must be <= 4");
    if (resolution < 2) throw std::invalid_argument("brute_force_feasibility: resolution >= 2");

    const std::vector<double> w = interaction_weights(bounds, beta);
    const auto min_slack = [&](const std::vector<double>& xi) {
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double acc = (bounds.d_inf[i] - beta) * xi[i];
            for (std::size_t j = 0; j < n; ++j) acc -= w[i * n + j] * xi[j];
            worst = std::min(worst, acc);
        }
        return worst;
    };

    // Iterated grid refinement over the positive unit box. The minimum row
    // slack is concave in xi, so shrinking the box around the running best
    // converges to the box maximizer.
    std::vector<double> lo(n, 1.0 / resolution);
    std::vector<double> hi(n, 1.0);
    std::vector<double> best_xi(n, 1.0);
    double best = min_slack(best_xi);

    std::vector<int> index(n, 0);
    std::vector<double> xi(n, 0.0);
    for (int round = 0; round < 8; ++round) {
        std::fill(index.begin(), index.end(), 0);
        while (true) {
            for (std::size_t i = 0; i < n; ++i) {
                xi[i] = lo[i] + (hi[i] - lo[i]) * index[i] / (resolution - 1);
            }
            const double s = min_slack(xi);
            if (s > best) {
                best = s;
                best_xi = xi;
            }
            std::size_t carry = 0;
            while (carry < n && ++index[carry] == resolution) {
                index[carry] = 0;
                ++carry;
            }
            if (carry == n) break;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double spacing = (hi[i] - lo[i]) / (resolution - 1);
            lo[i] = std::max(best_xi[i] - spacing, 1e-6);
            hi[i] = std::min(best_xi[i] + spacing, 1.0);
        }
    }

    const double xi_max = *std::max_element(best_xi.begin(), best_xi.end());
    for (double& v : best_xi) v /= xi_max;

    BruteForceResult result;
    result.best_slack = min_slack(best_xi);
    result.feasible = result.best_slack > 0.0;
    result.xi = std::move(best_xi);
    return result;
}

}  // namespace apstab
