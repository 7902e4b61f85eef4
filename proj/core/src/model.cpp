#include "apstab/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace apstab {

void NetworkModel::check_dimensions() const {
    if (n == 0) throw std::invalid_argument("model dimension n must be >= 1");
    const auto expect = [&](std::size_t got, std::size_t want, const char* what) {
        if (got != want) {
            std::ostringstream msg;
            msg << "model field " << what << " has " << got << " entries, expected " << want;
            throw std::invalid_argument(msg.str());
        }
    };
    expect(d.size(), n, "d");
    expect(a.size(), n * n, "a");
    expect(kernels.size(), n * n, "kernels");
    expect(tau.size(), n * n, "tau");
    expect(inputs.size(), n, "inputs");
    expect(g_spec.size(), n, "activations.g");
    expect(f_spec.size(), n, "activations.f");
    expect(history.dimension(), n, "history");
}

bool NetworkModel::is_constant_coefficient() const {
    for (const QuasiPeriodicSignal& sig : coefficient_signals()) {
        if (!sig.is_constant()) return false;
    }
    return true;
}

std::vector<QuasiPeriodicSignal> NetworkModel::coefficient_signals() const {
    std::vector<QuasiPeriodicSignal> sigs;
    sigs.insert(sigs.end(), d.begin(), d.end());
    sigs.insert(sigs.end(), a.begin(), a.end());
    sigs.insert(sigs.end(), tau.begin(), tau.end());
    sigs.insert(sigs.end(), inputs.begin(), inputs.end());
    for (const DelayKernel& kernel : kernels) {
        for (const KernelAtom& atom : kernel.atoms) sigs.push_back(atom.weight);
        for (const KernelDensity& density : kernel.densities) sigs.push_back(density.coefficient);
    }
    return sigs;
}

double BoundsSummary::kappa(std::size_t i, std::size_t j, double beta) const {
    return kernel_moment(kernels[i * n + j], beta);
}

double BoundsSummary::min_d_inf() const {
    double m = std::numeric_limits<double>::infinity();
    for (double v : d_inf) m = std::min(m, v);
    return m;
}

BoundsSummary derive_bounds(const NetworkModel& model) {
    model.check_dimensions();
    const std::size_t n = model.n;
    BoundsSummary bounds;
    bounds.n = n;
    bounds.d_inf.resize(n);
    bounds.a_sup.resize(n * n);
    bounds.tau_sup.resize(n * n);
    bounds.b_sup.resize(n * n);
    bounds.G.resize(n);
    bounds.F.resize(n);
    bounds.g_offset.resize(n);
    bounds.f_offset.resize(n);
    bounds.input_sup.resize(n);
    bounds.kernels = model.kernels;

    for (std::size_t i = 0; i < n; ++i) {
        bounds.d_inf[i] = model.d[i].lower_bound();
        if (!(bounds.d_inf[i] > 0.0)) {
            std::ostringstream msg;
            msg << "self-inhibition d[" << i << "] must stay positive; envelope lower bound is "
                << bounds.d_inf[i];
            throw std::invalid_argument(msg.str());
        }
        bounds.G[i] = model.g_spec[i].lipschitz_bound;
        bounds.F[i] = model.f_spec[i].lipschitz_bound;
        bounds.g_offset[i] = std::abs(model.g_spec[i].eval(0.0));
        bounds.f_offset[i] = std::abs(model.f_spec[i].eval(0.0));
        bounds.input_sup[i] = model.inputs[i].sup_abs();
    }
    for (std::size_t k = 0; k < n * n; ++k) {
        bounds.a_sup[k] = model.a[k].sup_abs();
        bounds.tau_sup[k] = model.tau[k].upper_bound();
        bounds.b_sup[k] = kernel_moment(model.kernels[k], 0.0);
    }

    double min_decay = std::numeric_limits<double>::infinity();
    for (const DelayKernel& kernel : model.kernels) {
        min_decay = std::min(min_decay, kernel.min_decay());
    }
    bounds.min_kernel_decay = min_decay;

    double i_hat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = bounds.input_sup[i];
        for (std::size_t j = 0; j < n; ++j) {
            row += bounds.a_sup[i * n + j] * bounds.g_offset[j] +
                   bounds.b_sup[i * n + j] * bounds.f_offset[j];
        }
        i_hat = std::max(i_hat, row);
    }
    bounds.i_hat = i_hat;
    return bounds;
}

namespace {

void check_common_sizes(std::size_t n, const std::vector<QuasiPeriodicSignal>& a,
                        const std::vector<QuasiPeriodicSignal>& b,
                        const std::vector<QuasiPeriodicSignal>& tau,
                        const std::vector<QuasiPeriodicSignal>& inputs,
                        const std::vector<ActivationSpec>& g_spec,
                        const std::vector<ActivationSpec>& f_spec) {
    if (n == 0) throw std::invalid_argument("model dimension n must be >= 1");
    if (a.size() != n * n) throw std::invalid_argument("a must have n*n entries");
    if (b.size() != n * n) throw std::invalid_argument("b must have n*n entries");
    if (tau.size() != n * n) throw std::invalid_argument("tau must have n*n entries");
    if (inputs.size() != n) throw std::invalid_argument("inputs must have n entries");
    if (g_spec.size() != n) throw std::invalid_argument("g_spec must have n entries");
    if (f_spec.size() != n) throw std::invalid_argument("f_spec must have n entries");
    for (std::size_t k = 0; k < n * n; ++k) {
        if (tau[k].lower_bound() < 0.0) {
            std::ostringstream msg;
            msg << "tau[" << k / n << "][" << k % n << "] must be nonnegative for all t";
            throw std::invalid_argument(msg.str());
        }
    }
}

}  // namespace

NetworkModel from_discrete_delays(std::vector<QuasiPeriodicSignal> d,
                                  std::vector<QuasiPeriodicSignal> a,
                                  std::vector<QuasiPeriodicSignal> b,
                                  std::vector<QuasiPeriodicSignal> tau,
                                  std::vector<QuasiPeriodicSignal> inputs,
                                  std::vector<ActivationSpec> g_spec,
                                  std::vector<ActivationSpec> f_spec,
                                  HistoryFunction history) {
    const std::size_t n = d.size();
    check_common_sizes(n, a, b, tau, inputs, g_spec, f_spec);
    NetworkModel model;
    model.n = n;
    model.d = std::move(d);
    model.a = std::move(a);
    model.kernels.resize(n * n);
    for (std::size_t k = 0; k < n * n; ++k) {
        model.kernels[k].atoms.push_back({0.0, b[k]});
    }
    model.tau = std::move(tau);
    model.inputs = std::move(inputs);
    model.g_spec = std::move(g_spec);
    model.f_spec = std::move(f_spec);
    model.history = std::move(history);
    model.check_dimensions();
    return model;
}

NetworkModel from_distributed_delays(std::vector<QuasiPeriodicSignal> d,
                                     std::vector<QuasiPeriodicSignal> a,
                                     std::vector<QuasiPeriodicSignal> b,
                                     std::vector<DistributedKernelParams> k_params,
                                     std::vector<QuasiPeriodicSignal> tau,
                                     std::vector<QuasiPeriodicSignal> inputs,
                                     std::vector<ActivationSpec> g_spec,
                                     std::vector<ActivationSpec> f_spec,
                                     HistoryFunction history) {
    const std::size_t n = d.size();
    check_common_sizes(n, a, b, tau, inputs, g_spec, f_spec);
    if (k_params.size() != n * n) throw std::invalid_argument("k_params must have n*n entries");
    NetworkModel model;
    model.n = n;
    model.d = std::move(d);
    model.a = std::move(a);
    model.kernels.resize(n * n);
    for (std::size_t k = 0; k < n * n; ++k) {
        const DistributedKernelParams& params = k_params[k];
        if (!(params.decay > 0.0)) {
            throw std::invalid_argument("distributed kernel decay must be > 0");
        }
        if (params.poly_degree < 0) {
            throw std::invalid_argument("distributed kernel poly_degree must be >= 0");
        }
        KernelDensity density;
        density.coefficient = b[k];
        density.scale = params.scale;
        density.poly_degree = params.poly_degree;
        density.decay = params.decay;
        model.kernels[k].densities.push_back(std::move(density));
    }
    model.tau = std::move(tau);
    model.inputs = std::move(inputs);
    model.g_spec = std::move(g_spec);
    model.f_spec = std::move(f_spec);
    model.history = std::move(history);
    model.check_dimensions();
    return model;
}

bool AssumptionReport::passed() const {
    return std::all_of(items.begin(), items.end(),
                       [](const AssumptionItem& item) { return item.passed; });
}

std::string AssumptionReport::summary() const {
    std::ostringstream out;
    for (const AssumptionItem& item : items) {
        out << "item " << item.id << ": " << (item.passed ? "PASS" : "FAIL") << " — "
            << item.description;
        if (!item.detail.empty()) out << " (" << item.detail << ")";
        out << '\n';
    }
    return out.str();
}

AssumptionReport validate_assumptions(const NetworkModel& model, const ActivationGrid& grid) {
    model.check_dimensions();
    AssumptionReport report;
    const std::size_t n = model.n;

    {  // 1. activations honor their declared bounds; g must also be monotone
        AssumptionItem item{1, "activations stay within their Lipschitz bounds (g monotone)", true, ""};
        std::ostringstream detail;
        for (std::size_t i = 0; i < n; ++i) {
            ActivationSpec g = model.g_spec[i];
            g.requires_monotone = true;  // first activation family is monotone by definition
            const ActivationReport rg = validate_activation(g, grid);
            if (!rg.passed()) {
                item.passed = false;
                detail << "g[" << i << "] worst quotient " << rg.worst_quotient << " on ["
                       << rg.worst_pair_x0 << ", " << rg.worst_pair_x1 << "]"
                       << (rg.monotone_ok ? "" : ", not monotone") << "; ";
            }
            const ActivationReport rf = validate_activation(model.f_spec[i], grid);
            if (!rf.passed()) {
                item.passed = false;
                detail << "f[" << i << "] worst quotient " << rf.worst_quotient << "; ";
            }
        }
        item.detail = detail.str();
        report.items.push_back(std::move(item));
    }
    {  // 2. inf d_i > 0 and tau >= 0
        AssumptionItem item{2, "self-inhibition stays positive, delays stay nonnegative", true, ""};
        std::ostringstream detail;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(model.d[i].lower_bound() > 0.0)) {
                item.passed = false;
                detail << "inf d[" << i << "] = " << model.d[i].lower_bound() << "; ";
            }
        }
        for (std::size_t k = 0; k < n * n; ++k) {
            if (model.tau[k].lower_bound() < 0.0) {
                item.passed = false;
                detail << "inf tau[" << k / n << "][" << k % n << "] = "
                       << model.tau[k].lower_bound() << "; ";
            }
        }
        item.detail = detail.str();
        report.items.push_back(std::move(item));
    }
    {  // 3. kernel measures well-formed
        AssumptionItem item{3, "delay kernels well-formed (lags >= 0, decays > 0)", true, ""};
        std::ostringstream detail;
        for (std::size_t k = 0; k < n * n; ++k) {
            const DelayKernel& kernel = model.kernels[k];
            for (const KernelAtom& atom : kernel.atoms) {
                if (atom.lag < 0.0) {
                    item.passed = false;
                    detail << "kernel[" << k / n << "][" << k % n << "] atom lag " << atom.lag
                           << "; ";
                }
            }
            for (const KernelDensity& density : kernel.densities) {
                if (!(density.decay > 0.0) || density.poly_degree < 0) {
                    item.passed = false;
                    detail << "kernel[" << k / n << "][" << k % n << "] density decay "
                           << density.decay << ", degree " << density.poly_degree << "; ";
                }
            }
        }
        item.detail = detail.str();
        report.items.push_back(std::move(item));
    }
    {  // 4. coefficients almost periodic — guaranteed by the signal class
        report.items.push_back(
            {4, "coefficients almost periodic", true, "finite trigonometric sums by construction"});
    }
    {  // 5. exponentially weighted kernel moments finite at a positive probe rate
        AssumptionItem item{5, "kernel moments finite at a positive probe rate", true, ""};
        double min_decay = std::numeric_limits<double>::infinity();
        for (const DelayKernel& kernel : model.kernels) {
            min_decay = std::min(min_decay, kernel.min_decay());
        }
        const double probe = std::isfinite(min_decay) ? 0.5 * min_decay : 1.0;
        std::ostringstream detail;
        if (!(probe > 0.0)) {
            item.passed = false;
            detail << "no positive probe rate exists (min decay " << min_decay << ")";
        } else {
            double worst = 0.0;
            bool ok = true;
            for (const DelayKernel& kernel : model.kernels) {
                try {
                    worst = std::max(worst, kernel_moment(kernel, probe));
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (!ok) {
                item.passed = false;
                detail << "moment diverges at probe rate " << probe;
            } else {
                detail << "max moment " << worst << " at probe rate " << probe;
            }
        }
        item.detail = detail.str();
        report.items.push_back(std::move(item));
    }
    return report;
}

}  // namespace apstab
