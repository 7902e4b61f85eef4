#include "apstab/signal.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace apstab {

QuasiPeriodicSignal::QuasiPeriodicSignal(double offset, std::vector<SignalTerm> terms)
    : offset_(offset), terms_(std::move(terms)) {
    if (!std::isfinite(offset_)) {
        throw std::invalid_argument("signal offset must be finite");
    }
    for (const SignalTerm& term : terms_) {
        if (!std::isfinite(term.amplitude) || !std::isfinite(term.angular_frequency) ||
            !std::isfinite(term.phase)) {
            throw std::invalid_argument("signal term must be finite");
        }
        if (term.angular_frequency <= 0.0) {
            throw std::invalid_argument("signal term angular_frequency must be > 0");
        }
    }
}

double QuasiPeriodicSignal::value(double t) const {
    double v = offset_;
    for (const SignalTerm& term : terms_) {
        v += term.amplitude * std::sin(term.angular_frequency * t + term.phase);
    }
    return v;
}

double QuasiPeriodicSignal::lower_bound() const {
    double span = 0.0;
    for (const SignalTerm& term : terms_) span += std::abs(term.amplitude);
    return offset_ - span;
}

double QuasiPeriodicSignal::upper_bound() const {
    double span = 0.0;
    for (const SignalTerm& term : terms_) span += std::abs(term.amplitude);
    return offset_ + span;
}

double QuasiPeriodicSignal::sup_abs() const {
    return std::max(std::abs(lower_bound()), std::abs(upper_bound()));
}

double eval_signal(const QuasiPeriodicSignal& sig, double t) { return sig.value(t); }

std::pair<double, double> signal_bounds(const QuasiPeriodicSignal& sig) {
    return {sig.lower_bound(), sig.upper_bound()};
}

namespace {

void check_scan_config(const AlmostPeriodScanConfig& cfg) {
    if (cfg.audit_samples < 2) {
        throw std::invalid_argument("almost-period scan needs audit_samples >= 2");
    }
    if (!(cfg.audit_end > cfg.audit_begin)) {
        throw std::invalid_argument("almost-period scan needs audit_end > audit_begin");
    }
    if (!(cfg.omega_step > 0.0)) {
        throw std::invalid_argument("almost-period scan needs omega_step > 0");
    }
}

}  // namespace

double shift_defect(const std::vector<QuasiPeriodicSignal>& sigs, double omega,
                    const AlmostPeriodScanConfig& cfg, double cutoff) {
    check_scan_config(cfg);
    const double dt = (cfg.audit_end - cfg.audit_begin) / (cfg.audit_samples - 1);
    double defect = 0.0;
    for (int k = 0; k < cfg.audit_samples; ++k) {
        const double t = cfg.audit_begin + k * dt;
        for (const QuasiPeriodicSignal& sig : sigs) {
            const double d = std::abs(sig.value(t + omega) - sig.value(t));
            if (d > defect) {
                defect = d;
                if (defect > cutoff) return defect;  // already disqualified
            }
        }
    }
    return defect;
}

double shift_defect(const std::vector<QuasiPeriodicSignal>& sigs, double omega,
                    const AlmostPeriodScanConfig& cfg) {
    return shift_defect(sigs, omega, cfg, std::numeric_limits<double>::infinity());
}

std::vector<AlmostPeriodCandidate> find_almost_period(
    const std::vector<QuasiPeriodicSignal>& sigs, double epsilon,
    double alpha, double length, const AlmostPeriodScanConfig& cfg) {
    check_scan_config(cfg);
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
    if (!(length > 0.0)) throw std::invalid_argument("search interval length must be > 0");

    std::vector<AlmostPeriodCandidate> found;
    const long long count = static_cast<long long>(length / cfg.omega_step + 1e-9);
    for (long long k = 1; k <= count; ++k) {
        const double omega = alpha + k * cfg.omega_step;
        const double defect = shift_defect(sigs, omega, cfg, epsilon);
        if (defect < epsilon) found.push_back({omega, defect});
    }
    return found;
}

}  // namespace apstab
