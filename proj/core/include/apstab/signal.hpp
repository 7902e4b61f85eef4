#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace apstab {

/// One sinusoidal term of a quasi-periodic signal: amplitude * sin(angular_frequency * t + phase).
struct SignalTerm {
    double amplitude = 0.0;
    double angular_frequency = 1.0;  // rad/time, must be > 0
    double phase = 0.0;              // rad
};

/// Finite trigonometric sum: offset + sum_k amp_k * sin(freq_k * t + phase_k).
///
/// This is the concrete almost-periodic class used for every time-varying
/// coefficient in the network model. The envelope offset +/- sum |amp| brackets
/// the signal for all t; it is tight for a single term and conservative otherwise.
class QuasiPeriodicSignal {
public:
    QuasiPeriodicSignal() = default;
    explicit QuasiPeriodicSignal(double offset, std::vector<SignalTerm> terms = {});

    static QuasiPeriodicSignal constant(double value) { return QuasiPeriodicSignal(value); }

    double value(double t) const;

    /// offset - sum |amp|
    double lower_bound() const;
    /// offset + sum |amp|
    double upper_bound() const;
    /// sup_t |value(t)| estimated from the envelope: max(|lower|, |upper|).
    double sup_abs() const;

    bool is_constant() const { return terms_.empty(); }

    double offset() const { return offset_; }
    const std::vector<SignalTerm>& terms() const { return terms_; }

private:
    double offset_ = 0.0;
    std::vector<SignalTerm> terms_;
};

double eval_signal(const QuasiPeriodicSignal& sig, double t);

/// (lower, upper) envelope of the signal over all t.
std::pair<double, double> signal_bounds(const QuasiPeriodicSignal& sig);

/// Sampling setup for the epsilon-almost-period scan.
struct AlmostPeriodScanConfig {
    double audit_begin = 0.0;   // window of t values the shift defect is audited on
    double audit_end = 100.0;
    int audit_samples = 1024;
    double omega_step = 0.01;   // candidate grid resolution inside the search interval
};

struct AlmostPeriodCandidate {
    double omega = 0.0;
    double defect = 0.0;  // max over signals of sup_t |sig(t+omega) - sig(t)| on the audit window
};

/// Sampled shift defect of a set of signals at a single omega.
double shift_defect(const std::vector<QuasiPeriodicSignal>& sigs, double omega,
                    const AlmostPeriodScanConfig& cfg);

/// Shift defect with early exit once the running max exceeds `cutoff` (scan fast path).
double shift_defect(const std::vector<QuasiPeriodicSignal>& sigs, double omega,
                    const AlmostPeriodScanConfig& cfg, double cutoff);

/// Scans omega over (alpha, alpha + length] on the configured grid and returns
/// every candidate whose sampled shift defect is < epsilon. An empty result
/// means the interval, at this resolution, exposed no epsilon-almost-period.
std::vector<AlmostPeriodCandidate> find_almost_period(
    const std::vector<QuasiPeriodicSignal>& sigs, double epsilon,
    double alpha, double length, const AlmostPeriodScanConfig& cfg = {});

}  // namespace apstab
