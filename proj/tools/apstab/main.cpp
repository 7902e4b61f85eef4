// apstab: certify / simulate / analyze / demo for delayed network models.
//
// Exit codes: 0 success, 1 input error, 2 criterion infeasible,
//             3 simulation blow-up, 4 analysis assertion failure.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "apstab/analysis.hpp"
#include "apstab/certificate.hpp"
#include "apstab/csv.hpp"
#include "apstab/integrator.hpp"
#include "apstab/json_io.hpp"
#include "apstab/model.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace apstab;

namespace {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kInfeasible = 2,
    kBlowup = 3,
    kAssertionFailure = 4,
};

int log_level() {
    static const int level = [] {
        const char* env = std::getenv("APSTAB_LOG");
        if (!env) return 1;
        const std::string v(env);
        if (v == "quiet" || v == "0") return 0;
        if (v == "debug" || v == "2") return 2;
        return 1;
    }();
    return level;
}

void info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[apstab] " << msg << "\n";
}

void debug(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[apstab:debug] " << msg << "\n";
}

struct RunSpec {
    std::string model_path;
    std::string out_dir = ".";
    double step = 0.01;
    double horizon = 10.0;
    int stride = 1;
    std::optional<long long> seed;
    double epsilon = 0.1;
    double rate_factor = 0.9;
    double bisect_tol = 1e-6;
};

SimConfig sim_config(const RunSpec& spec) {
    SimConfig cfg;
    cfg.step = spec.step;
    cfg.horizon = spec.horizon;
    cfg.record_stride = spec.stride;
    return cfg;
}

/// Deterministic seeded history: components uniform in [-1, 1] from the
/// standardized mt19937_64 stream (the bit-mapping avoids the
/// implementation-defined std::uniform_real_distribution).
HistoryFunction seeded_history(std::size_t n, long long seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::vector<double> values(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
        values[i] = 2.0 * unit - 1.0;
    }
    return HistoryFunction::constant(std::move(values));
}

std::string model_stem(const RunSpec& spec) {
    return fs::path(spec.model_path).stem().string();
}

std::string run_stem(const RunSpec& spec) {
    std::string stem = model_stem(spec);
    if (spec.seed) stem += ".seed" + std::to_string(*spec.seed);
    return stem;
}

void ensure_out_dir(const RunSpec& spec) {
    if (!spec.out_dir.empty()) fs::create_directories(spec.out_dir);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << text;
}

NetworkModel load_and_validate(const RunSpec& spec) {
    NetworkModel model = load_model(spec.model_path);
    const AssumptionReport report = validate_assumptions(model);
    if (!report.passed()) {
        std::ostringstream msg;
        msg << "model fails the standing assumptions:\n" << report.summary();
        throw std::invalid_argument(msg.str());
    }
    return model;
}

// ---------------------------------------------------------------------------
// certify

int cmd_certify(const RunSpec& spec) {
    ensure_out_dir(spec);
    NetworkModel model;
    BoundsSummary bounds;
    try {
        model = load_and_validate(spec);
        bounds = derive_bounds(model);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    info("certifying " + model.name);

    const fs::path cert_path = fs::path(spec.out_dir) / (model_stem(spec) + ".certificate.json");
    std::optional<StabilityCertificate> cert = maximize_beta(bounds, spec.bisect_tol);
    if (!cert) {
        const ComparisonMatrix cm = build_comparison_matrix(bounds, 0.0);
        const SpectralResult sr = spectral_radius(cm.entries);
        json j;
        j["feasible"] = false;
        j["rho_at_zero"] = sr.value;
        write_text(cert_path, j.dump(2) + "\n");
        std::cout << "infeasible: comparison-matrix spectral radius at rate 0 is " << sr.value
                  << " (need < 1)\n";
        return kInfeasible;
    }

    const PointwiseReport pointwise = check_pointwise_criterion(model, *cert);
    cert->pointwise_checked = true;
    cert->pointwise_min_slack = pointwise.min_slack;
    const UltimateBound ub = ultimate_bound(bounds, cert->xi);

    write_text(cert_path, certificate_to_text(*cert));

    std::cout << "feasible: beta = " << cert->beta << ", eta = " << cert->eta << "\n";
    std::cout << "  xi = [";
    for (std::size_t i = 0; i < cert->xi.size(); ++i) {
        std::cout << (i ? ", " : "") << cert->xi[i];
    }
    std::cout << "]\n";
    std::cout << "  pointwise min slack " << pointwise.min_slack << " at t = " << pointwise.t_at_min
              << " (row " << pointwise.row_at_min << ", " << pointwise.samples << " samples)\n";
    if (ub.bound) {
        std::cout << "  ultimate bound 2*I/eta = " << *ub.bound << " (eta_0 = " << ub.eta
                  << ")\n";
    }
    std::cout << "  wrote " << cert_path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const RunSpec& spec) {
    ensure_out_dir(spec);
    NetworkModel model;
    try {
        model = load_and_validate(spec);
        if (spec.seed) model.history = seeded_history(model.n, *spec.seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    SimConfig cfg = sim_config(spec);
    SimPlan plan;
    try {
        plan = plan_simulation(model, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    const std::string stem = run_stem(spec);
    const fs::path csv_path = fs::path(spec.out_dir) / (stem + ".trajectory.csv");
    const fs::path run_path = fs::path(spec.out_dir) / (stem + ".run.json");

    json meta;
    meta["model"] = model.name;
    meta["command"] = "simulate";
    meta["step"] = cfg.step;
    meta["horizon"] = cfg.horizon;
    meta["record_stride"] = cfg.record_stride;
    if (spec.seed) meta["seed"] = *spec.seed;
    meta["s_max"] = plan.max_s_max;
    meta["tail_bound"] = plan.tail_bound;
    meta["history_depth"] = plan.t_hist;

    info("integrating " + stem + " to t = " + std::to_string(cfg.horizon));
    Trajectory traj;
    try {
        traj = integrate(model, cfg);
    } catch (const BlowupError& e) {
        meta["status"] = "blowup";
        meta["blowup_time"] = e.time();
        meta["detail"] = e.what();
        write_text(run_path, meta.dump(2) + "\n");
        std::cerr << "blow-up: " << e.what() << "\n";
        return kBlowup;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    meta["status"] = "ok";
    meta["rows"] = traj.times.size();
    write_trajectory_csv(traj, csv_path.string());
    write_text(run_path, meta.dump(2) + "\n");
    std::cout << "wrote " << csv_path.string() << " (" << traj.times.size() << " rows) and "
              << run_path.string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// analyze

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("missing input: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

int cmd_analyze(const RunSpec& spec) {
    ensure_out_dir(spec);
    NetworkModel model;
    BoundsSummary bounds;
    StabilityCertificate cert;
    Trajectory traj_a;
    Trajectory traj_b;
    const long long seed = spec.seed.value_or(1);
    const std::string stem = model_stem(spec);
    const fs::path out_dir(spec.out_dir);
    try {
        model = load_and_validate(spec);
        bounds = derive_bounds(model);
        cert = certificate_from_text(read_file(out_dir / (stem + ".certificate.json")));
        if (cert.xi.size() != model.n) {
            throw std::invalid_argument("certificate dimension does not match the model");
        }
        traj_a = read_trajectory_csv(
            (out_dir / (stem + ".seed" + std::to_string(seed) + ".trajectory.csv")).string());
        traj_b = read_trajectory_csv(
            (out_dir / (stem + ".seed" + std::to_string(seed + 1) + ".trajectory.csv")).string());
        if (traj_a.n != model.n || traj_b.n != model.n) {
            throw std::invalid_argument("trajectory dimension does not match the model");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }

    json report;
    report["model"] = model.name;
    report["certificate"] = {{"beta", cert.beta}, {"eta", cert.eta}, {"xi", cert.xi}};
    bool all_passed = true;

    // Certified decay of the pairwise distance, fitted in the log domain.
    const DistanceSeries distance = trajectory_distance(traj_a, traj_b, cert.xi);
    write_distance_csv(distance, (out_dir / (stem + ".distance.csv")).string());
    const double t_end = distance.times.empty() ? 0.0 : distance.times.back();

    const double noise_floor = 1e-10;
    double usable_end = 0.0;
    for (std::size_t r = 0; r < distance.times.size(); ++r) {
        if (distance.values[r] > 100.0 * noise_floor) usable_end = distance.times[r];
    }
    const double window_end = std::min(0.75 * t_end, usable_end);
    const double window_begin = 0.5 * window_end;
    json decay_json;
    if (window_end > 0.0) {
        const DecayReport decay =
            fit_exponential_rate(distance, window_begin, window_end, noise_floor);
        decay_json["rate"] = decay.rate;
        decay_json["intercept"] = decay.intercept;
        decay_json["r_squared"] = decay.r_squared;
        decay_json["window"] = {decay.window_begin, decay.window_end};
        decay_json["points_used"] = decay.points_used;
        decay_json["sufficient_data"] = decay.sufficient_data;
        if (decay.sufficient_data) {
            const bool rate_ok =
                decay.rate >= spec.rate_factor * cert.beta && decay.r_squared >= 0.99;
            decay_json["assert"] = {{"threshold_rate", spec.rate_factor * cert.beta},
                                    {"threshold_r_squared", 0.99},
                                    {"passed", rate_ok}};
            all_passed = all_passed && rate_ok;
        } else {
            decay_json["assert"] = "skipped: fewer than 5 usable points";
        }
    } else {
        decay_json["assert"] = "skipped: distance at the noise floor everywhere";
    }
    report["decay"] = std::move(decay_json);

    // Ultimate boundedness against the 2*I/eta envelope at rate 0.
    const UltimateBound ub = ultimate_bound(bounds, cert.xi);
    report["ultimate_bound"] = {{"eta", ub.eta}, {"i_hat", bounds.i_hat}};
    if (ub.bound) {
        const double tolerance = 10.0 * traj_a.dt + 1e-12;
        const BoundednessReport bb =
            boundedness_check(traj_a, cert.xi, bounds.i_hat, ub.eta, tolerance);
        report["ultimate_bound"]["bound"] = *ub.bound;
        report["ultimate_bound"]["m0"] = bb.m0;
        report["ultimate_bound"]["worst_margin"] = bb.worst_margin;
        report["ultimate_bound"]["passed"] = bb.passed;
        all_passed = all_passed && bb.passed;
    }

    // Almost-period scan over the coefficient signals, defects on trajectory a.
    json ap;
    ap["epsilon"] = spec.epsilon;
    const double scan_begin = 0.5;
    const double scan_length = 200.0;
    ap["scan_interval"] = {scan_begin, scan_begin + scan_length};
    const std::vector<QuasiPeriodicSignal> sigs = model.coefficient_signals();
    std::vector<AlmostPeriodCandidate> candidates =
        find_almost_period(sigs, spec.epsilon, scan_begin, scan_length);
    ap["candidate_count"] = candidates.size();
    ap["note"] = "trajectory defects are an empirical envelope, not a certified gain";
    std::sort(candidates.begin(), candidates.end(),
              [](const AlmostPeriodCandidate& x, const AlmostPeriodCandidate& y) {
                  return x.defect < y.defect;
              });
    json cand_json = json::array();
    const double defect_begin = 0.15 * t_end;
    const double defect_end = 0.25 * t_end;
    std::vector<char> taken(candidates.size(), 0);
    // Trajectory defects for the best shifts that still fit inside the record.
    std::size_t evaluated = 0;
    for (std::size_t i = 0; i < candidates.size() && evaluated < 3; ++i) {
        const AlmostPeriodCandidate& cand = candidates[i];
        if (defect_end <= defect_begin || defect_end + cand.omega > t_end + 1e-9) continue;
        json c;
        c["omega"] = cand.omega;
        c["signal_defect"] = cand.defect;
        c["trajectory_defect"] =
            almost_period_defect(traj_a, cand.omega, defect_begin, defect_end, cert.xi);
        cand_json.push_back(std::move(c));
        taken[i] = 1;
        ++evaluated;
    }
    for (std::size_t i = 0; i < candidates.size() && cand_json.size() < 8; ++i) {
        if (taken[i]) continue;
        cand_json.push_back(
            json{{"omega", candidates[i].omega}, {"signal_defect", candidates[i].defect}});
    }
    ap["candidates"] = std::move(cand_json);
    report["almost_period"] = std::move(ap);

    // Constant-coefficient models settle onto the algebraic fixed point.
    if (model.is_constant_coefficient()) {
        const EquilibriumResult eq = solve_equilibrium(model);
        json ej;
        ej["u"] = eq.u;
        ej["algebraic_residual"] = eq.residual;
        ej["converged"] = eq.converged;
        double dist = 0.0;
        const std::size_t last = traj_a.times.size() - 1;
        for (std::size_t i = 0; i < model.n; ++i) {
            dist = std::max(dist, std::abs(traj_a.state(last, i) - eq.u[i]));
        }
        ej["distance_at_horizon"] = dist;
        if (cert.beta * t_end >= 20.0) {
            const bool eq_ok = dist < 1e-6;
            ej["assert"] = {{"threshold", 1e-6}, {"passed", eq_ok}};
            all_passed = all_passed && eq_ok;
        } else {
            ej["assert"] = "skipped: horizon too short for the certified rate";
        }
        report["equilibrium"] = std::move(ej);
    }

    report["assertions_passed"] = all_passed;
    const fs::path report_path = out_dir / (stem + ".report.json");
    write_text(report_path, report.dump(2) + "\n");
    std::cout << (all_passed ? "analysis passed" : "analysis FAILED") << "; wrote "
              << report_path.string() << "\n";
    return all_passed ? kOk : kAssertionFailure;
}

// ---------------------------------------------------------------------------
// demo

QuasiPeriodicSignal constant(double v) { return QuasiPeriodicSignal::constant(v); }

QuasiPeriodicSignal wave(double offset, double amp, double freq, double phase = 0.0) {
    return QuasiPeriodicSignal(offset, {{amp, freq, phase}});
}

NetworkModel demo_constant_model() {
    // Scalar system with a distributed delay; settles onto the root of
    // 2u - tanh(u) = 1.
    std::vector<DistributedKernelParams> kp{{2.0, 0, 2.0}};  // 2 e^(-2s)
    return from_distributed_delays(
        {constant(2.0)}, {constant(0.5)}, {constant(0.5)}, kp, {constant(0.0)},
        {constant(1.0)}, {ActivationSpec::tanh_unit()}, {ActivationSpec::tanh_unit(false)},
        HistoryFunction::constant({0.0}));
}

NetworkModel demo_periodic_model() {
    // All coefficients share the angular frequency 1, so 2*pi is a period.
    const std::size_t n = 2;
    std::vector<QuasiPeriodicSignal> d{constant(2.0), constant(2.0)};
    std::vector<QuasiPeriodicSignal> a{wave(0.3, 0.1, 1.0), constant(0.1),
                                       constant(0.1), wave(0.3, 0.1, 1.0)};
    std::vector<QuasiPeriodicSignal> b{wave(0.3, 0.1, 1.0, 1.5707963267948966), constant(0.05),
                                       constant(0.05), wave(0.3, 0.1, 1.0, 1.5707963267948966)};
    std::vector<QuasiPeriodicSignal> tau(n * n, wave(0.3, 0.2, 1.0));
    std::vector<QuasiPeriodicSignal> inputs{wave(0.0, 0.5, 1.0), wave(0.0, 0.5, 1.0, 0.7)};
    return from_discrete_delays(d, a, b, tau, inputs,
                                {ActivationSpec::tanh_unit(), ActivationSpec::tanh_unit()},
                                {ActivationSpec::tanh_unit(false), ActivationSpec::tanh_unit(false)},
                                HistoryFunction::constant({0.5, -0.5}));
}

NetworkModel demo_quasiperiodic_model() {
    // Input frequencies 1 and sqrt(2) are incommensurate: the forcing is
    // almost periodic but not periodic.
    const std::size_t n = 2;
    const double root2 = 1.4142135623730951;
    std::vector<QuasiPeriodicSignal> d{constant(2.0), constant(2.0)};
    std::vector<QuasiPeriodicSignal> a{wave(0.25, 0.05, 1.0), constant(0.05),
                                       constant(0.05), wave(0.25, 0.05, 1.0)};
    std::vector<QuasiPeriodicSignal> b{wave(0.25, 0.05, root2), constant(0.05),
                                       constant(0.05), wave(0.25, 0.05, root2)};
    std::vector<QuasiPeriodicSignal> tau(n * n, constant(0.2));
    QuasiPeriodicSignal drive(0.0, {{0.3, 1.0, 0.0}, {0.3, root2, 0.0}});
    std::vector<QuasiPeriodicSignal> inputs{drive, drive};
    return from_discrete_delays(d, a, b, tau, inputs,
                                {ActivationSpec::tanh_unit(), ActivationSpec::tanh_unit()},
                                {ActivationSpec::tanh_unit(false), ActivationSpec::tanh_unit(false)},
                                HistoryFunction::constant({0.5, -0.5}));
}

int cmd_demo(const RunSpec& spec) {
    ensure_out_dir(spec);
    struct DemoEntry {
        const char* name;
        NetworkModel model;
        double horizon;
    };
    std::vector<DemoEntry> demos;
    demos.push_back({"demo_constant", demo_constant_model(), 30.0});
    demos.push_back({"demo_periodic", demo_periodic_model(), 40.0});
    demos.push_back({"demo_quasiperiodic", demo_quasiperiodic_model(), 110.0});

    const long long seed = spec.seed.value_or(1);
    for (DemoEntry& demo : demos) {
        const fs::path model_path = fs::path(spec.out_dir) / (std::string(demo.name) + ".json");
        save_model(demo.model, model_path.string());
        std::cout << "== " << demo.name << " ==\n";

        RunSpec sub = spec;
        sub.model_path = model_path.string();
        sub.horizon = demo.horizon;
        sub.seed.reset();
        if (int rc = cmd_certify(sub); rc != kOk) return rc;
        sub.seed = seed;
        if (int rc = cmd_simulate(sub); rc != kOk) return rc;
        sub.seed = seed + 1;
        if (int rc = cmd_simulate(sub); rc != kOk) return rc;
        sub.seed = seed;
        if (int rc = cmd_analyze(sub); rc != kOk) return rc;
    }
    std::cout << "demo complete: certificates, trajectories and reports in " << spec.out_dir
              << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability certificates and simulation for delayed network models"};
    app.require_subcommand(1);

    RunSpec spec;
    const auto add_common = [&spec](CLI::App* cmd, bool needs_model) {
        CLI::Option* model = cmd->add_option("--model", spec.model_path, "model JSON file");
        if (needs_model) model->required();
        cmd->add_option("--out", spec.out_dir, "output directory (created if absent)");
        cmd->add_option("--step", spec.step, "integration step h");
        cmd->add_option("--horizon", spec.horizon, "integration horizon T");
        cmd->add_option("--stride", spec.stride, "record every stride-th step");
        cmd->add_option("--seed", spec.seed, "seed for the randomized constant history");
        cmd->add_option("--epsilon", spec.epsilon, "almost-period tolerance for the scan");
        cmd->add_option("--rate-factor", spec.rate_factor,
                        "decay assertion: fitted rate >= factor * beta");
        cmd->add_option("--tol", spec.bisect_tol, "bisection tolerance on the certified rate");
    };

    CLI::App* certify = app.add_subcommand("certify", "compute a stability certificate");
    add_common(certify, true);
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the model");
    add_common(simulate, true);
    CLI::App* analyze = app.add_subcommand("analyze", "check simulations against a certificate");
    add_common(analyze, true);
    CLI::App* demo = app.add_subcommand("demo", "write and exercise the three built-in models");
    add_common(demo, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (certify->parsed()) return cmd_certify(spec);
        if (simulate->parsed()) return cmd_simulate(spec);
        if (analyze->parsed()) return cmd_analyze(spec);
        if (demo->parsed()) return cmd_demo(spec);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
