#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "apstab/csv.hpp"
#include "apstab/json_io.hpp"
#include "doctest.h"

using namespace apstab;

namespace {

const char* kScalarModel = R"({
  "n": 1,
  "d": [2.0],
  "a": [[0.5]],
  "kernels": [[{"atoms": [{"lag": 0.0, "weight": 0.5}]}]],
  "tau": [[0.0]],
  "inputs": [1.0],
  "activations": {"g": [{"kind": "tanh"}], "f": [{"kind": "tanh"}]},
  "history": {"kind": "constant", "values": [0.0]}
})";

std::string scratch_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "apstab_io_tests";
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("minimal model text parses with defaults applied") {
    const NetworkModel m = parse_model_text(kScalarModel, "demo");
    CHECK(m.n == 1);
    CHECK(m.name == "demo");
    CHECK(m.d[0].value(3.0) == 2.0);
    CHECK(m.a_at(0, 0).value(0.0) == 0.5);
    REQUIRE(m.kernel_at(0, 0).atoms.size() == 1);
    CHECK(m.kernel_at(0, 0).atoms[0].weight.value(0.0) == 0.5);
    CHECK(m.inputs[0].value(0.0) == 1.0);
    // Activation defaults: unit bound; g monotone, f not.
    CHECK(m.g_spec[0].lipschitz_bound == 1.0);
    CHECK(m.g_spec[0].requires_monotone);
    CHECK(!m.f_spec[0].requires_monotone);
    CHECK(m.history.kind == HistoryKind::Constant);
    CHECK(m.history.window == 1.0);
    CHECK(validate_assumptions(m).passed());
}

TEST_CASE("signals parse from bare numbers or offset-terms objects") {
    const std::string text = R"({
      "n": 1,
      "d": [{"offset": 2.0, "terms": [{"amp": 0.5, "freq": 1.0, "phase": 0.25}]}],
      "a": [[{"offset": 0.1}]],
      "kernels": [[{}]],
      "tau": [[0.0]],
      "inputs": [{"terms": [{"amp": 1.0, "freq": 2.0}]}],
      "activations": {"g": [{"kind": "tanh"}], "f": [{"kind": "tanh"}]},
      "history": {"kind": "constant", "values": [0.0]}
    })";
    const NetworkModel m = parse_model_text(text, "sig");
    CHECK(m.d[0].value(0.0) == doctest::Approx(2.0 + 0.5 * std::sin(0.25)));
    CHECK(m.d[0].terms()[0].phase == 0.25);
    CHECK(m.a_at(0, 0).value(5.0) == doctest::Approx(0.1));
    CHECK(m.inputs[0].terms()[0].phase == 0.0);  // default phase
    CHECK(m.kernel_at(0, 0).empty());
}

TEST_CASE("parse failures name the offending field path") {
    const auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_model_text(text, "bad");
            FAIL("expected parse failure touching " << needle);
        } catch (const std::invalid_argument& e) {
            const std::string what = e.what();
            CHECK(what.find(needle) != std::string::npos);
        }
    };

    expect_error(R"({"d": []})", "model.n");
    expect_error(R"({"n": 0})", "model.n");
    expect_error(R"({"n": 1})", "model.d");

    std::string bad_lambda = kScalarModel;
    const std::string atoms = R"("kernels": [[{"atoms": [{"lag": 0.0, "weight": 0.5}]}]])";
    bad_lambda.replace(bad_lambda.find(atoms), atoms.size(),
                       R"("kernels": [[{"densities": [{"coefficient": 1.0, "p": 1.0, "q": 0, "lambda": 0.0}]}]])");
    expect_error(bad_lambda, "model.kernels[0][0].densities[0].lambda");

    std::string bad_tau = kScalarModel;
    const std::string tau = R"("tau": [[0.0]])";
    bad_tau.replace(bad_tau.find(tau), tau.size(), R"("tau": [[-0.5]])");
    expect_error(bad_tau, "model.tau[0][0]");

    std::string bad_kind = kScalarModel;
    const std::string g = R"("g": [{"kind": "tanh"}])";
    bad_kind.replace(bad_kind.find(g), g.size(), R"("g": [{"kind": "gaussian"}])");
    expect_error(bad_kind, "model.activations.g[0]");

    std::string bad_freq = kScalarModel;
    const std::string inputs = R"("inputs": [1.0])";
    bad_freq.replace(bad_freq.find(inputs), inputs.size(),
                     R"("inputs": [{"terms": [{"amp": 1.0, "freq": -2.0}]}])");
    expect_error(bad_freq, "model.inputs[0].terms[0].freq");

    std::string bad_hist = kScalarModel;
    const std::string hist = R"("history": {"kind": "constant", "values": [0.0]})";
    bad_hist.replace(bad_hist.find(hist), hist.size(),
                     R"("history": {"kind": "table", "times": [-1.0, 0.5], "rows": [[0.0], [0.0]]})");
    expect_error(bad_hist, "model.history.times");

    expect_error("{ not json", "malformed");
    expect_error(R"([1, 2, 3])", "expected a JSON object");
}

TEST_CASE("activation parsing applies declared and defaulted bounds") {
    const std::string text = R"({
      "n": 3,
      "d": [1.0, 1.0, 1.0],
      "a": [[0,0,0],[0,0,0],[0,0,0]],
      "kernels": [[{},{},{}],[{},{},{}],[{},{},{}]],
      "tau": [[0,0,0],[0,0,0],[0,0,0]],
      "inputs": [0, 0, 0],
      "activations": {
        "g": [{"kind": "linear", "slope": -2.0},
              {"kind": "table", "x": [-1.0, 0.0, 1.0], "y": [0.0, 0.5, 0.6]},
              {"kind": "tanh", "lipschitz": 0.7, "monotone": false}],
        "f": [{"kind": "piecewise_linear"},
              {"kind": "linear", "slope": 0.5, "lipschitz": 2.0},
              {"kind": "tanh"}]
      },
      "history": {"kind": "constant", "values": [0, 0, 0]}
    })";
    const NetworkModel m = parse_model_text(text, "acts");
    // Linear: default bound is |slope|.
    CHECK(m.g_spec[0].kind == ActivationKind::Linear);
    CHECK(m.g_spec[0].lipschitz_bound == 2.0);
    // Table: default bound is the steepest segment slope.
    CHECK(m.g_spec[1].kind == ActivationKind::CustomTable);
    CHECK(m.g_spec[1].lipschitz_bound == doctest::Approx(0.5).epsilon(1e-12));
    // Explicit fields override the defaults.
    CHECK(m.g_spec[2].lipschitz_bound == 0.7);
    CHECK(!m.g_spec[2].requires_monotone);
    CHECK(m.f_spec[0].kind == ActivationKind::PiecewiseLinearSaturating);
    CHECK(m.f_spec[0].lipschitz_bound == 1.0);
    CHECK(m.f_spec[1].lipschitz_bound == 2.0);
}

TEST_CASE("history variants parse and evaluate") {
    const std::string text = R"({
      "n": 2,
      "d": [1.0, 1.0],
      "a": [[0,0],[0,0]],
      "kernels": [[{},{}],[{},{}]],
      "tau": [[0,0],[0,0]],
      "inputs": [0, 0],
      "activations": {"g": [{"kind": "tanh"}, {"kind": "tanh"}],
                      "f": [{"kind": "tanh"}, {"kind": "tanh"}]},
      "history": {"kind": "table", "times": [-2.0, -1.0, 0.0],
                  "rows": [[0.0, 1.0], [1.0, 0.5], [2.0, 0.0]], "window": 2.0}
    })";
    const NetworkModel m = parse_model_text(text, "hist");
    CHECK(m.history.kind == HistoryKind::Table);
    CHECK(m.history.eval(0.0)[0] == 2.0);
    CHECK(m.history.eval(-1.5)[0] == doctest::Approx(0.5));  // linear interpolation
    CHECK(m.history.eval(-5.0)[0] == 0.0);                   // clamped at the window edge
    CHECK(m.history.eval(-1.0)[1] == 0.5);

    const std::string sig_text = R"({
      "n": 1,
      "d": [1.0],
      "a": [[0]],
      "kernels": [[{}]],
      "tau": [[0]],
      "inputs": [0],
      "activations": {"g": [{"kind": "tanh"}], "f": [{"kind": "tanh"}]},
      "history": {"kind": "signal", "signals": [{"offset": 0.5, "terms": [{"amp": 1.0, "freq": 1.0}]}]}
    })";
    const NetworkModel sig = parse_model_text(sig_text, "sighist");
    CHECK(sig.history.kind == HistoryKind::Signal);
    CHECK(sig.history.eval(-1.0)[0] == doctest::Approx(0.5 + std::sin(-1.0)));
}

TEST_CASE("model serialization round-trips semantically and is idempotent") {
    const std::string dir = scratch_dir();
    NetworkModel m = parse_model_text(kScalarModel, "roundtrip");
    m.d[0] = QuasiPeriodicSignal(2.0, {{0.3, 1.0, 0.25}});

    const std::string text1 = model_to_text(m);
    const NetworkModel back = parse_model_text(text1, "roundtrip");
    const std::string text2 = model_to_text(back);
    CHECK(text1 == text2);  // normal form is stable

    // Semantics preserved: bounds and sampled values coincide exactly.
    const BoundsSummary b1 = derive_bounds(m);
    const BoundsSummary b2 = derive_bounds(back);
    CHECK(b1.d_inf == b2.d_inf);
    CHECK(b1.a_sup == b2.a_sup);
    CHECK(b1.b_sup == b2.b_sup);
    CHECK(b1.i_hat == b2.i_hat);
    for (double t = -1.0; t <= 1.0; t += 0.25) {
        CHECK(m.d[0].value(t) == back.d[0].value(t));
    }

    // File round trip via save/load; the stem becomes the model name.
    const std::string path = dir + "/saved_model.json";
    save_model(m, path);
    const NetworkModel loaded = load_model(path);
    CHECK(loaded.name == "saved_model");
    CHECK(model_to_text(loaded) == text1);
    CHECK_THROWS_AS(load_model(dir + "/does_not_exist.json"), std::runtime_error);
    std::remove(path.c_str());
}

TEST_CASE("certificate serialization round-trips and rejects bad records") {
    StabilityCertificate cert;
    cert.xi = {1.0, 0.5};
    cert.beta = 0.25;
    cert.eta = 0.125;
    cert.method = "spectral";
    cert.pointwise_checked = true;
    cert.pointwise_min_slack = 0.1;

    const std::string text = certificate_to_text(cert);
    const StabilityCertificate back = certificate_from_text(text);
    CHECK(back.xi == cert.xi);
    CHECK(back.beta == cert.beta);
    CHECK(back.eta == cert.eta);
    CHECK(back.method == cert.method);
    CHECK(back.pointwise_checked);
    REQUIRE(back.pointwise_min_slack.has_value());
    CHECK(*back.pointwise_min_slack == 0.1);

    cert.pointwise_min_slack.reset();
    cert.pointwise_checked = false;
    const StabilityCertificate plain = certificate_from_text(certificate_to_text(cert));
    CHECK(!plain.pointwise_min_slack.has_value());

    CHECK_THROWS_AS(certificate_from_text(R"({"feasible": false, "rho_at_zero": 2.0})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(certificate_from_text(R"({"xi": [1.0, -0.5], "beta": 0.1, "eta": 0.1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(certificate_from_text(R"({"xi": [1.0], "eta": 0.1})"), std::invalid_argument);
    CHECK_THROWS_AS(certificate_from_text("nope"), std::invalid_argument);
}

TEST_CASE("trajectory CSV round-trips bit-exactly") {
    const std::string dir = scratch_dir();
    Trajectory traj;
    traj.n = 2;
    traj.dt = 0.1;
    traj.model_tag = "anything";
    for (int k = 0; k <= 20; ++k) {
        const double t = 0.1 * k;
        traj.times.push_back(t);
        traj.states.push_back(std::sin(t) * 1.0e-7);
        traj.states.push_back(std::cos(3.0 * t) * 12345.678);
        traj.derivs.push_back(std::cos(t));
        traj.derivs.push_back(-3.0 * std::sin(3.0 * t));
    }
    const std::string path = dir + "/roundtrip_traj.csv";
    write_trajectory_csv(traj, path);

    const Trajectory back = read_trajectory_csv(path);
    CHECK(back.n == 2);
    CHECK(back.times == traj.times);
    CHECK(back.states == traj.states);
    CHECK(back.derivs == traj.derivs);
    CHECK(back.dt == doctest::Approx(0.1));
    CHECK(back.model_tag == "roundtrip_traj");

    // Header is pinned.
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,u_1,u_2,du_1,du_2");
    std::remove(path.c_str());
}

TEST_CASE("trajectory CSV rejects malformed files") {
    const std::string dir = scratch_dir();
    const std::string bad_header = dir + "/bad_header.csv";
    {
        std::ofstream out(bad_header);
        out << "time,u_1,du_1\n0,1,1\n";
    }
    CHECK_THROWS_AS(read_trajectory_csv(bad_header), std::runtime_error);

    const std::string bad_row = dir + "/bad_row.csv";
    {
        std::ofstream out(bad_row);
        out << "t,u_1,du_1\n0.0,1.0\n";
    }
    CHECK_THROWS_AS(read_trajectory_csv(bad_row), std::runtime_error);

    CHECK_THROWS_AS(read_trajectory_csv(dir + "/missing.csv"), std::runtime_error);
    std::remove(bad_header.c_str());
    std::remove(bad_row.c_str());
}

TEST_CASE("distance CSV lists one row per sample") {
    const std::string dir = scratch_dir();
    DistanceSeries series;
    series.times = {0.0, 0.5, 1.0};
    series.values = {1.0, 0.5, 0.25};
    const std::string path = dir + "/distance_series.csv";
    write_distance_csv(series, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,distance");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == 3);
    std::remove(path.c_str());
}
