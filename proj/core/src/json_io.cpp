#include "apstab/json_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace apstab {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument(path + ": " + what);
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double field_number(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    return as_number(j.at(key), path + "." + key);
}

const json& field_array(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key)) fail(path + "." + key, "missing required field");
    const json& v = j.at(key);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    return v;
}

QuasiPeriodicSignal parse_signal(const json& j, const std::string& path) {
    if (j.is_number()) return QuasiPeriodicSignal(j.get<double>());
    if (!j.is_object()) fail(path, "expected a number or an {offset, terms} object");
    double offset = 0.0;
    if (j.contains("offset")) offset = as_number(j.at("offset"), path + ".offset");
    std::vector<SignalTerm> terms;
    if (j.contains("terms")) {
        const json& arr = j.at("terms");
        if (!arr.is_array()) fail(path + ".terms", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string tp = path + ".terms[" + std::to_string(k) + "]";
            const json& term = arr[k];
            if (!term.is_object()) fail(tp, "expected an object");
            SignalTerm st;
            st.amplitude = field_number(term, "amp", tp);
            st.angular_frequency = field_number(term, "freq", tp);
            if (!(st.angular_frequency > 0.0)) fail(tp + ".freq", "must be > 0");
            st.phase = term.contains("phase") ? as_number(term.at("phase"), tp + ".phase") : 0.0;
            terms.push_back(st);
        }
    }
    try {
        return QuasiPeriodicSignal(offset, std::move(terms));
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

DelayKernel parse_kernel(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an {atoms, densities} object");
    DelayKernel kernel;
    if (j.contains("atoms")) {
        const json& arr = j.at("atoms");
        if (!arr.is_array()) fail(path + ".atoms", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string ap = path + ".atoms[" + std::to_string(k) + "]";
            const json& atom = arr[k];
            if (!atom.is_object()) fail(ap, "expected an object");
            KernelAtom out;
            out.lag = field_number(atom, "lag", ap);
            if (out.lag < 0.0) fail(ap + ".lag", "must be >= 0");
            if (!atom.contains("weight")) fail(ap + ".weight", "missing required field");
            out.weight = parse_signal(atom.at("weight"), ap + ".weight");
            kernel.atoms.push_back(std::move(out));
        }
    }
    if (j.contains("densities")) {
        const json& arr = j.at("densities");
        if (!arr.is_array()) fail(path + ".densities", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string dp = path + ".densities[" + std::to_string(k) + "]";
            const json& density = arr[k];
            if (!density.is_object()) fail(dp, "expected an object");
            KernelDensity out;
            if (!density.contains("coefficient")) fail(dp + ".coefficient", "missing required field");
            out.coefficient = parse_signal(density.at("coefficient"), dp + ".coefficient");
            out.scale = field_number(density, "p", dp);
            const double q = field_number(density, "q", dp);
            if (q < 0.0 || q != std::floor(q)) fail(dp + ".q", "must be a nonnegative integer");
            out.poly_degree = static_cast<int>(q);
            out.decay = field_number(density, "lambda", dp);
            if (!(out.decay > 0.0)) fail(dp + ".lambda", "must be > 0");
            kernel.densities.push_back(std::move(out));
        }
    }
    return kernel;
}

ActivationSpec parse_activation(const json& j, const std::string& path, bool default_monotone) {
    if (!j.is_object()) fail(path, "expected an activation object");
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        fail(path + ".kind", "missing or non-string activation kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    ActivationSpec spec;
    spec.requires_monotone = default_monotone;
    if (kind == "tanh") {
        spec.kind = ActivationKind::HyperbolicTangent;
        spec.lipschitz_bound = 1.0;
    } else if (kind == "piecewise_linear") {
        spec.kind = ActivationKind::PiecewiseLinearSaturating;
        spec.lipschitz_bound = 1.0;
    } else if (kind == "linear") {
        spec.kind = ActivationKind::Linear;
        spec.slope = field_number(j, "slope", path);
        spec.lipschitz_bound = std::abs(spec.slope);
    } else if (kind == "table") {
        spec.kind = ActivationKind::CustomTable;
        const json& xs = field_array(j, "x", path);
        const json& ys = field_array(j, "y", path);
        if (xs.size() != ys.size() || xs.size() < 2) {
            fail(path, "table needs matching x/y arrays with at least 2 samples");
        }
        for (std::size_t k = 0; k < xs.size(); ++k) {
            spec.table_x.push_back(as_number(xs[k], path + ".x[" + std::to_string(k) + "]"));
            spec.table_y.push_back(as_number(ys[k], path + ".y[" + std::to_string(k) + "]"));
            if (k > 0 && !(spec.table_x[k] > spec.table_x[k - 1])) {
                fail(path + ".x", "samples must be strictly increasing");
            }
        }
        double worst = 0.0;
        for (std::size_t k = 1; k < spec.table_x.size(); ++k) {
            worst = std::max(worst, std::abs(spec.table_y[k] - spec.table_y[k - 1]) /
                                        (spec.table_x[k] - spec.table_x[k - 1]));
        }
        spec.lipschitz_bound = worst;
    } else {
        fail(path + ".kind", "unknown activation kind '" + kind + "'");
    }
    if (j.contains("lipschitz")) {
        spec.lipschitz_bound = as_number(j.at("lipschitz"), path + ".lipschitz");
    }
    if (!(spec.lipschitz_bound > 0.0)) fail(path + ".lipschitz", "must be > 0");
    if (j.contains("monotone")) {
        if (!j.at("monotone").is_boolean()) fail(path + ".monotone", "expected a boolean");
        spec.requires_monotone = j.at("monotone").get<bool>();
    }
    return spec;
}

HistoryFunction parse_history(const json& j, const std::string& path, std::size_t n) {
    if (!j.is_object()) fail(path, "expected a history object");
    if (!j.contains("kind") || !j.at("kind").is_string()) {
        fail(path + ".kind", "missing or non-string history kind");
    }
    const std::string kind = j.at("kind").get<std::string>();
    HistoryFunction hist;
    if (kind == "constant") {
        hist.kind = HistoryKind::Constant;
        const json& values = field_array(j, "values", path);
        for (std::size_t k = 0; k < values.size(); ++k) {
            hist.values.push_back(as_number(values[k], path + ".values[" + std::to_string(k) + "]"));
        }
        if (hist.values.size() != n) fail(path + ".values", "expected n entries");
    } else if (kind == "signal") {
        hist.kind = HistoryKind::Signal;
        const json& signals = field_array(j, "signals", path);
        for (std::size_t k = 0; k < signals.size(); ++k) {
            hist.signals.push_back(
                parse_signal(signals[k], path + ".signals[" + std::to_string(k) + "]"));
        }
        if (hist.signals.size() != n) fail(path + ".signals", "expected n entries");
        hist.window = 1e9;  // signals evaluate everywhere; clamp far out by default
    } else if (kind == "table") {
        hist.kind = HistoryKind::Table;
        const json& times = field_array(j, "times", path);
        const json& rows = field_array(j, "rows", path);
        if (times.empty() || times.size() != rows.size()) {
            fail(path, "table needs matching nonempty times/rows arrays");
        }
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double t = as_number(times[k], path + ".times[" + std::to_string(k) + "]");
            if (t > 0.0) fail(path + ".times", "history samples must lie at t <= 0");
            if (k > 0 && !(t > hist.table_times.back())) {
                fail(path + ".times", "samples must be strictly increasing");
            }
            hist.table_times.push_back(t);
            const json& row = rows[k];
            if (!row.is_array() || row.size() != n) {
                fail(path + ".rows[" + std::to_string(k) + "]", "expected n entries");
            }
            std::vector<double> state;
            for (std::size_t i = 0; i < n; ++i) {
                state.push_back(as_number(row[i], path + ".rows[" + std::to_string(k) + "][" +
                                                      std::to_string(i) + "]"));
            }
            hist.table_rows.push_back(std::move(state));
        }
        hist.window = std::max(1.0, -hist.table_times.front());
    } else {
        fail(path + ".kind", "unknown history kind '" + kind + "'");
    }
    if (j.contains("window")) {
        hist.window = as_number(j.at("window"), path + ".window");
        if (!(hist.window > 0.0)) fail(path + ".window", "must be > 0");
    }
    return hist;
}

std::vector<QuasiPeriodicSignal> parse_signal_matrix(const json& j, const std::string& path,
                                                     std::size_t n) {
    if (!j.is_array() || j.size() != n) fail(path, "expected n rows");
    std::vector<QuasiPeriodicSignal> out;
    out.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        if (!row.is_array() || row.size() != n) {
            fail(path + "[" + std::to_string(i) + "]", "expected n entries");
        }
        for (std::size_t k = 0; k < n; ++k) {
            out.push_back(parse_signal(
                row[k], path + "[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
        }
    }
    return out;
}

json signal_to_json(const QuasiPeriodicSignal& sig) {
    json j;
    j["offset"] = sig.offset();
    json terms = json::array();
    for (const SignalTerm& term : sig.terms()) {
        terms.push_back({{"amp", term.amplitude},
                         {"freq", term.angular_frequency},
                         {"phase", term.phase}});
    }
    j["terms"] = std::move(terms);
    return j;
}

json kernel_to_json(const DelayKernel& kernel) {
    json atoms = json::array();
    for (const KernelAtom& atom : kernel.atoms) {
        atoms.push_back({{"lag", atom.lag}, {"weight", signal_to_json(atom.weight)}});
    }
    json densities = json::array();
    for (const KernelDensity& density : kernel.densities) {
        densities.push_back({{"coefficient", signal_to_json(density.coefficient)},
                             {"p", density.scale},
                             {"q", density.poly_degree},
                             {"lambda", density.decay}});
    }
    return {{"atoms", std::move(atoms)}, {"densities", std::move(densities)}};
}

json activation_to_json(const ActivationSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind);
    if (spec.kind == ActivationKind::Linear) j["slope"] = spec.slope;
    if (spec.kind == ActivationKind::CustomTable) {
        j["x"] = spec.table_x;
        j["y"] = spec.table_y;
    }
    j["lipschitz"] = spec.lipschitz_bound;
    j["monotone"] = spec.requires_monotone;
    return j;
}

json history_to_json(const HistoryFunction& hist) {
    json j;
    switch (hist.kind) {
        case HistoryKind::Constant:
            j["kind"] = "constant";
            j["values"] = hist.values;
            break;
        case HistoryKind::Signal: {
            j["kind"] = "signal";
            json signals = json::array();
            for (const QuasiPeriodicSignal& sig : hist.signals) {
                signals.push_back(signal_to_json(sig));
            }
            j["signals"] = std::move(signals);
            break;
        }
        case HistoryKind::Table:
            j["kind"] = "table";
            j["times"] = hist.table_times;
            j["rows"] = hist.table_rows;
            break;
    }
    j["window"] = hist.window;
    return j;
}

}  // namespace

NetworkModel parse_model_text(const std::string& text, const std::string& name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("model JSON is malformed: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("model: expected a JSON object");
    if (!j.contains("n")) throw std::invalid_argument("model.n: missing required field");
    if (!j.at("n").is_number_integer() || j.at("n").get<long long>() < 1) {
        throw std::invalid_argument("model.n: must be a positive integer");
    }
    const std::size_t n = j.at("n").get<std::size_t>();

    NetworkModel model;
    model.n = n;
    model.name = name;

    const json& d = field_array(j, "d", "model");
    if (d.size() != n) fail("model.d", "expected n entries");
    for (std::size_t i = 0; i < n; ++i) {
        model.d.push_back(parse_signal(d[i], "model.d[" + std::to_string(i) + "]"));
    }
    model.a = parse_signal_matrix(field_array(j, "a", "model"), "model.a", n);

    const json& kernels = field_array(j, "kernels", "model");
    if (kernels.size() != n) fail("model.kernels", "expected n rows");
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = kernels[i];
        if (!row.is_array() || row.size() != n) {
            fail("model.kernels[" + std::to_string(i) + "]", "expected n entries");
        }
        for (std::size_t k = 0; k < n; ++k) {
            model.kernels.push_back(parse_kernel(
                row[k], "model.kernels[" + std::to_string(i) + "][" + std::to_string(k) + "]"));
        }
    }

    model.tau = parse_signal_matrix(field_array(j, "tau", "model"), "model.tau", n);
    for (std::size_t k = 0; k < n * n; ++k) {
        if (model.tau[k].lower_bound() < 0.0) {
            fail("model.tau[" + std::to_string(k / n) + "][" + std::to_string(k % n) + "]",
                 "must be nonnegative for all t");
        }
    }

    const json& inputs = field_array(j, "inputs", "model");
    if (inputs.size() != n) fail("model.inputs", "expected n entries");
    for (std::size_t i = 0; i < n; ++i) {
        model.inputs.push_back(parse_signal(inputs[i], "model.inputs[" + std::to_string(i) + "]"));
    }

    if (!j.contains("activations") || !j.at("activations").is_object()) {
        throw std::invalid_argument("model.activations: missing required object");
    }
    const json& acts = j.at("activations");
    const json& g = field_array(acts, "g", "model.activations");
    const json& f = field_array(acts, "f", "model.activations");
    if (g.size() != n) fail("model.activations.g", "expected n entries");
    if (f.size() != n) fail("model.activations.f", "expected n entries");
    for (std::size_t i = 0; i < n; ++i) {
        model.g_spec.push_back(
            parse_activation(g[i], "model.activations.g[" + std::to_string(i) + "]", true));
        model.f_spec.push_back(
            parse_activation(f[i], "model.activations.f[" + std::to_string(i) + "]", false));
    }

    if (!j.contains("history")) throw std::invalid_argument("model.history: missing required field");
    model.history = parse_history(j.at("history"), "model.history", n);

    model.check_dimensions();
    return model;
}

NetworkModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_model_text(buffer.str(), std::filesystem::path(path).stem().string());
}

std::string model_to_text(const NetworkModel& model) {
    model.check_dimensions();
    const std::size_t n = model.n;
    json j;
    j["n"] = n;
    json d = json::array();
    for (const QuasiPeriodicSignal& sig : model.d) d.push_back(signal_to_json(sig));
    j["d"] = std::move(d);

    const auto matrix = [&](const std::vector<QuasiPeriodicSignal>& sigs) {
        json rows = json::array();
        for (std::size_t i = 0; i < n; ++i) {
            json row = json::array();
            for (std::size_t k = 0; k < n; ++k) row.push_back(signal_to_json(sigs[i * n + k]));
            rows.push_back(std::move(row));
        }
        return rows;
    };
    j["a"] = matrix(model.a);

    json kernel_rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < n; ++k) row.push_back(kernel_to_json(model.kernels[i * n + k]));
        kernel_rows.push_back(std::move(row));
    }
    j["kernels"] = std::move(kernel_rows);
    j["tau"] = matrix(model.tau);

    json inputs = json::array();
    for (const QuasiPeriodicSignal& sig : model.inputs) inputs.push_back(signal_to_json(sig));
    j["inputs"] = std::move(inputs);

    json g = json::array();
    json f = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        g.push_back(activation_to_json(model.g_spec[i]));
        f.push_back(activation_to_json(model.f_spec[i]));
    }
    j["activations"] = {{"g", std::move(g)}, {"f", std::move(f)}};
    j["history"] = history_to_json(model.history);
    return j.dump(2) + "\n";
}

void save_model(const NetworkModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_text(model);
}

std::string certificate_to_text(const StabilityCertificate& cert) {
    json j;
    j["feasible"] = true;
    j["xi"] = cert.xi;
    j["beta"] = cert.beta;
    j["eta"] = cert.eta;
    j["method"] = cert.method;
    j["pointwise_checked"] = cert.pointwise_checked;
    if (cert.pointwise_min_slack) {
        j["pointwise_min_slack"] = *cert.pointwise_min_slack;
    } else {
        j["pointwise_min_slack"] = nullptr;
    }
    return j.dump(2) + "\n";
}

StabilityCertificate certificate_from_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("certificate JSON is malformed: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("certificate: expected a JSON object");
    if (j.contains("feasible") && j.at("feasible").is_boolean() && !j.at("feasible").get<bool>()) {
        throw std::invalid_argument("certificate: records an infeasible result");
    }
    StabilityCertificate cert;
    const json& xi = field_array(j, "xi", "certificate");
    for (std::size_t k = 0; k < xi.size(); ++k) {
        cert.xi.push_back(as_number(xi[k], "certificate.xi[" + std::to_string(k) + "]"));
        if (!(cert.xi.back() > 0.0)) fail("certificate.xi", "entries must be positive");
    }
    if (cert.xi.empty()) fail("certificate.xi", "must be nonempty");
    cert.beta = field_number(j, "beta", "certificate");
    cert.eta = field_number(j, "eta", "certificate");
    if (j.contains("method") && j.at("method").is_string()) {
        cert.method = j.at("method").get<std::string>();
    }
    if (j.contains("pointwise_checked") && j.at("pointwise_checked").is_boolean()) {
        cert.pointwise_checked = j.at("pointwise_checked").get<bool>();
    }
    if (j.contains("pointwise_min_slack") && j.at("pointwise_min_slack").is_number()) {
        cert.pointwise_min_slack = j.at("pointwise_min_slack").get<double>();
    }
    return cert;
}

}  // namespace apstab
