#include "apstab/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace apstab {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
    out << "t";
    for (std::size_t i = 1; i <= traj.n; ++i) out << ",u_" << i;
    for (std::size_t i = 1; i <= traj.n; ++i) out << ",du_" << i;
    out << "\n";
    for (std::size_t r = 0; r < traj.times.size(); ++r) {
        out << format_double(traj.times[r]);
        for (std::size_t i = 0; i < traj.n; ++i) out << ',' << format_double(traj.state(r, i));
        for (std::size_t i = 0; i < traj.n; ++i) out << ',' << format_double(traj.deriv(r, i));
        out << "\n";
    }
}

Trajectory read_trajectory_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("trajectory file is empty: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_csv_line(line);
    if (header.size() < 3 || header[0] != "t" || (header.size() - 1) % 2 != 0) {
        throw std::runtime_error("trajectory file has an unexpected header: " + path);
    }
    const std::size_t n = (header.size() - 1) / 2;

    Trajectory traj;
    traj.n = n;
    traj.model_tag = std::filesystem::path(path).stem().string();
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 1 + 2 * n) {
            throw std::runtime_error("trajectory row has wrong field count: " + path);
        }
        traj.times.push_back(std::stod(fields[0]));
        for (std::size_t i = 0; i < n; ++i) traj.states.push_back(std::stod(fields[1 + i]));
        for (std::size_t i = 0; i < n; ++i) traj.derivs.push_back(std::stod(fields[1 + n + i]));
    }
    if (traj.times.size() >= 2) traj.dt = traj.times[1] - traj.times[0];
    return traj;
}

void write_distance_csv(const DistanceSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write distance file: " + path);
    out << "t,distance\n";
    for (std::size_t r = 0; r < series.times.size(); ++r) {
        out << format_double(series.times[r]) << ',' << format_double(series.values[r]) << "\n";
    }
}

}  // namespace apstab
