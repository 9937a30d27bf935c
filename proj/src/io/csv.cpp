#include "psolim/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace psolim {

std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

namespace {

void write_header(std::ostream& out, Eigen::Index components) {
    out << "n,t";
    for (Eigen::Index j = 0; j < components; ++j) out << ",component_" << j;
    out << ",kind\n";
}

void write_row(std::ostream& out, long n, double t, const Vector& state,
               const std::string& kind) {
    out << n << ',' << format_double(t);
    for (Eigen::Index j = 0; j < state.size(); ++j)
        out << ',' << format_double(state[j]);
    out << ',' << kind << '\n';
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    return out;
}

}  // namespace

void emit_trace_csv(const RunTrace& trace, std::ostream& out) {
    if (trace.states.empty()) throw ContractError("cannot emit an empty trace");
    write_header(out, trace.states.front().size());
    const double epsilon = trace.params.epsilon;
    for (std::size_t n = 0; n < trace.states.size(); ++n)
        write_row(out, static_cast<long>(n), epsilon * static_cast<double>(n),
                  trace.states[n], trace.kind);
    if (!out) throw ConfigError("trace CSV write failed");
}

void emit_trace_csv(const RunTrace& trace, const std::string& path) {
    auto out = open_output(path);
    emit_trace_csv(trace, out);
}

void emit_trace_csv(const OdeTrajectory& trajectory, std::ostream& out) {
    if (trajectory.states.empty()) throw ContractError("cannot emit an empty trajectory");
    write_header(out, trajectory.states.front().size());
    for (std::size_t n = 0; n < trajectory.states.size(); ++n)
        write_row(out, static_cast<long>(n), trajectory.times[n], trajectory.states[n],
                  "ode");
    if (!out) throw ConfigError("trajectory CSV write failed");
}

void emit_trace_csv(const OdeTrajectory& trajectory, const std::string& path) {
    auto out = open_output(path);
    emit_trace_csv(trajectory, out);
}

std::vector<TraceCsvRow> read_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open trace CSV: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ConfigError("trace CSV is empty: " + path);
    long columns = 0;
    for (char c : line)
        if (c == ',') ++columns;
    const long components = columns - 1;  // n,t,<components...>,kind
    if (components < 1) throw ConfigError("malformed trace CSV header: " + path);

    std::vector<TraceCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string field;
        TraceCsvRow row;
        row.components.resize(components);
        std::getline(fields, field, ',');
        row.n = std::stol(field);
        std::getline(fields, field, ',');
        row.t = std::stod(field);
        for (long j = 0; j < components; ++j) {
            std::getline(fields, field, ',');
            row.components[j] = std::stod(field);
        }
        std::getline(fields, row.kind, ',');
        rows.push_back(std::move(row));
    }
    return rows;
}

void emit_samples_csv(const std::vector<Vector>& samples, const std::string& path) {
    auto out = open_output(path);
    if (samples.empty()) throw ContractError("cannot emit an empty sample set");
    out << "sample";
    for (Eigen::Index j = 0; j < samples.front().size(); ++j) out << ",component_" << j;
    out << '\n';
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << i;
        for (Eigen::Index j = 0; j < samples[i].size(); ++j)
            out << ',' << format_double(samples[i][j]);
        out << '\n';
    }
    if (!out) throw ConfigError("sample CSV write failed");
}

}  // namespace psolim
