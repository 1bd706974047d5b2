#include "mlfa/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace mlfa {

namespace {

using nlohmann::json;

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view text, std::size_t line) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
        throw ParseError("cannot parse number '" + std::string(text) + "'", line);
    return value;
}

Complex parse_complex(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError("complex entries must be [re, im] pairs", 0);
}

ComplexMatrix parse_complex_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("complex matrix must be a non-empty array of rows", 0);
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError("complex matrix rows must have equal length", 0);
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_complex(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

RealVector parse_real_vector(const json& j) {
    const auto values = j.get<std::vector<double>>();
    return Eigen::Map<const RealVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInputError("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace

void write_snapshots_csv(std::ostream& out, const SnapshotMatrix& snapshots) {
    const Eigen::Index n = snapshots.rows();
    for (Eigen::Index i = 0; i < n; ++i) out << (i ? "," : "") << 'y' << i << "_re,y" << i << "_im";
    out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index t = 0; t < snapshots.cols(); ++t) {
        for (Eigen::Index i = 0; i < n; ++i)
            out << (i ? "," : "") << snapshots(i, t).real() << ',' << snapshots(i, t).imag();
        out << '\n';
    }
}

SnapshotMatrix read_snapshots_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty snapshots file", 1);
    ++line_no;
    const auto header = split_fields(trim(line));
    if (header.size() < 2 || header.size() % 2 != 0) throw ParseError("header must have 2N columns", line_no);
    const std::size_t n = header.size() / 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string re = "y" + std::to_string(i) + "_re";
        const std::string im = "y" + std::to_string(i) + "_im";
        if (trim(header[2 * i]) != re || trim(header[2 * i + 1]) != im)
            throw ParseError("expected header columns " + re + "," + im, line_no);
    }

    std::vector<Complex> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty()) continue;
        const auto fields = split_fields(body);
        if (fields.size() != 2 * n) {
            throw ParseError("expected " + std::to_string(2 * n) + " fields, found " + std::to_string(fields.size()),
                             line_no);
        }
        for (std::size_t i = 0; i < n; ++i)
            values.emplace_back(parse_number(fields[2 * i], line_no), parse_number(fields[2 * i + 1], line_no));
        ++rows;
    }
    if (rows == 0) throw ParseError("snapshots file has no data rows", line_no);

    SnapshotMatrix y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(rows));
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t i = 0; i < n; ++i)
            y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = values[t * n + i];
    }
    return y;
}

SnapshotMatrix read_snapshots_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInputError("cannot open snapshots file '" + path + "'");
    return read_snapshots_csv(in);
}

ExperimentSpec parse_experiment_spec(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
    }
    if (!root.is_object()) throw ParseError("config must be a JSON object", 0);

    ExperimentSpec spec;
    try {
        if (root.contains("scenario")) {
            const json& s = root.at("scenario");
            ScenarioConfig& c = spec.scenario;
            if (s.contains("sensor_count")) c.sensor_count = s.at("sensor_count").get<Eigen::Index>();
            if (s.contains("source_count")) c.source_count = s.at("source_count").get<Eigen::Index>();
            if (s.contains("thetas")) {
                c.thetas.clear();
                for (double deg : s.at("thetas").get<std::vector<double>>()) c.thetas.push_back(degrees_to_radians(deg));
            }
            if (s.contains("source_cov")) c.source_cov = parse_complex_matrix(s.at("source_cov"));
            if (s.contains("noise_vars")) c.noise_vars = parse_real_vector(s.at("noise_vars"));
            if (s.contains("snapshot_count")) c.snapshot_count = s.at("snapshot_count").get<Eigen::Index>();
            if (s.contains("rng_seed")) c.rng_seed = s.at("rng_seed").get<std::uint64_t>();
        }
        if (root.contains("method")) spec.method = parse_method(root.at("method").get<std::string>());
        if (root.contains("iteration_budget")) spec.iteration_budget = root.at("iteration_budget").get<int>();
        if (root.contains("inner_sweeps")) spec.inner_sweeps = root.at("inner_sweeps").get<int>();
        if (root.contains("realization_count")) spec.realization_count = root.at("realization_count").get<int>();
        if (root.contains("snapshot_grid"))
            spec.snapshot_grid = root.at("snapshot_grid").get<std::vector<Eigen::Index>>();
        if (root.contains("initial_noise_vars")) spec.initial_noise_vars = parse_real_vector(root.at("initial_noise_vars"));
        if (root.contains("output_path")) spec.output_path = root.at("output_path").get<std::string>();
        if (root.contains("input_path")) spec.input_path = root.at("input_path").get<std::string>();
        if (root.contains("threads")) spec.threads = root.at("threads").get<unsigned>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid config field: ") + e.what(), 0);
    }
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) { return parse_experiment_spec(read_all(path)); }

EstimateReport estimate_file(const ExperimentSpec& spec) {
    if (spec.input_path.empty()) throw InvalidInputError("estimate needs input_path (snapshots CSV)");
    return estimate_snapshots(read_snapshots_file(spec.input_path), spec);
}

void write_estimate_json(std::ostream& out, const EstimateReport& report) {
    json root;
    root["sensor_count"] = report.sensor_count;
    root["snapshot_count"] = report.snapshot_count;
    root["methods"] = json::array();
    for (const MethodEstimate& m : report.methods) {
        json entry;
        entry["method"] = to_string(m.method);
        entry["objective"] = m.objective;
        json loadings = json::array();
        for (Eigen::Index r = 0; r < m.estimate.loadings.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < m.estimate.loadings.cols(); ++c)
                row.push_back(complex_json(m.estimate.loadings(r, c)));
            loadings.push_back(row);
        }
        entry["loadings"] = loadings;
        entry["noise_vars"] = std::vector<double>(m.estimate.noise_vars.data(),
                                                  m.estimate.noise_vars.data() + m.estimate.noise_vars.size());
        std::vector<double> degrees;
        for (double t : m.thetas) degrees.push_back(radians_to_degrees(t));
        entry["thetas_deg"] = degrees;
        if (!m.errors.empty()) {
            std::vector<double> err;
            for (double e : m.errors) err.push_back(radians_to_degrees(e));
            entry["errors_deg"] = err;
        }
        if (m.failure) entry["failure"] = *m.failure;
        root["methods"].push_back(entry);
    }
    out << root.dump(2) << '\n';
}

}  // namespace mlfa
