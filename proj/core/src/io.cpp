#include "cpgd/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace cpgd::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        const size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

long long parse_integer(const std::string& token) {
    long long value = 0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size())
        throw std::invalid_argument("io: malformed integer '" + token + "'");
    return value;
}

unsigned long long parse_unsigned(const std::string& token) {
    unsigned long long value = 0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size())
        throw std::invalid_argument("io: malformed integer '" + token + "'");
    return value;
}

void expect_header(const std::vector<std::vector<std::string>>& rows,
                   const std::string& joined) {
    if (rows.empty())
        throw std::invalid_argument("io: missing header row");
    std::string seen;
    for (size_t i = 0; i < rows[0].size(); ++i) {
        if (i > 0) seen += ',';
        seen += rows[0][i];
    }
    if (seen != joined)
        throw std::invalid_argument("io: expected header '" + joined +
                                    "', got '" + seen + "'");
}

void expect_width(const std::vector<std::string>& row, size_t width) {
    if (row.size() != width)
        throw std::invalid_argument("io: malformed row width");
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer),
                                         value);
    if (ec != std::errc())
        throw std::runtime_error("io: double formatting failed");
    return {buffer, end};
}

double parse_double(const std::string& token) {
    if (token == "inf") return std::numeric_limits<double>::infinity();
    if (token == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0;
    const auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size())
        throw std::invalid_argument("io: malformed number '" + token + "'");
    return value;
}

Config parse_config(std::istream& in) {
    Config config;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("io: config line " +
                                        std::to_string(lineno) +
                                        " is not 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("io: config line " +
                                        std::to_string(lineno) +
                                        " has an empty key");
        config[key] = value;
    }
    return config;
}

Config parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("io: cannot open config file '" + path +
                                    "'");
    return parse_config(in);
}

std::string serialize_config(const Config& config) {
    std::string out;
    for (const auto& [key, value] : config) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

std::vector<std::vector<std::string>> read_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_fields(line));
    }
    return rows;
}

void write_records_csv(std::ostream& out,
                       const std::vector<bench::BenchmarkRecord>& records) {
    out << "method,gamma,psnr_db,trial,seed,positioning_error,iterations,"
           "wall_time_ms,converged\n";
    for (const bench::BenchmarkRecord& r : records)
        out << r.method << ',' << r.gamma << ',' << format_double(r.psnr_db)
            << ',' << r.trial << ',' << r.seed << ','
            << format_double(r.positioning_error) << ',' << r.iterations
            << ',' << format_double(r.wall_time_ms) << ','
            << (r.converged ? 1 : 0) << '\n';
}

std::vector<bench::BenchmarkRecord> read_records_csv(std::istream& in) {
    const auto rows = read_csv(in);
    expect_header(rows,
                  "method,gamma,psnr_db,trial,seed,positioning_error,"
                  "iterations,wall_time_ms,converged");
    std::vector<bench::BenchmarkRecord> records;
    records.reserve(rows.size() - 1);
    for (size_t i = 1; i < rows.size(); ++i) {
        expect_width(rows[i], 9);
        bench::BenchmarkRecord r;
        r.method = rows[i][0];
        r.gamma = parse_integer(rows[i][1]);
        r.psnr_db = parse_double(rows[i][2]);
        r.trial = parse_integer(rows[i][3]);
        r.seed = parse_unsigned(rows[i][4]);
        r.positioning_error = parse_double(rows[i][5]);
        r.iterations = parse_integer(rows[i][6]);
        r.wall_time_ms = parse_double(rows[i][7]);
        r.converged = parse_integer(rows[i][8]) != 0;
        records.push_back(std::move(r));
    }
    return records;
}

void write_summary_csv(std::ostream& out,
                       const std::vector<bench::SummaryRow>& rows) {
    out << "method,gamma,psnr_db,median_error,q25,q75,n_trials\n";
    for (const bench::SummaryRow& r : rows)
        out << r.method << ',' << r.gamma << ',' << format_double(r.psnr_db)
            << ',' << format_double(r.median_error) << ','
            << format_double(r.q25) << ',' << format_double(r.q75) << ','
            << r.n_trials << '\n';
}

void write_stream_csv(std::ostream& out, const DiracStream& stream) {
    out << "t,amplitude_re,amplitude_im\n";
    for (size_t k = 0; k < stream.locations.size(); ++k)
        out << format_double(stream.locations[k]) << ','
            << format_double(stream.amplitudes[k].real()) << ','
            << format_double(stream.amplitudes[k].imag()) << '\n';
}

DiracStream read_stream_csv(std::istream& in) {
    const auto rows = read_csv(in);
    expect_header(rows, "t,amplitude_re,amplitude_im");
    DiracStream stream;
    for (size_t i = 1; i < rows.size(); ++i) {
        expect_width(rows[i], 3);
        stream.locations.push_back(parse_double(rows[i][0]));
        stream.amplitudes.emplace_back(parse_double(rows[i][1]),
                                       parse_double(rows[i][2]));
    }
    if (stream.locations.empty())
        throw std::invalid_argument("io: stream file has no rows");
    return stream;
}

void write_scheme_csv(std::ostream& out, const SamplingScheme& scheme) {
    out << "theta\n";
    for (const double t : scheme.times) out << format_double(t) << '\n';
}

SamplingScheme read_scheme_csv(std::istream& in, Index bandwidth) {
    const auto rows = read_csv(in);
    expect_header(rows, "theta");
    SamplingScheme scheme;
    scheme.bandwidth = bandwidth;
    for (size_t i = 1; i < rows.size(); ++i) {
        expect_width(rows[i], 1);
        scheme.times.push_back(parse_double(rows[i][0]));
    }
    if (scheme.times.empty())
        throw std::invalid_argument("io: scheme file has no rows");
    return scheme;
}

void write_measurements_csv(std::ostream& out, const SamplingScheme& scheme,
                            const ComplexVector& observations) {
    if (static_cast<Index>(scheme.times.size()) != observations.size())
        throw std::invalid_argument(
            "io: scheme and observations must have matching lengths");
    out << "theta,y_re,y_im\n";
    for (Index l = 0; l < observations.size(); ++l)
        out << format_double(scheme.times[l]) << ','
            << format_double(observations(l).real()) << ','
            << format_double(observations(l).imag()) << '\n';
}

std::pair<SamplingScheme, ComplexVector> read_measurements_csv(
    std::istream& in, Index bandwidth) {
    const auto rows = read_csv(in);
    expect_header(rows, "theta,y_re,y_im");
    SamplingScheme scheme;
    scheme.bandwidth = bandwidth;
    std::vector<Complex> values;
    for (size_t i = 1; i < rows.size(); ++i) {
        expect_width(rows[i], 3);
        scheme.times.push_back(parse_double(rows[i][0]));
        values.emplace_back(parse_double(rows[i][1]),
                            parse_double(rows[i][2]));
    }
    if (values.empty())
        throw std::invalid_argument("io: measurements file has no rows");
    ComplexVector y(static_cast<Index>(values.size()));
    for (Index l = 0; l < y.size(); ++l) y(l) = values[l];
    return {std::move(scheme), std::move(y)};
}

void write_coefficients_csv(std::ostream& out, const FourierVector& x) {
    out << "m,re,im\n";
    const Index m = x.half_bandwidth();
    for (Index i = -m; i <= m; ++i)
        out << i << ',' << format_double(x(i).real()) << ','
            << format_double(x(i).imag()) << '\n';
}

FourierVector read_coefficients_csv(std::istream& in) {
    const auto rows = read_csv(in);
    expect_header(rows, "m,re,im");
    std::vector<Complex> values;
    for (size_t i = 1; i < rows.size(); ++i) {
        expect_width(rows[i], 3);
        const long long m = parse_integer(rows[i][0]);
        const auto expected =
            static_cast<long long>(i) - 1 -
            (static_cast<long long>(rows.size()) - 2) / 2;
        if (m != expected)
            throw std::invalid_argument(
                "io: coefficient indices must run -M..M in order");
        values.emplace_back(parse_double(rows[i][1]),
                            parse_double(rows[i][2]));
    }
    ComplexVector x(static_cast<Index>(values.size()));
    for (Index i = 0; i < x.size(); ++i) x(i) = values[i];
    return FourierVector(x);  // validates odd length >= 3
}

void write_trace_csv(std::ostream& out, const RecoveryTrace& trace) {
    out << "iteration,residual,step,rel_change\n";
    for (size_t i = 0; i < trace.residual_history.size(); ++i)
        out << (i + 1) << ',' << format_double(trace.residual_history[i])
            << ',' << format_double(trace.step_history[i]) << ','
            << format_double(trace.rel_change_history[i]) << '\n';
}

void write_condition_csv(std::ostream& out,
                         const std::vector<bench::ConditionRow>& rows) {
    out << "gamma,median_condition,injective\n";
    for (const bench::ConditionRow& r : rows)
        out << r.gamma << ',' << format_double(r.median_condition) << ','
            << (r.injective ? 1 : 0) << '\n';
}

void write_timing_csv(std::ostream& out, const bench::TimingStudy& study) {
    out << "n,cpgd_iteration_ms,cpgd_total_ms,genfri_iteration_ms,"
           "genfri_total_ms\n";
    for (const bench::TimingRow& r : study.rows)
        out << r.n << ',' << format_double(r.cpgd_iteration_ms) << ','
            << format_double(r.cpgd_total_ms) << ','
            << format_double(r.genfri_iteration_ms) << ','
            << format_double(r.genfri_total_ms) << '\n';
}

}  // namespace cpgd::io
