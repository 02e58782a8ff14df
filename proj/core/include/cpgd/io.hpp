#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cpgd/bench.hpp"
#include "cpgd/fri.hpp"
#include "cpgd/types.hpp"

namespace cpgd::io {

/// Shortest decimal string that parses back to exactly the same double;
/// infinities render as "inf"/"-inf".
std::string format_double(double value);

/// Strict double parse of a full token; throws std::invalid_argument on
/// trailing garbage or empty input.
double parse_double(const std::string& token);

/// Flat `key = value` configuration text: one pair per line, `#` starts a
/// comment, blank lines ignored, later keys override earlier ones.
using Config = std::map<std::string, std::string>;
Config parse_config(std::istream& in);
Config parse_config_file(const std::string& path);
/// Lines sorted by key, `key = value` with single spaces.
std::string serialize_config(const Config& config);

/// Minimal CSV: comma-separated, no quoting (no field written by this
/// library ever contains a comma), one header row.
std::vector<std::vector<std::string>> read_csv(std::istream& in);

/// Header exactly:
/// method,gamma,psnr_db,trial,seed,positioning_error,iterations,wall_time_ms,converged
void write_records_csv(std::ostream& out,
                       const std::vector<bench::BenchmarkRecord>& records);
std::vector<bench::BenchmarkRecord> read_records_csv(std::istream& in);

/// Header exactly: method,gamma,psnr_db,median_error,q25,q75,n_trials
void write_summary_csv(std::ostream& out,
                       const std::vector<bench::SummaryRow>& rows);

/// Columns: t,amplitude_re,amplitude_im
void write_stream_csv(std::ostream& out, const DiracStream& stream);
DiracStream read_stream_csv(std::istream& in);

/// Columns: theta
void write_scheme_csv(std::ostream& out, const SamplingScheme& scheme);
/// The CSV stores times only; the caller supplies the bandwidth.
SamplingScheme read_scheme_csv(std::istream& in, Index bandwidth);

/// Columns: theta,y_re,y_im
void write_measurements_csv(std::ostream& out, const SamplingScheme& scheme,
                            const ComplexVector& observations);
std::pair<SamplingScheme, ComplexVector> read_measurements_csv(
    std::istream& in, Index bandwidth);

/// Columns: m,re,im with m running -M..M
void write_coefficients_csv(std::ostream& out, const FourierVector& x);
FourierVector read_coefficients_csv(std::istream& in);

/// Columns: iteration,residual,step,rel_change (1-based iterations)
void write_trace_csv(std::ostream& out, const RecoveryTrace& trace);

/// Columns: gamma,median_condition,injective
void write_condition_csv(std::ostream& out,
                         const std::vector<bench::ConditionRow>& rows);

/// Columns: n,cpgd_iteration_ms,cpgd_total_ms,genfri_iteration_ms,
/// genfri_total_ms.  The fitted slopes are not part of the table; callers
/// report them separately.
void write_timing_csv(std::ostream& out, const bench::TimingStudy& study);

}  // namespace cpgd::io
