#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/SVD>

#include "cpgd/bench.hpp"
#include "cpgd/denoise.hpp"
#include "cpgd/fri.hpp"
#include "cpgd/io.hpp"
#include "cpgd/random.hpp"
#include "cpgd/solvers.hpp"
#include "cpgd/toeplitz.hpp"
#include "cpgd/types.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;  // usage or IO errors
constexpr int kNotConverged = 2;

using cpgd::Index;

// ---- strict scalar grammar shared by flags and config files ----

Index parse_index(const std::string& token) {
    long long value = 0;
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), last, value);
    if (ec != std::errc() || ptr != last)
        throw std::invalid_argument("not an integer: '" + token + "'");
    return static_cast<Index>(value);
}

uint64_t parse_seed(const std::string& token) {
    uint64_t value = 0;
    const char* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), last, value);
    if (ec != std::errc() || ptr != last)
        throw std::invalid_argument("not a seed: '" + token + "'");
    return value;
}

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> pieces;
    size_t start = 0;
    while (start <= text.size()) {
        const size_t stop = text.find(',', start);
        if (stop == std::string::npos) {
            pieces.push_back(text.substr(start));
            break;
        }
        pieces.push_back(text.substr(start, stop - start));
        start = stop + 1;
    }
    for (const std::string& piece : pieces)
        if (piece.empty())
            throw std::invalid_argument("empty entry in list '" + text + "'");
    return pieces;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    for (const std::string& piece : split_commas(text))
        values.push_back(cpgd::io::parse_double(piece));
    return values;
}

std::vector<Index> parse_index_list(const std::string& text) {
    std::vector<Index> values;
    for (const std::string& piece : split_commas(text))
        values.push_back(parse_index(piece));
    return values;
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += cpgd::io::format_double(values[i]);
    }
    return out;
}

std::string join_indices(const std::vector<Index>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(values[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += values[i];
    }
    return out;
}

std::string default_output_dir() {
    const char* env = std::getenv("CPGD_OUTPUT_DIR");
    return (env != nullptr && *env != '\0') ? env : ".";
}

// ---- flags mirrored by config-file keys ----
//
// Every option is staged as text and fed through the same parser whether it
// came from the command line or from a `key = value` line of --config; an
// explicit flag wins over the file, the built-in default stands when neither
// appears.  render() reports the value actually used so the sidecar always
// reflects the effective run; an empty render defers the key to the command
// handler.
class FlagMirror {
public:
    explicit FlagMirror(CLI::App* cmd) : cmd_(cmd) {}

    void add(const std::string& flag, const std::string& help,
             std::function<void(const std::string&)> absorb,
             std::function<std::string()> render) {
        entries_.emplace_back();
        Entry& e = entries_.back();
        e.key = config_key(flag);
        e.absorb = std::move(absorb);
        e.render = std::move(render);
        e.option = cmd_->add_option(flag, e.staged, help);
    }

    void add_index(const std::string& flag, Index& slot,
                   const std::string& help) {
        add(
            flag, help, [&slot](const std::string& s) { slot = parse_index(s); },
            [&slot] { return std::to_string(slot); });
    }

    void add_double(const std::string& flag, double& slot,
                    const std::string& help) {
        add(
            flag, help,
            [&slot](const std::string& s) { slot = cpgd::io::parse_double(s); },
            [&slot] { return cpgd::io::format_double(slot); });
    }

    void add_optional_double(const std::string& flag,
                             std::optional<double>& slot,
                             const std::string& help) {
        add(
            flag, help,
            [&slot](const std::string& s) { slot = cpgd::io::parse_double(s); },
            [] { return std::string(); });
    }

    void add_seed(const std::string& flag, uint64_t& slot,
                  const std::string& help) {
        add(
            flag, help, [&slot](const std::string& s) { slot = parse_seed(s); },
            [&slot] { return std::to_string(slot); });
    }

    void add_string(const std::string& flag, std::string& slot,
                    const std::string& help) {
        add(
            flag, help, [&slot](const std::string& s) { slot = s; },
            [&slot] { return slot; });
    }

    void add_deferred_string(const std::string& flag, std::string& slot,
                             const std::string& help) {
        add(
            flag, help, [&slot](const std::string& s) { slot = s; },
            [] { return std::string(); });
    }

    void add_double_list(const std::string& flag, std::vector<double>& slot,
                         const std::string& help) {
        add(
            flag, help,
            [&slot](const std::string& s) { slot = parse_double_list(s); },
            [&slot] { return join_doubles(slot); });
    }

    void add_index_list(const std::string& flag, std::vector<Index>& slot,
                        const std::string& help) {
        add(
            flag, help,
            [&slot](const std::string& s) { slot = parse_index_list(s); },
            [&slot] { return join_indices(slot); });
    }

    void add_string_list(const std::string& flag,
                         std::vector<std::string>& slot,
                         const std::string& help) {
        add(
            flag, help,
            [&slot](const std::string& s) { slot = split_commas(s); },
            [&slot] { return join_strings(slot); });
    }

    CLI::Option* option(const std::string& flag) const {
        const std::string key = config_key(flag);
        for (const Entry& e : entries_)
            if (e.key == key) return e.option;
        return nullptr;
    }

    /// Flags first, file keys for the rest; unknown file keys are ignored so
    /// one config can serve several subcommands.
    void resolve(const cpgd::io::Config& file) {
        for (Entry& e : entries_) {
            if (e.option->count() > 0) {
                try {
                    e.absorb(e.staged);
                } catch (const std::exception& err) {
                    throw std::invalid_argument(
                        "option '" + e.option->get_name() + "': " + err.what());
                }
                continue;
            }
            const auto hit = file.find(e.key);
            if (hit == file.end()) continue;
            try {
                e.absorb(hit->second);
            } catch (const std::exception& err) {
                throw std::invalid_argument("config key '" + e.key +
                                            "': " + err.what());
            }
        }
    }

    cpgd::io::Config effective() const {
        cpgd::io::Config out;
        for (const Entry& e : entries_) {
            std::string value = e.render();
            if (!value.empty()) out[e.key] = std::move(value);
        }
        return out;
    }

private:
    struct Entry {
        CLI::Option* option = nullptr;
        std::string key;
        std::string staged;
        std::function<void(const std::string&)> absorb;
        std::function<std::string()> render;
    };

    static std::string config_key(const std::string& flag) {
        std::string key = flag.substr(flag.rfind("--") + 2);
        std::replace(key.begin(), key.end(), '-', '_');
        return key;
    }

    CLI::App* cmd_;
    std::deque<Entry> entries_;  // stable addresses for CLI11 bindings
};

// ---- file plumbing ----

fs::path ensure_dir(const std::string& dir) {
    fs::path path(dir);
    fs::create_directories(path);
    return path;
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fn) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open for writing: " + path.string());
    fn(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read: " + path.string());
    return in;
}

void write_sidecar(const fs::path& dir, const std::string& name,
                   const cpgd::io::Config& config) {
    write_file(dir / name, [&config](std::ostream& out) {
        out << cpgd::io::serialize_config(config);
    });
}

cpgd::io::Config load_config(const std::string& path) {
    if (path.empty()) return {};
    return cpgd::io::parse_config_file(path);
}

// ---- subcommands ----

struct SimulateOptions {
    Index spikes = 9;
    Index samples = 73;
    Index gamma = 2;
    double psnr = 30.0;
    std::optional<double> sigma;
    uint64_t seed = 42;
    std::string out = default_output_dir();
    std::string config;
};

int run_simulate(SimulateOptions& o, FlagMirror& mirror) {
    mirror.resolve(load_config(o.config));
    if (o.spikes < 1) throw std::invalid_argument("spike count must be >= 1");
    if (o.samples < 1) throw std::invalid_argument("sample count must be >= 1");
    if (o.gamma < 1) throw std::invalid_argument("gamma must be >= 1");
    const Index m = o.gamma * o.spikes;

    const cpgd::DiracStream stream =
        cpgd::random_stream(o.spikes, cpgd::rng::derive(o.seed, 0));
    const cpgd::SamplingScheme scheme =
        cpgd::random_scheme(o.samples, m, cpgd::rng::derive(o.seed, 1));
    double max_amplitude = 0;
    for (const cpgd::Complex& a : stream.amplitudes)
        max_amplitude = std::max(max_amplitude, std::abs(a));
    const double sigma =
        o.sigma ? *o.sigma : cpgd::psnr_to_sigma(o.psnr, stream);
    if (sigma < 0) throw std::invalid_argument("noise level must be >= 0");
    const cpgd::ForwardModel model = cpgd::synthesize_measurements(
        stream, scheme, sigma, cpgd::rng::derive(o.seed, 2));

    const fs::path dir = ensure_dir(o.out);
    write_file(dir / "stream.csv", [&](std::ostream& out) {
        cpgd::io::write_stream_csv(out, stream);
    });
    write_file(dir / "scheme.csv", [&](std::ostream& out) {
        cpgd::io::write_scheme_csv(out, scheme);
    });
    write_file(dir / "measurements.csv", [&](std::ostream& out) {
        cpgd::io::write_measurements_csv(out, scheme, model.observations());
    });

    cpgd::io::Config effective = mirror.effective();
    effective["sigma"] = cpgd::io::format_double(sigma);
    effective["max_amplitude"] = cpgd::io::format_double(max_amplitude);
    if (o.sigma) effective.erase("psnr");  // the explicit level won
    write_sidecar(dir, "simulate_config.txt", effective);
    return kOk;
}

struct RecoverOptions {
    std::string measurements;
    std::string method = "cpgd";
    Index spikes = 9;
    Index gamma = 2;
    Index bandwidth = 0;  // 0: gamma * spikes
    Index order = 0;      // 0: bandwidth (spike count for genfri)
    std::optional<double> tau;
    std::optional<double> radius;
    Index sweeps = 10;
    Index max_iterations = 500;
    double rel_tol = 1e-4;
    uint64_t seed = cpgd::kDefaultSvdSeed;
    std::string out = default_output_dir();
    std::string config;
};

int run_recover(RecoverOptions& o, FlagMirror& mirror) {
    mirror.resolve(load_config(o.config));
    if (o.method != "cpgd" && o.method != "genfri" && o.method != "ls-cadzow")
        throw std::invalid_argument("unknown method '" + o.method +
                                    "' (expected cpgd, genfri or ls-cadzow)");
    if (o.spikes < 1) throw std::invalid_argument("spike count must be >= 1");
    if (o.bandwidth == 0 && o.gamma < 1)
        throw std::invalid_argument("gamma must be >= 1");
    const Index m = o.bandwidth > 0 ? o.bandwidth : o.gamma * o.spikes;
    const fs::path dir = ensure_dir(o.out);
    const fs::path measurements_path =
        o.measurements.empty() ? dir / "measurements.csv"
                               : fs::path(o.measurements);

    auto in = open_input(measurements_path);
    const auto [scheme, observations] =
        cpgd::io::read_measurements_csv(in, m);
    cpgd::ForwardModel model(cpgd::build_forward_matrix(scheme), observations);
    if (o.method == "genfri" && !model.injective())
        throw std::runtime_error(
            "genfri requires an injective forward matrix: it needs at least "
            "as many samples as coefficients (got L = " +
            std::to_string(model.samples()) +
            ", N = " + std::to_string(model.coefficients()) +
            ") and distinct sample times");

    cpgd::SolverConfig cfg;
    cfg.rank = o.spikes;
    cfg.order = o.order > 0 ? o.order
                            : (o.method == "genfri" ? o.spikes : m);
    cfg.map_iterations = o.sweeps;
    cfg.max_iterations = o.max_iterations;
    cfg.rel_tol = o.rel_tol;
    cfg.seed = o.seed;
    cfg.step_size = o.tau ? *o.tau : cpgd::default_step_size(model);
    cfg.radius = o.radius ? *o.radius : cpgd::default_radius(model);

    cpgd::RecoveryTrace trace;
    if (o.method == "cpgd") {
        trace = cpgd::cpgd(model, cfg);
    } else if (o.method == "genfri") {
        trace = cpgd::genfri(model, cfg);
    } else {
        trace = cpgd::ls_cadzow(model, cfg);
    }

    const std::vector<double> locations =
        cpgd::recover_locations(trace.coefficients, o.spikes, m);
    const cpgd::AmplitudeEstimate amplitudes =
        cpgd::recover_amplitudes(trace.coefficients, locations);
    if (amplitudes.rank_deficient)
        std::cerr << "warning: amplitude system is rank deficient; "
                     "amplitudes are a minimum-norm fit\n";

    write_file(dir / "coefficients.csv", [&](std::ostream& out) {
        cpgd::io::write_coefficients_csv(out, trace.coefficients);
    });
    const cpgd::DiracStream estimate{1.0, locations, amplitudes.amplitudes};
    write_file(dir / "diracs.csv", [&](std::ostream& out) {
        cpgd::io::write_stream_csv(out, estimate);
    });
    write_file(dir / "trace.csv", [&](std::ostream& out) {
        cpgd::io::write_trace_csv(out, trace);
    });

    cpgd::io::Config effective = mirror.effective();
    effective["measurements"] = measurements_path.string();
    effective["bandwidth"] = std::to_string(m);
    effective["order"] = std::to_string(cfg.order);
    effective["tau"] = cpgd::io::format_double(cfg.step_size);
    effective["radius"] = cpgd::io::format_double(cfg.radius);
    write_sidecar(dir, "recover_config.txt", effective);
    return trace.converged ? kOk : kNotConverged;
}

struct DenoiseOptions {
    std::string coefficients;
    Index rank = 9;
    Index order = 0;  // 0: half bandwidth of the input
    Index sweeps = 10;
    std::optional<double> radius;
    uint64_t seed = cpgd::kDefaultSvdSeed;
    std::string out = default_output_dir();
    std::string config;
};

/// sigma_{rank+1} / sigma_rank of the Toeplitz embedding; 0 severity means
/// the embedding is exactly compatible with `rank` spikes.
double rank_gap(const cpgd::FourierVector& x, Index rank, Index order) {
    const Eigen::JacobiSVD<cpgd::ComplexMatrix> svd(
        cpgd::toeplitzify(x, order).dense());
    return svd.singularValues()(rank) / svd.singularValues()(rank - 1);
}

int run_denoise(DenoiseOptions& o, FlagMirror& mirror) {
    mirror.resolve(load_config(o.config));
    const fs::path dir = ensure_dir(o.out);
    const fs::path input_path = o.coefficients.empty()
                                    ? dir / "coefficients.csv"
                                    : fs::path(o.coefficients);
    auto in = open_input(input_path);
    const cpgd::FourierVector x = cpgd::io::read_coefficients_csv(in);

    cpgd::DenoiseConfig cfg;
    cfg.rank = o.rank;
    cfg.order = o.order > 0 ? o.order : x.half_bandwidth();
    cfg.iterations = o.sweeps;
    cfg.radius =
        o.radius ? *o.radius : std::numeric_limits<double>::infinity();
    cfg.svd_seed = o.seed;

    const double before = rank_gap(x, cfg.rank, cfg.order);
    const cpgd::FourierVector denoised = cpgd::inexact_prox(x, cfg);
    const double after = rank_gap(denoised, cfg.rank, cfg.order);
    std::cerr << "denoise: sigma_(K+1)/sigma_K "
              << cpgd::io::format_double(before) << " -> "
              << cpgd::io::format_double(after) << "\n";

    write_file(dir / "denoised.csv", [&](std::ostream& out) {
        cpgd::io::write_coefficients_csv(out, denoised);
    });

    cpgd::io::Config effective = mirror.effective();
    effective["coefficients"] = input_path.string();
    effective["order"] = std::to_string(cfg.order);
    effective["radius"] = cpgd::io::format_double(cfg.radius);
    write_sidecar(dir, "denoise_config.txt", effective);
    return kOk;
}

struct BenchOptions {
    Index spikes = 9;
    Index samples = 73;
    std::vector<Index> gammas = {1, 2, 3, 4, 5};
    std::vector<double> psnrs = {-30, -20, -10, 0, 10, 20, 30};
    Index trials = 24;
    bool full = false;
    std::vector<std::string> methods = {"cpgd", "genfri", "ls-cadzow"};
    Index sweeps = 10;
    Index draws = 20;
    uint64_t seed = 42;
    std::string out = default_output_dir();
    std::string config;
};

int run_bench(BenchOptions& o, FlagMirror& mirror) {
    mirror.resolve(load_config(o.config));
    cpgd::bench::ExperimentGrid grid;
    grid.spikes = o.spikes;
    grid.samples = o.samples;
    grid.gammas = o.gammas;
    grid.psnrs_db = o.psnrs;
    grid.trials = o.full ? 192 : o.trials;
    grid.methods = o.methods;
    grid.map_iterations = o.sweeps;
    grid.base_seed = o.seed;

    const std::vector<cpgd::bench::BenchmarkRecord> records =
        cpgd::bench::run_sweep(grid);
    const std::vector<cpgd::bench::SummaryRow> summary =
        cpgd::bench::summarize(records);
    const std::vector<cpgd::bench::ConditionRow> conditions =
        cpgd::bench::condition_table(grid, o.draws);

    const fs::path dir = ensure_dir(o.out);
    write_file(dir / "records.csv", [&](std::ostream& out) {
        cpgd::io::write_records_csv(out, records);
    });
    write_file(dir / "summary.csv", [&](std::ostream& out) {
        cpgd::io::write_summary_csv(out, summary);
    });
    write_file(dir / "condition.csv", [&](std::ostream& out) {
        cpgd::io::write_condition_csv(out, conditions);
    });

    cpgd::io::Config effective = mirror.effective();
    effective["trials"] = std::to_string(grid.trials);
    write_sidecar(dir, "bench_config.txt", effective);
    std::cout << "wrote " << records.size() << " records, " << summary.size()
              << " summary rows and " << conditions.size()
              << " condition rows to " << dir.string() << "\n";
    return kOk;
}

struct TimeOptions {
    std::vector<Index> sizes = {19, 37, 73, 145, 291};
    Index spikes = 9;
    uint64_t seed = 42;
    Index max_n = 401;
    std::string out = default_output_dir();
    std::string config;
};

int run_time(TimeOptions& o, FlagMirror& mirror) {
    mirror.resolve(load_config(o.config));
    for (const Index n : o.sizes)
        if (n < 2 * o.spikes + 1)
            throw std::invalid_argument(
                "size " + std::to_string(n) +
                " cannot carry " + std::to_string(o.spikes) +
                " spikes (needs n >= " + std::to_string(2 * o.spikes + 1) +
                ")");

    const cpgd::bench::TimingStudy study =
        cpgd::bench::timing_study(o.sizes, o.spikes, o.seed, o.max_n);

    const fs::path dir = ensure_dir(o.out);
    write_file(dir / "timing.csv", [&](std::ostream& out) {
        cpgd::io::write_timing_csv(out, study);
    });

    cpgd::io::Config effective = mirror.effective();
    Index measured_genfri = 0;
    for (const Index n : o.sizes)
        if (n <= o.max_n) ++measured_genfri;
    if (o.sizes.size() > 1) {
        effective["cpgd_slope"] = cpgd::io::format_double(study.cpgd_slope);
        std::cout << "cpgd slope " << cpgd::io::format_double(study.cpgd_slope)
                  << "\n";
    }
    if (measured_genfri > 1) {
        effective["genfri_slope"] =
            cpgd::io::format_double(study.genfri_slope);
        std::cout << "genfri slope "
                  << cpgd::io::format_double(study.genfri_slope) << "\n";
    }
    write_sidecar(dir, "time_config.txt", effective);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Sparse spike recovery from irregular bandlimited samples: "
        "simulation, reconstruction, denoising and benchmarking.\n"
        "Config files are flat `key = value` text; keys match the long "
        "option names (dashes become underscores).  Explicit flags override "
        "config entries, which override built-in defaults.  The effective "
        "configuration is echoed to <command>_config.txt next to the "
        "outputs.  CPGD_OUTPUT_DIR sets the default output directory."};
    app.require_subcommand(1);

    SimulateOptions sim;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "draw a ground-truth spike stream, a sampling scheme and "
                    "noisy measurements");
    FlagMirror sim_mirror(sim_cmd);
    sim_mirror.add_index("-K,--spikes", sim.spikes, "spike count (default 9)");
    sim_mirror.add_index("-L,--samples", sim.samples,
                         "sample count (default 73)");
    sim_mirror.add_index("-g,--gamma", sim.gamma,
                         "oversampling factor, bandwidth M = gamma K "
                         "(default 2)");
    sim_mirror.add_double("--psnr", sim.psnr,
                          "peak SNR in dB, inf for noiseless (default 30)");
    sim_mirror.add_optional_double(
        "--sigma", sim.sigma, "noise standard deviation (overrides --psnr)");
    sim_mirror.add_seed("--seed", sim.seed, "RNG seed (default 42)");
    sim_mirror.add_string("--out", sim.out,
                          "output directory (default CPGD_OUTPUT_DIR or .)");
    sim_cmd->add_option("--config", sim.config,
                        "flat key = value defaults file");

    RecoverOptions rec;
    CLI::App* rec_cmd = app.add_subcommand(
        "recover", "reconstruct spike locations and amplitudes from "
                   "measurements");
    FlagMirror rec_mirror(rec_cmd);
    rec_mirror.add_deferred_string(
        "--measurements", rec.measurements,
        "measurements CSV (default <out>/measurements.csv)");
    rec_mirror.add_string("-m,--method", rec.method,
                          "cpgd, genfri or ls-cadzow (default cpgd)");
    rec_mirror.add_index("-K,--spikes", rec.spikes, "spike count (default 9)");
    rec_mirror.add_index("-g,--gamma", rec.gamma,
                         "oversampling factor used to infer the bandwidth "
                         "(default 2)");
    rec_mirror.add("--bandwidth",
                   "coefficient half-bandwidth M (overrides --gamma)",
                   [&rec](const std::string& s) { rec.bandwidth = parse_index(s); },
                   [] { return std::string(); });
    rec_mirror.add("--order",
                   "Toeplitz embedding order P (default: bandwidth; the "
                   "filter-based method defaults to the spike count)",
                   [&rec](const std::string& s) { rec.order = parse_index(s); },
                   [] { return std::string(); });
    rec_mirror.add_optional_double("--tau", rec.tau,
                                   "gradient step size (default 1/beta)");
    rec_mirror.add_optional_double(
        "--radius", rec.radius,
        "denoiser ball radius, inf allowed (default: inf when injective, "
        "|y| otherwise)");
    rec_mirror.add_index("--sweeps", rec.sweeps,
                         "denoiser sweeps per step (default 10)");
    rec_mirror.add_index("--max-iterations", rec.max_iterations,
                         "outer iteration cap (default 500)");
    rec_mirror.add_double("--rel-tol", rec.rel_tol,
                          "relative-change stopping tolerance (default 1e-4)");
    rec_mirror.add_seed("--seed", rec.seed,
                        "solver RNG seed (SVD starts, filter seeds)");
    rec_mirror.add_string("--out", rec.out,
                          "output directory (default CPGD_OUTPUT_DIR or .)");
    rec_cmd->add_option("--config", rec.config,
                        "flat key = value defaults file");

    DenoiseOptions den;
    CLI::App* den_cmd = app.add_subcommand(
        "denoise", "run the alternating-projection denoiser on a "
                   "coefficient file");
    FlagMirror den_mirror(den_cmd);
    den_mirror.add_deferred_string(
        "--coefficients", den.coefficients,
        "coefficient CSV (default <out>/coefficients.csv)");
    den_mirror.add_index("-K,--rank", den.rank,
                         "target rank = spike count (default 9)");
    den_mirror.add("--order",
                   "Toeplitz embedding order P (default: half bandwidth of "
                   "the input)",
                   [&den](const std::string& s) { den.order = parse_index(s); },
                   [] { return std::string(); });
    den_mirror.add_index("--sweeps", den.sweeps,
                         "projection sweeps, 0 is the identity (default 10)");
    den_mirror.add_optional_double(
        "--radius", den.radius,
        "ball radius for the proximal variant (default inf: plain "
        "alternating projections)");
    den_mirror.add_seed("--seed", den.seed, "SVD start-vector seed");
    den_mirror.add_string("--out", den.out,
                          "output directory (default CPGD_OUTPUT_DIR or .)");
    den_cmd->add_option("--config", den.config,
                        "flat key = value defaults file");

    BenchOptions ben;
    CLI::App* ben_cmd = app.add_subcommand(
        "bench", "positioning-error sweep over oversampling and noise, plus "
                 "the conditioning table");
    FlagMirror ben_mirror(ben_cmd);
    ben_mirror.add_index("-K,--spikes", ben.spikes, "spike count (default 9)");
    ben_mirror.add_index("-L,--samples", ben.samples,
                         "sample count (default 73)");
    ben_mirror.add_index_list("--gammas", ben.gammas,
                              "comma-separated oversampling factors "
                              "(default 1,2,3,4,5)");
    ben_mirror.add_double_list(
        "--psnrs", ben.psnrs,
        "comma-separated peak SNRs in dB, inf allowed "
        "(default -30,-20,-10,0,10,20,30)");
    ben_mirror.add_index("--trials", ben.trials,
                         "noise realisations per cell (default 24)");
    ben_mirror.add_string_list(
        "--methods", ben.methods,
        "comma-separated methods (default cpgd,genfri,ls-cadzow)");
    ben_mirror.add_index("--sweeps", ben.sweeps,
                         "denoiser sweeps per solver step (default 10)");
    ben_mirror.add_index("--draws", ben.draws,
                         "scheme draws per conditioning row (default 20)");
    ben_mirror.add_seed("--seed", ben.seed, "base seed (default 42)");
    ben_mirror.add_string("--out", ben.out,
                          "output directory (default CPGD_OUTPUT_DIR or .)");
    CLI::Option* full_flag = ben_cmd->add_flag(
        "--full", ben.full, "run the full 192-trial grid");
    full_flag->excludes(ben_mirror.option("--trials"));
    ben_cmd->add_option("--config", ben.config,
                        "flat key = value defaults file");

    TimeOptions tim;
    CLI::App* tim_cmd = app.add_subcommand(
        "time", "single-iteration scaling study with fitted log-log slopes");
    FlagMirror tim_mirror(tim_cmd);
    tim_mirror.add_index_list(
        "--sizes", tim.sizes,
        "comma-separated odd increasing coefficient counts "
        "(default 19,37,73,145,291)");
    tim_mirror.add_index("-K,--spikes", tim.spikes, "spike count (default 9)");
    tim_mirror.add_seed("--seed", tim.seed, "instance seed (default 42)");
    tim_mirror.add_index("--max-n", tim.max_n,
                         "largest size timed for the cubic-cost baseline "
                         "(default 401)");
    tim_mirror.add_string("--out", tim.out,
                          "output directory (default CPGD_OUTPUT_DIR or .)");
    tim_cmd->add_option("--config", tim.config,
                        "flat key = value defaults file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (app.got_subcommand(sim_cmd)) return run_simulate(sim, sim_mirror);
        if (app.got_subcommand(rec_cmd)) return run_recover(rec, rec_mirror);
        if (app.got_subcommand(den_cmd)) return run_denoise(den, den_mirror);
        if (app.got_subcommand(ben_cmd)) return run_bench(ben, ben_mirror);
        if (app.got_subcommand(tim_cmd)) return run_time(tim, tim_mirror);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;  // unreachable: a subcommand is required
}
