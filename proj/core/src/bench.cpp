#include "cpgd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <Eigen/SVD>

#include "cpgd/denoise.hpp"
#include "cpgd/random.hpp"
#include "cpgd/solvers.hpp"

namespace cpgd::bench {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
}

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Interpolated order statistic on a sorted sample (numpy's default rule).
double quantile(const std::vector<double>& sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    // Equal neighbours short-circuit so infinite samples stay infinite
    // instead of producing inf - inf.
    if (frac == 0.0 || sorted[lo] == sorted[lo + 1]) return sorted[lo];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return quantile(values, 0.5);
}

struct Cell {
    Index gamma = 0;
    Index psnr_index = 0;
};

/// One (stream, scheme, measurements) instance shared by all methods.
struct TrialSetup {
    DiracStream stream;
    SamplingScheme scheme;
    ForwardModel model;
    double sigma = 0;
};

TrialSetup make_setup(const ExperimentGrid& grid, const Cell& cell,
                      Index trial) {
    const uint64_t key = grid.base_seed + static_cast<uint64_t>(trial);
    const uint64_t salt =
        static_cast<uint64_t>(cell.gamma) * 1000 +
        static_cast<uint64_t>(cell.psnr_index);
    const Index m = cell.gamma * grid.spikes;
    DiracStream stream =
        random_stream(grid.spikes, rng::derive(key, salt * 4 + 0));
    SamplingScheme scheme =
        random_scheme(grid.samples, m, rng::derive(key, salt * 4 + 1));
    const double sigma =
        psnr_to_sigma(grid.psnrs_db[cell.psnr_index], stream);
    ForwardModel model = synthesize_measurements(
        stream, scheme, sigma, rng::derive(key, salt * 4 + 2));
    return {std::move(stream), std::move(scheme), std::move(model), sigma};
}

RecoveryTrace run_method(const std::string& method, const TrialSetup& setup,
                         const ExperimentGrid& grid, Index m) {
    SolverConfig cfg;
    cfg.rank = grid.spikes;
    cfg.order = m;
    cfg.map_iterations = grid.map_iterations;
    if (method == "cpgd") {
        cfg.step_size = default_step_size(setup.model);
        cfg.radius = default_radius(setup.model);
        // Noiseless cells grade exactness of the method, not of the default
        // early-stopping rule, so run the descent to machine convergence.
        if (setup.sigma == 0) cfg.rel_tol = 1e-10;
        return cpgd::cpgd(setup.model, cfg);
    }
    if (method == "ls-cadzow") return ls_cadzow(setup.model, cfg);
    if (method == "genfri") {
        cfg.order = grid.spikes;  // filter length = spike count + 1
        return genfri(setup.model, cfg);
    }
    throw std::invalid_argument("bench: unknown method '" + method + "'");
}

std::vector<BenchmarkRecord> run_trial(const ExperimentGrid& grid,
                                       Index trial) {
    std::vector<BenchmarkRecord> out;
    for (size_t gi = 0; gi < grid.gammas.size(); ++gi) {
        const Index gamma = grid.gammas[gi];
        const Index m = gamma * grid.spikes;
        for (size_t pi = 0; pi < grid.psnrs_db.size(); ++pi) {
            const TrialSetup setup =
                make_setup(grid, {gamma, static_cast<Index>(pi)}, trial);
            for (const std::string& method : grid.methods) {
                if (method == "genfri" && 2 * m + 1 > grid.samples) continue;
                BenchmarkRecord rec;
                rec.method = method;
                rec.gamma = gamma;
                rec.psnr_db = grid.psnrs_db[pi];
                rec.trial = trial;
                rec.seed = grid.base_seed + static_cast<uint64_t>(trial);
                const auto start = Clock::now();
                try {
                    const RecoveryTrace trace =
                        run_method(method, setup, grid, m);
                    const std::vector<double> estimate = recover_locations(
                        trace.coefficients, grid.spikes, m);
                    rec.positioning_error =
                        positioning_error(setup.stream.locations, estimate);
                    rec.iterations = trace.iterations;
                    rec.converged = trace.converged;
                } catch (const std::exception&) {
                    rec.positioning_error = 0.5;
                    rec.iterations = 0;
                    rec.converged = false;
                }
                rec.wall_time_ms = elapsed_ms(start);
                out.push_back(std::move(rec));
            }
        }
    }
    return out;
}

void check_grid(const ExperimentGrid& grid) {
    if (grid.spikes < 1 || grid.samples < 1 || grid.trials < 1)
        throw std::invalid_argument("bench: counts must be >= 1");
    for (const Index gamma : grid.gammas)
        if (gamma < 1)
            throw std::invalid_argument("bench: gamma must be >= 1");
    for (const std::string& method : grid.methods)
        if (method != "cpgd" && method != "genfri" && method != "ls-cadzow")
            throw std::invalid_argument("bench: unknown method '" + method +
                                        "'");
}

double fit_slope(const std::vector<double>& log_n,
                 const std::vector<double>& log_t) {
    const auto n = static_cast<double>(log_n.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < log_n.size(); ++i) {
        sx += log_n[i];
        sy += log_t[i];
        sxx += log_n[i] * log_n[i];
        sxy += log_n[i] * log_t[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Median of 5 timed calls after one discarded warm-up.
template <typename Body>
double time_body(Body&& body) {
    body();
    std::vector<double> times;
    times.reserve(5);
    for (int rep = 0; rep < 5; ++rep) {
        const auto start = Clock::now();
        body();
        times.push_back(elapsed_ms(start));
    }
    return median_of(std::move(times));
}

}  // namespace

std::vector<Index> minimal_assignment(const RealMatrix& cost) {
    const Index k = cost.rows();
    if (cost.cols() != k || k < 1)
        throw std::invalid_argument("assignment: cost matrix must be square");
    if (!cost.allFinite())
        throw std::invalid_argument("assignment: cost matrix must be finite");
    // Hungarian algorithm with row/column potentials, 1-based with column 0
    // as the scratch slot.
    std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
    std::vector<Index> match(k + 1, 0), way(k + 1, 0);
    for (Index i = 1; i <= k; ++i) {
        match[0] = i;
        Index j0 = 0;
        std::vector<double> minv(k + 1, kInf);
        std::vector<char> used(k + 1, 0);
        do {
            used[j0] = 1;
            const Index i0 = match[j0];
            Index j1 = 0;
            double delta = kInf;
            for (Index j = 1; j <= k; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (Index j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const Index j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<Index> assigned(k, 0);
    for (Index j = 1; j <= k; ++j) assigned[match[j] - 1] = j - 1;
    return assigned;
}

double minimal_assignment_cost(const RealMatrix& cost) {
    const std::vector<Index> assigned = minimal_assignment(cost);
    double total = 0;
    for (Index i = 0; i < cost.rows(); ++i) total += cost(i, assigned[i]);
    return total;
}

double positioning_error(const std::vector<double>& truth,
                         const std::vector<double>& estimate) {
    if (truth.size() != estimate.size() || truth.empty())
        throw std::invalid_argument(
            "positioning_error: location counts must match");
    const auto k = static_cast<Index>(truth.size());
    RealMatrix cost(k, k);
    for (Index i = 0; i < k; ++i)
        for (Index j = 0; j < k; ++j)
            cost(i, j) = circular_distance(truth[i], estimate[j]);
    return minimal_assignment_cost(cost) / static_cast<double>(k);
}

std::vector<BenchmarkRecord> run_sweep(const ExperimentGrid& grid) {
    check_grid(grid);
    const Index workers = std::max<Index>(
        1, std::min<Index>(grid.trials,
                           std::thread::hardware_concurrency()));
    std::vector<std::future<std::vector<BenchmarkRecord>>> chunks;
    chunks.reserve(workers);
    for (Index w = 0; w < workers; ++w)
        chunks.push_back(std::async(std::launch::async, [&grid, w, workers] {
            std::vector<BenchmarkRecord> part;
            for (Index trial = w; trial < grid.trials; trial += workers) {
                std::vector<BenchmarkRecord> rows = run_trial(grid, trial);
                part.insert(part.end(), std::make_move_iterator(rows.begin()),
                            std::make_move_iterator(rows.end()));
            }
            return part;
        }));
    std::vector<BenchmarkRecord> records;
    for (auto& chunk : chunks) {
        std::vector<BenchmarkRecord> part = chunk.get();
        records.insert(records.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
    }
    std::sort(records.begin(), records.end(),
              [](const BenchmarkRecord& a, const BenchmarkRecord& b) {
                  return std::tie(a.method, a.gamma, a.psnr_db, a.trial) <
                         std::tie(b.method, b.gamma, b.psnr_db, b.trial);
              });
    return records;
}

std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records) {
    std::vector<SummaryRow> rows;
    size_t start = 0;
    while (start < records.size()) {
        size_t stop = start;
        std::vector<double> errors;
        while (stop < records.size() &&
               records[stop].method == records[start].method &&
               records[stop].gamma == records[start].gamma &&
               records[stop].psnr_db == records[start].psnr_db) {
            errors.push_back(records[stop].positioning_error);
            ++stop;
        }
        std::sort(errors.begin(), errors.end());
        SummaryRow row;
        row.method = records[start].method;
        row.gamma = records[start].gamma;
        row.psnr_db = records[start].psnr_db;
        row.median_error = quantile(errors, 0.5);
        row.q25 = quantile(errors, 0.25);
        row.q75 = quantile(errors, 0.75);
        row.n_trials = static_cast<Index>(errors.size());
        rows.push_back(std::move(row));
        start = stop;
    }
    return rows;
}

std::vector<ConditionRow> condition_table(const ExperimentGrid& grid,
                                          Index draws) {
    check_grid(grid);
    if (draws < 1) throw std::invalid_argument("bench: draws must be >= 1");
    std::vector<ConditionRow> rows;
    for (const Index gamma : grid.gammas) {
        const Index m = gamma * grid.spikes;
        std::vector<double> conditions;
        conditions.reserve(draws);
        for (Index d = 0; d < draws; ++d) {
            const SamplingScheme scheme = random_scheme(
                grid.samples, m,
                rng::derive(grid.base_seed,
                            7000 + static_cast<uint64_t>(gamma) * 100 +
                                static_cast<uint64_t>(d)));
            const ComplexMatrix g = build_forward_matrix(scheme);
            const Eigen::JacobiSVD<ComplexMatrix> svd(g);
            const double top = svd.singularValues()(0);
            const double bottom =
                g.rows() < g.cols()
                    ? 0.0
                    : svd.singularValues()(svd.singularValues().size() - 1);
            conditions.push_back(bottom > 1e-10 * top
                                     ? (top / bottom) * (top / bottom)
                                     : kInf);
        }
        ConditionRow row;
        row.gamma = gamma;
        row.median_condition = median_of(std::move(conditions));
        row.injective = std::isfinite(row.median_condition);
        rows.push_back(row);
    }
    return rows;
}

TimingStudy timing_study(const std::vector<Index>& sizes, Index spikes,
                         uint64_t seed, Index genfri_max_n) {
    if (sizes.empty())
        throw std::invalid_argument("timing: at least one size required");
    for (size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 3 || sizes[i] % 2 == 0)
            throw std::invalid_argument("timing: sizes must be odd and >= 3");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("timing: sizes must be increasing");
    }
    TimingStudy study;
    std::vector<double> log_n_cpgd, log_t_cpgd, log_n_gen, log_t_gen;
    for (const Index n : sizes) {
        const Index m = (n - 1) / 2;
        const DiracStream stream =
            random_stream(spikes, rng::derive(seed, 2 * n));
        const SamplingScheme scheme = random_scheme(
            n, m, rng::derive(seed, 2 * n + 1), 0.5 / static_cast<double>(n));
        const ForwardModel model = synthesize_measurements(
            stream, scheme, psnr_to_sigma(10.0, stream),
            rng::derive(seed, 3 * n));
        TimingRow row;
        row.n = n;

        const double tau = default_step_size(model);
        DenoiseConfig map;
        map.rank = spikes;
        map.order = m;
        map.iterations = 10;
        map.radius = default_radius(model);
        FourierVector x = FourierVector::zero(m);
        row.cpgd_iteration_ms = time_body([&] {
            x = inexact_prox(gradient_step(x, model, tau), map);
        });
        row.cpgd_total_ms = 100.0 * row.cpgd_iteration_ms;
        log_n_cpgd.push_back(std::log(static_cast<double>(n)));
        log_t_cpgd.push_back(std::log(row.cpgd_iteration_ms));

        if (n <= genfri_max_n) {
            const detail::GenFriWorkspace workspace(model, spikes);
            rng::Engine eng(rng::derive(seed, 4 * n));
            ComplexVector h0(spikes + 1);
            for (Index i = 0; i <= spikes; ++i)
                h0(i) = rng::complex_gaussian(eng);
            ComplexVector h = h0;
            row.genfri_iteration_ms = time_body([&] {
                h = detail::genfri_h_update(workspace, h, h0);
                detail::genfri_x_update(workspace, h);
            });
            row.genfri_total_ms = 750.0 * row.genfri_iteration_ms;
            log_n_gen.push_back(std::log(static_cast<double>(n)));
            log_t_gen.push_back(std::log(row.genfri_iteration_ms));
        }
        study.rows.push_back(row);
    }
    if (log_n_cpgd.size() > 1)
        study.cpgd_slope = fit_slope(log_n_cpgd, log_t_cpgd);
    if (log_n_gen.size() > 1)
        study.genfri_slope = fit_slope(log_n_gen, log_t_gen);
    return study;
}

}  // namespace cpgd::bench
