#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpgd/fri.hpp"
#include "cpgd/types.hpp"

namespace cpgd::bench {

/// Monte-Carlo sweep definition: `spikes` Diracs observed through `samples`
/// irregular times at bandwidths M = gamma * spikes, one noise level per
/// PSNR entry, `trials` repetitions per cell.
struct ExperimentGrid {
    Index spikes = 9;
    Index samples = 73;
    std::vector<Index> gammas = {1, 2, 3, 4, 5};
    std::vector<double> psnrs_db = {-30, -20, -10, 0, 10, 20, 30};
    Index trials = 24;
    std::vector<std::string> methods = {"cpgd", "genfri", "ls-cadzow"};
    uint64_t base_seed = 42;
    Index map_iterations = 10;  // denoising sweeps inside cpgd / ls-cadzow
};

/// One recovery outcome.  positioning_error is the optimal-assignment mean
/// circular distance between true and estimated locations, as a fraction of
/// the period (in [0, 0.5]); runs that throw are recorded with the
/// worst-case 0.5 and converged = false rather than aborting the sweep.
struct BenchmarkRecord {
    std::string method;
    Index gamma = 0;
    double psnr_db = 0;
    Index trial = 0;
    uint64_t seed = 0;
    double positioning_error = 0;
    Index iterations = 0;
    double wall_time_ms = 0;
    bool converged = false;
};

/// Per-cell quartiles of positioning_error.
struct SummaryRow {
    std::string method;
    Index gamma = 0;
    double psnr_db = 0;
    double median_error = 0;
    double q25 = 0;
    double q75 = 0;
    Index n_trials = 0;
};

struct ConditionRow {
    Index gamma = 0;
    double median_condition = 0;  // kappa(G^H G); infinity once rank-deficient
    bool injective = false;
};

struct TimingRow {
    Index n = 0;
    double cpgd_iteration_ms = 0;
    double cpgd_total_ms = 0;  // iteration cost x 100
    double genfri_iteration_ms = 0;  // 0 when n exceeds the measurement cap
    double genfri_total_ms = 0;  // iteration cost x 750 (15 restarts x 50)
};

struct TimingStudy {
    std::vector<TimingRow> rows;
    double cpgd_slope = 0;  // least-squares slope of log time vs log n
    double genfri_slope = 0;
};

/// Minimum-cost perfect matching on a square cost matrix; returns the column
/// assigned to each row.  O(k^3) Hungarian algorithm with potentials.
std::vector<Index> minimal_assignment(const RealMatrix& cost);

/// Matching cost summed in row order (bit-stable against an enumeration of
/// the same assignment).
double minimal_assignment_cost(const RealMatrix& cost);

/// Mean circular distance between matched true and estimated locations,
/// minimised over assignments.  Both inputs live in [0, 1).
double positioning_error(const std::vector<double>& truth,
                         const std::vector<double>& estimate);

/// Runs the full grid.  Per (gamma, psnr, trial) cell a fresh stream, scheme
/// and noise draw are derived from base_seed + trial; every method sees the
/// same measurements and its coefficients go through the same P = M location
/// pipeline.  genfri is skipped whenever 2M + 1 exceeds the sample count.
/// Noiseless cells run the gradient descent to machine convergence so their
/// errors reflect the method, not the default early-stopping rule.
/// Trials run concurrently; records come back sorted by
/// (method, gamma, psnr, trial) and are bit-reproducible given base_seed
/// (wall times aside).
std::vector<BenchmarkRecord> run_sweep(const ExperimentGrid& grid);

/// Quartile summary per (method, gamma, psnr) cell, quantiles by linear
/// interpolation of order statistics.  Records must arrive grouped by cell,
/// as run_sweep returns them.
std::vector<SummaryRow> summarize(const std::vector<BenchmarkRecord>& records);

/// Median conditioning of G^H G per gamma over `draws` scheme draws.
std::vector<ConditionRow> condition_table(const ExperimentGrid& grid,
                                          Index draws = 20);

/// Single-iteration wall times per problem size (median of 5 after one
/// discarded warm-up), scaled to full reconstructions by the iteration
/// conventions of the two solvers.  Sizes must be odd and increasing; the
/// genfri systems are cubic in n, so its measurements stop at
/// genfri_max_n.  Slopes are fitted on the measured single-iteration times.
TimingStudy timing_study(const std::vector<Index>& sizes, Index spikes = 9,
                         uint64_t seed = 42, Index genfri_max_n = 401);

}  // namespace cpgd::bench
