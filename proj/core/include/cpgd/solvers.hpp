#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "cpgd/denoise.hpp"
#include "cpgd/types.hpp"

namespace cpgd {

/// Linear measurement model y = G xhat + noise, G of shape L x N with L >= 1
/// and N odd.  The extreme singular values of G are computed on first use and
/// cached; injective means sigma_min > 1e-10 sigma_max (always false for
/// L < N).
class ForwardModel {
public:
    ForwardModel() = default;
    ForwardModel(ComplexMatrix matrix, ComplexVector observations);

    const ComplexMatrix& matrix() const { return matrix_; }
    const ComplexVector& observations() const { return observations_; }
    Index samples() const { return matrix_.rows(); }
    Index coefficients() const { return matrix_.cols(); }

    double largest_singular() const;
    double smallest_singular() const;
    bool injective() const;

private:
    void ensure_singulars() const;

    ComplexMatrix matrix_;
    ComplexVector observations_;
    mutable double sigma_min_ = -1;  // < 0 until computed
    mutable double sigma_max_ = -1;
};

struct SolverConfig {
    double step_size = 0;       // tau, must be positive
    double radius = std::numeric_limits<double>::infinity();  // rho
    Index map_iterations = 10;  // denoiser sweeps per outer step
    Index order = 0;            // P
    Index rank = 0;             // K
    Index max_iterations = 500;
    double rel_tol = 1e-4;      // stop when |x_k - x_{k-1}| / |x_{k-1}| drops below
    uint64_t seed = kDefaultSvdSeed;
};

/// Per-iteration record of a solver run.  All histories have length
/// `iterations`; entry k refers to the state after outer step k+1.
struct RecoveryTrace {
    FourierVector coefficients;
    Index iterations = 0;
    std::vector<double> residual_history;    // |G x_k - y|
    std::vector<double> step_history;        // |x_k - x_{k-1}|
    std::vector<double> rel_change_history;  // step / |x_{k-1}|
    bool converged = false;
    double wall_time_ms = 0;
};

/// (alpha, beta) = (2 lambda_min, 2 lambda_max) of G^H G, to 1e-8 relative.
/// Dense Hermitian eigensolve up to 1024 columns; beyond that an iterative
/// extreme-pair estimate that falls back to the dense solve when it fails to
/// converge.
std::pair<double, double> spectral_bounds(const ComplexMatrix& g);

/// Step-size window (1/beta)(1 -+ 1/sqrt(order+1)) inside which the composite
/// iteration contracts whenever the gradient map does.
std::pair<double, double> step_size_range(double beta, Index order);

/// The default step 1/beta for the model.  Exact up to 1024 coefficients;
/// beyond that beta is estimated iteratively and padded by the Ritz residual,
/// so the step sits within a few percent under 1/beta, never above.
double default_step_size(const ForwardModel& model);

/// Infinite for a square-or-tall injective model, |y|_2 otherwise.
double default_radius(const ForwardModel& model);

/// x - 2 tau G^H (G x - y).
FourierVector gradient_step(const FourierVector& x, const ForwardModel& model,
                            double tau);

/// Projected-gradient recovery: from x = 0, alternate gradient_step and
/// inexact_prox until the relative change drops below cfg.rel_tol or
/// cfg.max_iterations is hit.  Throws if an iterate leaves the finite range.
RecoveryTrace cpgd(const ForwardModel& model, const SolverConfig& cfg);

/// Relative singular-value cutoff of the least-squares stage below.
inline constexpr double kLeastSquaresCutoff = 1e-4;

/// Truncated min-norm least squares followed by one cadzow_denoise pass.
RecoveryTrace ls_cadzow(const ForwardModel& model, const SolverConfig& cfg);

struct GenFriResult {
    RecoveryTrace trace;
    ComplexVector filter;       // best annihilating filter h, <h, h0> = 1
    ComplexVector filter_seed;  // the h0 it was grown from
    Index initialisation = 0;   // which restart won
    double max_normalisation_error = 0;    // max |<h, h0> - 1| seen
    double max_annihilation_residual = 0;  // max |T(x) h| / |T(x)|_F seen
};

/// Alternating structured low-rank recovery: per random filter seed h0, loop
/// `inner_iterations` times { h <- weighted annihilation solve against the
/// embedded least-squares coefficients; x <- argmin |G x - y|^2 s.t.
/// T_P(x) h = 0 }; keep the (x, h) pair with the smallest data mismatch
/// |G x - y| across all iterations and initialisations.  Requires an
/// injective model.  cfg.order + 1 is the filter length; on noiseless data
/// an oversized filter (order above the spike count) makes the filter system
/// rank-deficient and every initialisation fails.  Deterministic in cfg.seed.
GenFriResult genfri_detailed(const ForwardModel& model, const SolverConfig& cfg,
                             Index inner_iterations = 50,
                             Index initialisations = 15);
RecoveryTrace genfri(const ForwardModel& model, const SolverConfig& cfg,
                     Index inner_iterations = 50, Index initialisations = 15);

namespace detail {

/// Pieces shared by both update systems: G^H G, G^H y, and the Toeplitz
/// embedding T_P(beta) of the unconstrained least-squares solution beta.
struct GenFriWorkspace {
    GenFriWorkspace(const ForwardModel& model, Index order);
    const ForwardModel* model = nullptr;
    Index order = 0;
    ComplexMatrix gram;   // G^H G
    ComplexVector rhs;    // G^H y
    ComplexMatrix tbeta;  // T_P(beta) dense, (N - order) x (order + 1)
};

/// Dense (N - order) x N banded matrix with R(h) x = T_P(x) h.
ComplexMatrix genfri_filter_matrix(const ComplexVector& h, Index n);

/// Equality-constrained least squares via the KKT system
/// [G^H G, R(h)^H; R(h), 0] [x; mult] = [G^H y; 0]; square solve of size
/// 2N - P.  Throws when the system is numerically singular.
ComplexVector genfri_x_update(const GenFriWorkspace& w, const ComplexVector& h);

/// One filter refinement: solve the coupled stationarity system
///   [ 0        T(beta)^H   0        h0 ] [h  ]   [0]
///   [ T(beta)  0          -R(prev)  0  ] [l  ] = [0]
///   [ 0       -R(prev)^H   G^H G    0  ] [aux]   [0]
///   [ h0^H     0           0        0  ] [mu ]   [1]
/// of size 2N + 2.  Eliminating (l, aux, mu) shows h minimises the weighted
/// annihilation energy h^H T(beta)^H W^{-1} T(beta) h on the slice
/// <h, h0> = 1, with W = R(prev) (G^H G)^{-1} R(prev)^H.  Throws when the
/// system is numerically singular.
ComplexVector genfri_h_update(const GenFriWorkspace& w,
                              const ComplexVector& previous,
                              const ComplexVector& seed);

}  // namespace detail

}  // namespace cpgd
