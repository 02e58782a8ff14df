#include "cpgd/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cpgd/lowrank.hpp"
#include "cpgd/random.hpp"

namespace cpgd {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start)
        .count();
}

void check_solver_config(const ForwardModel& model, const SolverConfig& cfg,
                         bool needs_step) {
    const Index m = (model.coefficients() - 1) / 2;
    if (cfg.rank < 1) throw std::invalid_argument("solver: rank must be >= 1");
    if (cfg.rank > cfg.order)
        throw std::invalid_argument("solver: rank must not exceed the order");
    if (cfg.order > m)
        throw std::invalid_argument("solver: order must not exceed the half bandwidth");
    if (cfg.map_iterations < 0)
        throw std::invalid_argument("solver: map iterations must be >= 0");
    if (cfg.max_iterations < 1)
        throw std::invalid_argument("solver: max iterations must be >= 1");
    if (std::isnan(cfg.radius) || cfg.radius <= 0)
        throw std::invalid_argument("solver: radius must be positive");
    if (!(cfg.rel_tol > 0))
        throw std::invalid_argument("solver: relative tolerance must be positive");
    if (needs_step && (!(cfg.step_size > 0) || !std::isfinite(cfg.step_size)))
        throw std::invalid_argument("solver: step size must be positive and finite");
}

double relative_change(double step, double base) {
    if (base > 0) return step / base;
    return step == 0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

ForwardModel::ForwardModel(ComplexMatrix matrix, ComplexVector observations)
    : matrix_(std::move(matrix)), observations_(std::move(observations)) {
    if (matrix_.rows() < 1)
        throw std::invalid_argument("ForwardModel: at least one sample required");
    if (matrix_.cols() < 3 || matrix_.cols() % 2 == 0)
        throw std::invalid_argument("ForwardModel: coefficient count must be odd and >= 3");
    if (observations_.size() != matrix_.rows())
        throw std::invalid_argument("ForwardModel: observation length must match the sample count");
}

void ForwardModel::ensure_singulars() const {
    if (sigma_max_ >= 0) return;
    // Values straight from G; a Gram eigensolve cannot resolve ratios near
    // the 1e-10 injectivity threshold.
    const Eigen::BDCSVD<ComplexMatrix> svd(matrix_);
    sigma_max_ = svd.singularValues()(0);
    sigma_min_ = matrix_.rows() < matrix_.cols()
                     ? 0.0
                     : svd.singularValues()(svd.singularValues().size() - 1);
}

double ForwardModel::largest_singular() const {
    ensure_singulars();
    return sigma_max_;
}

double ForwardModel::smallest_singular() const {
    ensure_singulars();
    return sigma_min_;
}

bool ForwardModel::injective() const {
    ensure_singulars();
    return sigma_min_ > 1e-10 * sigma_max_;
}

std::pair<double, double> spectral_bounds(const ComplexMatrix& g) {
    if (g.size() == 0 || g.norm() == 0)
        throw std::invalid_argument("spectral_bounds: matrix must be nonzero");
    const Index n = g.cols();
    const auto dense = [&]() -> std::pair<double, double> {
        const Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
            g.adjoint() * g, Eigen::EigenvaluesOnly);
        const double lo = std::max(es.eigenvalues()(0), 0.0);
        return {2.0 * lo, 2.0 * es.eigenvalues()(n - 1)};
    };
    if (n <= 1024) return dense();
    try {
        const PartialSVD top = partial_svd(dense_operator(g), 1, 1e-9);
        const double lam_max = top.singular_values(0) * top.singular_values(0);
        // Largest eigenpair of lam_max I - G^H G gives the smallest of G^H G.
        LinearOperator shifted;
        shifted.rows = n;
        shifted.cols = n;
        shifted.apply = [&g, lam_max](const ComplexVector& u) -> ComplexVector {
            return lam_max * u - g.adjoint() * (g * u);
        };
        shifted.apply_adjoint = shifted.apply;  // Hermitian
        const PartialSVD bottom = partial_svd(shifted, 1, 1e-6);
        const double lam_min =
            std::max(lam_max - bottom.singular_values(0), 0.0);
        return {2.0 * lam_min, 2.0 * lam_max};
    } catch (const std::runtime_error&) {
        return dense();
    }
}

std::pair<double, double> step_size_range(double beta, Index order) {
    if (!(beta > 0) || !std::isfinite(beta))
        throw std::invalid_argument("step_size_range: beta must be positive and finite");
    if (order < 1)
        throw std::invalid_argument("step_size_range: order must be >= 1");
    const double margin = 1.0 / std::sqrt(static_cast<double>(order + 1));
    return {(1.0 - margin) / beta, (1.0 + margin) / beta};
}

double default_step_size(const ForwardModel& model) {
    const ComplexMatrix& g = model.matrix();
    if (g.norm() == 0)
        throw std::invalid_argument("default_step_size: matrix must be nonzero");
    if (g.cols() <= 1024) return 1.0 / spectral_bounds(g).second;
    // Only the top of the spectrum sets the step; skip the lower bound, whose
    // shifted iteration would drag a dense eigensolve in at this size.  Top
    // edges of these spectra cluster, so accept a loose Ritz residual and pad
    // the value by it, keeping the step on the safe side of 1/beta (within a
    // couple percent under it).
    const PartialSVD top = partial_svd(dense_operator(g), 1, 1e-2);
    const double sigma = top.singular_values(0) + top.residual_estimate;
    return 1.0 / (2.0 * sigma * sigma);
}

double default_radius(const ForwardModel& model) {
    if (model.samples() >= model.coefficients() && model.injective())
        return std::numeric_limits<double>::infinity();
    return model.observations().norm();
}

FourierVector gradient_step(const FourierVector& x, const ForwardModel& model,
                            double tau) {
    if (x.size() != model.coefficients())
        throw std::invalid_argument("gradient_step: coefficient length mismatch");
    if (!(tau > 0) || !std::isfinite(tau))
        throw std::invalid_argument("gradient_step: step size must be positive and finite");
    const ComplexVector residual = model.matrix() * x.values() - model.observations();
    return FourierVector(x.values() -
                         2.0 * tau * (model.matrix().adjoint() * residual));
}

RecoveryTrace cpgd(const ForwardModel& model, const SolverConfig& cfg) {
    check_solver_config(model, cfg, /*needs_step=*/true);
    const auto start = Clock::now();
    const DenoiseConfig map{cfg.rank, cfg.order, cfg.map_iterations, cfg.radius,
                            cfg.seed};
    RecoveryTrace trace;
    FourierVector x = FourierVector::zero((model.coefficients() - 1) / 2);
    for (Index k = 0; k < cfg.max_iterations; ++k) {
        const FourierVector z = gradient_step(x, model, cfg.step_size);
        // Must fire before the denoiser: a non-finite matrix silently maps
        // to zero under the SVD, which would restart the divergence cycle.
        if (!z.values().allFinite())
            throw std::runtime_error("cpgd: iterates left the finite range");
        const FourierVector next = inexact_prox(z, map);
        if (!next.values().allFinite())
            throw std::runtime_error("cpgd: iterates left the finite range");
        const double step = (next.values() - x.values()).norm();
        const double rel = relative_change(step, x.values().norm());
        trace.residual_history.push_back(
            (model.matrix() * next.values() - model.observations()).norm());
        trace.step_history.push_back(step);
        trace.rel_change_history.push_back(rel);
        x = next;
        ++trace.iterations;
        if (rel < cfg.rel_tol) {
            trace.converged = true;
            break;
        }
    }
    trace.coefficients = x;
    trace.wall_time_ms = elapsed_ms(start);
    return trace;
}

RecoveryTrace ls_cadzow(const ForwardModel& model, const SolverConfig& cfg) {
    check_solver_config(model, cfg, /*needs_step=*/false);
    const auto start = Clock::now();
    const Eigen::JacobiSVD<ComplexMatrix> svd(
        model.matrix(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sigma = svd.singularValues();
    const double cutoff = kLeastSquaresCutoff * sigma(0);
    ComplexVector projected = svd.matrixU().adjoint() * model.observations();
    for (Index i = 0; i < sigma.size(); ++i)
        projected(i) = sigma(i) >= cutoff ? projected(i) / sigma(i) : Complex(0);
    const FourierVector raw(svd.matrixV() * projected);
    const DenoiseConfig map{cfg.rank, cfg.order, cfg.map_iterations,
                            std::numeric_limits<double>::infinity(), cfg.seed};
    RecoveryTrace trace;
    trace.coefficients = cadzow_denoise(raw, map);
    trace.iterations = 1;
    trace.residual_history = {(model.matrix() * trace.coefficients.values() -
                               model.observations())
                                  .norm()};
    trace.step_history = {trace.coefficients.values().norm()};
    trace.rel_change_history = {std::numeric_limits<double>::infinity()};
    trace.converged = true;
    trace.wall_time_ms = elapsed_ms(start);
    return trace;
}

namespace detail {

GenFriWorkspace::GenFriWorkspace(const ForwardModel& m, Index filter_order)
    : model(&m),
      order(filter_order),
      gram(m.matrix().adjoint() * m.matrix()),
      rhs(m.matrix().adjoint() * m.observations()) {
    const ComplexVector beta =
        m.matrix().colPivHouseholderQr().solve(m.observations());
    tbeta = toeplitzify(FourierVector(beta), order).dense();
}

ComplexMatrix genfri_filter_matrix(const ComplexVector& h, Index n) {
    const Index order = h.size() - 1;
    // R(h)_{i,m} = h_{order+i-m} on the band m in [i, i+order].
    ComplexMatrix r = ComplexMatrix::Zero(n - order, n);
    for (Index i = 0; i < n - order; ++i)
        for (Index j = 0; j <= order; ++j) r(i, order + i - j) = h(j);
    return r;
}

ComplexVector genfri_x_update(const GenFriWorkspace& w, const ComplexVector& h) {
    const Index n = w.gram.rows();
    const Index order = h.size() - 1;
    const Index constraint_rows = n - order;
    const Index dim = n + constraint_rows;
    const ComplexMatrix r = genfri_filter_matrix(h, n);
    ComplexMatrix kkt = ComplexMatrix::Zero(dim, dim);
    kkt.topLeftCorner(n, n) = w.gram;
    kkt.bottomLeftCorner(constraint_rows, n) = r;
    kkt.topRightCorner(n, constraint_rows) = r.adjoint();
    ComplexVector rhs = ComplexVector::Zero(dim);
    rhs.head(n) = w.rhs;
    const ComplexVector solution = kkt.partialPivLu().solve(rhs);
    // LU does not signal rank deficiency; reject by residual instead.
    if (!solution.allFinite() ||
        (kkt * solution - rhs).norm() >
            1e-8 * (rhs.norm() + kkt.norm() * solution.norm()))
        throw std::runtime_error("genfri: singular constraint system");
    return solution.head(n);
}

ComplexVector genfri_h_update(const GenFriWorkspace& w,
                              const ComplexVector& previous,
                              const ComplexVector& seed) {
    const Index n = w.gram.rows();
    const Index taps = w.order + 1;
    if (previous.size() != taps || seed.size() != taps)
        throw std::invalid_argument("genfri: filter length must be order + 1");
    const Index rows = n - w.order;
    const Index dim = taps + rows + n + 1;  // = 2n + 2
    const ComplexMatrix r = genfri_filter_matrix(previous, n);
    ComplexMatrix sys = ComplexMatrix::Zero(dim, dim);
    sys.block(0, taps, taps, rows) = w.tbeta.adjoint();
    sys.block(0, taps + rows + n, taps, 1) = seed;
    sys.block(taps, 0, rows, taps) = w.tbeta;
    sys.block(taps, taps + rows, rows, n) = -r;
    sys.block(taps + rows, taps, n, rows) = -r.adjoint();
    sys.block(taps + rows, taps + rows, n, n) = w.gram;
    sys.block(taps + rows + n, 0, 1, taps) = seed.adjoint();
    ComplexVector rhs = ComplexVector::Zero(dim);
    rhs(dim - 1) = 1.0;
    const ComplexVector solution = sys.partialPivLu().solve(rhs);
    if (!solution.allFinite() ||
        (sys * solution - rhs).norm() >
            1e-8 * (rhs.norm() + sys.norm() * solution.norm()))
        throw std::runtime_error("genfri: singular filter system");
    const ComplexVector h = solution.head(taps);
    const Complex overlap = seed.dot(h);  // pinned to 1 by the last row
    if (std::abs(overlap) == 0)
        throw std::runtime_error("genfri: filter update collapsed");
    return h / overlap;
}

}  // namespace detail

GenFriResult genfri_detailed(const ForwardModel& model, const SolverConfig& cfg,
                             Index inner_iterations, Index initialisations) {
    check_solver_config(model, cfg, /*needs_step=*/false);
    if (inner_iterations < 1 || initialisations < 1)
        throw std::invalid_argument("genfri: iteration counts must be >= 1");
    if (!model.injective())
        throw std::invalid_argument(
            "genfri: forward matrix must be injective (square-or-tall and "
            "well-conditioned)");
    const auto start = Clock::now();
    const detail::GenFriWorkspace workspace(model, cfg.order);
    rng::Engine eng(cfg.seed ^ 0x8c5fab9ed1a3c2f7ULL);
    GenFriResult best;
    double best_mismatch = std::numeric_limits<double>::infinity();
    bool any = false;
    for (Index init = 0; init < initialisations; ++init) {
        ComplexVector h0(cfg.order + 1);
        for (Index i = 0; i <= cfg.order; ++i) h0(i) = rng::complex_gaussian(eng);
        ComplexVector h = h0;
        std::vector<double> residuals, steps, rels;
        ComplexVector x = ComplexVector::Zero(model.coefficients());
        ComplexVector best_x, best_h;
        double init_best = std::numeric_limits<double>::infinity();
        double norm_err = 0, annih = 0;
        for (Index it = 0; it < inner_iterations; ++it) {
            ComplexVector next;
            try {
                h = detail::genfri_h_update(workspace, h, h0);
                next = detail::genfri_x_update(workspace, h);
            } catch (const std::runtime_error&) {
                break;  // singular system: abandon this seed, try the next
            }
            norm_err = std::max(norm_err, std::abs(h0.dot(h) - Complex(1)));
            const double step = (next - x).norm();
            rels.push_back(relative_change(step, x.norm()));
            steps.push_back(step);
            const double mismatch =
                (model.matrix() * next - model.observations()).norm();
            residuals.push_back(mismatch);
            x = next;
            const ToeplitzEmbedding t = toeplitzify(FourierVector(x), cfg.order);
            const double fro = t.frobenius_norm();
            if (fro > 0) annih = std::max(annih, t.apply(h).norm() / fro);
            if (mismatch < init_best) {
                init_best = mismatch;
                best_x = x;
                best_h = h;
            }
        }
        if (residuals.empty()) continue;
        if (!any || init_best < best_mismatch) {
            any = true;
            best_mismatch = init_best;
            best.trace.coefficients = FourierVector(best_x);
            best.trace.iterations = static_cast<Index>(residuals.size());
            best.trace.residual_history = std::move(residuals);
            best.trace.step_history = std::move(steps);
            best.trace.rel_change_history = std::move(rels);
            best.filter = best_h;
            best.filter_seed = h0;
            best.initialisation = init;
            best.max_normalisation_error = norm_err;
            best.max_annihilation_residual = annih;
        }
    }
    if (!any)
        throw std::runtime_error(
            "genfri: every initialisation hit a singular constraint system");
    best.trace.converged = std::isfinite(best_mismatch);
    best.trace.wall_time_ms = elapsed_ms(start);
    return best;
}

RecoveryTrace genfri(const ForwardModel& model, const SolverConfig& cfg,
                     Index inner_iterations, Index initialisations) {
    return genfri_detailed(model, cfg, inner_iterations, initialisations).trace;
}

}  // namespace cpgd
