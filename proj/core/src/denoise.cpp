#include "cpgd/denoise.hpp"

#include <cmath>
#include <stdexcept>

namespace cpgd {

namespace {

void check_config(const FourierVector& x, const DenoiseConfig& cfg) {
    if (!x.values().allFinite())
        throw std::invalid_argument("denoise: coefficients must be finite");
    if (cfg.rank < 1) throw std::invalid_argument("denoise: rank must be >= 1");
    if (cfg.rank > cfg.order)
        throw std::invalid_argument("denoise: rank must not exceed the order");
    if (cfg.order > x.half_bandwidth())
        throw std::invalid_argument("denoise: order must not exceed the half bandwidth");
    if (cfg.iterations < 0)
        throw std::invalid_argument("denoise: iterations must be >= 0");
    if (std::isnan(cfg.radius) || cfg.radius <= 0)
        throw std::invalid_argument("denoise: radius must be positive");
}

// One alternating pass per iteration: optional ball rescale, rank truncation
// of the embedding, diagonal averaging back to a generator.  The generator is
// always Toeplitz-consistent at the ball step, where the weighted Frobenius
// norm of its embedding equals the generator 2-norm, so the projection is an
// exact rescale without forming the matrix.
FourierVector alternating_sweeps(const FourierVector& x,
                                 const DenoiseConfig& cfg, bool use_ball) {
    check_config(x, cfg);
    const Index n = x.size();
    FourierVector g = x;
    for (Index sweep = 0; sweep < cfg.iterations; ++sweep) {
        if (use_ball && std::isfinite(cfg.radius)) {
            const double norm = g.values().norm();
            if (norm > cfg.radius) g.values() *= cfg.radius / norm;
        }
        const ToeplitzEmbedding embedding = toeplitzify(g, cfg.order);
        const PartialSVD top = embedding_top_svd(embedding, cfg.rank, cfg.svd_seed);
        g = lowrank_toeplitz_pinv(top, n, cfg.order);
        // Huge finite factors can still overflow the averaging convolutions;
        // refuse to continue instead of feeding inf onward.
        if (!g.values().allFinite())
            throw std::runtime_error("denoise: sweep produced non-finite values");
    }
    return g;
}

}  // namespace

ComplexMatrix project_ball_weighted(const ComplexMatrix& x,
                                    const ToeplitzEmbedding& w, double rho) {
    if (x.rows() != w.rows() || x.cols() != w.cols())
        throw std::invalid_argument("project_ball_weighted: shape mismatch with the weight");
    if (std::isnan(rho) || rho <= 0)
        throw std::invalid_argument("project_ball_weighted: radius must be positive");
    double norm2 = 0;
    for (Index j = 0; j < x.cols(); ++j)
        for (Index i = 0; i < x.rows(); ++i)
            norm2 += std::norm(w.entry(i, j)) * std::norm(x(i, j));
    const double norm = std::sqrt(norm2);
    if (norm <= rho) return x;
    return x * (rho / norm);
}

FourierVector cadzow_denoise(const FourierVector& x, const DenoiseConfig& cfg) {
    return alternating_sweeps(x, cfg, /*use_ball=*/false);
}

FourierVector inexact_prox(const FourierVector& x, const DenoiseConfig& cfg) {
    return alternating_sweeps(x, cfg, /*use_ball=*/true);
}

}  // namespace cpgd
