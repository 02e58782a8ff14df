#pragma once

#include <limits>

#include "cpgd/lowrank.hpp"
#include "cpgd/toeplitz.hpp"

namespace cpgd {

/// Parameters of the alternating-projection denoiser.
/// Requires 1 <= rank <= order <= M and iterations >= 0 (0 is the empty
/// composition, i.e. the identity); radius may be infinite.
struct DenoiseConfig {
    Index rank = 1;
    Index order = 1;
    Index iterations = 10;
    double radius = std::numeric_limits<double>::infinity();
    uint64_t svd_seed = kDefaultSvdSeed;  // matrix-free path start vectors
};

/// Projection onto the rho-ball of the weighted Frobenius norm:
/// X when |W . X|_F <= rho, else rho X / |W . X|_F.
ComplexMatrix project_ball_weighted(const ComplexMatrix& x,
                                    const ToeplitzEmbedding& w, double rho);

/// Classic Cadzow denoising: alternate rank truncation and Toeplitz
/// projection n times on the embedding of x, then pull back the generator.
/// cfg.radius is ignored (no ball constraint).
FourierVector cadzow_denoise(const FourierVector& x, const DenoiseConfig& cfg);

/// Inexact MAP proximal step: each sweep applies, right to left, the weighted
/// ball projection, the (one-step-EM, unweighted) rank truncation, and the
/// Toeplitz projection.  Reduces to cadzow_denoise when radius is infinite.
FourierVector inexact_prox(const FourierVector& x, const DenoiseConfig& cfg);

}  // namespace cpgd
