#pragma once

#include <cstdint>
#include <functional>

#include "cpgd/toeplitz.hpp"
#include "cpgd/types.hpp"

namespace cpgd {

/// A matrix exposed through its products only.
struct LinearOperator {
    Index rows = 0;
    Index cols = 0;
    std::function<ComplexVector(const ComplexVector&)> apply;           // A u
    std::function<ComplexVector(const ComplexVector&)> apply_adjoint;   // A^H v
};

/// Owns a copy of the matrix.
LinearOperator dense_operator(ComplexMatrix a);

/// References the embedding; it must outlive the operator.
LinearOperator embedding_operator(const ToeplitzEmbedding& t);

/// Leading singular triplets.  Vector sets are orthonormal (to 1e-10) and the
/// values are nonnegative, sorted nonincreasing.
struct PartialSVD {
    ComplexMatrix left_vectors;    // rows x k
    RealVector singular_values;    // k
    ComplexMatrix right_vectors;   // cols x k
    double residual_estimate = 0;  // max_i |A^H u_i - s_i v_i| over the triplets
};

inline constexpr uint64_t kDefaultSvdSeed = 0xc0ffee5eedULL;

/// Entry count at which rank projection switches from dense SVD to the
/// matrix-free path.
inline constexpr Index kDenseSvdThreshold = 4096;

/// Top-k triplets by Golub-Kahan bidiagonalisation with full
/// reorthogonalisation, oversampled subspace of size k+8, and thick restarts
/// (budget 10k).  Deterministic for a fixed seed; tol is relative accuracy on
/// the singular values.  Throws on non-convergence within the budget.
PartialSVD partial_svd(const LinearOperator& op, Index k, double tol = 1e-10,
                       uint64_t seed = kDefaultSvdSeed);

/// Frobenius-nearest matrix of rank <= k (top-k singular truncation).  Dense
/// SVD up to kDenseSvdThreshold entries, matrix-free partial SVD beyond.  If
/// degenerate is non-null it is set when sigma_k and sigma_{k+1} agree to
/// 1e-12 relative, i.e. the truncation is not unique; the first k triplets in
/// decomposition order are kept either way.
ComplexMatrix project_rank(const ComplexMatrix& x, Index k,
                           bool* degenerate = nullptr);
ComplexMatrix project_rank(const ToeplitzEmbedding& x, Index k,
                           bool* degenerate = nullptr);

/// Top-k triplets of an embedding, in factored form: Lanczos whenever the
/// subspace has room beyond the requested triplets, dense SVD for
/// near-full-spectrum requests.  Lets rank-truncation consumers skip the
/// dense reconstruction.
PartialSVD embedding_top_svd(const ToeplitzEmbedding& x, Index k,
                             uint64_t seed = kDefaultSvdSeed);

/// Diagonal averaging (toeplitz_pinv) of the rank-k matrix described by the
/// factors, evaluated as k FFT convolutions without materialising it.
/// n and order are the generator length and embedding order.
FourierVector lowrank_toeplitz_pinv(const PartialSVD& f, Index n, Index order);

/// Unit right singular vector of the smallest singular value.  If degenerate
/// is non-null it is set when the two smallest singular values agree to 1e-12
/// relative (the minimiser is not unique).
ComplexVector tls_nullvector(const ComplexMatrix& x, bool* degenerate = nullptr);
ComplexVector tls_nullvector(const ToeplitzEmbedding& x, bool* degenerate = nullptr);

}  // namespace cpgd
