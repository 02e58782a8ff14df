#pragma once

#include "cpgd/types.hpp"

namespace cpgd {

/// Diagonal of (adjoint o embedding) for parameters (N, P):
/// gamma_i = min(i, P+1, N+1-i) with 1-based i, i.e. the number of entries on
/// the i-th anti-ordered diagonal of the (N-P) x (P+1) embedding.
class GammaWeight {
public:
    GammaWeight(Index n, Index order);

    Index size() const { return diagonal_.size(); }
    Index order() const { return order_; }
    const RealVector& diagonal() const { return diagonal_; }

    /// Entrywise gamma^{-1/2}; generator of the weight embedding.
    RealVector inverse_sqrt() const { return diagonal_.cwiseSqrt().cwiseInverse(); }

private:
    RealVector diagonal_;
    Index order_ = 0;
};

/// Banded Toeplitz view of a generator x of odd length N = 2M + 1:
/// shape (N-P) x (P+1), entry (i, j) = x[P + i - j] in storage indexing.
/// Only the generator is stored; products run as FFT convolutions with the
/// zero-padded length rounded up to a power of two, so they are linear (no
/// circular wrap).  Instances are not safe for concurrent use: product
/// methods fill a lazy per-length cache of generator transforms.
class ToeplitzEmbedding {
public:
    ToeplitzEmbedding(ComplexVector generator, Index order);

    Index rows() const { return generator_.size() - order_; }
    Index cols() const { return order_ + 1; }
    Index order() const { return order_; }
    const ComplexVector& generator() const { return generator_; }

    Complex entry(Index i, Index j) const { return generator_(order_ + i - j); }
    ComplexMatrix dense() const;

    /// T u for u of length P+1.
    ComplexVector apply(const ComplexVector& u) const;

    /// T^H v for v of length N-P.
    ComplexVector apply_adjoint(const ComplexVector& v) const;

    /// Frobenius norm without materialising: |Gamma^{1/2} generator|_2.
    double frobenius_norm() const;

private:
    ComplexVector generator_;
    Index order_ = 0;
    mutable ComplexVector fwd_transform_;   // FFT of padded generator
    mutable ComplexVector adj_transform_;   // FFT of padded reversed conjugate
};

/// Embed x as its (N-P) x (P+1) banded Toeplitz matrix.
ToeplitzEmbedding toeplitzify(const FourierVector& x, Index order);

/// Adjoint of toeplitzify: sums each anti-ordered diagonal of H into one
/// output entry, h_j = sum over i-k = j-P of H_{ik} (0-based j in [0, N)).
/// Shape must satisfy N = rows + cols - 1 odd, >= 3, cols <= rows.
FourierVector toeplitz_adjoint(const ComplexMatrix& H);

/// Pseudoinverse of toeplitzify: diagonal averaging (Gamma^{-1} adjoint).
/// Left inverse of toeplitzify on generators.
FourierVector toeplitz_pinv(const ComplexMatrix& H);

/// Orthogonal projection onto the embedded Toeplitz subspace,
/// toeplitzify o pinv; idempotent.
ComplexMatrix project_toeplitz(const ComplexMatrix& H);

/// Weight embedding W with generator gamma^{-1/2}.  For Toeplitz Z the
/// Hadamard-weighted norm |W . Z|_F equals |pinv(Z)|_2, and the entrywise
/// square of W has max-norm exactly 1.
ToeplitzEmbedding weight_matrix(Index n, Index order);

}  // namespace cpgd
