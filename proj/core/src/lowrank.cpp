#include "cpgd/lowrank.hpp"

#include <algorithm>
#include <memory>

#include "cpgd/fft.hpp"
#include "cpgd/random.hpp"

namespace cpgd {

LinearOperator dense_operator(ComplexMatrix a) {
    auto held = std::make_shared<ComplexMatrix>(std::move(a));
    return {held->rows(), held->cols(),
            [held](const ComplexVector& u) { return ComplexVector(*held * u); },
            [held](const ComplexVector& v) {
                return ComplexVector(held->adjoint() * v);
            }};
}

LinearOperator embedding_operator(const ToeplitzEmbedding& t) {
    return {t.rows(), t.cols(),
            [&t](const ComplexVector& u) { return t.apply(u); },
            [&t](const ComplexVector& v) { return t.apply_adjoint(v); }};
}

PartialSVD partial_svd(const LinearOperator& op, Index k, double tol,
                       uint64_t seed) {
    const Index m = op.rows;
    const Index n = op.cols;
    if (m < 1 || n < 1)
        throw std::invalid_argument("partial_svd: operator must be nonempty");
    const Index minmn = std::min(m, n);
    if (k < 1 || k > minmn)
        throw std::invalid_argument("partial_svd: k must lie in [1, min(shape)]");

    const Index subspace = std::min(k + 8, minmn);
    const Index max_restarts = 10 * k;

    rng::Engine eng(seed);
    auto fresh_unit = [&eng](Index len) {
        ComplexVector v(len);
        for (Index i = 0; i < len; ++i) v(i) = rng::complex_gaussian(eng);
        v /= v.norm();
        return v;
    };
    // Two-pass classical Gram-Schmidt keeps the basis orthonormal to ~1e-14.
    auto orthogonalise = [](ComplexVector& w, const ComplexMatrix& basis,
                            Index count) {
        if (count <= 0) return;
        const auto b = basis.leftCols(count);
        w -= b * (b.adjoint() * w).eval();
        w -= b * (b.adjoint() * w).eval();
    };
    auto replacement_direction = [&](const ComplexMatrix& basis, Index count,
                                     Index len) {
        for (int attempt = 0; attempt < 16; ++attempt) {
            ComplexVector w = fresh_unit(len);
            orthogonalise(w, basis, count);
            const double norm = w.norm();
            if (norm > 1e-6) return ComplexVector(w / norm);
        }
        throw std::runtime_error(
            "partial_svd: failed to draw a direction outside the current basis");
    };

    ComplexMatrix U = ComplexMatrix::Zero(m, subspace);
    ComplexMatrix V = ComplexMatrix::Zero(n, subspace + 1);
    RealMatrix B = RealMatrix::Zero(subspace, subspace);
    ComplexVector coupling;  // residual couplings of the locked columns
    Index locked = 0;
    double beta_last = 0.0;
    double scale = 0.0;

    V.col(0) = fresh_unit(n);

    for (Index restart = 0; restart <= max_restarts; ++restart) {
        for (Index j = locked; j < subspace; ++j) {
            ComplexVector p = op.apply(V.col(j));
            if (j == locked && locked > 0)
                p -= U.leftCols(locked) * coupling;
            else if (j > 0)
                p -= Complex(B(j - 1, j)) * U.col(j - 1);
            orthogonalise(p, U, j);
            double alpha = p.norm();
            if (!std::isfinite(alpha))
                throw std::runtime_error(
                    "partial_svd: operator returned non-finite values");
            scale = std::max(scale, alpha);
            if (alpha <= 1e-13 * std::max(scale, 1e-300)) {
                alpha = 0.0;
                U.col(j) = replacement_direction(U, j, m);
            } else {
                U.col(j) = p / alpha;
            }
            B(j, j) = alpha;

            ComplexVector r = op.apply_adjoint(U.col(j));
            r -= Complex(alpha) * V.col(j);
            orthogonalise(r, V, j + 1);
            double beta = r.norm();
            if (!std::isfinite(beta))
                throw std::runtime_error(
                    "partial_svd: operator returned non-finite values");
            scale = std::max(scale, beta);
            if (beta <= 1e-13 * std::max(scale, 1e-300)) {
                beta = 0.0;
                // At the last slot the right basis may already span the whole
                // space; a zero residual vector is fine, nothing consumes it.
                if (j + 1 < n)
                    V.col(j + 1) = replacement_direction(V, j + 1, n);
                else
                    V.col(j + 1).setZero();
            } else {
                V.col(j + 1) = r / beta;
            }
            if (j < subspace - 1)
                B(j, j + 1) = beta;
            else
                beta_last = beta;
        }

        Eigen::JacobiSVD<RealMatrix> small(
            B, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const RealVector& sig = small.singularValues();
        const RealMatrix& P = small.matrixU();
        const RealMatrix& Q = small.matrixV();

        // |A^H u_i - s_i v_i| = |beta_s| |e_s^T P e_i| for Ritz triplet i.
        bool converged = true;
        double worst = 0.0;
        for (Index i = 0; i < k; ++i) {
            const double res = std::abs(beta_last * P(subspace - 1, i));
            worst = std::max(worst, res);
            if (res > tol * std::max(sig(0), 1e-300)) converged = false;
        }

        if (converged) {
            PartialSVD out;
            out.left_vectors = U * P.leftCols(k);
            out.singular_values = sig.head(k);
            out.right_vectors = V.leftCols(subspace) * Q.leftCols(k);
            out.residual_estimate = worst;
            return out;
        }
        if (restart == max_restarts) break;

        // Thick restart: lock the leading Ritz triplets and the residual
        // direction, then re-expand.
        const Index keep = std::max<Index>(
            1, std::min<Index>(k + 3, subspace - 1));
        const ComplexMatrix u_kept = U * P.leftCols(keep);
        const ComplexMatrix v_kept = V.leftCols(subspace) * Q.leftCols(keep);
        U.leftCols(keep) = u_kept;
        V.leftCols(keep) = v_kept;
        V.col(keep) = V.col(subspace);
        B.setZero();
        B.diagonal().head(keep) = sig.head(keep);
        // Locked triplets couple to the residual direction: the small matrix
        // keeps the arrow column so that A V = U B stays exact.
        const RealVector rho = beta_last * P.row(subspace - 1).head(keep).transpose();
        B.col(keep).head(keep) = rho;
        coupling = rho.cast<Complex>();
        locked = keep;
    }
    throw std::runtime_error(
        "partial_svd: no convergence within the restart budget");
}

namespace {

ComplexMatrix dense_rank_truncate(const ComplexMatrix& x, Index k,
                                  bool* degenerate) {
    const Index minmn = std::min(x.rows(), x.cols());
    if (k < 1 || k > minmn)
        throw std::invalid_argument("project_rank: K must lie in [1, min(shape)]");
    Eigen::JacobiSVD<ComplexMatrix> svd(
        x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sig = svd.singularValues();
    if (degenerate)
        *degenerate = k < minmn && sig(k - 1) > 0.0 &&
                      sig(k - 1) - sig(k) < 1e-12 * sig(k - 1);
    if (k == minmn) return x;
    const ComplexVector kept = sig.head(k).cast<Complex>();
    return svd.matrixU().leftCols(k) * kept.asDiagonal() *
           svd.matrixV().leftCols(k).adjoint();
}

}  // namespace

ComplexMatrix project_rank(const ComplexMatrix& x, Index k, bool* degenerate) {
    return dense_rank_truncate(x, k, degenerate);
}

ComplexMatrix project_rank(const ToeplitzEmbedding& x, Index k,
                           bool* degenerate) {
    const Index minmn = std::min(x.rows(), x.cols());
    if (k < 1 || k > minmn)
        throw std::invalid_argument("project_rank: K must lie in [1, min(shape)]");
    if (x.rows() * x.cols() <= kDenseSvdThreshold)
        return dense_rank_truncate(x.dense(), k, degenerate);

    // One extra triplet for the gap test.
    const Index want = std::min(k + 1, minmn);
    const PartialSVD f = partial_svd(embedding_operator(x), want);
    if (degenerate)
        *degenerate = want > k && f.singular_values(k - 1) > 0.0 &&
                      f.singular_values(k - 1) - f.singular_values(k) <
                          1e-12 * f.singular_values(k - 1);
    const ComplexVector kept = f.singular_values.head(k).cast<Complex>();
    return f.left_vectors.leftCols(k) * kept.asDiagonal() *
           f.right_vectors.leftCols(k).adjoint();
}

PartialSVD embedding_top_svd(const ToeplitzEmbedding& x, Index k,
                             uint64_t seed) {
    const Index minmn = std::min(x.rows(), x.cols());
    if (k < 1 || k > minmn)
        throw std::invalid_argument(
            "embedding_top_svd: k must lie in [1, min(shape)]");
    // The bidiagonalisation needs slack columns beyond the requested
    // triplets; with that room it beats a dense factorisation at every size.
    if (k + 2 <= minmn)
        return partial_svd(embedding_operator(x), k, 1e-10, seed);

    Eigen::JacobiSVD<ComplexMatrix> svd(
        x.dense(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    PartialSVD out;
    out.left_vectors = svd.matrixU().leftCols(k);
    out.singular_values = svd.singularValues().head(k);
    out.right_vectors = svd.matrixV().leftCols(k);
    out.residual_estimate = 0.0;
    return out;
}

FourierVector lowrank_toeplitz_pinv(const PartialSVD& f, Index n, Index order) {
    if (f.left_vectors.rows() != n - order ||
        f.right_vectors.rows() != order + 1)
        throw std::invalid_argument("lowrank_toeplitz_pinv: factor shape mismatch");
    ComplexVector sums = ComplexVector::Zero(n);
    for (Index i = 0; i < f.singular_values.size(); ++i) {
        // Diagonal sums of a rank-one term are a linear convolution.
        const ComplexVector u = f.left_vectors.col(i);
        const ComplexVector w =
            f.singular_values(i) *
            f.right_vectors.col(i).reverse().conjugate();
        sums += fft::convolve(u, w);
    }
    const GammaWeight gamma(n, order);
    sums.array() /= gamma.diagonal().array();
    return FourierVector(std::move(sums));
}

ComplexVector tls_nullvector(const ComplexMatrix& x, bool* degenerate) {
    if (x.rows() < 1 || x.cols() < 1 || x.norm() == 0.0)
        throw std::invalid_argument("tls_nullvector: matrix must be nonzero");
    Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeFullV);
    const RealVector& sig = svd.singularValues();
    const Index n = x.cols();
    if (degenerate) {
        // Trailing values past min(shape) are implicit zeros of a fat matrix.
        double smallest = (n > x.rows()) ? 0.0 : sig(sig.size() - 1);
        double second;
        if (n - x.rows() >= 2)
            second = 0.0;
        else if (n > x.rows())
            second = sig(sig.size() - 1);
        else
            second = (n >= 2) ? sig(sig.size() - 2) : sig(sig.size() - 1);
        *degenerate = n >= 2 && second - smallest <= 1e-12 * second;
    }
    return svd.matrixV().col(n - 1);
}

ComplexVector tls_nullvector(const ToeplitzEmbedding& x, bool* degenerate) {
    return tls_nullvector(x.dense(), degenerate);
}

}  // namespace cpgd
