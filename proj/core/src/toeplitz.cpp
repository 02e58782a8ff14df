#include "cpgd/toeplitz.hpp"

#include <algorithm>

#include "cpgd/fft.hpp"

namespace cpgd {

namespace {

void check_shape(Index n, Index order) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("Toeplitz embedding: length must be odd and >= 3");
    const Index m = (n - 1) / 2;
    if (order < 0 || order > m)
        throw std::invalid_argument("Toeplitz embedding: order must lie in [0, M]");
}

}  // namespace

GammaWeight::GammaWeight(Index n, Index order) : order_(order) {
    check_shape(n, order);
    diagonal_.resize(n);
    for (Index i = 0; i < n; ++i)
        diagonal_(i) = static_cast<double>(std::min({i + 1, order + 1, n - i}));
}

ToeplitzEmbedding::ToeplitzEmbedding(ComplexVector generator, Index order)
    : generator_(std::move(generator)), order_(order) {
    check_shape(generator_.size(), order_);
}

ComplexMatrix ToeplitzEmbedding::dense() const {
    ComplexMatrix out(rows(), cols());
    for (Index i = 0; i < rows(); ++i)
        for (Index j = 0; j < cols(); ++j) out(i, j) = entry(i, j);
    return out;
}

ComplexVector ToeplitzEmbedding::apply(const ComplexVector& u) const {
    if (u.size() != cols())
        throw std::invalid_argument("Toeplitz apply: operand length must be P+1");
    const Index n = generator_.size();
    const Index len = fft::next_pow2(n + order_);
    if (fwd_transform_.size() != len) {
        ComplexVector padded = ComplexVector::Zero(len);
        padded.head(n) = generator_;
        fft::forward(padded);
        fwd_transform_ = std::move(padded);
    }
    ComplexVector buf = ComplexVector::Zero(len);
    buf.head(u.size()) = u;
    fft::forward(buf);
    buf.array() *= fwd_transform_.array();
    fft::inverse(buf);
    return buf.segment(order_, n - order_);
}

ComplexVector ToeplitzEmbedding::apply_adjoint(const ComplexVector& v) const {
    if (v.size() != rows())
        throw std::invalid_argument("Toeplitz apply_adjoint: operand length must be N-P");
    const Index n = generator_.size();
    const Index len = fft::next_pow2(2 * n - order_ - 1);
    if (adj_transform_.size() != len) {
        ComplexVector padded = ComplexVector::Zero(len);
        padded.head(n) = generator_.reverse().conjugate();
        fft::forward(padded);
        adj_transform_ = std::move(padded);
    }
    ComplexVector buf = ComplexVector::Zero(len);
    buf.head(v.size()) = v;
    fft::forward(buf);
    buf.array() *= adj_transform_.array();
    fft::inverse(buf);
    return buf.segment(n - order_ - 1, order_ + 1);
}

double ToeplitzEmbedding::frobenius_norm() const {
    const GammaWeight gamma(generator_.size(), order_);
    return std::sqrt(
        (gamma.diagonal().array() * generator_.array().abs2()).sum());
}

ToeplitzEmbedding toeplitzify(const FourierVector& x, Index order) {
    return ToeplitzEmbedding(x.values(), order);
}

FourierVector toeplitz_adjoint(const ComplexMatrix& H) {
    const Index r = H.rows();
    const Index c = H.cols();
    const Index n = r + c - 1;
    if (c > r || n < 3 || n % 2 == 0)
        throw std::invalid_argument(
            "toeplitz_adjoint: shape inconsistent with an odd-length embedding");
    const Index order = c - 1;
    ComplexVector h = ComplexVector::Zero(n);
    for (Index j = 0; j < n; ++j) {
        const Index k_lo = std::max<Index>(0, order - j);
        const Index k_hi = std::min(c - 1, order - j + r - 1);
        for (Index k = k_lo; k <= k_hi; ++k) h(j) += H(j - order + k, k);
    }
    return FourierVector(std::move(h));
}

FourierVector toeplitz_pinv(const ComplexMatrix& H) {
    FourierVector h = toeplitz_adjoint(H);
    const GammaWeight gamma(h.size(), H.cols() - 1);
    h.values().array() /= gamma.diagonal().array();
    return h;
}

ComplexMatrix project_toeplitz(const ComplexMatrix& H) {
    return toeplitzify(toeplitz_pinv(H), H.cols() - 1).dense();
}

ToeplitzEmbedding weight_matrix(Index n, Index order) {
    const GammaWeight gamma(n, order);
    return ToeplitzEmbedding(gamma.inverse_sqrt().cast<Complex>(), order);
}

}  // namespace cpgd
