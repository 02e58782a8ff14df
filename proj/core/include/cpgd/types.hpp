#pragma once

#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace cpgd {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Complex coefficient vector of odd length N = 2M + 1, logically indexed by
/// m in [-M, M].  Storage slot of logical index m is m + M.
class FourierVector {
public:
    FourierVector() = default;

    explicit FourierVector(ComplexVector values) : values_(std::move(values)) {
        if (values_.size() < 3 || values_.size() % 2 == 0)
            throw std::invalid_argument("FourierVector: length must be odd and >= 3");
    }

    static FourierVector zero(Index half_bandwidth) {
        if (half_bandwidth < 1)
            throw std::invalid_argument("FourierVector: half bandwidth must be >= 1");
        return FourierVector(ComplexVector::Zero(2 * half_bandwidth + 1));
    }

    Index size() const { return values_.size(); }
    Index half_bandwidth() const { return (values_.size() - 1) / 2; }

    /// Access by logical index m in [-M, M].
    Complex operator()(Index m) const { return values_(m + half_bandwidth()); }
    Complex& operator()(Index m) { return values_(m + half_bandwidth()); }

    const ComplexVector& values() const { return values_; }
    ComplexVector& values() { return values_; }

private:
    ComplexVector values_;
};

}  // namespace cpgd
