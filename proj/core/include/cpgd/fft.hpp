#pragma once

#include "cpgd/types.hpp"

namespace cpgd::fft {

/// Smallest power of two >= n (n >= 1).
Index next_pow2(Index n);

/// In-place unnormalised forward DFT.
void forward(ComplexVector& buf);

/// In-place inverse DFT, normalised by 1/length.
void inverse(ComplexVector& buf);

/// Linear convolution of a and b, length a.size() + b.size() - 1, computed
/// with zero-padded power-of-two FFTs so no circular wrap-around occurs.
ComplexVector convolve(const ComplexVector& a, const ComplexVector& b);

}  // namespace cpgd::fft
