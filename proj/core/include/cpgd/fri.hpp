#pragma once

#include <cstdint>
#include <vector>

#include "cpgd/solvers.hpp"
#include "cpgd/types.hpp"

namespace cpgd {

/// Periodic stream of K >= 1 Diracs: locations in [0, period), one amplitude
/// per location.
struct DiracStream {
    double period = 1.0;
    std::vector<double> locations;
    std::vector<Complex> amplitudes;
};

/// Irregular sampling grid: times are fractions of the period in [0, 1);
/// bandwidth M fixes the N = 2M + 1 coefficients the samples interrogate.
struct SamplingScheme {
    Index bandwidth = 0;
    std::vector<double> times;
};

/// Distance on the unit circle: min(|a - b| mod 1, 1 - |a - b| mod 1).
double circular_distance(double a, double b);

/// xhat_m = sum_k a_k exp(-2 pi i m t_k / T) for m in [-M, M].  Warns on
/// M < K (stream not identifiable from the coefficients).
FourierVector fourier_coefficients(const DiracStream& s, Index m);

/// Periodic sinc: sin((2M+1) pi t) / ((2M+1) sin(pi t)), 1 at integers.
double dirichlet_kernel(double t, Index m);

/// L x (2M+1) synthesis matrix G_{l,m} = exp(2 pi i m theta_l); row l
/// evaluates the bandlimited interpolation at time theta_l.
ComplexMatrix build_forward_matrix(const SamplingScheme& scheme);

/// Samples the stream through the scheme and adds real white noise of
/// standard deviation sigma drawn from the seed.
ForwardModel synthesize_measurements(const DiracStream& s,
                                     const SamplingScheme& scheme,
                                     double sigma, uint64_t seed);

/// Noise level giving the requested peak SNR: max_k |a_k| exp(-PSNR/10).
double psnr_to_sigma(double psnr_db, const DiracStream& s);

/// Locations from the coefficients: annihilating filter of T_P(x) by total
/// least squares, roots of its z-polynomial, and the K roots nearest the unit
/// circle mapped back through t = (-arg / 2 pi) mod 1.  Ascending order.
/// Throws when the filter polynomial has fewer than K roots.
std::vector<double> recover_locations(const FourierVector& x, Index k, Index p);

struct AmplitudeEstimate {
    std::vector<Complex> amplitudes;
    bool rank_deficient = false;  // Vandermonde column rank < K
};

/// Least-squares amplitudes at fixed normalised locations in [0, 1).
AmplitudeEstimate recover_amplitudes(const FourierVector& x,
                                     const std::vector<double>& locations);

/// K locations uniform on the circle with pairwise circular separation at
/// least min_sep, log-normal(0, 1) real amplitudes, period 1.  Locations
/// ascending.  Throws when the rejection budget is exhausted.
DiracStream random_stream(Index k, uint64_t seed, double min_sep = 0.01);

/// L times uniform on [0, 1) with pairwise circular separation at least
/// min_sep, ascending.  Throws when the rejection budget is exhausted.
SamplingScheme random_scheme(Index l, Index m, uint64_t seed,
                             double min_sep = 0.005);

}  // namespace cpgd
