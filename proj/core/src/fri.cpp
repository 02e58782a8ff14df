#include "cpgd/fri.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "cpgd/lowrank.hpp"
#include "cpgd/random.hpp"
#include "cpgd/toeplitz.hpp"

namespace cpgd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_stream(const DiracStream& s) {
    if (s.locations.empty())
        throw std::invalid_argument("DiracStream: at least one spike required");
    if (s.locations.size() != s.amplitudes.size())
        throw std::invalid_argument("DiracStream: one amplitude per location required");
    if (!(s.period > 0))
        throw std::invalid_argument("DiracStream: period must be positive");
    for (double t : s.locations)
        if (!(t >= 0) || t >= s.period)
            throw std::invalid_argument("DiracStream: locations must lie in [0, period)");
}

void check_scheme(const SamplingScheme& scheme) {
    if (scheme.bandwidth < 1)
        throw std::invalid_argument("SamplingScheme: bandwidth must be >= 1");
    if (scheme.times.empty())
        throw std::invalid_argument("SamplingScheme: at least one sample required");
    for (double t : scheme.times)
        if (!(t >= 0) || t >= 1.0)
            throw std::invalid_argument("SamplingScheme: times must lie in [0, 1)");
}

double wrap_unit(double t) {
    const double r = std::fmod(t, 1.0);
    return r < 0 ? r + 1.0 : r;
}

/// Draws `count` points with pairwise circular separation >= min_sep,
/// spending at most 10000 draws per point.
std::vector<double> separated_points(Index count, double min_sep,
                                     rng::Engine& eng, const char* who) {
    std::vector<double> points;
    points.reserve(count);
    long budget = 10000L * count;
    while (static_cast<Index>(points.size()) < count) {
        if (budget-- <= 0)
            throw std::runtime_error(std::string(who) +
                                     ": rejection budget exhausted");
        const double candidate = rng::uniform01(eng);
        const bool clear = std::none_of(
            points.begin(), points.end(), [&](double p) {
                return circular_distance(candidate, p) < min_sep;
            });
        if (clear) points.push_back(candidate);
    }
    return points;
}

}  // namespace

double circular_distance(double a, double b) {
    const double d = std::abs(wrap_unit(a) - wrap_unit(b));
    return std::min(d, 1.0 - d);
}

FourierVector fourier_coefficients(const DiracStream& s, Index m) {
    check_stream(s);
    if (m < 1)
        throw std::invalid_argument("fourier_coefficients: bandwidth must be >= 1");
    if (m < static_cast<Index>(s.locations.size()))
        std::cerr << "fourier_coefficients: bandwidth below the spike count; "
                     "the stream is not identifiable\n";
    FourierVector x = FourierVector::zero(m);
    for (Index mu = -m; mu <= m; ++mu) {
        Complex sum = 0;
        for (size_t k = 0; k < s.locations.size(); ++k) {
            const double phase = -kTwoPi * static_cast<double>(mu) *
                                 s.locations[k] / s.period;
            sum += s.amplitudes[k] * Complex(std::cos(phase), std::sin(phase));
        }
        x(mu) = sum;
    }
    return x;
}

double dirichlet_kernel(double t, Index m) {
    if (m < 1)
        throw std::invalid_argument("dirichlet_kernel: bandwidth must be >= 1");
    // 1-periodic; reduce to [-1/2, 1/2] so the denominator stays away from
    // its zeros except at the removable singularity t = 0.
    const double r = t - std::round(t);
    const double denom = std::sin(std::numbers::pi * r);
    const double n = static_cast<double>(2 * m + 1);
    if (std::abs(denom) < 1e-14) return 1.0;
    return std::sin(n * std::numbers::pi * r) / (n * denom);
}

ComplexMatrix build_forward_matrix(const SamplingScheme& scheme) {
    check_scheme(scheme);
    const Index l = static_cast<Index>(scheme.times.size());
    const Index m = scheme.bandwidth;
    ComplexMatrix g(l, 2 * m + 1);
    for (Index row = 0; row < l; ++row)
        for (Index mu = -m; mu <= m; ++mu) {
            const double phase = kTwoPi * static_cast<double>(mu) * scheme.times[row];
            g(row, mu + m) = Complex(std::cos(phase), std::sin(phase));
        }
    return g;
}

ForwardModel synthesize_measurements(const DiracStream& s,
                                     const SamplingScheme& scheme,
                                     double sigma, uint64_t seed) {
    if (!(sigma >= 0))
        throw std::invalid_argument("synthesize_measurements: sigma must be >= 0");
    const ComplexMatrix g = build_forward_matrix(scheme);
    const FourierVector x = fourier_coefficients(s, scheme.bandwidth);
    ComplexVector y = g * x.values();
    if (sigma > 0) {
        rng::Engine eng(seed);
        for (Index i = 0; i < y.size(); ++i)
            y(i) += sigma * rng::gaussian(eng);  // real noise
    }
    return ForwardModel(std::move(g), std::move(y));
}

double psnr_to_sigma(double psnr_db, const DiracStream& s) {
    check_stream(s);
    double peak = 0;
    for (const Complex& a : s.amplitudes) peak = std::max(peak, std::abs(a));
    return peak * std::exp(-psnr_db / 10.0);
}

std::vector<double> recover_locations(const FourierVector& x, Index k, Index p) {
    if (k < 1) throw std::invalid_argument("recover_locations: K must be >= 1");
    if (k > p || p > x.half_bandwidth())
        throw std::invalid_argument("recover_locations: need K <= P <= M");
    const ComplexVector h = tls_nullvector(toeplitzify(x, p));
    // Roots of q(z) = sum_j h_j z^{p-j}; drop negligible leading coefficients
    // (they only add spurious roots at infinity).
    const double peak = h.cwiseAbs().maxCoeff();
    Index lead = 0;
    while (lead < h.size() && std::abs(h(lead)) <= 1e-12 * peak) ++lead;
    const Index degree = p - lead;
    if (degree < k)
        throw std::runtime_error(
            "recover_locations: annihilating filter has fewer roots than spikes");
    // Companion matrix of the monic reduced polynomial, coefficient of z^i
    // being h(p - i) / h(lead).
    ComplexMatrix companion = ComplexMatrix::Zero(degree, degree);
    for (Index i = 0; i < degree; ++i)
        companion(i, degree - 1) = -h(p - i) / h(lead);
    for (Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> es;
    es.compute(companion, /*computeEigenvectors=*/false);
    std::vector<Complex> roots(es.eigenvalues().data(),
                               es.eigenvalues().data() + degree);
    // Keep the K roots nearest the unit circle; ties prefer larger modulus,
    // then smaller argument, so the pick is deterministic.
    std::sort(roots.begin(), roots.end(), [](const Complex& a, const Complex& b) {
        const double da = std::abs(std::abs(a) - 1.0);
        const double db = std::abs(std::abs(b) - 1.0);
        if (da != db) return da < db;
        if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
        return std::arg(a) < std::arg(b);
    });
    std::vector<double> locations;
    locations.reserve(k);
    for (Index i = 0; i < k; ++i)
        locations.push_back(wrap_unit(-std::arg(roots[i]) / kTwoPi));
    std::sort(locations.begin(), locations.end());
    return locations;
}

AmplitudeEstimate recover_amplitudes(const FourierVector& x,
                                     const std::vector<double>& locations) {
    if (locations.empty())
        throw std::invalid_argument("recover_amplitudes: at least one location required");
    const Index m = x.half_bandwidth();
    const Index k = static_cast<Index>(locations.size());
    ComplexMatrix vandermonde(x.size(), k);
    for (Index col = 0; col < k; ++col)
        for (Index mu = -m; mu <= m; ++mu) {
            const double phase = -kTwoPi * static_cast<double>(mu) * locations[col];
            vandermonde(mu + m, col) = Complex(std::cos(phase), std::sin(phase));
        }
    const Eigen::ColPivHouseholderQR<ComplexMatrix> qr(vandermonde);
    const ComplexVector solution = qr.solve(x.values());
    AmplitudeEstimate estimate;
    estimate.rank_deficient = qr.rank() < k;
    estimate.amplitudes.assign(solution.data(), solution.data() + k);
    return estimate;
}

DiracStream random_stream(Index k, uint64_t seed, double min_sep) {
    if (k < 1) throw std::invalid_argument("random_stream: K must be >= 1");
    if (!(min_sep >= 0))
        throw std::invalid_argument("random_stream: separation must be >= 0");
    rng::Engine eng(seed);
    DiracStream s;
    s.period = 1.0;
    s.locations = separated_points(k, min_sep, eng, "random_stream");
    s.amplitudes.reserve(k);
    for (Index i = 0; i < k; ++i)
        s.amplitudes.emplace_back(rng::log_normal(eng), 0.0);
    // Sort by location, amplitudes riding along.
    std::vector<Index> order(k);
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
        return s.locations[a] < s.locations[b];
    });
    DiracStream sorted;
    sorted.period = s.period;
    for (Index i : order) {
        sorted.locations.push_back(s.locations[i]);
        sorted.amplitudes.push_back(s.amplitudes[i]);
    }
    return sorted;
}

SamplingScheme random_scheme(Index l, Index m, uint64_t seed, double min_sep) {
    if (l < 1) throw std::invalid_argument("random_scheme: L must be >= 1");
    if (m < 1) throw std::invalid_argument("random_scheme: bandwidth must be >= 1");
    if (!(min_sep >= 0))
        throw std::invalid_argument("random_scheme: separation must be >= 0");
    rng::Engine eng(seed);
    SamplingScheme scheme;
    scheme.bandwidth = m;
    scheme.times = separated_points(l, min_sep, eng, "random_scheme");
    std::sort(scheme.times.begin(), scheme.times.end());
    return scheme;
}

}  // namespace cpgd
