#include "cpgd/solvers.hpp"

#include <cmath>
#include <limits>

#include "cpgd/fri.hpp"
#include "cpgd/random.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace cpgd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Near-uniform grid with a deterministic jitter: keeps G^H G well
// conditioned, so convergence behaviour is stable across runs.
SamplingScheme jittered_scheme(Index l, Index m, uint64_t seed) {
    rng::Engine eng(seed);
    SamplingScheme scheme;
    scheme.bandwidth = m;
    scheme.times.reserve(l);
    for (Index i = 0; i < l; ++i)
        scheme.times.push_back(
            (static_cast<double>(i) + 0.4 * rng::uniform01(eng)) /
            static_cast<double>(l));
    return scheme;
}

DiracStream two_diracs() {
    DiracStream s;
    s.locations = {0.24, 0.67};
    s.amplitudes = {Complex(1.2, 0.0), Complex(0.8, 0.0)};
    return s;
}

// L x n with prescribed singular values: unitary sandwich built from QR
// factors of fixed random matrices.
ComplexMatrix with_spectrum(Index l, const RealVector& s, unsigned seed) {
    const Index n = s.size();
    const ComplexMatrix a = testutil::random_complex_matrix(l, n, seed);
    const ComplexMatrix b = testutil::random_complex_matrix(n, n, seed + 1);
    const ComplexMatrix u =
        Eigen::HouseholderQR<ComplexMatrix>(a).householderQ() *
        ComplexMatrix::Identity(l, n);
    const ComplexMatrix v =
        Eigen::HouseholderQR<ComplexMatrix>(b).householderQ() *
        ComplexMatrix::Identity(n, n);
    return u * s.cast<Complex>().asDiagonal() * v.adjoint();
}

SolverConfig basic_config(const ForwardModel& model, Index rank, Index order) {
    SolverConfig cfg;
    cfg.step_size = default_step_size(model);
    cfg.radius = default_radius(model);
    cfg.order = order;
    cfg.rank = rank;
    return cfg;
}

}  // namespace

TEST_CASE("forward models validate their shape") {
    const ComplexMatrix g = testutil::random_complex_matrix(6, 5, 1u);
    const ComplexVector y = testutil::random_complex_vector(6, 2u);
    CHECK_NOTHROW(ForwardModel(g, y));
    CHECK_THROWS_AS(ForwardModel(ComplexMatrix(), ComplexVector()),
                    std::invalid_argument);
    CHECK_THROWS_AS(ForwardModel(testutil::random_complex_matrix(6, 4, 1u), y),
                    std::invalid_argument);
    CHECK_THROWS_AS(ForwardModel(g, testutil::random_complex_vector(5, 2u)),
                    std::invalid_argument);
}

TEST_CASE("forward models expose their extreme singular values") {
    RealVector s(5);
    s << 3.0, 2.5, 2.0, 1.0, 0.5;
    const ComplexMatrix g = with_spectrum(8, s, 3u);
    const ForwardModel model(g, ComplexVector::Zero(8));
    CHECK(model.largest_singular() == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(model.smallest_singular() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(model.injective());

    RealVector bad(5);
    bad << 1.0, 1.0, 1.0, 1.0, 1e-12;
    const ForwardModel sick(with_spectrum(8, bad, 4u), ComplexVector::Zero(8));
    CHECK_FALSE(sick.injective());

    // Fewer samples than coefficients can never be injective.
    const ForwardModel fat(testutil::random_complex_matrix(3, 5, 5u),
                           testutil::random_complex_vector(3, 6u));
    CHECK(fat.smallest_singular() == 0.0);
    CHECK_FALSE(fat.injective());
}

TEST_CASE("spectral bounds recover a prescribed spectrum") {
    RealVector s(5);
    s << 3.0, 2.5, 2.0, 1.0, 0.5;
    const auto [alpha, beta] = spectral_bounds(with_spectrum(8, s, 7u));
    CHECK(beta == doctest::Approx(2.0 * 9.0).epsilon(1e-9));
    CHECK(alpha == doctest::Approx(2.0 * 0.25).epsilon(1e-9));

    const auto [alpha_fat, beta_fat] =
        spectral_bounds(testutil::random_complex_matrix(3, 5, 8u));
    CHECK(alpha_fat <= 1e-10 * beta_fat);
    CHECK(alpha_fat >= 0.0);

    CHECK_THROWS_AS(spectral_bounds(ComplexMatrix::Zero(3, 3)),
                    std::invalid_argument);
}

TEST_CASE("spectral bounds survive the switch to the iterative path") {
    // 1040 columns crosses the dense threshold; isolated extremes keep the
    // iterative estimates honest, and the dense fallback covers the rest.
    const Index n = 1040;
    RealVector s(n);
    for (Index i = 0; i < n; ++i)
        s(i) = 1.0 + static_cast<double>(i) / static_cast<double>(n - 1);
    s(0) = 4.0;
    s(n - 1) = 0.3;
    ComplexMatrix g = s.cast<Complex>().asDiagonal();
    const auto [alpha, beta] = spectral_bounds(g);
    CHECK(beta == doctest::Approx(2.0 * 16.0).epsilon(1e-8));
    CHECK(alpha == doctest::Approx(2.0 * 0.09).epsilon(1e-3));
}

TEST_CASE("the step window brackets 1/beta symmetrically") {
    const auto [lo, hi] = step_size_range(2.0, 3);
    CHECK(lo == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(hi == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(step_size_range(0.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(step_size_range(-1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(step_size_range(2.0, 0), std::invalid_argument);
}

TEST_CASE("default radius follows injectivity") {
    const DiracStream s = two_diracs();
    const SamplingScheme wide = jittered_scheme(25, 8, 11);
    const ForwardModel tall = synthesize_measurements(s, wide, 0.0, 1);
    CHECK(default_radius(tall) == kInf);

    const SamplingScheme narrow = jittered_scheme(9, 8, 12);  // L < N
    const ForwardModel fat = synthesize_measurements(s, narrow, 0.0, 1);
    CHECK(default_radius(fat) ==
          doctest::Approx(fat.observations().norm()).epsilon(1e-14));
}

TEST_CASE("gradient steps contract toward the least-squares solution") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(25, 8, 13);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.05, 21);
    const auto [alpha, beta] = spectral_bounds(model.matrix());
    const ComplexVector star =
        (model.matrix().adjoint() * model.matrix())
            .ldlt()
            .solve(model.matrix().adjoint() * model.observations());

    SUBCASE("the solution is a fixed point") {
        const FourierVector out =
            gradient_step(FourierVector(star), model, 1.0 / beta);
        CHECK((out.values() - star).norm() <= 1e-10 * star.norm());
    }

    SUBCASE("error shrinks by the documented modulus") {
        rng::Engine eng(5);
        for (double tau : {0.3 / beta, 1.0 / beta, 1.7 / beta}) {
            const double modulus =
                std::max(std::abs(1.0 - tau * alpha), std::abs(1.0 - tau * beta));
            for (int trial = 0; trial < 5; ++trial) {
                ComplexVector x(model.coefficients());
                for (Index i = 0; i < x.size(); ++i)
                    x(i) = rng::complex_gaussian(eng);
                const FourierVector out =
                    gradient_step(FourierVector(x), model, tau);
                CHECK((out.values() - star).norm() <=
                      modulus * (x - star).norm() + 1e-9);
            }
        }
    }

    SUBCASE("arguments are validated") {
        const FourierVector x = FourierVector::zero(8);
        CHECK_THROWS_AS(gradient_step(x, model, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(gradient_step(x, model, -1.0), std::invalid_argument);
        CHECK_THROWS_AS(gradient_step(x, model, kInf), std::invalid_argument);
        CHECK_THROWS_AS(gradient_step(FourierVector::zero(6), model, 0.1),
                        std::invalid_argument);
    }
}

TEST_CASE("cpgd recovers noiseless measurements to working precision") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(25, 8, 17);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.0, 1);
    const FourierVector truth = fourier_coefficients(s, 8);
    SolverConfig cfg = basic_config(model, 2, 8);
    cfg.rel_tol = 1e-10;
    cfg.max_iterations = 3000;
    const RecoveryTrace trace = cpgd::cpgd(model, cfg);
    CHECK(trace.converged);
    CHECK((trace.coefficients.values() - truth.values()).norm() <=
          1e-6 * truth.values().norm());

    SUBCASE("histories are consistent") {
        CHECK(trace.iterations >= 1);
        CHECK(trace.residual_history.size() ==
              static_cast<size_t>(trace.iterations));
        CHECK(trace.step_history.size() ==
              static_cast<size_t>(trace.iterations));
        CHECK(trace.rel_change_history.size() ==
              static_cast<size_t>(trace.iterations));
        CHECK(trace.rel_change_history.back() < cfg.rel_tol);
        CHECK(trace.residual_history.back() <
              trace.residual_history.front());
        CHECK(trace.wall_time_ms >= 0.0);
    }

    SUBCASE("the returned point is a near fixed point of one solver sweep") {
        const DenoiseConfig map{cfg.rank, cfg.order, cfg.map_iterations,
                                cfg.radius, cfg.seed};
        const FourierVector once = inexact_prox(
            gradient_step(trace.coefficients, model, cfg.step_size), map);
        CHECK((once.values() - trace.coefficients.values()).norm() <=
              10.0 * cfg.rel_tol * trace.coefficients.values().norm());
    }

    SUBCASE("locations survive the round trip") {
        const std::vector<double> got =
            recover_locations(trace.coefficients, 2, 8);
        REQUIRE(got.size() == 2);
        CHECK(circular_distance(got[0], s.locations[0]) <= 1e-6);
        CHECK(circular_distance(got[1], s.locations[1]) <= 1e-6);
    }
}

TEST_CASE("cpgd is deterministic for a fixed seed") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(20, 6, 19);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.1, 5);
    SolverConfig cfg = basic_config(model, 2, 6);
    cfg.max_iterations = 40;
    const RecoveryTrace a = cpgd::cpgd(model, cfg);
    const RecoveryTrace b = cpgd::cpgd(model, cfg);
    CHECK(a.coefficients.values() == b.coefficients.values());
    CHECK(a.iterations == b.iterations);
    CHECK(a.residual_history == b.residual_history);
    CHECK(a.step_history == b.step_history);
    CHECK(a.rel_change_history == b.rel_change_history);
}

TEST_CASE("cpgd flags divergence instead of returning garbage") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(20, 6, 23);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.0, 1);
    SolverConfig cfg = basic_config(model, 2, 6);
    cfg.step_size = 1e6;  // far beyond the stable window
    cfg.max_iterations = 200;
    CHECK_THROWS_AS(cpgd::cpgd(model, cfg), std::runtime_error);
}

TEST_CASE("cpgd stops immediately on zero observations") {
    const SamplingScheme scheme = jittered_scheme(20, 6, 29);
    const ComplexMatrix g = build_forward_matrix(scheme);
    const ForwardModel model(g, ComplexVector::Zero(20));
    SolverConfig cfg;
    cfg.step_size = 1e-2;
    cfg.order = 6;
    cfg.rank = 2;
    const RecoveryTrace trace = cpgd::cpgd(model, cfg);
    CHECK(trace.converged);
    CHECK(trace.iterations == 1);
    CHECK(trace.coefficients.values().norm() == 0.0);
}

TEST_CASE("solver configurations are validated") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(20, 6, 31);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.0, 1);
    SolverConfig cfg = basic_config(model, 2, 6);
    SolverConfig bad = cfg;
    bad.step_size = 0.0;
    CHECK_THROWS_AS(cpgd::cpgd(model, bad), std::invalid_argument);
    bad = cfg;
    bad.rank = 0;
    CHECK_THROWS_AS(cpgd::cpgd(model, bad), std::invalid_argument);
    bad = cfg;
    bad.rank = 7;
    CHECK_THROWS_AS(cpgd::cpgd(model, bad), std::invalid_argument);
    bad = cfg;
    bad.order = 7;
    CHECK_THROWS_AS(cpgd::cpgd(model, bad), std::invalid_argument);
    bad = cfg;
    bad.max_iterations = 0;
    CHECK_THROWS_AS(cpgd::cpgd(model, bad), std::invalid_argument);
    bad = cfg;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(cpgd::cpgd(model, bad), std::invalid_argument);
    bad = cfg;
    bad.radius = -2.0;
    CHECK_THROWS_AS(ls_cadzow(model, bad), std::invalid_argument);
}

TEST_CASE("truncated least squares plus cadzow recovers clean data") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(25, 8, 37);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.0, 1);
    const FourierVector truth = fourier_coefficients(s, 8);
    const RecoveryTrace trace = ls_cadzow(model, basic_config(model, 2, 8));
    CHECK(trace.converged);
    CHECK(trace.iterations == 1);
    CHECK(trace.residual_history.size() == 1);
    CHECK((trace.coefficients.values() - truth.values()).norm() <=
          1e-8 * truth.values().norm());
}

TEST_CASE("the least-squares cutoff discards near-null directions") {
    // Components of y along singular directions below the relative cutoff
    // must not influence the estimate at all.
    RealVector s(5);
    s << 1.0, 0.5, 0.2, 1e-6, 1e-7;
    const ComplexMatrix g = with_spectrum(8, s, 41u);
    const Eigen::JacobiSVD<ComplexMatrix> svd(g, Eigen::ComputeThinU);
    const ComplexVector y = testutil::random_complex_vector(8, 42u);
    const ComplexVector shifted =
        y + Complex(3.0, -1.0) * svd.matrixU().col(3) +
        Complex(-2.0, 0.5) * svd.matrixU().col(4);
    SolverConfig cfg;
    cfg.rank = 1;
    cfg.order = 1;
    const RecoveryTrace a = ls_cadzow(ForwardModel(g, y), cfg);
    const RecoveryTrace b = ls_cadzow(ForwardModel(g, shifted), cfg);
    CHECK((a.coefficients.values() - b.coefficients.values()).norm() <=
          1e-12 * a.coefficients.values().norm());
}

TEST_CASE("the constrained quadratic update honours its optimality system") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(19, 6, 43);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.02, 9);
    const detail::GenFriWorkspace workspace(model, 4);
    rng::Engine eng(77);
    ComplexVector h(5);
    for (Index i = 0; i < 5; ++i) h(i) = rng::complex_gaussian(eng);
    const ComplexVector x = detail::genfri_x_update(workspace, h);
    const Index n = model.coefficients();
    const Index order = 4;

    // Constraint satisfied: T_P(x) h = 0.
    const ToeplitzEmbedding t = toeplitzify(FourierVector(x), order);
    CHECK(t.apply(h).norm() <= 1e-10 * t.frobenius_norm() * h.norm());

    // Stationarity: the residual gradient is orthogonal to the constraint
    // null space.
    ComplexMatrix r = ComplexMatrix::Zero(n - order, n);
    for (Index i = 0; i < n - order; ++i)
        for (Index j = 0; j <= order; ++j) r(i, order + i - j) = h(j);
    const ComplexVector grad =
        2.0 * model.matrix().adjoint() * (model.matrix() * x - model.observations());
    const ComplexMatrix pinv_r =
        r.completeOrthogonalDecomposition().pseudoInverse();
    const ComplexVector tangential = grad - r.adjoint() * (pinv_r.adjoint() * grad);
    CHECK(tangential.norm() <= 1e-8 * grad.norm());

    SUBCASE("a zero filter degenerates to the unconstrained minimiser") {
        const ComplexVector free =
            detail::genfri_x_update(workspace, ComplexVector::Zero(5));
        const ComplexVector normal_eq =
            model.matrix().adjoint() * (model.matrix() * free - model.observations());
        CHECK(normal_eq.norm() <=
              1e-10 * (model.matrix().adjoint() * model.observations()).norm());
    }

    SUBCASE("non-finite filters are rejected") {
        ComplexVector bad = h;
        bad(2) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
        CHECK_THROWS_AS(detail::genfri_x_update(workspace, bad),
                        std::runtime_error);
    }
}

TEST_CASE("the filter update solves its coupled stationarity system") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(19, 6, 43);

    SUBCASE("noisy data: matches the eliminated closed form") {
        const ForwardModel model = synthesize_measurements(s, scheme, 0.2, 9);
        const Index order = 4;
        const detail::GenFriWorkspace w(model, order);
        rng::Engine eng(101);
        ComplexVector h0(order + 1);
        for (Index i = 0; i <= order; ++i) h0(i) = rng::complex_gaussian(eng);
        const ComplexVector h = detail::genfri_h_update(w, h0, h0);
        CHECK(std::abs(h0.dot(h) - Complex(1, 0)) <= 1e-12);

        // Eliminating the multipliers: h = Q^{-1} h0 / (h0^H Q^{-1} h0) with
        // Q = T(beta)^H W^{-1} T(beta) and W = R(h0) (G^H G)^{-1} R(h0)^H.
        const Index n = model.coefficients();
        const ComplexMatrix r = detail::genfri_filter_matrix(h0, n);
        const ComplexMatrix weight = r * w.gram.ldlt().solve(r.adjoint());
        const ComplexMatrix q =
            w.tbeta.adjoint() * weight.ldlt().solve(w.tbeta);
        const ComplexVector pulled = q.ldlt().solve(h0);
        const ComplexVector oracle = pulled / h0.dot(pulled);
        CHECK((h - oracle).norm() <= 1e-8 * oracle.norm());
    }

    SUBCASE("noiseless data: the first cycle lands on the truth") {
        const ForwardModel model = synthesize_measurements(s, scheme, 0.0, 9);
        const Index order = 2;  // filter length = spike count + 1
        const detail::GenFriWorkspace w(model, order);
        rng::Engine eng(103);
        ComplexVector h0(order + 1);
        for (Index i = 0; i <= order; ++i) h0(i) = rng::complex_gaussian(eng);
        const ComplexVector h = detail::genfri_h_update(w, h0, h0);
        CHECK((w.tbeta * h).norm() <= 1e-8 * w.tbeta.norm() * h.norm());
        const ComplexVector x = detail::genfri_x_update(w, h);
        const FourierVector truth = fourier_coefficients(s, 6);
        CHECK((x - truth.values()).norm() <= 1e-8 * truth.values().norm());
    }

    SUBCASE("degenerate inputs are rejected") {
        const ForwardModel model = synthesize_measurements(s, scheme, 0.2, 9);
        const detail::GenFriWorkspace w(model, 4);
        rng::Engine eng(105);
        ComplexVector h0(5);
        for (Index i = 0; i < 5; ++i) h0(i) = rng::complex_gaussian(eng);
        CHECK_THROWS_AS(detail::genfri_h_update(w, ComplexVector::Zero(3), h0),
                        std::invalid_argument);
        // A zero filter forces a zero solution, contradicting <h, h0> = 1.
        CHECK_THROWS_AS(detail::genfri_h_update(w, ComplexVector::Zero(5), h0),
                        std::runtime_error);
    }
}

TEST_CASE("genfri recovers noiseless measurements and reports its run") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(19, 6, 47);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.0, 1);
    const FourierVector truth = fourier_coefficients(s, 6);
    SolverConfig cfg;
    cfg.rank = 2;
    cfg.order = 2;  // noiseless data wants filter length = spike count + 1
    const GenFriResult result = genfri_detailed(model, cfg, 30, 5);
    CHECK((result.trace.coefficients.values() - truth.values()).norm() <=
          1e-6 * truth.values().norm());
    CHECK(result.trace.converged);
    CHECK(result.trace.iterations == 30);
    CHECK(result.trace.residual_history.size() == 30);
    CHECK(result.trace.step_history.size() == 30);
    CHECK(result.trace.rel_change_history.size() == 30);
    CHECK(result.max_normalisation_error <= 1e-10);
    CHECK(result.max_annihilation_residual <= 1e-8);
    CHECK(result.filter.size() == 3);
    CHECK(result.filter_seed.size() == 3);
    CHECK(result.initialisation >= 0);
    CHECK(result.initialisation < 5);

    const RecoveryTrace same = genfri(model, cfg, 30, 5);
    CHECK(same.coefficients.values() ==
          result.trace.coefficients.values());
}

TEST_CASE("genfri refuses models it cannot certify") {
    const DiracStream s = two_diracs();
    SolverConfig cfg;
    cfg.rank = 2;
    cfg.order = 4;

    const SamplingScheme narrow = jittered_scheme(9, 6, 53);  // L < N
    const ForwardModel fat = synthesize_measurements(s, narrow, 0.0, 1);
    CHECK_THROWS_AS(genfri(fat, cfg), std::invalid_argument);

    RealVector sick(5);
    sick << 1.0, 1.0, 1.0, 1.0, 1e-12;
    const ForwardModel degenerate(with_spectrum(8, sick, 59u),
                                  testutil::random_complex_vector(8, 60u));
    SolverConfig small = cfg;
    small.rank = 1;
    small.order = 2;
    CHECK_THROWS_AS(genfri(degenerate, small), std::invalid_argument);
}

TEST_CASE("genfri is deterministic in the config seed") {
    const DiracStream s = two_diracs();
    const SamplingScheme scheme = jittered_scheme(19, 6, 61);
    const ForwardModel model = synthesize_measurements(s, scheme, 0.1, 3);
    SolverConfig cfg;
    cfg.rank = 2;
    cfg.order = 4;
    const GenFriResult a = genfri_detailed(model, cfg, 10, 3);
    const GenFriResult b = genfri_detailed(model, cfg, 10, 3);
    CHECK(a.trace.coefficients.values() == b.trace.coefficients.values());
    CHECK(a.trace.residual_history == b.trace.residual_history);
    CHECK(a.filter == b.filter);
    SolverConfig reseeded = cfg;
    reseeded.seed = cfg.seed + 1;
    const GenFriResult c = genfri_detailed(model, reseeded, 10, 3);
    CHECK((a.filter_seed - c.filter_seed).norm() > 0.0);
}
