#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cpgd/io.hpp"
#include "cpgd/random.hpp"
#include "doctest.h"

using namespace cpgd;

TEST_CASE("doubles round-trip through their shortest decimal form") {
    const std::vector<double> values = {0.0,
                                        -0.0,
                                        0.1,
                                        1.0 / 3.0,
                                        -2.5e-308,
                                        6.02214076e23,
                                        -1.7976931348623157e308,
                                        5e-324,
                                        123456789.123456789,
                                        std::numeric_limits<double>::infinity(),
                                        -std::numeric_limits<double>::infinity()};
    for (const double v : values) {
        const std::string text = io::format_double(v);
        const double back = io::parse_double(text);
        CHECK(back == v);
        CHECK(std::signbit(back) == std::signbit(v));
    }
    CHECK(io::format_double(0.1) == "0.1");
    CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");

    CHECK_THROWS_AS(io::parse_double("1.5x"), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_double(""), std::invalid_argument);
    CHECK_THROWS_AS(io::parse_double("1,5"), std::invalid_argument);
}

TEST_CASE("config text parses, overrides, and serialises sorted") {
    std::istringstream in(
        "# run configuration\n"
        "\n"
        "method = cpgd\n"
        "  trials=24   # inline comment\n"
        "gamma = 1\n"
        "method = genfri\n");
    const io::Config config = io::parse_config(in);
    REQUIRE(config.size() == 3);
    CHECK(config.at("method") == "genfri");  // later key wins
    CHECK(config.at("trials") == "24");
    CHECK(config.at("gamma") == "1");

    const std::string text = io::serialize_config(config);
    CHECK(text == "gamma = 1\nmethod = genfri\ntrials = 24\n");
    std::istringstream again(text);
    CHECK(io::parse_config(again) == config);

    std::istringstream broken("just words\n");
    CHECK_THROWS_AS(io::parse_config(broken), std::invalid_argument);
    std::istringstream empty_key("= value\n");
    CHECK_THROWS_AS(io::parse_config(empty_key), std::invalid_argument);
}

TEST_CASE("benchmark records round-trip with the pinned header") {
    std::vector<bench::BenchmarkRecord> records(2);
    records[0].method = "cpgd";
    records[0].gamma = 1;
    records[0].psnr_db = -30.0;
    records[0].trial = 0;
    records[0].seed = 42;
    records[0].positioning_error = 0.09817364817;
    records[0].iterations = 137;
    records[0].wall_time_ms = 12.5;
    records[0].converged = true;
    records[1].method = "ls-cadzow";
    records[1].gamma = 5;
    records[1].psnr_db = 30.0;
    records[1].trial = 191;
    records[1].seed = 233;
    records[1].positioning_error = 0.5;
    records[1].iterations = 1;
    records[1].wall_time_ms = 0.25;
    records[1].converged = false;

    std::ostringstream out;
    io::write_records_csv(out, records);
    const std::string text = out.str();
    CHECK(text.substr(0, text.find('\n')) ==
          "method,gamma,psnr_db,trial,seed,positioning_error,iterations,"
          "wall_time_ms,converged");

    std::istringstream in(text);
    const std::vector<bench::BenchmarkRecord> back = io::read_records_csv(in);
    REQUIRE(back.size() == 2);
    for (size_t i = 0; i < 2; ++i) {
        CHECK(back[i].method == records[i].method);
        CHECK(back[i].gamma == records[i].gamma);
        CHECK(back[i].psnr_db == records[i].psnr_db);
        CHECK(back[i].trial == records[i].trial);
        CHECK(back[i].seed == records[i].seed);
        CHECK(back[i].positioning_error == records[i].positioning_error);
        CHECK(back[i].iterations == records[i].iterations);
        CHECK(back[i].wall_time_ms == records[i].wall_time_ms);
        CHECK(back[i].converged == records[i].converged);
    }

    std::istringstream bad("whatever,header\n1,2\n");
    CHECK_THROWS_AS(io::read_records_csv(bad), std::invalid_argument);
}

TEST_CASE("summary csv uses the pinned header") {
    bench::SummaryRow row;
    row.method = "genfri";
    row.gamma = 2;
    row.psnr_db = 10.0;
    row.median_error = 0.015;
    row.q25 = 0.01;
    row.q75 = 0.02;
    row.n_trials = 24;
    std::ostringstream out;
    io::write_summary_csv(out, {row});
    CHECK(out.str() ==
          "method,gamma,psnr_db,median_error,q25,q75,n_trials\n"
          "genfri,2,10,0.015,0.01,0.02,24\n");
}

TEST_CASE("stream, scheme and measurement files round-trip bitwise") {
    DiracStream stream;
    stream.locations = {0.125, 0.6789012345678901};
    stream.amplitudes = {{1.5, 0.0}, {0.3333333333333333, -2.25}};

    std::ostringstream sout;
    io::write_stream_csv(sout, stream);
    std::istringstream sin(sout.str());
    const DiracStream s2 = io::read_stream_csv(sin);
    CHECK(s2.locations == stream.locations);
    CHECK(s2.amplitudes == stream.amplitudes);

    SamplingScheme scheme;
    scheme.bandwidth = 3;
    scheme.times = {0.1, 0.2000000000000001, 0.95};
    std::ostringstream out;
    io::write_scheme_csv(out, scheme);
    std::istringstream in(out.str());
    const SamplingScheme s3 = io::read_scheme_csv(in, 3);
    CHECK(s3.bandwidth == 3);
    CHECK(s3.times == scheme.times);

    ComplexVector y(3);
    y << Complex(1.0, -2.0), Complex(0.1, 0.2), Complex(-5e-300, 3e300);
    std::ostringstream mout;
    io::write_measurements_csv(mout, scheme, y);
    std::istringstream min(mout.str());
    const auto [s4, y2] = io::read_measurements_csv(min, 3);
    CHECK(s4.times == scheme.times);
    CHECK(y2 == y);

    ComplexVector mismatched(2);
    mismatched << Complex(0, 0), Complex(1, 1);
    std::ostringstream bad;
    CHECK_THROWS_AS(io::write_measurements_csv(bad, scheme, mismatched),
                    std::invalid_argument);
}

TEST_CASE("coefficient files carry the logical index") {
    rng::Engine eng(19);
    FourierVector x = FourierVector::zero(2);
    for (Index m = -2; m <= 2; ++m) x(m) = rng::complex_gaussian(eng);

    std::ostringstream out;
    io::write_coefficients_csv(out, x);
    const std::string text = out.str();
    CHECK(text.substr(0, 7) == "m,re,im");
    CHECK(text.find("\n-2,") != std::string::npos);

    std::istringstream in(text);
    const FourierVector back = io::read_coefficients_csv(in);
    CHECK(back.values() == x.values());

    std::istringstream scrambled(
        "m,re,im\n0,1,0\n-1,0,0\n1,0,0\n");  // indices out of order
    CHECK_THROWS_AS(io::read_coefficients_csv(scrambled),
                    std::invalid_argument);
}

TEST_CASE("trace files list one row per iteration") {
    RecoveryTrace trace;
    trace.residual_history = {3.0, 1.0, 0.5};
    trace.step_history = {2.0, 0.7, 0.1};
    trace.rel_change_history =
        {std::numeric_limits<double>::infinity(), 0.3, 0.05};
    std::ostringstream out;
    io::write_trace_csv(out, trace);
    CHECK(out.str() ==
          "iteration,residual,step,rel_change\n"
          "1,3,2,inf\n"
          "2,1,0.7,0.3\n"
          "3,0.5,0.1,0.05\n");
}

TEST_CASE("condition and timing tables serialise flat") {
    bench::ConditionRow cond;
    cond.gamma = 5;
    cond.median_condition = std::numeric_limits<double>::infinity();
    cond.injective = false;
    std::ostringstream cout_;
    io::write_condition_csv(cout_, {cond});
    CHECK(cout_.str() ==
          "gamma,median_condition,injective\n"
          "5,inf,0\n");

    bench::TimingStudy study;
    bench::TimingRow row;
    row.n = 73;
    row.cpgd_iteration_ms = 1.5;
    row.cpgd_total_ms = 150.0;
    row.genfri_iteration_ms = 4.0;
    row.genfri_total_ms = 3000.0;
    study.rows = {row};
    std::ostringstream tout;
    io::write_timing_csv(tout, study);
    CHECK(tout.str() ==
          "n,cpgd_iteration_ms,cpgd_total_ms,genfri_iteration_ms,"
          "genfri_total_ms\n"
          "73,1.5,150,4,3000\n");
}
