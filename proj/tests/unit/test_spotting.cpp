#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "mexp/spotting.hpp"
#include "mexp/synthetic.hpp"
#include "support/gen.hpp"
#include "support/oracles.hpp"

using namespace mexp;

namespace {

DifferenceCurve curve(std::vector<double> s) { return DifferenceCurve{std::move(s)}; }

VideoSample clip(std::vector<Frame> frames) {
    const int last = static_cast<int>(frames.size()) - 1;
    return VideoSample(std::move(frames), 0, std::nullopt, last, 0, "s", "v");
}

std::vector<double> random_curve(test::Gen& g) {
    auto s = g.reals(static_cast<std::size_t>(g.integer(1, 60)), 0.0, 1.0);
    s[0] = 0.0;
    // Quantize some curves so that plateaus and tied half-sums occur.
    if (g.coin(0.3))
        for (double& v : s) v = std::round(v * 4) / 4;
    return s;
}

}  // namespace

TEST_SUITE("spotting") {

TEST_CASE("pearson correlation") {
    const std::vector<double> a{1, 2, 3, 4}, b{2, 4, 6, 8}, c{4, 3, 2, 1};
    CHECK(pearson_correlation(a, b) == doctest::Approx(1.0));
    CHECK(pearson_correlation(a, c) == doctest::Approx(-1.0));
    const std::vector<double> flat{2, 2, 2, 2}, flat2{3, 3, 3, 3};
    CHECK(pearson_correlation(flat, flat) == 1.0);
    CHECK(pearson_correlation(flat, flat2) == 0.0);
    CHECK(pearson_correlation(flat, a) == 0.0);
    test::for_all(50, 61, [](test::Gen& g) {
        const auto n = static_cast<std::size_t>(g.integer(2, 80));
        const auto x = g.reals(n, 0, 10), y = g.reals(n, 0, 10);
        CHECK(pearson_correlation(x, y) == doctest::Approx(oracle::pearson(x, y)).epsilon(1e-9));
    });
}

TEST_CASE("difference curve") {
    const LbpParams params;
    const BlockGrid grid(12, 12, 2);
    test::Gen g(62);
    const Frame a = test::random_frame(g, 12, 12);
    SUBCASE("identical frames give a zero curve") {
        const auto c = frame_difference_curve(clip(std::vector<Frame>(5, a)), grid, params);
        CHECK(c.size() == 5);
        for (double s : c.scores) CHECK(s == 0.0);
    }
    SUBCASE("random clip matches the raw-sum oracle") {
        std::vector<Frame> frames{a};
        for (int i = 0; i < 6; ++i) frames.push_back(g.coin(0.3) ? a : test::random_frame(g, 12, 12));
        const auto c = frame_difference_curve(clip(frames), grid, params);
        CHECK(c.scores[0] == 0.0);
        const auto h0 = lbp_histogram(a, grid, params).values;
        for (std::size_t j = 1; j < frames.size(); ++j) {
            const auto hj = lbp_histogram(frames[j], grid, params).values;
            CHECK(c.scores[j] == doctest::Approx(1.0 - oracle::pearson(h0, hj)).epsilon(1e-9).scale(1e-12));
        }
    }
    SUBCASE("only onset..offset is scored") {
        std::vector<Frame> frames(6, a);
        frames[5] = test::random_frame(g, 12, 12);
        const VideoSample v(frames, 1, std::nullopt, 4, 0, "s", "v");
        CHECK(frame_difference_curve(v, grid, params).size() == 4);
    }
}

TEST_CASE("peak detection") {
    CHECK(detect_peaks(curve({0, 1, 0})) == std::vector<int>{1});
    CHECK(detect_peaks(curve({0, 1, 2, 3, 4})).empty());
    CHECK(detect_peaks(curve({0, 2, 1, 3, 0})) == std::vector<int>{1, 3});
    CHECK(detect_peaks(curve({0, 2, 2, 2, 0})) == std::vector<int>{1});
    CHECK(detect_peaks(curve({5, 1})).empty());
}

TEST_CASE("divide and conquer examples") {
    CHECK(divide_and_conquer(curve({0, 0.1, 0.9, 0.2, 0.1}), std::vector<int>{2}) == 2);
    // Two peaks; the second half carries more weight.
    CHECK(divide_and_conquer(curve({0, 0.3, 0.1, 0.1, 0.2, 0.8, 0.1}), std::vector<int>{1, 5}) == 5);
    // Equal halves: the left one wins.
    CHECK(divide_and_conquer(curve({0, 0.5, 0.1, 0.1, 0.5, 0.1}), std::vector<int>{1, 4}) == 1);
    // No peaks: argmax of the curve, first on ties.
    CHECK(divide_and_conquer(curve({0, 0.2, 0.7, 0.7}), {}) == 2);
    CHECK_THROWS_AS(divide_and_conquer(curve({}), {}), ShapeError);
}

TEST_CASE("divide and conquer equals the recursive reference") {
    test::for_all(1000, 63, [](test::Gen& g) {
        const auto s = random_curve(g);
        const auto peaks = detect_peaks(curve(s));
        const int got = divide_and_conquer(curve(s), peaks);
        CHECK(got == oracle::divide_and_conquer(s, peaks, 0, static_cast<int>(s.size())));
        if (!peaks.empty()) CHECK(std::find(peaks.begin(), peaks.end(), got) != peaks.end());
    });
}

TEST_CASE("positive rescaling of the curve changes nothing") {
    test::for_all(200, 64, [](test::Gen& g) {
        const auto s = random_curve(g);
        const double a = std::ldexp(1.0, g.integer(-4, 4));  // power of two: exact scaling
        std::vector<double> t(s);
        for (double& v : t) v *= a;
        const auto ps = detect_peaks(curve(s));
        CHECK(detect_peaks(curve(t)) == ps);
        CHECK(divide_and_conquer(curve(t), ps) == divide_and_conquer(curve(s), ps));
    });
}

TEST_CASE("spot_apex") {
    const LbpParams params;
    const BlockGrid grid(64, 64, 5);
    SUBCASE("constant clip is flat and returns frame 0") {
        const auto r = spot_apex(clip(std::vector<Frame>(6, Frame::filled(64, 64, 0.5))), grid, params);
        CHECK(r.flat_curve);
        CHECK(r.apex == 0);
    }
    SUBCASE("planted ramp-and-decay apex is found") {
        synthetic::Options opts;
        opts.profile = synthetic::Profile::ramp_decay;
        opts.amplitude = 0.5;
        opts.noise = 0.0;
        opts.spread = 3.0;
        for (const auto& v : synthetic::make_dataset(2, opts, 65)) {
            const auto r = spot_apex(v, grid, params);
            CHECK_FALSE(r.flat_curve);
            CHECK(std::abs(r.apex - *v.apex_idx()) <= 1);
        }
    }
    SUBCASE("leading onset duplicates shift a single-peak result") {
        synthetic::Options opts;
        opts.profile = synthetic::Profile::ramp_decay;
        opts.amplitude = 0.5;
        opts.noise = 0.0;
        const auto v = synthetic::make_dataset(1, opts, 66)[0];
        const auto r = spot_apex(v, grid, params);
        if (r.peaks.size() == 1) {
            std::vector<Frame> frames(3, v.frame(0));
            frames.insert(frames.end(), v.frames().begin(), v.frames().end());
            CHECK(spot_apex(clip(frames), grid, params).apex == r.apex + 3);
        } else {
            MESSAGE("generated curve has several peaks; prefix property not applicable");
        }
    }
    SUBCASE("too short") {
        CHECK_THROWS_AS(spot_apex(clip(std::vector<Frame>(2, Frame::filled(64, 64, 0.5))), grid, params), ShapeError);
    }
}

}
