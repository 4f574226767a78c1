#include <cmath>
#include <limits>

#include <doctest.h>

#include "mexp/core.hpp"
#include "support/gen.hpp"

using namespace mexp;

TEST_SUITE("core") {

TEST_CASE("frame_from_bytes divides by 255") {
    const std::vector<std::uint8_t> white(4, 255), black(4, 0);
    const Frame w = frame_from_bytes(2, 2, white), b = frame_from_bytes(2, 2, black);
    for (double v : w.values()) CHECK(v == 1.0);
    for (double v : b.values()) CHECK(v == 0.0);
    const std::vector<std::uint8_t> mid{128};
    CHECK(frame_from_bytes(1, 1, mid).values()[0] == 128.0 / 255.0);
    CHECK(frame_from_bytes(1, 1, mid).values()[0] == doctest::Approx(0.50196).epsilon(1e-5));
}

TEST_CASE("frame_from_bytes rejects empty or mismatched grids") {
    CHECK_THROWS_AS(frame_from_bytes(0, 0, {}), ShapeError);
    const std::vector<std::uint8_t> three(3, 1);
    CHECK_THROWS_AS(frame_from_bytes(2, 2, three), ShapeError);
}

TEST_CASE("byte round trip is the identity on 8-bit input") {
    test::for_all(50, 11, [](test::Gen& g) {
        const int w = g.integer(1, 40), h = g.integer(1, 40);
        std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h);
        for (auto& b : raw) b = static_cast<std::uint8_t>(g.integer(0, 255));
        CHECK(frame_to_bytes(frame_from_bytes(w, h, raw)) == raw);
    });
}

TEST_CASE("Frame validates intensities") {
    CHECK_THROWS_AS(Frame(2, 1, {0.5, 1.5}), InputError);
    CHECK_THROWS_AS(Frame(2, 1, {0.5, -0.1}), InputError);
    CHECK_THROWS_AS(Frame(2, 1, {0.5, std::numeric_limits<double>::quiet_NaN()}), InputError);
    CHECK_THROWS_AS(Frame(3, 1, {0.5, 0.5}), ShapeError);
    const Frame f = Frame::filled(3, 2, 0.25);
    CHECK(f.width() == 3);
    CHECK(f.height() == 2);
    CHECK(f.at(2, 1) == 0.25);
}

TEST_CASE("fields reject non-finite values") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS(ScalarField(1, 1, {inf}));
    CHECK_THROWS(FlowField(1, 1, {0.0}, {inf}));
    CHECK_THROWS_AS(FlowField(2, 1, {0.0}, {0.0, 0.0}), ShapeError);
    const FlowField c = FlowField::constant(3, 3, 1.5, -2.0);
    CHECK(c.u_at(2, 2) == 1.5);
    CHECK(c.v_at(0, 1) == -2.0);
}

TEST_CASE("feature layout is row-major over blocks then bins") {
    test::for_all(30, 12, [](test::Gen& g) {
        const int n = g.integer(1, 9), c = g.integer(1, 12);
        std::size_t expected = 0;
        for (int b2 = 0; b2 < n; ++b2)
            for (int b1 = 0; b1 < n; ++b1)
                for (int k = 0; k < c; ++k) REQUIRE(feature_index(n, c, b2, b1, k) == expected++);
    });
}

TEST_CASE("luma uses Rec.601 weights") {
    CHECK(luma(1, 1, 1) == doctest::Approx(1.0));
    CHECK(luma(1, 0, 0) == 0.299);
    CHECK(luma(0, 1, 0) == 0.587);
    CHECK(luma(0, 0, 1) == 0.114);
}

TEST_CASE("weight modes parse and print") {
    for (auto m : {WeightMode::none, WeightMode::flow, WeightMode::strain})
        CHECK(parse_weight_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_weight_mode("magnitude"), ConfigError);
}

TEST_CASE("BiwoofConfig defaults and validation") {
    BiwoofConfig cfg;
    CHECK(cfg.blocks == 5);
    CHECK(cfg.bins == 8);
    CHECK(cfg.local_weight == WeightMode::flow);
    CHECK(cfg.global_weight == WeightMode::strain);
    cfg.bins = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("VideoSample invariants") {
    std::vector<Frame> frames(5, Frame::filled(8, 8, 0.5));
    CHECK_NOTHROW(VideoSample(frames, 0, 2, 4, 0, "s", "v"));
    CHECK_NOTHROW(VideoSample(frames, 1, std::nullopt, 3, 0, "s", "v"));
    CHECK_THROWS_AS(VideoSample(frames, 3, 2, 4, 0, "s", "v"), DomainError);
    CHECK_THROWS_AS(VideoSample(frames, 0, 2, 5, 0, "s", "v"), DomainError);
    CHECK_THROWS_AS(VideoSample(frames, 3, std::nullopt, 2, 0, "s", "v"), DomainError);
    CHECK_THROWS_AS(VideoSample({frames[0]}, 0, std::nullopt, 0, 0, "s", "v"), ShapeError);
    frames[3] = Frame::filled(9, 8, 0.5);
    CHECK_THROWS_AS(VideoSample(frames, 0, 2, 4, 0, "s", "v"), ShapeError);
}

TEST_CASE("ConfusionMatrix bookkeeping") {
    ConfusionMatrix m(3);
    m.add(0, 0, 3);
    m.add(1, 2);
    m.add(2, 2, 4);
    CHECK(m.total() == 8);
    CHECK(m.trace() == 7);
    CHECK(m.at(1, 2) == 1);
    ConfusionMatrix other(3);
    other.add(1, 2);
    m += other;
    CHECK(m.at(1, 2) == 2);
    CHECK_THROWS_AS(m.add(3, 0), DomainError);
    CHECK_THROWS_AS(m.add(0, 0, -1), DomainError);
}

}
