#pragma once

// Hand-rolled generators for property tests. Every case gets its own seed so a
// failure can be replayed from the INFO line alone.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <doctest.h>

#include "mexp/core.hpp"

namespace mexp::test {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : seed_(seed), rng_(seed) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t bits() { return rng_(); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
    double normal(double sigma) { return std::normal_distribution<double>(0.0, sigma)(rng_); }

    std::vector<double> reals(std::size_t n, double lo, double hi) {
        std::vector<double> out(n);
        for (auto& v : out) v = uniform(lo, hi);
        return out;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

/// Runs `body(gen)` for `cases` independently seeded generators.
template <class Body>
void for_all(int cases, std::uint64_t base_seed, Body&& body) {
    for (int i = 0; i < cases; ++i) {
        const std::uint64_t seed = base_seed * 1000003ULL + static_cast<std::uint64_t>(i);
        INFO("property case " << i << ", seed " << seed);
        Gen gen(seed);
        body(gen);
    }
}

inline Frame random_frame(Gen& g, int w, int h) {
    return Frame(w, h, g.reals(static_cast<std::size_t>(w) * h, 0.0, 1.0));
}

/// Band-limited texture: a sum of random plane waves, rescaled into [0.1, 0.9].
/// Defined in closed form so shifted copies can be sampled exactly.
class WaveTexture {
public:
    WaveTexture(Gen& g, int waves = 12) {
        for (int k = 0; k < waves; ++k) {
            const double freq = g.uniform(0.15, 0.9);
            const double dir = g.uniform(0.0, 2.0 * std::numbers::pi);
            waves_.push_back({freq * std::cos(dir), freq * std::sin(dir), g.uniform(0.0, 6.3), g.uniform(0.5, 1.0)});
            norm_ += waves_.back().amp;
        }
    }

    double operator()(double x, double y) const {
        double s = 0.0;
        for (const auto& w : waves_) s += w.amp * std::sin(w.kx * x + w.ky * y + w.phase);
        return 0.5 + 0.4 * s / norm_;
    }

    Frame render(int w, int h, double dx = 0.0, double dy = 0.0) const {
        std::vector<double> px(static_cast<std::size_t>(w) * h);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) px[static_cast<std::size_t>(y) * w + x] = (*this)(x - dx, y - dy);
        return Frame(w, h, std::move(px));
    }

private:
    struct Wave {
        double kx, ky, phase, amp;
    };
    std::vector<Wave> waves_;
    double norm_ = 0.0;
};

inline FlowField random_flow(Gen& g, int w, int h, double scale) {
    const auto n = static_cast<std::size_t>(w) * h;
    return FlowField(w, h, g.reals(n, -scale, scale), g.reals(n, -scale, scale));
}

/// Smooth random flow built from a few low-order polynomial and sine terms.
inline FlowField smooth_flow(Gen& g, int w, int h, double scale) {
    const double a[6] = {g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1),
                         g.uniform(-1, 1), g.uniform(-1, 1), g.uniform(-1, 1)};
    const double f = g.uniform(0.05, 0.4);
    std::vector<double> u(static_cast<std::size_t>(w) * h), v(u.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double xn = static_cast<double>(x) / w, yn = static_cast<double>(y) / h;
            u[i] = scale * (a[0] * xn + a[1] * yn * yn + a[2] * std::sin(f * x + y * 0.1));
            v[i] = scale * (a[3] * yn + a[4] * xn * yn + a[5] * std::cos(f * y - x * 0.2));
        }
    return FlowField(w, h, std::move(u), std::move(v));
}

}  // namespace mexp::test
