#include "mexp/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "mexp/simd.hpp"

namespace mexp {
namespace {

// d/dx of a row-major field with unit spacing.
std::vector<double> derivative_x(std::span<const double> f, int w, int h) {
    std::vector<double> out(f.size());
    for (int y = 0; y < h; ++y) {
        const double* row = f.data() + static_cast<std::size_t>(y) * w;
        double* dst = out.data() + static_cast<std::size_t>(y) * w;
        dst[0] = row[1] - row[0];
        for (int x = 1; x < w - 1; ++x) dst[x] = 0.5 * (row[x + 1] - row[x - 1]);
        dst[w - 1] = row[w - 1] - row[w - 2];
    }
    return out;
}

std::vector<double> derivative_y(std::span<const double> f, int w, int h) {
    std::vector<double> out(f.size());
    auto at = [&](int x, int y) { return f[static_cast<std::size_t>(y) * w + x]; };
    for (int x = 0; x < w; ++x) {
        out[x] = at(x, 1) - at(x, 0);
        for (int y = 1; y < h - 1; ++y)
            out[static_cast<std::size_t>(y) * w + x] = 0.5 * (at(x, y + 1) - at(x, y - 1));
        out[static_cast<std::size_t>(h - 1) * w + x] = at(x, h - 1) - at(x, h - 2);
    }
    return out;
}

}  // namespace

PolarFields polar_decompose(const FlowField& flow) {
    const std::size_t n = flow.size();
    std::vector<double> rho(n);
    std::vector<double> theta(n);
    simd::active().magnitude(n, flow.u().data(), flow.v().data(), rho.data());
    for (std::size_t i = 0; i < n; ++i) {
        const double p = flow.u()[i];
        const double q = flow.v()[i];
        double t = (p == 0.0 && q == 0.0) ? 0.0 : std::atan2(q, p);
        if (t == -std::numbers::pi) t = std::numbers::pi;
        theta[i] = t;
    }
    return {ScalarField(flow.width(), flow.height(), std::move(rho)),
            ScalarField(flow.width(), flow.height(), std::move(theta))};
}

ScalarField strain_magnitude(const FlowField& flow) {
    const int w = flow.width();
    const int h = flow.height();
    if (w < 2 || h < 2) throw ShapeError("strain_magnitude: flow must be at least 2x2");
    const auto ux = derivative_x(flow.u(), w, h);
    const auto uy = derivative_y(flow.u(), w, h);
    const auto vx = derivative_x(flow.v(), w, h);
    const auto vy = derivative_y(flow.v(), w, h);
    std::vector<double> out(flow.size());
    simd::active().strain_norm(out.size(), ux.data(), uy.data(), vx.data(), vy.data(), out.data());
    return ScalarField(w, h, std::move(out));
}

Kinematics compute_kinematics(const FlowField& flow) {
    auto polar = polar_decompose(flow);
    return {std::move(polar.magnitude), std::move(polar.orientation), strain_magnitude(flow)};
}

}  // namespace mexp
