#pragma once

// Internal raster helpers shared by the flow solver and the image loader.
// Planes are unconstrained real-valued grids (unlike Frame, which enforces
// [0,1] intensities).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mexp::detail {

struct Plane {
    int width = 0;
    int height = 0;
    std::vector<double> data;

    Plane() = default;
    Plane(int w, int h, double fill = 0.0)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}
    Plane(int w, int h, std::vector<double> values) : width(w), height(h), data(std::move(values)) {}

    std::size_t size() const { return data.size(); }
    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
    double clamped(int x, int y) const {
        return at(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
    }
};

/// Bilinear sample at real coordinates; samples outside the grid are clamped
/// to the border.
inline double sample_bilinear(const Plane& p, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(p.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(p.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, p.width - 1);
    const int y1 = std::min(y0 + 1, p.height - 1);
    const double ax = x - x0;
    const double ay = y - y0;
    const double top = p.at(x0, y0) + ax * (p.at(x1, y0) - p.at(x0, y0));
    const double bottom = p.at(x0, y1) + ax * (p.at(x1, y1) - p.at(x0, y1));
    return top + ay * (bottom - top);
}

Plane gaussian_blur(const Plane& in, double sigma);

/// Resamples to (width, height) by bilinear interpolation; output pixel
/// centres are mapped with the half-pixel convention.
Plane resize_bilinear(const Plane& in, int width, int height);

/// Central differences with replicate borders.
void centered_gradient(const Plane& in, Plane& gx, Plane& gy);

Plane median3x3(const Plane& in);

}  // namespace mexp::detail
