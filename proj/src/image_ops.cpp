#include "image_ops.hpp"

#include <array>

namespace mexp::detail {

Plane gaussian_blur(const Plane& in, double sigma) {
    if (sigma <= 0.0) return in;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * k * k / (sigma * sigma));
        total += kernel[k + radius];
    }
    for (double& k : kernel) k /= total;

    Plane tmp(in.width, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += kernel[k + radius] * in.clamped(x + k, y);
            tmp.at(x, y) = s;
        }
    Plane out(in.width, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            double s = 0.0;
            for (int k = -radius; k <= radius; ++k) s += kernel[k + radius] * tmp.clamped(x, y + k);
            out.at(x, y) = s;
        }
    return out;
}

Plane resize_bilinear(const Plane& in, int width, int height) {
    if (width == in.width && height == in.height) return in;
    Plane out(width, height);
    const double sx = static_cast<double>(in.width) / width;
    const double sy = static_cast<double>(in.height) / height;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            out.at(x, y) = sample_bilinear(in, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    return out;
}

void centered_gradient(const Plane& in, Plane& gx, Plane& gy) {
    gx = Plane(in.width, in.height);
    gy = Plane(in.width, in.height);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            gx.at(x, y) = 0.5 * (in.clamped(x + 1, y) - in.clamped(x - 1, y));
            gy.at(x, y) = 0.5 * (in.clamped(x, y + 1) - in.clamped(x, y - 1));
        }
}

Plane median3x3(const Plane& in) {
    Plane out(in.width, in.height);
    std::array<double, 9> window{};
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            int k = 0;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) window[k++] = in.clamped(x + dx, y + dy);
            std::nth_element(window.begin(), window.begin() + 4, window.end());
            out.at(x, y) = window[4];
        }
    return out;
}

}  // namespace mexp::detail
