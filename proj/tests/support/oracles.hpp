#pragma once

// Independent reference implementations. They deliberately share no code with
// the library: straightforward loops, no SIMD, no precomputed tables.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "mexp/core.hpp"

namespace mexp::oracle {

/// Derivative along x (dir=0) or y (dir=1) of one flow component at a pixel:
/// central inside, one-sided on the border.
inline double partial(const FlowField& f, bool v_component, int dir, int x, int y) {
    auto get = [&](int px, int py) { return v_component ? f.v_at(px, py) : f.u_at(px, py); };
    const int n = dir == 0 ? f.width() : f.height();
    const int i = dir == 0 ? x : y;
    auto at = [&](int k) { return dir == 0 ? get(k, y) : get(x, k); };
    if (i == 0) return at(1) - at(0);
    if (i == n - 1) return at(n - 1) - at(n - 2);
    return (at(i + 1) - at(i - 1)) / 2.0;
}

/// Frobenius norm of the symmetric part of the flow Jacobian, pixel by pixel.
inline std::vector<double> strain(const FlowField& f) {
    std::vector<double> out;
    for (int y = 0; y < f.height(); ++y)
        for (int x = 0; x < f.width(); ++x) {
            const std::array<std::array<double, 2>, 2> jac{{
                {partial(f, false, 0, x, y), partial(f, false, 1, x, y)},
                {partial(f, true, 0, x, y), partial(f, true, 1, x, y)},
            }};
            double sum = 0.0;
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    const double e = 0.5 * (jac[r][c] + jac[c][r]);
                    sum += e * e;
                }
            out.push_back(std::sqrt(sum));
        }
    return out;
}

/// Per-pixel accumulation into an N x N x C array.
inline std::vector<double> biwoof(const std::vector<double>& theta, const std::vector<double>& rho,
                                  const std::vector<double>& eps, int w, int h, const BiwoofConfig& cfg) {
    const int n = cfg.blocks, c = cfg.bins;
    const int bw = w / n, bh = h / n;
    std::vector<double> hist(static_cast<std::size_t>(n * n * c), 0.0);
    std::vector<double> gsum(static_cast<std::size_t>(n * n), 0.0), count(gsum.size(), 0.0);
    auto weight = [&](WeightMode m, std::size_t i) {
        switch (m) {
            case WeightMode::none: return 1.0;
            case WeightMode::flow: return rho[i];
            case WeightMode::strain: return eps[i];
        }
        return 0.0;
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const int b1 = std::min(x / bw, n - 1), b2 = std::min(y / bh, n - 1);
            int bin = static_cast<int>(std::floor((theta[i] + std::numbers::pi) * c / (2 * std::numbers::pi)));
            if (bin >= c) bin = c - 1;
            hist[static_cast<std::size_t>((b2 * n + b1) * c + bin)] += weight(cfg.local_weight, i);
            gsum[static_cast<std::size_t>(b2 * n + b1)] += weight(cfg.global_weight, i);
            count[static_cast<std::size_t>(b2 * n + b1)] += 1.0;
        }
    for (int b = 0; b < n * n; ++b)
        for (int k = 0; k < c; ++k) hist[static_cast<std::size_t>(b * c + k)] *= gsum[b] / count[b];
    return hist;
}

/// Recursive halving over [lo, hi).
inline int divide_and_conquer(const std::vector<double>& s, const std::vector<int>& peaks, int lo, int hi) {
    if (peaks.size() == 1) return peaks[0];
    if (peaks.empty() || hi - lo == 1) {
        if (peaks.empty()) return static_cast<int>(std::max_element(s.begin() + lo, s.begin() + hi) - s.begin());
        return lo;
    }
    const int len = hi - lo;
    const int mid = lo + (len % 2 == 0 ? len / 2 : len / 2 + 1);
    std::vector<int> left, right;
    double ls = 0.0, rs = 0.0;
    for (int p : peaks) {
        if (p < mid) {
            left.push_back(p);
            ls += s[p];
        } else {
            right.push_back(p);
            rs += s[p];
        }
    }
    return ls >= rs ? divide_and_conquer(s, left, lo, mid) : divide_and_conquer(s, right, mid, hi);
}

/// Pearson r from raw sums.
inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
        saa += a[i] * a[i];
        sbb += b[i] * b[i];
        sab += a[i] * b[i];
    }
    return (n * sab - sa * sb) / (std::sqrt(n * saa - sa * sa) * std::sqrt(n * sbb - sb * sb));
}

/// LBP code with explicit four-corner bilinear interpolation.
inline unsigned lbp_code(const Frame& f, int x, int y, int p, double r) {
    unsigned code = 0;
    for (int k = 0; k < p; ++k) {
        const double a = 2 * std::numbers::pi * k / p;
        double dx = r * std::cos(a), dy = -r * std::sin(a);
        if (std::abs(dx - std::round(dx)) < 1e-9) dx = std::round(dx);
        if (std::abs(dy - std::round(dy)) < 1e-9) dy = std::round(dy);
        const double sx = x + dx, sy = y + dy;
        const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
        const double fx = sx - x0, fy = sy - y0;
        auto px = [&](int xx, int yy) {
            return (xx < f.width() && yy < f.height()) ? f.at(xx, yy) : 0.0;  // weight is 0 when out of range
        };
        const double v = (1 - fx) * (1 - fy) * px(x0, y0) + fx * (1 - fy) * px(x0 + 1, y0) +
                         (1 - fx) * fy * px(x0, y0 + 1) + fx * fy * px(x0 + 1, y0 + 1);
        if (v >= f.at(x, y)) code |= 1u << k;
    }
    return code;
}

inline bool is_uniform(unsigned code, int p) {
    int t = 0;
    for (int k = 0; k < p; ++k) t += ((code >> k) & 1u) != ((code >> ((k + 1) % p)) & 1u);
    return t <= 2;
}

}  // namespace mexp::oracle
