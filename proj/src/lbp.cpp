#include <cmath>
#include <numbers>
#include <string>

#include "mexp/descriptors.hpp"

namespace mexp {
namespace {

// Offset of one circular neighbour; near-integer offsets are snapped so that
// axis-aligned neighbours read pixels exactly.
struct Offset {
    double dx, dy;
};

double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

std::vector<Offset> circle_offsets(int neighbors, double r_horizontal, double r_vertical) {
    std::vector<Offset> out(static_cast<std::size_t>(neighbors));
    for (int k = 0; k < neighbors; ++k) {
        const double a = 2.0 * std::numbers::pi * k / neighbors;
        out[k] = {snap(r_horizontal * std::cos(a)), snap(-r_vertical * std::sin(a))};
    }
    return out;
}

// Bilinear sample of a row-major grid at a point known to lie inside it.
template <typename Get>
double bilinear(Get&& get, double x, double y) {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int x0 = static_cast<int>(fx);
    const int y0 = static_cast<int>(fy);
    const double ax = x - fx;
    const double ay = y - fy;
    if (ax == 0.0 && ay == 0.0) return get(x0, y0);
    if (ay == 0.0) return get(x0, y0) + ax * (get(x0 + 1, y0) - get(x0, y0));
    if (ax == 0.0) return get(x0, y0) + ay * (get(x0, y0 + 1) - get(x0, y0));
    const double top = get(x0, y0) + ax * (get(x0 + 1, y0) - get(x0, y0));
    const double bottom = get(x0, y0 + 1) + ax * (get(x0 + 1, y0 + 1) - get(x0, y0 + 1));
    return top + ay * (bottom - top);
}

template <typename Get>
unsigned code_at(Get&& get, double cx, double cy, double centre, const std::vector<Offset>& offsets) {
    unsigned code = 0;
    for (std::size_t k = 0; k < offsets.size(); ++k)
        if (bilinear(get, cx + offsets[k].dx, cy + offsets[k].dy) >= centre) code |= 1u << k;
    return code;
}

int margin(double radius) { return static_cast<int>(std::ceil(radius - 1e-9)); }

int circular_transitions(unsigned code, int bits) {
    int t = 0;
    for (int k = 0; k < bits; ++k) {
        const unsigned a = (code >> k) & 1u;
        const unsigned b = (code >> ((k + 1) % bits)) & 1u;
        t += a != b;
    }
    return t;
}

}  // namespace

void LbpParams::validate() const {
    if (neighbors < 4 || neighbors > 16) throw ConfigError("LbpParams: neighbors must be in [4, 16]");
    if (!(radius >= 1.0)) throw ConfigError("LbpParams: radius must be >= 1");
}

int lbp_bin_count(const LbpParams& params) {
    params.validate();
    const int p = params.neighbors;
    return params.uniform ? p * (p - 1) + 3 : 1 << p;
}

std::vector<int> lbp_mapping(const LbpParams& params) {
    params.validate();
    const int p = params.neighbors;
    std::vector<int> map(std::size_t{1} << p);
    if (!params.uniform) {
        for (std::size_t c = 0; c < map.size(); ++c) map[c] = static_cast<int>(c);
        return map;
    }
    const int other = p * (p - 1) + 2;
    int next = 0;
    for (std::size_t c = 0; c < map.size(); ++c)
        map[c] = circular_transitions(static_cast<unsigned>(c), p) <= 2 ? next++ : other;
    return map;
}

unsigned lbp_code(const Frame& frame, int x, int y, const LbpParams& params) {
    params.validate();
    const int m = margin(params.radius);
    if (x < m || y < m || x >= frame.width() - m || y >= frame.height() - m)
        throw DomainError("lbp_code: pixel too close to the border");
    const auto offsets = circle_offsets(params.neighbors, params.radius, params.radius);
    auto get = [&](int px, int py) { return frame.at(px, py); };
    return code_at(get, x, y, frame.at(x, y), offsets);
}

FeatureVector lbp_histogram(const Frame& frame, const BlockGrid& grid, const LbpParams& params,
                            std::span<const std::uint8_t> mask) {
    params.validate();
    const int w = frame.width();
    const int h = frame.height();
    const int m = margin(params.radius);
    if (w < 2 * m + 1 || h < 2 * m + 1) throw ShapeError("lbp_histogram: frame smaller than 2R+1");
    if (grid.width() != w || grid.height() != h) throw ShapeError("lbp_histogram: grid does not match frame");
    if (!mask.empty() && mask.size() != frame.size()) throw ShapeError("lbp_histogram: mask size mismatch");

    const auto map = lbp_mapping(params);
    const int bins = lbp_bin_count(params);
    const auto offsets = circle_offsets(params.neighbors, params.radius, params.radius);
    auto get = [&](int px, int py) { return frame.at(px, py); };

    std::vector<double> hist(static_cast<std::size_t>(grid.blocks()) * grid.blocks() * bins, 0.0);
    for (int y = m; y < h - m; ++y)
        for (int x = m; x < w - m; ++x) {
            if (!mask.empty() && mask[static_cast<std::size_t>(y) * w + x] == 0) continue;
            const unsigned code = code_at(get, x, y, frame.at(x, y), offsets);
            hist[static_cast<std::size_t>(grid.block_of(x, y)) * bins + map[code]] += 1.0;
        }
    return FeatureVector{std::move(hist)};
}

Frame difference_image(const Frame& onset, const Frame& probe) {
    if (onset.width() != probe.width() || onset.height() != probe.height())
        throw ShapeError("difference_image: frames differ in size");
    std::vector<double> d(onset.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (probe.values()[i] - onset.values()[i] + 1.0) * 0.5;
    return Frame(onset.width(), onset.height(), std::move(d));
}

FeatureVector lbp_difference_baseline(const Frame& onset, const Frame& probe, const BlockGrid& grid,
                                      const LbpParams& params) {
    return lbp_histogram(difference_image(onset, probe), grid, params);
}

FeatureVector lbp_top(const VideoSample& video, const BlockGrid& grid, const LbpParams& params,
                      const LbpTopRadii& radii) {
    params.validate();
    if (!(radii.rx >= 1.0 && radii.ry >= 1.0 && radii.rt >= 1.0))
        throw ConfigError("lbp_top: radii must be >= 1");
    const int first = video.onset_idx();
    const int frames = video.offset_idx() - first + 1;
    const int mt = margin(radii.rt);
    if (frames <= 2 * mt) throw ShapeError("lbp_top: clip has too few frames for the temporal radius");
    const int w = video.frame(first).width();
    const int h = video.frame(first).height();
    const int mx = margin(radii.rx);
    const int my = margin(radii.ry);
    if (w < 2 * mx + 1 || h < 2 * my + 1) throw ShapeError("lbp_top: frame smaller than 2R+1");
    if (grid.width() != w || grid.height() != h) throw ShapeError("lbp_top: grid does not match frames");

    const auto map = lbp_mapping(params);
    const int bins = lbp_bin_count(params);
    const int p = params.neighbors;
    const auto xy = circle_offsets(p, radii.rx, radii.ry);
    const auto xt = circle_offsets(p, radii.rx, radii.rt);
    const auto yt = circle_offsets(p, radii.ry, radii.rt);

    std::vector<double> hist(static_cast<std::size_t>(grid.blocks()) * grid.blocks() * 3 * bins, 0.0);
    for (int t = mt; t < frames - mt; ++t) {
        const Frame& f = video.frame(first + t);
        auto get_xy = [&](int px, int py) { return f.at(px, py); };
        for (int y = my; y < h - my; ++y) {
            auto get_xt = [&](int px, int pt) { return video.frame(first + pt).at(px, y); };
            for (int x = mx; x < w - mx; ++x) {
                auto get_yt = [&](int py, int pt) { return video.frame(first + pt).at(x, py); };
                const double centre = f.at(x, y);
                const std::size_t base = static_cast<std::size_t>(grid.block_of(x, y)) * 3 * bins;
                hist[base + map[code_at(get_xy, x, y, centre, xy)]] += 1.0;
                hist[base + bins + map[code_at(get_xt, x, t, centre, xt)]] += 1.0;
                hist[base + 2 * bins + map[code_at(get_yt, y, t, centre, yt)]] += 1.0;
            }
        }
    }
    return FeatureVector{std::move(hist)};
}

}  // namespace mexp
