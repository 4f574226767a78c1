#include "mexp/descriptors.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace mexp {

BlockGrid::BlockGrid(int width, int height, int blocks)
    : width_(width), height_(height), blocks_(blocks) {
    if (blocks < 1) throw ConfigError("block_partition: need at least one block");
    if (width < 1 || height < 1) throw ShapeError("block_partition: empty image");
    if (blocks > std::min(width, height))
        throw ConfigError("block_partition: " + std::to_string(blocks) + " blocks per side exceed image size " +
                          std::to_string(width) + "x" + std::to_string(height));
    const int bw = width / blocks;
    const int bh = height / blocks;
    bounds_.reserve(static_cast<std::size_t>(blocks) * blocks);
    for (int r = 0; r < blocks; ++r) {
        const int y0 = r * bh;
        const int y1 = r == blocks - 1 ? height : y0 + bh;
        for (int c = 0; c < blocks; ++c) {
            const int x0 = c * bw;
            const int x1 = c == blocks - 1 ? width : x0 + bw;
            bounds_.push_back({x0, x1, y0, y1});
        }
    }
    col_of_.resize(static_cast<std::size_t>(width));
    row_of_.resize(static_cast<std::size_t>(height));
    for (int x = 0; x < width; ++x) col_of_[x] = std::min(x / bw, blocks - 1);
    for (int y = 0; y < height; ++y) row_of_[y] = std::min(y / bh, blocks - 1);
}

BlockGrid block_partition(int width, int height, int blocks) { return BlockGrid(width, height, blocks); }

int bin_index(double theta, int bins) {
    constexpr double pi = std::numbers::pi;
    if (bins < 1) throw ConfigError("bin_index: bins must be >= 1");
    if (!(theta >= -pi && theta <= pi)) throw DomainError("bin_index: orientation outside [-pi, pi]");
    const int bin = static_cast<int>(std::floor((theta + pi) * bins / (2.0 * pi)));
    return std::clamp(bin, 0, bins - 1);
}

namespace {

double weight_of(WeightMode mode, double magnitude, double strain) {
    switch (mode) {
    case WeightMode::none: return 1.0;
    case WeightMode::flow: return magnitude;
    case WeightMode::strain: return strain;
    }
    return 1.0;
}

}  // namespace

FeatureVector biwoof(const ScalarField& orientation, const ScalarField& magnitude,
                     const ScalarField& strain, const BiwoofConfig& cfg) {
    cfg.validate();
    const int w = orientation.width();
    const int h = orientation.height();
    if (magnitude.width() != w || magnitude.height() != h || strain.width() != w || strain.height() != h)
        throw ShapeError("biwoof: orientation, magnitude and strain differ in size");
    const BlockGrid grid(w, h, cfg.blocks);
    const int nb = cfg.blocks * cfg.blocks;

    std::vector<double> hist(static_cast<std::size_t>(nb) * cfg.bins, 0.0);
    std::vector<double> global_sum(static_cast<std::size_t>(nb), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double rho = magnitude.at(x, y);
            const double eps = strain.at(x, y);
            const int b = grid.block_of(x, y);
            const int c = bin_index(orientation.at(x, y), cfg.bins);
            hist[static_cast<std::size_t>(b) * cfg.bins + c] += weight_of(cfg.local_weight, rho, eps);
            global_sum[b] += weight_of(cfg.global_weight, rho, eps);
        }

    for (int b = 0; b < nb; ++b) {
        const double zeta = global_sum[b] / grid.bounds()[b].pixel_count();
        for (int c = 0; c < cfg.bins; ++c) hist[static_cast<std::size_t>(b) * cfg.bins + c] *= zeta;
    }
    return FeatureVector{std::move(hist)};
}

void l1_normalize(FeatureVector& features) {
    const double total = std::accumulate(features.values.begin(), features.values.end(), 0.0);
    if (total <= 0.0) return;
    for (double& v : features.values) v /= total;
}

}  // namespace mexp
