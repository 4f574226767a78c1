#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mexp/core.hpp"

namespace mexp {

/// Half-open pixel range of one block.
struct BlockBounds {
    int x0, x1, y0, y1;

    int pixel_count() const { return (x1 - x0) * (y1 - y0); }
};

/// N x N tiling of a width x height image. Blocks are listed row-major
/// (block row first). Every block is floor(X/N) by floor(Y/N) except the last
/// column and row, which absorb the remainder.
class BlockGrid {
public:
    BlockGrid(int width, int height, int blocks);

    int blocks() const { return blocks_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<BlockBounds>& bounds() const { return bounds_; }
    const BlockBounds& block(int block_row, int block_col) const {
        return bounds_[static_cast<std::size_t>(block_row) * blocks_ + block_col];
    }
    int column_of(int x) const { return col_of_[static_cast<std::size_t>(x)]; }
    int row_of(int y) const { return row_of_[static_cast<std::size_t>(y)]; }
    /// Row-major block index of pixel (x, y).
    int block_of(int x, int y) const { return row_of(y) * blocks_ + column_of(x); }

private:
    int width_, height_, blocks_;
    std::vector<BlockBounds> bounds_;
    std::vector<int> col_of_, row_of_;
};

/// Throws ConfigError when blocks > min(width, height) or blocks < 1.
BlockGrid block_partition(int width, int height, int blocks);

/// 0-based histogram bin of an orientation in [-pi, pi]; pi falls in the top bin.
int bin_index(double theta, int bins);

/// Block-wise orientation histogram with per-pixel (local) and per-block
/// (global) weights. (none, none) is a plain orientation count (HOOF).
FeatureVector biwoof(const ScalarField& orientation, const ScalarField& magnitude,
                     const ScalarField& strain, const BiwoofConfig& cfg);

/// Divides every entry by the sum of all entries (no-op for an all-zero vector).
void l1_normalize(FeatureVector& features);

// --- Local binary patterns ---------------------------------------------------

struct LbpParams {
    int neighbors = 8;     // P
    double radius = 1.0;   // R in pixels
    bool uniform = true;   // map to P(P-1)+3 bins instead of 2^P

    void validate() const;
};

/// Histogram length of one block for the given parameters.
int lbp_bin_count(const LbpParams& params);

/// Code -> histogram bin. Uniform patterns (at most two circular 0/1
/// transitions) get consecutive bins in increasing code order; everything else
/// shares the last bin.
std::vector<int> lbp_mapping(const LbpParams& params);

/// LBP code of a single pixel; neighbour k sits at angle 2*pi*k/P from the
/// positive x axis (counter-clockwise, image y pointing down) and sets bit k
/// when its bilinear sample is >= the centre.
unsigned lbp_code(const Frame& frame, int x, int y, const LbpParams& params);

/// Per-block histograms of LBP codes over interior pixels (at least R from the
/// border). A non-empty mask (one byte per pixel) restricts the pixels counted
/// to those with a nonzero mask value.
FeatureVector lbp_histogram(const Frame& frame, const BlockGrid& grid, const LbpParams& params,
                            std::span<const std::uint8_t> mask = {});

/// LBP of the difference image (probe - onset + 1) / 2.
FeatureVector lbp_difference_baseline(const Frame& onset, const Frame& probe, const BlockGrid& grid,
                                      const LbpParams& params);

/// Difference image used by lbp_difference_baseline.
Frame difference_image(const Frame& onset, const Frame& probe);

struct LbpTopRadii {
    double rx = 1.0;
    double ry = 1.0;
    double rt = 2.0;
};

/// LBP on three orthogonal planes over the frames of a clip. Per block the
/// feature is [XY histogram, XT histogram, YT histogram]; blocks follow the
/// usual row-major order. params.radius is ignored in favour of `radii`.
FeatureVector lbp_top(const VideoSample& video, const BlockGrid& grid, const LbpParams& params,
                      const LbpTopRadii& radii = {});

}  // namespace mexp
