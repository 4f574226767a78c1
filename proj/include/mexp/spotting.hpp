#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mexp/core.hpp"
#include "mexp/descriptors.hpp"

namespace mexp {

/// Per-frame feature difference to the onset frame; scores[0] is 0.
struct DifferenceCurve {
    std::vector<double> scores;

    std::size_t size() const { return scores.size(); }
};

/// Pearson correlation of two equally long vectors. Zero-variance inputs give
/// 1 when the vectors are identical and 0 otherwise.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

/// scores[j] = 1 - r(LBP(frame 0), LBP(frame j)) over the frames of the clip.
DifferenceCurve frame_difference_curve(const VideoSample& video, const BlockGrid& grid,
                                       const LbpParams& params, std::span<const std::uint8_t> roi_mask = {});

/// Interior local maxima: s[j-1] < s[j] >= s[j+1]. A plateau reports its
/// leftmost index; the two endpoints are never peaks.
std::vector<int> detect_peaks(const DifferenceCurve& curve);

/// Recursive halving: keep the half whose peaks have the larger summed score
/// (ties keep the left half, which also takes the middle element of odd
/// ranges) until at most one peak remains. Returns that peak, or the first
/// argmax of the remaining range when it holds no peak.
int divide_and_conquer(const DifferenceCurve& curve, std::span<const int> peaks);

struct SpotResult {
    int apex = 0;             // 0-based index into the clip
    bool flat_curve = false;  // every score was equal; apex is then frame 0
    DifferenceCurve curve;
    std::vector<int> peaks;
};

/// Apex frame of a clip (frames from onset to offset) by LBP differences and
/// divide-and-conquer peak search.
SpotResult spot_apex(const VideoSample& video, const BlockGrid& grid, const LbpParams& params,
                     std::span<const std::uint8_t> roi_mask = {});

}  // namespace mexp
