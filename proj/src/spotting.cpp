#include "mexp/spotting.hpp"

#include <algorithm>
#include <cmath>

namespace mexp {

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) throw ShapeError("pearson_correlation: length mismatch");
    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean_a += a[i], mean_b += b[i];
    mean_a /= n;
    mean_b /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::equal(a.begin(), a.end(), b.begin()) ? 1.0 : 0.0;
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

DifferenceCurve frame_difference_curve(const VideoSample& video, const BlockGrid& grid,
                                       const LbpParams& params, std::span<const std::uint8_t> roi_mask) {
    const int first = video.onset_idx();
    const int count = video.offset_idx() - first + 1;
    if (count < 2) throw ShapeError("frame_difference_curve: need at least 2 frames");
    const FeatureVector reference = lbp_histogram(video.frame(first), grid, params, roi_mask);
    DifferenceCurve curve;
    curve.scores.assign(static_cast<std::size_t>(count), 0.0);
    for (int j = 1; j < count; ++j) {
        const FeatureVector f = lbp_histogram(video.frame(first + j), grid, params, roi_mask);
        curve.scores[j] = 1.0 - pearson_correlation(reference.values, f.values);
    }
    return curve;
}

std::vector<int> detect_peaks(const DifferenceCurve& curve) {
    std::vector<int> peaks;
    const auto& s = curve.scores;
    for (std::size_t j = 1; j + 1 < s.size(); ++j)
        if (s[j - 1] < s[j] && s[j] >= s[j + 1]) peaks.push_back(static_cast<int>(j));
    return peaks;
}

int divide_and_conquer(const DifferenceCurve& curve, std::span<const int> peaks) {
    const auto& s = curve.scores;
    if (s.empty()) throw ShapeError("divide_and_conquer: empty curve");
    std::vector<int> live;
    for (int p : peaks)
        if (p >= 0 && static_cast<std::size_t>(p) < s.size()) live.push_back(p);
    std::sort(live.begin(), live.end());

    int lo = 0;
    int hi = static_cast<int>(s.size());  // half-open
    while (live.size() > 1 && hi - lo > 1) {
        const int mid = lo + (hi - lo + 1) / 2;
        double left = 0.0, right = 0.0;
        for (int p : live) (p < mid ? left : right) += s[p];
        std::vector<int> kept;
        if (left >= right) {
            hi = mid;
            for (int p : live)
                if (p < mid) kept.push_back(p);
        } else {
            lo = mid;
            for (int p : live)
                if (p >= mid) kept.push_back(p);
        }
        live = std::move(kept);
    }
    if (live.size() == 1) return live.front();
    return static_cast<int>(std::max_element(s.begin() + lo, s.begin() + hi) - s.begin());
}

SpotResult spot_apex(const VideoSample& video, const BlockGrid& grid, const LbpParams& params,
                     std::span<const std::uint8_t> roi_mask) {
    if (video.offset_idx() - video.onset_idx() + 1 < 3) throw ShapeError("spot_apex: need at least 3 frames");
    SpotResult out;
    out.curve = frame_difference_curve(video, grid, params, roi_mask);
    out.peaks = detect_peaks(out.curve);
    out.apex = divide_and_conquer(out.curve, out.peaks);
    const auto [mn, mx] = std::minmax_element(out.curve.scores.begin(), out.curve.scores.end());
    out.flat_curve = *mn == *mx;
    return out;
}

}  // namespace mexp
