#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mexp/errors.hpp"

namespace mexp {

/// Grayscale image with intensities in [0,1], stored row-major.
class Frame {
public:
    Frame() = default;
    Frame(int width, int height, std::vector<double> intensities);

    static Frame filled(int width, int height, double value);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const double> values() const { return values_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Intensities are raw / 255 exactly.
Frame frame_from_bytes(int width, int height, std::span<const std::uint8_t> raw);

/// Inverse of frame_from_bytes: round(intensity * 255).
std::vector<std::uint8_t> frame_to_bytes(const Frame& frame);

/// Rec.601 luma of an RGB triple, each channel in [0,1].
inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

/// Per-pixel real values (magnitude, orientation or strain).
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int width, int height, std::vector<double> values);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return values_.size(); }
    double at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const double> values() const { return values_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
};

/// Dense displacement field; u is horizontal, v vertical, both in pixels.
class FlowField {
public:
    FlowField() = default;
    FlowField(int width, int height, std::vector<double> u, std::vector<double> v);

    static FlowField constant(int width, int height, double u, double v);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return u_.size(); }
    double u_at(int x, int y) const { return u_[static_cast<std::size_t>(y) * width_ + x]; }
    double v_at(int x, int y) const { return v_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const double> u() const { return u_; }
    std::span<const double> v() const { return v_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> u_;
    std::vector<double> v_;
};

/// Concatenated block histograms. Entries are finite and nonnegative.
struct FeatureVector {
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

/// Position of (block_row, block_col, bin) inside an N x N x C feature.
constexpr std::size_t feature_index(int blocks, int bins, int block_row, int block_col, int bin) {
    return (static_cast<std::size_t>(block_row) * blocks + block_col) * bins + bin;
}

enum class WeightMode { none, flow, strain };

std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view text);

struct BiwoofConfig {
    int blocks = 5;
    int bins = 8;
    WeightMode local_weight = WeightMode::flow;
    WeightMode global_weight = WeightMode::strain;

    void validate() const;
};

/// A clip of same-sized frames with 0-based onset/apex/offset indices.
class VideoSample {
public:
    VideoSample(std::vector<Frame> frames, int onset_idx, std::optional<int> apex_idx, int offset_idx,
                int label, std::string subject_id, std::string video_id);

    const std::vector<Frame>& frames() const { return frames_; }
    int frame_count() const { return static_cast<int>(frames_.size()); }
    const Frame& frame(int i) const { return frames_.at(static_cast<std::size_t>(i)); }
    int onset_idx() const { return onset_; }
    std::optional<int> apex_idx() const { return apex_; }
    int offset_idx() const { return offset_; }
    int label() const { return label_; }
    const std::string& subject_id() const { return subject_; }
    const std::string& video_id() const { return video_; }

private:
    std::vector<Frame> frames_;
    int onset_ = 0;
    std::optional<int> apex_;
    int offset_ = 0;
    int label_ = 0;
    std::string subject_;
    std::string video_;
};

/// counts[t][p]: samples of true class t predicted as p.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(int classes = 0);

    int classes() const { return classes_; }
    void add(int truth, int predicted, long long count = 1);
    long long at(int truth, int predicted) const;
    long long total() const;
    long long trace() const;
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);

private:
    int classes_ = 0;
    std::vector<long long> counts_;
};

}  // namespace mexp
