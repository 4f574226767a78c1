#include "mexp/core.hpp"

#include <cmath>
#include <numeric>

namespace mexp {
namespace {

void check_dims(int width, int height, std::size_t n, const char* what) {
    if (width <= 0 || height <= 0)
        throw ShapeError(std::string(what) + ": dimensions must be positive");
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != n)
        throw ShapeError(std::string(what) + ": value count does not match width*height");
}

void check_finite(std::span<const double> values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite value");
}

}  // namespace

Frame::Frame(int width, int height, std::vector<double> intensities)
    : width_(width), height_(height), values_(std::move(intensities)) {
    check_dims(width_, height_, values_.size(), "Frame");
    for (double v : values_)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw InputError("Frame: intensity outside [0,1]");
}

Frame Frame::filled(int width, int height, double value) {
    if (width <= 0 || height <= 0) throw ShapeError("Frame: dimensions must be positive");
    return Frame(width, height,
                 std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

Frame frame_from_bytes(int width, int height, std::span<const std::uint8_t> raw) {
    if (raw.empty() || width <= 0 || height <= 0)
        throw ShapeError("frame_from_bytes: empty grid");
    if (static_cast<std::size_t>(width) * height != raw.size())
        throw ShapeError("frame_from_bytes: byte count does not match width*height");
    std::vector<double> values(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) values[i] = raw[i] / 255.0;
    return Frame(width, height, std::move(values));
}

std::vector<std::uint8_t> frame_to_bytes(const Frame& frame) {
    std::vector<std::uint8_t> out(frame.size());
    auto values = frame.values();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>(std::lround(values[i] * 255.0));
    return out;
}

ScalarField::ScalarField(int width, int height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
    check_dims(width_, height_, values_.size(), "ScalarField");
    check_finite(values_, "ScalarField");
}

FlowField::FlowField(int width, int height, std::vector<double> u, std::vector<double> v)
    : width_(width), height_(height), u_(std::move(u)), v_(std::move(v)) {
    check_dims(width_, height_, u_.size(), "FlowField");
    check_dims(width_, height_, v_.size(), "FlowField");
    check_finite(u_, "FlowField");
    check_finite(v_, "FlowField");
}

FlowField FlowField::constant(int width, int height, double u, double v) {
    if (width <= 0 || height <= 0) throw ShapeError("FlowField: dimensions must be positive");
    const auto n = static_cast<std::size_t>(width) * height;
    return FlowField(width, height, std::vector<double>(n, u), std::vector<double>(n, v));
}

std::string_view to_string(WeightMode mode) {
    switch (mode) {
    case WeightMode::none: return "none";
    case WeightMode::flow: return "flow";
    case WeightMode::strain: return "strain";
    }
    return "none";
}

WeightMode parse_weight_mode(std::string_view text) {
    if (text == "none") return WeightMode::none;
    if (text == "flow") return WeightMode::flow;
    if (text == "strain") return WeightMode::strain;
    throw ConfigError("unknown weight mode '" + std::string(text) + "'");
}

void BiwoofConfig::validate() const {
    if (blocks < 1) throw ConfigError("BiwoofConfig: blocks must be >= 1");
    if (bins < 1) throw ConfigError("BiwoofConfig: bins must be >= 1");
}

VideoSample::VideoSample(std::vector<Frame> frames, int onset_idx, std::optional<int> apex_idx,
                         int offset_idx, int label, std::string subject_id, std::string video_id)
    : frames_(std::move(frames)), onset_(onset_idx), apex_(apex_idx), offset_(offset_idx),
      label_(label), subject_(std::move(subject_id)), video_(std::move(video_id)) {
    if (frames_.size() < 2) throw ShapeError("VideoSample '" + video_ + "': needs at least 2 frames");
    for (const auto& f : frames_)
        if (f.width() != frames_.front().width() || f.height() != frames_.front().height())
            throw ShapeError("VideoSample '" + video_ + "': frames differ in size");
    if (onset_ < 0 || offset_ >= frame_count() || onset_ > offset_)
        throw DomainError("VideoSample '" + video_ + "': onset/offset out of range");
    if (apex_ && (*apex_ < onset_ || *apex_ > offset_))
        throw DomainError("VideoSample '" + video_ + "': apex outside [onset, offset]");
}

ConfusionMatrix::ConfusionMatrix(int classes)
    : classes_(classes), counts_(static_cast<std::size_t>(classes) * classes, 0) {
    if (classes < 0) throw DomainError("ConfusionMatrix: negative class count");
}

void ConfusionMatrix::add(int truth, int predicted, long long count) {
    if (truth < 0 || truth >= classes_ || predicted < 0 || predicted >= classes_)
        throw DomainError("ConfusionMatrix: class id out of range");
    if (count < 0) throw DomainError("ConfusionMatrix: negative count");
    counts_[static_cast<std::size_t>(truth) * classes_ + predicted] += count;
}

long long ConfusionMatrix::at(int truth, int predicted) const {
    return counts_.at(static_cast<std::size_t>(truth) * classes_ + predicted);
}

long long ConfusionMatrix::total() const {
    return std::accumulate(counts_.begin(), counts_.end(), 0LL);
}

long long ConfusionMatrix::trace() const {
    long long t = 0;
    for (int i = 0; i < classes_; ++i) t += at(i, i);
    return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    if (other.classes_ != classes_) throw ShapeError("ConfusionMatrix: class count mismatch");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    return *this;
}

}  // namespace mexp
