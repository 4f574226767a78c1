#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mexp/core.hpp"
#include "mexp/dataio.hpp"
#include "mexp/descriptors.hpp"
#include "mexp/flow.hpp"
#include "mexp/kinematics.hpp"

namespace mexp {

enum class Descriptor {
    biwoof,           // onset + apex flow, Bi-WOOF
    biwoof_sequence,  // Bi-WOOF of onset->frame j flow, summed over every frame
    lbpdiff,          // LBP of the onset/apex difference image
    lbptop,           // LBP-TOP over the whole clip
};

std::string_view to_string(Descriptor d);
Descriptor parse_descriptor(std::string_view text);

enum class ApexSource { groundtruth, spotted, random, fixed_offset };

/// Where the second frame of a two-frame descriptor comes from.
struct ApexSpec {
    ApexSource source = ApexSource::groundtruth;
    std::uint64_t seed = 0;  // random
    int offset = 0;          // fixed_offset: frames after onset

    std::string to_string() const;
};

/// "groundtruth", "spotted", "random:<seed>" ("random" alone means seed 0), "offset:<k>".
ApexSpec parse_apex_spec(std::string_view text);

struct PipelineConfig {
    Descriptor descriptor = Descriptor::biwoof;
    BiwoofConfig biwoof;
    ApexSpec apex;
    TvL1Params flow;
    LbpParams lbp;
    LbpTopRadii lbptop;
    std::optional<ImageSize> resize;
    bool l1_normalize = false;
};

/// Per-video facts needed without loading frames.
struct VideoMeta {
    std::string video_id;
    std::string subject_key;  // "dataset/subject" (or just subject when dataset is empty)
    int label = 0;
    std::string label_name;
};

/// A labelled collection of clips that can be loaded one at a time.
struct Dataset {
    std::vector<VideoMeta> videos;
    std::vector<std::string> class_names;
    std::function<VideoSample(std::size_t)> load;

    std::size_t size() const { return videos.size(); }
    int class_count() const { return static_cast<int>(class_names.size()); }
};

Dataset dataset_from_manifest(const Manifest& manifest, std::optional<ImageSize> resize = std::nullopt);
Dataset dataset_from_samples(std::vector<VideoSample> samples, std::vector<std::string> class_names);

/// Deterministic 64-bit mix used to derive per-video random streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Clip-relative apex index for a video under `spec`. `repeat` selects an
/// independent random draw; random draws exclude the onset frame.
int resolve_apex(const VideoSample& video, const ApexSpec& spec, const PipelineConfig& cfg, int repeat = 0);

/// Onset-to-frame kinematics used by the Bi-WOOF descriptor.
Kinematics onset_kinematics(const VideoSample& video, int frame, const TvL1Params& params);

/// Feature vector of one clip under the configured descriptor.
FeatureVector extract_features(const VideoSample& video, const PipelineConfig& cfg, int repeat = 0);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written
/// to per-index slots; the first exception by index is rethrown.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// Features of every video (in dataset order).
std::vector<FeatureVector> extract_all(const Dataset& data, const PipelineConfig& cfg, int jobs, int repeat = 0);

}  // namespace mexp
