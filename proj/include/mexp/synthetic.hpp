#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mexp/core.hpp"
#include "mexp/dataio.hpp"

namespace mexp::synthetic {

// Procedural micro-expression clips with a known apex, used by the test
// suites and by `mexp synth` to exercise the pipeline without licensed data.

enum class Motion { brow_raise, mouth_stretch, dilation };

inline constexpr Motion kMotions[] = {Motion::brow_raise, Motion::mouth_stretch, Motion::dilation};

std::string_view to_string(Motion m);

/// Temporal intensity profile of the planted motion.
enum class Profile { bump, ramp_decay };

struct Options {
    int width = 64;
    int height = 64;
    int frames = 20;
    double amplitude = 1.5;  // peak displacement in pixels
    double spread = 2.5;     // temporal width of the motion bump, in frames
    double noise = 0.01;     // per-frame Gaussian sensor noise (intensity units)
    Profile profile = Profile::bump;
};

/// Smooth random texture in [0.1, 0.9] standing in for a subject's face.
Frame face_texture(std::uint64_t seed, int width, int height);

/// Peak displacement field of a motion class for a face of the given size;
/// `jitter` shifts the facial regions by up to a few pixels.
FlowField motion_field(Motion motion, int width, int height, double amplitude, std::uint64_t jitter = 0);

/// Relative motion intensity at frame t for an apex at `apex` (1 at the apex).
double intensity_profile(int t, int apex, double spread);
/// Linear rise from the onset to 1 at `apex`, exponential decay afterwards.
double ramp_decay_profile(int t, int apex, double spread);

/// Renders a clip: frame t is the face warped by intensity(t) * field plus noise.
VideoSample render_clip(const Frame& face, const FlowField& peak_field, int apex, const Options& options,
                        std::uint64_t noise_seed, int label, std::string subject_id, std::string video_id);

/// `subjects` subjects x one clip per motion class, labels = motion index.
std::vector<VideoSample> make_dataset(int subjects, const Options& options, std::uint64_t seed);

std::vector<std::string> class_names();

/// Writes clips as zero-padded PGM sequences plus `manifest.csv`; returns the manifest path.
std::filesystem::path write_dataset(const std::vector<VideoSample>& clips, const std::filesystem::path& dir);

}  // namespace mexp::synthetic
