#include "mexp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "image_ops.hpp"

namespace fs = std::filesystem;

namespace mexp::synthetic {

std::string_view to_string(Motion m) {
    switch (m) {
    case Motion::brow_raise: return "brow_raise";
    case Motion::mouth_stretch: return "mouth_stretch";
    case Motion::dilation: return "dilation";
    }
    return "brow_raise";
}

std::vector<std::string> class_names() {
    return {std::string(to_string(Motion::brow_raise)), std::string(to_string(Motion::mouth_stretch)),
            std::string(to_string(Motion::dilation))};
}

Frame face_texture(std::uint64_t seed, int width, int height) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    detail::Plane fine(width, height);
    for (double& v : fine.data) v = gauss(rng);
    fine = detail::gaussian_blur(fine, 1.2);
    detail::Plane coarse(width, height);
    for (double& v : coarse.data) v = gauss(rng);
    coarse = detail::gaussian_blur(coarse, 4.0);

    std::vector<double> mix(fine.size());
    for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = fine.data[i] + 2.0 * coarse.data[i];
    const auto [lo, hi] = std::minmax_element(mix.begin(), mix.end());
    const double a = *lo, span = std::max(*hi - *lo, 1e-12);
    for (double& v : mix) v = 0.1 + 0.8 * (v - a) / span;
    return Frame(width, height, std::move(mix));
}

FlowField motion_field(Motion motion, int width, int height, double amplitude, std::uint64_t jitter) {
    std::mt19937_64 rng(jitter);
    std::uniform_real_distribution<double> shift(-2.0, 2.0);
    const double jx = jitter ? shift(rng) : 0.0;
    const double jy = jitter ? shift(rng) : 0.0;
    const double w = width, h = height;
    const double sigma = 0.12 * std::min(w, h);
    auto bump = [&](double x, double y, double cx, double cy) {
        const double dx = x - cx, dy = y - cy;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    };

    const auto n = static_cast<std::size_t>(width) * height;
    std::vector<double> u(n, 0.0), v(n, 0.0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            switch (motion) {
            case Motion::brow_raise:
                v[i] = -amplitude * (bump(x, y, 0.3 * w + jx, 0.3 * h + jy) + bump(x, y, 0.7 * w + jx, 0.3 * h + jy));
                break;
            case Motion::mouth_stretch:
                u[i] = amplitude * (bump(x, y, 0.65 * w + jx, 0.75 * h + jy) - bump(x, y, 0.35 * w + jx, 0.75 * h + jy));
                break;
            case Motion::dilation: {
                // Radial expansion fading out towards the frame border; the
                // displacement peaks at `amplitude` one face_sigma from the centre.
                const double face_sigma = 0.25 * std::min(w, h);
                const double dx = x - (0.5 * w + jx), dy = y - (0.5 * h + jy);
                const double s = amplitude / (face_sigma * std::exp(-0.5)) *
                                 std::exp(-(dx * dx + dy * dy) / (2.0 * face_sigma * face_sigma));
                u[i] = s * dx;
                v[i] = s * dy;
                break;
            }
            }
        }
    return FlowField(width, height, std::move(u), std::move(v));
}

double intensity_profile(int t, int apex, double spread) {
    const double d = (t - apex) / spread;
    return std::exp(-d * d);
}

double ramp_decay_profile(int t, int apex, double spread) {
    if (t <= apex) return apex > 0 ? static_cast<double>(t) / apex : 1.0;
    return std::exp(-(t - apex) / spread);
}

VideoSample render_clip(const Frame& face, const FlowField& peak_field, int apex, const Options& options,
                        std::uint64_t noise_seed, int label, std::string subject_id, std::string video_id) {
    if (face.width() != peak_field.width() || face.height() != peak_field.height())
        throw ShapeError("render_clip: face and motion field differ in size");
    if (apex < 1 || apex >= options.frames) throw DomainError("render_clip: apex outside the clip");
    std::mt19937_64 rng(noise_seed);
    std::normal_distribution<double> gauss(0.0, options.noise);
    detail::Plane base(face.width(), face.height(), std::vector<double>(face.values().begin(), face.values().end()));

    std::vector<Frame> frames;
    for (int t = 0; t < options.frames; ++t) {
        const double a = t == 0                                  ? 0.0
                         : options.profile == Profile::ramp_decay ? ramp_decay_profile(t, apex, options.spread)
                                                                  : intensity_profile(t, apex, options.spread);
        std::vector<double> px(face.size());
        for (int y = 0; y < face.height(); ++y)
            for (int x = 0; x < face.width(); ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * face.width() + x;
                const double s = detail::sample_bilinear(base, x - a * peak_field.u()[i], y - a * peak_field.v()[i]);
                px[i] = std::clamp(s + (options.noise > 0.0 ? gauss(rng) : 0.0), 0.0, 1.0);
            }
        frames.emplace_back(face.width(), face.height(), std::move(px));
    }
    return VideoSample(std::move(frames), 0, apex, options.frames - 1, label, std::move(subject_id),
                       std::move(video_id));
}

std::vector<VideoSample> make_dataset(int subjects, const Options& options, std::uint64_t seed) {
    std::vector<VideoSample> clips;
    std::mt19937_64 rng(seed);
    const int lo = std::max(2, options.frames / 4);
    const int hi = std::max(lo, options.frames - 1 - options.frames / 4);
    std::uniform_int_distribution<int> apex_pick(lo, hi);
    std::uniform_real_distribution<double> amp_jitter(0.8, 1.2);
    for (int s = 0; s < subjects; ++s) {
        char subject[16];
        std::snprintf(subject, sizeof subject, "s%02d", s + 1);
        const Frame face = face_texture(rng(), options.width, options.height);
        for (int m = 0; m < 3; ++m) {
            const Motion motion = kMotions[m];
            const FlowField field =
                motion_field(motion, options.width, options.height, options.amplitude * amp_jitter(rng), rng());
            const int apex = apex_pick(rng);
            clips.push_back(render_clip(face, field, apex, options, rng(), m, subject,
                                        std::string(subject) + "_" + std::string(to_string(motion))));
        }
    }
    return clips;
}

fs::path write_dataset(const std::vector<VideoSample>& clips, const fs::path& dir) {
    fs::create_directories(dir);
    Manifest manifest;
    const auto names = class_names();
    for (const auto& clip : clips) {
        const fs::path rel = fs::path(clip.subject_id()) / clip.video_id();
        fs::create_directories(dir / rel);
        for (int t = 0; t < clip.frame_count(); ++t) {
            char name[32];
            std::snprintf(name, sizeof name, "img%04d.pgm", t + 1);
            write_pgm(clip.frame(t), dir / rel / name);
        }
        ManifestEntry e;
        e.dataset = "synthetic";
        e.subject_id = clip.subject_id();
        e.video_id = clip.video_id();
        e.frames_dir = rel;
        e.onset = clip.onset_idx();
        e.apex = clip.apex_idx();
        e.offset = clip.offset_idx();
        e.label = names.at(static_cast<std::size_t>(clip.label()));
        manifest.entries.push_back(std::move(e));
    }
    const fs::path path = dir / "manifest.csv";
    write_manifest(manifest, path);
    return path;
}

}  // namespace mexp::synthetic
