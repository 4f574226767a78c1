#include "mexp/pipeline.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <thread>

#include "mexp/spotting.hpp"

namespace mexp {

std::string_view to_string(Descriptor d) {
    switch (d) {
    case Descriptor::biwoof: return "biwoof";
    case Descriptor::biwoof_sequence: return "biwoof-seq";
    case Descriptor::lbpdiff: return "lbpdiff";
    case Descriptor::lbptop: return "lbptop";
    }
    return "biwoof";
}

Descriptor parse_descriptor(std::string_view text) {
    if (text == "biwoof") return Descriptor::biwoof;
    if (text == "biwoof-seq") return Descriptor::biwoof_sequence;
    if (text == "lbpdiff") return Descriptor::lbpdiff;
    if (text == "lbptop") return Descriptor::lbptop;
    throw ConfigError("unknown descriptor '" + std::string(text) + "'");
}

std::string ApexSpec::to_string() const {
    switch (source) {
    case ApexSource::groundtruth: return "groundtruth";
    case ApexSource::spotted: return "spotted";
    case ApexSource::random: return "random:" + std::to_string(seed);
    case ApexSource::fixed_offset: return "offset:" + std::to_string(offset);
    }
    return "groundtruth";
}

ApexSpec parse_apex_spec(std::string_view text) {
    ApexSpec spec;
    auto number_after = [&](std::string_view prefix, auto& out) {
        const auto digits = text.substr(prefix.size());
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
        if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size())
            throw ConfigError("bad apex source '" + std::string(text) + "'");
    };
    if (text == "groundtruth") {
        spec.source = ApexSource::groundtruth;
    } else if (text == "spotted") {
        spec.source = ApexSource::spotted;
    } else if (text.starts_with("random:")) {
        spec.source = ApexSource::random;
        number_after("random:", spec.seed);
    } else if (text == "random") {
        spec.source = ApexSource::random;
    } else if (text.starts_with("offset:")) {
        spec.source = ApexSource::fixed_offset;
        number_after("offset:", spec.offset);
        if (spec.offset < 0) throw ConfigError("apex offset must be >= 0");
    } else {
        throw ConfigError("unknown apex source '" + std::string(text) + "'");
    }
    return spec;
}

namespace {

std::string subject_key(const ManifestEntry& e) {
    return e.dataset.empty() ? e.subject_id : e.dataset + "/" + e.subject_id;
}

}  // namespace

Dataset dataset_from_manifest(const Manifest& manifest, std::optional<ImageSize> resize) {
    Dataset d;
    d.class_names = manifest.class_names();
    for (const auto& e : manifest.entries)
        d.videos.push_back({e.video_id, subject_key(e), manifest.label_id(e), e.label});
    d.load = [manifest, resize](std::size_t i) { return load_video(manifest, i, resize); };
    return d;
}

Dataset dataset_from_samples(std::vector<VideoSample> samples, std::vector<std::string> class_names) {
    Dataset d;
    d.class_names = std::move(class_names);
    for (const auto& s : samples) {
        if (s.label() < 0 || s.label() >= static_cast<int>(d.class_names.size()))
            throw DomainError("dataset_from_samples: label out of range for " + s.video_id());
        d.videos.push_back({s.video_id(), s.subject_id(), s.label(), d.class_names[s.label()]});
    }
    auto shared = std::make_shared<const std::vector<VideoSample>>(std::move(samples));
    d.load = [shared](std::size_t i) { return shared->at(i); };
    return d;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto splitmix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

int resolve_apex(const VideoSample& video, const ApexSpec& spec, const PipelineConfig& cfg, int repeat) {
    const int onset = video.onset_idx();
    const int offset = video.offset_idx();
    switch (spec.source) {
    case ApexSource::groundtruth:
        if (!video.apex_idx()) throw DataError("video " + video.video_id() + " has no ground-truth apex");
        return *video.apex_idx();
    case ApexSource::spotted: {
        const Frame& f = video.frame(onset);
        const BlockGrid grid(f.width(), f.height(), cfg.biwoof.blocks);
        return onset + spot_apex(video, grid, cfg.lbp).apex;
    }
    case ApexSource::random: {
        if (offset == onset) throw DataError("video " + video.video_id() + " has no frame besides the onset");
        std::uint64_t h = 0;
        for (char c : video.video_id()) h = h * 131 + static_cast<unsigned char>(c);
        const std::uint64_t r = mix_seed(spec.seed, static_cast<std::uint64_t>(repeat), h);
        return onset + 1 + static_cast<int>(r % static_cast<std::uint64_t>(offset - onset));
    }
    case ApexSource::fixed_offset: return std::min(onset + spec.offset, offset);
    }
    return onset;
}

Kinematics onset_kinematics(const VideoSample& video, int frame, const TvL1Params& params) {
    return compute_kinematics(estimate_tvl1(video.frame(video.onset_idx()), video.frame(frame), params));
}

FeatureVector extract_features(const VideoSample& video, const PipelineConfig& cfg, int repeat) {
    FeatureVector out;
    const Frame& onset = video.frame(video.onset_idx());
    switch (cfg.descriptor) {
    case Descriptor::biwoof: {
        const int apex = resolve_apex(video, cfg.apex, cfg, repeat);
        const auto k = onset_kinematics(video, apex, cfg.flow);
        out = biwoof(k.orientation, k.magnitude, k.strain, cfg.biwoof);
        break;
    }
    case Descriptor::biwoof_sequence: {
        for (int j = video.onset_idx() + 1; j <= video.offset_idx(); ++j) {
            const auto k = onset_kinematics(video, j, cfg.flow);
            const auto f = biwoof(k.orientation, k.magnitude, k.strain, cfg.biwoof);
            if (out.values.empty()) out.values.assign(f.size(), 0.0);
            for (std::size_t i = 0; i < f.size(); ++i) out.values[i] += f.values[i];
        }
        break;
    }
    case Descriptor::lbpdiff: {
        const int apex = resolve_apex(video, cfg.apex, cfg, repeat);
        const BlockGrid grid(onset.width(), onset.height(), cfg.biwoof.blocks);
        out = lbp_difference_baseline(onset, video.frame(apex), grid, cfg.lbp);
        break;
    }
    case Descriptor::lbptop: {
        const BlockGrid grid(onset.width(), onset.height(), cfg.biwoof.blocks);
        out = lbp_top(video, grid, cfg.lbp, cfg.lbptop);
        break;
    }
    }
    if (cfg.l1_normalize) l1_normalize(out);
    return out;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    std::vector<std::exception_ptr> errors(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::vector<FeatureVector> extract_all(const Dataset& data, const PipelineConfig& cfg, int jobs, int repeat) {
    std::vector<FeatureVector> out(data.size());
    parallel_for(data.size(), jobs, [&](std::size_t i) { out[i] = extract_features(data.load(i), cfg, repeat); });
    return out;
}

}  // namespace mexp
