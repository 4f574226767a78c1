#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mexp/core.hpp"

namespace mexp {

/// One manifest row; indices are 0-based in memory.
struct ManifestEntry {
    std::string dataset;
    std::string subject_id;
    std::string video_id;
    std::filesystem::path frames_dir;
    int onset = 0;
    std::optional<int> apex;
    int offset = 0;
    std::string label;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
    std::map<std::string, int> label_map;  // ids assigned in lexicographic label order
    std::filesystem::path base_dir;        // relative frames_dir entries resolve against this

    int class_count() const { return static_cast<int>(label_map.size()); }
    int label_id(const ManifestEntry& e) const { return label_map.at(e.label); }
    std::vector<std::string> class_names() const;
};

/// Parses `dataset,subject,video,frames_dir,onset,apex,offset,label` (1-based
/// indices, apex may be empty). `base_dir` is recorded for resolving paths.
Manifest parse_manifest(std::istream& in, const std::string& source = "<manifest>",
                        const std::filesystem::path& base_dir = {});

/// Reads a manifest file; relative frame folders resolve against its directory.
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

struct ImageSize {
    int width = 0;
    int height = 0;
};

/// Image files of a folder (by extension), sorted by file name.
std::vector<std::filesystem::path> list_frame_files(const std::filesystem::path& dir);

/// Decodes an image to grayscale. PGM/PPM are read natively; other formats
/// need the OpenCV codecs (reported as IoError when unavailable).
Frame read_image(const std::filesystem::path& path);

/// Binary 8-bit PGM (P5).
void write_pgm(const Frame& frame, const std::filesystem::path& path);

/// Bilinear resampling to a new size (half-pixel centre convention).
Frame resize_frame(const Frame& frame, ImageSize size);

/// Loads frames onset..offset of an entry; the returned clip is rebased so
/// that its onset index is 0.
VideoSample load_video(const ManifestEntry& entry, int label, std::optional<ImageSize> resize = std::nullopt,
                       const std::filesystem::path& base_dir = {});

VideoSample load_video(const Manifest& manifest, std::size_t index,
                       std::optional<ImageSize> resize = std::nullopt);

// --- Middlebury .flo ---------------------------------------------------------

inline constexpr float kFloMagic = 202021.25f;

void write_flo(const FlowField& flow, const std::filesystem::path& path);
FlowField read_flo(const std::filesystem::path& path);

// --- feature matrices ----------------------------------------------------------

struct FeatureRow {
    std::string video_id;
    std::string label;
    FeatureVector features;
};

/// CSV `video_id,label,f0,...,f{D-1}` with 9 significant digits.
void export_features(const std::vector<FeatureRow>& rows, const std::filesystem::path& path);
void write_features(const std::vector<FeatureRow>& rows, std::ostream& out);
std::vector<FeatureRow> read_features(const std::filesystem::path& path);

/// Shortest decimal text of v with 9 significant digits.
std::string format_real(double v);

}  // namespace mexp
