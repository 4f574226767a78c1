#include "mexp/dataio.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "image_ops.hpp"

#ifdef MEXP_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#endif

namespace fs = std::filesystem;

namespace mexp {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

int parse_index(const std::string& text, const std::string& column, const std::string& where) {
    int value = 0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ParseError(where + ": column '" + column + "' is not an integer: '" + text + "'");
    if (value < 1) throw ParseError(where + ": column '" + column + "' must be a 1-based frame number");
    return value - 1;
}

// --- little-endian binary helpers ---

template <typename T>
void put_le(std::ostream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const fs::path& path) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T)))
        throw FormatError("read_flo: truncated file " + path.string());
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

// --- PNM ---

void skip_pnm_space(std::istream& in) {
    while (true) {
        const int c = in.peek();
        if (c == '#') {
            std::string ignored;
            std::getline(in, ignored);
        } else if (c != EOF && std::isspace(c)) {
            in.get();
        } else {
            return;
        }
    }
}

int read_pnm_int(std::istream& in, const fs::path& path) {
    skip_pnm_space(in);
    int v = -1;
    if (!(in >> v) || v < 0) throw IoError("malformed PNM header in " + path.string());
    return v;
}

Frame read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '3' && magic[1] != '5' && magic[1] != '6'))
        throw IoError("unsupported PNM variant in " + path.string());
    const bool color = magic[1] == '3' || magic[1] == '6';
    const bool binary = magic[1] == '5' || magic[1] == '6';
    const int w = read_pnm_int(in, path);
    const int h = read_pnm_int(in, path);
    const int maxval = read_pnm_int(in, path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw IoError("bad PNM header in " + path.string());
    if (binary) in.get();  // single whitespace before raster

    const int channels = color ? 3 : 1;
    const std::size_t samples = static_cast<std::size_t>(w) * h * channels;
    std::vector<double> raw(samples);
    if (binary) {
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> buf(samples * bytes);
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
            throw IoError("truncated PNM raster in " + path.string());
        for (std::size_t i = 0; i < samples; ++i)
            raw[i] = bytes == 1 ? buf[i] : (buf[2 * i] << 8 | buf[2 * i + 1]);
    } else {
        for (std::size_t i = 0; i < samples; ++i) raw[i] = read_pnm_int(in, path);
    }
    std::vector<double> gray(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < gray.size(); ++i) {
        if (color)
            gray[i] = std::clamp(luma(raw[3 * i] / maxval, raw[3 * i + 1] / maxval, raw[3 * i + 2] / maxval), 0.0, 1.0);
        else
            gray[i] = std::min(raw[i], static_cast<double>(maxval)) / maxval;
    }
    return Frame(w, h, std::move(gray));
}

bool is_pnm(const fs::path& p) {
    const auto ext = p.extension().string();
    return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

const std::set<std::string>& image_extensions() {
    static const std::set<std::string> exts{".pgm", ".ppm", ".pnm", ".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff"};
    return exts;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::vector<std::string> Manifest::class_names() const {
    std::vector<std::string> names(label_map.size());
    for (const auto& [name, id] : label_map) names[static_cast<std::size_t>(id)] = name;
    return names;
}

Manifest parse_manifest(std::istream& in, const std::string& source, const fs::path& base_dir) {
    static const std::vector<std::string> required{"dataset", "subject", "video", "frames_dir",
                                                   "onset",   "apex",    "offset", "label"};
    std::string line;
    if (!std::getline(in, line)) throw ParseError(source + ": empty manifest");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[trim(header[i])] = i;
    for (const auto& name : required)
        if (!col.count(name)) throw ParseError(source + ": missing column '" + name + "'");

    Manifest m;
    m.base_dir = base_dir;
    std::set<std::pair<std::string, std::string>> seen;
    std::set<std::string> labels;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const std::string where = source + " row " + std::to_string(row);
        auto cells = split_csv(line);
        if (cells.size() < header.size())
            throw ParseError(where + ": expected " + std::to_string(header.size()) + " cells");
        auto cell = [&](const std::string& name) { return trim(cells[col.at(name)]); };

        ManifestEntry e;
        e.dataset = cell("dataset");
        e.subject_id = cell("subject");
        e.video_id = cell("video");
        e.frames_dir = cell("frames_dir");
        e.onset = parse_index(cell("onset"), "onset", where);
        if (const auto a = cell("apex"); !a.empty()) e.apex = parse_index(a, "apex", where);
        e.offset = parse_index(cell("offset"), "offset", where);
        e.label = cell("label");
        if (e.label.empty()) throw ParseError(where + ": empty label");
        if (e.onset > e.offset) throw ParseError(where + ": onset after offset");
        if (e.apex && (*e.apex < e.onset || *e.apex > e.offset))
            throw ParseError(where + ": apex outside [onset, offset]");
        if (!seen.insert({e.subject_id, e.video_id}).second)
            throw ParseError(where + ": duplicate (subject, video) pair " + e.subject_id + "/" + e.video_id);
        labels.insert(e.label);
        m.entries.push_back(std::move(e));
    }
    int id = 0;
    for (const auto& l : labels) m.label_map[l] = id++;
    return m;
}

Manifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    return parse_manifest(in, path.string(), path.parent_path());
}

void write_manifest(const Manifest& manifest, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << "dataset,subject,video,frames_dir,onset,apex,offset,label\n";
    for (const auto& e : manifest.entries) {
        out << e.dataset << ',' << e.subject_id << ',' << e.video_id << ',' << e.frames_dir.generic_string() << ','
            << e.onset + 1 << ',';
        if (e.apex) out << *e.apex + 1;
        out << ',' << e.offset + 1 << ',' << e.label << '\n';
    }
}

std::vector<fs::path> list_frame_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("frame folder not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && image_extensions().count(lower(entry.path().extension().string())))
            files.push_back(entry.path());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

Frame read_image(const fs::path& path) {
    if (!fs::exists(path)) throw IoError("missing image " + path.string());
    if (is_pnm(path)) return read_pnm(path);
#ifdef MEXP_HAVE_OPENCV
    const cv::Mat img = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (img.empty()) throw IoError("cannot decode " + path.string());
    std::vector<double> gray(static_cast<std::size_t>(img.cols) * img.rows);
    for (int y = 0; y < img.rows; ++y) {
        const auto* row = img.ptr<unsigned char>(y);
        for (int x = 0; x < img.cols; ++x) {
            const double b = row[3 * x] / 255.0, g = row[3 * x + 1] / 255.0, r = row[3 * x + 2] / 255.0;
            gray[static_cast<std::size_t>(y) * img.cols + x] = std::clamp(luma(r, g, b), 0.0, 1.0);
        }
    }
    return Frame(img.cols, img.rows, std::move(gray));
#else
    throw IoError("no decoder for " + path.string() + " (built without OpenCV; use PGM/PPM frames)");
#endif
}

void write_pgm(const Frame& frame, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    const auto bytes = frame_to_bytes(frame);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Frame resize_frame(const Frame& frame, ImageSize size) {
    if (size.width <= 0 || size.height <= 0) throw ConfigError("resize_frame: target size must be positive");
    detail::Plane p(frame.width(), frame.height(), std::vector<double>(frame.values().begin(), frame.values().end()));
    auto r = detail::resize_bilinear(p, size.width, size.height);
    for (double& v : r.data) v = std::clamp(v, 0.0, 1.0);
    return Frame(size.width, size.height, std::move(r.data));
}

VideoSample load_video(const ManifestEntry& entry, int label, std::optional<ImageSize> resize,
                       const fs::path& base_dir) {
    const fs::path dir = entry.frames_dir.is_absolute() || base_dir.empty() ? entry.frames_dir
                                                                             : base_dir / entry.frames_dir;
    const auto files = list_frame_files(dir);
    if (entry.offset >= static_cast<int>(files.size()))
        throw IoError("video " + entry.video_id + ": offset frame " + std::to_string(entry.offset + 1) +
                      " beyond the " + std::to_string(files.size()) + " frames in " + dir.string());
    std::vector<Frame> frames;
    frames.reserve(static_cast<std::size_t>(entry.offset - entry.onset + 1));
    for (int i = entry.onset; i <= entry.offset; ++i) {
        Frame f = read_image(files[static_cast<std::size_t>(i)]);
        if (resize) f = resize_frame(f, *resize);
        if (!frames.empty() && (f.width() != frames.front().width() || f.height() != frames.front().height()))
            throw IoError("video " + entry.video_id + ": inconsistent frame dimensions at " +
                          files[static_cast<std::size_t>(i)].string());
        frames.push_back(std::move(f));
    }
    std::optional<int> apex;
    if (entry.apex) apex = *entry.apex - entry.onset;
    return VideoSample(std::move(frames), 0, apex, entry.offset - entry.onset, label, entry.subject_id,
                       entry.video_id);
}

VideoSample load_video(const Manifest& manifest, std::size_t index, std::optional<ImageSize> resize) {
    const auto& e = manifest.entries.at(index);
    return load_video(e, manifest.label_id(e), resize, manifest.base_dir);
}

void write_flo(const FlowField& flow, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    put_le<float>(out, kFloMagic);
    put_le<std::int32_t>(out, flow.width());
    put_le<std::int32_t>(out, flow.height());
    for (std::size_t i = 0; i < flow.size(); ++i) {
        put_le<float>(out, static_cast<float>(flow.u()[i]));
        put_le<float>(out, static_cast<float>(flow.v()[i]));
    }
    if (!out) throw IoError("write failed for " + path.string());
}

FlowField read_flo(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    const float magic = get_le<float>(in, path);
    if (magic != kFloMagic) throw FormatError("read_flo: bad magic in " + path.string());
    const auto w = get_le<std::int32_t>(in, path);
    const auto h = get_le<std::int32_t>(in, path);
    if (w <= 0 || h <= 0 || static_cast<long long>(w) * h > (1LL << 28))
        throw FormatError("read_flo: implausible dimensions in " + path.string());
    const auto n = static_cast<std::size_t>(w) * h;
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = get_le<float>(in, path);
        v[i] = get_le<float>(in, path);
    }
    return FlowField(w, h, std::move(u), std::move(v));
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

void write_features(const std::vector<FeatureRow>& rows, std::ostream& out) {
    const std::size_t dim = rows.empty() ? 0 : rows.front().features.size();
    for (const auto& r : rows)
        if (r.features.size() != dim) throw ShapeError("export_features: ragged feature lengths");
    out << "video_id,label";
    for (std::size_t i = 0; i < dim; ++i) out << ",f" << i;
    out << '\n';
    for (const auto& r : rows) {
        out << r.video_id << ',' << r.label;
        for (double v : r.features.values) out << ',' << format_real(v);
        out << '\n';
    }
}

void export_features(const std::vector<FeatureRow>& rows, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_features(rows, out);
}

std::vector<FeatureRow> read_features(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty feature file");
    const auto header = split_csv(line);
    if (header.size() < 2 || header[0] != "video_id" || header[1] != "label")
        throw ParseError(path.string() + ": bad feature header");
    std::vector<FeatureRow> rows;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size())
            throw ParseError(path.string() + " row " + std::to_string(row) + ": wrong cell count");
        FeatureRow r{cells[0], cells[1], {}};
        for (std::size_t i = 2; i < cells.size(); ++i) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
            if (ec != std::errc() || ptr != cells[i].data() + cells[i].size())
                throw ParseError(path.string() + " row " + std::to_string(row) + ": bad number '" + cells[i] + "'");
            r.features.values.push_back(v);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace mexp
