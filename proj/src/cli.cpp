#include "mexp/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "mexp/dataio.hpp"
#include "mexp/errors.hpp"
#include "mexp/eval.hpp"
#include "mexp/flow.hpp"
#include "mexp/pipeline.hpp"
#include "mexp/spotting.hpp"
#include "mexp/synthetic.hpp"

namespace fs = std::filesystem;

namespace mexp {
namespace {

// Raw flag values; strings are parsed after CLI11 so errors carry our messages.
struct FeatureFlags {
    int blocks = 5;
    int bins = 8;
    std::string local = "flow";
    std::string global = "strain";
    std::string apex = "groundtruth";
    std::string descriptor = "biwoof";
    std::string resize;
    bool l1 = false;
    int lbp_neighbors = 8;
    double lbp_radius = 1.0;
};

struct RunFlags {
    int jobs = 1;
};

std::optional<ImageSize> parse_size(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto x = text.find_first_of("xX");
    if (x == std::string::npos) throw ConfigError("--resize expects WxH, got '" + text + "'");
    try {
        std::size_t used_w = 0, used_h = 0;
        const int w = std::stoi(text.substr(0, x), &used_w);
        const int h = std::stoi(text.substr(x + 1), &used_h);
        if (used_w != x || used_h != text.size() - x - 1 || w < 8 || h < 8) throw ConfigError("");
        return ImageSize{w, h};
    } catch (const std::exception&) {
        throw ConfigError("--resize expects WxH with both sides >= 8, got '" + text + "'");
    }
}

void add_flow_flags(CLI::App* cmd, TvL1Params& p) {
    cmd->add_option("--flow-lambda", p.lambda, "TV-L1 data weight")->capture_default_str();
    cmd->add_option("--flow-theta", p.theta, "TV-L1 coupling")->capture_default_str();
    cmd->add_option("--flow-tau", p.tau, "TV-L1 dual step")->capture_default_str();
    cmd->add_option("--flow-scales", p.n_scales, "pyramid levels")->capture_default_str();
    cmd->add_option("--flow-zoom", p.zoom, "pyramid zoom factor")->capture_default_str();
    cmd->add_option("--flow-warps", p.n_warps, "warps per level")->capture_default_str();
    cmd->add_option("--flow-iters", p.n_iters, "max iterations per warp")->capture_default_str();
    cmd->add_option("--flow-epsilon", p.stop_eps, "stopping threshold")->capture_default_str();
}

void add_feature_flags(CLI::App* cmd, FeatureFlags& f) {
    cmd->add_option("--blocks,-N", f.blocks, "Bi-WOOF / LBP blocks per side")->capture_default_str();
    cmd->add_option("--bins,-C", f.bins, "orientation bins")->capture_default_str();
    cmd->add_option("--local", f.local, "local weight: none|flow|strain")->capture_default_str();
    cmd->add_option("--global", f.global, "global weight: none|flow|strain")->capture_default_str();
    cmd->add_option("--apex", f.apex, "groundtruth|spotted|random:<seed>|offset:<k>")->capture_default_str();
    cmd->add_option("--descriptor", f.descriptor, "biwoof|biwoof-seq|lbpdiff|lbptop")->capture_default_str();
    cmd->add_option("--resize", f.resize, "resize frames to WxH");
    cmd->add_flag("--l1-normalize", f.l1, "L1-normalize each feature vector");
    cmd->add_option("--lbp-neighbors", f.lbp_neighbors, "LBP sampling points")->capture_default_str();
    cmd->add_option("--lbp-radius", f.lbp_radius, "LBP radius")->capture_default_str();
}

void add_run_flags(CLI::App* cmd, RunFlags& r) {
    cmd->add_option("--jobs,-j", r.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

PipelineConfig build_config(const FeatureFlags& f, const TvL1Params& flow) {
    PipelineConfig cfg;
    cfg.descriptor = parse_descriptor(f.descriptor);
    cfg.biwoof.blocks = f.blocks;
    cfg.biwoof.bins = f.bins;
    cfg.biwoof.local_weight = parse_weight_mode(f.local);
    cfg.biwoof.global_weight = parse_weight_mode(f.global);
    cfg.biwoof.validate();
    cfg.apex = parse_apex_spec(f.apex);
    cfg.flow = flow;
    cfg.flow.validate();
    cfg.lbp.neighbors = f.lbp_neighbors;
    cfg.lbp.radius = f.lbp_radius;
    cfg.lbp.validate();
    cfg.resize = parse_size(f.resize);
    cfg.l1_normalize = f.l1;
    return cfg;
}

/// Writes to `path`, or to `fallback` when the path is empty.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty()) {
        fn(fallback);
        return;
    }
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot write " + path);
    fn(file);
    if (!file) throw IoError("write failed: " + path);
}

// --- spot ----------------------------------------------------------------------

struct SpotRow {
    std::optional<SpotResult> result;
    std::optional<int> truth;  // clip-relative
    std::string error;
};

int cmd_spot(const std::string& manifest_path, const FeatureFlags& f, const RunFlags& run,
             const std::string& dump_dir, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const Manifest manifest = load_manifest(manifest_path);
    const auto resize = parse_size(f.resize);
    LbpParams lbp;
    lbp.neighbors = f.lbp_neighbors;
    lbp.radius = f.lbp_radius;
    lbp.validate();

    std::vector<SpotRow> rows(manifest.entries.size());
    parallel_for(rows.size(), run.jobs, [&](std::size_t i) {
        try {
            const VideoSample video = load_video(manifest, i, resize);
            const BlockGrid grid(video.frame(0).width(), video.frame(0).height(), f.blocks);
            rows[i].result = spot_apex(video, grid, lbp);
            rows[i].truth = video.apex_idx();
        } catch (const Error& e) {
            rows[i].error = e.what();
        }
    });

    if (!dump_dir.empty()) {
        fs::create_directories(dump_dir);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].result) continue;
            const auto& r = *rows[i].result;
            emit((fs::path(dump_dir) / (manifest.entries[i].video_id + ".csv")).string(), out, [&](std::ostream& o) {
                o << "frame,score,peak\n";
                for (std::size_t j = 0; j < r.curve.scores.size(); ++j) {
                    const bool peak = std::find(r.peaks.begin(), r.peaks.end(), static_cast<int>(j)) != r.peaks.end();
                    o << manifest.entries[i].onset + j + 1 << ',' << format_real(r.curve.scores[j]) << ','
                      << (peak ? 1 : 0) << '\n';
                }
            });
        }
    }

    int failures = 0;
    double distance_sum = 0.0;
    int distance_count = 0;
    emit(out_path, out, [&](std::ostream& o) {
        o << "video_id,spotted_apex,ground_truth_apex,abs_distance\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& e = manifest.entries[i];
            const auto& row = rows[i];
            if (!row.result) {
                ++failures;
                err << "error: " << e.video_id << ": " << row.error << '\n';
                continue;
            }
            if (row.result->flat_curve)
                err << "warning: " << e.video_id << ": flat difference curve, apex falls back to the onset\n";
            // Frame numbers are reported 1-based, like the manifest.
            o << e.video_id << ',' << e.onset + row.result->apex + 1 << ',';
            if (row.truth) {
                const int d = std::abs(row.result->apex - *row.truth);
                distance_sum += d;
                ++distance_count;
                o << e.onset + *row.truth + 1 << ',' << d;
            } else {
                o << ',';
            }
            o << '\n';
        }
        if (distance_count > 0) o << "mean_abs_distance=" << format_metric(distance_sum / distance_count) << '\n';
    });
    return failures > 0 ? kExitRowErrors : kExitOk;
}

// --- features ------------------------------------------------------------------

int cmd_features(const std::string& manifest_path, const FeatureFlags& f, const TvL1Params& flow,
                 const RunFlags& run, const std::string& out_path, std::ostream& out, std::ostream& err) {
    const PipelineConfig cfg = build_config(f, flow);
    const Manifest manifest = load_manifest(manifest_path);
    const Dataset data = dataset_from_manifest(manifest, cfg.resize);

    std::vector<std::optional<FeatureVector>> features(data.size());
    std::vector<std::string> errors(data.size());
    parallel_for(data.size(), run.jobs, [&](std::size_t i) {
        try {
            features[i] = extract_features(data.load(i), cfg);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });

    std::vector<FeatureRow> rows;
    int failures = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!features[i]) {
            ++failures;
            err << "error: " << data.videos[i].video_id << ": " << errors[i] << '\n';
            continue;
        }
        rows.push_back({data.videos[i].video_id, data.videos[i].label_name, std::move(*features[i])});
    }
    emit(out_path, out, [&](std::ostream& o) { write_features(rows, o); });
    return failures > 0 ? kExitRowErrors : kExitOk;
}

// --- eval / ablate -----------------------------------------------------------------

void write_predictions(const EvalReport& report, std::ostream& o) {
    o << "repeat,fold_id,video_id,truth,predicted\n";
    for (const auto& fold : report.folds)
        for (const auto& p : fold.predictions)
            o << fold.repeat << ',' << fold.fold_id << ',' << p.video_id << ',' << report.class_names.at(p.truth) << ','
              << report.class_names.at(p.predicted) << '\n';
}

int cmd_eval(const std::string& manifest_path, const FeatureFlags& f, const TvL1Params& flow, const RunFlags& run,
             const std::string& protocol, double svm_c, int repeats, const std::string& report_path,
             const std::string& predictions_path, std::ostream& out) {
    const PipelineConfig cfg = build_config(f, flow);
    EvalOptions options;
    options.protocol = parse_protocol(protocol);
    options.svm.reg_c = svm_c;
    options.repeats = repeats;
    options.jobs = run.jobs;
    const Manifest manifest = load_manifest(manifest_path);
    make_folds(manifest, options.protocol);  // fail fast on protocol errors before any extraction
    const EvalReport report = run_protocol(dataset_from_manifest(manifest, cfg.resize), cfg, options);

    if (!report_path.empty()) emit(report_path, out, [&](std::ostream& o) { o << to_json(report).dump(2) << '\n'; });
    if (!predictions_path.empty()) emit(predictions_path, out, [&](std::ostream& o) { write_predictions(report, o); });
    out << "precision=" << format_metric(report.precision) << '\n'
        << "recall=" << format_metric(report.recall) << '\n'
        << "f_measure=" << format_metric(report.f_measure) << '\n'
        << "accuracy=" << format_metric(report.accuracy) << '\n';
    return kExitOk;
}

int cmd_ablate(const std::string& manifest_path, const FeatureFlags& f, const TvL1Params& flow, const RunFlags& run,
               const std::string& axis, const std::string& protocol, double svm_c, int repeats,
               const std::string& out_path, std::ostream& out) {
    const PipelineConfig cfg = build_config(f, flow);
    EvalOptions options;
    options.protocol = parse_protocol(protocol);
    options.svm.reg_c = svm_c;
    options.repeats = repeats;
    options.jobs = run.jobs;
    const AblationAxis which = parse_axis(axis);
    const Manifest manifest = load_manifest(manifest_path);
    make_folds(manifest, options.protocol);
    const AblationTable table = ablate(dataset_from_manifest(manifest, cfg.resize), cfg, which, options);
    emit(out_path, out, [&](std::ostream& o) { o << to_csv(table); });
    return kExitOk;
}

// --- flow / synth --------------------------------------------------------------------

int cmd_flow(const std::string& first, const std::string& second, const TvL1Params& params,
             const std::string& resize, const std::string& out_path, std::ostream& out) {
    params.validate();
    Frame a = read_image(first);
    Frame b = read_image(second);
    if (const auto size = parse_size(resize)) {
        a = resize_frame(a, *size);
        b = resize_frame(b, *size);
    }
    const FlowField flow = estimate_tvl1(a, b, params);
    write_flo(flow, out_path);
    double su = 0.0, sv = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < flow.u().size(); ++i) {
        su += flow.u()[i];
        sv += flow.v()[i];
        peak = std::max(peak, std::hypot(flow.u()[i], flow.v()[i]));
    }
    const double n = static_cast<double>(flow.u().size());
    out << "mean_u=" << format_metric(su / n) << '\n'
        << "mean_v=" << format_metric(sv / n) << '\n'
        << "max_magnitude=" << format_metric(peak) << '\n';
    return kExitOk;
}

int cmd_synth(const std::string& dir, int subjects, std::uint64_t seed, synthetic::Options opts,
              const std::string& profile, std::ostream& out) {
    if (profile == "bump")
        opts.profile = synthetic::Profile::bump;
    else if (profile == "ramp-decay")
        opts.profile = synthetic::Profile::ramp_decay;
    else
        throw ConfigError("--profile must be bump or ramp-decay, got '" + profile + "'");
    const auto clips = synthetic::make_dataset(subjects, opts, seed);
    out << synthetic::write_dataset(clips, dir).string() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Micro-expression toolkit: optical-flow features, apex spotting and SVM evaluation", "mexp"};
    app.set_config("--config", "", "TOML/INI file with default flag values (flags override it)");
    app.require_subcommand(1);

    FeatureFlags feat;
    TvL1Params flow;
    RunFlags run;
    std::string manifest, out_path, dump_dir, protocol = "loso", axis, report_path, predictions_path;
    double svm_c = 1.0;
    int repeats = 10;

    auto* spot = app.add_subcommand("spot", "spot apex frames and compare with the ground truth");
    spot->add_option("manifest", manifest, "manifest CSV")->required();
    spot->add_option("--blocks,-N", feat.blocks, "LBP blocks per side")->capture_default_str();
    spot->add_option("--resize", feat.resize, "resize frames to WxH");
    spot->add_option("--lbp-neighbors", feat.lbp_neighbors, "LBP sampling points")->capture_default_str();
    spot->add_option("--lbp-radius", feat.lbp_radius, "LBP radius")->capture_default_str();
    spot->add_option("--dump-curves", dump_dir, "write one difference-curve CSV per video here");
    spot->add_option("--out,-o", out_path, "CSV output (default stdout)");
    add_run_flags(spot, run);

    auto* features = app.add_subcommand("features", "extract one feature vector per video");
    features->add_option("manifest", manifest, "manifest CSV")->required();
    add_feature_flags(features, feat);
    add_flow_flags(features, flow);
    add_run_flags(features, run);
    features->add_option("--out,-o", out_path, "feature CSV output (default stdout)");

    auto* eval = app.add_subcommand("eval", "cross-validated recognition");
    eval->add_option("manifest", manifest, "manifest CSV")->required();
    add_feature_flags(eval, feat);
    add_flow_flags(eval, flow);
    add_run_flags(eval, run);
    eval->add_option("--protocol", protocol, "loso|lovo")->capture_default_str();
    eval->add_option("--svm-c", svm_c, "SVM regularization C")->capture_default_str();
    eval->add_option("--repeats", repeats, "draws for --apex random")->capture_default_str()->check(
        CLI::PositiveNumber);
    eval->add_option("--report", report_path, "JSON report path");
    eval->add_option("--predictions", predictions_path, "per-video predictions CSV path");

    auto* abl = app.add_subcommand("ablate", "sweep one Bi-WOOF setting");
    abl->add_option("manifest", manifest, "manifest CSV")->required();
    abl->add_option("--axis", axis, "bins|blocks|weights")->required();
    add_feature_flags(abl, feat);
    add_flow_flags(abl, flow);
    add_run_flags(abl, run);
    abl->add_option("--protocol", protocol, "loso|lovo")->capture_default_str();
    abl->add_option("--svm-c", svm_c, "SVM regularization C")->capture_default_str();
    abl->add_option("--repeats", repeats, "draws for --apex random")->capture_default_str()->check(
        CLI::PositiveNumber);
    abl->add_option("--out,-o", out_path, "table CSV output (default stdout)");

    std::string first, second;
    auto* flo = app.add_subcommand("flow", "TV-L1 flow between two images");
    flo->add_option("first", first, "reference image")->required();
    flo->add_option("second", second, "target image")->required();
    flo->add_option("--out,-o", out_path, ".flo output")->required();
    flo->add_option("--resize", feat.resize, "resize both images to WxH");
    add_flow_flags(flo, flow);

    synthetic::Options synth_opts;
    int subjects = 10;
    std::uint64_t seed = 2024;
    std::string profile = "bump";
    auto* synth = app.add_subcommand("synth", "write a synthetic three-class dataset");
    synth->add_option("--out,-o", out_path, "output directory")->required();
    synth->add_option("--subjects", subjects, "subjects (3 clips each)")->capture_default_str()->check(
        CLI::PositiveNumber);
    synth->add_option("--seed", seed, "generator seed")->capture_default_str();
    synth->add_option("--frames", synth_opts.frames, "frames per clip")->capture_default_str();
    synth->add_option("--size", synth_opts.width, "frame side in pixels")->capture_default_str();
    synth->add_option("--amplitude", synth_opts.amplitude, "peak displacement (px)")->capture_default_str();
    synth->add_option("--spread", synth_opts.spread, "temporal width (frames)")->capture_default_str();
    synth->add_option("--noise", synth_opts.noise, "sensor noise sigma")->capture_default_str();
    synth->add_option("--profile", profile, "bump|ramp-decay")->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFailure;
    }

    try {
        if (*spot) return cmd_spot(manifest, feat, run, dump_dir, out_path, out, err);
        if (*features) return cmd_features(manifest, feat, flow, run, out_path, out, err);
        if (*eval)
            return cmd_eval(manifest, feat, flow, run, protocol, svm_c, repeats, report_path, predictions_path, out);
        if (*abl) return cmd_ablate(manifest, feat, flow, run, axis, protocol, svm_c, repeats, out_path, out);
        if (*flo) return cmd_flow(first, second, flow, feat.resize, out_path, out);
        if (*synth) {
            synth_opts.height = synth_opts.width;
            return cmd_synth(out_path, subjects, seed, synth_opts, profile, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitFailure;
}

int run_cli(int argc, const char* const* argv) {
    return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace mexp
