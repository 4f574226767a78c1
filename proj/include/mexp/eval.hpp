#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mexp/core.hpp"
#include "mexp/dataio.hpp"
#include "mexp/pipeline.hpp"
#include "mexp/svm.hpp"

namespace mexp {

enum class Protocol { loso, lovo };

std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view text);

struct Fold {
    int fold_id = 0;
    std::vector<std::size_t> train;  // dataset indices
    std::vector<std::size_t> test;
};

/// LOSO: one fold per distinct subject (sorted by subject key). LOVO: one
/// fold per video, in dataset order. Test sets partition the dataset.
std::vector<Fold> make_folds(const std::vector<VideoMeta>& videos, Protocol protocol);
std::vector<Fold> make_folds(const Manifest& manifest, Protocol protocol);

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

/// Micro-averaged precision, recall and F from class-summed TP, FP, FN.
Scores f_measure(const ConfusionMatrix& confusion);

double accuracy(const ConfusionMatrix& confusion);

struct Prediction {
    std::string video_id;
    int truth = 0;
    int predicted = 0;
};

struct FoldResult {
    int fold_id = 0;
    int repeat = 0;
    std::vector<std::string> test_ids;
    std::vector<Prediction> predictions;
};

struct RepeatSummary {
    int repeat = 0;
    double f_measure = 0.0;
    double accuracy = 0.0;
};

struct EvalReport {
    Protocol protocol = Protocol::loso;
    nlohmann::json config;
    std::vector<std::string> class_names;
    std::vector<FoldResult> folds;
    std::vector<RepeatSummary> repeats;  // one entry per random-frame repeat
    ConfusionMatrix confusion;
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
    double accuracy = 0.0;
};

nlohmann::json to_json(const EvalReport& report);

struct EvalOptions {
    Protocol protocol = Protocol::loso;
    SvmOptions svm;
    int repeats = 10;  // random apex source only
    int jobs = 1;
};

/// Cross-validates precomputed features; features[i] belongs to videos[i].
EvalReport evaluate_features(const std::vector<VideoMeta>& videos, int classes,
                             const std::vector<FeatureVector>& features, const EvalOptions& options,
                             int repeat = 0);

nlohmann::json config_to_json(const PipelineConfig& cfg, const EvalOptions& options);

/// Extract features, cross-validate, aggregate. The random apex source runs
/// `options.repeats` independent draws; the pooled confusion matrix (and so
/// every metric) then equals the mean over repeats.
EvalReport run_protocol(const Dataset& data, const PipelineConfig& cfg, const EvalOptions& options);

enum class AblationAxis { bins, blocks, weights };

AblationAxis parse_axis(std::string_view text);

struct AblationTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// bins: C = 1..10; blocks: N = 5..8; weights: local x global modes, laid
/// out with one row per local mode and one column per global mode.
AblationTable ablate(const Dataset& data, const PipelineConfig& base, AblationAxis axis,
                     const EvalOptions& options);

std::string to_csv(const AblationTable& table);

/// 4-decimal text used for console metrics.
std::string format_metric(double v);

}  // namespace mexp
