#include "mexp/eval.hpp"

#include <cstdio>
#include <map>
#include <sstream>

namespace mexp {

std::string_view to_string(Protocol p) { return p == Protocol::loso ? "loso" : "lovo"; }

Protocol parse_protocol(std::string_view text) {
    if (text == "loso") return Protocol::loso;
    if (text == "lovo") return Protocol::lovo;
    throw ConfigError("unknown protocol '" + std::string(text) + "'");
}

std::vector<Fold> make_folds(const std::vector<VideoMeta>& videos, Protocol protocol) {
    std::vector<Fold> folds;
    if (protocol == Protocol::lovo) {
        for (std::size_t i = 0; i < videos.size(); ++i) {
            Fold f;
            f.fold_id = static_cast<int>(i);
            f.test.push_back(i);
            for (std::size_t j = 0; j < videos.size(); ++j)
                if (j != i) f.train.push_back(j);
            folds.push_back(std::move(f));
        }
        return folds;
    }
    std::map<std::string, std::vector<std::size_t>> by_subject;
    for (std::size_t i = 0; i < videos.size(); ++i) by_subject[videos[i].subject_key].push_back(i);
    if (by_subject.size() < 2)
        throw ProtocolError("LOSO needs at least 2 subjects, found " + std::to_string(by_subject.size()));
    for (const auto& [subject, members] : by_subject) {
        Fold f;
        f.fold_id = static_cast<int>(folds.size());
        f.test = members;
        for (std::size_t j = 0; j < videos.size(); ++j)
            if (videos[j].subject_key != subject) f.train.push_back(j);
        folds.push_back(std::move(f));
    }
    return folds;
}

std::vector<Fold> make_folds(const Manifest& manifest, Protocol protocol) {
    return make_folds(dataset_from_manifest(manifest).videos, protocol);
}

Scores f_measure(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw DomainError("f_measure: empty confusion matrix");
    long long tp = 0, fp = 0, fn = 0;
    for (int c = 0; c < cm.classes(); ++c) {
        long long row = 0, col = 0;
        for (int k = 0; k < cm.classes(); ++k) row += cm.at(c, k), col += cm.at(k, c);
        tp += cm.at(c, c);
        fn += row - cm.at(c, c);
        fp += col - cm.at(c, c);
    }
    Scores s;
    s.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    s.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    if (s.precision + s.recall == 0.0)
        s.f_measure = 0.0;
    else if (s.precision == s.recall)
        s.f_measure = s.precision;  // 2PR/(P+R) with P == R, without rounding drift
    else
        s.f_measure = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

double accuracy(const ConfusionMatrix& cm) {
    if (cm.total() <= 0) throw DomainError("accuracy: empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

namespace {

void finish_metrics(EvalReport& r) {
    const Scores s = f_measure(r.confusion);
    r.precision = s.precision;
    r.recall = s.recall;
    r.f_measure = s.f_measure;
    r.accuracy = accuracy(r.confusion);
}

nlohmann::json confusion_json(const ConfusionMatrix& cm) {
    auto rows = nlohmann::json::array();
    for (int t = 0; t < cm.classes(); ++t) {
        auto row = nlohmann::json::array();
        for (int p = 0; p < cm.classes(); ++p) row.push_back(cm.at(t, p));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j;
    j["protocol"] = std::string(to_string(r.protocol));
    j["config"] = r.config;
    j["classes"] = r.class_names;
    auto folds = nlohmann::json::array();
    for (const auto& f : r.folds) {
        auto preds = nlohmann::json::array();
        for (const auto& p : f.predictions)
            preds.push_back({{"video_id", p.video_id}, {"true", p.truth}, {"predicted", p.predicted}});
        folds.push_back({{"fold_id", f.fold_id}, {"repeat", f.repeat}, {"test_ids", f.test_ids},
                         {"predictions", std::move(preds)}});
    }
    j["folds"] = std::move(folds);
    if (!r.repeats.empty()) {
        auto reps = nlohmann::json::array();
        for (const auto& s : r.repeats)
            reps.push_back({{"repeat", s.repeat}, {"f_measure", s.f_measure}, {"accuracy", s.accuracy}});
        j["repeats"] = std::move(reps);
    }
    j["confusion"] = confusion_json(r.confusion);
    j["precision"] = r.precision;
    j["recall"] = r.recall;
    j["f_measure"] = r.f_measure;
    j["accuracy"] = r.accuracy;
    return j;
}

EvalReport evaluate_features(const std::vector<VideoMeta>& videos, int classes,
                             const std::vector<FeatureVector>& features, const EvalOptions& options,
                             int repeat) {
    if (features.size() != videos.size()) throw ShapeError("evaluate_features: one feature row per video required");
    const auto folds = make_folds(videos, options.protocol);

    std::vector<FoldResult> results(folds.size());
    parallel_for(folds.size(), options.jobs, [&](std::size_t k) {
        const Fold& fold = folds[k];
        // Subject isolation is asserted on every run.
        if (options.protocol == Protocol::loso)
            for (std::size_t t : fold.test)
                for (std::size_t tr : fold.train)
                    if (videos[tr].subject_key == videos[t].subject_key)
                        throw ProtocolError("LOSO fold leaks test subject " + videos[t].subject_key);
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (std::size_t i : fold.train) {
            rows.push_back(features[i].values);
            labels.push_back(videos[i].label);
        }
        const SvmModel model = train_linear_svm(rows, labels, classes, options.svm);
        FoldResult& out = results[k];
        out.fold_id = fold.fold_id;
        out.repeat = repeat;
        for (std::size_t i : fold.test) {
            out.test_ids.push_back(videos[i].video_id);
            out.predictions.push_back({videos[i].video_id, videos[i].label, predict(model, features[i].values)});
        }
    });

    EvalReport report;
    report.protocol = options.protocol;
    report.confusion = ConfusionMatrix(classes);
    for (auto& f : results) {
        for (const auto& p : f.predictions) report.confusion.add(p.truth, p.predicted);
        report.folds.push_back(std::move(f));
    }
    finish_metrics(report);
    return report;
}

nlohmann::json config_to_json(const PipelineConfig& cfg, const EvalOptions& options) {
    nlohmann::json j;
    j["descriptor"] = std::string(to_string(cfg.descriptor));
    j["blocks"] = cfg.biwoof.blocks;
    j["bins"] = cfg.biwoof.bins;
    j["local_weight"] = std::string(to_string(cfg.biwoof.local_weight));
    j["global_weight"] = std::string(to_string(cfg.biwoof.global_weight));
    j["apex"] = cfg.apex.to_string();
    j["resize"] = cfg.resize ? nlohmann::json(std::to_string(cfg.resize->width) + "x" + std::to_string(cfg.resize->height))
                             : nlohmann::json(nullptr);
    j["l1_normalize"] = cfg.l1_normalize;
    j["tvl1"] = {{"lambda", cfg.flow.lambda}, {"theta", cfg.flow.theta},     {"tau", cfg.flow.tau},
                 {"n_scales", cfg.flow.n_scales}, {"zoom", cfg.flow.zoom}, {"n_warps", cfg.flow.n_warps},
                 {"n_iters", cfg.flow.n_iters}, {"stop_eps", cfg.flow.stop_eps}};
    j["lbp"] = {{"neighbors", cfg.lbp.neighbors}, {"radius", cfg.lbp.radius}, {"uniform", cfg.lbp.uniform}};
    j["svm_c"] = options.svm.reg_c;
    j["protocol"] = std::string(to_string(options.protocol));
    if (cfg.apex.source == ApexSource::random) j["repeats"] = options.repeats;
    return j;
}

namespace {

bool uses_apex(Descriptor d) { return d == Descriptor::biwoof || d == Descriptor::lbpdiff; }

int repeat_count(const PipelineConfig& cfg, const EvalOptions& options) {
    if (cfg.apex.source == ApexSource::random && uses_apex(cfg.descriptor)) {
        if (options.repeats < 1) throw ConfigError("repeats must be >= 1");
        return options.repeats;
    }
    return 1;
}

// Cross-validates features produced per repeat and pools the results.
template <typename FeatureFn>
EvalReport pooled_report(const Dataset& data, const EvalOptions& options, int repeats, FeatureFn&& features_for) {
    EvalReport report;
    report.protocol = options.protocol;
    report.class_names = data.class_names;
    report.confusion = ConfusionMatrix(data.class_count());
    for (int r = 0; r < repeats; ++r) {
        EvalReport one = evaluate_features(data.videos, data.class_count(), features_for(r), options, r);
        report.confusion += one.confusion;
        for (auto& f : one.folds) report.folds.push_back(std::move(f));
        if (repeats > 1) report.repeats.push_back({r, one.f_measure, one.accuracy});
    }
    finish_metrics(report);
    return report;
}

}  // namespace

EvalReport run_protocol(const Dataset& data, const PipelineConfig& cfg, const EvalOptions& options) {
    cfg.biwoof.validate();
    if (data.size() == 0) throw DataError("run_protocol: empty dataset");
    const int repeats = repeat_count(cfg, options);
    EvalReport report = pooled_report(data, options, repeats,
                                      [&](int r) { return extract_all(data, cfg, options.jobs, r); });
    report.config = config_to_json(cfg, options);
    return report;
}

AblationAxis parse_axis(std::string_view text) {
    if (text == "bins") return AblationAxis::bins;
    if (text == "blocks") return AblationAxis::blocks;
    if (text == "weights") return AblationAxis::weights;
    throw ConfigError("unknown ablation axis '" + std::string(text) + "'");
}

std::string format_metric(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

AblationTable ablate(const Dataset& data, const PipelineConfig& base, AblationAxis axis, const EvalOptions& options) {
    if (data.size() == 0) throw DataError("ablate: empty dataset");
    const int repeats = repeat_count(base, options);

    // Two-frame Bi-WOOF only needs the flow once per video and repeat.
    std::vector<std::vector<Kinematics>> cache;
    const bool cached = base.descriptor == Descriptor::biwoof;
    if (cached) {
        cache.resize(static_cast<std::size_t>(repeats));
        for (int r = 0; r < repeats; ++r) {
            cache[r].resize(data.size());
            parallel_for(data.size(), options.jobs, [&](std::size_t i) {
                const VideoSample v = data.load(i);
                cache[r][i] = onset_kinematics(v, resolve_apex(v, base.apex, base, r), base.flow);
            });
        }
    }

    auto evaluate = [&](const PipelineConfig& cfg) {
        cfg.biwoof.validate();
        return pooled_report(data, options, repeats, [&](int r) {
            if (!cached) return extract_all(data, cfg, options.jobs, r);
            std::vector<FeatureVector> out(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                const auto& k = cache[r][i];
                out[i] = biwoof(k.orientation, k.magnitude, k.strain, cfg.biwoof);
                if (cfg.l1_normalize) l1_normalize(out[i]);
            }
            return out;
        });
    };

    AblationTable table;
    switch (axis) {
    case AblationAxis::bins:
        table.header = {"bins", "f_measure", "accuracy"};
        for (int c = 1; c <= 10; ++c) {
            PipelineConfig cfg = base;
            cfg.biwoof.bins = c;
            const auto r = evaluate(cfg);
            table.rows.push_back({std::to_string(c), format_metric(r.f_measure), format_metric(r.accuracy)});
        }
        break;
    case AblationAxis::blocks:
        table.header = {"blocks", "f_measure", "accuracy"};
        for (int n = 5; n <= 8; ++n) {
            PipelineConfig cfg = base;
            cfg.biwoof.blocks = n;
            const auto r = evaluate(cfg);
            table.rows.push_back(
                {std::to_string(n) + "x" + std::to_string(n), format_metric(r.f_measure), format_metric(r.accuracy)});
        }
        break;
    case AblationAxis::weights: {
        const WeightMode modes[] = {WeightMode::none, WeightMode::flow, WeightMode::strain};
        table.header = {"local/global", "none", "flow", "strain"};
        for (WeightMode local : modes) {
            std::vector<std::string> row{std::string(to_string(local))};
            for (WeightMode global : modes) {
                PipelineConfig cfg = base;
                cfg.biwoof.local_weight = local;
                cfg.biwoof.global_weight = global;
                row.push_back(format_metric(evaluate(cfg).f_measure));
            }
            table.rows.push_back(std::move(row));
        }
        break;
    }
    }
    return table;
}

std::string to_csv(const AblationTable& table) {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    return out.str();
}

}  // namespace mexp
