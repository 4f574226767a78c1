#include <algorithm>
#include <set>

#include <doctest.h>

#include "mexp/eval.hpp"
#include "mexp/synthetic.hpp"
#include "support/gen.hpp"

using namespace mexp;

namespace {

std::vector<VideoMeta> metas(int subjects, int per_subject) {
    std::vector<VideoMeta> out;
    for (int s = 0; s < subjects; ++s)
        for (int v = 0; v < per_subject; ++v)
            out.push_back({"s" + std::to_string(s) + "_v" + std::to_string(v), "d/s" + std::to_string(s), v % 2,
                           v % 2 ? "b" : "a"});
    return out;
}

synthetic::Options small_clips() {
    synthetic::Options o;
    o.width = o.height = 32;
    o.frames = 8;
    o.amplitude = 1.0;
    return o;
}

Dataset small_dataset(int subjects, std::uint64_t seed = 81) {
    return dataset_from_samples(synthetic::make_dataset(subjects, small_clips(), seed), synthetic::class_names());
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("LOSO and LOVO folds partition the dataset") {
    const auto v = metas(16, 3);
    const auto loso = make_folds(v, Protocol::loso);
    CHECK(loso.size() == 16);
    const auto lovo = make_folds(metas(82, 3), Protocol::lovo);
    CHECK(lovo.size() == 246);
    for (const auto* folds : {&loso}) {
        std::vector<int> seen(v.size(), 0);
        for (const auto& f : *folds) {
            for (auto t : f.test) ++seen[t];
            CHECK(f.train.size() + f.test.size() == v.size());
            for (auto t : f.test)
                for (auto tr : f.train) CHECK(v[t].subject_key != v[tr].subject_key);
        }
        CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
    }
    for (std::size_t k = 0; k < lovo.size(); ++k) {
        REQUIRE(lovo[k].test.size() == 1);
        CHECK(lovo[k].test[0] == k);
    }
}

TEST_CASE("LOSO needs two subjects") {
    CHECK_THROWS_AS(make_folds(metas(1, 4), Protocol::loso), ProtocolError);
    CHECK_NOTHROW(make_folds(metas(1, 4), Protocol::lovo));
}

TEST_CASE("subject keys include the dataset") {
    auto v = metas(2, 2);
    v[2].subject_key = "other/s0";  // same subject name, different dataset
    CHECK(make_folds(v, Protocol::loso).size() == 3);
}

TEST_CASE("micro-averaged metrics") {
    ConfusionMatrix perfect(3);
    for (int c = 0; c < 3; ++c) perfect.add(c, c, 5);
    const auto p = f_measure(perfect);
    CHECK(p.precision == 1.0);
    CHECK(p.recall == 1.0);
    CHECK(p.f_measure == 1.0);

    ConfusionMatrix m(2);
    m.add(0, 0, 3);
    m.add(0, 1, 1);
    m.add(1, 0, 2);
    m.add(1, 1, 4);
    const auto s = f_measure(m);
    CHECK(s.precision == 0.7);
    CHECK(s.recall == 0.7);
    CHECK(s.f_measure == 0.7);

    ConfusionMatrix wrong(2);
    wrong.add(0, 1);
    wrong.add(1, 0);
    CHECK(f_measure(wrong).f_measure == 0.0);
    CHECK_THROWS_AS(f_measure(ConfusionMatrix(3)), DomainError);
}

TEST_CASE("micro F equals accuracy") {
    test::for_all(1000, 82, [](test::Gen& g) {
        ConfusionMatrix m(g.integer(2, 8));
        for (int t = 0; t < m.classes(); ++t)
            for (int p = 0; p < m.classes(); ++p) m.add(t, p, g.integer(0, 50));
        if (m.total() == 0) m.add(0, 0);
        CHECK(std::abs(f_measure(m).f_measure - accuracy(m)) <= 1e-12);
    });
}

TEST_CASE("parsers") {
    CHECK(parse_protocol("loso") == Protocol::loso);
    CHECK(parse_protocol("lovo") == Protocol::lovo);
    CHECK_THROWS_AS(parse_protocol("kfold"), ConfigError);
    CHECK(parse_axis("bins") == AblationAxis::bins);
    CHECK(parse_axis("blocks") == AblationAxis::blocks);
    CHECK(parse_axis("weights") == AblationAxis::weights);
    CHECK_THROWS_AS(parse_axis("colour"), ConfigError);
    CHECK(format_metric(0.7) == "0.7000");
    CHECK(format_metric(2.0 / 3.0) == "0.6667");
}

TEST_CASE("evaluate_features on separable toy features") {
    const auto v = metas(4, 4);
    std::vector<FeatureVector> f;
    for (const auto& m : v) f.push_back({{m.label == 0 ? 1.0 : 0.0, m.label == 1 ? 1.0 : 0.0}});
    const auto r = evaluate_features(v, 2, f, {});
    CHECK(r.f_measure == 1.0);
    CHECK(r.folds.size() == 4);
    CHECK(r.confusion.total() == 16);
    CHECK_THROWS_AS(evaluate_features(v, 2, std::vector<FeatureVector>(3), {}), ShapeError);
}

TEST_CASE("run_protocol is deterministic and schedule independent") {
    const Dataset d = small_dataset(3);
    PipelineConfig cfg;
    cfg.biwoof.blocks = 4;
    EvalOptions one;
    EvalOptions many = one;
    many.jobs = 4;
    const auto a = to_json(run_protocol(d, cfg, one)).dump();
    const auto b = to_json(run_protocol(d, cfg, many)).dump();
    CHECK(a == b);

    cfg.apex = parse_apex_spec("random:5");
    one.repeats = many.repeats = 3;
    const auto r1 = run_protocol(d, cfg, one), r2 = run_protocol(d, cfg, many);
    CHECK(to_json(r1).dump() == to_json(r2).dump());
    CHECK(r1.repeats.size() == 3);
    CHECK(r1.confusion.total() == 3 * 9);
    double mean = 0.0;
    for (const auto& s : r1.repeats) mean += s.accuracy / 3;
    CHECK(r1.accuracy == doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("report JSON carries the documented fields") {
    const auto j = to_json(run_protocol(small_dataset(2), PipelineConfig{}, EvalOptions{}));
    for (const char* key : {"protocol", "config", "folds", "confusion", "precision", "recall", "f_measure", "accuracy"})
        CHECK(j.contains(key));
    REQUIRE(j["folds"].is_array());
    for (const auto& f : j["folds"]) {
        CHECK(f.contains("fold_id"));
        CHECK(f.contains("test_ids"));
        CHECK(f["predictions"].is_array());
    }
    CHECK(j["config"]["blocks"] == 5);
    CHECK(j["config"]["local_weight"] == "flow");
    CHECK(j["config"]["global_weight"] == "strain");
    CHECK(j["protocol"] == "loso");
    CHECK_FALSE(j["config"].contains("jobs"));
}

TEST_CASE("metrics agree with the confusion matrix") {
    const auto r = run_protocol(small_dataset(3, 83), PipelineConfig{}, EvalOptions{});
    const auto s = f_measure(r.confusion);
    CHECK(std::abs(r.precision - s.precision) <= 1e-12);
    CHECK(std::abs(r.recall - s.recall) <= 1e-12);
    CHECK(std::abs(r.f_measure - s.f_measure) <= 1e-12);
    CHECK(std::abs(r.accuracy - accuracy(r.confusion)) <= 1e-12);
}

TEST_CASE("missing ground-truth apex is a data error naming the video") {
    std::vector<Frame> frames(4, Frame::filled(16, 16, 0.5));
    std::vector<VideoSample> clips;
    for (int s = 0; s < 2; ++s)
        for (int l = 0; l < 2; ++l)
            clips.emplace_back(frames, 0, s == 1 && l == 1 ? std::nullopt : std::optional<int>(2), 3, l,
                               "s" + std::to_string(s), "clip" + std::to_string(s) + std::to_string(l));
    PipelineConfig cfg;
    cfg.biwoof.blocks = 2;
    try {
        run_protocol(dataset_from_samples(clips, {"a", "b"}), cfg, EvalOptions{});
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("clip11") != std::string::npos);
    }
}

TEST_CASE("ablation grids") {
    const Dataset d = small_dataset(2);
    PipelineConfig cfg;
    const auto bins = ablate(d, cfg, AblationAxis::bins, {});
    CHECK(bins.rows.size() == 10);
    CHECK(bins.rows.front().front() == "1");
    const auto blocks = ablate(d, cfg, AblationAxis::blocks, {});
    REQUIRE(blocks.rows.size() == 4);
    CHECK(blocks.rows.front().front() == "5x5");
    CHECK(blocks.rows.back().front() == "8x8");
    const auto weights = ablate(d, cfg, AblationAxis::weights, {});
    REQUIRE(weights.rows.size() == 3);
    for (const auto& row : weights.rows) CHECK(row.size() == 4);
    CHECK(to_csv(weights).substr(0, 27) == "local/global,none,flow,stra");

    // The cached sweep must agree with a direct run of the same cell.
    PipelineConfig cell = cfg;
    cell.biwoof.bins = 3;
    CHECK(bins.rows[2][1] == format_metric(run_protocol(d, cell, {}).f_measure));
}

}
