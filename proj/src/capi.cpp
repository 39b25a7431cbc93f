#include "crowdanomaly.h"

#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "core/eval.hpp"
#include "core/synthcrowd.hpp"

namespace fs = std::filesystem;
using namespace crowd;

namespace {

thread_local std::string g_last_error;

template <typename Fn>
ca_status wrap(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return CA_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return static_cast<ca_status>(static_cast<int>(e.code()));
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return CA_ERR_NUMERIC;
    }
}

ca_status fail_usage(const char* msg) {
    g_last_error = msg;
    return CA_ERR_USAGE;
}

RunConfig load_cfg(const char* config_path) {
    if (config_path == nullptr || *config_path == '\0') return RunConfig{};
    return load_config(config_path);
}

CsvMeta make_meta(const RunConfig& cfg, uint64_t seed) {
    CsvMeta meta;
    meta.seed = seed;
    meta.config_hash = cfg.hash();
    return meta;
}

GmmFitOptions gmm_options(const RunConfig& cfg, uint64_t seed) {
    GmmFitOptions opts;
    opts.components_min = cfg.gmm_components_min;
    opts.components_max = cfg.gmm_components_max;
    opts.seed = seed;
    return opts;
}

// manifest: '#' comment lines, then a header row, then data rows
struct Manifest {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw data_error("manifest has no '" + name + "' column");
    }
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

Manifest read_manifest(const fs::path& corpus_dir) {
    fs::path path = corpus_dir / "manifest.csv";
    std::ifstream in(path);
    if (!in) throw data_error("cannot read " + path.string());
    Manifest m;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv(line);
        if (m.header.empty()) {
            m.header = std::move(fields);
        } else {
            if (fields.size() != m.header.size())
                throw data_error("manifest row has " + std::to_string(fields.size()) +
                                 " fields, expected " + std::to_string(m.header.size()));
            m.rows.push_back(std::move(fields));
        }
    }
    if (m.header.empty()) throw data_error("empty manifest " + path.string());
    return m;
}

std::string stem_of(const std::string& filename) { return fs::path(filename).stem().string(); }

void track_video_file(const fs::path& video, SeqFormat format, int width, int height,
                      const RunConfig& cfg, uint64_t seed, const fs::path& out_tracklets) {
    auto stream = open_sequence(video, format, width, height);
    PipelineOptions opts;
    opts.cfg = cfg;
    std::unique_ptr<Pipeline> pipeline;
    while (auto frame = stream->next()) {
        if (!pipeline)
            pipeline = std::make_unique<Pipeline>(opts, frame->width, frame->height);
        pipeline->process(*frame);
    }
    if (!pipeline) throw data_error("no frames in " + video.string());
    pipeline->finish();
    write_tracklets(out_tracklets, pipeline->tracker().take_finished(), make_meta(cfg, seed));
}

std::vector<FeatureVector> features_from_tracklet_file(const fs::path& path, int width,
                                                       int height, const RunConfig& cfg) {
    auto tracklets = read_tracklets(path);
    auto states = track_states_from_tracklets(tracklets);
    FeatureExtractor extractor(cfg, width, height);
    std::vector<FeatureVector> rows;
    rows.reserve(states.size());
    for (const auto& state : states) rows.push_back(extractor.compute(state));
    return rows;
}

// Lines up feature rows with a clip's frame range; frames the tracklet replay
// did not cover become invalid rows.
std::vector<FeatureVector> align_features(const std::vector<FeatureVector>& rows,
                                          size_t frame_count) {
    std::vector<FeatureVector> out(frame_count);
    for (size_t f = 0; f < frame_count; ++f) out[f].frame = static_cast<int>(f);
    for (const auto& row : rows) {
        if (row.frame >= 0 && static_cast<size_t>(row.frame) < frame_count)
            out[row.frame] = row;
    }
    return out;
}

std::vector<std::vector<double>> collect_points(const char* const* feature_csvs, size_t n,
                                                int exclude_feature,
                                                std::vector<int>* point_labels = nullptr,
                                                const int* clip_labels = nullptr) {
    if (n == 0) throw usage_error("no feature files given");
    std::vector<std::vector<double>> points;
    for (size_t i = 0; i < n; ++i) {
        auto rows = read_features_csv(feature_csvs[i]);
        auto pts = feature_points(rows, exclude_feature);
        for (auto& p : pts) {
            points.push_back(std::move(p));
            if (point_labels) point_labels->push_back(clip_labels[i] ? 1 : -1);
        }
    }
    return points;
}

std::vector<ClipData> load_clip_corpus(const fs::path& dir) {
    Manifest m = read_manifest(dir);
    int col_tracklets = m.column("tracklets");
    int col_labels = m.column("labels");
    int col_label = m.column("label");
    std::vector<ClipData> clips;
    for (const auto& row : m.rows) {
        fs::path features_path = dir / (stem_of(row[col_tracklets]) + ".features.csv");
        if (!fs::exists(features_path))
            throw data_error("missing " + features_path.string() +
                             " (run the feature extraction over this corpus first)");
        auto labels = read_labels(dir / row[col_labels]);
        ClipData clip;
        clip.features = align_features(read_features_csv(features_path), labels.size());
        clip.label = row[col_label] == "1" ? 1 : 0;
        clips.push_back(std::move(clip));
    }
    return clips;
}

void apply_exclusion(const ca_model* m, const double* features, std::vector<double>& out);

}  // namespace

extern "C" {

const char* ca_last_error(void) { return g_last_error.c_str(); }

const char* ca_version(void) { return kToolVersion; }

/* ---- pipeline handle ---- */

struct ca_pipeline {
    Pipeline impl;
    int width, height;
    int next_index = 0;
    ca_pipeline(const PipelineOptions& opts, int w, int h)
        : impl(opts, w, h), width(w), height(h) {}
};

ca_status ca_pipeline_create(const char* config_path, int width, int height, ca_pipeline** out) {
    if (!out) return fail_usage("out handle pointer is null");
    *out = nullptr;
    return wrap([&] {
        if (width < 16 || height < 16) throw usage_error("frame dimensions must be at least 16");
        PipelineOptions opts;
        opts.cfg = load_cfg(config_path);
        *out = new ca_pipeline(opts, width, height);
    });
}

ca_status ca_pipeline_process(ca_pipeline* p, const unsigned char* pixels, int frame_index,
                              double out_features[CA_FEATURE_COUNT], int* out_valid) {
    if (!p || !pixels || !out_features || !out_valid) return fail_usage("null argument");
    return wrap([&] {
        if (frame_index != p->next_index)
            throw usage_error("expected frame index " + std::to_string(p->next_index) + ", got " +
                              std::to_string(frame_index));
        Frame frame;
        frame.index = frame_index;
        frame.width = p->width;
        frame.height = p->height;
        frame.pixels.assign(pixels, pixels + static_cast<size_t>(p->width) * p->height);
        FeatureVector fv = p->impl.process(frame);
        ++p->next_index;
        for (int i = 0; i < CA_FEATURE_COUNT; ++i) out_features[i] = fv.values[i];
        *out_valid = fv.valid ? 1 : 0;
    });
}

void ca_pipeline_destroy(ca_pipeline* p) { delete p; }

/* ---- model handle ---- */

struct ca_model {
    std::string kind;
    GmmModel gmm;
    SvmModel svm;
};

ca_status ca_model_load(const char* path, ca_model** out) {
    if (!path || !out) return fail_usage("null argument");
    *out = nullptr;
    return wrap([&] {
        auto m = std::make_unique<ca_model>();
        m->kind = model_kind(path);
        if (m->kind == "gmm") m->gmm = load_gmm(path);
        else m->svm = load_svm(path);
        *out = m.release();
    });
}

ca_status ca_model_kind(const ca_model* m, char* buf, size_t buf_size) {
    if (!m || !buf) return fail_usage("null argument");
    if (buf_size < m->kind.size() + 1) return fail_usage("kind buffer too small");
    std::memcpy(buf, m->kind.c_str(), m->kind.size() + 1);
    return CA_OK;
}

ca_status ca_model_score(const ca_model* m, const double features[CA_FEATURE_COUNT],
                         double* out_score) {
    if (!m || !features || !out_score) return fail_usage("null argument");
    return wrap([&] {
        std::vector<double> p;
        apply_exclusion(m, features, p);
        if (m->kind == "gmm") *out_score = gmm_log_prob(m->gmm, m->gmm.norm.transform(p));
        else *out_score = svm_decision(m->svm, m->svm.norm.transform(p));
    });
}

ca_status ca_model_classify(const ca_model* m, const double features[CA_FEATURE_COUNT],
                            int* out_abnormal) {
    if (!m || !features || !out_abnormal) return fail_usage("null argument");
    return wrap([&] {
        std::vector<double> p;
        apply_exclusion(m, features, p);
        Label label = m->kind == "gmm"
                          ? gmm_classify_frame(m->gmm, m->gmm.norm.transform(p))
                          : svm_classify_frame(m->svm, m->svm.norm.transform(p));
        *out_abnormal = label == Label::Abnormal ? 1 : 0;
    });
}

void ca_model_destroy(ca_model* m) { delete m; }

/* ---- workflows ---- */

ca_status ca_synth(const char* recipe, const char* out_dir, uint64_t seed) {
    if (!recipe || !out_dir) return fail_usage("null argument");
    return wrap([&] { generate_recipe(recipe, out_dir, seed); });
}

ca_status ca_track(const char* video, const char* format, int width, int height,
                   const char* config_path, uint64_t seed, const char* out_tracklets) {
    if (!video || !format || !out_tracklets) return fail_usage("null argument");
    return wrap([&] {
        track_video_file(video, parse_seq_format(format), width, height, load_cfg(config_path),
                         seed, out_tracklets);
    });
}

ca_status ca_track_corpus(const char* corpus_dir, const char* config_path, uint64_t seed) {
    if (!corpus_dir) return fail_usage("null argument");
    return wrap([&] {
        fs::path dir(corpus_dir);
        RunConfig cfg = load_cfg(config_path);
        Manifest m = read_manifest(dir);
        int col_video = m.column("video");
        for (const auto& row : m.rows) {
            fs::path video = dir / row[col_video];
            SeqFormat format = video.extension() == ".y4m" ? SeqFormat::Y4m : SeqFormat::PgmDir;
            track_video_file(video, format, 0, 0, cfg, seed,
                             dir / (stem_of(row[col_video]) + ".tracklets"));
        }
    });
}

ca_status ca_features(const char* tracklets, int width, int height, const char* config_path,
                      uint64_t seed, const char* out_csv) {
    if (!tracklets || !out_csv) return fail_usage("null argument");
    return wrap([&] {
        RunConfig cfg = load_cfg(config_path);
        auto rows = features_from_tracklet_file(tracklets, width, height, cfg);
        write_features_csv(out_csv, rows, make_meta(cfg, seed));
    });
}

ca_status ca_features_corpus(const char* corpus_dir, const char* config_path, uint64_t seed) {
    if (!corpus_dir) return fail_usage("null argument");
    return wrap([&] {
        fs::path dir(corpus_dir);
        RunConfig cfg = load_cfg(config_path);
        Manifest m = read_manifest(dir);
        // rendered corpora list videos; tracklet corpora list tracklet files
        int col = -1;
        for (const char* name : {"tracklets", "video"}) {
            for (size_t i = 0; i < m.header.size(); ++i)
                if (m.header[i] == name) col = static_cast<int>(i);
            if (col >= 0) break;
        }
        if (col < 0) throw data_error("manifest has neither 'tracklets' nor 'video' column");
        for (const auto& row : m.rows) {
            std::string stem = stem_of(row[col]);
            fs::path tracklets = dir / (stem + ".tracklets");
            // frame size from the scenario file when present, else the default
            int width = 320, height = 240;
            fs::path scenario = dir / (stem + ".scenario");
            if (fs::exists(scenario)) {
                ScenarioSpec spec = load_scenario(scenario);
                width = spec.width;
                height = spec.height;
            }
            auto rows_out = features_from_tracklet_file(tracklets, width, height, cfg);
            write_features_csv(dir / (stem + ".features.csv"), rows_out, make_meta(cfg, seed));
        }
    });
}

ca_status ca_train_gmm(const char* const* feature_csvs, size_t n, const char* config_path,
                       uint64_t seed, int exclude_feature, const char* model_out) {
    if (!feature_csvs || !model_out) return fail_usage("null argument");
    return wrap([&] {
        RunConfig cfg = load_cfg(config_path);
        auto points = collect_points(feature_csvs, n, exclude_feature);
        NormStats norm = fit_norm(points);
        for (auto& p : points) p = norm.transform(p);
        GmmModel model = fit_gmm(points, gmm_options(cfg, seed));
        model.norm = norm;
        model.excluded_feature = exclude_feature;
        save_gmm(model, model_out);
    });
}

ca_status ca_train_svm(const char* const* feature_csvs, const int* labels, size_t n,
                       const char* config_path, uint64_t seed, int exclude_feature,
                       const char* model_out) {
    if (!feature_csvs || !labels || !model_out) return fail_usage("null argument");
    return wrap([&] {
        RunConfig cfg = load_cfg(config_path);
        std::vector<int> point_labels;
        auto points = collect_points(feature_csvs, n, exclude_feature, &point_labels, labels);
        NormStats norm = fit_norm(points);
        for (auto& p : points) p = norm.transform(p);
        SvmFitOptions opts;
        opts.c = cfg.svm_c;
        opts.seed = seed;
        SvmModel model = fit_svm(points, point_labels, opts);
        model.norm = norm;
        model.excluded_feature = exclude_feature;
        save_svm(model, model_out);
    });
}

ca_status ca_score(const char* model_path, const char* features_csv, const char* out_csv) {
    if (!model_path || !features_csv || !out_csv) return fail_usage("null argument");
    return wrap([&] {
        ca_model* handle = nullptr;
        ca_status st = ca_model_load(model_path, &handle);
        if (st != CA_OK) throw data_error(g_last_error);
        std::unique_ptr<ca_model> model(handle);
        auto rows = read_features_csv(features_csv);
        std::ofstream out(out_csv);
        if (!out) throw data_error(std::string("cannot write ") + out_csv);
        out << "frame,valid,score,label\n";
        char buf[64];
        for (const auto& row : rows) {
            double score = 0;
            int abnormal = 0;
            if (row.valid) {
                st = ca_model_score(model.get(), row.values.data(), &score);
                if (st == CA_OK)
                    st = ca_model_classify(model.get(), row.values.data(), &abnormal);
                if (st != CA_OK) throw data_error(g_last_error);
            }
            std::snprintf(buf, sizeof(buf), "%.17g", score);
            out << row.frame << "," << (row.valid ? 1 : 0) << "," << buf << "," << abnormal
                << "\n";
        }
    });
}

ca_status ca_eval_umn(const char* corpus_dir, int cross_scene, int train_frames,
                      const char* config_path, uint64_t seed, const char* out_prefix,
                      double* out_auc) {
    if (!corpus_dir) return fail_usage("null argument");
    return wrap([&] {
        fs::path dir(corpus_dir);
        RunConfig cfg = load_cfg(config_path);
        Manifest m = read_manifest(dir);
        int col_scene = m.column("scene");
        int col_video = m.column("video");
        int col_labels = m.column("labels");
        std::map<std::string, SceneData> scenes;
        for (const auto& row : m.rows) {
            fs::path features_path = dir / (stem_of(row[col_video]) + ".features.csv");
            if (!fs::exists(features_path))
                throw data_error("missing " + features_path.string() +
                                 " (run tracking and feature extraction over this corpus first)");
            auto labels = read_labels(dir / row[col_labels]);
            SceneData& scene = scenes["scene" + row[col_scene]];
            scene.name = "scene" + row[col_scene];
            scene.clips.push_back(
                {align_features(read_features_csv(features_path), labels.size()), labels});
        }
        std::vector<SceneData> scene_list;
        for (auto& [name, scene] : scenes) scene_list.push_back(std::move(scene));
        UmnReport report =
            umn_protocol(scene_list, cross_scene ? UmnSplit::CrossScene : UmnSplit::SingleScene,
                         train_frames, gmm_options(cfg, seed));
        if (out_prefix && *out_prefix) {
            std::string prefix(out_prefix);
            write_roc_csv(report.pooled, prefix + "_roc.csv", make_meta(cfg, seed));
            write_roc_svg(report.pooled, prefix + "_roc.svg",
                          cross_scene ? "cross-scene ROC" : "single-scene ROC");
        }
        if (out_auc) *out_auc = report.pooled.auc;
    });
}

ca_status ca_eval_cv(const char* corpus_dir, const char* detector, int folds,
                     const char* config_path, uint64_t seed, const char* out_csv,
                     double* out_mean_accuracy, double* out_ci95) {
    if (!corpus_dir || !detector) return fail_usage("null argument");
    return wrap([&] {
        RunConfig cfg = load_cfg(config_path);
        DetectorKind kind;
        std::string name(detector);
        if (name == "gmm") kind = DetectorKind::Gmm;
        else if (name == "svm") kind = DetectorKind::Svm;
        else throw usage_error("unknown detector '" + name + "' (expected gmm or svm)");
        auto clips = load_clip_corpus(corpus_dir);
        CvReport report =
            clip_cv_protocol(clips, folds, kind, seed, -1, gmm_options(cfg, seed), cfg.svm_c);
        if (out_csv && *out_csv) write_cv_csv(report, out_csv, make_meta(cfg, seed));
        if (out_mean_accuracy) *out_mean_accuracy = report.mean_accuracy;
        if (out_ci95) *out_ci95 = report.ci95_half_width;
    });
}

ca_status ca_ablate(const char* corpus_dir, int folds, const char* config_path, uint64_t seed,
                    const char* out_csv, double out_accuracy[CA_FEATURE_COUNT]) {
    if (!corpus_dir) return fail_usage("null argument");
    return wrap([&] {
        RunConfig cfg = load_cfg(config_path);
        auto clips = load_clip_corpus(corpus_dir);
        auto results = ablation(clips, folds, seed, cfg.svm_c);
        if (out_csv && *out_csv) {
            std::ofstream out(out_csv);
            if (!out) throw data_error(std::string("cannot write ") + out_csv);
            out << "excluded_feature,mean_accuracy\n";
            char buf[64];
            for (const auto& [feature, acc] : results) {
                std::snprintf(buf, sizeof(buf), "%.17g", acc);
                out << feature << "," << buf << "\n";
            }
        }
        if (out_accuracy)
            for (size_t i = 0; i < kFeatureNames.size(); ++i)
                out_accuracy[i] = results.at(kFeatureNames[i]);
    });
}

ca_status ca_bench(int width, int height, int agents, int frames, uint64_t seed,
                   const char* config_path, double* out_fps) {
    if (!out_fps) return fail_usage("null argument");
    return wrap([&] {
        RunConfig cfg = load_cfg(config_path);
        ScenarioSpec spec;
        spec.width = width;
        spec.height = height;
        spec.agents = agents;
        spec.seed = seed;
        Segment seg;
        seg.start = 0;
        seg.end = frames - 1;
        seg.mode = BehaviourMode::CoherentFlow;
        seg.dir_rad = 0.6;
        seg.speed = 1.7;
        spec.timeline.push_back(seg);
        spec.validate();
        auto rendered = render(simulate(spec), spec);
        PipelineOptions opts;
        opts.cfg = cfg;
        BenchReport report = bench_throughput(rendered, opts);
        *out_fps = report.fps;
    });
}

}  // extern "C"

namespace {

void apply_exclusion(const ca_model* m, const double* features, std::vector<double>& out) {
    int excluded = m->kind == "gmm" ? m->gmm.excluded_feature : m->svm.excluded_feature;
    out.clear();
    for (int i = 0; i < CA_FEATURE_COUNT; ++i)
        if (i != excluded) out.push_back(features[i]);
}

}  // namespace
