#include "core/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

namespace crowd {

RocCurve frame_roc(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw data_error("frame_roc: scores and labels must match and be non-empty");
    size_t pos = 0;
    for (uint8_t l : labels) pos += l ? 1 : 0;
    size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw data_error("frame_roc: both truth labels must be present");

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    // lower score = more abnormal, so ascending order sweeps thresholds
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    RocCurve roc;
    roc.points.push_back({0.0, 0.0});
    size_t tp = 0, fp = 0;
    double auc = 0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        size_t dtp = 0, dfp = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]]) ++dtp;
            else ++dfp;
            ++j;
        }
        double fpr0 = static_cast<double>(fp) / neg, tpr0 = static_cast<double>(tp) / pos;
        tp += dtp;
        fp += dfp;
        double fpr1 = static_cast<double>(fp) / neg, tpr1 = static_cast<double>(tp) / pos;
        auc += (fpr1 - fpr0) * (tpr0 + tpr1) / 2.0;  // trapezoid, ties get half credit
        roc.points.push_back({fpr1, tpr1});
        i = j;
    }
    roc.auc = auc;
    return roc;
}

namespace {

constexpr double kNormalScore = 1e300;  // gated frames rank as maximally normal

void append_scene_scores(const SceneData& scene, const GmmModel& model, int train_frames,
                         int exclude_feature, std::vector<double>& scores,
                         std::vector<uint8_t>& labels) {
    for (const auto& [features, truth] : scene.clips) {
        for (size_t f = static_cast<size_t>(train_frames); f < features.size(); ++f) {
            const FeatureVector& fv = features[f];
            double score = kNormalScore;
            if (fv.valid) {
                std::vector<double> p = feature_points({fv}, exclude_feature)[0];
                // anchor on the scene threshold so scores pooled across
                // scene-specific models share an operating point
                score = gmm_log_prob(model, model.norm.transform(p)) - model.log_prob_threshold;
            }
            scores.push_back(score);
            labels.push_back(f < truth.size() ? truth[f] : 0);
        }
    }
}

GmmModel train_scene_gmm(const std::vector<const SceneData*>& train_scenes, int train_frames,
                         const GmmFitOptions& gmm_opts, int exclude_feature) {
    std::vector<FeatureVector> train_fvs;
    for (const SceneData* scene : train_scenes) {
        for (const auto& [features, truth] : scene->clips) {
            if (static_cast<int>(features.size()) < train_frames + 1)
                throw data_error("scene '" + scene->name + "' has a clip with fewer than " +
                                 std::to_string(train_frames + 1) + " frames");
            for (int f = 0; f < train_frames; ++f) train_fvs.push_back(features[f]);
        }
    }
    auto points = feature_points(train_fvs, exclude_feature);
    NormStats norm = fit_norm(points);
    for (auto& p : points) p = norm.transform(p);
    GmmModel model = fit_gmm(points, gmm_opts);
    model.norm = norm;
    model.excluded_feature = exclude_feature;
    return model;
}

}  // namespace

UmnReport umn_protocol(const std::vector<SceneData>& scenes, UmnSplit split, int train_frames,
                       const GmmFitOptions& gmm_opts, int exclude_feature) {
    if (scenes.empty()) throw data_error("umn_protocol: no scenes");
    UmnReport report;
    report.split = split;
    report.train_frames = train_frames;
    std::vector<double> pooled_scores;
    std::vector<uint8_t> pooled_labels;

    for (size_t s = 0; s < scenes.size(); ++s) {
        std::vector<const SceneData*> train_scenes;
        if (split == UmnSplit::SingleScene) {
            train_scenes.push_back(&scenes[s]);
        } else {
            for (size_t t = 0; t < scenes.size(); ++t)
                if (t != s) train_scenes.push_back(&scenes[t]);
            if (train_scenes.empty())
                throw data_error("cross-scene split needs at least 2 scenes");
        }
        GmmModel model = train_scene_gmm(train_scenes, train_frames, gmm_opts, exclude_feature);

        std::vector<double> scores;
        std::vector<uint8_t> labels;
        append_scene_scores(scenes[s], model, train_frames, exclude_feature, scores, labels);
        report.per_scene.push_back({scenes[s].name, frame_roc(scores, labels)});
        pooled_scores.insert(pooled_scores.end(), scores.begin(), scores.end());
        pooled_labels.insert(pooled_labels.end(), labels.begin(), labels.end());
    }
    report.pooled = frame_roc(pooled_scores, pooled_labels);
    return report;
}

namespace {

std::vector<std::vector<size_t>> stratified_folds(const std::vector<ClipData>& clips, int folds,
                                                  uint64_t seed) {
    std::vector<size_t> pos, neg;
    for (size_t i = 0; i < clips.size(); ++i) (clips[i].label ? pos : neg).push_back(i);
    if (static_cast<int>(pos.size()) < folds || static_cast<int>(neg.size()) < folds)
        throw data_error("clip_cv_protocol: need at least " + std::to_string(folds) +
                         " clips per class");
    Rng rng(seed);
    auto shuffle = [&](std::vector<size_t>& v) {
        for (size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[rng.uniform_index(i)]);
    };
    shuffle(pos);
    shuffle(neg);
    std::vector<std::vector<size_t>> assign(folds);
    for (size_t i = 0; i < pos.size(); ++i) assign[i % folds].push_back(pos[i]);
    for (size_t i = 0; i < neg.size(); ++i) assign[i % folds].push_back(neg[i]);
    return assign;
}

struct FoldModel {
    DetectorKind kind;
    GmmModel gmm;
    SvmModel svm;
};

FoldModel train_fold(const std::vector<ClipData>& clips, const std::vector<size_t>& train_idx,
                     DetectorKind detector, int exclude_feature, const GmmFitOptions& gmm_opts,
                     double svm_c, uint64_t seed) {
    FoldModel fm;
    fm.kind = detector;
    if (detector == DetectorKind::Svm) {
        std::vector<std::vector<double>> points;
        std::vector<int> labels;
        for (size_t ci : train_idx) {
            auto pts = feature_points(clips[ci].features, exclude_feature);
            for (auto& p : pts) {
                points.push_back(std::move(p));
                labels.push_back(clips[ci].label ? 1 : -1);
            }
        }
        NormStats norm = fit_norm(points);
        for (auto& p : points) p = norm.transform(p);
        SvmFitOptions so;
        so.c = svm_c;
        so.seed = seed;
        fm.svm = fit_svm(points, labels, so);
        fm.svm.norm = norm;
        fm.svm.excluded_feature = exclude_feature;
    } else {
        std::vector<std::vector<double>> points;  // normal clips only
        for (size_t ci : train_idx) {
            if (clips[ci].label) continue;
            auto pts = feature_points(clips[ci].features, exclude_feature);
            for (auto& p : pts) points.push_back(std::move(p));
        }
        NormStats norm = fit_norm(points);
        for (auto& p : points) p = norm.transform(p);
        GmmFitOptions go = gmm_opts;
        go.seed = seed;
        fm.gmm = fit_gmm(points, go);
        fm.gmm.norm = norm;
        fm.gmm.excluded_feature = exclude_feature;
    }
    return fm;
}

Label classify_clip(const FoldModel& fm, const ClipData& clip, int exclude_feature) {
    auto pts = feature_points(clip.features, exclude_feature);
    size_t invalid = clip.features.size() - pts.size();
    const NormStats& norm = fm.kind == DetectorKind::Svm ? fm.svm.norm : fm.gmm.norm;
    for (auto& p : pts) p = norm.transform(p);
    if (fm.kind == DetectorKind::Svm) return svm_classify_clip(fm.svm, pts, invalid);
    return gmm_classify_clip(fm.gmm, pts);
}

}  // namespace

CvReport clip_cv_protocol(const std::vector<ClipData>& clips, int folds, DetectorKind detector,
                          uint64_t seed, int exclude_feature, const GmmFitOptions& gmm_opts,
                          double svm_c) {
    if (folds < 2) throw usage_error("clip_cv_protocol: need at least 2 folds");
    auto assign = stratified_folds(clips, folds, seed);

    CvReport report;
    report.detector = detector;
    for (int f = 0; f < folds; ++f) {
        std::vector<size_t> train_idx;
        for (int g = 0; g < folds; ++g)
            if (g != f) train_idx.insert(train_idx.end(), assign[g].begin(), assign[g].end());
        FoldModel fm = train_fold(clips, train_idx, detector, exclude_feature, gmm_opts, svm_c,
                                  seed + static_cast<uint64_t>(f) * 7919);
        size_t correct = 0;
        for (size_t ci : assign[f]) {
            Label got = classify_clip(fm, clips[ci], exclude_feature);
            bool abnormal = got == Label::Abnormal;
            if (abnormal == (clips[ci].label != 0)) ++correct;
        }
        report.fold_accuracies.push_back(static_cast<double>(correct) / assign[f].size());
    }
    double mean = std::accumulate(report.fold_accuracies.begin(), report.fold_accuracies.end(),
                                  0.0) /
                  folds;
    double var = 0;
    for (double a : report.fold_accuracies) var += (a - mean) * (a - mean);
    double sd = folds > 1 ? std::sqrt(var / (folds - 1)) : 0.0;
    report.mean_accuracy = mean;
    report.ci95_half_width = 1.96 * sd / std::sqrt(static_cast<double>(folds));
    return report;
}

std::map<std::string, double> ablation(const std::vector<ClipData>& clips, int folds,
                                       uint64_t seed, double svm_c) {
    std::map<std::string, double> out;
    for (size_t i = 0; i < kFeatureNames.size(); ++i) {
        CvReport r = clip_cv_protocol(clips, folds, DetectorKind::Svm, seed,
                                      static_cast<int>(i), {}, svm_c);
        out[kFeatureNames[i]] = r.mean_accuracy;
    }
    return out;
}

BenchReport bench_throughput(const std::vector<Frame>& frames, const PipelineOptions& opts,
                             int warmup) {
    if (static_cast<int>(frames.size()) <= warmup + 1)
        throw data_error("bench_throughput: not enough frames beyond the warm-up window");
    Pipeline pipeline(opts, frames[0].width, frames[0].height);
    using Clock = std::chrono::steady_clock;
    Clock::time_point start{};
    for (size_t i = 0; i < frames.size(); ++i) {
        if (static_cast<int>(i) == warmup) start = Clock::now();
        pipeline.process(frames[i]);
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    BenchReport report;
    report.warmup_frames = warmup;
    report.frames_timed = static_cast<int>(frames.size()) - warmup;
    report.fps = report.frames_timed / std::max(seconds, 1e-9);
    return report;
}

void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path, const CsvMeta& meta) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << "# " << meta.tool << " v" << meta.version << " seed=" << meta.seed
        << " config_hash=" << meta.config_hash << "\n";
    out << "# auc=" << roc.auc << "\n";
    out << "fpr,tpr\n";
    char buf[64];
    for (const auto& [fpr, tpr] : roc.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", fpr, tpr);
        out << buf;
    }
}

void write_roc_svg(const RocCurve& roc, const std::filesystem::path& path,
                   const std::string& title) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    const int size = 440, margin = 40, plot = size - 2 * margin;
    auto px = [&](double fpr) { return margin + fpr * plot; };
    auto py = [&](double tpr) { return size - margin - tpr * plot; };
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << plot
        << "\" height=\"" << plot << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\""
        << py(1) << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 4\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\" points=\"";
    for (const auto& [fpr, tpr] : roc.points) out << px(fpr) << "," << py(tpr) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"" << margin - 12 << "\" font-size=\"14\">" << title
        << " (AUC=" << roc.auc << ")</text>\n";
    out << "<text x=\"" << size / 2 - 14 << "\" y=\"" << size - 10
        << "\" font-size=\"12\">FPR</text>\n";
    out << "<text x=\"10\" y=\"" << size / 2 << "\" font-size=\"12\">TPR</text>\n";
    out << "</svg>\n";
}

void write_cv_csv(const CvReport& report, const std::filesystem::path& path, const CsvMeta& meta) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << "# " << meta.tool << " v" << meta.version << " seed=" << meta.seed
        << " config_hash=" << meta.config_hash << "\n";
    out << "detector,fold,accuracy\n";
    const char* name = report.detector == DetectorKind::Svm ? "svm" : "gmm";
    char buf[64];
    for (size_t i = 0; i < report.fold_accuracies.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", report.fold_accuracies[i]);
        out << name << "," << i << "," << buf << "\n";
    }
    std::snprintf(buf, sizeof(buf), "%.17g", report.mean_accuracy);
    out << name << ",mean," << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", report.ci95_half_width);
    out << name << ",ci95," << buf << "\n";
}

}  // namespace crowd
