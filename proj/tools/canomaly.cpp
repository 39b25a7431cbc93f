// Command-line front-end; all work goes through the public C API.
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crowdanomaly.h"

namespace {

const char* kFeatureNames[CA_FEATURE_COUNT] = {"collectiveness", "conflict", "density",
                                               "mean_speed"};

int finish(ca_status st) {
    if (st != CA_OK) std::fprintf(stderr, "error: %s\n", ca_last_error());
    return static_cast<int>(st);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"crowd behaviour anomaly detection"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("canomaly ") + ca_version());

    std::string config, out, video, format = "y4m", tracklets, corpus, model, features_csv;
    std::string recipe, detector = "svm", prefix;
    std::vector<std::string> inputs;
    std::vector<int> labels;
    uint64_t seed = 0;
    int width = 320, height = 240, folds = 5, train_frames = 200, exclude = -1;
    int agents = 60, frames = 600;
    bool cross = false;

    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    synth->add_option("--recipe", recipe, "umn-like or vf-like")->required();
    synth->add_option("--out", out, "output directory")->required();
    synth->add_option("--seed", seed);

    auto* track = app.add_subcommand("track", "extract tracklets from video");
    track->add_option("--video", video, "video path (or corpus dir with --corpus)");
    track->add_option("--format", format, "y4m, pgm_dir or raw_y8");
    track->add_option("--width", width, "frame width (raw_y8 only)");
    track->add_option("--height", height, "frame height (raw_y8 only)");
    track->add_option("--corpus", corpus, "process every video in this corpus");
    track->add_option("--config", config);
    track->add_option("--seed", seed);
    track->add_option("--out", out, "tracklet output path");

    auto* feats = app.add_subcommand("features", "compute per-frame features from tracklets");
    feats->add_option("--tracklets", tracklets);
    feats->add_option("--width", width, "frame width the tracklets came from");
    feats->add_option("--height", height, "frame height the tracklets came from");
    feats->add_option("--corpus", corpus, "process every clip in this corpus");
    feats->add_option("--config", config);
    feats->add_option("--seed", seed);
    feats->add_option("--out", out, "feature CSV output path");

    auto* tgmm = app.add_subcommand("train-gmm", "fit the outlier GMM on feature CSVs");
    tgmm->add_option("--features", inputs, "feature CSV paths")->required();
    tgmm->add_option("--exclude-feature", exclude, "drop one feature (0..3)");
    tgmm->add_option("--config", config);
    tgmm->add_option("--seed", seed);
    tgmm->add_option("--out", out, "model output path")->required();

    auto* tsvm = app.add_subcommand("train-svm", "fit the RBF SVM on labeled feature CSVs");
    tsvm->add_option("--features", inputs, "feature CSV paths")->required();
    tsvm->add_option("--labels", labels, "clip labels, one per CSV (1 = abnormal)")->required();
    tsvm->add_option("--exclude-feature", exclude, "drop one feature (0..3)");
    tsvm->add_option("--config", config);
    tsvm->add_option("--seed", seed);
    tsvm->add_option("--out", out, "model output path")->required();

    auto* score = app.add_subcommand("score", "score a feature CSV with a saved model");
    score->add_option("--model", model)->required();
    score->add_option("--features", features_csv)->required();
    score->add_option("--out", out, "score CSV output path")->required();

    auto* umn = app.add_subcommand("eval-umn", "frame-level ROC protocol over a rendered corpus");
    umn->add_option("--corpus", corpus)->required();
    umn->add_flag("--cross-scene", cross, "train on the other scenes");
    umn->add_option("--train-frames", train_frames);
    umn->add_option("--config", config);
    umn->add_option("--seed", seed);
    umn->add_option("--out", prefix, "report prefix (<prefix>_roc.csv/.svg)");

    auto* cv = app.add_subcommand("eval-cv", "clip-level cross validation");
    cv->add_option("--corpus", corpus)->required();
    cv->add_option("--detector", detector, "gmm or svm");
    cv->add_option("--folds", folds);
    cv->add_option("--config", config);
    cv->add_option("--seed", seed);
    cv->add_option("--out", out, "fold report CSV path");

    auto* abl = app.add_subcommand("ablate", "leave-one-feature-out SVM cross validation");
    abl->add_option("--corpus", corpus)->required();
    abl->add_option("--folds", folds);
    abl->add_option("--config", config);
    abl->add_option("--seed", seed);
    abl->add_option("--out", out, "ablation report CSV path");

    auto* bench = app.add_subcommand("bench", "pipeline throughput on in-memory synthetic video");
    bench->add_option("--width", width);
    bench->add_option("--height", height);
    bench->add_option("--agents", agents);
    bench->add_option("--frames", frames);
    bench->add_option("--config", config);
    bench->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(CA_ERR_USAGE);
    }

    if (synth->parsed()) return finish(ca_synth(recipe.c_str(), out.c_str(), seed));

    if (track->parsed()) {
        if (!corpus.empty()) return finish(ca_track_corpus(corpus.c_str(), opt(config), seed));
        if (video.empty() || out.empty()) {
            std::fprintf(stderr, "error: track needs --video and --out (or --corpus)\n");
            return static_cast<int>(CA_ERR_USAGE);
        }
        return finish(ca_track(video.c_str(), format.c_str(), width, height, opt(config), seed,
                               out.c_str()));
    }

    if (feats->parsed()) {
        if (!corpus.empty()) return finish(ca_features_corpus(corpus.c_str(), opt(config), seed));
        if (tracklets.empty() || out.empty()) {
            std::fprintf(stderr, "error: features needs --tracklets and --out (or --corpus)\n");
            return static_cast<int>(CA_ERR_USAGE);
        }
        return finish(
            ca_features(tracklets.c_str(), width, height, opt(config), seed, out.c_str()));
    }

    std::vector<const char*> csvs;
    for (const auto& s : inputs) csvs.push_back(s.c_str());

    if (tgmm->parsed())
        return finish(ca_train_gmm(csvs.data(), csvs.size(), opt(config), seed, exclude,
                                   out.c_str()));

    if (tsvm->parsed()) {
        if (labels.size() != csvs.size()) {
            std::fprintf(stderr, "error: need one label per feature CSV\n");
            return static_cast<int>(CA_ERR_USAGE);
        }
        return finish(ca_train_svm(csvs.data(), labels.data(), csvs.size(), opt(config), seed,
                                   exclude, out.c_str()));
    }

    if (score->parsed())
        return finish(ca_score(model.c_str(), features_csv.c_str(), out.c_str()));

    if (umn->parsed()) {
        double auc = 0;
        ca_status st = ca_eval_umn(corpus.c_str(), cross ? 1 : 0, train_frames, opt(config), seed,
                                   opt(prefix), &auc);
        if (st == CA_OK)
            std::printf("split=%s auc=%.4f\n", cross ? "cross-scene" : "single-scene", auc);
        return finish(st);
    }

    if (cv->parsed()) {
        double acc = 0, ci = 0;
        ca_status st = ca_eval_cv(corpus.c_str(), detector.c_str(), folds, opt(config), seed,
                                  opt(out), &acc, &ci);
        if (st == CA_OK)
            std::printf("detector=%s folds=%d accuracy=%.2f%% +/- %.2f%%\n", detector.c_str(),
                        folds, 100.0 * acc, 100.0 * ci);
        return finish(st);
    }

    if (abl->parsed()) {
        double acc[CA_FEATURE_COUNT] = {};
        ca_status st = ca_ablate(corpus.c_str(), folds, opt(config), seed, opt(out), acc);
        if (st == CA_OK)
            for (int i = 0; i < CA_FEATURE_COUNT; ++i)
                std::printf("without %-14s accuracy=%.2f%%\n", kFeatureNames[i], 100.0 * acc[i]);
        return finish(st);
    }

    if (bench->parsed()) {
        double fps = 0;
        ca_status st = ca_bench(width, height, agents, frames, seed, opt(config), &fps);
        if (st == CA_OK) std::printf("fps=%.1f\n", fps);
        return finish(st);
    }

    return static_cast<int>(CA_ERR_USAGE);
}
