#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/features.hpp"
#include "core/synthcrowd.hpp"
#include "crowdanomaly.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// writes a features CSV with frames clustered around `center`
void write_clip(const fs::path& path, std::array<double, 4> center, int frames, uint64_t seed) {
    crowd::Rng rng(seed);
    std::vector<crowd::FeatureVector> rows(frames);
    for (int i = 0; i < frames; ++i) {
        rows[i].frame = i;
        rows[i].valid = true;
        for (int j = 0; j < 4; ++j) rows[i].values[j] = center[j] + rng.gauss(0, 0.05);
    }
    crowd::write_features_csv(path, rows, {});
}

}  // namespace

TEST_CASE("version and error state") {
    REQUIRE(ca_version() != nullptr);
    CHECK(std::strlen(ca_version()) > 0);
    CHECK(std::string(ca_last_error()).empty());
}

TEST_CASE("null arguments are usage errors with messages") {
    CHECK(ca_pipeline_create(nullptr, 320, 240, nullptr) == CA_ERR_USAGE);
    CHECK(std::strlen(ca_last_error()) > 0);
    ca_model* m = nullptr;
    CHECK(ca_model_load(nullptr, &m) == CA_ERR_USAGE);
    CHECK(ca_synth(nullptr, "/tmp/x", 1) == CA_ERR_USAGE);
}

TEST_CASE("unknown recipe fails with usage error") {
    fs::path dir = fresh_dir("capi_recipe");
    CHECK(ca_synth("unheard-of", dir.c_str(), 1) == CA_ERR_USAGE);
    CHECK(std::strlen(ca_last_error()) > 0);
    fs::remove_all(dir);
}

TEST_CASE("pipeline processes frames and enforces the index contract") {
    ca_pipeline* p = nullptr;
    REQUIRE(ca_pipeline_create(nullptr, 64, 48, &p) == CA_OK);
    REQUIRE(p != nullptr);
    std::vector<unsigned char> pixels(64 * 48, 100);
    double feats[CA_FEATURE_COUNT];
    int valid = -1;
    CHECK(ca_pipeline_process(p, pixels.data(), 0, feats, &valid) == CA_OK);
    CHECK(valid == 0);  // a flat frame has no trackable points
    // out-of-order frame index is rejected
    CHECK(ca_pipeline_process(p, pixels.data(), 5, feats, &valid) == CA_ERR_USAGE);
    CHECK(ca_pipeline_process(nullptr, pixels.data(), 1, feats, &valid) == CA_ERR_USAGE);
    ca_pipeline_destroy(p);
}

TEST_CASE("pipeline rejects bad configs") {
    fs::path dir = fresh_dir("capi_cfg");
    {
        std::ofstream out(dir / "bad.cfg");
        out << "ema_alpha=-3\n";
    }
    ca_pipeline* p = nullptr;
    CHECK(ca_pipeline_create((dir / "bad.cfg").c_str(), 64, 48, &p) == CA_ERR_DATA);
    CHECK(p == nullptr);
    fs::remove_all(dir);
}

TEST_CASE("train, save, load, score and classify a GMM") {
    fs::path dir = fresh_dir("capi_gmm");
    std::vector<std::string> csvs;
    for (int i = 0; i < 3; ++i) {
        fs::path p = dir / ("n" + std::to_string(i) + ".csv");
        write_clip(p, {4.0, 0.1, 0.5, 1.5}, 120, 10 + static_cast<uint64_t>(i));
        csvs.push_back(p.string());
    }
    std::vector<const char*> ptrs;
    for (const auto& s : csvs) ptrs.push_back(s.c_str());
    fs::path model = dir / "m.gmm";
    REQUIRE(ca_train_gmm(ptrs.data(), ptrs.size(), nullptr, 7, -1, model.c_str()) == CA_OK);

    ca_model* m = nullptr;
    REQUIRE(ca_model_load(model.c_str(), &m) == CA_OK);
    char kind[8];
    REQUIRE(ca_model_kind(m, kind, sizeof(kind)) == CA_OK);
    CHECK(std::string(kind) == "gmm");

    double in_dist[4] = {4.0, 0.1, 0.5, 1.5};
    double outlier[4] = {0.5, 0.9, 0.05, 9.0};
    double s1 = 0, s2 = 0;
    int abnormal = -1;
    REQUIRE(ca_model_score(m, in_dist, &s1) == CA_OK);
    REQUIRE(ca_model_score(m, outlier, &s2) == CA_OK);
    CHECK(s1 > s2);  // log-probability drops away from the training cloud
    REQUIRE(ca_model_classify(m, in_dist, &abnormal) == CA_OK);
    CHECK(abnormal == 0);
    REQUIRE(ca_model_classify(m, outlier, &abnormal) == CA_OK);
    CHECK(abnormal == 1);
    ca_model_destroy(m);

    // scoring writes a CSV with one row per frame
    fs::path scored = dir / "scores.csv";
    REQUIRE(ca_score(model.c_str(), csvs[0].c_str(), scored.c_str()) == CA_OK);
    std::ifstream in(scored);
    std::string line;
    int rows = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            CHECK(line.find("score") != std::string::npos);
            continue;
        }
        ++rows;
    }
    CHECK(rows == 120);
    fs::remove_all(dir);
}

TEST_CASE("train and use an ablated SVM on raw 4-feature input") {
    fs::path dir = fresh_dir("capi_svm");
    std::vector<std::string> csvs;
    std::vector<int> labels;
    for (int i = 0; i < 3; ++i) {
        fs::path p = dir / ("n" + std::to_string(i) + ".csv");
        write_clip(p, {4.0, 0.1, 0.5, 1.5}, 80, 20 + static_cast<uint64_t>(i));
        csvs.push_back(p.string());
        labels.push_back(0);
    }
    for (int i = 0; i < 3; ++i) {
        fs::path p = dir / ("a" + std::to_string(i) + ".csv");
        write_clip(p, {1.0, 0.8, 0.2, 4.0}, 80, 30 + static_cast<uint64_t>(i));
        csvs.push_back(p.string());
        labels.push_back(1);
    }
    std::vector<const char*> ptrs;
    for (const auto& s : csvs) ptrs.push_back(s.c_str());
    fs::path model = dir / "m.svm";
    // exclude mean_speed (index 3); the remaining features still separate
    REQUIRE(ca_train_svm(ptrs.data(), labels.data(), ptrs.size(), nullptr, 9, 3, model.c_str()) ==
            CA_OK);

    ca_model* m = nullptr;
    REQUIRE(ca_model_load(model.c_str(), &m) == CA_OK);
    char kind[8];
    REQUIRE(ca_model_kind(m, kind, sizeof(kind)) == CA_OK);
    CHECK(std::string(kind) == "svm");
    double normal[4] = {4.0, 0.1, 0.5, 1.5};
    double violent[4] = {1.0, 0.8, 0.2, 4.0};
    int abnormal = -1;
    REQUIRE(ca_model_classify(m, normal, &abnormal) == CA_OK);
    CHECK(abnormal == 0);
    REQUIRE(ca_model_classify(m, violent, &abnormal) == CA_OK);
    CHECK(abnormal == 1);
    ca_model_destroy(m);
    fs::remove_all(dir);
}

TEST_CASE("training on a missing csv is a data error") {
    const char* csvs[1] = {"/nonexistent/features.csv"};
    CHECK(ca_train_gmm(csvs, 1, nullptr, 1, -1, "/tmp/never.gmm") == CA_ERR_DATA);
    CHECK(std::strlen(ca_last_error()) > 0);
}

TEST_CASE("bench produces a positive fps figure") {
    double fps = 0;
    REQUIRE(ca_bench(160, 120, 15, 60, 3, nullptr, &fps) == CA_OK);
    CHECK(fps > 0.0);
}

TEST_CASE("vf-like corpus flows through features and cross validation") {
    fs::path dir = fresh_dir("capi_vf_flow");
    REQUIRE(ca_synth("vf-like", dir.c_str(), 7) == CA_OK);
    REQUIRE(ca_features_corpus(dir.c_str(), nullptr, 7) == CA_OK);
    CHECK(fs::exists(dir / "clip000.features.csv"));

    double acc = 0, ci = 0;
    fs::path cv_csv = dir / "cv.csv";
    REQUIRE(ca_eval_cv(dir.c_str(), "svm", 5, nullptr, 1, cv_csv.c_str(), &acc, &ci) == CA_OK);
    CHECK(acc >= 0.9);
    CHECK(fs::exists(cv_csv));
    fs::remove_all(dir);
}
