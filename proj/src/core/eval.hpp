#ifndef CROWD_EVAL_HPP
#define CROWD_EVAL_HPP

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "core/models.hpp"
#include "core/pipeline.hpp"

namespace crowd {

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    double auc = 0;
};

// lower score = more abnormal; labels 1 = abnormal
RocCurve frame_roc(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

struct SceneData {
    std::string name;
    // one entry per clip: per-frame features plus ground-truth frame labels
    std::vector<std::pair<std::vector<FeatureVector>, std::vector<uint8_t>>> clips;
};

enum class UmnSplit { SingleScene, CrossScene };

struct UmnReport {
    UmnSplit split = UmnSplit::SingleScene;
    std::vector<std::pair<std::string, RocCurve>> per_scene;
    RocCurve pooled;
    int train_frames = 200;
};

// Train a GMM on the first train_frames of each clip (own scene or the other
// scenes, depending on split), score the remaining frames, ROC per scene.
UmnReport umn_protocol(const std::vector<SceneData>& scenes, UmnSplit split,
                       int train_frames = 200, const GmmFitOptions& gmm_opts = {},
                       int exclude_feature = -1);

struct ClipData {
    std::vector<FeatureVector> features;
    int label = 0;  // 1 = abnormal/violent
};

enum class DetectorKind { Gmm, Svm };

struct CvReport {
    DetectorKind detector = DetectorKind::Svm;
    std::vector<double> fold_accuracies;
    double mean_accuracy = 0;
    double ci95_half_width = 0;
};

// Stratified k-fold cross validation at clip level. SVM trains on labeled
// frames of the training folds; GMM trains on normal-clip frames only.
CvReport clip_cv_protocol(const std::vector<ClipData>& clips, int folds, DetectorKind detector,
                          uint64_t seed, int exclude_feature = -1,
                          const GmmFitOptions& gmm_opts = {}, double svm_c = 1.0);

// leave-one-feature-out reruns of the SVM cross validation
std::map<std::string, double> ablation(const std::vector<ClipData>& clips, int folds,
                                       uint64_t seed, double svm_c = 1.0);

struct BenchReport {
    double fps = 0;
    int frames_timed = 0;
    int warmup_frames = 0;
};

// Wall-clock rate of the full pipeline over pre-buffered frames, warm-up
// excluded from timing.
BenchReport bench_throughput(const std::vector<Frame>& frames, const PipelineOptions& opts,
                             int warmup = 30);

void write_roc_csv(const RocCurve& roc, const std::filesystem::path& path, const CsvMeta& meta);
void write_roc_svg(const RocCurve& roc, const std::filesystem::path& path,
                   const std::string& title);
void write_cv_csv(const CvReport& report, const std::filesystem::path& path, const CsvMeta& meta);

}  // namespace crowd

#endif
