#ifndef CROWD_MODELS_HPP
#define CROWD_MODELS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/features.hpp"

namespace crowd {

// Min-max scaling to [0,1] per feature (training range, clamped for test
// data), then division by the largest scaled-vector magnitude in training.
struct NormStats {
    int dim = 0;
    std::vector<double> min, max;
    double max_norm = 1.0;

    std::vector<double> transform(const std::vector<double>& v) const;
};

NormStats fit_norm(const std::vector<std::vector<double>>& train);

// Rows = valid feature frames as d-dim points; optionally drops one feature
// dimension (for ablation runs).
std::vector<std::vector<double>> feature_points(const std::vector<FeatureVector>& frames,
                                                int exclude_feature = -1);

struct GaussComponent {
    double weight = 0;
    std::vector<double> mean;
    std::vector<double> cov;   // row-major d*d, symmetric positive definite
    std::vector<double> chol;  // lower Cholesky factor of cov
    double log_det = 0;        // log det(cov)
};

struct GmmModel {
    int dim = 0;
    std::vector<GaussComponent> components;
    std::vector<std::pair<int, double>> bic_table;  // (component count, BIC)
    double log_prob_threshold = 0;
    // Otsu binning grid, reused for the clip-level mode rule.
    double bin_min = 0, bin_width = 0;
    int bins = 256;
    NormStats norm;
    int excluded_feature = -1;

    int chosen_components() const { return static_cast<int>(components.size()); }
};

struct GmmFitOptions {
    int components_min = 1;
    int components_max = 4;
    uint64_t seed = 0;
    int max_iterations = 300;
    double tolerance = 1e-7;        // relative log-likelihood change
    double cov_regularization = 1e-6;
    int max_restarts = 5;
    int otsu_bins = 256;
};

struct GmmFitDiagnostics {
    // log-likelihood per EM iteration for the selected component count
    std::vector<double> loglik_history;
};

// EM with k-means++ init for each M in range, BIC = -2 lnL + p ln n model
// selection, Otsu threshold over training log-probs.
GmmModel fit_gmm(const std::vector<std::vector<double>>& train, const GmmFitOptions& opts,
                 GmmFitDiagnostics* diag = nullptr);

double gmm_log_prob(const GmmModel& model, const std::vector<double>& point);

// threshold = bin edge maximizing between-class variance over a `bins`-bin
// equal-width histogram of the values; ties break toward the lower edge
double otsu_threshold(const std::vector<double>& values, int bins = 256);

enum class Label { Normal, Abnormal };

// abnormal iff log_prob strictly below the Otsu threshold
Label gmm_classify_frame(const GmmModel& model, const std::vector<double>& point);
// histogram mode of the clip's log-probs on the training binning grid
Label gmm_classify_clip(const GmmModel& model, const std::vector<std::vector<double>>& points);

struct SvmModel {
    int dim = 0;
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> dual_coef;  // alpha_i * y_i
    double bias = 0;
    double gamma = 1.0;
    double c = 1.0;
    NormStats norm;
    int excluded_feature = -1;
};

struct SvmFitOptions {
    double c = 1.0;
    double gamma = 0;  // <= 0 selects the variance-scaled default
    double kkt_tolerance = 1e-3;
    uint64_t seed = 0;
    int max_passes = 200;
};

// Soft-margin RBF SVM dual solved by sequential minimal optimization.
// Labels are +1 (abnormal) / -1 (normal); both classes must be present.
SvmModel fit_svm(const std::vector<std::vector<double>>& points, const std::vector<int>& labels,
                 const SvmFitOptions& opts);

double svm_decision(const SvmModel& model, const std::vector<double>& point);
Label svm_classify_frame(const SvmModel& model, const std::vector<double>& point);
// majority over frames; ties -> abnormal
Label svm_classify_clip(const SvmModel& model, const std::vector<std::vector<double>>& points,
                        size_t invalid_frames = 0);

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma);

// Versioned text serialization; numbers round-trip bit-exactly.
void save_gmm(const GmmModel& model, const std::filesystem::path& path);
GmmModel load_gmm(const std::filesystem::path& path);
void save_svm(const SvmModel& model, const std::filesystem::path& path);
SvmModel load_svm(const std::filesystem::path& path);

// "gmm" or "svm", peeked from a saved model file.
std::string model_kind(const std::filesystem::path& path);

}  // namespace crowd

#endif
