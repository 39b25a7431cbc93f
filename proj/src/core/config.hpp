#ifndef CROWD_CONFIG_HPP
#define CROWD_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>

namespace crowd {

// Pipeline configuration. Defaults follow the standard parameterization of
// the tracking and detection stages; see README for the knob reference.
struct RunConfig {
    int grid_rows = 10;
    int grid_cols = 10;
    int min_tracklet_len = 5;
    int reseed_interval = 30;
    double static_std_threshold = 0.1;
    int low_activity_threshold = 10;
    double ema_alpha = 0.1;
    int knn_k = 10;
    int gmm_components_min = 1;
    int gmm_components_max = 4;
    double svm_c = 1.0;

    void validate() const;  // throws on out-of-range values
    std::string canonical_text() const;
    uint64_t hash() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text);

}  // namespace crowd

#endif
