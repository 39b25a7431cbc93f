#ifndef CROWD_FEATURES_HPP
#define CROWD_FEATURES_HPP

#include <array>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/tracker.hpp"

namespace crowd {

inline constexpr std::array<const char*, 4> kFeatureNames = {"collectiveness", "conflict",
                                                             "density", "mean_speed"};
int feature_index(const std::string& name);  // throws usage_error on unknown name

struct FeatureVector {
    int frame = 0;
    bool valid = false;
    std::array<double, 4> values{};  // collectiveness, conflict, density, mean_speed

    double collectiveness() const { return values[0]; }
    double conflict() const { return values[1]; }
    double density() const { return values[2]; }
    double mean_speed() const { return values[3]; }
};

// Directed kNN edges (i -> j for j among the k nearest of i, by position).
// Shared between collectiveness and conflict so the graph is built once.
struct NeighborGraph {
    int n = 0;
    int k = 0;
    std::vector<std::vector<int>> neighbors;  // per point, up to k indices
};

NeighborGraph build_knn(const std::vector<TrackPoint>& points, int k);

// mean over columns j of sum_i max(0, cos(v_i, v_j)) for edges i->j
double collectiveness(const std::vector<TrackPoint>& points, const NeighborGraph& graph);
// mean over directed edges of (1 - cos(v_i, v_j)) / 2; zero-magnitude
// velocities contribute cosine 0
double conflict(const std::vector<TrackPoint>& points, const NeighborGraph& graph);
double density(const std::vector<TrackPoint>& points, int grid_rows, int grid_cols,
               int frame_width, int frame_height);
double mean_speed(const std::vector<TrackPoint>& points);

struct EmaState {
    std::array<double, 4> smoothed{};
    bool initialized = false;

    // smoothed = alpha*raw + (1-alpha)*smoothed; first value passes through
    std::array<double, 4> update(const std::array<double, 4>& raw, double alpha);
};

// Per-frame descriptor with the low-activity gate and EMA smoothing.
class FeatureExtractor {
public:
    FeatureExtractor(RunConfig cfg, int frame_width, int frame_height)
        : cfg_(cfg), width_(frame_width), height_(frame_height) {}

    FeatureVector compute(const FrameTrackState& state);
    const EmaState& ema() const { return ema_; }

private:
    RunConfig cfg_;
    int width_, height_;
    EmaState ema_;
};

struct CsvMeta {
    std::string tool = kToolName;
    std::string version = kToolVersion;
    uint64_t seed = 0;
    uint64_t config_hash = 0;
};

void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& rows,
                        const CsvMeta& meta);
std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path);

void write_tracklets(const std::filesystem::path& path, const std::vector<Tracklet>& tracklets,
                     const CsvMeta& meta);
std::vector<Tracklet> read_tracklets(const std::filesystem::path& path);

// Replays stored tracklets into per-frame track states (the same view the
// live tracker produces), covering frames [first, last].
std::vector<FrameTrackState> track_states_from_tracklets(const std::vector<Tracklet>& tracklets);

}  // namespace crowd

#endif
