#ifndef CROWD_SYNTHCROWD_HPP
#define CROWD_SYNTHCROWD_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "core/features.hpp"
#include "core/frame.hpp"
#include "core/tracker.hpp"

namespace crowd {

enum class BehaviourMode { CoherentFlow, Mill, Panic, ViolentMix };

struct Segment {
    int start = 0;
    int end = 0;  // inclusive
    BehaviourMode mode = BehaviourMode::CoherentFlow;
    double dir_rad = 0;        // coherent/violent base direction
    double speed = 2.0;        // px/frame
    double multiplier = 3.0;   // panic speed multiplier
    double jitter_scale = 1.0; // multiplies the spec-level noise std
    double mix_fraction = 0.5; // violent: fraction of agents in the first group
    double angle_rad = 3.14159265358979323846;  // violent: group separation; mill: heading half-spread
    int truth_label = -1;      // -1: label follows the mode; 0/1 forces the frame label
};

struct ScenarioSpec {
    int width = 320;
    int height = 240;
    int agents = 60;
    double radius = 6.0;
    double noise = 0.3;   // per-axis velocity jitter std, px/frame
    double spread = 1.0;  // fraction of the frame used as the motion domain
    uint64_t seed = 0;
    std::vector<Segment> timeline;

    int frame_count() const { return timeline.empty() ? 0 : timeline.back().end + 1; }
    void validate() const;
};

ScenarioSpec load_scenario(const std::filesystem::path& path);
ScenarioSpec parse_scenario_text(const std::string& text);
void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path);

struct GroundTruth {
    std::vector<uint8_t> labels;  // per frame, 1 = abnormal
};

// One agent's trajectory, split into continuous spans at domain wraps.
struct TrajectorySpan {
    int agent = 0;
    int start_frame = 0;
    std::vector<Vec2> positions;
};

struct Simulation {
    GroundTruth truth;
    std::vector<TrajectorySpan> spans;
    // per frame, per agent position/velocity (for rendering and oracles)
    std::vector<std::vector<Vec2>> positions;
    std::vector<std::vector<Vec2>> velocities;
};

Simulation simulate(const ScenarioSpec& spec);

// Textured-disc rendering over a static noise background; corners exist on
// every agent so the KLT front-end has something to hold on to.
std::vector<Frame> render(const Simulation& sim, const ScenarioSpec& spec);
void render_y4m(const Simulation& sim, const ScenarioSpec& spec,
                const std::filesystem::path& path);

// Ground-truth tracklets in the tracker interchange format: spans chunked to
// reseed_interval-frame windows with the same noise filters applied.
std::vector<Tracklet> export_tracklets(const Simulation& sim, int reseed_interval = 30,
                                       int min_len = 5, double static_std_threshold = 0.1);

void write_labels(const GroundTruth& truth, const std::filesystem::path& path);
std::vector<uint8_t> read_labels(const std::filesystem::path& path);

// Shipped corpus recipes. Both write scenario specs, labels, and a manifest
// under `out`; umn-like renders Y4M video, vf-like exports tracklet files.
void generate_umn_like(const std::filesystem::path& out, uint64_t seed);
void generate_vf_like(const std::filesystem::path& out, uint64_t seed);
void generate_recipe(const std::string& name, const std::filesystem::path& out, uint64_t seed);

}  // namespace crowd

#endif
