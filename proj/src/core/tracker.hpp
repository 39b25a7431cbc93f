#ifndef CROWD_TRACKER_HPP
#define CROWD_TRACKER_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "core/foreground.hpp"
#include "core/frame.hpp"

namespace crowd {

struct Vec2 {
    double x = 0;
    double y = 0;
};

struct Image32f {
    int width = 0;
    int height = 0;
    std::vector<float> px;

    float at(int x, int y) const { return px[static_cast<size_t>(y) * width + x]; }
    float& at(int x, int y) { return px[static_cast<size_t>(y) * width + x]; }
    // bilinear sample with border clamp
    float sample(double x, double y) const;

    static Image32f from_frame(const Frame& f);
    static Image32f blank(int w, int h) {
        Image32f im;
        im.width = w;
        im.height = h;
        im.px.assign(static_cast<size_t>(w) * h, 0.0f);
        return im;
    }
};

// Per-level image plus central-difference gradients.
struct PyramidLevel {
    Image32f img, gx, gy;
};

struct Pyramid {
    std::vector<PyramidLevel> levels;
    int width() const { return levels.empty() ? 0 : levels[0].img.width; }
    int height() const { return levels.empty() ? 0 : levels[0].img.height; }
};

Pyramid build_pyramid(const Frame& frame, int levels);

struct CornerParams {
    int max_points = 400;
    double quality = 0.01;       // fraction of the strongest masked response
    double min_distance = 5.0;   // px
};

// Shi-Tomasi min-eigenvalue corners inside the foreground mask, strongest
// first, greedily thinned to min_distance.
std::vector<Vec2> detect_corners(const Image32f& img, const ForegroundMask& mask,
                                 const CornerParams& params);
std::vector<Vec2> detect_corners(const Frame& frame, const ForegroundMask& mask,
                                 const CornerParams& params);

struct KltParams {
    int window_half = 7;         // 15x15 window
    int pyramid_levels = 3;
    int max_iterations = 20;
    double epsilon = 0.03;       // convergence step size, px
    double min_eig_threshold = 0.01;  // per-pixel-normalized structure tensor floor
};

struct KltResult {
    bool lost = true;
    Vec2 pos;
};

std::vector<KltResult> klt_step(const Pyramid& prev, const Pyramid& next,
                                std::span<const Vec2> points, const KltParams& params);
std::vector<KltResult> klt_step(const Frame& prev, const Frame& next,
                                std::span<const Vec2> points, const KltParams& params);

struct Tracklet {
    int64_t id = 0;
    int birth_frame = 0;
    std::vector<Vec2> positions;
    bool alive = true;

    int length() const { return static_cast<int>(positions.size()); }
    // finite differences of positions, length L-1
    std::vector<Vec2> velocities() const;
};

// keep/discard rule for finalized tracklets: discard if shorter than min_len
// or static on both axes (population std below threshold).
bool noise_filter_keep(const Tracklet& t, int min_len = 5, double static_std_threshold = 0.1);

struct TrackPoint {
    int64_t id = 0;
    Vec2 pos;
    Vec2 vel;
};

struct FrameTrackState {
    int frame = 0;
    std::vector<TrackPoint> points;  // only tracklets with an existing velocity (L >= 2)
};

struct TrackerParams {
    CornerParams corners;
    KltParams klt;
    int reseed_interval = 30;
    int min_tracklet_len = 5;
    double static_std_threshold = 0.1;
};

// Tracklet lifecycle over one video stream: seed on the first frame, step
// live points each frame, finalize everything and reseed every
// reseed_interval frames. Finalized tracklets pass through the noise filter.
class Tracker {
public:
    explicit Tracker(TrackerParams params = {});

    FrameTrackState advance(const Frame& frame, const ForegroundMask& mask);
    // Finalize all live tracklets (end of stream).
    void finish();

    const std::vector<Tracklet>& finished() const { return finished_; }
    std::vector<Tracklet> take_finished();
    const TrackerParams& params() const { return params_; }

private:
    void finalize(Tracklet&& t);
    void seed(const Frame& frame, const ForegroundMask& mask);

    TrackerParams params_;
    std::vector<Tracklet> live_;
    std::vector<Tracklet> finished_;
    Pyramid prev_pyr_;
    bool have_prev_ = false;
    int last_index_ = -1;
    int frames_since_seed_ = 0;
    int64_t next_id_ = 0;
};

}  // namespace crowd

#endif
