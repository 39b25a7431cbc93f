#ifndef CROWD_PIPELINE_HPP
#define CROWD_PIPELINE_HPP

#include <optional>

#include "core/config.hpp"
#include "core/features.hpp"
#include "core/foreground.hpp"
#include "core/tracker.hpp"

namespace crowd {

struct PipelineOptions {
    RunConfig cfg;
    MogParams mog;
    int morph_radius = 1;
    // ramp the background learning rate as max(base, 1/n) so the first frames
    // converge quickly instead of leaving ghost foreground at startup
    bool adaptive_burnin = true;
};

// Vision front-end composed per frame: background subtraction -> morphology
// -> KLT tracklets -> holistic features.
class Pipeline {
public:
    Pipeline(PipelineOptions opts, int frame_width, int frame_height);

    FeatureVector process(const Frame& frame);
    void finish() { tracker_.finish(); }

    const Tracker& tracker() const { return tracker_; }
    Tracker& tracker() { return tracker_; }
    const FrameTrackState& last_state() const { return last_state_; }

    static TrackerParams tracker_params(const RunConfig& cfg);

private:
    PipelineOptions opts_;
    BackgroundModel bg_;
    Tracker tracker_;
    FeatureExtractor features_;
    FrameTrackState last_state_;
    int frames_seen_ = 0;
};

}  // namespace crowd

#endif
