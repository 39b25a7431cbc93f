#include "core/pipeline.hpp"

#include <algorithm>

namespace crowd {

TrackerParams Pipeline::tracker_params(const RunConfig& cfg) {
    TrackerParams tp;
    tp.reseed_interval = cfg.reseed_interval;
    tp.min_tracklet_len = cfg.min_tracklet_len;
    tp.static_std_threshold = cfg.static_std_threshold;
    return tp;
}

Pipeline::Pipeline(PipelineOptions opts, int frame_width, int frame_height)
    : opts_(opts),
      bg_(frame_width, frame_height, opts.mog),
      tracker_(tracker_params(opts.cfg)),
      features_(opts.cfg, frame_width, frame_height) {}

FeatureVector Pipeline::process(const Frame& frame) {
    ++frames_seen_;
    float lr = opts_.mog.learning_rate;
    if (opts_.adaptive_burnin)
        lr = std::max(lr, 1.0f / static_cast<float>(frames_seen_));
    ForegroundMask mask = bg_.update(frame, lr);
    mask = morph_open_close(mask, opts_.morph_radius);
    last_state_ = tracker_.advance(frame, mask);
    return features_.compute(last_state_);
}

}  // namespace crowd
