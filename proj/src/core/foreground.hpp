#ifndef CROWD_FOREGROUND_HPP
#define CROWD_FOREGROUND_HPP

#include <vector>

#include "core/frame.hpp"

namespace crowd {

struct ForegroundMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;  // 0 = background, 1 = foreground

    static ForegroundMask blank(int width, int height, uint8_t value = 0) {
        ForegroundMask m;
        m.width = width;
        m.height = height;
        m.bits.assign(static_cast<size_t>(width) * height, value);
        return m;
    }
    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count() const;
};

struct MogParams {
    int components = 5;
    float background_ratio = 0.7f;   // T: cumulative weight covered by background
    float match_sigma = 2.5f;        // match window in standard deviations
    float variance_floor = 4.0f;
    float initial_variance = 225.0f;
    float initial_weight = 0.05f;    // weight given to a newly spawned component
    float learning_rate = 0.005f;
};

// Per-pixel adaptive Gaussian mixture background model. Components are kept
// sorted by weight/sqrt(variance) descending; weights renormalize to 1 after
// every update.
class BackgroundModel {
public:
    BackgroundModel(int width, int height, MogParams params = {});

    // Updates the model with one frame and returns the raw foreground mask.
    ForegroundMask update(const Frame& frame);
    ForegroundMask update(const Frame& frame, float learning_rate);

    const MogParams& params() const { return params_; }
    // Per-pixel weight sum, for invariant checks.
    double weight_sum(int x, int y) const;

private:
    MogParams params_;
    int width_, height_;
    int k_;
    std::vector<float> weight_, mean_, var_;  // layout: pixel-major, k components each
    std::vector<uint8_t> used_;               // number of active components per pixel
};

// close(open(mask)) with a square structuring element of side 2*radius+1.
ForegroundMask morph_open_close(const ForegroundMask& mask, int kernel_radius);
ForegroundMask erode(const ForegroundMask& mask, int radius);
ForegroundMask dilate(const ForegroundMask& mask, int radius);

void write_mask_pgm(const ForegroundMask& mask, const std::filesystem::path& path);

}  // namespace crowd

#endif
