#include "core/foreground.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crowd {

size_t ForegroundMask::count() const {
    return static_cast<size_t>(std::count(bits.begin(), bits.end(), uint8_t{1}));
}

BackgroundModel::BackgroundModel(int width, int height, MogParams params)
    : params_(params), width_(width), height_(height), k_(params.components) {
    if (k_ < 1 || k_ > 5) throw usage_error("MOG component count must be in 1..5");
    size_t n = static_cast<size_t>(width) * height * k_;
    weight_.assign(n, 0.0f);
    mean_.assign(n, 0.0f);
    var_.assign(n, params_.initial_variance);
    used_.assign(static_cast<size_t>(width) * height, 0);
}

double BackgroundModel::weight_sum(int x, int y) const {
    size_t base = (static_cast<size_t>(y) * width_ + x) * k_;
    int used = used_[static_cast<size_t>(y) * width_ + x];
    double s = 0;
    for (int i = 0; i < used; ++i) s += weight_[base + i];
    return s;
}

ForegroundMask BackgroundModel::update(const Frame& frame) {
    return update(frame, params_.learning_rate);
}

ForegroundMask BackgroundModel::update(const Frame& frame, float lr) {
    if (frame.width != width_ || frame.height != height_)
        throw data_error("frame " + std::to_string(frame.index) +
                         ": dimension mismatch against background model");
    if (!(lr > 0.0f && lr <= 1.0f)) throw usage_error("learning rate must be in (0,1]");

    ForegroundMask mask = ForegroundMask::blank(width_, height_);
    const float match2 = params_.match_sigma * params_.match_sigma;

    const size_t npx = static_cast<size_t>(width_) * height_;
    for (size_t p = 0; p < npx; ++p) {
        const float x = static_cast<float>(frame.pixels[p]);
        const size_t base = p * k_;
        int used = used_[p];

        if (used == 0) {
            weight_[base] = 1.0f;
            mean_[base] = x;
            var_[base] = params_.initial_variance;
            used_[p] = 1;
            continue;  // first observation, background by convention
        }

        // components are sorted by weight/sqrt(var) descending
        int matched = -1;
        for (int i = 0; i < used; ++i) {
            float d = x - mean_[base + i];
            if (d * d < match2 * var_[base + i]) {
                matched = i;
                break;
            }
        }

        if (matched >= 0) {
            for (int i = 0; i < used; ++i) {
                if (i == matched) {
                    weight_[base + i] += lr * (1.0f - weight_[base + i]);
                    float d = x - mean_[base + i];
                    mean_[base + i] += lr * d;
                    var_[base + i] += lr * (d * d - var_[base + i]);
                    var_[base + i] = std::max(var_[base + i], params_.variance_floor);
                } else {
                    weight_[base + i] *= (1.0f - lr);
                }
            }
        } else {
            // spawn a low-weight component, evicting the weakest if full
            int slot = (used < k_) ? used++ : k_ - 1;
            weight_[base + slot] = params_.initial_weight;
            mean_[base + slot] = x;
            var_[base + slot] = params_.initial_variance;
            used_[p] = static_cast<uint8_t>(used);
        }

        float wsum = 0.0f;
        for (int i = 0; i < used; ++i) wsum += weight_[base + i];
        for (int i = 0; i < used; ++i) weight_[base + i] /= wsum;

        // insertion sort by weight/sqrt(var) descending (mostly already sorted)
        for (int i = 1; i < used; ++i) {
            float key = weight_[base + i] / std::sqrt(var_[base + i]);
            int j = i;
            while (j > 0 && weight_[base + j - 1] / std::sqrt(var_[base + j - 1]) < key) {
                std::swap(weight_[base + j - 1], weight_[base + j]);
                std::swap(mean_[base + j - 1], mean_[base + j]);
                std::swap(var_[base + j - 1], var_[base + j]);
                --j;
            }
        }

        // background components: leading ones until cumulative weight exceeds T
        int bg_count = 0;
        float cum = 0.0f;
        for (int i = 0; i < used; ++i) {
            cum += weight_[base + i];
            ++bg_count;
            if (cum > params_.background_ratio) break;
        }
        bool fg = true;
        for (int i = 0; i < bg_count; ++i) {
            float d = x - mean_[base + i];
            if (d * d < match2 * var_[base + i]) {
                fg = false;
                break;
            }
        }
        mask.bits[p] = fg ? 1 : 0;
    }
    return mask;
}

namespace {

// Separable min/max filter over a (2r+1) square window.
template <typename Op>
ForegroundMask window_filter(const ForegroundMask& mask, int radius, Op op, uint8_t border) {
    const int w = mask.width, h = mask.height;
    ForegroundMask tmp = ForegroundMask::blank(w, h);
    ForegroundMask out = ForegroundMask::blank(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            uint8_t v = border;
            for (int dx = -radius; dx <= radius; ++dx) {
                int xx = x + dx;
                uint8_t s = (xx >= 0 && xx < w) ? mask.bits[static_cast<size_t>(y) * w + xx] : border;
                v = op(v, s);
            }
            tmp.bits[static_cast<size_t>(y) * w + x] = v;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            uint8_t v = border;
            for (int dy = -radius; dy <= radius; ++dy) {
                int yy = y + dy;
                uint8_t s = (yy >= 0 && yy < h) ? tmp.bits[static_cast<size_t>(yy) * w + x] : border;
                v = op(v, s);
            }
            out.bits[static_cast<size_t>(y) * w + x] = v;
        }
    }
    return out;
}

}  // namespace

ForegroundMask erode(const ForegroundMask& mask, int radius) {
    return window_filter(mask, radius, [](uint8_t a, uint8_t b) { return std::min(a, b); },
                         uint8_t{1});
}

ForegroundMask dilate(const ForegroundMask& mask, int radius) {
    return window_filter(mask, radius, [](uint8_t a, uint8_t b) { return std::max(a, b); },
                         uint8_t{0});
}

ForegroundMask morph_open_close(const ForegroundMask& mask, int kernel_radius) {
    if (kernel_radius < 1) throw usage_error("morphology kernel radius must be >= 1");
    ForegroundMask opened = dilate(erode(mask, kernel_radius), kernel_radius);
    return erode(dilate(opened, kernel_radius), kernel_radius);
}

void write_mask_pgm(const ForegroundMask& mask, const std::filesystem::path& path) {
    Frame f = Frame::blank(0, mask.width, mask.height);
    for (size_t i = 0; i < mask.bits.size(); ++i) f.pixels[i] = mask.bits[i] ? 255 : 0;
    write_pgm(f, path);
}

}  // namespace crowd
