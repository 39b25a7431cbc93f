#include "core/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace crowd {

float Image32f::sample(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height - 1));
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    int x1 = std::min(x0 + 1, width - 1);
    int y1 = std::min(y0 + 1, height - 1);
    double fx = x - x0, fy = y - y0;
    double v0 = at(x0, y0) * (1 - fx) + at(x1, y0) * fx;
    double v1 = at(x0, y1) * (1 - fx) + at(x1, y1) * fx;
    return static_cast<float>(v0 * (1 - fy) + v1 * fy);
}

Image32f Image32f::from_frame(const Frame& f) {
    Image32f im = blank(f.width, f.height);
    for (size_t i = 0; i < f.pixels.size(); ++i) im.px[i] = static_cast<float>(f.pixels[i]);
    return im;
}

namespace {

void compute_gradients(const Image32f& img, Image32f& gx, Image32f& gy) {
    const int w = img.width, h = img.height;
    gx = Image32f::blank(w, h);
    gy = Image32f::blank(w, h);
    for (int y = 0; y < h; ++y) {
        int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            gx.at(x, y) = 0.5f * (img.at(xp, y) - img.at(xm, y));
            gy.at(x, y) = 0.5f * (img.at(x, yp) - img.at(x, ym));
        }
    }
}

Image32f downsample2(const Image32f& src) {
    int w = std::max(src.width / 2, 1), h = std::max(src.height / 2, 1);
    Image32f dst = Image32f::blank(w, h);
    for (int y = 0; y < h; ++y) {
        int y1 = std::min(2 * y + 1, src.height - 1);
        for (int x = 0; x < w; ++x) {
            int x1 = std::min(2 * x + 1, src.width - 1);
            dst.at(x, y) = 0.25f * (src.at(2 * x, 2 * y) + src.at(x1, 2 * y) +
                                    src.at(2 * x, y1) + src.at(x1, y1));
        }
    }
    return dst;
}

}  // namespace

Pyramid build_pyramid(const Frame& frame, int levels) {
    Pyramid pyr;
    pyr.levels.resize(levels);
    pyr.levels[0].img = Image32f::from_frame(frame);
    for (int l = 1; l < levels; ++l) pyr.levels[l].img = downsample2(pyr.levels[l - 1].img);
    for (int l = 0; l < levels; ++l)
        compute_gradients(pyr.levels[l].img, pyr.levels[l].gx, pyr.levels[l].gy);
    return pyr;
}

std::vector<Vec2> detect_corners(const Image32f& img, const ForegroundMask& mask,
                                 const CornerParams& params) {
    const int w = img.width, h = img.height;
    if (mask.width != w || mask.height != h)
        throw data_error("corner detection: mask/frame dimension mismatch");
    if (!(params.quality > 0 && params.quality < 1))
        throw usage_error("corner quality must be in (0,1)");
    if (params.min_distance < 1) throw usage_error("corner min_distance must be >= 1");

    Image32f gx, gy;
    compute_gradients(img, gx, gy);

    // min eigenvalue of the 3x3-windowed structure tensor
    Image32f resp = Image32f::blank(w, h);
    double max_resp = 0.0;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            if (!mask.at(x, y)) continue;
            double a = 0, b = 0, c = 0;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    double ix = gx.at(x + dx, y + dy);
                    double iy = gy.at(x + dx, y + dy);
                    a += ix * ix;
                    b += ix * iy;
                    c += iy * iy;
                }
            }
            double mineig = 0.5 * ((a + c) - std::sqrt((a - c) * (a - c) + 4 * b * b));
            resp.at(x, y) = static_cast<float>(mineig);
            max_resp = std::max(max_resp, mineig);
        }
    }
    if (max_resp <= 0.0) return {};

    struct Cand {
        float r;
        int x, y;
    };
    std::vector<Cand> cands;
    const float thresh = static_cast<float>(params.quality * max_resp);
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            float r = resp.at(x, y);
            if (r < thresh || r <= 0) continue;
            bool local_max = true;  // 3x3 non-max suppression
            for (int dy = -1; dy <= 1 && local_max; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    if (resp.at(x + dx, y + dy) > r) {
                        local_max = false;
                        break;
                    }
            if (local_max) cands.push_back({r, x, y});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.r != b.r) return a.r > b.r;
        return a.y != b.y ? a.y < b.y : a.x < b.x;
    });

    std::vector<Vec2> out;
    const double min_d2 = params.min_distance * params.min_distance;
    for (const Cand& c : cands) {
        bool ok = true;
        for (const Vec2& p : out) {
            double dx = p.x - c.x, dy = p.y - c.y;
            if (dx * dx + dy * dy < min_d2) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        out.push_back({static_cast<double>(c.x), static_cast<double>(c.y)});
        if (static_cast<int>(out.size()) >= params.max_points) break;
    }
    return out;
}

std::vector<Vec2> detect_corners(const Frame& frame, const ForegroundMask& mask,
                                 const CornerParams& params) {
    return detect_corners(Image32f::from_frame(frame), mask, params);
}

namespace {

// Iterative Lucas-Kanade at one pyramid level. Returns false on degenerate
// structure tensor; `disp` is updated in place with the refined displacement.
bool lk_level(const PyramidLevel& prev, const PyramidLevel& next, Vec2 p, Vec2& disp,
              const KltParams& params, bool* converged) {
    const int hw = params.window_half;
    const int n = (2 * hw + 1) * (2 * hw + 1);

    // gradients and template sampled once around p in the previous image
    std::vector<float> tpl(n), gxs(n), gys(n);
    double a = 0, b = 0, c = 0;
    int idx = 0;
    for (int dy = -hw; dy <= hw; ++dy) {
        for (int dx = -hw; dx <= hw; ++dx, ++idx) {
            double sx = p.x + dx, sy = p.y + dy;
            tpl[idx] = prev.img.sample(sx, sy);
            float ix = prev.gx.sample(sx, sy);
            float iy = prev.gy.sample(sx, sy);
            gxs[idx] = ix;
            gys[idx] = iy;
            a += ix * ix;
            b += ix * iy;
            c += iy * iy;
        }
    }
    double mineig = 0.5 * ((a + c) - std::sqrt((a - c) * (a - c) + 4 * b * b));
    if (mineig / n < params.min_eig_threshold) return false;
    double det = a * c - b * b;
    if (det <= 0) return false;

    *converged = false;
    for (int it = 0; it < params.max_iterations; ++it) {
        double bx = 0, by = 0;
        idx = 0;
        for (int dy = -hw; dy <= hw; ++dy) {
            for (int dx = -hw; dx <= hw; ++dx, ++idx) {
                double diff = tpl[idx] - next.img.sample(p.x + disp.x + dx, p.y + disp.y + dy);
                bx += diff * gxs[idx];
                by += diff * gys[idx];
            }
        }
        double ux = (c * bx - b * by) / det;
        double uy = (a * by - b * bx) / det;
        disp.x += ux;
        disp.y += uy;
        if (std::sqrt(ux * ux + uy * uy) < params.epsilon) {
            *converged = true;
            break;
        }
    }
    return true;
}

}  // namespace

std::vector<KltResult> klt_step(const Pyramid& prev, const Pyramid& next,
                                std::span<const Vec2> points, const KltParams& params) {
    if (prev.width() != next.width() || prev.height() != next.height())
        throw data_error("klt_step: frame dimension mismatch");
    const int levels = static_cast<int>(std::min(prev.levels.size(), next.levels.size()));
    const double w = prev.width(), h = prev.height();

    std::vector<KltResult> results(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        Vec2 p = points[i];
        Vec2 disp{0, 0};
        bool ok = true, converged = true;
        for (int l = levels - 1; l >= 0; --l) {
            double scale = static_cast<double>(1 << l);
            Vec2 pl{p.x / scale, p.y / scale};
            disp.x *= 2;
            disp.y *= 2;
            converged = true;
            if (!lk_level(prev.levels[l], next.levels[l], pl, disp, params, &converged)) {
                ok = (l != 0);  // degenerate at full resolution means lost
                if (!ok) break;
                converged = true;
                continue;  // keep the coarse guess
            }
        }
        Vec2 np{p.x + disp.x, p.y + disp.y};
        bool inside = np.x >= 0 && np.x <= w - 1 && np.y >= 0 && np.y <= h - 1;
        if (ok && converged && inside) {
            results[i].lost = false;
            results[i].pos = np;
        }
    }
    return results;
}

std::vector<KltResult> klt_step(const Frame& prev, const Frame& next, std::span<const Vec2> points,
                                const KltParams& params) {
    if (prev.width != next.width || prev.height != next.height)
        throw data_error("klt_step: frame dimension mismatch");
    Pyramid pp = build_pyramid(prev, params.pyramid_levels);
    Pyramid np = build_pyramid(next, params.pyramid_levels);
    return klt_step(pp, np, points, params);
}

std::vector<Vec2> Tracklet::velocities() const {
    std::vector<Vec2> v;
    if (positions.size() < 2) return v;
    v.reserve(positions.size() - 1);
    for (size_t i = 1; i < positions.size(); ++i)
        v.push_back({positions[i].x - positions[i - 1].x, positions[i].y - positions[i - 1].y});
    return v;
}

bool noise_filter_keep(const Tracklet& t, int min_len, double static_std_threshold) {
    if (t.length() < min_len) return false;
    double mx = 0, my = 0;
    for (const Vec2& p : t.positions) {
        mx += p.x;
        my += p.y;
    }
    const double n = static_cast<double>(t.positions.size());
    mx /= n;
    my /= n;
    double vx = 0, vy = 0;
    for (const Vec2& p : t.positions) {
        vx += (p.x - mx) * (p.x - mx);
        vy += (p.y - my) * (p.y - my);
    }
    double sx = std::sqrt(vx / n);  // population std
    double sy = std::sqrt(vy / n);
    return !(sx < static_std_threshold && sy < static_std_threshold);
}

Tracker::Tracker(TrackerParams params) : params_(params) {}

void Tracker::finalize(Tracklet&& t) {
    t.alive = false;
    if (noise_filter_keep(t, params_.min_tracklet_len, params_.static_std_threshold))
        finished_.push_back(std::move(t));
}

void Tracker::seed(const Frame& frame, const ForegroundMask& mask) {
    auto corners = detect_corners(prev_pyr_.levels[0].img, mask, params_.corners);
    for (const Vec2& c : corners) {
        Tracklet t;
        t.id = next_id_++;
        t.birth_frame = frame.index;
        t.positions.push_back(c);
        live_.push_back(std::move(t));
    }
    frames_since_seed_ = 0;
}

FrameTrackState Tracker::advance(const Frame& frame, const ForegroundMask& mask) {
    if (frame.index <= last_index_)
        throw data_error("tracker: out-of-order frame index " + std::to_string(frame.index));
    last_index_ = frame.index;
    if (mask.width != frame.width || mask.height != frame.height)
        throw data_error("tracker: mask dimension mismatch");

    Pyramid cur = build_pyramid(frame, params_.klt.pyramid_levels);

    if (!have_prev_) {
        prev_pyr_ = std::move(cur);
        have_prev_ = true;
        seed(frame, mask);
    } else if (frames_since_seed_ + 1 >= params_.reseed_interval) {
        // reseed frame: finalize everything, detect a fresh point set
        for (Tracklet& t : live_) finalize(std::move(t));
        live_.clear();
        prev_pyr_ = std::move(cur);
        seed(frame, mask);
    } else {
        std::vector<Vec2> pts;
        pts.reserve(live_.size());
        for (const Tracklet& t : live_) pts.push_back(t.positions.back());
        auto results = klt_step(prev_pyr_, cur, pts, params_.klt);

        std::vector<Tracklet> survivors;
        survivors.reserve(live_.size());
        for (size_t i = 0; i < live_.size(); ++i) {
            if (results[i].lost) {
                finalize(std::move(live_[i]));
            } else {
                live_[i].positions.push_back(results[i].pos);
                survivors.push_back(std::move(live_[i]));
            }
        }
        live_ = std::move(survivors);
        prev_pyr_ = std::move(cur);
        ++frames_since_seed_;
    }

    FrameTrackState state;
    state.frame = frame.index;
    for (const Tracklet& t : live_) {
        if (t.length() < 2) continue;
        const Vec2& p = t.positions.back();
        const Vec2& q = t.positions[t.positions.size() - 2];
        state.points.push_back({t.id, p, {p.x - q.x, p.y - q.y}});
    }
    return state;
}

void Tracker::finish() {
    for (Tracklet& t : live_) finalize(std::move(t));
    live_.clear();
}

std::vector<Tracklet> Tracker::take_finished() {
    std::vector<Tracklet> out = std::move(finished_);
    finished_.clear();
    return out;
}

}  // namespace crowd
