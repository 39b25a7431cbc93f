#include "core/synthcrowd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace crowd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void ScenarioSpec::validate() const {
    if (width < 16 || height < 16) throw data_error("scenario: frame dims must be >= 16");
    if (agents < 0) throw data_error("scenario: agent count must be >= 0");
    if (radius <= 0) throw data_error("scenario: agent radius must be positive");
    if (noise < 0) throw data_error("scenario: noise std must be >= 0");
    if (spread <= 0 || spread > 1) throw data_error("scenario: spread must be in (0,1]");
    if (timeline.empty()) throw data_error("scenario: timeline is empty");
    int expect = 0;
    for (const Segment& s : timeline) {
        if (s.start != expect || s.end < s.start)
            throw data_error("scenario: timeline segments must be contiguous and non-overlapping");
        if (s.speed <= 0 || s.multiplier <= 0)
            throw data_error("scenario: speeds must be positive");
        if (s.mix_fraction <= 0 || s.mix_fraction >= 1)
            throw data_error("scenario: mix fraction must be in (0,1)");
        expect = s.end + 1;
    }
}

namespace {

std::string mode_name(BehaviourMode m) {
    switch (m) {
        case BehaviourMode::CoherentFlow: return "coherent";
        case BehaviourMode::Mill: return "mill";
        case BehaviourMode::Panic: return "panic";
        case BehaviourMode::ViolentMix: return "violent";
    }
    return "?";
}

BehaviourMode mode_from_name(const std::string& s) {
    if (s == "coherent") return BehaviourMode::CoherentFlow;
    if (s == "mill") return BehaviourMode::Mill;
    if (s == "panic") return BehaviourMode::Panic;
    if (s == "violent") return BehaviourMode::ViolentMix;
    throw data_error("scenario: unknown behaviour mode '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (std::getline(is, tok, sep)) out.push_back(tok);
    return out;
}

}  // namespace

ScenarioSpec parse_scenario_text(const std::string& text) {
    ScenarioSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line.erase(hashpos);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw data_error("scenario line " + std::to_string(lineno) + ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        try {
            if (key == "width") spec.width = std::stoi(val);
            else if (key == "height") spec.height = std::stoi(val);
            else if (key == "agents") spec.agents = std::stoi(val);
            else if (key == "radius") spec.radius = std::stod(val);
            else if (key == "noise") spec.noise = std::stod(val);
            else if (key == "spread") spec.spread = std::stod(val);
            else if (key == "seed") spec.seed = std::stoull(val);
            else if (key == "segment") {
                auto parts = split(val, ',');
                if (parts.size() < 3)
                    throw data_error("scenario: segment needs start,end,mode");
                Segment seg;
                seg.start = std::stoi(parts[0]);
                seg.end = std::stoi(parts[1]);
                seg.mode = mode_from_name(parts[2]);
                for (size_t i = 3; i < parts.size(); ++i) {
                    auto peq = parts[i].find('=');
                    if (peq == std::string::npos)
                        throw data_error("scenario: bad segment parameter '" + parts[i] + "'");
                    std::string pk = parts[i].substr(0, peq);
                    double pv = std::stod(parts[i].substr(peq + 1));
                    if (pk == "dir_deg") seg.dir_rad = pv * kPi / 180.0;
                    else if (pk == "speed") seg.speed = pv;
                    else if (pk == "multiplier") seg.multiplier = pv;
                    else if (pk == "jitter") seg.jitter_scale = pv;
                    else if (pk == "mix") seg.mix_fraction = pv;
                    else if (pk == "angle_deg") seg.angle_rad = pv * kPi / 180.0;
                    else if (pk == "label") seg.truth_label = static_cast<int>(pv);
                    else throw data_error("scenario: unknown segment parameter '" + pk + "'");
                }
                spec.timeline.push_back(seg);
            } else {
                throw data_error("scenario: unknown key '" + key + "'");
            }
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw data_error("scenario line " + std::to_string(lineno) + ": unparsable value");
        }
    }
    spec.validate();
    return spec;
}

ScenarioSpec load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open scenario " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

void save_scenario(const ScenarioSpec& spec, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out.precision(17);  // values must survive the text round-trip unchanged
    out << "width=" << spec.width << "\nheight=" << spec.height << "\nagents=" << spec.agents
        << "\nradius=" << spec.radius << "\nnoise=" << spec.noise << "\nspread=" << spec.spread
        << "\nseed=" << spec.seed << "\n";
    for (const Segment& s : spec.timeline) {
        out << "segment=" << s.start << "," << s.end << "," << mode_name(s.mode)
            << ",dir_deg=" << s.dir_rad * 180.0 / kPi << ",speed=" << s.speed
            << ",jitter=" << s.jitter_scale;
        if (s.mode == BehaviourMode::Panic) out << ",multiplier=" << s.multiplier;
        if (s.mode == BehaviourMode::Mill) out << ",angle_deg=" << s.angle_rad * 180.0 / kPi;
        if (s.mode == BehaviourMode::ViolentMix)
            out << ",mix=" << s.mix_fraction << ",angle_deg=" << s.angle_rad * 180.0 / kPi;
        if (s.truth_label >= 0) out << ",label=" << s.truth_label;
        out << "\n";
    }
}

Simulation simulate(const ScenarioSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const int n = spec.agents;
    const int frames = spec.frame_count();

    // motion domain: centered sub-rectangle, wrap-around at its borders
    double margin = spec.radius + 2.0;
    double x0 = (spec.width - spec.spread * spec.width) / 2.0 + margin;
    double x1 = spec.width - x0;
    double y0 = (spec.height - spec.spread * spec.height) / 2.0 + margin;
    double y1 = spec.height - y0;
    double lx = std::max(x1 - x0, 1.0), ly = std::max(y1 - y0, 1.0);

    std::vector<Vec2> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = {rng.uniform(x0, x1), rng.uniform(y0, y1)};

    Simulation sim;
    sim.truth.labels.assign(frames, 0);
    sim.positions.assign(frames, {});
    sim.velocities.assign(frames, {});
    std::vector<TrajectorySpan> open(n);
    for (int i = 0; i < n; ++i) {
        open[i].agent = i;
        open[i].start_frame = 0;
    }

    size_t seg_idx = 0;
    size_t last_seg = static_cast<size_t>(-1);
    std::vector<double> escape(n, 0.0);
    for (int f = 0; f < frames; ++f) {
        while (spec.timeline[seg_idx].end < f) ++seg_idx;
        const Segment& seg = spec.timeline[seg_idx];
        bool peaceful = seg.mode == BehaviourMode::CoherentFlow || seg.mode == BehaviourMode::Mill;
        sim.truth.labels[f] = seg.truth_label >= 0 ? static_cast<uint8_t>(seg.truth_label)
                                                   : (peaceful ? 0 : 1);

        if (seg_idx != last_seg) {
            last_seg = seg_idx;
            if (seg.mode == BehaviourMode::Mill) {
                // steady per-agent headings within +/- angle_rad of the base
                for (int i = 0; i < n; ++i)
                    escape[i] = seg.dir_rad + rng.uniform(-seg.angle_rad, seg.angle_rad);
            }
            if (seg.mode == BehaviourMode::Panic && n > 0) {
                // escape headings are fixed at panic onset: radial from the
                // centroid at that moment, so dispersal survives domain wraps
                Vec2 centroid{0, 0};
                for (const Vec2& p : pos) {
                    centroid.x += p.x;
                    centroid.y += p.y;
                }
                centroid.x /= n;
                centroid.y /= n;
                for (int i = 0; i < n; ++i) {
                    double dx = pos[i].x - centroid.x, dy = pos[i].y - centroid.y;
                    escape[i] = std::hypot(dx, dy) > 1e-9 ? std::atan2(dy, dx)
                                                          : rng.uniform(0.0, 2.0 * kPi);
                    escape[i] += rng.gauss(0.0, 0.3);
                }
            }
        }
        int group_a = static_cast<int>(std::lround(seg.mix_fraction * n));

        sim.positions[f] = pos;
        sim.velocities[f].resize(n);
        for (int i = 0; i < n; ++i) {
            Vec2 v;
            double jitter = spec.noise * seg.jitter_scale;
            switch (seg.mode) {
                case BehaviourMode::CoherentFlow:
                    v = {seg.speed * std::cos(seg.dir_rad), seg.speed * std::sin(seg.dir_rad)};
                    break;
                case BehaviourMode::Mill:
                    v = {seg.speed * std::cos(escape[i]), seg.speed * std::sin(escape[i])};
                    break;
                case BehaviourMode::Panic: {
                    double ang = escape[i] + rng.gauss(0.0, 0.1);
                    double s = seg.speed * seg.multiplier;
                    v = {s * std::cos(ang), s * std::sin(ang)};
                    break;
                }
                case BehaviourMode::ViolentMix: {
                    double ang = i < group_a ? seg.dir_rad : seg.dir_rad + seg.angle_rad;
                    v = {seg.speed * std::cos(ang), seg.speed * std::sin(ang)};
                    break;
                }
            }
            v.x += rng.gauss(0.0, jitter);
            v.y += rng.gauss(0.0, jitter);
            sim.velocities[f][i] = v;

            open[i].positions.push_back(pos[i]);

            Vec2 np{pos[i].x + v.x, pos[i].y + v.y};
            bool wrapped = false;
            auto wrap = [&](double p, double lo, double len) {
                double r = std::fmod(p - lo, len);
                if (r < 0) r += len;
                return lo + r;
            };
            if (np.x < x0 || np.x >= x1) {
                np.x = wrap(np.x, x0, lx);
                wrapped = true;
            }
            if (np.y < y0 || np.y >= y1) {
                np.y = wrap(np.y, y0, ly);
                wrapped = true;
            }
            if (wrapped) {
                // break the trajectory span; a wrap is a re-entry, not motion
                sim.spans.push_back(std::move(open[i]));
                open[i] = TrajectorySpan{};
                open[i].agent = i;
                open[i].start_frame = f + 1;
            }
            pos[i] = np;
        }
    }
    for (int i = 0; i < n; ++i)
        if (!open[i].positions.empty()) sim.spans.push_back(std::move(open[i]));
    return sim;
}

namespace {

uint32_t hash2d(uint32_t x, uint32_t y, uint32_t seed) {
    uint32_t h = x * 0x8da6b343u + y * 0xd8163841u + seed * 0xcb1ab31fu;
    h ^= h >> 13;
    h *= 0x7feb352du;
    h ^= h >> 15;
    return h;
}

Image32f make_background(int w, int h, uint32_t seed) {
    Image32f noise = Image32f::blank(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            noise.at(x, y) = static_cast<float>(hash2d(x, y, seed) & 0xff) / 255.0f;
    // two box-blur passes to soften the speckle
    for (int pass = 0; pass < 2; ++pass) {
        Image32f tmp = noise;
        for (int y = 1; y < h - 1; ++y)
            for (int x = 1; x < w - 1; ++x) {
                float s = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) s += tmp.at(x + dx, y + dy);
                noise.at(x, y) = s / 9.0f;
            }
    }
    Image32f bg = Image32f::blank(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) bg.at(x, y) = 55.0f + 30.0f * noise.at(x, y);
    return bg;
}

// Per-agent rigid texture tile: bright core plus fixed speckle so the disc
// carries corners. Sampled bilinearly for sub-pixel motion.
Image32f make_agent_tile(double radius, uint32_t agent_seed) {
    int half = static_cast<int>(std::ceil(radius)) + 2;
    int size = 2 * half + 1;
    Image32f tile = Image32f::blank(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            double dx = x - half, dy = y - half;
            double r = std::hypot(dx, dy);
            double alpha = std::clamp((radius - r) / 1.5, 0.0, 1.0);
            double speckle =
                (static_cast<double>(hash2d(x, y, agent_seed) & 0xff) / 255.0 - 0.5) * 110.0;
            double base = 115.0 + static_cast<double>(hash2d(7, 11, agent_seed) % 40);
            tile.at(x, y) = static_cast<float>(alpha * (base + speckle));
        }
    }
    return tile;
}

}  // namespace

std::vector<Frame> render(const Simulation& sim, const ScenarioSpec& spec) {
    const int w = spec.width, h = spec.height;
    Image32f bg = make_background(w, h, static_cast<uint32_t>(spec.seed));
    std::vector<Image32f> tiles;
    for (int i = 0; i < spec.agents; ++i)
        tiles.push_back(make_agent_tile(spec.radius, static_cast<uint32_t>(spec.seed * 31 + i)));

    int half = spec.agents > 0 ? (tiles[0].width - 1) / 2 : 0;
    std::vector<Frame> frames;
    frames.reserve(sim.positions.size());
    for (size_t f = 0; f < sim.positions.size(); ++f) {
        Frame frame = Frame::blank(static_cast<int>(f), w, h);
        for (size_t i = 0; i < frame.pixels.size(); ++i)
            frame.pixels[i] = static_cast<uint8_t>(std::clamp(bg.px[i], 0.0f, 255.0f));
        for (int i = 0; i < spec.agents; ++i) {
            const Vec2& p = sim.positions[f][i];
            int xlo = std::max(static_cast<int>(std::floor(p.x)) - half, 0);
            int xhi = std::min(static_cast<int>(std::ceil(p.x)) + half, w - 1);
            int ylo = std::max(static_cast<int>(std::floor(p.y)) - half, 0);
            int yhi = std::min(static_cast<int>(std::ceil(p.y)) + half, h - 1);
            for (int y = ylo; y <= yhi; ++y) {
                for (int x = xlo; x <= xhi; ++x) {
                    float add = tiles[i].sample(x - p.x + half, y - p.y + half);
                    if (add <= 0.5f) continue;
                    float v = frame.at(x, y) + add;
                    frame.at(x, y) = static_cast<uint8_t>(std::clamp(v, 0.0f, 255.0f));
                }
            }
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

void render_y4m(const Simulation& sim, const ScenarioSpec& spec, const fs::path& path) {
    auto frames = render(sim, spec);
    Y4mWriter writer(path, spec.width, spec.height);
    for (const Frame& f : frames) writer.write(f);
}

std::vector<Tracklet> export_tracklets(const Simulation& sim, int reseed_interval, int min_len,
                                       double static_std_threshold) {
    std::vector<Tracklet> out;
    int64_t next_id = 0;
    for (const TrajectorySpan& span : sim.spans) {
        int f = span.start_frame;
        size_t i = 0;
        while (i < span.positions.size()) {
            // window boundary at the next multiple of reseed_interval
            int boundary = ((f / reseed_interval) + 1) * reseed_interval;
            size_t len = std::min(span.positions.size() - i, static_cast<size_t>(boundary - f));
            Tracklet t;
            t.id = next_id;
            t.birth_frame = f;
            t.positions.assign(span.positions.begin() + static_cast<long>(i),
                               span.positions.begin() + static_cast<long>(i + len));
            t.alive = false;
            if (noise_filter_keep(t, min_len, static_std_threshold)) {
                ++next_id;
                out.push_back(std::move(t));
            }
            i += len;
            f += static_cast<int>(len);
        }
    }
    return out;
}

void write_labels(const GroundTruth& truth, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    for (uint8_t l : truth.labels) out << static_cast<int>(l) << "\n";
}

std::vector<uint8_t> read_labels(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open labels " + path.string());
    std::vector<uint8_t> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        labels.push_back(line[0] == '1' ? 1 : 0);
    }
    return labels;
}

}  // namespace crowd
