#include "core/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace crowd {

int feature_index(const std::string& name) {
    for (size_t i = 0; i < kFeatureNames.size(); ++i)
        if (name == kFeatureNames[i]) return static_cast<int>(i);
    throw usage_error("unknown feature name: " + name);
}

NeighborGraph build_knn(const std::vector<TrackPoint>& points, int k) {
    const int n = static_cast<int>(points.size());
    NeighborGraph g;
    g.n = n;
    g.k = k;
    g.neighbors.resize(n);
    std::vector<std::pair<double, int>> dists;
    for (int i = 0; i < n; ++i) {
        dists.clear();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double dx = points[i].pos.x - points[j].pos.x;
            double dy = points[i].pos.y - points[j].pos.y;
            dists.push_back({dx * dx + dy * dy, j});
        }
        int kk = std::min<int>(k, static_cast<int>(dists.size()));
        std::partial_sort(dists.begin(), dists.begin() + kk, dists.end());
        g.neighbors[i].reserve(kk);
        for (int m = 0; m < kk; ++m) g.neighbors[i].push_back(dists[m].second);
    }
    return g;
}

namespace {

double velocity_cosine(const TrackPoint& a, const TrackPoint& b) {
    double na = std::hypot(a.vel.x, a.vel.y);
    double nb = std::hypot(b.vel.x, b.vel.y);
    if (na == 0.0 || nb == 0.0) return 0.0;  // zero-velocity convention
    return (a.vel.x * b.vel.x + a.vel.y * b.vel.y) / (na * nb);
}

}  // namespace

double collectiveness(const std::vector<TrackPoint>& points, const NeighborGraph& graph) {
    const int n = graph.n;
    if (n == 0) return 0.0;
    std::vector<double> col(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j : graph.neighbors[i]) col[j] += std::max(0.0, velocity_cosine(points[i], points[j]));
    double total = 0.0;
    for (double c : col) total += c;
    return total / n;
}

double conflict(const std::vector<TrackPoint>& points, const NeighborGraph& graph) {
    size_t edges = 0;
    double total = 0.0;
    for (int i = 0; i < graph.n; ++i) {
        for (int j : graph.neighbors[i]) {
            total += (1.0 - velocity_cosine(points[i], points[j])) / 2.0;
            ++edges;
        }
    }
    return edges == 0 ? 0.0 : total / static_cast<double>(edges);
}

double density(const std::vector<TrackPoint>& points, int grid_rows, int grid_cols,
               int frame_width, int frame_height) {
    std::vector<uint8_t> occupied(static_cast<size_t>(grid_rows) * grid_cols, 0);
    for (const TrackPoint& p : points) {
        int cx = std::clamp(static_cast<int>(p.pos.x * grid_cols / frame_width), 0, grid_cols - 1);
        int cy = std::clamp(static_cast<int>(p.pos.y * grid_rows / frame_height), 0, grid_rows - 1);
        occupied[static_cast<size_t>(cy) * grid_cols + cx] = 1;
    }
    size_t count = std::count(occupied.begin(), occupied.end(), uint8_t{1});
    return static_cast<double>(count) / (static_cast<double>(grid_rows) * grid_cols);
}

double mean_speed(const std::vector<TrackPoint>& points) {
    if (points.empty()) return 0.0;
    double total = 0.0;
    for (const TrackPoint& p : points) total += std::hypot(p.vel.x, p.vel.y);
    return total / static_cast<double>(points.size());
}

std::array<double, 4> EmaState::update(const std::array<double, 4>& raw, double alpha) {
    if (!initialized) {
        smoothed = raw;
        initialized = true;
    } else {
        for (int i = 0; i < 4; ++i) smoothed[i] = alpha * raw[i] + (1.0 - alpha) * smoothed[i];
    }
    return smoothed;
}

FeatureVector FeatureExtractor::compute(const FrameTrackState& state) {
    FeatureVector fv;
    fv.frame = state.frame;
    if (static_cast<int>(state.points.size()) < cfg_.low_activity_threshold) {
        fv.valid = false;  // low-activity gate; EMA untouched
        return fv;
    }
    NeighborGraph graph = build_knn(state.points, cfg_.knn_k);
    std::array<double, 4> raw = {
        collectiveness(state.points, graph),
        conflict(state.points, graph),
        density(state.points, cfg_.grid_rows, cfg_.grid_cols, width_, height_),
        mean_speed(state.points),
    };
    fv.values = ema_.update(raw, cfg_.ema_alpha);
    fv.valid = true;
    return fv;
}

namespace {

std::string meta_line(const CsvMeta& meta) {
    std::ostringstream os;
    os << "# " << meta.tool << " v" << meta.version << " seed=" << meta.seed
       << " config_hash=" << meta.config_hash;
    return os.str();
}

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_features_csv(const std::filesystem::path& path, const std::vector<FeatureVector>& rows,
                        const CsvMeta& meta) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << meta_line(meta) << "\n";
    out << "frame,valid,collectiveness,conflict,density,mean_speed\n";
    for (const FeatureVector& f : rows) {
        out << f.frame << "," << (f.valid ? 1 : 0);
        for (double v : f.values) out << "," << fmt_double(f.valid ? v : 0.0);
        out << "\n";
    }
}

std::vector<FeatureVector> read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path.string());
    std::vector<FeatureVector> rows;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            if (line.rfind("frame,valid,", 0) != 0)
                throw data_error(path.string() + ": bad feature CSV header");
            header_seen = true;
            continue;
        }
        std::istringstream ls(line);
        std::string cell;
        FeatureVector f;
        try {
            std::getline(ls, cell, ',');
            f.frame = std::stoi(cell);
            std::getline(ls, cell, ',');
            f.valid = std::stoi(cell) != 0;
            for (int i = 0; i < 4; ++i) {
                if (!std::getline(ls, cell, ','))
                    throw data_error("short row");
                f.values[i] = std::stod(cell);
            }
        } catch (const std::exception&) {
            throw data_error(path.string() + ": bad feature CSV row at line " +
                             std::to_string(lineno));
        }
        rows.push_back(f);
    }
    if (!header_seen) throw data_error(path.string() + ": empty feature CSV");
    return rows;
}

void write_tracklets(const std::filesystem::path& path, const std::vector<Tracklet>& tracklets,
                     const CsvMeta& meta) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << meta_line(meta) << "\n";
    for (const Tracklet& t : tracklets) {
        nlohmann::json rec;
        rec["id"] = t.id;
        rec["birth_frame"] = t.birth_frame;
        nlohmann::json pos = nlohmann::json::array();
        for (const Vec2& p : t.positions) pos.push_back({p.x, p.y});
        rec["positions"] = std::move(pos);
        nlohmann::json vel = nlohmann::json::array();
        for (const Vec2& v : t.velocities()) vel.push_back({v.x, v.y});
        rec["velocities"] = std::move(vel);
        out << rec.dump() << "\n";
    }
}

std::vector<Tracklet> read_tracklets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path.string());
    std::vector<Tracklet> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw data_error(path.string() + ": bad tracklet record at line " +
                             std::to_string(lineno));
        }
        Tracklet t;
        t.id = rec.at("id").get<int64_t>();
        t.birth_frame = rec.at("birth_frame").get<int>();
        for (const auto& p : rec.at("positions"))
            t.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        t.alive = false;
        out.push_back(std::move(t));
    }
    return out;
}

std::vector<FrameTrackState> track_states_from_tracklets(const std::vector<Tracklet>& tracklets) {
    int first = 0, last = -1;
    for (const Tracklet& t : tracklets) {
        if (last < 0) first = t.birth_frame;
        first = std::min(first, t.birth_frame);
        last = std::max(last, t.birth_frame + t.length() - 1);
    }
    std::vector<FrameTrackState> states;
    if (last < first) return states;
    states.resize(static_cast<size_t>(last - first + 1));
    for (int f = first; f <= last; ++f) states[static_cast<size_t>(f - first)].frame = f;
    for (const Tracklet& t : tracklets) {
        for (int i = 1; i < t.length(); ++i) {
            int f = t.birth_frame + i;
            const Vec2& p = t.positions[static_cast<size_t>(i)];
            const Vec2& q = t.positions[static_cast<size_t>(i - 1)];
            states[static_cast<size_t>(f - first)].points.push_back(
                {t.id, p, {p.x - q.x, p.y - q.y}});
        }
    }
    return states;
}

}  // namespace crowd
