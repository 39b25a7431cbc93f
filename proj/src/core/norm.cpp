#include <algorithm>
#include <cmath>

#include "core/models.hpp"

namespace crowd {

std::vector<double> NormStats::transform(const std::vector<double>& v) const {
    if (static_cast<int>(v.size()) != dim)
        throw data_error("normalization: expected " + std::to_string(dim) + "-d point, got " +
                         std::to_string(v.size()) + "-d");
    std::vector<double> out(v.size());
    for (int i = 0; i < dim; ++i) {
        double range = max[i] - min[i];
        double s = range > 0 ? (v[i] - min[i]) / range : 0.5;  // zero-range feature pins to 0.5
        out[i] = std::clamp(s, 0.0, 1.0) / max_norm;
    }
    return out;
}

NormStats fit_norm(const std::vector<std::vector<double>>& train) {
    if (train.size() < 2) throw data_error("normalization requires at least 2 training vectors");
    NormStats ns;
    ns.dim = static_cast<int>(train[0].size());
    ns.min.assign(ns.dim, 0.0);
    ns.max.assign(ns.dim, 0.0);
    for (int i = 0; i < ns.dim; ++i) {
        ns.min[i] = ns.max[i] = train[0][i];
    }
    for (const auto& v : train) {
        if (static_cast<int>(v.size()) != ns.dim)
            throw data_error("normalization: inconsistent training dimensionality");
        for (int i = 0; i < ns.dim; ++i) {
            ns.min[i] = std::min(ns.min[i], v[i]);
            ns.max[i] = std::max(ns.max[i], v[i]);
        }
    }
    double max_norm = 0.0;
    for (const auto& v : train) {
        double mag = 0.0;
        for (int i = 0; i < ns.dim; ++i) {
            double range = ns.max[i] - ns.min[i];
            double s = range > 0 ? (v[i] - ns.min[i]) / range : 0.5;
            mag += s * s;
        }
        max_norm = std::max(max_norm, std::sqrt(mag));
    }
    ns.max_norm = max_norm > 0 ? max_norm : 1.0;
    return ns;
}

std::vector<std::vector<double>> feature_points(const std::vector<FeatureVector>& frames,
                                                int exclude_feature) {
    std::vector<std::vector<double>> out;
    for (const FeatureVector& f : frames) {
        if (!f.valid) continue;
        std::vector<double> p;
        p.reserve(exclude_feature >= 0 ? 3 : 4);
        for (int i = 0; i < 4; ++i)
            if (i != exclude_feature) p.push_back(f.values[i]);
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace crowd
