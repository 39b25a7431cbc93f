#include "core/config.hpp"

#include <fstream>
#include <sstream>

#include "core/common.hpp"

namespace crowd {

void RunConfig::validate() const {
    auto check = [](bool ok, const std::string& what) {
        if (!ok) throw data_error("config: " + what);
    };
    check(grid_rows > 0 && grid_cols > 0, "grid dimensions must be positive");
    check(min_tracklet_len > 0, "min_tracklet_len must be positive");
    check(reseed_interval > 0, "reseed_interval must be positive");
    check(static_std_threshold > 0, "static_std_threshold must be positive");
    check(low_activity_threshold > 0, "low_activity_threshold must be positive");
    check(ema_alpha > 0 && ema_alpha <= 1, "ema_alpha must be in (0,1]");
    check(knn_k > 0, "knn_k must be positive");
    check(gmm_components_min > 0 && gmm_components_max >= gmm_components_min,
          "gmm_component_range must be a positive inclusive range");
    check(svm_c > 0, "svm_c must be positive");
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << "grid_rows=" << grid_rows << "\ngrid_cols=" << grid_cols
       << "\nmin_tracklet_len=" << min_tracklet_len << "\nreseed_interval=" << reseed_interval
       << "\nstatic_std_threshold=" << static_std_threshold
       << "\nlow_activity_threshold=" << low_activity_threshold << "\nema_alpha=" << ema_alpha
       << "\nknn_k=" << knn_k << "\ngmm_components_min=" << gmm_components_min
       << "\ngmm_components_max=" << gmm_components_max << "\nsvm_c=" << svm_c << "\n";
    return os.str();
}

uint64_t RunConfig::hash() const { return fnv1a(canonical_text()); }

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw data_error("config: unparsable integer for " + key + ": '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw data_error("config: unparsable value for " + key + ": '" + v + "'");
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw data_error("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "grid_rows") cfg.grid_rows = parse_int(key, val);
        else if (key == "grid_cols") cfg.grid_cols = parse_int(key, val);
        else if (key == "min_tracklet_len") cfg.min_tracklet_len = parse_int(key, val);
        else if (key == "reseed_interval") cfg.reseed_interval = parse_int(key, val);
        else if (key == "static_std_threshold") cfg.static_std_threshold = parse_double(key, val);
        else if (key == "low_activity_threshold") cfg.low_activity_threshold = parse_int(key, val);
        else if (key == "ema_alpha") cfg.ema_alpha = parse_double(key, val);
        else if (key == "knn_k") cfg.knn_k = parse_int(key, val);
        else if (key == "gmm_components_min") cfg.gmm_components_min = parse_int(key, val);
        else if (key == "gmm_components_max") cfg.gmm_components_max = parse_int(key, val);
        else if (key == "svm_c") cfg.svm_c = parse_double(key, val);
        else throw data_error("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open config " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace crowd
