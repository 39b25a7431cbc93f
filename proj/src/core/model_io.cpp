#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/models.hpp"

namespace crowd {

namespace {

constexpr const char* kMagic = "canomaly-model";
constexpr int kVersion = 1;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_vector(std::ostream& out, const std::string& key, const std::vector<double>& v) {
    out << key;
    for (double x : v) out << " " << fmt(x);
    out << "\n";
}

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path), in_(path) {
        if (!in_) throw data_error("cannot open model " + path.string());
    }

    // next non-empty line split into key + raw remainder
    std::pair<std::string, std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            if (line.empty()) continue;
            auto sp = line.find(' ');
            if (sp == std::string::npos) return {line, ""};
            return {line.substr(0, sp), line.substr(sp + 1)};
        }
        throw data_error(path_.string() + ": truncated model file");
    }

    std::pair<std::string, std::string> expect(const std::string& key) {
        auto kv = next();
        if (kv.first != key)
            throw data_error(path_.string() + ": expected '" + key + "', got '" + kv.first + "'");
        return kv;
    }

    std::vector<double> expect_vector(const std::string& key, size_t count) {
        auto [k, rest] = expect(key);
        std::istringstream rs(rest);
        std::vector<double> v(count);
        for (size_t i = 0; i < count; ++i)
            if (!(rs >> v[i]))
                throw data_error(path_.string() + ": short vector for '" + key + "'");
        return v;
    }

    double expect_double(const std::string& key) { return expect_vector(key, 1)[0]; }
    long expect_long(const std::string& key) {
        auto [k, rest] = expect(key);
        return std::stol(rest);
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
};

void write_norm(std::ostream& out, const NormStats& norm) {
    out << "norm.dim " << norm.dim << "\n";
    write_vector(out, "norm.min", norm.min);
    write_vector(out, "norm.max", norm.max);
    out << "norm.max_norm " << fmt(norm.max_norm) << "\n";
}

NormStats read_norm(Reader& r) {
    NormStats ns;
    ns.dim = static_cast<int>(r.expect_long("norm.dim"));
    ns.min = r.expect_vector("norm.min", ns.dim);
    ns.max = r.expect_vector("norm.max", ns.dim);
    ns.max_norm = r.expect_double("norm.max_norm");
    return ns;
}

void check_header(Reader& r, const std::string& kind) {
    auto [magic, version] = r.next();
    if (magic != kMagic) throw data_error("not a model file");
    if (std::stoi(version.substr(1)) != kVersion)
        throw data_error("unsupported model version " + version);
    auto [k, v] = r.expect("kind");
    if (v != kind) throw data_error("model kind mismatch: expected " + kind + ", found " + v);
}

}  // namespace

void save_gmm(const GmmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << kMagic << " v" << kVersion << "\n";
    out << "kind gmm\n";
    out << "dim " << model.dim << "\n";
    out << "excluded_feature " << model.excluded_feature << "\n";
    write_norm(out, model.norm);
    out << "bic_table " << model.bic_table.size();
    for (const auto& [m, bic] : model.bic_table) out << " " << m << " " << fmt(bic);
    out << "\n";
    out << "threshold " << fmt(model.log_prob_threshold) << "\n";
    out << "bins " << model.bins << " " << fmt(model.bin_min) << " " << fmt(model.bin_width)
        << "\n";
    out << "components " << model.components.size() << "\n";
    for (const auto& c : model.components) {
        out << "weight " << fmt(c.weight) << "\n";
        write_vector(out, "mean", c.mean);
        write_vector(out, "cov", c.cov);
    }
}

GmmModel load_gmm(const std::filesystem::path& path) {
    Reader r(path);
    check_header(r, "gmm");
    GmmModel model;
    model.dim = static_cast<int>(r.expect_long("dim"));
    model.excluded_feature = static_cast<int>(r.expect_long("excluded_feature"));
    model.norm = read_norm(r);
    {
        auto [k, rest] = r.expect("bic_table");
        std::istringstream rs(rest);
        size_t count;
        rs >> count;
        for (size_t i = 0; i < count; ++i) {
            int m;
            double bic;
            if (!(rs >> m >> bic)) throw data_error(path.string() + ": short bic_table");
            model.bic_table.push_back({m, bic});
        }
    }
    model.log_prob_threshold = r.expect_double("threshold");
    {
        auto [k, rest] = r.expect("bins");
        std::istringstream rs(rest);
        if (!(rs >> model.bins >> model.bin_min >> model.bin_width))
            throw data_error(path.string() + ": bad bins record");
    }
    size_t ncomp = static_cast<size_t>(r.expect_long("components"));
    for (size_t i = 0; i < ncomp; ++i) {
        GaussComponent c;
        c.weight = r.expect_double("weight");
        c.mean = r.expect_vector("mean", model.dim);
        c.cov = r.expect_vector("cov", static_cast<size_t>(model.dim) * model.dim);
        model.components.push_back(std::move(c));
    }
    // rebuild Cholesky factors
    for (auto& c : model.components) {
        c.chol = c.cov;
        int d = model.dim;
        // reuse gmm internals by probing with a log-prob call later; factor here
        std::vector<double>& m = c.chol;
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j <= i; ++j) {
                double s = m[i * d + j];
                for (int k2 = 0; k2 < j; ++k2) s -= m[i * d + k2] * m[j * d + k2];
                if (i == j) {
                    if (s <= 0) throw numeric_error(path.string() + ": stored covariance not PD");
                    m[i * d + i] = std::sqrt(s);
                } else {
                    m[i * d + j] = s / m[j * d + j];
                }
            }
            for (int j = i + 1; j < d; ++j) m[i * d + j] = 0;
        }
        c.log_det = 0;
        for (int i = 0; i < d; ++i) c.log_det += 2 * std::log(m[i * d + i]);
    }
    return model;
}

void save_svm(const SvmModel& model, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << kMagic << " v" << kVersion << "\n";
    out << "kind svm\n";
    out << "dim " << model.dim << "\n";
    out << "excluded_feature " << model.excluded_feature << "\n";
    write_norm(out, model.norm);
    out << "gamma " << fmt(model.gamma) << "\n";
    out << "c " << fmt(model.c) << "\n";
    out << "bias " << fmt(model.bias) << "\n";
    out << "support_vectors " << model.support_vectors.size() << "\n";
    for (size_t i = 0; i < model.support_vectors.size(); ++i) {
        std::vector<double> row = model.support_vectors[i];
        row.push_back(model.dual_coef[i]);
        write_vector(out, "sv", row);
    }
}

SvmModel load_svm(const std::filesystem::path& path) {
    Reader r(path);
    check_header(r, "svm");
    SvmModel model;
    model.dim = static_cast<int>(r.expect_long("dim"));
    model.excluded_feature = static_cast<int>(r.expect_long("excluded_feature"));
    model.norm = read_norm(r);
    model.gamma = r.expect_double("gamma");
    model.c = r.expect_double("c");
    model.bias = r.expect_double("bias");
    size_t nsv = static_cast<size_t>(r.expect_long("support_vectors"));
    for (size_t i = 0; i < nsv; ++i) {
        std::vector<double> row = r.expect_vector("sv", static_cast<size_t>(model.dim) + 1);
        model.dual_coef.push_back(row.back());
        row.pop_back();
        model.support_vectors.push_back(std::move(row));
    }
    return model;
}

std::string model_kind(const std::filesystem::path& path) {
    Reader r(path);
    auto [magic, version] = r.next();
    if (magic != kMagic) throw data_error(path.string() + ": not a model file");
    auto [k, v] = r.expect("kind");
    return v;
}

}  // namespace crowd
