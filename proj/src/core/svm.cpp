#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/models.hpp"

namespace crowd {

double rbf_kernel(const std::vector<double>& a, const std::vector<double>& b, double gamma) {
    double d2 = 0;
    for (size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
    return std::exp(-gamma * d2);
}

namespace {

// Platt-style SMO solver state. Decision function f(x) = sum a_i y_i K(x_i,x) + b.
struct Smo {
    const std::vector<std::vector<double>>& x;
    const std::vector<int>& y;
    double c, gamma, tol;
    int n;
    std::vector<double> alpha, err;  // err[i] = f(x_i) - y_i
    double b = 0;
    Rng rng;

    Smo(const std::vector<std::vector<double>>& x_, const std::vector<int>& y_, double c_,
        double gamma_, double tol_, uint64_t seed)
        : x(x_), y(y_), c(c_), gamma(gamma_), tol(tol_), n(static_cast<int>(x_.size())),
          alpha(n, 0.0), err(n), rng(seed) {
        for (int i = 0; i < n; ++i) err[i] = -y[i];  // f = 0 initially
    }

    double k(int i, int j) const { return rbf_kernel(x[i], x[j], gamma); }

    bool take_step(int i1, int i2) {
        if (i1 == i2) return false;
        double a1 = alpha[i1], a2 = alpha[i2];
        int y1 = y[i1], y2 = y[i2];
        double e1 = err[i1], e2 = err[i2];
        double s = y1 * y2;
        double lo, hi;
        if (y1 != y2) {
            lo = std::max(0.0, a2 - a1);
            hi = std::min(c, c + a2 - a1);
        } else {
            lo = std::max(0.0, a1 + a2 - c);
            hi = std::min(c, a1 + a2);
        }
        if (lo >= hi) return false;
        double k11 = k(i1, i1), k12 = k(i1, i2), k22 = k(i2, i2);
        double eta = k11 + k22 - 2 * k12;
        // eta = ||phi(x1) - phi(x2)||^2 >= 0 for the RBF kernel; zero means
        // coincident points, where no progress is possible along this pair
        if (eta <= 0) return false;
        double a2new = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
        if (std::abs(a2new - a2) < 1e-12 * (a2new + a2 + 1e-12)) return false;
        double a1new = a1 + s * (a2 - a2new);

        double b1 = b - e1 - y1 * (a1new - a1) * k11 - y2 * (a2new - a2) * k12;
        double b2 = b - e2 - y1 * (a1new - a1) * k12 - y2 * (a2new - a2) * k22;
        double bnew;
        if (a1new > 0 && a1new < c) bnew = b1;
        else if (a2new > 0 && a2new < c) bnew = b2;
        else bnew = 0.5 * (b1 + b2);

        double d1 = y1 * (a1new - a1), d2 = y2 * (a2new - a2), db = bnew - b;
        for (int i = 0; i < n; ++i) err[i] += d1 * k(i1, i) + d2 * k(i2, i) + db;
        alpha[i1] = a1new;
        alpha[i2] = a2new;
        b = bnew;
        return true;
    }

    bool examine(int i2) {
        double e2 = err[i2];
        double r2 = e2 * y[i2];
        bool violates = (r2 < -tol && alpha[i2] < c) || (r2 > tol && alpha[i2] > 0);
        if (!violates) return false;

        // second-choice heuristic: maximize |E1 - E2| among non-bound points
        int best = -1;
        double best_gap = 0;
        for (int i = 0; i < n; ++i) {
            if (alpha[i] <= 0 || alpha[i] >= c) continue;
            double gap = std::abs(err[i] - e2);
            if (gap > best_gap) {
                best_gap = gap;
                best = i;
            }
        }
        if (best >= 0 && take_step(best, i2)) return true;

        int start = static_cast<int>(rng.uniform_index(n));
        for (int d = 0; d < n; ++d) {
            int i = (start + d) % n;
            if (alpha[i] > 0 && alpha[i] < c && take_step(i, i2)) return true;
        }
        start = static_cast<int>(rng.uniform_index(n));
        for (int d = 0; d < n; ++d) {
            int i = (start + d) % n;
            if (take_step(i, i2)) return true;
        }
        return false;
    }

    void solve(int max_passes) {
        int changed = 0;
        bool examine_all = true;
        int pass = 0;
        while ((changed > 0 || examine_all) && pass < max_passes) {
            changed = 0;
            if (examine_all) {
                for (int i = 0; i < n; ++i) changed += examine(i) ? 1 : 0;
            } else {
                for (int i = 0; i < n; ++i)
                    if (alpha[i] > 0 && alpha[i] < c) changed += examine(i) ? 1 : 0;
            }
            if (examine_all) examine_all = false;
            else if (changed == 0) examine_all = true;
            ++pass;
        }
    }
};

}  // namespace

SvmModel fit_svm(const std::vector<std::vector<double>>& points, const std::vector<int>& labels,
                 const SvmFitOptions& opts) {
    const int n = static_cast<int>(points.size());
    if (n < 2 || labels.size() != points.size())
        throw data_error("fit_svm: need matched points and labels");
    bool has_pos = false, has_neg = false;
    for (int y : labels) {
        if (y == 1) has_pos = true;
        else if (y == -1) has_neg = true;
        else throw data_error("fit_svm: labels must be +1 or -1");
    }
    if (!has_pos || !has_neg) throw data_error("fit_svm: both classes must be present");
    if (opts.c <= 0) throw usage_error("fit_svm: C must be positive");

    const int d = static_cast<int>(points[0].size());
    double gamma = opts.gamma;
    if (gamma <= 0) {
        // variance-scaled default: 1 / (4 * mean per-coordinate variance)
        std::vector<double> mean(d, 0);
        for (const auto& p : points)
            for (int i = 0; i < d; ++i) mean[i] += p[i];
        for (int i = 0; i < d; ++i) mean[i] /= n;
        double var = 0;
        for (const auto& p : points)
            for (int i = 0; i < d; ++i) var += (p[i] - mean[i]) * (p[i] - mean[i]);
        var /= static_cast<double>(n) * d;
        gamma = var > 0 ? 1.0 / (4.0 * var) : 1.0;
    }

    Smo smo(points, labels, opts.c, gamma, opts.kkt_tolerance, opts.seed ^ 0x9e3779b97f4a7c15ull);
    smo.solve(opts.max_passes);

    SvmModel model;
    model.dim = d;
    model.gamma = gamma;
    model.c = opts.c;
    model.bias = smo.b;
    for (int i = 0; i < n; ++i) {
        if (smo.alpha[i] > 1e-12) {
            model.support_vectors.push_back(points[i]);
            model.dual_coef.push_back(smo.alpha[i] * labels[i]);
        }
    }
    return model;
}

double svm_decision(const SvmModel& model, const std::vector<double>& point) {
    if (static_cast<int>(point.size()) != model.dim)
        throw data_error("svm_decision: expected " + std::to_string(model.dim) + "-d point");
    double f = model.bias;
    for (size_t i = 0; i < model.support_vectors.size(); ++i)
        f += model.dual_coef[i] * rbf_kernel(model.support_vectors[i], point, model.gamma);
    return f;
}

Label svm_classify_frame(const SvmModel& model, const std::vector<double>& point) {
    return svm_decision(model, point) > 0 ? Label::Abnormal : Label::Normal;
}

Label svm_classify_clip(const SvmModel& model, const std::vector<std::vector<double>>& points,
                        size_t invalid_frames) {
    size_t abnormal = 0;
    for (const auto& p : points)
        if (svm_classify_frame(model, p) == Label::Abnormal) ++abnormal;
    size_t total = points.size() + invalid_frames;  // invalid frames vote normal
    if (total == 0) return Label::Normal;
    size_t normal = total - abnormal;
    if (abnormal == normal) return Label::Abnormal;  // conservative tie rule
    return abnormal > normal ? Label::Abnormal : Label::Normal;
}

}  // namespace crowd
