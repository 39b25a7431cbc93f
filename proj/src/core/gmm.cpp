#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "core/models.hpp"

namespace crowd {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

// in-place lower Cholesky; returns false if the matrix is not positive definite
bool cholesky(std::vector<double>& m, int d) {
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m[i * d + j];
            for (int k = 0; k < j; ++k) s -= m[i * d + k] * m[j * d + k];
            if (i == j) {
                if (s <= 0) return false;
                m[i * d + i] = std::sqrt(s);
            } else {
                m[i * d + j] = s / m[j * d + j];
            }
        }
        for (int j = i + 1; j < d; ++j) m[i * d + j] = 0;
    }
    return true;
}

double log_det_from_chol(const std::vector<double>& chol, int d) {
    double s = 0;
    for (int i = 0; i < d; ++i) s += std::log(chol[i * d + i]);
    return 2 * s;
}

// log N(x; mu, Sigma) via forward substitution against the Cholesky factor
double log_gaussian(const GaussComponent& c, const std::vector<double>& x, int d,
                    std::vector<double>& z) {
    z.resize(d);
    for (int i = 0; i < d; ++i) {
        double s = x[i] - c.mean[i];
        for (int k = 0; k < i; ++k) s -= c.chol[i * d + k] * z[k];
        z[i] = s / c.chol[i * d + i];
    }
    double quad = 0;
    for (int i = 0; i < d; ++i) quad += z[i] * z[i];
    return -0.5 * (d * kLog2Pi + c.log_det + quad);
}

double logsumexp(const std::vector<double>& v) {
    double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

struct EmResult {
    std::vector<GaussComponent> components;
    double loglik = -std::numeric_limits<double>::infinity();
    std::vector<double> history;
    bool ok = false;
};

// k-means++ seeding followed by a few Lloyd iterations
std::vector<int> kmeans_assign(const std::vector<std::vector<double>>& x, int m, Rng& rng) {
    const int n = static_cast<int>(x.size());
    const int d = static_cast<int>(x[0].size());
    std::vector<std::vector<double>> centers;
    centers.push_back(x[rng.uniform_index(n)]);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    auto dist2 = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (int i = 0; i < d; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return s;
    };
    while (static_cast<int>(centers.size()) < m) {
        double total = 0;
        for (int i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], dist2(x[i], centers.back()));
            total += d2[i];
        }
        if (total <= 0) {
            centers.push_back(x[rng.uniform_index(n)]);
            continue;
        }
        double r = rng.uniform() * total;
        int pick = n - 1;
        double acc = 0;
        for (int i = 0; i < n; ++i) {
            acc += d2[i];
            if (acc >= r) {
                pick = i;
                break;
            }
        }
        centers.push_back(x[pick]);
    }
    std::vector<int> assign(n, 0);
    for (int iter = 0; iter < 10; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < m; ++c) {
                double dd = dist2(x[i], centers[c]);
                if (dd < bd) {
                    bd = dd;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        for (int c = 0; c < m; ++c) {
            std::vector<double> mean(d, 0);
            int count = 0;
            for (int i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                for (int k = 0; k < d; ++k) mean[k] += x[i][k];
                ++count;
            }
            if (count > 0) {
                for (int k = 0; k < d; ++k) centers[c][k] = mean[k] / count;
            }
        }
    }
    return assign;
}

bool finalize_component(GaussComponent& c, int d, double reg) {
    // collapse check before regularization
    double max_diag = 0;
    for (int i = 0; i < d; ++i) max_diag = std::max(max_diag, c.cov[i * d + i]);
    if (max_diag < 1e-12) return false;
    for (int i = 0; i < d; ++i) c.cov[i * d + i] += reg;
    c.chol = c.cov;
    if (!cholesky(c.chol, d)) return false;
    c.log_det = log_det_from_chol(c.chol, d);
    return true;
}

EmResult run_em(const std::vector<std::vector<double>>& x, int m, const GmmFitOptions& opts,
                Rng& rng) {
    const int n = static_cast<int>(x.size());
    const int d = static_cast<int>(x[0].size());
    EmResult res;

    std::vector<int> assign = kmeans_assign(x, m, rng);
    std::vector<GaussComponent> comps(m);
    for (int c = 0; c < m; ++c) {
        auto& gc = comps[c];
        gc.mean.assign(d, 0);
        gc.cov.assign(d * d, 0);
        int count = 0;
        for (int i = 0; i < n; ++i) {
            if (assign[i] != c) continue;
            for (int k = 0; k < d; ++k) gc.mean[k] += x[i][k];
            ++count;
        }
        if (count < 2) return res;  // empty/degenerate cluster -> restart
        for (int k = 0; k < d; ++k) gc.mean[k] /= count;
        for (int i = 0; i < n; ++i) {
            if (assign[i] != c) continue;
            for (int a = 0; a < d; ++a)
                for (int b = 0; b <= a; ++b) {
                    double v = (x[i][a] - gc.mean[a]) * (x[i][b] - gc.mean[b]);
                    gc.cov[a * d + b] += v;
                    if (a != b) gc.cov[b * d + a] += v;
                }
        }
        for (int a = 0; a < d * d; ++a) gc.cov[a] /= count;
        gc.weight = static_cast<double>(count) / n;
        if (!finalize_component(gc, d, opts.cov_regularization)) return res;
    }

    std::vector<double> resp(static_cast<size_t>(n) * m);
    std::vector<double> lp(m), z;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        // E step
        double ll = 0;
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < m; ++c)
                lp[c] = std::log(comps[c].weight) + log_gaussian(comps[c], x[i], d, z);
            double lse = logsumexp(lp);
            ll += lse;
            for (int c = 0; c < m; ++c) resp[static_cast<size_t>(i) * m + c] = std::exp(lp[c] - lse);
        }
        res.history.push_back(ll);
        if (iter > 0 && ll - prev_ll <= opts.tolerance * (std::abs(ll) + 1)) {
            prev_ll = ll;
            break;  // components still match the log-likelihood just computed
        }
        prev_ll = ll;

        // M step
        for (int c = 0; c < m; ++c) {
            auto& gc = comps[c];
            double rsum = 0;
            std::fill(gc.mean.begin(), gc.mean.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                double r = resp[static_cast<size_t>(i) * m + c];
                rsum += r;
                for (int k = 0; k < d; ++k) gc.mean[k] += r * x[i][k];
            }
            if (rsum < 1e-10) return res;  // component starved -> restart
            for (int k = 0; k < d; ++k) gc.mean[k] /= rsum;
            std::fill(gc.cov.begin(), gc.cov.end(), 0.0);
            for (int i = 0; i < n; ++i) {
                double r = resp[static_cast<size_t>(i) * m + c];
                for (int a = 0; a < d; ++a)
                    for (int b = 0; b <= a; ++b) {
                        double v = r * (x[i][a] - gc.mean[a]) * (x[i][b] - gc.mean[b]);
                        gc.cov[a * d + b] += v;
                        if (a != b) gc.cov[b * d + a] += v;
                    }
            }
            for (int a = 0; a < d * d; ++a) gc.cov[a] /= rsum;
            gc.weight = rsum / n;
            if (!finalize_component(gc, d, opts.cov_regularization)) return res;
        }
    }
    res.components = std::move(comps);
    res.loglik = prev_ll;
    res.ok = true;
    return res;
}

double gmm_point_log_prob(const std::vector<GaussComponent>& comps, int d,
                          const std::vector<double>& x) {
    std::vector<double> lp(comps.size()), z;
    for (size_t c = 0; c < comps.size(); ++c)
        lp[c] = std::log(comps[c].weight) + log_gaussian(comps[c], x, d, z);
    return logsumexp(lp);
}

}  // namespace

GmmModel fit_gmm(const std::vector<std::vector<double>>& train, const GmmFitOptions& opts,
                 GmmFitDiagnostics* diag) {
    const int n = static_cast<int>(train.size());
    if (n < 50) throw data_error("fit_gmm: need at least 50 training points, got " +
                                 std::to_string(n));
    const int d = static_cast<int>(train[0].size());

    GmmModel model;
    model.dim = d;
    double best_bic = std::numeric_limits<double>::infinity();
    for (int m = opts.components_min; m <= opts.components_max; ++m) {
        EmResult res;
        for (int attempt = 0; attempt <= opts.max_restarts; ++attempt) {
            Rng rng(opts.seed * 2654435761ull + static_cast<uint64_t>(m) * 1000003ull + attempt);
            res = run_em(train, m, opts, rng);
            if (res.ok) break;
        }
        if (!res.ok)
            throw numeric_error("fit_gmm: EM degenerate for " + std::to_string(m) +
                                " components after " + std::to_string(opts.max_restarts + 1) +
                                " attempts");
        // free parameters: weights (m-1) + means (m d) + symmetric covariances
        double p = (m - 1) + m * d + m * d * (d + 1) / 2.0;
        double bic = -2.0 * res.loglik + p * std::log(static_cast<double>(n));
        model.bic_table.push_back({m, bic});
        if (bic < best_bic) {
            best_bic = bic;
            model.components = res.components;
            if (diag) diag->loglik_history = res.history;
        }
    }

    // Otsu threshold over training log-probabilities
    std::vector<double> lps(n);
    for (int i = 0; i < n; ++i) lps[i] = gmm_point_log_prob(model.components, d, train[i]);
    auto [mn, mx] = std::minmax_element(lps.begin(), lps.end());
    if (*mx - *mn <= 0)
        throw numeric_error("fit_gmm: all training log-probabilities identical");
    model.bins = opts.otsu_bins;
    model.bin_min = *mn;
    model.bin_width = (*mx - *mn) / opts.otsu_bins;
    model.log_prob_threshold = otsu_threshold(lps, opts.otsu_bins);
    return model;
}

double gmm_log_prob(const GmmModel& model, const std::vector<double>& point) {
    if (static_cast<int>(point.size()) != model.dim)
        throw data_error("gmm_log_prob: expected " + std::to_string(model.dim) + "-d point");
    return gmm_point_log_prob(model.components, model.dim, point);
}

double otsu_threshold(const std::vector<double>& values, int bins) {
    if (bins < 2) throw usage_error("otsu_threshold: need at least 2 bins");
    if (values.size() < 2) throw data_error("otsu_threshold: need at least 2 values");
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double mn = *mn_it, mx = *mx_it;
    if (mx <= mn) throw data_error("otsu_threshold: all values identical");

    std::vector<int64_t> hist(bins, 0);
    double width = (mx - mn) / bins;
    for (double v : values) {
        int b = std::min(static_cast<int>((v - mn) / width), bins - 1);
        hist[std::max(b, 0)]++;
    }

    double best_var = -1;
    int best_t = 1;
    for (int t = 1; t < bins; ++t) {
        double w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (int b = 0; b < t; ++b) {
            w0 += static_cast<double>(hist[b]);
            s0 += static_cast<double>(hist[b]) * (b + 0.5);
        }
        for (int b = t; b < bins; ++b) {
            w1 += static_cast<double>(hist[b]);
            s1 += static_cast<double>(hist[b]) * (b + 0.5);
        }
        if (w0 == 0 || w1 == 0) continue;
        double mu0 = s0 / w0, mu1 = s1 / w1;
        double var_b = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var_b > best_var) {
            best_var = var_b;
            best_t = t;
        }
    }
    return mn + best_t * width;
}

Label gmm_classify_frame(const GmmModel& model, const std::vector<double>& point) {
    // boundary values classify as normal (strict inequality for abnormal)
    return gmm_log_prob(model, point) < model.log_prob_threshold ? Label::Abnormal : Label::Normal;
}

Label gmm_classify_clip(const GmmModel& model, const std::vector<std::vector<double>>& points) {
    if (points.empty()) return Label::Normal;  // all-invalid clip bypasses the model
    std::vector<int64_t> hist(model.bins, 0);
    for (const auto& p : points) {
        double lp = gmm_log_prob(model, p);
        int b = std::clamp(static_cast<int>((lp - model.bin_min) / model.bin_width), 0,
                           model.bins - 1);
        hist[b]++;
    }
    int mode_bin = 0;
    for (int b = 1; b < model.bins; ++b)
        if (hist[b] > hist[mode_bin]) mode_bin = b;
    double mode = model.bin_min + (mode_bin + 0.5) * model.bin_width;
    return mode < model.log_prob_threshold ? Label::Abnormal : Label::Normal;
}

}  // namespace crowd
