// Acceptance gate: one self-contained check per release criterion, each
// reporting a single PASS/FAIL line. Exit code is nonzero if any check fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/eval.hpp"
#include "core/features.hpp"
#include "core/models.hpp"
#include "core/synthcrowd.hpp"
#include "core/tracker.hpp"
#include "crowdanomaly.h"

using namespace crowd;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(bool ok, const std::string& what) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", what.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

// Exact-rational argmax oracle over the same equal-width histogram: the
// between-class variance (S0*W1 - S1*W0)^2 / (W0*W1) is compared with 128-bit
// integer cross-multiplication, so no floating-point argmax is involved.
double otsu_oracle(const std::vector<double>& values, int bins) {
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double mn = *mn_it, mx = *mx_it;
    double width = (mx - mn) / bins;
    std::vector<long long> hist(bins, 0);
    for (double v : values) {
        int b = std::min(static_cast<int>((v - mn) / width), bins - 1);
        hist[std::max(b, 0)]++;
    }
    __int128 bestA2 = -1, bestW = 1;
    int best_t = 1;
    for (int t = 1; t < bins; ++t) {
        long long w0 = 0, w1 = 0, s0 = 0, s1 = 0;
        for (int b = 0; b < t; ++b) {
            w0 += hist[b];
            s0 += hist[b] * (2 * b + 1);
        }
        for (int b = t; b < bins; ++b) {
            w1 += hist[b];
            s1 += hist[b] * (2 * b + 1);
        }
        if (w0 == 0 || w1 == 0) continue;
        __int128 a = static_cast<__int128>(s0) * w1 - static_cast<__int128>(s1) * w0;
        __int128 a2 = a * a;
        __int128 w = static_cast<__int128>(w0) * w1;
        if (bestA2 < 0 || a2 * bestW > bestA2 * w) {
            bestA2 = a2;
            bestW = w;
            best_t = t;
        }
    }
    return mn + best_t * width;
}

void check_otsu_equivalence() {
    auto t0 = Clock::now();
    Rng rng(1001);
    int mismatches = 0;
    const int trials = 200;
    for (int t = 0; t < trials; ++t) {
        int bins = 2 + static_cast<int>(rng.uniform_index(255));
        int n = 16 + static_cast<int>(rng.uniform_index(3000));
        std::vector<double> vals;
        vals.reserve(n);
        int shape = t % 4;
        double c1 = rng.uniform(-50, 50), c2 = rng.uniform(-50, 50);
        for (int i = 0; i < n; ++i) {
            double v;
            switch (shape) {
                case 0: v = rng.uniform(c1, c1 + 10 + rng.uniform() * 40); break;  // flat
                case 1: v = rng.gauss(c1, 1 + 4 * rng.uniform()); break;           // unimodal
                case 2: v = rng.uniform() < 0.6 ? rng.gauss(c1, 2) : rng.gauss(c2, 1); break;
                default: v = c1 + std::exp(rng.gauss(0, 1));  // skewed
            }
            vals.push_back(v);
        }
        double mn = *std::min_element(vals.begin(), vals.end());
        double mx = *std::max_element(vals.begin(), vals.end());
        if (mx <= mn) continue;
        if (otsu_threshold(vals, bins) != otsu_oracle(vals, bins)) ++mismatches;
    }
    double dt = seconds_since(t0);
    report(mismatches == 0 && dt < 10.0,
           fmt("threshold search equals exhaustive between-class-variance maximum "
               "(%d/%d histograms exact, %.2fs < 10s)",
               trials - mismatches, trials, dt));
}

// ---------------------------------------------------------------- criterion 2

void check_gmm_recovery() {
    auto t0 = Clock::now();
    const std::vector<std::vector<double>> means = {
        {0.0, 0.0, 0.0, 0.0}, {6.0, 1.0, -5.0, 2.0}, {-4.0, 5.0, 3.0, -6.0}};
    const std::vector<double> weights = {0.45, 0.35, 0.20};
    // full covariances: correlated axes via a fixed linear mix of unit normals
    const double mix[3][2] = {{0.3, 0.2}, {-0.25, 0.35}, {0.2, -0.3}};
    int picked3 = 0, mean_ok_runs = 0;
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(3000 + seed);
        std::vector<std::vector<double>> data;
        data.reserve(5000);
        for (int i = 0; i < 5000; ++i) {
            double u = rng.uniform();
            int c = u < weights[0] ? 0 : (u < weights[0] + weights[1] ? 1 : 2);
            double e0 = rng.gauss(), e1 = rng.gauss(), e2 = rng.gauss(), e3 = rng.gauss();
            std::vector<double> p = means[c];
            p[0] += 0.6 * e0 + mix[c][0] * e1;
            p[1] += 0.7 * e1 + mix[c][1] * e2;
            p[2] += 0.5 * e2 + mix[c][0] * e3;
            p[3] += 0.8 * e3 + mix[c][1] * e0;
            data.push_back(std::move(p));
        }
        GmmFitOptions opts;
        opts.components_min = 1;
        opts.components_max = 4;
        opts.seed = seed;
        GmmModel m = fit_gmm(data, opts);
        if (m.chosen_components() != 3) continue;
        ++picked3;
        bool all_matched = true;
        for (const auto& truth : means) {
            double best = 1e30;
            for (const auto& c : m.components) {
                double d = 0;
                for (int j = 0; j < 4; ++j) d += (c.mean[j] - truth[j]) * (c.mean[j] - truth[j]);
                best = std::min(best, std::sqrt(d));
            }
            if (best > 0.1) all_matched = false;
        }
        if (all_matched) ++mean_ok_runs;
    }
    double dt = seconds_since(t0);
    report(picked3 >= 9 && mean_ok_runs == picked3 && dt < 60.0,
           fmt("information-criterion selection recovers the 3-component mixture "
               "(3 chosen in %d/10 seeds, means within 0.1 in %d of those, %.1fs < 60s)",
               picked3, mean_ok_runs, dt));
}

// ---------------------------------------------------------------- criterion 3

void check_em_monotonicity() {
    Rng meta(4001);
    int violations = 0;
    for (int t = 0; t < 20; ++t) {
        int d = 2 + static_cast<int>(meta.uniform_index(3));
        int clusters = 1 + static_cast<int>(meta.uniform_index(3));
        std::vector<std::vector<double>> data;
        for (int c = 0; c < clusters; ++c) {
            std::vector<double> center(d);
            for (auto& x : center) x = meta.uniform(-8, 8);
            int n = 150 + static_cast<int>(meta.uniform_index(300));
            double s = 0.4 + meta.uniform() * 1.5;
            for (int i = 0; i < n; ++i) {
                std::vector<double> p(d);
                for (int j = 0; j < d; ++j) p[j] = meta.gauss(center[j], s);
                data.push_back(std::move(p));
            }
        }
        GmmFitOptions opts;
        opts.seed = 4100 + static_cast<uint64_t>(t);
        GmmFitDiagnostics diag;
        fit_gmm(data, opts, &diag);
        for (size_t i = 1; i < diag.loglik_history.size(); ++i)
            if (diag.loglik_history[i] < diag.loglik_history[i - 1] - 1e-9) ++violations;
    }
    report(violations == 0,
           fmt("EM log-likelihood is non-decreasing on every iteration "
               "(20 datasets, %d violations, slack 1e-9)",
               violations));
}

// ---------------------------------------------------------------- criterion 4

// Gaussian elimination with partial pivoting; returns false if singular.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double>& b) {
    int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (int c2 = col; c2 < n; ++c2) a[r][c2] -= f * a[col][c2];
            b[r] -= f * b[col];
        }
    }
    for (int i = 0; i < n; ++i) b[i] /= a[i][i];
    return true;
}

double dual_objective(const std::vector<double>& alpha, const std::vector<int>& y,
                      const std::vector<std::vector<double>>& K) {
    int n = static_cast<int>(alpha.size());
    double w = 0;
    for (int i = 0; i < n; ++i) w += alpha[i];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * K[i][j];
    return w;
}

// Global maximum of the soft-margin dual on a tiny instance by enumerating all
// active sets (each variable at 0, at C, or free) and solving the stationarity
// system on the free block.
double brute_force_dual(const std::vector<std::vector<double>>& pts, const std::vector<int>& y,
                        double c, double gamma) {
    int n = static_cast<int>(pts.size());
    std::vector<std::vector<double>> K(n, std::vector<double>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K[i][j] = rbf_kernel(pts[i], pts[j], gamma);

    double best = -1e300;
    std::vector<int> state(n, 0);  // 0 = zero, 1 = at C, 2 = free
    int total = 1;
    for (int i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
        int q = code;
        std::vector<int> free_idx;
        std::vector<double> alpha(n, 0.0);
        for (int i = 0; i < n; ++i) {
            state[i] = q % 3;
            q /= 3;
            if (state[i] == 1) alpha[i] = c;
            else if (state[i] == 2) free_idx.push_back(i);
        }
        int m = static_cast<int>(free_idx.size());
        if (m == 0) {
            double bal = 0;
            for (int i = 0; i < n; ++i) bal += alpha[i] * y[i];
            if (std::fabs(bal) > 1e-9) continue;
            best = std::max(best, dual_objective(alpha, y, K));
            continue;
        }
        // stationarity over the free block plus the balance constraint
        std::vector<std::vector<double>> A(m + 1, std::vector<double>(m + 1, 0.0));
        std::vector<double> b(m + 1, 0.0);
        for (int r = 0; r < m; ++r) {
            int i = free_idx[r];
            for (int s = 0; s < m; ++s) {
                int j = free_idx[s];
                A[r][s] = y[i] * y[j] * K[i][j];
            }
            A[r][m] = y[i];
            double rhs = 1.0;
            for (int j = 0; j < n; ++j)
                if (state[j] == 1) rhs -= y[i] * y[j] * c * K[i][j];
            b[r] = rhs;
        }
        double fixed_bal = 0;
        for (int j = 0; j < n; ++j)
            if (state[j] == 1) fixed_bal += c * y[j];
        for (int s = 0; s < m; ++s) A[m][s] = y[free_idx[s]];
        A[m][m] = 0.0;
        b[m] = -fixed_bal;
        if (!solve_linear(A, b)) continue;
        bool feasible = true;
        for (int s = 0; s < m; ++s) {
            if (b[s] < -1e-9 || b[s] > c + 1e-9) feasible = false;
            alpha[free_idx[s]] = std::clamp(b[s], 0.0, c);
        }
        if (!feasible) continue;
        best = std::max(best, dual_objective(alpha, y, K));
    }
    return best;
}

// dual value achieved by a fitted model (alpha_i = |dual_coef_i|)
double model_dual(const SvmModel& m) {
    double w = 0;
    for (double dc : m.dual_coef) w += std::fabs(dc);
    for (size_t i = 0; i < m.dual_coef.size(); ++i)
        for (size_t j = 0; j < m.dual_coef.size(); ++j)
            w -= 0.5 * m.dual_coef[i] * m.dual_coef[j] *
                 rbf_kernel(m.support_vectors[i], m.support_vectors[j], m.gamma);
    return w;
}

void check_smo() {
    // (a) KKT conditions on random problems
    Rng rng(5001);
    int kkt_bad = 0;
    for (int t = 0; t < 20; ++t) {
        std::vector<std::vector<double>> pts;
        std::vector<int> labels;
        int n = 30 + static_cast<int>(rng.uniform_index(50));
        double sep = rng.uniform(1.0, 4.0);
        for (int i = 0; i < n; ++i) {
            int y = i % 2 == 0 ? 1 : -1;
            pts.push_back({rng.gauss(y * sep / 2, 1.0), rng.gauss(-y * sep / 2, 1.0)});
            labels.push_back(y);
        }
        SvmFitOptions opts;
        opts.seed = 5100 + static_cast<uint64_t>(t);
        SvmModel m = fit_svm(pts, labels, opts);
        // equality constraint
        double bal = 0;
        for (double dc : m.dual_coef) bal += dc;
        if (std::fabs(bal) > 1e-6) ++kkt_bad;
        // box constraint and margin conditions per training point
        std::vector<double> alpha(pts.size(), 0.0);
        for (size_t s = 0; s < m.support_vectors.size(); ++s) {
            for (size_t i = 0; i < pts.size(); ++i)
                if (m.support_vectors[s] == pts[i]) {
                    alpha[i] = std::fabs(m.dual_coef[s]);
                    break;
                }
            if (std::fabs(m.dual_coef[s]) > m.c + 1e-9) ++kkt_bad;
        }
        const double tol = 1e-2;
        for (size_t i = 0; i < pts.size(); ++i) {
            double margin = labels[i] * svm_decision(m, pts[i]);
            if (alpha[i] < 1e-9 && margin < 1.0 - tol) ++kkt_bad;
            else if (alpha[i] > m.c - 1e-9 && margin > 1.0 + tol) ++kkt_bad;
            else if (alpha[i] > 1e-9 && alpha[i] < m.c - 1e-9 && std::fabs(margin - 1.0) > tol)
                ++kkt_bad;
        }
    }

    // (b) dual optimum vs brute-force enumeration on 6-point instances
    double worst_gap = 0;
    Rng qrng(5301);
    for (int t = 0; t < 10; ++t) {
        std::vector<std::vector<double>> pts;
        std::vector<int> labels;
        for (int i = 0; i < 6; ++i) {
            int y = i < 3 ? 1 : -1;
            pts.push_back({qrng.gauss(y * 1.0, 1.2), qrng.gauss(-y * 0.5, 1.2)});
            labels.push_back(y);
        }
        SvmFitOptions opts;
        opts.seed = 5400 + static_cast<uint64_t>(t);
        opts.gamma = 0.5;
        SvmModel m = fit_svm(pts, labels, opts);
        double w_model = model_dual(m);
        double w_best = brute_force_dual(pts, labels, opts.c, 0.5);
        worst_gap = std::max(worst_gap, std::fabs(w_best - w_model));
    }

    // (c) separable accuracy and (d) XOR accuracy
    Rng srng(5501);
    std::vector<std::vector<double>> sep_pts;
    std::vector<int> sep_labels;
    for (int i = 0; i < 60; ++i) {
        sep_pts.push_back({srng.gauss(0, 0.5), srng.gauss(0, 0.5)});
        sep_labels.push_back(-1);
        sep_pts.push_back({srng.gauss(5, 0.5), srng.gauss(5, 0.5)});
        sep_labels.push_back(1);
    }
    SvmFitOptions sopts;
    sopts.seed = 5600;
    SvmModel sm = fit_svm(sep_pts, sep_labels, sopts);
    int sep_ok = 0;
    for (size_t i = 0; i < sep_pts.size(); ++i)
        if ((svm_decision(sm, sep_pts[i]) >= 0 ? 1 : -1) == sep_labels[i]) ++sep_ok;

    std::vector<std::vector<double>> xor_pts;
    std::vector<int> xor_labels;
    for (int i = 0; i < 30; ++i)
        for (int cx = 0; cx < 2; ++cx)
            for (int cy = 0; cy < 2; ++cy) {
                xor_pts.push_back({cx * 3.0 + srng.gauss(0, 0.4), cy * 3.0 + srng.gauss(0, 0.4)});
                xor_labels.push_back(cx == cy ? 1 : -1);
            }
    SvmFitOptions xopts;
    xopts.seed = 5700;
    SvmModel xm = fit_svm(xor_pts, xor_labels, xopts);
    int xor_ok = 0;
    for (size_t i = 0; i < xor_pts.size(); ++i)
        if ((svm_decision(xm, xor_pts[i]) >= 0 ? 1 : -1) == xor_labels[i]) ++xor_ok;
    double xor_acc = static_cast<double>(xor_ok) / xor_pts.size();

    bool ok = kkt_bad == 0 && worst_gap <= 1e-3 && sep_ok == static_cast<int>(sep_pts.size()) &&
              xor_acc >= 0.95;
    report(ok, fmt("SMO solver: KKT clean on 20 problems (%d violations), dual gap vs "
                   "exhaustive QP %.2e <= 1e-3, separable 100%% (%d/%zu), XOR %.1f%% >= 95%%",
                   kkt_bad, worst_gap, sep_ok, sep_pts.size(), 100.0 * xor_acc));
}

// ---------------------------------------------------------------- criterion 5

double cosv(const Vec2& a, const Vec2& b) {
    double na = std::hypot(a.x, a.y), nb = std::hypot(b.x, b.y);
    if (na == 0 || nb == 0) return 0;
    return (a.x * b.x + a.y * b.y) / (na * nb);
}

void check_feature_oracles() {
    Rng rng(6001);
    bool density_exact = true;
    double worst_speed = 0, worst_coll = 0, worst_conf = 0;

    for (int t = 0; t < 100; ++t) {
        int n = 1 + static_cast<int>(rng.uniform_index(300));
        std::vector<TrackPoint> pts(n);
        for (int i = 0; i < n; ++i) {
            pts[i].id = i;
            pts[i].pos = {rng.uniform(0, 320), rng.uniform(0, 240)};
            pts[i].vel = {rng.gauss(0, 2), rng.gauss(0, 2)};
        }
        // density: brute-force occupancy
        std::vector<std::vector<int>> cells(10, std::vector<int>(10, 0));
        for (const auto& p : pts) {
            int cx = std::min(9, std::max(0, static_cast<int>(p.pos.x * 10 / 320)));
            int cy = std::min(9, std::max(0, static_cast<int>(p.pos.y * 10 / 240)));
            cells[cy][cx] = 1;
        }
        int occ = 0;
        for (auto& row : cells)
            for (int v : row) occ += v;
        if (density(pts, 10, 10, 320, 240) != static_cast<double>(occ) / 100.0)
            density_exact = false;

        // mean speed recomputation
        double ms = 0;
        for (const auto& p : pts) ms += std::sqrt(p.vel.x * p.vel.x + p.vel.y * p.vel.y);
        ms /= static_cast<double>(n);
        worst_speed = std::max(worst_speed, std::fabs(ms - mean_speed(pts)));

        // collectiveness / conflict via the produced adjacency, brute-force sums
        int k = 1 + static_cast<int>(rng.uniform_index(10));
        NeighborGraph g = build_knn(pts, k);
        std::vector<double> col(pts.size(), 0.0);
        double conf_sum = 0;
        int edges = 0;
        for (size_t i = 0; i < pts.size(); ++i)
            for (int j : g.neighbors[i]) {
                col[j] += std::max(0.0, cosv(pts[i].vel, pts[j].vel));
                conf_sum += (1.0 - cosv(pts[i].vel, pts[j].vel)) / 2.0;
                ++edges;
            }
        double coll_oracle = 0;
        for (double c : col) coll_oracle += c;
        coll_oracle /= static_cast<double>(pts.size());
        double conf_oracle = edges == 0 ? 0.0 : conf_sum / edges;
        worst_coll = std::max(worst_coll, std::fabs(coll_oracle - collectiveness(pts, g)));
        worst_conf = std::max(worst_conf, std::fabs(conf_oracle - conflict(pts, g)));
    }

    // conflict on random directions averages 0.5 (>= 10k directed pairs)
    double conf_total = 0;
    long long pair_total = 0;
    for (int t = 0; t < 50; ++t) {
        std::vector<TrackPoint> pts(100);
        for (int i = 0; i < 100; ++i) {
            pts[i].id = i;
            pts[i].pos = {rng.uniform(0, 320), rng.uniform(0, 240)};
            double a = rng.uniform(0, 6.283185307179586);
            pts[i].vel = {std::cos(a), std::sin(a)};
        }
        NeighborGraph g = build_knn(pts, 10);
        int edges = 0;
        for (const auto& nb : g.neighbors) edges += static_cast<int>(nb.size());
        conf_total += conflict(pts, g) * edges;
        pair_total += edges;
    }
    double conf_mean = conf_total / static_cast<double>(pair_total);

    bool ok = density_exact && worst_speed <= 1e-12 && worst_coll <= 1e-9 &&
              worst_conf <= 1e-9 && std::fabs(conf_mean - 0.5) <= 0.05 && pair_total >= 10000;
    report(ok, fmt("holistic features match brute-force oracles (density exact, speed err "
                   "%.1e <= 1e-12, collectiveness err %.1e, conflict err %.1e <= 1e-9; random-"
                   "direction conflict %.4f within 0.5 +/- 0.05 over %lld pairs)",
                   worst_speed, worst_coll, worst_conf, conf_mean,
                   static_cast<long long>(pair_total)));
}

// ---------------------------------------------------------------- criterion 6

Frame speckle_frame(int w, int h, double sx, double sy) {
    Frame f = Frame::blank(0, w, h);
    auto cell = [](int gx, int gy) {
        uint32_t v = static_cast<uint32_t>(gx * 374761393 + gy * 668265263);
        v = (v ^ (v >> 13)) * 1274126177u;
        return static_cast<double>((v ^ (v >> 16)) & 0xff);
    };
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double gx = (x - sx) / 4.0, gy = (y - sy) / 4.0;
            int x0 = static_cast<int>(std::floor(gx)), y0 = static_cast<int>(std::floor(gy));
            double fx = gx - x0, fy = gy - y0;
            double top = cell(x0, y0) * (1 - fx) + cell(x0 + 1, y0) * fx;
            double bot = cell(x0, y0 + 1) * (1 - fx) + cell(x0 + 1, y0 + 1) * fx;
            f.at(x, y) = static_cast<uint8_t>(top * (1 - fy) + bot * fy);
        }
    return f;
}

void check_tracking_accuracy() {
    Rng rng(7001);
    const int w = 160, h = 120;
    Frame base = speckle_frame(w, h, 0, 0);
    std::vector<Vec2> pts;
    for (int y = 20; y < h - 20; y += 6)
        for (int x = 20; x < w - 20; x += 6) pts.push_back({double(x), double(y)});

    int good = 0, total = 0;
    for (int trial = 0; trial < 6; ++trial) {
        double dx = rng.uniform(-3.0, 3.0), dy = rng.uniform(-3.0, 3.0);
        Frame moved = speckle_frame(w, h, dx, dy);
        auto res = klt_step(base, moved, pts, {});
        for (size_t i = 0; i < res.size(); ++i) {
            ++total;
            if (res[i].lost) continue;
            double ex = res[i].pos.x - pts[i].x - dx, ey = res[i].pos.y - pts[i].y - dy;
            if (std::hypot(ex, ey) <= 0.25) ++good;
        }
    }
    double frac = static_cast<double>(good) / total;

    auto still = klt_step(base, base, pts, {});
    double worst_drift = 0;
    int still_lost = 0;
    for (size_t i = 0; i < still.size(); ++i) {
        if (still[i].lost) {
            ++still_lost;
            continue;
        }
        worst_drift = std::max(
            worst_drift, std::hypot(still[i].pos.x - pts[i].x, still[i].pos.y - pts[i].y));
    }
    bool ok = frac >= 0.9 && worst_drift <= 0.1 && still_lost == 0;
    report(ok, fmt("optical-flow step recovers +/-3px global shifts (%.1f%% of %d points within "
                   "0.25px >= 90%%; identical-frame drift %.3fpx <= 0.1)",
                   100.0 * frac, total, worst_drift));
}

// ---------------------------------------------------------------- criterion 7

void check_panic_corpus() {
    auto t0 = Clock::now();
    fs::path dir = fs::temp_directory_path() / "accept_panic_corpus";
    fs::remove_all(dir);
    bool ok = false;
    double auc_single = 0, auc_cross = 0;
    std::string detail;
    do {
        if (ca_synth("umn-like", dir.c_str(), 4) != CA_OK) {
            detail = std::string("corpus generation failed: ") + ca_last_error();
            break;
        }
        if (ca_track_corpus(dir.c_str(), nullptr, 4) != CA_OK) {
            detail = std::string("tracking failed: ") + ca_last_error();
            break;
        }
        if (ca_features_corpus(dir.c_str(), nullptr, 4) != CA_OK) {
            detail = std::string("feature extraction failed: ") + ca_last_error();
            break;
        }
        if (ca_eval_umn(dir.c_str(), 0, 200, nullptr, 4, nullptr, &auc_single) != CA_OK) {
            detail = std::string("single-scene protocol failed: ") + ca_last_error();
            break;
        }
        if (ca_eval_umn(dir.c_str(), 1, 200, nullptr, 4, nullptr, &auc_cross) != CA_OK) {
            detail = std::string("cross-scene protocol failed: ") + ca_last_error();
            break;
        }
        ok = true;
    } while (false);
    double dt = seconds_since(t0);
    ok = ok && auc_single >= 0.95 && auc_single >= auc_cross && dt < 300.0;
    if (detail.empty())
        detail = fmt("panic-onset corpus: single-scene AUC %.4f >= 0.95, cross-scene %.4f <= "
                     "single, %.0fs < 300s",
                     auc_single, auc_cross, dt);
    report(ok, detail);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------- criterion 8

void check_violence_corpus() {
    auto t0 = Clock::now();
    fs::path dir = fs::temp_directory_path() / "accept_violence_corpus";
    fs::remove_all(dir);
    bool ok = false;
    double svm_acc = 0, svm_ci = 0, gmm_acc = 0, gmm_ci = 0;
    double ablated[CA_FEATURE_COUNT] = {0, 0, 0, 0};
    std::string detail;
    do {
        if (ca_synth("vf-like", dir.c_str(), 7) != CA_OK) {
            detail = std::string("corpus generation failed: ") + ca_last_error();
            break;
        }
        if (ca_features_corpus(dir.c_str(), nullptr, 7) != CA_OK) {
            detail = std::string("feature extraction failed: ") + ca_last_error();
            break;
        }
        if (ca_eval_cv(dir.c_str(), "svm", 5, nullptr, 1, nullptr, &svm_acc, &svm_ci) != CA_OK) {
            detail = std::string("margin-classifier CV failed: ") + ca_last_error();
            break;
        }
        if (ca_eval_cv(dir.c_str(), "gmm", 5, nullptr, 1, nullptr, &gmm_acc, &gmm_ci) != CA_OK) {
            detail = std::string("outlier-model CV failed: ") + ca_last_error();
            break;
        }
        if (ca_ablate(dir.c_str(), 5, nullptr, 1, nullptr, ablated) != CA_OK) {
            detail = std::string("feature ablation failed: ") + ca_last_error();
            break;
        }
        ok = true;
    } while (false);
    double dt = seconds_since(t0);
    double worst_drop = 1e9;
    for (int i = 0; i < CA_FEATURE_COUNT; ++i) worst_drop = std::min(worst_drop, svm_acc - ablated[i]);
    ok = ok && svm_acc >= 0.90 && gmm_acc > 0.5 && gmm_acc < svm_acc && worst_drop >= 0.02 &&
         dt < 600.0;
    if (detail.empty())
        detail = fmt("violence corpus 5-fold CV: margin classifier %.1f%% >= 90%%, outlier model "
                     "%.1f%% strictly between chance and %.1f%%, every single-feature ablation "
                     "drops >= 2 points (smallest drop %.1f), %.0fs < 600s",
                     100 * svm_acc, 100 * gmm_acc, 100 * svm_acc, 100 * worst_drop, dt);
    report(ok, detail);
    fs::remove_all(dir);
}

// ---------------------------------------------------------------- criterion 9

void check_throughput() {
    double fps = 0;
    bool ran = ca_bench(320, 240, 60, 600, 9, nullptr, &fps) == CA_OK;
    // 40 FPS is the reference target; the gate admits slower CI hardware
    report(ran && fps >= 25.0,
           fmt("end-to-end throughput %.1f FPS on 320x240/600 frames/60 agents "
               "(reference target 40, gate 25)",
               fps));
}

// --------------------------------------------------------- optional criterion

void check_real_datasets() {
    const char* umn = std::getenv("CROWD_UMN_DIR");
    const char* vf = std::getenv("CROWD_VF_DIR");
    if (!umn && !vf) {
        std::printf("[SKIP] real-dataset reproduction (set CROWD_UMN_DIR / CROWD_VF_DIR to "
                    "prepared corpora to enable; not part of CI)\n");
        return;
    }
    if (umn) {
        double auc = 0;
        if (ca_eval_umn(umn, 0, 200, nullptr, 1, nullptr, &auc) == CA_OK)
            report(std::fabs(auc - 0.929) <= 0.05,
                   fmt("real panic dataset single-scene AUC %.3f within 0.929 +/- 0.05", auc));
        else
            report(false, std::string("real panic dataset evaluation failed: ") + ca_last_error());
    }
    if (vf) {
        double acc = 0, ci = 0;
        if (ca_eval_cv(vf, "svm", 5, nullptr, 1, nullptr, &acc, &ci) == CA_OK)
            report(std::fabs(acc - 0.8553) <= 0.05,
                   fmt("real violence dataset CV accuracy %.1f%% within 85.53 +/- 5 points",
                       100 * acc));
        else
            report(false, std::string("real violence dataset evaluation failed: ") + ca_last_error());
    }
}

}  // namespace

int main() {
    check_otsu_equivalence();
    check_gmm_recovery();
    check_em_monotonicity();
    check_smo();
    check_feature_oracles();
    check_tracking_accuracy();
    check_panic_corpus();
    check_violence_corpus();
    check_throughput();
    check_real_datasets();
    if (g_failures == 0) {
        std::printf("all acceptance checks passed\n");
        return 0;
    }
    std::printf("%d acceptance check(s) failed\n", g_failures);
    return 1;
}
