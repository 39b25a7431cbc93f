#include <algorithm>
#include <fstream>
#include <sstream>

#include "core/synthcrowd.hpp"

namespace fs = std::filesystem;

namespace crowd {

namespace {

void ensure_dir(const fs::path& p) {
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw data_error("cannot create directory " + p.string());
}

Segment coherent(int start, int end, double dir_deg, double speed, double jitter = 1.0) {
    Segment s;
    s.start = start;
    s.end = end;
    s.mode = BehaviourMode::CoherentFlow;
    s.dir_rad = dir_deg * 3.14159265358979323846 / 180.0;
    s.speed = speed;
    s.jitter_scale = jitter;
    return s;
}

Segment panic(int start, int end, double speed, double multiplier, double jitter = 1.0) {
    Segment s;
    s.start = start;
    s.end = end;
    s.mode = BehaviourMode::Panic;
    s.speed = speed;
    s.multiplier = multiplier;
    s.jitter_scale = jitter;
    return s;
}

Segment violent(int start, int end, double dir_deg, double speed, double jitter, double mix,
                double angle_deg = 180.0) {
    Segment s;
    s.start = start;
    s.end = end;
    s.mode = BehaviourMode::ViolentMix;
    s.dir_rad = dir_deg * 3.14159265358979323846 / 180.0;
    s.speed = speed;
    s.jitter_scale = jitter;
    s.mix_fraction = mix;
    s.angle_rad = angle_deg * 3.14159265358979323846 / 180.0;
    return s;
}

}  // namespace

void generate_umn_like(const fs::path& out, uint64_t seed) {
    ensure_dir(out);
    std::ofstream manifest(out / "manifest.csv");
    if (!manifest) throw data_error("cannot write manifest in " + out.string());
    manifest << "# umn-like corpus, seed=" << seed << "\n";
    manifest << "scene,clip,video,labels,scenario\n";

    const int frames = 600;
    const int panic_at = 420;  // panic phase covers the last 30% of each clip
    struct SceneParams {
        int agents;
        double speed, dir_deg, noise;
    };
    // scenes overlap in behaviour (counts and texture differ) so cross-scene
    // training still covers each scene's normal regime
    const SceneParams scenes[3] = {
        {50, 1.6, 0.0, 0.30},
        {60, 1.7, 45.0, 0.33},
        {70, 1.8, 90.0, 0.36},
    };
    // normal-phase variability cycle; the 200 training frames span a full
    // cycle so the later normal frames stay in-distribution. Cycle slot 1 is
    // scene-specific (extreme jitter / slow / fast normal traffic), which is
    // what makes cross-scene training genuinely harder than single-scene.
    const double spd_mul[3] = {0.85, 1.0, 1.15};
    const double jit[3] = {1.0, 1.8, 1.4};
    const double dir_wobble[3] = {0.0, 18.0, -12.0};
    const double uniq_spd[3] = {1.0, 0.65, 1.35};
    const double uniq_jit[3] = {3.2, 1.0, 1.0};

    for (int s = 0; s < 3; ++s) {
        for (int c = 0; c < 2; ++c) {
            ScenarioSpec spec;
            spec.width = 320;
            spec.height = 240;
            spec.agents = scenes[s].agents;
            spec.radius = 6.0;
            spec.noise = scenes[s].noise;
            spec.seed = seed * 1000 + static_cast<uint64_t>(s) * 10 + c;
            for (int k = 0; k * 60 < panic_at; ++k) {
                double sm = spd_mul[k % 3], jm = jit[k % 3];
                if (k % 3 == 1) {
                    sm = uniq_spd[s];
                    jm = uniq_jit[s];
                }
                spec.timeline.push_back(coherent(k * 60, std::min(k * 60 + 59, panic_at - 1),
                                                 scenes[s].dir_deg + c * 30.0 + dir_wobble[k % 3],
                                                 scenes[s].speed * sm, jm));
            }
            spec.timeline.push_back(panic(panic_at, frames - 1, scenes[s].speed, 3.0));

            std::string stem = "scene" + std::to_string(s + 1) + "_clip" + std::to_string(c + 1);
            Simulation sim = simulate(spec);
            render_y4m(sim, spec, out / (stem + ".y4m"));
            write_labels(sim.truth, out / (stem + ".labels"));
            save_scenario(spec, out / (stem + ".scenario"));
            manifest << (s + 1) << "," << (c + 1) << "," << stem << ".y4m," << stem << ".labels,"
                     << stem << ".scenario\n";
        }
    }
}

void generate_vf_like(const fs::path& out, uint64_t seed) {
    ensure_dir(out);
    std::ofstream manifest(out / "manifest.csv");
    if (!manifest) throw data_error("cannot write manifest in " + out.string());
    manifest << "# vf-like corpus, seed=" << seed << "\n";
    manifest << "clip,label,tracklets,labels,scenario\n";

    const int frames = 250;
    int clip_no = 0;
    auto emit = [&](const ScenarioSpec& spec_in, int label) {
        ScenarioSpec spec = spec_in;
        spec.seed = seed * 1000 + static_cast<uint64_t>(clip_no);
        char stem[32];
        std::snprintf(stem, sizeof(stem), "clip%03d", clip_no);
        Simulation sim = simulate(spec);
        auto tracklets = export_tracklets(sim);
        CsvMeta meta;
        meta.seed = spec.seed;
        write_tracklets(out / (std::string(stem) + ".tracklets"), tracklets, meta);
        write_labels(sim.truth, out / (std::string(stem) + ".labels"));
        save_scenario(spec, out / (std::string(stem) + ".scenario"));
        manifest << stem << "," << label << "," << stem << ".tracklets," << stem << ".labels,"
                 << stem << ".scenario\n";
        ++clip_no;
    };

    auto base_spec = [&](int agents, double noise, double spread) {
        ScenarioSpec spec;
        spec.width = 320;
        spec.height = 240;
        spec.agents = agents;
        spec.radius = 6.0;
        spec.noise = noise;
        spec.spread = spread;
        return spec;
    };

    auto mill = [](int start, int end, double dir_deg, double speed, double angle_deg) {
        Segment s;
        s.start = start;
        s.end = end;
        s.mode = BehaviourMode::Mill;
        s.dir_rad = dir_deg * 3.14159265358979323846 / 180.0;
        s.speed = speed;
        s.angle_rad = angle_deg * 3.14159265358979323846 / 180.0;
        return s;
    };

    // normal clips: coherent flows with a jitter ladder, unstructured
    // "milling" crowds, and mixed clips that alternate between the two (the
    // transitions matter: they give the normal class a low-likelihood tail)
    for (int i = 0; i < 8; ++i) {
        ScenarioSpec spec = base_spec(42 + 2 * i, 0.20 + 0.028 * i, 1.0 - 0.005 * i);
        double jitter = 1.0 + 0.45 * (i % 4);
        spec.timeline.push_back(coherent(0, frames - 1, i * 45.0, 1.2 + 0.15 * i, jitter));
        emit(spec, 0);
    }
    for (int i = 0; i < 6; ++i) {
        ScenarioSpec spec = base_spec(44 + 3 * i, 0.22, 0.98);
        spec.timeline.push_back(mill(0, frames - 1, i * 60.0, 1.0 + 0.08 * i, 115.0 + 13.0 * i));
        emit(spec, 0);
    }
    for (int i = 0; i < 6; ++i) {
        ScenarioSpec spec = base_spec(46 + 2 * i, 0.22, 0.97);
        double cs = 1.3 + 0.1 * i, ms = 1.05 + 0.07 * i;
        for (int b = 0; b < 5; ++b) {
            int s = b * 50, e = b * 50 + 49;
            bool coh = (b + i) % 2 == 0;
            if (coh)
                spec.timeline.push_back(coherent(s, e, i * 30.0 + b * 20.0, cs, 1.0 + 0.3 * (i % 3)));
            else
                spec.timeline.push_back(mill(s, e, i * 30.0, ms, 120.0 + 12.0 * i));
        }
        emit(spec, 0);
    }

    // violent clips, five families of four; the scuffle family is built to be
    // caught by frame majority but not by the histogram-mode rule, the other
    // four are each anomalous in essentially one feature
    for (int i = 0; i < 4; ++i) {
        // scuffle: short bursts of a skewed brawl between calm stretches; the
        // calm plateau repeats (concentrated mode) while every burst differs
        ScenarioSpec spec = base_spec(48 + 2 * i, 0.22, 0.95);
        double speed = 1.5 + 0.05 * i;
        int v = 0;
        const char pattern[11] = "CVVCVVCVVV";
        for (int b = 0; b < 10; ++b) {
            int s = b * 25, e = b * 25 + 24;
            if (pattern[b] == 'C') {
                spec.timeline.push_back(coherent(s, e, i * 40.0, speed, 1.0));
            } else {
                spec.timeline.push_back(violent(s, e, i * 40.0 + 30.0 * (v + 1), speed, 1.2,
                                                0.80 + 0.02 * v));
                ++v;
            }
        }
        emit(spec, 1);
    }
    for (int i = 0; i < 4; ++i) {
        // stampede: coherent charge at abnormal speed (jitter keeps the
        // direction coherence inside the normal band)
        ScenarioSpec spec = base_spec(50 + 2 * i, 0.55 + 0.05 * i, 1.0);
        Segment s = coherent(0, frames - 1, 20.0 + i * 70.0, 2.8 + 0.1 * i);
        s.truth_label = 1;
        spec.timeline.push_back(s);
        emit(spec, 1);
    }
    for (int i = 0; i < 4; ++i) {
        // small opposing minority: conflict rises, collectiveness stays normal
        ScenarioSpec spec = base_spec(50 + 2 * i, 0.22, 0.95);
        spec.timeline.push_back(violent(0, frames - 1, i * 55.0, 1.6 + 0.05 * i, 1.0, 0.9));
        emit(spec, 1);
    }
    for (int i = 0; i < 4; ++i) {
        // wide-angle crossing: collectiveness above what its conflict implies
        ScenarioSpec spec = base_spec(50 + 2 * i, 0.22, 0.95);
        spec.timeline.push_back(violent(0, frames - 1, i * 35.0, 1.4 + 0.05 * i, 1.0, 0.5, 140.0));
        emit(spec, 1);
    }
    for (int i = 0; i < 4; ++i) {
        // tight knot at normal speeds: occupancy collapses
        ScenarioSpec spec = base_spec(48 + 2 * i, 0.22, 0.40 + 0.015 * i);
        spec.timeline.push_back(violent(0, frames - 1, i * 50.0, 1.5 + 0.05 * i, 1.0, 0.5, 30.0));
        emit(spec, 1);
    }
}

void generate_recipe(const std::string& name, const fs::path& out, uint64_t seed) {
    if (name == "umn-like") generate_umn_like(out, seed);
    else if (name == "vf-like") generate_vf_like(out, seed);
    else throw usage_error("unknown recipe '" + name + "' (expected umn-like or vf-like)");
}

}  // namespace crowd
