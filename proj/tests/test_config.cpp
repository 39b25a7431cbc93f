#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "core/common.hpp"
#include "core/config.hpp"

using namespace crowd;
namespace fs = std::filesystem;

TEST_CASE("empty text yields all defaults") {
    RunConfig cfg = parse_config_text("");
    CHECK(cfg.grid_rows == 10);
    CHECK(cfg.grid_cols == 10);
    CHECK(cfg.min_tracklet_len == 5);
    CHECK(cfg.reseed_interval == 30);
    CHECK(cfg.static_std_threshold == doctest::Approx(0.1));
    CHECK(cfg.low_activity_threshold == 10);
    CHECK(cfg.ema_alpha == doctest::Approx(0.1));
    CHECK(cfg.knn_k == 10);
    CHECK(cfg.gmm_components_min == 1);
    CHECK(cfg.gmm_components_max == 4);
    CHECK(cfg.svm_c == doctest::Approx(1.0));
}

TEST_CASE("single override keeps other defaults") {
    RunConfig cfg = parse_config_text("ema_alpha=0.5");
    CHECK(cfg.ema_alpha == doctest::Approx(0.5));
    CHECK(cfg.grid_rows == 10);
    CHECK(cfg.reseed_interval == 30);
}

TEST_CASE("comments and blank lines are ignored") {
    RunConfig cfg = parse_config_text("# header\n\nknn_k = 7  # trailing\n");
    CHECK(cfg.knn_k == 7);
}

TEST_CASE("out-of-range values are rejected") {
    CHECK_THROWS_AS(parse_config_text("ema_alpha=-1"), Error);
    CHECK_THROWS_AS(parse_config_text("ema_alpha=0"), Error);
    CHECK_THROWS_AS(parse_config_text("ema_alpha=1.5"), Error);
    CHECK_THROWS_AS(parse_config_text("grid_rows=0"), Error);
    CHECK_THROWS_AS(parse_config_text("svm_c=-2"), Error);
    CHECK_THROWS_AS(parse_config_text("gmm_components_min=3\ngmm_components_max=2"), Error);
}

TEST_CASE("malformed lines and unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config_text("not a key value line"), Error);
    CHECK_THROWS_AS(parse_config_text("mystery_knob=1"), Error);
    CHECK_THROWS_AS(parse_config_text("knn_k=ten"), Error);
    CHECK_THROWS_AS(parse_config_text("ema_alpha=0.5x"), Error);
}

TEST_CASE("error carries the data category") {
    try {
        parse_config_text("ema_alpha=-1");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Data);
    }
}

TEST_CASE("canonical text round-trips and hash tracks content") {
    RunConfig a = parse_config_text("knn_k=12\nsvm_c=2.5");
    RunConfig b = parse_config_text(a.canonical_text());
    CHECK(a.canonical_text() == b.canonical_text());
    CHECK(a.hash() == b.hash());
    RunConfig c;
    CHECK(a.hash() != c.hash());
    CHECK(c.hash() == RunConfig{}.hash());
}

TEST_CASE("load_config reads a file and reports missing files") {
    fs::path dir = fs::temp_directory_path() / "cfg_test_dir";
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "run.cfg");
        out << "reseed_interval=15\n";
    }
    RunConfig cfg = load_config(dir / "run.cfg");
    CHECK(cfg.reseed_interval == 15);
    CHECK_THROWS_AS(load_config(dir / "absent.cfg"), Error);
    fs::remove_all(dir);
}
