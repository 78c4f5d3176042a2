#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wbft/scenario.hpp"
#include "wbft/simulation.hpp"

using namespace wbft;

TEST_CASE("minimal config gets defaults applied") {
    ScenarioConfig cfg = parse_config(R"({"nodes": 6})", false);
    CHECK(cfg.nodes.size() == 6);
    CHECK(cfg.consensus.mode == ConsensusMode::wbft);
    CHECK(cfg.consensus.alpha == doctest::Approx(0.5));
    CHECK(cfg.channel.slot_seconds.has_value());
    CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
}

TEST_CASE("alpha plus beta must be one, and the error names the field") {
    try {
        (void)parse_config(R"({"nodes": 5, "consensus": {"alpha": 0.7, "beta": 0.5}})", false);
        FAIL("expected validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("alpha") != std::string::npos);
    }
}

TEST_CASE("parse errors carry context") {
    CHECK_THROWS_AS((void)parse_config("{not json", false), ValidationError);
}

TEST_CASE("byzantine count above the tolerance needs the unsafe flag") {
    CHECK_THROWS_AS(
        (void)parse_config(R"({"nodes": 7, "byzantine": {"count": 3}})", false),
        ValidationError);
    ScenarioConfig cfg = parse_config(
        R"({"nodes": 7, "byzantine": {"count": 3, "unsafe": true}})", false);
    CHECK(cfg.byzantine.count == 3);
}

TEST_CASE("node count floor") {
    CHECK_THROWS_AS((void)parse_config(R"({"nodes": 3})", false), ValidationError);
}

TEST_CASE("channel sources are exclusive") {
    CHECK_THROWS_AS(
        (void)parse_config(
            R"({"nodes": 5, "channel": {"slot_seconds": 0.005, "target_pl": 0.9}})", false),
        ValidationError);
}

TEST_CASE("reference config ships with the documented parameters") {
    ScenarioConfig cfg = load_config(std::string(WBFT_SOURCE_DIR) + "/configs/reference.json",
                                     false);
    CHECK(cfg.nodes.size() == 10);
    CHECK(cfg.channel.bandwidth_hz == doctest::Approx(15000.0));
    CHECK(cfg.channel.capacity_bps == doctest::Approx(15000.0));
    CHECK(cfg.channel.rate_bps == doctest::Approx(10000.0));
    CHECK(cfg.channel.subcarriers == doctest::Approx(1.0));
    CHECK(cfg.trust.mean == doctest::Approx(0.1));
    CHECK(cfg.consensus.alpha + cfg.consensus.beta == doctest::Approx(1.0));
    CHECK(cfg.modes.size() == 6);

    auto instances = expand_config(cfg);
    CHECK(instances.size() == cfg.modes.size() * cfg.channel.pl_grid.size() *
                                  cfg.seeds.size());
}

TEST_CASE("expansion solves slot lengths for each grid point") {
    ScenarioConfig cfg = parse_config(
        R"({"nodes": 5, "channel": {"pl_grid": {"lo": 0.7, "hi": 0.9, "step": 0.1}}})", false);
    auto instances = expand_config(cfg);
    REQUIRE(instances.size() == 3);
    CHECK(instances[0].p_l == doctest::Approx(0.7));
    CHECK(instances[2].p_l == doctest::Approx(0.9));
    CHECK(instances[0].slot_seconds < instances[2].slot_seconds);
}

TEST_CASE("score matrix loader enforces shape and range") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "wbft_scores";
    fs::create_directories(dir);

    auto write = [&](const char* name, const char* text) {
        std::ofstream out(dir / name);
        out << text;
        return dir / name;
    };

    auto single = write("single.csv", "a,b,c\n70,80,90\n");
    ScoreMatrix m = load_score_matrix(single);
    CHECK(m.rows.size() == 1);
    auto means = m.column_means();
    CHECK(means[0] == doctest::Approx(70.0));
    CHECK(means[2] == doctest::Approx(90.0));

    auto ragged = write("ragged.csv", "a,b\n70,80\n75\n");
    CHECK_THROWS_AS((void)load_score_matrix(ragged), ValidationError);

    auto out_of_range = write("range.csv", "a,b\n70,180\n");
    CHECK_THROWS_AS((void)load_score_matrix(out_of_range), ValidationError);

    auto not_numeric = write("nan.csv", "a,b\n70,x\n");
    CHECK_THROWS_AS((void)load_score_matrix(not_numeric), ValidationError);

    fs::remove_all(dir);
}

TEST_CASE("permuting score columns permutes the outputs identically") {
    ScoreMatrix m;
    m.nodes = {NodeId{0}, NodeId{1}, NodeId{2}};
    m.rows = {{70.0, 80.0, 90.0}, {72.0, 78.0, 88.0}};
    auto s = standardize_scores(m);

    ScoreMatrix p;
    p.nodes = {NodeId{0}, NodeId{1}, NodeId{2}};
    p.rows = {{90.0, 70.0, 80.0}, {88.0, 72.0, 78.0}};
    auto sp = standardize_scores(p);

    CHECK(sp.at(NodeId{0}) == doctest::Approx(s.at(NodeId{2})).epsilon(1e-12));
    CHECK(sp.at(NodeId{1}) == doctest::Approx(s.at(NodeId{0})).epsilon(1e-12));
    CHECK(sp.at(NodeId{2}) == doctest::Approx(s.at(NodeId{1})).epsilon(1e-12));
}
