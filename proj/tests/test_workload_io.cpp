#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "spatialq/config.hpp"
#include "spatialq/io.hpp"
#include "spatialq/workload.hpp"

using namespace spatialq;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& text) {
        std::ofstream out(path);
        out << text;
    }
};

}  // namespace

TEST_CASE("ingest parses the documented line format") {
    TempFile f("sq_pts.csv");
    f.write("# comment\n42,-87.6,41.9\n7,1.5,2.5,hello\n\n");
    const auto res = ingest_points(f.path);
    REQUIRE(res.points.size() == 2);
    CHECK(res.points[0].id == 42);
    CHECK(res.points[0].x == doctest::Approx(-87.6));
    CHECK(res.points[0].y == doctest::Approx(41.9));
    CHECK(res.points[1].payload == "hello");
    CHECK(res.skipped == 0);
}

TEST_CASE("ingest error policy") {
    SUBCASE("missing file is fatal") {
        CHECK_THROWS_AS(ingest_points("/nonexistent/nowhere.csv"), DataError);
    }
    SUBCASE("empty file is fatal") {
        TempFile f("sq_empty.csv");
        f.write("# nothing here\n");
        CHECK_THROWS_AS(ingest_points(f.path), DataError);
    }
    SUBCASE("one bad line in a hundred is a warning") {
        TempFile f("sq_mostly_good.csv");
        std::string text;
        for (int i = 0; i < 99; ++i)
            text += std::to_string(i) + "," + std::to_string(i) + ".5,2\n";
        text += "not,a,point\n";
        f.write(text);
        const auto res = ingest_points(f.path);
        CHECK(res.points.size() == 99);
        CHECK(res.skipped == 1);
    }
    SUBCASE("more than 10% malformed is fatal") {
        TempFile f("sq_bad.csv");
        f.write("1,2,3\nbad\nalso bad\n");
        CHECK_THROWS_AS(ingest_points(f.path), DataError);
    }
    SUBCASE("non-finite coordinates are malformed") {
        TempFile f("sq_inf.csv");
        f.write("1,2,3\n2,inf,0\n1,4,5\n3,1,1\n4,1,2\n5,1,3\n6,1,4\n7,1,5\n8,1,6\n9,1,7\n10,1,8\n");
        const auto res = ingest_points(f.path);
        CHECK(res.skipped == 1);
    }
}

TEST_CASE("point and query files round-trip") {
    TempFile f("sq_roundtrip.csv");
    std::vector<Point> pts{{1.25, -3.5, 10, {}}, {0.1, 0.2, 11, "tag"}};
    write_points(f.path, pts);
    const auto back = ingest_points(f.path).points;
    REQUIRE(back.size() == 2);
    CHECK(back[0].x == pts[0].x);
    CHECK(back[0].y == pts[0].y);
    CHECK(back[1].payload == "tag");

    TempFile q("sq_queries.csv");
    std::vector<RangeQuery> queries{{{0, 0, 1.5, 2.5}, 3}, {{-1, -1, 0, 0}, 4}};
    write_range_queries(q.path, queries);
    const auto qback = ingest_range_queries(q.path).queries;
    REQUIRE(qback.size() == 2);
    CHECK(qback[0].rect == queries[0].rect);
    CHECK(qback[1].id == 4);
}

TEST_CASE("workload generation is deterministic per seed") {
    const Rect bounds{0, 0, 100, 100};
    WorkloadSpec spec;
    spec.count = 200;
    spec.seed = 9;
    spec.min_extent = 2;
    spec.max_extent = 5;

    const auto a = gen_range_workload(spec, bounds);
    const auto b = gen_range_workload(spec, bounds);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].rect == b[i].rect);
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].rect.valid());
        CHECK(contains(bounds, a[i].rect));
    }

    spec.seed = 10;
    const auto c = gen_range_workload(spec, bounds);
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i].rect == c[i].rect)) any_different = true;
    CHECK(any_different);
}

TEST_CASE("hotspot workloads respect the mix weights") {
    const Rect bounds{0, 0, 1000, 1000};
    WorkloadSpec spec;
    spec.kind = WorkloadSpec::Kind::hotspot;
    spec.count = 10000;
    spec.seed = 11;

    SUBCASE("weight 1.0 confines every center") {
        spec.centers = {{300, 300, 50, 1.0}};
        const auto focals = gen_knn_workload(spec, bounds);
        for (const auto& p : focals)
            CHECK(dist(p, {300, 300, 0, {}}) <= 50.0 + 1e-9);
    }
    SUBCASE("80/20 over two disjoint centers lands within 2%") {
        spec.centers = {{200, 200, 50, 0.8}, {800, 800, 50, 0.2}};
        const auto focals = gen_knn_workload(spec, bounds);
        std::size_t first = 0;
        for (const auto& p : focals)
            if (dist(p, {200, 200, 0, {}}) <= 50.0) ++first;
        const double share = static_cast<double>(first) / static_cast<double>(spec.count);
        CHECK(share > 0.78);
        CHECK(share < 0.82);
    }
    SUBCASE("weights must sum to one") {
        spec.centers = {{1, 1, 5, 0.5}};
        CHECK_THROWS_AS(gen_knn_workload(spec, bounds), std::invalid_argument);
    }
}

TEST_CASE("config files parse, reject unknown keys, and map to engine knobs") {
    TempFile f("sq_config.cfg");
    f.write(
        "# engine setup\n"
        "engine.n_partitions = 16\n"
        "cost.p_e = 0.3\n"
        "filter.enabled = off\n"
        "cost.mode = sampled\n");
    const ConfigMap cfg = ConfigMap::from_file(f.path);
    CHECK(cfg.get_int("engine.n_partitions", 0) == 16);
    CHECK(cfg.get_double("cost.p_e", 0) == doctest::Approx(0.3));

    const EngineConfig ecfg = engine_config_from(cfg);
    CHECK(ecfg.n_partitions == 16);
    CHECK(ecfg.cost.p_e == doctest::Approx(0.3));
    CHECK_FALSE(ecfg.use_filter);
    CHECK(ecfg.cost.mode == CostMode::sampled);

    SUBCASE("unknown keys name themselves") {
        TempFile bad("sq_bad.cfg");
        bad.write("cost.p_q = 1\n");
        CHECK_THROWS_WITH_AS(ConfigMap::from_file(bad.path), doctest::Contains("cost.p_q"),
                             ConfigError);
    }
    SUBCASE("malformed values name the key") {
        ConfigMap c;
        c.set("cost.p_e", "fast");
        CHECK_THROWS_WITH_AS(c.get_double("cost.p_e", 0), doctest::Contains("cost.p_e"),
                             ConfigError);
    }
}
