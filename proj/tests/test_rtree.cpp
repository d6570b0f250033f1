#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spatialq/rtree.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace spatialq;

TEST_CASE("empty tree answers empty") {
    RTree t = RTree::from_points({}, 16);
    CHECK(t.empty());
    CHECK(t.range_search({0, 0, 1, 1}).empty());
    CHECK(t.knn_search({0, 0, 0, {}}, 3).neighbors.empty());
}

TEST_CASE("single point tree has a degenerate mbr") {
    RTree t = RTree::from_points({{3, 4, 9, {}}}, 16);
    CHECK(t.node_count() == 1);
    CHECK(t.boundary() == Rect{3, 4, 3, 4});
    const auto hits = t.range_search({0, 0, 5, 5});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0]->id == 9);
}

TEST_CASE("str bulk load: height and retrievability at fanout 16") {
    const Rect bounds{0, 0, 100, 100};
    const auto pts = testgen::random_points(1000, bounds, 17);
    RTree t = RTree::from_points(pts, 16);

    // ceil(log_16(1000)) = 3 levels
    CHECK(t.height() == 3);

    auto hits = t.range_search(bounds);
    std::vector<std::uint64_t> ids;
    for (const Point* p : hits) ids.push_back(p->id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == oracle::brute_range(pts, bounds));
    CHECK(ids.size() == 1000);
}

TEST_CASE("child mbrs nest inside parents and fanout is respected") {
    const Rect bounds{0, 0, 300, 300};
    const auto pts = testgen::random_points(2000, bounds, 29);
    RTree t = RTree::from_points(pts, 25);
    for (const auto& n : t.nodes()) {
        if (n.leaf) {
            CHECK(n.entry_ords.size() <= 25);
            for (auto ord : n.entry_ords) CHECK(contains(n.mbr, t.entry_mbrs()[ord]));
        } else {
            CHECK(n.children.size() <= 25);
            for (auto c : n.children) CHECK(contains(n.mbr, t.nodes()[c].mbr));
        }
    }
}

TEST_CASE("range search equals brute force") {
    const Rect bounds{0, 0, 512, 512};
    const auto pts = testgen::random_points(10000, bounds, 31);
    RTree t = RTree::from_points(pts, 25);
    const auto queries = testgen::random_rects(100, bounds, 60, 32);
    for (const auto& q : queries) {
        auto hits = t.range_search(q.rect);
        std::vector<std::uint64_t> ids;
        for (const Point* p : hits) ids.push_back(p->id);
        std::sort(ids.begin(), ids.end());
        CHECK(ids == oracle::brute_range(pts, q.rect));
    }
}

TEST_CASE("knn equals brute force") {
    const Rect bounds{0, 0, 256, 256};
    const auto pts = testgen::random_points(5000, bounds, 33);
    RTree t = RTree::from_points(pts, 25);
    const auto queries = testgen::random_points(60, bounds, 34);
    for (const auto& q : queries) {
        const auto got = t.knn_search(q, 25);
        const auto want = oracle::brute_knn(pts, q, 25);
        REQUIRE(got.neighbors.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i)
            CHECK(got.neighbors[i].point_id == want[i].point_id);
    }
}

TEST_CASE("rect tree answers id searches") {
    std::vector<Rect> rects{{0, 0, 10, 10}, {20, 20, 30, 30}, {5, 5, 15, 15}};
    RTree t = RTree::from_rects(rects, {100, 200, 300}, 4);
    auto ids = t.search_ids({8, 8, 9, 9});
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<std::uint64_t>{100, 300});
    CHECK(t.search_ids({50, 50, 60, 60}).empty());
}
