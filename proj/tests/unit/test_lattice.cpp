#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <vector>

#include "dpotts/lattice.hpp"

using dpotts::Lattice;

TEST_CASE("lattice counts") {
    const Lattice l2(2);
    CHECK(l2.n_vertices() == 4);
    CHECK(l2.n_edges() == 8);
    CHECK(l2.n_plaquettes() == 4);

    const Lattice l16(16);
    CHECK(l16.n_vertices() == 256);
    CHECK(l16.n_edges() == 512);
    CHECK(l16.n_plaquettes() == 256);
}

TEST_CASE("lattice rejects degenerate sizes") {
    CHECK_THROWS_AS(Lattice(1), std::invalid_argument);
    CHECK_THROWS_AS(Lattice(0), std::invalid_argument);
    CHECK_THROWS_AS(Lattice(-3), std::invalid_argument);
}

TEST_CASE("edge endpoints follow the arrow convention") {
    const Lattice lat(4);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            const int v = lat.vertex_at(x, y);
            const auto r = lat.edge_endpoints(Lattice::right_edge(v));
            CHECK(r.l1 == v);
            CHECK(r.l2 == lat.vertex_at((x + 1) % 4, y));
            const auto d = lat.edge_endpoints(Lattice::down_edge(v));
            CHECK(d.l1 == v);
            CHECK(d.l2 == lat.vertex_at(x, (y + 1) % 4));
        }
    }
    CHECK_THROWS_AS(lat.edge_endpoints(-1), std::out_of_range);
    CHECK_THROWS_AS(lat.edge_endpoints(lat.n_edges()), std::out_of_range);
}

TEST_CASE("every vertex is an endpoint of exactly four edges") {
    for (int L : {2, 3, 5}) {
        const Lattice lat(L);
        std::vector<int> degree(lat.n_vertices(), 0);
        for (int e = 0; e < lat.n_edges(); ++e) {
            const auto ends = lat.edge_endpoints(e);
            ++degree[ends.l1];
            ++degree[ends.l2];
        }
        for (int v = 0; v < lat.n_vertices(); ++v) CHECK(degree[v] == 4);
    }
}

TEST_CASE("plaquette incidence has signs (+,+,-,-)") {
    const Lattice lat(3);
    const auto inc = lat.incidence(0);
    CHECK(inc[0].second == +1);
    CHECK(inc[1].second == +1);
    CHECK(inc[2].second == -1);
    CHECK(inc[3].second == -1);

    // plaquette at the origin: top edge of (0,0), right edge via (1,0),
    // bottom via (0,1), left edge of (0,0)
    CHECK(inc[0].first == Lattice::right_edge(lat.vertex_at(0, 0)));
    CHECK(inc[1].first == Lattice::down_edge(lat.vertex_at(1, 0)));
    CHECK(inc[2].first == Lattice::right_edge(lat.vertex_at(0, 1)));
    CHECK(inc[3].first == Lattice::down_edge(lat.vertex_at(0, 0)));

    CHECK_THROWS_AS(lat.incidence(lat.n_plaquettes()), std::out_of_range);
}

TEST_CASE("each edge is seen by exactly two plaquettes with opposite signs") {
    for (int L : {2, 4, 7}) {
        const Lattice lat(L);
        std::map<int, std::vector<int>> signs;
        for (int p = 0; p < lat.n_plaquettes(); ++p)
            for (const auto& [e, s] : lat.incidence(p)) signs[e].push_back(s);
        REQUIRE(static_cast<int>(signs.size()) == lat.n_edges());
        for (const auto& [e, v] : signs) {
            REQUIRE(v.size() == 2);
            CHECK(v[0] + v[1] == 0);
        }
    }
}
