#include <doctest.h>

#include "xxmis/errors.hpp"
#include "xxmis/instances.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

using namespace xxmis;

namespace {

std::set<int> as_set(const std::vector<int>& v) { return {v.begin(), v.end()}; }

int count_class(const ExplicitGraph& g, EdgeClass c) {
    return static_cast<int>(std::count_if(g.edges.begin(), g.edges.end(), [c](const Edge& e) { return e.cls == c; }));
}

// Every seed that picks one vertex per clique, in lexicographic order.
void for_each_seed(const GicInstance& inst, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> pick(inst.m_l(), 0);
    while (true) {
        std::vector<int> seed;
        for (int i = 0; i < inst.m_l(); ++i) seed.push_back(clique_vertices(inst, i)[pick[i]]);
        fn(seed);
        int i = 0;
        while (i < inst.m_l() && ++pick[i] == inst.cliques[i].size) pick[i++] = 0;
        if (i == inst.m_l()) break;
    }
}

bool is_clique(const ExplicitGraph& g, const std::vector<int>& s) {
    for (size_t a = 0; a < s.size(); ++a)
        for (size_t b = a + 1; b < s.size(); ++b)
            if (!g.adjacent(s[a], s[b])) return false;
    return true;
}

}  // namespace

TEST_CASE("disjoint family") {
    auto a = make_gdis(2, {4, 4}, 3, 1.0);
    CHECK(a.degeneracy() == 16);
    CHECK(a.m_g() == 3);
    auto g = expand(a);
    CHECK(g.vertex_count == 11);
    CHECK(g.edges.size() == 36);
    CHECK(count_class(g, EdgeClass::clique) == 12);
    CHECK(g.xx_edges.size() == 12);

    auto b = make_gdis(3, {9, 9, 9}, 5, 1.0);
    CHECK(b.vertex_count() == 32);
    CHECK(b.degeneracy() == 729);

    auto c = make_gdis(1, {1}, 0, 1.0);
    auto gc = expand(c);
    CHECK(gc.vertex_count == 1);
    CHECK(gc.edges.empty());
}

TEST_CASE("shared family") {
    auto a = make_gshare(2, {4, 4}, 3, 1.0);
    CHECK(a.m_g() == 5);
    CHECK(make_gshare(3, {9, 9, 9}, 2, 1.0).m_g() == 5);

    auto v3 = expand(make_gshare(1, {2}, 1, 1.0));
    CHECK(v3.vertex_count == 3);
    REQUIRE(v3.edges.size() == 2);
    CHECK(v3.edges[0].i == 0);
    CHECK(v3.edges[0].j == 1);
    CHECK(v3.edges[0].cls == EdgeClass::clique);
    CHECK(v3.edges[1].i == 0);
    CHECK(v3.edges[1].j == 2);
    CHECK(v3.edges[1].cls == EdgeClass::plain);
    CHECK(v3.xx_edges.size() == 1);
}

TEST_CASE("shared vertex has no R edges and GM is independent") {
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 4; ++n)
            for (int mr = 0; mr <= 3; ++mr) {
                auto inst = make_gshare(m, std::vector<int>(m, n), mr, 1.0);
                auto g = expand(inst);
                auto gm = gm_vertices(inst);
                CHECK(static_cast<int>(gm.size()) == m + mr);
                for (size_t a = 0; a < gm.size(); ++a)
                    for (size_t b = a + 1; b < gm.size(); ++b) CHECK_FALSE(g.adjacent(gm[a], gm[b]));
                for (int i = 0; i < m; ++i) {
                    auto cv = clique_vertices(inst, i);
                    for (int r : r_vertices(inst)) {
                        CHECK_FALSE(g.adjacent(cv.back(), r));
                        for (size_t k = 0; k + 1 < cv.size(); ++k) CHECK(g.adjacent(cv[k], r));
                    }
                }
            }
}

TEST_CASE("expand is deterministic") {
    auto inst = make_gshare(3, {3, 4, 2}, 2, 1.5);
    auto g1 = expand(inst), g2 = expand(inst);
    REQUIRE(g1.edges.size() == g2.edges.size());
    for (size_t i = 0; i < g1.edges.size(); ++i) {
        CHECK(g1.edges[i].i == g2.edges[i].i);
        CHECK(g1.edges[i].j == g2.edges[i].j);
        CHECK(g1.edges[i].cls == g2.edges[i].cls);
    }
}

TEST_CASE("invalid instances") {
    CHECK_THROWS_AS(make_gdis(1, {0}, 1, 1.0), ValidationError);
    CHECK_THROWS_AS(make_gdis(1, {2}, 1, -1.0), ValidationError);
    CHECK_THROWS_AS(make_gdis(0, {}, 1, 1.0), ValidationError);
    CHECK_THROWS_AS(make_gshare(2, {2}, 1, 1.0), ValidationError);
    CHECK_THROWS_AS(make_gdis(1, {2}, -1, 1.0), ValidationError);
}

TEST_CASE("default penalties") {
    CHECK(default_jzz(9) == doctest::Approx(3.0));
    auto inst = make_gshare(3, {9, 9, 9}, 2, 1.0);
    CHECK(inst.jzz == doctest::Approx(3.0));
    CHECK_FALSE(inst.jzz_clique.has_value());
    auto with = with_default_penalty(inst, 6.0, 4.0);
    CHECK(*with.jzz_clique == doctest::Approx(50.0 * (6 + 4 + 5)));
    CHECK(inst.anti_crossing_bearing());
}

TEST_CASE("identify cliques on the documented examples") {
    auto dis = make_gdis(2, {4, 4}, 3, 1.0);
    auto part = identify_cliques(expand(dis), {0, 4});
    REQUIRE(part.cliques.size() == 2);
    CHECK(as_set(part.cliques[0]) == as_set(clique_vertices(dis, 0)));
    CHECK(as_set(part.cliques[1]) == as_set(clique_vertices(dis, 1)));
    CHECK(as_set(part.leftover) == as_set(r_vertices(dis)));

    auto single = identify_cliques(expand(make_gdis(1, {1}, 0, 1.0)), {0});
    REQUIRE(single.cliques.size() == 1);
    CHECK(single.cliques[0] == std::vector<int>{0});
    CHECK(single.leftover.empty());

    auto sh = make_gshare(2, {4, 4}, 3, 1.0);
    auto ps = identify_cliques(expand(sh), {0, 4});
    CHECK(as_set(ps.cliques[0]) == as_set(clique_vertices(sh, 0)));
    CHECK(as_set(ps.cliques[1]) == as_set(clique_vertices(sh, 1)));
}

TEST_CASE("identify cliques rejects bad seeds") {
    auto g = expand(make_gdis(2, {3, 3}, 2, 1.0));
    CHECK_THROWS_AS(identify_cliques(g, {0, 1}), ValidationError);  // not independent
    CHECK_THROWS_AS(identify_cliques(g, {0}), ValidationError);     // not maximal
    // a single LM clique: R vertices see only one seed vertex
    auto g1 = expand(make_gdis(1, {3}, 2, 1.0));
    CHECK_THROWS_WITH_AS(identify_cliques(g1, {0}), doctest::Contains("dMDC"), ValidationError);
}

TEST_CASE("identify cliques exhaustively over small instances") {
    int exact = 0, rejected = 0;
    for (int st = 0; st < 2; ++st)
        for (int m = 1; m <= 4; ++m)
            for (int n = 1; n <= 5; ++n)
                for (int mr = 0; mr <= 4; ++mr) {
                    std::vector<int> sizes(m, n);
                    if (m >= 2) sizes[1] = std::max(1, n - 1);
                    auto inst = st ? make_gshare(m, sizes, mr, 1.0) : make_gdis(m, sizes, mr, 1.0);
                    auto g = expand(inst);
                    auto rv = r_vertices(inst);
                    for_each_seed(inst, [&](const std::vector<int>& seed) {
                        // Exact recovery is guaranteed when every R vertex sees at least two seed
                        // vertices; otherwise the result is either rejected or still a valid clique cover.
                        int seeing_r = 0;
                        for (int v : seed)
                            if (!rv.empty() && g.adjacent(v, rv[0])) ++seeing_r;
                        bool guaranteed = rv.empty() || seeing_r >= 2;
                        DriverPartition part;
                        try {
                            part = identify_cliques(g, seed);
                        } catch (const ValidationError&) {
                            CHECK_FALSE(guaranteed);
                            ++rejected;
                            return;
                        }
                        REQUIRE(static_cast<int>(part.cliques.size()) == m);
                        for (int i = 0; i < m; ++i) {
                            CHECK(is_clique(g, part.cliques[i]));
                            CHECK(as_set(part.cliques[i]).count(seed[i]) == 1);
                        }
                        if (!guaranteed) return;
                        for (int i = 0; i < m; ++i)
                            CHECK(as_set(part.cliques[i]) == as_set(clique_vertices(inst, i)));
                        CHECK(as_set(part.leftover) == as_set(rv));
                        ++exact;
                    });
                }
    CHECK(exact > 1000);
    CHECK(rejected > 0);
}

TEST_CASE("instance text round trip") {
    auto inst = make_gshare(3, {9, 8, 7}, 2, 1.0 / 3.0, 2.0 / 7.0, 1234.5678901234567);
    auto text = write_instance(inst);
    auto back = parse_instance(text);
    CHECK(write_instance(back) == text);
    CHECK(back.jzz == inst.jzz);
    CHECK(*back.jzz_clique == *inst.jzz_clique);
    CHECK(back.r_weight == inst.r_weight);
    CHECK(back.structure == Structure::shared);

    auto parsed = parse_instance("# comment\nstructure = disjoint\ncliques = 4, 4\nm_r = 3\nw = 1\n");
    CHECK(parsed.m_l() == 2);
    CHECK(parsed.jzz == doctest::Approx(default_jzz(4)));
    CHECK_THROWS_AS(parse_instance("structure = odd\ncliques = 2\nm_r = 1\nw = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_instance("cliques = 2\nm_r = 1\nw = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_instance("structure = shared\ncliques = 2\nm_r = x\nw = 1\n"), ValidationError);
    CHECK_THROWS_AS(parse_instance("structure = shared\ncliques = 2\nm_r = 1\nw = 1\nbogus = 2\n"), ValidationError);
}
