#include <doctest.h>

#include "xxmis/analysis.hpp"
#include "xxmis/errors.hpp"
#include "xxmis/hamiltonians.hpp"

#include <cmath>
#include <random>

using namespace xxmis;

namespace {

StageConfig small_config(double jxx) {
    StageConfig c;
    c.gamma2 = 1;
    c.gamma1 = 2;
    c.gamma0 = 4;
    c.alpha = jxx;
    return c;
}

}  // namespace

TEST_CASE("sweep of a constant provider is flat") {
    Mat h = b_matrix(1.0, 0.5);
    auto r = sweep([&](double) { return h; }, uniform_grid(11), 2, 3);
    for (const auto& lv : r.trace.levels) {
        CHECK(lv[0] == r.trace.levels[0][0]);
        CHECK(lv[1] == r.trace.levels[0][1]);
    }
    CHECK_NOTHROW(validate(r.trace));
}

TEST_CASE("single vertex sweep matches the closed-form gap") {
    auto grid = uniform_grid(51);
    auto r = sweep([](double t) { return b_matrix(1.0, 2 * (1 - t)); }, grid, 2);
    auto gap = r.trace.gap();
    for (size_t i = 0; i < grid.size(); ++i) {
        double x = 2 * (1 - grid[i]);
        CHECK(gap[i] == doctest::Approx(std::sqrt(1 + x * x)).epsilon(1e-12));
        CHECK(r.ground[i].minCoeff() >= -1e-10);
    }
}

TEST_CASE("sweep is independent of the thread count") {
    auto inst = make_gshare(2, {3, 3}, 2, 1.0);
    auto prov = [&](double t) { return build_low_energy(inst, 2 * (1 - t), 0.8 * (1 - t)).mat; };
    auto grid = uniform_grid(21);
    auto a = sweep(prov, grid, 3, 1), b = sweep(prov, grid, 3, 4);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(a.trace.levels[i] == b.trace.levels[i]);
        CHECK((a.ground[i] - b.ground[i]).norm() == 0.0);
    }
}

TEST_CASE("sector model reproduces the dense low-energy spectrum") {
    for (int st = 0; st < 2; ++st)
        for (auto sizes : {std::vector<int>{3, 3}, std::vector<int>{4, 2}, std::vector<int>{1, 3}}) {
            auto inst = st ? make_gshare(2, sizes, 2, 1.0, 1.8) : make_gdis(2, sizes, 2, 1.0, 1.8);
            SectorModel sm(inst);
            for (double j : {0.0, 1.3}) {
                auto ev = sym_eigenvalues(build_low_energy(inst, 0.9, j).mat);
                auto sol = sm.solve(0.9, j, 6, true);
                for (int k = 0; k < 6; ++k) CHECK(std::abs(sol.values(k) - ev(k)) < 1e-10);
                auto gs = ground_state(build_low_energy(inst, 0.9, j).mat);
                CHECK(std::abs(std::abs(sol.ground.dot(gs.vector)) - 1.0) < 1e-8);
            }
            CHECK(sm.low_dim() == low_energy_dim(inst));
        }
}

TEST_CASE("bare curves") {
    auto inst = make_gshare(3, {9, 9, 9}, 2, 1.0);
    double g2 = 3;
    double b0 = -0.5 * (1 + std::sqrt(1 + g2 * g2));
    CHECK(bare_gm(inst, g2) == doctest::Approx(5 * b0));
    // the large-x form -((m + m_r)/2)(1 + Γ2)
    CHECK(bare_gm(inst, 100) == doctest::Approx(-2.5 * 101).epsilon(1e-3));
    // LM slope at large x with jxx = 0
    double h = 1e-3, x = 1e5;
    double slope = (bare_lm(inst, x + h, 0) - bare_lm(inst, x - h, 0)) / (2 * h);
    CHECK(slope == doctest::Approx(-3 * 3 / 2.0).epsilon(1e-6));
    // m = 1: the LM curve is the clique ground energy
    auto one = make_gdis(1, {4}, 1, 1.0);
    auto cr = clique_reduce(4, 1.0, 0.8, 0.3);
    CHECK(bare_lm(one, 0.8, 0.3) == doctest::Approx(b_eigen(cr.w_eff, cr.same_sign.x).beta0));
    CHECK(std::isnan(bare_as0(make_gdis(2, {1, 3}, 1, 1.0), 1.0, 0.0)));
}

TEST_CASE("AS0 curve is the ground energy of the all-spin-0 block") {
    for (int st = 0; st < 2; ++st) {
        auto inst = st ? make_gshare(2, {3, 4}, 2, 1.0, 1.6) : make_gdis(2, {3, 4}, 2, 1.0, 1.6);
        for (double x : {0.3, 1.0, 2.0}) {
            auto bs = block_hamiltonians(inst, x, 0.7);
            CHECK(bare_as0(inst, x, 0.7) == doctest::Approx(sym_eigenvalues(bs.H_Q.mat)(0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("anti-crossing detection: no crossing for a fixed-sign two-level system") {
    auto grid = uniform_grid(101);
    std::vector<double> lo, hi, gap, spacing;
    for (double t : grid) {
        auto e = b_eigen(1.0, 2 * (1 - t));
        lo.push_back(e.beta0);
        hi.push_back(e.beta1);
        gap.push_back(e.beta1 - e.beta0);
        spacing.push_back(1.0);
    }
    auto r = detect_anticrossing(grid, lo, hi, gap, spacing);
    CHECK(r.classification == CrossingClass::none);
    CHECK(r.t_star.empty());
    CHECK(std::string(crossing_class_name(r.classification)) == "none");
}

TEST_CASE("anti-crossing detection: bisection and classification") {
    auto grid = uniform_grid(11);
    std::vector<double> a, b, gap, spacing;
    auto diff = [](double t) { return t - 0.4321; };
    for (double t : grid) {
        a.push_back(diff(t));
        b.push_back(0.0);
        gap.push_back(0.001 + std::abs(diff(t)));
        spacing.push_back(1.0);
    }
    LevelBlocks same{{1, 0}, {1, 0}}, distinct{{1, 0}, {0, 1}}, mixed{{1, 0}, {0.5, 0.5}};
    auto r = detect_anticrossing(grid, a, b, gap, spacing, 0.1, diff, &same);
    REQUIRE(r.t_star.size() == 1);
    CHECK(std::abs(r.t_star[0] - 0.4321) <= 1e-6);
    CHECK(r.small_gap);
    CHECK(r.classification == CrossingClass::tunneling);
    CHECK(detect_anticrossing(grid, a, b, gap, spacing, 0.1, diff, &distinct).classification ==
          CrossingClass::block_level);
    CHECK(detect_anticrossing(grid, a, b, gap, spacing, 0.1, diff, &mixed).classification ==
          CrossingClass::interference);
    CHECK(detect_anticrossing(grid, a, b, gap, spacing).classification == CrossingClass::unclassified);
}

TEST_CASE("grid refinement") {
    auto g = refine_grid(uniform_grid(11), {0.5}, 0.02, 10);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
    int inside = 0;
    for (double t : g) inside += std::abs(t - 0.5) <= 0.02 + 1e-12;
    CHECK(inside >= 5);
}

TEST_CASE("localization orderings agree") {
    auto inst = make_gdis(3, {4, 4, 4}, 4, 1.0, 2.0);
    auto cfg = with_jxx(default_config(3), 4.0);
    auto grid = uniform_grid(6, 0.0, cfg.t_sep());
    auto r = localization(inst, cfg, grid, 3, InnerSide::R);
    auto l = localization(inst, cfg, grid, 3, InnerSide::L);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(r.w_l0[i] - l.w_l0[i]) < 1e-10);
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(r.w_r_cum[i][k] - l.w_r_cum[i][k]) < 1e-10);
            CHECK(r.w_r_cum[i][k] >= -1e-15);
            CHECK(r.w_r_cum[i][k] <= 1 + 1e-12);
            if (k) CHECK(r.w_r_cum[i][k] >= r.w_r_cum[i][k - 1] - 1e-15);
        }
    }
    CHECK_THROWS_AS(localization(inst, cfg, grid, 5), ValidationError);
}

TEST_CASE("L0 weight is large at t = 0 for a small R side") {
    auto inst = make_gdis(3, {9, 9, 9}, 2, 1.0);
    auto cfg = with_jxx(default_config(3), 4.0);
    auto tr = localization(inst, cfg, {0.0}, 1);
    CHECK(tr.w_l0[0] > 0.05);
}

TEST_CASE("negative fraction") {
    Vec v(4);
    v << 0.5, -0.5, 0.5, 0.5;
    CHECK(negative_fraction(v) == doctest::Approx(0.25));
    v << -0.5, -0.5, -0.5, 0.5;  // gauge flips the sign
    CHECK(negative_fraction(v) == doctest::Approx(0.25));
    v << 1, 0, 0, 0;
    CHECK(negative_fraction(v) == 0.0);
}

TEST_CASE("stoquastic providers have no negative amplitudes") {
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> un(1, 4), um(1, 3), ur(0, 2);
    std::uniform_real_distribution<double> uj(0.5, 4.0);
    auto grid = uniform_grid(11);
    for (int i = 0; i < 50; ++i) {
        int m = um(rng);
        std::vector<int> sizes;
        for (int k = 0; k < m; ++k) sizes.push_back(un(rng));
        auto inst = (i % 2) ? make_gshare(m, sizes, ur(rng), 1.0, uj(rng)) : make_gdis(m, sizes, ur(rng), 1.0, uj(rng));
        for (auto [t, f] : negativity(inst, small_config(0.0), grid)) CHECK(f <= 1e-10);
        auto neg = negativity([&](double t) { return build_low_energy(inst, 2 * (1 - t), -uj(rng) * (1 - t)).mat; },
                              grid);
        for (auto [t, f] : neg) CHECK(f <= 1e-10);
    }
}

TEST_CASE("M/D block form") {
    auto inst = make_gshare(3, {9, 9, 9}, 2, 1.0, 3.0);
    auto f = md_block_form(inst, 0.5, 4.0);
    CHECK(f.H_M.rows() == 8);
    CHECK(f.H_D.rows() == 12);
    for (int i = 0; i < f.H_D.rows(); ++i)
        for (int j = 0; j < f.H_D.cols(); ++j)
            if (i != j) CHECK(f.H_D(i, j) <= 1e-12);
    for (int i = 0; i < f.H_M.rows(); ++i)
        for (int j = 0; j < f.H_M.cols(); ++j)
            if (i != j) CHECK(f.H_M(i, j) <= 1e-12);
    CHECK(f.V.minCoeff() >= -1e-12);
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0, 1);
    for (int rep = 0; rep < 100; ++rep) {
        Vec um(8);
        for (int i = 0; i < 8; ++i) um(i) = u(rng);
        CHECK(md_dependent_response(f, um).maxCoeff() <= 1e-12);
    }
    auto zero = md_block_form(inst, 0.5, 0.0);
    CHECK(zero.V.cwiseAbs().maxCoeff() < 1e-12);
    Vec ones = Vec::Ones(8);
    CHECK(md_dependent_response(zero, ones).cwiseAbs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(md_block_form(make_gdis(3, {9, 9, 9}, 2, 1.0), 0.5, 4.0), ValidationError);
    CHECK_THROWS_AS(md_block_form(make_gshare(3, {9, 9, 9}, 2, 1.0, 1.0), 0.5, 0.6), ValidationError);
}

TEST_CASE("V3 M/D reduction is the two-state computational matrix") {
    for (int n : {2, 4, 9})
        for (double j : {0.3, 0.6}) {
            auto f = md_block_form(make_gshare(1, {n}, 1, 1.0, 3.0), 0.4, j);
            REQUIRE(f.H_M.rows() == 2);
            REQUIRE(f.H_D.rows() == 1);
            Mat r(2, 2);
            r << f.H_M(1, 1), f.V(1, 0), f.V(1, 0), f.H_D(0, 0);
            CHECK(max_abs_diff(r, v3_eff_comp(n, 1.0, 3.0, j)) < 1e-12);
        }
}

TEST_CASE("V3 matrices") {
    for (int n : {2, 5, 9}) {
        double w = 1, jzz = 1.7, x = 0.6, j = 0.45;
        Mat comp = v3_full_comp(n, w, jzz, x, j);
        Mat ang = v3_full_ang(n, w, jzz, x, j);
        CHECK(max_abs_diff(conjugate(comp, v3_transform(n)), ang) < 1e-12);
        CHECK(ang(0, 4) == doctest::Approx(-std::sqrt((n - 1.0) / (n * n)) * jzz));
        // the assembled angular block of the smallest shared instance
        auto bs = block_hamiltonians(make_gshare(1, {n}, 1, w, jzz), x, j);
        CHECK(max_abs_diff(bs.assembled.mat, ang) < 1e-12);
        // the effective angular block is the R-occupied restriction
        Mat eff = v3_eff_ang(n, w, jzz, x, j);
        const int idx[] = {0, 2, 4};
        Mat sub(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) sub(a, b) = ang(idx[a], idx[b]);
        CHECK(max_abs_diff(sub, eff) < 1e-12);
    }
}

TEST_CASE("V3 amplitudes") {
    auto grid = uniform_grid(101);
    auto stoq = v3_model(9, 1.0, 2.0, small_config(0.0), grid);
    for (const auto& p : stoq.points) {
        CHECK(p.alpha >= -1e-10);
        CHECK(p.beta >= -1e-10);
    }
    auto cfg = small_config(0.6);
    auto res = v3_model(9, 1.0, 2.0, cfg, grid);
    bool flipped = false;
    double flip_t = -1;
    for (size_t i = 1; i < res.points.size(); ++i) {
        const auto& p = res.points[i];
        CHECK(p.alpha > 0);
        CHECK(std::abs(p.signed_comp.cwiseAbs().sum() - 1.0) < 1e-12);
        CHECK(std::abs(p.signed_ang.cwiseAbs().sum() - 1.0) < 1e-12);
        if (!flipped && res.points[i - 1].beta > 0 && p.beta < 0) {
            flipped = true;
            flip_t = p.t;
        }
    }
    CHECK(flipped);
    CHECK(flip_t > cfg.t_sep());
}

TEST_CASE("composite instances") {
    CompositeInstance c{{{1, 3}, {1, 2}}, 2, 1.0, 1.5};
    auto g = expand(c);
    CHECK(g.vertex_count == 7);
    double x = 0.8;
    std::vector<double> j{0.7, 0.0};
    auto lv = composite_levels(c, x, j, 4);
    // dense oracle on the low-energy space: XX only on the first group
    auto g2 = g;
    g2.xx_edges.clear();
    for (auto e : g.xx_edges)
        if (e.first < 3 && e.second < 3) g2.xx_edges.push_back(e);
    auto ev = sym_eigenvalues(build_low_energy(g2, x, 0.7).mat);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(lv(k) - ev(k)) < 1e-10);

    CompositeInstance c2{{{2, 2}, {1, 3}}, 1, 1.0, 1.5};
    auto ev2 = sym_eigenvalues(build_low_energy(expand(c2), x, 0.0).mat);
    CHECK(std::abs(composite_levels(c2, x, {0.0, 0.0}, 1)(0) - ev2(0)) < 1e-10);
}

TEST_CASE("iteration demo on a small composite") {
    CompositeInstance c{{{2, 9}, {2, 4}}, 3, 1.0, default_jzz(9)};
    auto icfg = composite_iterations(c);
    auto out = iterate_demo(c, icfg, uniform_grid(201), 3);
    REQUIRE(out.size() == 3);
    // GM curve is independent of the drivers
    const auto* gm0 = out[0].trace.curve("bare-GM");
    REQUIRE(gm0);
    for (const auto& it : out) CHECK(it.trace.curve("bare-GM")->values == gm0->values);
    for (size_t d = 1; d < out.size(); ++d) CHECK(out[d].crossings <= out[d - 1].crossings);
}
