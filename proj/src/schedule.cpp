#include "xxmis/schedule.hpp"

#include "xxmis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace xxmis {

namespace {

void check_t(double t) {
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0,1], got " + std::to_string(t));
}

}  // namespace

void validate(const StageConfig& cfg) {
    if (!(cfg.gamma2 > 0)) throw ValidationError("gamma2 must be > 0");
    if (!(cfg.gamma1 > cfg.gamma2)) throw ValidationError("gamma1 must exceed gamma2");
    if (!(cfg.gamma0 > cfg.gamma1)) throw ValidationError("gamma0 must exceed gamma1");
    if (!(cfg.alpha >= 0)) throw ValidationError("alpha must be >= 0");
}

StageConfig default_config(int m, double gamma1_factor) {
    if (m < 1) throw ValidationError("m must be >= 1");
    if (!(gamma1_factor > 1)) throw ValidationError("gamma1 factor must exceed 1");
    StageConfig c;
    c.gamma2 = m;
    c.gamma1 = gamma1_factor * c.gamma2;
    c.gamma0 = 2.0 * c.gamma1;
    c.alpha = 2.0 * (m - 1) / m;
    return c;
}

StageConfig with_jxx(StageConfig cfg, double jxx) {
    if (!(jxx >= 0)) throw ValidationError("jxx must be >= 0");
    cfg.alpha = jxx / cfg.gamma2;
    return cfg;
}

Stage0Point stage0_params(const StageConfig& cfg, double t) {
    check_t(t);
    return {(1.0 - t) * (cfg.gamma0 - cfg.gamma1) + cfg.gamma1, t * cfg.jxx(), t};
}

MainPoint main_params(const StageConfig& cfg, double t) {
    check_t(t);
    double x = (1.0 - t) * cfg.gamma1;
    if (cfg.timing == StageTiming::halves)
        x = t <= 0.5 ? cfg.gamma1 - 2.0 * t * (cfg.gamma1 - cfg.gamma2) : 2.0 * (1.0 - t) * cfg.gamma2;
    double j = x >= cfg.gamma2 ? cfg.jxx() : cfg.alpha * x;
    return {x, j};
}

double IterationConfig::gamma1() const {
    double g = 0.0;
    for (const auto& s : steps) g = std::max(g, s.gamma2);
    return gamma1_factor * g;
}

IterationStep make_iteration_step(int m, int n_c) {
    if (m < 1 || n_c < 1) throw ValidationError("iteration step needs m >= 1 and n_c >= 1");
    IterationStep s;
    s.gamma2 = m;
    s.alpha = 2.0 * (s.gamma2 - 1.0) / s.gamma2;
    s.jxx = s.alpha * s.gamma2;
    s.jzz = 1.0 + (std::sqrt(static_cast<double>(n_c)) + 1.0) / 2.0;
    return s;
}

void validate(const IterationConfig& icfg) {
    if (icfg.steps.empty()) throw ValidationError("iteration config has no steps");
    if (!(icfg.gamma1_factor >= 2.0)) throw ValidationError("gamma1 factor K must be >= 2");
    for (const auto& s : icfg.steps) {
        if (!(s.gamma2 > 0)) throw ValidationError("iteration gamma2 must be > 0");
        if (!(s.alpha >= 0)) throw ValidationError("iteration alpha must be >= 0");
    }
}

MainPoint iter_params(const IterationConfig& icfg, double t, int k) {
    check_t(t);
    if (k < 0 || k >= static_cast<int>(icfg.steps.size()))
        throw ValidationError("iteration index out of range");
    const auto& s = icfg.steps[k];
    double x = (1.0 - t) * icfg.gamma1();
    return {x, x >= s.gamma2 ? s.jxx : s.alpha * x};
}

std::vector<double> uniform_grid(int points, double lo, double hi) {
    if (points < 2) throw ValidationError("grid needs at least 2 points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
    g.back() = hi;
    return g;
}

}  // namespace xxmis
