#pragma once

#include <utility>
#include <vector>

namespace xxmis {

// linear: x = (1-t)Γ1 over both stages.
// halves: Stage 1 maps Γ1 → Γ2 on [0, 1/2] and Stage 2 maps Γ2 → 0 on [1/2, 1].
enum class StageTiming { linear, halves };

struct StageConfig {
    double gamma0 = 4.0;
    double gamma1 = 2.0;
    double gamma2 = 1.0;
    double alpha = 0.0;
    StageTiming timing = StageTiming::linear;

    double jxx() const { return alpha * gamma2; }
    double t_sep() const { return timing == StageTiming::halves ? 0.5 : 1.0 - gamma2 / gamma1; }
};

void validate(const StageConfig& cfg);

// Γ2 = m, Γ1 = K·Γ2, Γ0 = 2Γ1, α = 2(m-1)/m.
StageConfig default_config(int m, double gamma1_factor = 2.0);
StageConfig with_jxx(StageConfig cfg, double jxx);

struct Stage0Point {
    double x, jxx, p;
};
struct MainPoint {
    double x, jxx;
};

Stage0Point stage0_params(const StageConfig& cfg, double t);
MainPoint main_params(const StageConfig& cfg, double t);

struct IterationStep {
    double gamma2 = 1.0;
    double alpha = 0.0;
    double jxx = 0.0;
    double jzz = 1.0;
    std::vector<std::pair<int, int>> driver_edges;
};

struct IterationConfig {
    std::vector<IterationStep> steps;
    double gamma1_factor = 2.0;

    double gamma1() const;
};

// Γ2 = m, α = 2(Γ2-1)/Γ2, J_xx = αΓ2, J_zz = 1 + (√n_c + 1)/2.
IterationStep make_iteration_step(int m, int n_c);

void validate(const IterationConfig& icfg);

// Shared x = (1-t)Γ1; iteration k couples with J_xx^(k) while x ≥ Γ2^(k), α_k·x after.
MainPoint iter_params(const IterationConfig& icfg, double t, int k);

std::vector<double> uniform_grid(int points, double lo = 0.0, double hi = 1.0);

}  // namespace xxmis
