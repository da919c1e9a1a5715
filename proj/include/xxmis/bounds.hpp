#pragma once

#include "xxmis/instances.hpp"
#include "xxmis/schedule.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xxmis {

struct BoundsReport {
    double jxx_lift = 0.0;
    double jxx_steer = 0.0;
    double jxx_sep = 0.0;
    double jxx_sink = 0.0;  // +inf for the disjoint structure
    double jzz_steer = 0.0;
    bool jzz_steer_advisory = false;  // outside m ≥ 3, m_r ≥ 2
    bool jzz_inter_flag = false;      // J_zz ≤ J_zz^steer
    double jzz_over_m = 0.0;
    std::optional<std::pair<double, double>> window;
    double witness = 0.0;  // 2(m-1)
};

BoundsReport jxx_bounds(int m, int m_r, int m_g, int n_c, double gamma2, double jzz,
                        Structure structure);

// Non-uniform sizes: steer uses n_min, sink uses n_max.
BoundsReport jxx_bounds(int m, int m_r, int m_g, int n_min, int n_max, double gamma2, double jzz,
                        Structure structure);

double jzz_steer_bound(int m, int m_r, int n_c);
bool jzz_steer_in_hypotheses(int m, int m_r);

// m_r replaced by the conservative ceil(√n_c·m) - 1 when unknown.
int conservative_mr(int m, int n_c);

struct FeasibilityVerdict {
    BoundsReport bounds;
    double jxx = 0.0;
    bool witness_in_window = false;
    bool jxx_in_window = false;
    std::vector<std::string> violated;
    bool feasible = false;
};

FeasibilityVerdict feasibility_check(const GicInstance& inst, const StageConfig& cfg);

std::string format_bounds(const BoundsReport& r);

}  // namespace xxmis
