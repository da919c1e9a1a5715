#include "xxmis/bounds.hpp"

#include "xxmis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace xxmis {

namespace {

// Relative slack so that equalities such as steer = sep at J_zz = J_zz^steer survive rounding.
bool leq(double a, double b) {
    return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

BoundsReport jxx_bounds(int m, int m_r, int m_g, int n_min, int n_max, double gamma2, double jzz,
                        Structure structure) {
    if (m < 1 || m_r < 0 || m_g < 1) throw ValidationError("bounds: m, m_g must be >= 1 and m_r >= 0");
    if (n_min < 2 || n_max < n_min) throw ValidationError("bounds: steer bound undefined for n_c = 1");
    if (!(gamma2 > 0) || !(jzz > 0)) throw ValidationError("bounds: gamma2 and jzz must be > 0");
    BoundsReport r;
    r.jxx_lift = 2.0 * (static_cast<double>(m) / m_g) * gamma2;
    r.jxx_steer = 4.0 / (n_min - 1) * (m_r * (jzz - 1.0) + 1.0);
    r.jxx_sep = 2.0 * (gamma2 - 1.0);
    r.jxx_sink = structure == Structure::shared
                     ? 2.0 * (gamma2 - 1.0) + 2.0 * m_r * jzz / n_max
                     : std::numeric_limits<double>::infinity();
    r.jzz_steer = m_r > 0 ? jzz_steer_bound(m, m_r, n_min) : std::numeric_limits<double>::infinity();
    r.jzz_steer_advisory = !jzz_steer_in_hypotheses(m, m_r);
    r.jzz_inter_flag = leq(jzz, r.jzz_steer);
    r.jzz_over_m = jzz / m;
    r.witness = 2.0 * (m - 1);
    double lo = std::max(r.jxx_lift, r.jxx_steer);
    double hi = std::min(r.jxx_sep, r.jxx_sink);
    if (leq(lo, hi)) r.window = std::make_pair(lo, hi);
    return r;
}

BoundsReport jxx_bounds(int m, int m_r, int m_g, int n_c, double gamma2, double jzz,
                        Structure structure) {
    return jxx_bounds(m, m_r, m_g, n_c, n_c, gamma2, jzz, structure);
}

double jzz_steer_bound(int m, int m_r, int n_c) {
    if (m_r < 1) throw ValidationError("jzz_steer_bound: m_r must be >= 1");
    return 1.0 + ((n_c - 1.0) * (m - 1.0) - 2.0) / (2.0 * m_r);
}

bool jzz_steer_in_hypotheses(int m, int m_r) { return m >= 3 && m_r >= 2; }

int conservative_mr(int m, int n_c) {
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n_c)) * m)) - 1;
}

FeasibilityVerdict feasibility_check(const GicInstance& inst, const StageConfig& cfg) {
    validate(inst);
    validate(cfg);
    FeasibilityVerdict v;
    int m = inst.m_l();
    v.bounds = jxx_bounds(m, inst.r_count, inst.m_g(), inst.min_size(), inst.max_size(), cfg.gamma2,
                          inst.jzz, inst.structure);
    v.jxx = cfg.jxx();
    const auto& b = v.bounds;
    auto check = [&](double val, bool& ok) {
        ok = leq(b.jxx_lift, val) && leq(b.jxx_steer, val) && leq(val, b.jxx_sep) && leq(val, b.jxx_sink);
    };
    check(b.witness, v.witness_in_window);
    check(v.jxx, v.jxx_in_window);
    if (!leq(b.jxx_lift, v.jxx)) v.violated.push_back("lift");
    if (!leq(b.jxx_steer, v.jxx)) v.violated.push_back("steer");
    if (!leq(v.jxx, b.jxx_sep)) v.violated.push_back("sep");
    if (!leq(v.jxx, b.jxx_sink)) v.violated.push_back("sink");
    v.feasible = b.window.has_value() && v.jxx_in_window;
    return v;
}

std::string format_bounds(const BoundsReport& r) {
    std::ostringstream os;
    os.precision(10);
    os << "J_xx lift   " << r.jxx_lift << "\n";
    os << "J_xx steer  " << r.jxx_steer << "\n";
    os << "J_xx sep    " << r.jxx_sep << "\n";
    os << "J_xx sink   " << r.jxx_sink << "\n";
    os << "J_zz steer  " << r.jzz_steer << (r.jzz_steer_advisory ? "  (advisory)" : "") << "\n";
    os << "J_zz inter  " << (r.jzz_inter_flag ? "ok" : "violated") << "  (J_zz/m = " << r.jzz_over_m << ")\n";
    os << "witness     " << r.witness << "\n";
    if (r.window)
        os << "window      [" << r.window->first << ", " << r.window->second << "]\n";
    else
        os << "window      empty\n";
    return os.str();
}

}  // namespace xxmis
