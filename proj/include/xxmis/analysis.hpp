#pragma once

#include "xxmis/blocks.hpp"
#include "xxmis/instances.hpp"
#include "xxmis/linalg.hpp"
#include "xxmis/schedule.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace xxmis {

struct TaggedCurve {
    std::string tag;
    std::vector<double> values;
};

struct SpectrumTrace {
    std::vector<double> grid;
    std::vector<std::vector<double>> levels;  // per t, ascending
    std::vector<TaggedCurve> curves;

    const TaggedCurve* curve(const std::string& tag) const;
    std::vector<double> gap(int upper = 1) const;
};

void validate(const SpectrumTrace& tr);

// Worker count: ANNEAL_THREADS if set (≥ 1), else hardware concurrency.
int sweep_threads();

using MatrixProvider = std::function<Mat(double)>;

struct SweepResult {
    SpectrumTrace trace;
    std::vector<Vec> ground;  // tracked, gauge fixed
};

// Grid points are evaluated independently (possibly in parallel) and the ground
// vector is then tracked in a sequential pass.
SweepResult sweep(const MatrixProvider& provider, const std::vector<double>& grid, int k,
                  int threads = 0);

// Exact spectrum of a GicInstance's low-energy Hamiltonian assembled from its
// invariant angular sectors (main sector plus the extra spin-0 sectors).
class SectorModel {
public:
    explicit SectorModel(const GicInstance& inst);

    struct Solution {
        Vec values;                      // lowest k with multiplicity
        std::vector<std::string> level_tags;  // invariant sector of each level
        Vec ground;                      // low-energy basis
        Vec ground_main;                 // main-sector (angular) components when tagged "main"
        std::vector<double> block_weights;  // main sector: weight per ⊙_q mask (0 = same-sign)
    };

    Solution solve(double x, double jxx, int k, bool want_vector, const Vec* reference = nullptr) const;

    int low_dim() const { return low_dim_; }
    int sector_count() const { return static_cast<int>(sectors_.size()); }
    const GicInstance& instance() const { return inst_; }
    const Mat& main_transform() const { return transforms_[0]; }

private:
    struct Sector {
        std::vector<LocalKind> kinds;
        long long multiplicity = 1;
        std::string tag;
    };
    GicInstance inst_;
    int low_dim_ = 0;
    std::vector<Sector> sectors_;
    std::vector<Mat> transforms_;  // lazily only for main and first copy of each z sector
};

SpectrumTrace bare_curves(const GicInstance& inst, const StageConfig& cfg,
                          const std::vector<double>& grid);
double bare_lm(const GicInstance& inst, double x, double jxx);
double bare_gm(const GicInstance& inst, double x);
double bare_as0(const GicInstance& inst, double x, double jxx);

enum class CrossingClass { none, tunneling, block_level, interference, unclassified };
const char* crossing_class_name(CrossingClass c);

struct LevelBlocks {
    std::vector<double> lower;  // block weights of level 0
    std::vector<double> upper;  // block weights of level 1
};

struct CrossingReport {
    std::vector<double> t_star;
    double min_gap = 0.0;
    double t_min_gap = 0.0;
    bool small_gap = false;
    CrossingClass classification = CrossingClass::none;
};

// bare_diff(t) = bare_L(t) - bare_R(t) is used for bisection when supplied,
// otherwise the grid values are linearly interpolated.
CrossingReport detect_anticrossing(const std::vector<double>& grid, const std::vector<double>& bare_L,
                                   const std::vector<double>& bare_R, const std::vector<double>& gap,
                                   const std::vector<double>& spacing, double gap_ratio = 0.1,
                                   const std::function<double(double)>& bare_diff = {},
                                   const LevelBlocks* blocks = nullptr,
                                   double overlap_threshold = 0.1);

struct SpectrumRun {
    SpectrumTrace trace;  // levels plus bare-LM, bare-GM, AS0 curves
    std::vector<std::vector<std::string>> level_tags;
    std::vector<Vec> ground;
    CrossingReport stage2;
    double t_sep = 0.0;
};

// Stage 1-2 sweep; refinement adds ×10 points within ±0.02 of gap minima and bare crossings.
SpectrumRun run_spectrum(const GicInstance& inst, const StageConfig& cfg, const std::vector<double>& grid,
                         int k, bool refine = true, int threads = 0);

std::vector<double> refine_grid(const std::vector<double>& grid, const std::vector<double>& centers,
                                double half_width = 0.02, int factor = 10);

struct LocalizationTrace {
    std::vector<double> grid;
    std::vector<double> w_l0;
    std::vector<std::vector<double>> w_r_cum;  // per t, depth 1..k
};

LocalizationTrace localization(const GicInstance& inst, const StageConfig& cfg,
                               const std::vector<double>& grid, int depth,
                               InnerSide ordering = InnerSide::R);

double negative_fraction(Vec psi);

using GroundProvider = std::function<Vec(double, const Vec* previous)>;

std::vector<std::pair<double, double>> negativity(const GroundProvider& provider,
                                                  const std::vector<double>& grid);
std::vector<std::pair<double, double>> negativity(const MatrixProvider& provider,
                                                  const std::vector<double>& grid);
std::vector<std::pair<double, double>> negativity(const GicInstance& inst, const StageConfig& cfg,
                                                  const std::vector<double>& grid);

// Main sector in the a-symmetrised computational basis: per clique [1_a, 0, b], R [1, 0].
Mat effective_comp_transform(const GicInstance& inst);
std::vector<std::string> effective_comp_labels(const GicInstance& inst);

struct MDBlockForm {
    Mat H_M, H_D, V;
    Mat V_transverse;  // M-D couplings outside the XX pairing (reported, not part of V)
    std::vector<std::string> m_labels, d_labels;
    std::vector<int> d_parent;  // index into M
};

MDBlockForm md_block_form(const GicInstance& inst, double x, double jxx);
Vec md_dependent_response(const MDBlockForm& f, const Vec& u_M);

struct V3Point {
    double t = 0.0, x = 0.0, jxx = 0.0;
    Mat full_comp;  // [1a0b1r, 1a0b0r, 0a1b1r, 0a1b0r, 0a0b1r, 0a0b0r]
    Mat full_ang;   // [1c1r, 1c0r, 0c1r, 0c0r, q1r, q0r]
    Mat eff_ang;    // [1c1r, 0c1r, q1r]
    Mat eff_comp;   // [0a1b1r, 1a0b1r]
    double alpha = 0.0, beta = 0.0;
    Vec signed_comp, signed_ang;
};

struct V3Result {
    std::vector<V3Point> points;
    Mat transform;  // full_ang = transformᵀ full_comp transform
    static std::vector<std::string> comp_labels();
    static std::vector<std::string> ang_labels();
};

Mat v3_full_comp(int n_c, double w, double jzz, double x, double jxx);
Mat v3_full_ang(int n_c, double w, double jzz, double x, double jxx);
Mat v3_eff_ang(int n_c, double w, double jzz, double x, double jxx);
Mat v3_eff_comp(int n_c, double w, double jzz, double jxx);
Mat v3_transform(int n_c);

V3Result v3_model(int n_c, double w, double jzz, const StageConfig& cfg, const std::vector<double>& grid);

struct LmGroup {
    int m = 1;    // cliques in this structure
    int n_c = 2;  // clique size
};

// Local-minimum structures plus an independent GM set R.  Every LM vertex is
// adjacent to every R vertex and to every vertex of the other LM structures.
struct CompositeInstance {
    std::vector<LmGroup> groups;
    int m_r = 1;
    double w = 1.0;
    double jzz = 1.0;
};

void validate(const CompositeInstance& c);
ExplicitGraph expand(const CompositeInstance& c);
IterationConfig composite_iterations(const CompositeInstance& c, double gamma1_factor = 2.0);

// Lowest levels over the permutation-symmetric parts of all spin-0 sectors.
Vec composite_levels(const CompositeInstance& c, double x, const std::vector<double>& jxx, int k);

struct IterationTrace {
    int drivers = 0;
    SpectrumTrace trace;  // levels plus bare-LM<g>, bare-GM curves
    int crossings = 0;
    std::vector<double> crossing_t;
};

std::vector<IterationTrace> iterate_demo(const CompositeInstance& c, const IterationConfig& icfg,
                                         const std::vector<double>& grid, int k = 4);

}  // namespace xxmis
