#pragma once

#include "xxmis/instances.hpp"
#include "xxmis/linalg.hpp"
#include "xxmis/schedule.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xxmis {

// spin: transverse -x·Σ½σx, coupler jxx·Σ¼σxσx.  pauli: -x·Σσx, jxx·Σσxσx.
enum class OperatorConvention { spin, pauli };

struct ConventionScale {
    double x;
    double xx;
};
ConventionScale scale_of(OperatorConvention conv);

inline constexpr int kMaxFullVertices = 14;

// Vertex i is bit (N-1-i) of the computational index, so vertex 0 is most significant.
DenseOperator build_full(const ExplicitGraph& g, double x, double jxx, double p,
                         OperatorConvention conv = OperatorConvention::spin);

struct LowEnergyBasis {
    // Groups of vertices joined by clique-class edges (singletons for the rest),
    // ordered by smallest vertex.
    std::vector<std::vector<int>> components;
    std::vector<int> radix;                 // component size + 1 (or 2 for a lone vertex)
    std::vector<std::uint64_t> comp_index;  // computational index of each basis state
    std::vector<std::string> labels;

    int dim() const { return static_cast<int>(comp_index.size()); }
    // local index per component (0 = empty, k = k-th vertex occupied)
    std::vector<int> digits(int state) const;
    int index_of(const std::vector<int>& digits) const;
};

LowEnergyBasis low_energy_basis(const ExplicitGraph& g);
LowEnergyBasis low_energy_basis(const GicInstance& inst);
long long low_energy_dim(const GicInstance& inst);

DenseOperator build_low_energy(const ExplicitGraph& g, double x, double jxx, double p = 1.0,
                               OperatorConvention conv = OperatorConvention::spin);
DenseOperator build_low_energy(const GicInstance& inst, double x, double jxx, double p = 1.0,
                               OperatorConvention conv = OperatorConvention::spin);

DenseOperator project_low_energy(const DenseOperator& full, const ExplicitGraph& g);

struct Stage0Scan {
    std::vector<double> t;
    std::vector<double> gap;
    double min_gap = 0.0;
    double t_min = 0.0;
    double reference = 0.0;  // 0.5 · free gap at x = Γ1
    bool passes = false;
    double epsilon = 0.0;    // ‖M‖² / J_zz^clique with ‖M‖ bounded by its term norms
};

Stage0Scan stage0_gap_scan(const GicInstance& inst, const StageConfig& cfg,
                           const std::vector<double>& grid,
                           OperatorConvention conv = OperatorConvention::spin);

}  // namespace xxmis
