#pragma once

#include "xxmis/instances.hpp"
#include "xxmis/linalg.hpp"

#include <string>
#include <vector>

namespace xxmis {

// All block-level operators use the spin convention and the per-spin basis
// [occupied, empty], i.e. B(w,x) = [[-w, -x/2], [-x/2, 0]].

struct TwoLevel {
    double w = 0.0;
    double x = 0.0;
};

Mat b_matrix(double w, double x);

struct BEigen {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double gamma = 0.0;    // ground vector ∝ (1, γ) in [occupied, empty]
    bool flipped = false;  // x = 0, w ≤ 0: γ = +inf, ground is the empty state
};

BEigen b_eigen(double w, double x);
Vec b_ground_vector(double w, double x);

struct CliqueReduction {
    double w_eff = 0.0;
    TwoLevel same_sign;  // B(w_eff, √n·x)
    double theta = 0.0;
    int spin0_multiplicity = 0;

    Mat same_sign_matrix() const { return b_matrix(same_sign.w, same_sign.x); }
    std::vector<double> spectrum() const;
};

CliqueReduction clique_reduce(int n_c, double w_c, double x, double jxx);

double crossover_x(double alpha);
double alpha_max(double gamma2);

struct MergeResult {
    Mat D_c;      // basis [1_a0_b, 0_a0_b, 0_a1_b]
    Mat U_merge;  // columns [1_c, 0_c, ⊙]
    Mat merged;
};

MergeResult merge_subcliques(int n_a, int n_b, double w, double x, double jxx);

struct PartialCoupling {
    Mat T;     // basis [1_c, 0_c, ⊙]
    Mat T_cq;
    double same_sign = 0.0;  // (n-1)/n
    double spin0 = 0.0;      // 1/n
    double corner = 0.0;     // √(n-1)/n
};

PartialCoupling partial_coupling_T(int n_c);

struct BareSpectrum {
    double ground = 0.0;
    std::vector<double> energies;  // index bits z_i, clique 0 most significant; empty when m > 20
    double theta_sum = 0.0;
};

BareSpectrum bare_spectrum(const std::vector<int>& sizes, double w, double x, double jxx);

struct DickeOps {
    Mat csz;
    Mat csx;
};

// Dicke index a = 0 is the all-occupied state.
DickeOps dicke_ops(int m);
Mat m_matrix(int m, double w, double x);
DenseOperator symmetric_same_sign(int m, int n_c, double w_eff, double x);
std::vector<double> closed_tridiag_eigs(int m, double w, double x);

// Local state kinds for one clique in the angular basis.
//   pair   : [1_c, 0_c]
//   pair_q : [1_c, 0_c, ⊙_q]
//   q      : [⊙_q]
//   z      : one of the remaining spin-0 states (fully coupled to R)
enum class LocalKind { pair, pair_q, q, z };

struct CliqueFactors {
    double f_C = 1.0;
    double f_Q = 1.0;
    double inter = 0.0;  // √(n-1)/n in the shared structure, else 0
};

CliqueFactors clique_factors(const GicInstance& inst, int i);

// Hamiltonian on ⊗_i local(kind_i) ⊗ R, R spins in [occupied, empty] order.
Mat sector_hamiltonian(const GicInstance& inst, const std::vector<LocalKind>& kinds,
                       double x, double jxx);
std::vector<std::string> sector_labels(const GicInstance& inst, const std::vector<LocalKind>& kinds);

// Kinds of the coupled main sector: pair_q for n ≥ 2, pair for n = 1.
std::vector<LocalKind> main_kinds(const GicInstance& inst);

// Columns map the low-energy basis onto the angular basis.  With main_only the
// columns cover the main sector (see main_kinds); otherwise the full square transform
// ordered per clique as [1_c, 0_c, ⊙_q, z_1, ..., z_{n-2}].
Mat angular_transform(const GicInstance& inst, bool main_only);
// Columns of one sector; z_choice[i] picks which z state (0-based) for z-kind cliques.
Mat sector_transform(const GicInstance& inst, const std::vector<LocalKind>& kinds,
                     const std::vector<int>& z_choice);

struct BlockSet {
    DenseOperator H_C;
    DenseOperator H_Q;      // empty when some clique has size 1
    DenseOperator H_inter;  // on the main sector; zero in the disjoint structure
    DenseOperator assembled;  // main sector: ⊕ H_W + H_inter
    std::vector<double> f_C;
    std::vector<double> f_Q;
};

BlockSet block_hamiltonians(const GicInstance& inst, double x, double jxx);

// Energy shift of an intermediate block: cliques outside keep_pair contribute θ_i.
Mat intermediate_block(const GicInstance& inst, const std::vector<bool>& keep_pair, double x,
                       double jxx);

// Same-sign block on the symmetric subspace, L Dicke index slow (R-inner ordering).
DenseOperator symmetric_hc(const GicInstance& inst, double x, double jxx);

enum class InnerSide { L, R };

struct InnerBlocks {
    Mat base;                 // block with zero spin-ups on the other side
    Mat shift;
    std::vector<Mat> blocks;  // indexed by spin-up count on the other side
    Mat ordered;              // full matrix in the requested inner ordering
    std::vector<int> perm;    // ordered(i,j) = H(perm[i], perm[j])
};

// H_C given on the symmetric subspace in R-inner ordering (L Dicke index slow).
InnerBlocks inner_blocks(const Mat& hc_sym, int m, int m_r, InnerSide side);

struct BlockOrderReport {
    double beta0 = 0.0;
    double theta = 0.0;
    bool same_sign_lowest = true;
    bool reversal = false;
    double x_c = 0.0;
    int reversal_stage = 0;  // 1 or 2 when a reversal exists
};

BlockOrderReport block_order(const std::vector<int>& sizes, double w, double x, double jxx,
                             double gamma2, double alpha);

}  // namespace xxmis
