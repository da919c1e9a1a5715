#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace xxmis {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

enum class BasisTag { computational, low_energy, angular, dicke, custom };

const char* basis_name(BasisTag tag);

struct DenseOperator {
    Mat mat;
    BasisTag basis = BasisTag::custom;
    std::vector<std::string> labels;

    int dim() const { return static_cast<int>(mat.rows()); }
};

// Wraps a matrix; labels default to "0", "1", ... when not supplied.
DenseOperator make_operator(Mat m, BasisTag basis = BasisTag::custom,
                            std::vector<std::string> labels = {});

struct EigenSystem {
    Vec values;    // ascending
    Mat vectors;   // columns
};

inline constexpr int kMaxDim = 16384;

void check_symmetric(const Mat& a, double rel_tol = 1e-12);

EigenSystem sym_eigen(const Mat& a, std::optional<int> k = std::nullopt);
EigenSystem sym_eigen(const DenseOperator& op, std::optional<int> k = std::nullopt);
Vec sym_eigenvalues(const Mat& a);

// Largest-magnitude entry made positive; near-ties go to the lowest index.
void fix_gauge(Vec& v);

struct GroundState {
    double energy = 0.0;
    Vec vector;
};

// On a degenerate ground level (within 1e-10) the reference vector, if given,
// is projected onto the degenerate subspace.
GroundState ground_state(const Mat& a, const Vec* reference = nullptr);
GroundState ground_state(const DenseOperator& op, const Vec* reference = nullptr);
GroundState ground_from(const EigenSystem& es, const Vec* reference = nullptr);

void check_orthonormal_columns(const Mat& u, double tol = 1e-10);

// U^T A U
Mat conjugate(const Mat& a, const Mat& u);
DenseOperator conjugate(const DenseOperator& op, const Mat& u,
                        BasisTag basis = BasisTag::custom,
                        std::vector<std::string> labels = {});

Mat kron(const Mat& a, const Mat& b);
// Embeds a local 2x2 (or d x d) operator at position `site` of `sites` equal factors.
Mat embed(const Mat& local, int site, int sites);

double max_abs_diff(const Mat& a, const Mat& b);

}  // namespace xxmis
