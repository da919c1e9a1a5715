#include "xxmis/linalg.hpp"

#include "xxmis/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace xxmis {

const char* basis_name(BasisTag tag) {
    switch (tag) {
        case BasisTag::computational: return "computational";
        case BasisTag::low_energy: return "low_energy";
        case BasisTag::angular: return "angular";
        case BasisTag::dicke: return "dicke";
        case BasisTag::custom: return "custom";
    }
    return "custom";
}

DenseOperator make_operator(Mat m, BasisTag basis, std::vector<std::string> labels) {
    if (m.rows() != m.cols()) throw ValidationError("operator must be square");
    if (labels.empty()) {
        labels.reserve(static_cast<size_t>(m.rows()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) labels.push_back(std::to_string(i));
    }
    if (static_cast<Eigen::Index>(labels.size()) != m.rows())
        throw ValidationError("label count does not match operator dimension");
    return DenseOperator{std::move(m), basis, std::move(labels)};
}

void check_symmetric(const Mat& a, double rel_tol) {
    if (a.rows() != a.cols()) throw ValidationError("matrix is not square");
    if (!a.allFinite()) throw NumericError("matrix has non-finite entries");
    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (asym > rel_tol * scale) throw ValidationError("matrix is not symmetric");
}

EigenSystem sym_eigen(const Mat& a, std::optional<int> k) {
    check_symmetric(a);
    if (a.rows() > kMaxDim) throw ValidationError("dimension cap exceeded (16384)");
    int n = static_cast<int>(a.rows());
    int keep = k ? *k : n;
    if (keep < 0 || keep > n) throw ValidationError("requested eigenpair count out of range");
    if (n == 0) return {};
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    EigenSystem out;
    out.values = es.eigenvalues().head(keep);
    out.vectors = es.eigenvectors().leftCols(keep);
    return out;
}

EigenSystem sym_eigen(const DenseOperator& op, std::optional<int> k) {
    return sym_eigen(op.mat, k);
}

Vec sym_eigenvalues(const Mat& a) {
    check_symmetric(a);
    if (a.rows() > kMaxDim) throw ValidationError("dimension cap exceeded (16384)");
    Eigen::SelfAdjointEigenSolver<Mat> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericError("eigensolver did not converge");
    return es.eigenvalues();
}

void fix_gauge(Vec& v) {
    if (v.size() == 0) return;
    double best = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) >= best - 1e-12) {
            if (v(i) < 0) v = -v;
            return;
        }
    }
}

GroundState ground_from(const EigenSystem& es, const Vec* reference) {
    if (es.values.size() == 0) throw ValidationError("empty eigensystem");
    GroundState g;
    g.energy = es.values(0);
    g.vector = es.vectors.col(0);
    if (reference && reference->size() == g.vector.size()) {
        Eigen::Index deg = 1;
        while (deg < es.values.size() && es.values(deg) - es.values(0) <= 1e-10) ++deg;
        if (deg > 1) {
            Mat basis = es.vectors.leftCols(deg);
            Vec proj = basis * (basis.transpose() * (*reference));
            double nrm = proj.norm();
            if (nrm > 1e-12) g.vector = proj / nrm;
        }
    }
    fix_gauge(g.vector);
    return g;
}

GroundState ground_state(const Mat& a, const Vec* reference) {
    return ground_from(sym_eigen(a), reference);
}

GroundState ground_state(const DenseOperator& op, const Vec* reference) {
    return ground_state(op.mat, reference);
}

void check_orthonormal_columns(const Mat& u, double tol) {
    Mat g = u.transpose() * u;
    Mat id = Mat::Identity(g.rows(), g.cols());
    if ((g - id).cwiseAbs().maxCoeff() > tol)
        throw ValidationError("transform columns are not orthonormal");
}

Mat conjugate(const Mat& a, const Mat& u) {
    if (a.rows() != a.cols() || u.rows() != a.rows())
        throw ValidationError("conjugate: shape mismatch");
    check_orthonormal_columns(u);
    Mat r = u.transpose() * a * u;
    return 0.5 * (r + r.transpose());
}

DenseOperator conjugate(const DenseOperator& op, const Mat& u, BasisTag basis,
                        std::vector<std::string> labels) {
    return make_operator(conjugate(op.mat, u), basis, std::move(labels));
}

Mat kron(const Mat& a, const Mat& b) {
    Mat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

Mat embed(const Mat& local, int site, int sites) {
    Eigen::Index d = local.rows();
    Mat r = Mat::Identity(1, 1);
    for (int s = 0; s < sites; ++s) r = kron(r, s == site ? local : Mat(Mat::Identity(d, d)));
    return r;
}

double max_abs_diff(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return INFINITY;
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace xxmis
