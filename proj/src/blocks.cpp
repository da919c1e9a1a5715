#include "xxmis/blocks.hpp"

#include "xxmis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xxmis {

Mat b_matrix(double w, double x) {
    Mat b(2, 2);
    b << -w, -x / 2.0, -x / 2.0, 0.0;
    return b;
}

BEigen b_eigen(double w, double x) {
    double r = std::hypot(w, x);
    BEigen e;
    e.beta0 = -0.5 * (w + r);
    e.beta1 = -0.5 * (w - r);
    double den = w + r;
    if (den <= 0.0) {
        e.gamma = std::numeric_limits<double>::infinity();
        e.flipped = true;
    } else {
        e.gamma = x / den;
    }
    return e;
}

Vec b_ground_vector(double w, double x) {
    auto e = b_eigen(w, x);
    Vec v(2);
    if (e.flipped) {
        v << 0.0, 1.0;
    } else {
        v << 1.0, e.gamma;
        v /= std::sqrt(1.0 + e.gamma * e.gamma);
    }
    return v;
}

std::vector<double> CliqueReduction::spectrum() const {
    auto e = b_eigen(same_sign.w, same_sign.x);
    std::vector<double> s{e.beta0, e.beta1};
    for (int k = 0; k < spin0_multiplicity; ++k) s.push_back(theta);
    std::sort(s.begin(), s.end());
    return s;
}

CliqueReduction clique_reduce(int n_c, double w_c, double x, double jxx) {
    if (n_c < 1) throw ValidationError("clique size must be >= 1");
    CliqueReduction r;
    r.w_eff = w_c - (n_c - 1) / 4.0 * jxx;
    r.same_sign = {r.w_eff, std::sqrt(static_cast<double>(n_c)) * x};
    r.theta = -(w_c + jxx / 4.0);
    r.spin0_multiplicity = n_c - 1;
    return r;
}

double crossover_x(double alpha) {
    if (!(alpha >= 0.0)) throw ValidationError("crossover_x: alpha must be >= 0");
    if (alpha >= 2.0) throw ValidationError("crossover_x: alpha must be < 2");
    return 4.0 * alpha / (4.0 - alpha * alpha);
}

double alpha_max(double gamma2) {
    if (!(gamma2 > 0)) throw ValidationError("alpha_max: gamma2 must be > 0");
    return (-2.0 + 2.0 * std::sqrt(1.0 + gamma2 * gamma2)) / gamma2;
}

MergeResult merge_subcliques(int n_a, int n_b, double w, double x, double jxx) {
    if (n_a < 1 || n_b < 1) throw ValidationError("subclique sizes must be >= 1");
    double na = n_a, nb = n_b, nc = n_a + n_b;
    MergeResult r;
    r.D_c.resize(3, 3);
    r.D_c << -(w - (na - 1) / 4.0 * jxx), -std::sqrt(na) * x / 2.0, std::sqrt(na * nb) / 4.0 * jxx,
        -std::sqrt(na) * x / 2.0, 0.0, -std::sqrt(nb) * x / 2.0,
        std::sqrt(na * nb) / 4.0 * jxx, -std::sqrt(nb) * x / 2.0, -(w - (nb - 1) / 4.0 * jxx);
    r.U_merge.resize(3, 3);
    r.U_merge << std::sqrt(na / nc), 0.0, -std::sqrt(nb / nc),
        0.0, 1.0, 0.0,
        std::sqrt(nb / nc), 0.0, std::sqrt(na / nc);
    r.merged = r.U_merge.transpose() * r.D_c * r.U_merge;
    return r;
}

PartialCoupling partial_coupling_T(int n_c) {
    if (n_c < 2) throw ValidationError("partial_coupling_T: n_c must be >= 2");
    double n = n_c;
    PartialCoupling p;
    p.same_sign = (n - 1) / n;
    p.spin0 = 1.0 / n;
    p.corner = std::sqrt(n - 1) / n;
    p.T_cq = Mat::Zero(3, 3);
    p.T_cq(0, 2) = p.T_cq(2, 0) = -1.0;
    p.T = Mat::Zero(3, 3);
    p.T(0, 0) = p.same_sign;
    p.T(2, 2) = p.spin0;
    p.T += p.corner * p.T_cq;
    return p;
}

BareSpectrum bare_spectrum(const std::vector<int>& sizes, double w, double x, double jxx) {
    if (sizes.empty()) throw ValidationError("bare_spectrum: empty clique list");
    BareSpectrum b;
    std::vector<BEigen> e;
    for (int n : sizes) {
        auto cr = clique_reduce(n, w, x, jxx);
        e.push_back(b_eigen(cr.same_sign.w, cr.same_sign.x));
        b.ground += e.back().beta0;
        b.theta_sum += cr.theta;
    }
    int m = static_cast<int>(sizes.size());
    if (m <= 20) {
        b.energies.assign(size_t{1} << m, 0.0);
        for (size_t z = 0; z < b.energies.size(); ++z) {
            double s = 0.0;
            for (int i = 0; i < m; ++i) s += ((z >> (m - 1 - i)) & 1u) ? e[i].beta1 : e[i].beta0;
            b.energies[z] = s;
        }
    }
    return b;
}

DickeOps dicke_ops(int m) {
    if (m < 1) throw ValidationError("dicke_ops: m must be >= 1");
    DickeOps d;
    d.csz = Mat::Zero(m + 1, m + 1);
    d.csx = Mat::Zero(m + 1, m + 1);
    for (int a = 0; a <= m; ++a) d.csz(a, a) = m - a;
    for (int a = 0; a < m; ++a)
        d.csx(a, a + 1) = d.csx(a + 1, a) = 0.5 * std::sqrt(static_cast<double>((m - a) * (a + 1)));
    return d;
}

Mat m_matrix(int m, double w, double x) {
    auto d = dicke_ops(m);
    return -x * d.csx - w * d.csz;
}

DenseOperator symmetric_same_sign(int m, int n_c, double w_eff, double x) {
    if (n_c < 1) throw ValidationError("clique size must be >= 1");
    std::vector<std::string> labels;
    for (int a = 0; a <= m; ++a) labels.push_back("D" + std::to_string(m - a));
    return make_operator(m_matrix(m, w_eff, std::sqrt(static_cast<double>(n_c)) * x),
                         BasisTag::dicke, std::move(labels));
}

std::vector<double> closed_tridiag_eigs(int m, double w, double x) {
    if (m < 1) throw ValidationError("closed_tridiag_eigs: m must be >= 1");
    double r = std::hypot(w, x);
    std::vector<double> v;
    for (int k = 0; k <= m; ++k) v.push_back(-0.5 * m * w + (k - 0.5 * m) * r);
    std::sort(v.begin(), v.end());
    return v;
}

CliqueFactors clique_factors(const GicInstance& inst, int i) {
    double n = inst.cliques[i].size;
    CliqueFactors f;
    if (inst.structure == Structure::shared) {
        f.f_C = (n - 1) / n;
        f.f_Q = 1.0 / n;
        f.inter = std::sqrt(n - 1) / n;
    }
    return f;
}

std::vector<LocalKind> main_kinds(const GicInstance& inst) {
    std::vector<LocalKind> k;
    for (const auto& c : inst.cliques) k.push_back(c.size >= 2 ? LocalKind::pair_q : LocalKind::pair);
    return k;
}

namespace {

int local_dim(LocalKind k) {
    switch (k) {
        case LocalKind::pair: return 2;
        case LocalKind::pair_q: return 3;
        default: return 1;
    }
}

// local slot → state code: 0 = 1_c, 1 = 0_c, 2 = ⊙_q, 3 = z
int local_code(LocalKind k, int slot) {
    switch (k) {
        case LocalKind::pair:
        case LocalKind::pair_q: return slot;
        case LocalKind::q: return 2;
        case LocalKind::z: return 3;
    }
    return 0;
}

void check_kinds(const GicInstance& inst, const std::vector<LocalKind>& kinds) {
    if (static_cast<int>(kinds.size()) != inst.m_l())
        throw ValidationError("sector: one local kind per clique required");
    for (int i = 0; i < inst.m_l(); ++i) {
        int n = inst.cliques[i].size;
        if ((kinds[i] == LocalKind::pair_q || kinds[i] == LocalKind::q) && n < 2)
            throw ValidationError("sector: clique of size 1 has no spin-0 state");
        if (kinds[i] == LocalKind::z && n < 3)
            throw ValidationError("sector: clique too small for an extra spin-0 state");
    }
}

}  // namespace

Mat sector_hamiltonian(const GicInstance& inst, const std::vector<LocalKind>& kinds, double x,
                       double jxx) {
    validate(inst);
    check_kinds(inst, kinds);
    int m = inst.m_l(), mr = inst.r_count;
    std::vector<int> radix;
    for (auto k : kinds) radix.push_back(local_dim(k));
    for (int j = 0; j < mr; ++j) radix.push_back(2);
    long long dim = 1;
    for (int r : radix) dim *= r;
    if (dim > kMaxDim) throw ValidationError("sector dimension exceeds 16384");
    std::vector<long long> stride(radix.size(), 1);
    for (int c = static_cast<int>(radix.size()) - 2; c >= 0; --c) stride[c] = stride[c + 1] * radix[c + 1];

    std::vector<CliqueReduction> red;
    std::vector<CliqueFactors> fac;
    for (int i = 0; i < m; ++i) {
        red.push_back(clique_reduce(inst.cliques[i].size, inst.cliques[i].weight, x, jxx));
        fac.push_back(clique_factors(inst, i));
    }
    double jzz = inst.jzz, wr = inst.r_weight;
    Mat h = Mat::Zero(dim, dim);
    std::vector<int> d(radix.size());
    for (long long s = 0; s < dim; ++s) {
        long long rem = s;
        for (int c = static_cast<int>(radix.size()) - 1; c >= 0; --c) {
            d[c] = static_cast<int>(rem % radix[c]);
            rem /= radix[c];
        }
        int n_r = 0;
        for (int j = 0; j < mr; ++j) n_r += d[m + j] == 0;
        double diag = -wr * n_r;
        for (int i = 0; i < m; ++i) {
            int code = local_code(kinds[i], d[i]);
            double sn = std::sqrt(static_cast<double>(inst.cliques[i].size));
            switch (code) {
                case 0:
                    diag += -red[i].w_eff + jzz * n_r * fac[i].f_C;
                    if (d[i] == 0) {
                        long long t = s + stride[i];
                        h(t, s) += -sn * x / 2.0;
                        h(s, t) += -sn * x / 2.0;
                    }
                    if (kinds[i] == LocalKind::pair_q && n_r > 0) {
                        long long t = s + 2 * stride[i];
                        h(t, s) += -jzz * n_r * fac[i].inter;
                        h(s, t) += -jzz * n_r * fac[i].inter;
                    }
                    break;
                case 1: break;
                case 2: diag += red[i].theta + jzz * n_r * fac[i].f_Q; break;
                case 3: diag += red[i].theta + jzz * n_r; break;
            }
        }
        h(s, s) = diag;
        for (int j = 0; j < mr; ++j)
            if (d[m + j] == 0) {
                long long t = s + stride[m + j];
                h(t, s) += -x / 2.0;
                h(s, t) += -x / 2.0;
            }
    }
    return h;
}

std::vector<std::string> sector_labels(const GicInstance& inst, const std::vector<LocalKind>& kinds) {
    check_kinds(inst, kinds);
    std::vector<std::vector<std::string>> parts;
    static const char* names[] = {"1c", "0c", "q", "z"};
    for (auto k : kinds) {
        std::vector<std::string> p;
        for (int s = 0; s < local_dim(k); ++s) p.push_back(names[local_code(k, s)]);
        parts.push_back(p);
    }
    for (int j = 0; j < inst.r_count; ++j) parts.push_back({"1", "0"});
    std::vector<std::string> out{""};
    for (const auto& p : parts) {
        std::vector<std::string> nxt;
        for (const auto& o : out)
            for (const auto& s : p) nxt.push_back(o.empty() ? s : o + "|" + s);
        out.swap(nxt);
    }
    return out;
}

namespace {

// (n+1) x (n+1) local transform in low-energy order [empty, v_1..v_n];
// columns [1_c, 0_c, ⊙_q, z_1..z_{n-2}] (n ≥ 2) or [1_c, 0_c] (n = 1).
Mat local_transform(int n) {
    Mat u = Mat::Zero(n + 1, n + 1);
    double dn = n;
    for (int k = 1; k <= n; ++k) u(k, 0) = 1.0 / std::sqrt(dn);
    u(0, 1) = 1.0;
    if (n >= 2) {
        for (int k = 1; k <= n - 1; ++k) u(k, 2) = -1.0 / std::sqrt(dn * (dn - 1));
        u(n, 2) = std::sqrt((dn - 1) / dn);
        for (int k = 1; k <= n - 2; ++k) {
            double nrm = std::sqrt(static_cast<double>(k) * (k + 1));
            for (int a = 1; a <= k; ++a) u(a, 2 + k) = 1.0 / nrm;
            u(k + 1, 2 + k) = -k / nrm;
        }
    }
    return u;
}

Mat r_flip() {
    Mat r(2, 2);
    r << 0, 1, 1, 0;
    return r;
}

}  // namespace

Mat sector_transform(const GicInstance& inst, const std::vector<LocalKind>& kinds,
                     const std::vector<int>& z_choice) {
    check_kinds(inst, kinds);
    Mat u = Mat::Identity(1, 1);
    for (int i = 0; i < inst.m_l(); ++i) {
        int n = inst.cliques[i].size;
        Mat lt = local_transform(n);
        Mat cols;
        switch (kinds[i]) {
            case LocalKind::pair: cols = lt.leftCols(2); break;
            case LocalKind::pair_q: cols = lt.leftCols(3); break;
            case LocalKind::q: cols = lt.col(2); break;
            case LocalKind::z: {
                int zc = i < static_cast<int>(z_choice.size()) ? z_choice[i] : 0;
                if (zc < 0 || zc > n - 3) throw ValidationError("sector_transform: z choice out of range");
                cols = lt.col(3 + zc);
                break;
            }
        }
        u = kron(u, cols);
    }
    for (int j = 0; j < inst.r_count; ++j) u = kron(u, r_flip());
    return u;
}

Mat angular_transform(const GicInstance& inst, bool main_only) {
    if (main_only) return sector_transform(inst, main_kinds(inst), {});
    Mat u = Mat::Identity(1, 1);
    for (const auto& c : inst.cliques) u = kron(u, local_transform(c.size));
    for (int j = 0; j < inst.r_count; ++j) u = kron(u, r_flip());
    return u;
}

Mat intermediate_block(const GicInstance& inst, const std::vector<bool>& keep_pair, double x,
                       double jxx) {
    if (static_cast<int>(keep_pair.size()) != inst.m_l())
        throw ValidationError("intermediate_block: one flag per clique required");
    std::vector<LocalKind> k;
    for (bool b : keep_pair) k.push_back(b ? LocalKind::pair : LocalKind::q);
    return sector_hamiltonian(inst, k, x, jxx);
}

BlockSet block_hamiltonians(const GicInstance& inst, double x, double jxx) {
    validate(inst);
    if (inst.m_l() + inst.r_count > 14)
        throw ValidationError("block_hamiltonians: contracted dimension exceeds 16384");
    BlockSet bs;
    std::vector<LocalKind> pair(inst.m_l(), LocalKind::pair);
    bs.H_C = make_operator(sector_hamiltonian(inst, pair, x, jxx), BasisTag::angular,
                           sector_labels(inst, pair));
    bool has_q = inst.min_size() >= 2;
    if (has_q) {
        std::vector<LocalKind> q(inst.m_l(), LocalKind::q);
        bs.H_Q = make_operator(sector_hamiltonian(inst, q, x, jxx), BasisTag::angular,
                               sector_labels(inst, q));
    } else {
        bs.H_Q = make_operator(Mat(0, 0), BasisTag::angular);
    }
    auto mk = main_kinds(inst);
    Mat full = sector_hamiltonian(inst, mk, x, jxx);
    // H_inter: the 1_c <-> ⊙_q corners (only these couple different blocks).
    Mat inter = Mat::Zero(full.rows(), full.cols());
    {
        std::vector<int> radix;
        for (auto k : mk) radix.push_back(local_dim(k));
        for (int j = 0; j < inst.r_count; ++j) radix.push_back(2);
        std::vector<long long> stride(radix.size(), 1);
        for (int c = static_cast<int>(radix.size()) - 2; c >= 0; --c) stride[c] = stride[c + 1] * radix[c + 1];
        for (long long s = 0; s < full.rows(); ++s) {
            long long rem = s;
            std::vector<int> d(radix.size());
            for (int c = static_cast<int>(radix.size()) - 1; c >= 0; --c) {
                d[c] = static_cast<int>(rem % radix[c]);
                rem /= radix[c];
            }
            for (int i = 0; i < inst.m_l(); ++i)
                if (mk[i] == LocalKind::pair_q && d[i] == 0) {
                    long long t = s + 2 * stride[i];
                    inter(s, t) = full(s, t);
                    inter(t, s) = full(t, s);
                }
        }
    }
    auto labels = sector_labels(inst, mk);
    bs.H_inter = make_operator(inter, BasisTag::angular, labels);
    bs.assembled = make_operator(full, BasisTag::angular, labels);
    for (int i = 0; i < inst.m_l(); ++i) {
        auto f = clique_factors(inst, i);
        bs.f_C.push_back(f.f_C);
        bs.f_Q.push_back(f.f_Q);
    }
    return bs;
}

DenseOperator symmetric_hc(const GicInstance& inst, double x, double jxx) {
    validate(inst);
    if (!inst.uniform_size() || !inst.uniform_weight())
        throw ValidationError("symmetric reduction needs uniform clique sizes and weights");
    int m = inst.m_l(), mr = inst.r_count;
    int n = inst.cliques[0].size;
    double w = inst.r_weight;
    auto cr = clique_reduce(n, w, x, jxx);
    double jc = inst.jzz * clique_factors(inst, 0).f_C;
    Mat hl = m_matrix(m, cr.w_eff, std::sqrt(static_cast<double>(n)) * x);
    Mat h;
    if (mr == 0) {
        h = hl;
    } else {
        Mat hr = m_matrix(mr, w, x);
        auto dl = dicke_ops(m);
        auto dr = dicke_ops(mr);
        h = kron(hl, Mat::Identity(mr + 1, mr + 1)) + kron(Mat::Identity(m + 1, m + 1), hr) +
            jc * kron(dl.csz, dr.csz);
    }
    std::vector<std::string> labels;
    for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= (mr == 0 ? 0 : mr); ++b)
            labels.push_back("L" + std::to_string(m - a) + "R" + std::to_string(mr - b));
    return make_operator(std::move(h), BasisTag::dicke, std::move(labels));
}

InnerBlocks inner_blocks(const Mat& hc, int m, int m_r, InnerSide side) {
    int dl = m + 1, dr = m_r + 1;
    if (hc.rows() != dl * dr) throw ValidationError("inner_blocks: dimension mismatch");
    InnerBlocks ib;
    int outer = side == InnerSide::R ? dl : dr;
    int inner = side == InnerSide::R ? dr : dl;
    ib.perm.resize(dl * dr);
    for (int o = 0; o < outer; ++o)
        for (int i = 0; i < inner; ++i) {
            int a = side == InnerSide::R ? o : i;  // L Dicke index
            int b = side == InnerSide::R ? i : o;  // R Dicke index
            ib.perm[o * inner + i] = a * dr + b;
        }
    ib.ordered.resize(dl * dr, dl * dr);
    for (int i = 0; i < dl * dr; ++i)
        for (int j = 0; j < dl * dr; ++j) ib.ordered(i, j) = hc(ib.perm[i], ib.perm[j]);
    // outer index o has (outer-1-o) spin-ups on the outer side
    ib.blocks.resize(outer);
    for (int o = 0; o < outer; ++o) ib.blocks[outer - 1 - o] = ib.ordered.block(o * inner, o * inner, inner, inner);
    ib.base = ib.blocks[0];
    ib.shift = outer > 1 ? Mat(ib.blocks[1] - ib.blocks[0]) : Mat(Mat::Zero(inner, inner));
    return ib;
}

BlockOrderReport block_order(const std::vector<int>& sizes, double w, double x, double jxx,
                             double gamma2, double alpha) {
    if (sizes.empty()) throw ValidationError("block_order: empty clique list");
    for (int n : sizes)
        if (n != sizes[0]) throw ValidationError("block_order: uniform clique size required");
    auto cr = clique_reduce(sizes[0], w, x, jxx);
    BlockOrderReport r;
    r.beta0 = b_eigen(cr.same_sign.w, cr.same_sign.x).beta0;
    r.theta = cr.theta;
    r.same_sign_lowest = r.beta0 <= r.theta;
    if (alpha <= 0.0) {
        r.reversal = false;
        r.x_c = 0.0;
    } else if (alpha >= 2.0) {
        r.reversal = true;
        r.x_c = std::numeric_limits<double>::infinity();
        r.reversal_stage = 1;
    } else {
        r.reversal = true;
        r.x_c = crossover_x(alpha) * w;
        r.reversal_stage = r.x_c < gamma2 ? 2 : 1;
    }
    return r;
}

}  // namespace xxmis
