#include "xxmis/hamiltonians.hpp"

#include "xxmis/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace xxmis {

ConventionScale scale_of(OperatorConvention conv) {
    return conv == OperatorConvention::spin ? ConventionScale{0.5, 0.25} : ConventionScale{1.0, 1.0};
}

namespace {

inline int occ(std::uint64_t s, int v, int n) { return static_cast<int>((s >> (n - 1 - v)) & 1u); }
inline std::uint64_t bit(int v, int n) { return std::uint64_t{1} << (n - 1 - v); }

double edge_coupling(const ExplicitGraph& g, const Edge& e) {
    return e.cls == EdgeClass::clique ? g.jzz_clique : g.jzz;
}

std::string comp_label(std::uint64_t s, int n) {
    std::string l(n, '0');
    for (int v = 0; v < n; ++v) l[v] = occ(s, v, n) ? '1' : '0';
    return l;
}

}  // namespace

DenseOperator build_full(const ExplicitGraph& g, double x, double jxx, double p,
                         OperatorConvention conv) {
    validate(g);
    int n = g.vertex_count;
    if (n > kMaxFullVertices) throw ValidationError("build_full: N exceeds 14");
    auto sc = scale_of(conv);
    std::uint64_t dim = std::uint64_t{1} << n;
    Mat h = Mat::Zero(dim, dim);
    for (std::uint64_t s = 0; s < dim; ++s) {
        double d = 0.0;
        for (int v = 0; v < n; ++v) d -= g.weights[v] * occ(s, v, n);
        for (const auto& e : g.edges) d += edge_coupling(g, e) * occ(s, e.i, n) * occ(s, e.j, n);
        h(s, s) = p * d;
        for (int v = 0; v < n; ++v) h(s ^ bit(v, n), s) += -x * sc.x;
        for (auto [a, b] : g.xx_edges) h(s ^ bit(a, n) ^ bit(b, n), s) += jxx * sc.xx;
    }
    std::vector<std::string> labels;
    labels.reserve(dim);
    for (std::uint64_t s = 0; s < dim; ++s) labels.push_back(comp_label(s, n));
    return make_operator(std::move(h), BasisTag::computational, std::move(labels));
}

std::vector<int> LowEnergyBasis::digits(int state) const {
    std::vector<int> d(radix.size());
    for (int c = static_cast<int>(radix.size()) - 1; c >= 0; --c) {
        d[c] = state % radix[c];
        state /= radix[c];
    }
    return d;
}

int LowEnergyBasis::index_of(const std::vector<int>& d) const {
    int idx = 0;
    for (size_t c = 0; c < radix.size(); ++c) idx = idx * radix[c] + d[c];
    return idx;
}

LowEnergyBasis low_energy_basis(const ExplicitGraph& g) {
    validate(g);
    int n = g.vertex_count;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (const auto& e : g.edges)
        if (e.cls == EdgeClass::clique) parent[find(e.i)] = find(e.j);
    LowEnergyBasis b;
    std::vector<int> comp_of(n, -1);
    for (int v = 0; v < n; ++v) {
        int r = find(v);
        if (comp_of[r] < 0) {
            comp_of[r] = static_cast<int>(b.components.size());
            b.components.emplace_back();
        }
        b.components[comp_of[r]].push_back(v);
    }
    auto adj = g.adjacency();
    long long dim = 1;
    for (const auto& c : b.components) {
        for (size_t a = 0; a < c.size(); ++a)
            for (size_t k = a + 1; k < c.size(); ++k)
                if (!adj[c[a]][c[k]])
                    throw ValidationError("low-energy basis: clique-edge component is not a clique");
        b.radix.push_back(static_cast<int>(c.size()) + 1);
        dim *= static_cast<long long>(c.size()) + 1;
        if (dim > kMaxDim) throw ValidationError("low-energy dimension exceeds 16384");
    }
    if (n > 63) throw ValidationError("low-energy basis: too many vertices");
    b.comp_index.resize(dim);
    b.labels.resize(dim);
    for (int s = 0; s < dim; ++s) {
        auto d = b.digits(s);
        std::uint64_t ci = 0;
        std::string lab;
        for (size_t c = 0; c < d.size(); ++c) {
            if (d[c] > 0) ci |= bit(b.components[c][d[c] - 1], n);
            if (c) lab += '|';
            lab += std::to_string(d[c]);
        }
        b.comp_index[s] = ci;
        b.labels[s] = lab;
    }
    return b;
}

LowEnergyBasis low_energy_basis(const GicInstance& inst) { return low_energy_basis(expand(inst)); }

long long low_energy_dim(const GicInstance& inst) {
    long long d = 1;
    for (const auto& c : inst.cliques) d *= c.size + 1;
    for (int r = 0; r < inst.r_count; ++r) d *= 2;
    return d;
}

DenseOperator build_low_energy(const ExplicitGraph& g, double x, double jxx, double p,
                               OperatorConvention conv) {
    auto b = low_energy_basis(g);
    auto sc = scale_of(conv);
    int n = g.vertex_count;
    int dim = b.dim();
    std::vector<std::vector<char>> is_xx(n, std::vector<char>(n, 0));
    for (auto [u, v] : g.xx_edges) is_xx[u][v] = is_xx[v][u] = 1;
    std::vector<int> stride(b.radix.size(), 1);
    for (int c = static_cast<int>(b.radix.size()) - 2; c >= 0; --c) stride[c] = stride[c + 1] * b.radix[c + 1];

    Mat h = Mat::Zero(dim, dim);
    for (int s = 0; s < dim; ++s) {
        std::uint64_t ci = b.comp_index[s];
        double d = 0.0;
        for (int v = 0; v < n; ++v) d -= g.weights[v] * occ(ci, v, n);
        for (const auto& e : g.edges) d += edge_coupling(g, e) * occ(ci, e.i, n) * occ(ci, e.j, n);
        h(s, s) = p * d;
        auto dg = b.digits(s);
        for (size_t c = 0; c < dg.size(); ++c) {
            const auto& comp = b.components[c];
            if (dg[c] == 0) {
                for (size_t k = 1; k <= comp.size(); ++k) {
                    int t = s + static_cast<int>(k) * stride[c];
                    h(t, s) += -x * sc.x;
                    h(s, t) += -x * sc.x;
                }
            } else {
                int u = comp[dg[c] - 1];
                for (size_t k = 1; k <= comp.size(); ++k) {
                    if (static_cast<int>(k) <= dg[c]) continue;
                    int v = comp[k - 1];
                    if (!is_xx[u][v]) continue;
                    int t = s + (static_cast<int>(k) - dg[c]) * stride[c];
                    h(t, s) += jxx * sc.xx;
                    h(s, t) += jxx * sc.xx;
                }
            }
        }
    }
    return make_operator(std::move(h), BasisTag::low_energy, b.labels);
}

DenseOperator build_low_energy(const GicInstance& inst, double x, double jxx, double p,
                               OperatorConvention conv) {
    validate(inst);
    if (low_energy_dim(inst) > kMaxDim) throw ValidationError("low-energy dimension exceeds 16384");
    return build_low_energy(expand(inst), x, jxx, p, conv);
}

DenseOperator project_low_energy(const DenseOperator& full, const ExplicitGraph& g) {
    if (full.dim() != (1 << g.vertex_count))
        throw ValidationError("project_low_energy: operator dimension does not match graph");
    auto b = low_energy_basis(g);
    int dim = b.dim();
    Mat r(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) r(i, j) = full.mat(b.comp_index[i], b.comp_index[j]);
    return make_operator(std::move(r), BasisTag::low_energy, b.labels);
}

Stage0Scan stage0_gap_scan(const GicInstance& inst0, const StageConfig& cfg,
                           const std::vector<double>& grid, OperatorConvention conv) {
    validate(cfg);
    auto inst = with_default_penalty(inst0, cfg.gamma1, cfg.jxx());
    auto g = expand(inst);
    auto sc = scale_of(conv);
    Stage0Scan out;
    out.min_gap = INFINITY;
    for (double t : grid) {
        auto pt = stage0_params(cfg, t);
        auto h = build_full(g, pt.x, pt.jxx, pt.p, conv);
        Vec ev = sym_eigenvalues(h.mat);
        double gap = ev.size() > 1 ? ev(1) - ev(0) : 0.0;
        out.t.push_back(t);
        out.gap.push_back(gap);
        if (gap < out.min_gap) {
            out.min_gap = gap;
            out.t_min = t;
        }
    }
    out.reference = 0.5 * 2.0 * sc.x * cfg.gamma1;
    out.passes = out.min_gap >= out.reference;
    double mnorm = g.vertex_count * cfg.gamma0 * sc.x + g.xx_edges.size() * cfg.jxx() * sc.xx;
    out.epsilon = mnorm * mnorm / g.jzz_clique;
    return out;
}

}  // namespace xxmis
