#include "xxmis/analysis.hpp"

#include "xxmis/errors.hpp"
#include "xxmis/hamiltonians.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <thread>

namespace xxmis {

const TaggedCurve* SpectrumTrace::curve(const std::string& tag) const {
    for (const auto& c : curves)
        if (c.tag == tag) return &c;
    return nullptr;
}

std::vector<double> SpectrumTrace::gap(int upper) const {
    std::vector<double> g;
    for (const auto& l : levels)
        g.push_back(static_cast<int>(l.size()) > upper ? l[upper] - l[upper - 1]
                                                       : std::numeric_limits<double>::quiet_NaN());
    return g;
}

void validate(const SpectrumTrace& tr) {
    for (size_t i = 1; i < tr.grid.size(); ++i)
        if (!(tr.grid[i] > tr.grid[i - 1])) throw ValidationError("trace grid must be strictly increasing");
    if (tr.levels.size() != tr.grid.size()) throw ValidationError("trace levels do not match grid");
    for (const auto& l : tr.levels)
        for (size_t i = 1; i < l.size(); ++i)
            if (l[i] < l[i - 1]) throw ValidationError("trace levels not ascending");
}

namespace {

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("empty grid");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) throw ValidationError("grid points must lie in [0,1]");
        if (i && !(grid[i] > grid[i - 1])) throw ValidationError("grid must be strictly increasing");
    }
}

template <class F>
void parallel_for(int n, int threads, F&& fn) {
    if (threads <= 0) threads = sweep_threads();
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                    return;
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

double beta0(double w, double x) { return b_eigen(w, x).beta0; }

}  // namespace

int sweep_threads() {
    if (const char* env = std::getenv("ANNEAL_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

SweepResult sweep(const MatrixProvider& provider, const std::vector<double>& grid, int k, int threads) {
    check_grid(grid);
    if (k < 1) throw ValidationError("sweep: k must be >= 1");
    int n = static_cast<int>(grid.size());
    std::vector<EigenSystem> cluster(n);
    std::vector<std::vector<double>> levels(n);
    parallel_for(n, threads, [&](int i) {
        auto es = sym_eigen(provider(grid[i]));
        int keep = std::min<int>(k, static_cast<int>(es.values.size()));
        levels[i].assign(es.values.data(), es.values.data() + keep);
        Eigen::Index deg = 1;
        while (deg < es.values.size() && es.values(deg) - es.values(0) <= 1e-10) ++deg;
        cluster[i].values = es.values.head(deg);
        cluster[i].vectors = es.vectors.leftCols(deg);
    });
    SweepResult r;
    r.trace.grid = grid;
    r.trace.levels = std::move(levels);
    const Vec* prev = nullptr;
    for (int i = 0; i < n; ++i) {
        r.ground.push_back(ground_from(cluster[i], prev).vector);
        prev = &r.ground.back();
    }
    return r;
}

// ---------------------------------------------------------------- SectorModel

SectorModel::SectorModel(const GicInstance& inst) : inst_(inst) {
    validate(inst_);
    long long ld = low_energy_dim(inst_);
    low_dim_ = static_cast<int>(std::min<long long>(ld, std::numeric_limits<int>::max()));
    int m = inst_.m_l();
    std::vector<int> zable;
    for (int i = 0; i < m; ++i)
        if (inst_.cliques[i].size >= 3) zable.push_back(i);
    for (unsigned mask = 0; mask < (1u << zable.size()); ++mask) {
        Sector s;
        s.kinds = main_kinds(inst_);
        s.tag = mask ? "z" : "main";
        for (size_t b = 0; b < zable.size(); ++b)
            if (mask & (1u << b)) {
                int i = zable[b];
                s.kinds[i] = LocalKind::z;
                s.multiplicity *= inst_.cliques[i].size - 2;
                s.tag += (s.tag.size() > 1 ? "," : "") + std::to_string(i);
            }
        sectors_.push_back(std::move(s));
    }
    if (ld <= 4 * kMaxDim)
        for (const auto& s : sectors_)
            transforms_.push_back(sector_transform(inst_, s.kinds, std::vector<int>(m, 0)));
}

SectorModel::Solution SectorModel::solve(double x, double jxx, int k, bool want_vector,
                                         const Vec* reference) const {
    struct Entry {
        double value;
        int sector;
        long long copy;
    };
    std::vector<Entry> entries;
    std::vector<EigenSystem> es(sectors_.size());
    for (size_t s = 0; s < sectors_.size(); ++s) {
        Mat h = sector_hamiltonian(inst_, sectors_[s].kinds, x, jxx);
        if (want_vector) {
            es[s] = sym_eigen(h);
        } else {
            es[s].values = sym_eigenvalues(h);
        }
        int keep = std::min<int>(k, static_cast<int>(es[s].values.size()));
        for (int i = 0; i < keep; ++i)
            for (long long c = 0; c < std::min<long long>(sectors_[s].multiplicity, k); ++c)
                entries.push_back({es[s].values(i), static_cast<int>(s), c});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.value < b.value; });
    Solution sol;
    int keep = std::min<int>(k, static_cast<int>(entries.size()));
    sol.values.resize(keep);
    for (int i = 0; i < keep; ++i) {
        sol.values(i) = entries[i].value;
        const auto& sec = sectors_[entries[i].sector];
        std::string tag = sec.tag;
        if (sec.multiplicity > 1) tag += "#" + std::to_string(entries[i].copy);
        sol.level_tags.push_back(tag);
    }
    if (want_vector && keep > 0) {
        int s = entries[0].sector;
        // degenerate cluster inside the ground sector
        Eigen::Index deg = 1;
        const auto& e = es[s];
        while (deg < e.values.size() && e.values(deg) - e.values(0) <= 1e-10) ++deg;
        EigenSystem cl{e.values.head(deg), e.vectors.leftCols(deg)};
        Vec v;
        if (static_cast<size_t>(s) < transforms_.size()) {
            const Mat& u = transforms_[s];
            if (reference && reference->size() == u.rows()) {
                Vec ref_local = u.transpose() * (*reference);
                v = ground_from(cl, &ref_local).vector;
            } else {
                v = ground_from(cl).vector;
            }
            sol.ground = u * v;
            fix_gauge(sol.ground);
        } else {
            v = ground_from(cl).vector;
        }
        if (s == 0) {
            sol.ground_main = v;
            int m = inst_.m_l();
            sol.block_weights.assign(size_t{1} << m, 0.0);
            std::vector<int> radix;
            for (auto kd : sectors_[0].kinds) radix.push_back(kd == LocalKind::pair_q ? 3 : 2);
            for (int j = 0; j < inst_.r_count; ++j) radix.push_back(2);
            for (Eigen::Index st = 0; st < v.size(); ++st) {
                long long rem = st;
                std::vector<int> d(radix.size());
                for (int c = static_cast<int>(radix.size()) - 1; c >= 0; --c) {
                    d[c] = static_cast<int>(rem % radix[c]);
                    rem /= radix[c];
                }
                unsigned mask = 0;
                for (int i = 0; i < m; ++i)
                    if (d[i] == 2) mask |= 1u << (m - 1 - i);
                sol.block_weights[mask] += v(st) * v(st);
            }
        }
    }
    return sol;
}

// ---------------------------------------------------------------- bare curves

double bare_lm(const GicInstance& inst, double x, double jxx) {
    double e = 0.0;
    for (const auto& c : inst.cliques) {
        auto cr = clique_reduce(c.size, c.weight, x, jxx);
        e += beta0(cr.same_sign.w, cr.same_sign.x);
    }
    return e;
}

double bare_gm(const GicInstance& inst, double x) {
    double e = 0.0;
    if (inst.structure == Structure::shared)
        for (const auto& c : inst.cliques) e += beta0(c.weight, x);
    e += inst.r_count * beta0(inst.r_weight, x);
    return e;
}

double bare_as0(const GicInstance& inst, double x, double jxx) {
    if (inst.min_size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double e = 0.0, shift = 0.0;
    for (int i = 0; i < inst.m_l(); ++i) {
        e += clique_reduce(inst.cliques[i].size, inst.cliques[i].weight, x, jxx).theta;
        shift += inst.jzz * clique_factors(inst, i).f_Q;
    }
    e += inst.r_count * beta0(inst.r_weight - shift, x);
    return e;
}

SpectrumTrace bare_curves(const GicInstance& inst, const StageConfig& cfg, const std::vector<double>& grid) {
    validate(inst);
    validate(cfg);
    check_grid(grid);
    SpectrumTrace tr;
    tr.grid = grid;
    tr.levels.assign(grid.size(), {});
    TaggedCurve lm{"bare-LM", {}}, gm{"bare-GM", {}}, as0{"AS0", {}};
    for (double t : grid) {
        auto p = main_params(cfg, t);
        lm.values.push_back(bare_lm(inst, p.x, p.jxx));
        gm.values.push_back(bare_gm(inst, p.x));
        as0.values.push_back(bare_as0(inst, p.x, p.jxx));
    }
    tr.curves = {lm, gm, as0};
    return tr;
}

// ---------------------------------------------------------------- crossings

const char* crossing_class_name(CrossingClass c) {
    switch (c) {
        case CrossingClass::none: return "none";
        case CrossingClass::tunneling: return "tunneling";
        case CrossingClass::block_level: return "block-level";
        case CrossingClass::interference: return "interference-involved";
        case CrossingClass::unclassified: return "unclassified";
    }
    return "unclassified";
}

CrossingReport detect_anticrossing(const std::vector<double>& grid, const std::vector<double>& bare_L,
                                   const std::vector<double>& bare_R, const std::vector<double>& gap,
                                   const std::vector<double>& spacing, double gap_ratio,
                                   const std::function<double(double)>& bare_diff,
                                   const LevelBlocks* blocks, double overlap_threshold) {
    size_t n = grid.size();
    if (bare_L.size() != n || bare_R.size() != n || (!gap.empty() && gap.size() != n))
        throw ValidationError("detect_anticrossing: traces must share the grid");
    CrossingReport rep;
    int last = 0;
    size_t last_i = 0;
    for (size_t i = 0; i < n; ++i) {
        double d = bare_L[i] - bare_R[i];
        int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
        if (s == 0) continue;
        if (last != 0 && s != last) {
            double a = grid[last_i], b = grid[i];
            double da = bare_L[last_i] - bare_R[last_i];
            double db = d;
            if (bare_diff) {
                da = bare_diff(a);
                for (int it = 0; it < 200 && b - a > 1e-7; ++it) {
                    double mid = 0.5 * (a + b);
                    double dm = bare_diff(mid);
                    if ((dm > 0) == (da > 0)) {
                        a = mid;
                        da = dm;
                    } else {
                        b = mid;
                    }
                }
                rep.t_star.push_back(0.5 * (a + b));
            } else {
                rep.t_star.push_back(a + (b - a) * da / (da - db));
            }
        }
        last = s;
        last_i = i;
    }
    if (!gap.empty()) {
        size_t arg = 0;
        for (size_t i = 1; i < n; ++i)
            if (gap[i] < gap[arg]) arg = i;
        rep.min_gap = gap[arg];
        rep.t_min_gap = grid[arg];
        if (spacing.size() == n) rep.small_gap = gap[arg] < gap_ratio * spacing[arg];
    }
    if (rep.t_star.empty()) {
        rep.classification = CrossingClass::none;
    } else if (!blocks) {
        rep.classification = CrossingClass::unclassified;
    } else {
        int mixed = 0;
        for (double wgt : blocks->upper) mixed += wgt > overlap_threshold;
        auto argmax = [](const std::vector<double>& v) {
            return std::max_element(v.begin(), v.end()) - v.begin();
        };
        if (mixed >= 2) rep.classification = CrossingClass::interference;
        else if (argmax(blocks->lower) == argmax(blocks->upper)) rep.classification = CrossingClass::tunneling;
        else rep.classification = CrossingClass::block_level;
    }
    return rep;
}

std::vector<double> refine_grid(const std::vector<double>& grid, const std::vector<double>& centers,
                                double half_width, int factor) {
    std::set<double> pts(grid.begin(), grid.end());
    double h = grid.size() > 1 ? (grid.back() - grid.front()) / (grid.size() - 1) : 0.0;
    double step = h / factor;
    if (step > 0)
        for (double c : centers) {
            double lo = std::max(grid.front(), c - half_width);
            double hi = std::min(grid.back(), c + half_width);
            // align to the coarse lattice so refined points are reproducible
            long long k0 = static_cast<long long>(std::ceil((lo - grid.front()) / step - 1e-9));
            for (long long k = k0;; ++k) {
                double t = grid.front() + k * step;
                if (t > hi + 1e-12) break;
                pts.insert(t);
            }
        }
    std::vector<double> out;
    for (double t : pts)
        if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
    return out;
}

SpectrumRun run_spectrum(const GicInstance& inst, const StageConfig& cfg, const std::vector<double>& grid0,
                         int k, bool refine, int threads) {
    validate(inst);
    validate(cfg);
    check_grid(grid0);
    if (k < 2) throw ValidationError("spectrum needs k >= 2");
    SectorModel model(inst);
    int kk = std::max(k, 3);

    auto evaluate = [&](const std::vector<double>& grid, std::vector<SectorModel::Solution>& sols) {
        sols.assign(grid.size(), {});
        parallel_for(static_cast<int>(grid.size()), threads, [&](int i) {
            auto p = main_params(cfg, grid[i]);
            sols[i] = model.solve(p.x, p.jxx, kk, true);
        });
    };
    auto diff = [&](double t) {
        auto p = main_params(cfg, t);
        return bare_lm(inst, p.x, p.jxx) - bare_gm(inst, p.x);
    };

    std::vector<SectorModel::Solution> sols;
    evaluate(grid0, sols);
    std::vector<double> grid = grid0;
    if (refine) {
        std::vector<double> centers;
        size_t arg = 0;
        for (size_t i = 1; i < grid0.size(); ++i)
            if (sols[i].values(1) - sols[i].values(0) < sols[arg].values(1) - sols[arg].values(0)) arg = i;
        centers.push_back(grid0[arg]);
        auto bc = bare_curves(inst, cfg, grid0);
        auto pre = detect_anticrossing(grid0, bc.curve("bare-LM")->values, bc.curve("bare-GM")->values, {}, {},
                                       0.1, diff);
        for (double t : pre.t_star) centers.push_back(t);
        grid = refine_grid(grid0, centers);
        evaluate(grid, sols);
    }

    SpectrumRun run;
    run.t_sep = cfg.t_sep();
    auto bc = bare_curves(inst, cfg, grid);
    run.trace.grid = grid;
    run.trace.curves = bc.curves;
    const Vec* prev = nullptr;
    for (auto& s : sols) {
        std::vector<double> lv(s.values.data(), s.values.data() + std::min<Eigen::Index>(k, s.values.size()));
        run.trace.levels.push_back(lv);
        run.level_tags.push_back(
            std::vector<std::string>(s.level_tags.begin(), s.level_tags.begin() + lv.size()));
        if (prev && prev->size() == s.ground.size() && prev->dot(s.ground) < 0) s.ground = -s.ground;
        run.ground.push_back(s.ground);
        prev = &run.ground.back();
    }

    // Stage-2 window
    std::vector<double> g2, l2, r2, gap2, sp2;
    std::vector<size_t> idx;
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] + 1e-12 < run.t_sep) continue;
        idx.push_back(i);
        g2.push_back(grid[i]);
        l2.push_back(bc.curve("bare-LM")->values[i]);
        r2.push_back(bc.curve("bare-GM")->values[i]);
        gap2.push_back(sols[i].values(1) - sols[i].values(0));
        sp2.push_back(sols[i].values.size() > 2 ? sols[i].values(2) - sols[i].values(1) : 0.0);
    }
    if (!g2.empty()) {
        size_t arg = 0;
        for (size_t i = 1; i < gap2.size(); ++i)
            if (gap2[i] < gap2[arg]) arg = i;
        const auto& tags = sols[idx[arg]].level_tags;
        std::vector<std::string> uniq;
        for (const auto& t : tags)
            if (std::find(uniq.begin(), uniq.end(), t) == uniq.end()) uniq.push_back(t);
        LevelBlocks lb;
        lb.lower.assign(uniq.size(), 0.0);
        lb.upper.assign(uniq.size(), 0.0);
        lb.lower[std::find(uniq.begin(), uniq.end(), tags[0]) - uniq.begin()] = 1.0;
        lb.upper[std::find(uniq.begin(), uniq.end(), tags[1]) - uniq.begin()] = 1.0;
        run.stage2 = detect_anticrossing(g2, l2, r2, gap2, sp2, 0.1, diff, &lb);
    }
    return run;
}

// ---------------------------------------------------------------- localization

LocalizationTrace localization(const GicInstance& inst, const StageConfig& cfg, const std::vector<double>& grid,
                               int depth, InnerSide ordering) {
    validate(inst);
    validate(cfg);
    check_grid(grid);
    int m = inst.m_l(), mr = inst.r_count;
    if (mr < 1) throw ValidationError("localization needs m_r >= 1");
    if (depth < 1 || depth > m + 1) throw ValidationError("localization depth out of range");
    LocalizationTrace tr;
    tr.grid = grid;
    Vec prev;
    for (double t : grid) {
        auto p = main_params(cfg, t);
        auto h = symmetric_hc(inst, p.x, p.jxx);
        auto ib = inner_blocks(h.mat, m, mr, ordering);
        auto g = ground_state(ib.ordered, prev.size() ? &prev : nullptr);
        if (prev.size() && prev.dot(g.vector) < 0) g.vector = -g.vector;
        prev = g.vector;
        // back to R-inner indices: psi(a*(mr+1)+b)
        Vec psi(g.vector.size());
        for (Eigen::Index i = 0; i < psi.size(); ++i) psi(ib.perm[i]) = g.vector(i);
        std::vector<double> wl(m + 1, 0.0);  // by L spin-up count
        double l0 = 0.0;
        for (int a = 0; a <= m; ++a)
            for (int b = 0; b <= mr; ++b) {
                double v = psi(a * (mr + 1) + b);
                wl[m - a] += v * v;
                if (b == mr) l0 += v * v;
            }
        auto rb = inner_blocks(h.mat, m, mr, InnerSide::R);
        std::vector<std::pair<double, int>> order;
        for (int l = 0; l <= m; ++l) order.push_back({sym_eigenvalues(rb.blocks[l])(0), l});
        std::stable_sort(order.begin(), order.end());
        std::vector<double> cum;
        double acc = 0.0;
        for (int d = 0; d < depth; ++d) {
            acc += wl[order[d].second];
            cum.push_back(acc);
        }
        tr.w_l0.push_back(l0);
        tr.w_r_cum.push_back(cum);
    }
    return tr;
}

// ---------------------------------------------------------------- negativity

double negative_fraction(Vec psi) {
    double nrm2 = psi.squaredNorm();
    if (nrm2 == 0.0) return 0.0;
    if (psi.sum() < 0) psi = -psi;
    double neg = 0.0;
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        if (psi(i) < -1e-12) neg += psi(i) * psi(i);
    return neg / nrm2;
}

std::vector<std::pair<double, double>> negativity(const GroundProvider& provider, const std::vector<double>& grid) {
    check_grid(grid);
    std::vector<std::pair<double, double>> out;
    Vec prev;
    for (double t : grid) {
        Vec g = provider(t, prev.size() ? &prev : nullptr);
        out.emplace_back(t, negative_fraction(g));
        prev = g;
    }
    return out;
}

std::vector<std::pair<double, double>> negativity(const MatrixProvider& provider, const std::vector<double>& grid) {
    return negativity(GroundProvider([&](double t, const Vec* prev) { return ground_state(provider(t), prev).vector; }),
                      grid);
}

std::vector<std::pair<double, double>> negativity(const GicInstance& inst, const StageConfig& cfg,
                                                  const std::vector<double>& grid) {
    validate(cfg);
    SectorModel model(inst);
    if (model.low_dim() > 4 * kMaxDim) throw ValidationError("negativity: low-energy basis too large");
    return negativity(GroundProvider([&](double t, const Vec* prev) {
                          auto p = main_params(cfg, t);
                          return model.solve(p.x, p.jxx, 1, true, prev).ground;
                      }),
                      grid);
}

// ---------------------------------------------------------------- M/D block form

Mat effective_comp_transform(const GicInstance& inst) {
    validate(inst);
    if (inst.min_size() < 2) throw ValidationError("effective basis needs clique sizes >= 2");
    Mat w = Mat::Identity(1, 1);
    for (const auto& c : inst.cliques) {
        double n = c.size;
        Mat loc(3, 3);
        loc << std::sqrt((n - 1) / n), 0.0, std::sqrt(1 / n),
            0.0, 1.0, 0.0,
            -std::sqrt(1 / n), 0.0, std::sqrt((n - 1) / n);
        w = kron(w, loc);
    }
    return kron(w, Mat::Identity(1 << inst.r_count, 1 << inst.r_count));
}

std::vector<std::string> effective_comp_labels(const GicInstance& inst) {
    std::vector<std::string> out{""};
    auto extend = [&](std::vector<std::string> parts) {
        std::vector<std::string> nxt;
        for (const auto& o : out)
            for (const auto& p : parts) nxt.push_back(o.empty() ? p : o + "|" + p);
        out.swap(nxt);
    };
    for (int i = 0; i < inst.m_l(); ++i) extend({"a", "0", "b"});
    for (int j = 0; j < inst.r_count; ++j) extend({"1", "0"});
    return out;
}

MDBlockForm md_block_form(const GicInstance& inst, double x, double jxx) {
    validate(inst);
    if (inst.structure != Structure::shared) throw ValidationError("md_block_form needs the shared structure");
    int m = inst.m_l(), mr = inst.r_count;
    Mat hm = sector_hamiltonian(inst, main_kinds(inst), x, jxx);
    Mat w = effective_comp_transform(inst);
    Mat h = w.transpose() * hm * w;
    auto labels = effective_comp_labels(inst);
    auto index = [&](const std::vector<int>& clique_digit) {
        long long s = 0;
        for (int i = 0; i < m; ++i) s = s * 3 + clique_digit[i];
        for (int j = 0; j < mr; ++j) s = s * 2;  // all R occupied (digit 0)
        return s;
    };
    MDBlockForm f;
    std::vector<long long> mi, di;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> d(m);
        for (int i = 0; i < m; ++i) d[i] = (mask >> (m - 1 - i)) & 1u ? 2 : 1;
        mi.push_back(index(d));
    }
    for (size_t p = 0; p < mi.size(); ++p) {
        unsigned mask = static_cast<unsigned>(p);
        for (int i = 0; i < m; ++i) {
            if (!((mask >> (m - 1 - i)) & 1u)) continue;
            std::vector<int> d(m);
            for (int k = 0; k < m; ++k) d[k] = (mask >> (m - 1 - k)) & 1u ? 2 : 1;
            d[i] = 0;
            di.push_back(index(d));
            f.d_parent.push_back(static_cast<int>(p));
        }
    }
    auto sub = [&](const std::vector<long long>& r, const std::vector<long long>& c) {
        Mat s(r.size(), c.size());
        for (size_t i = 0; i < r.size(); ++i)
            for (size_t j = 0; j < c.size(); ++j) s(i, j) = h(r[i], c[j]);
        return s;
    };
    f.H_M = sub(mi, mi);
    f.H_D = sub(di, di);
    Mat md = sub(mi, di);
    f.V = Mat::Zero(md.rows(), md.cols());
    f.V_transverse = md;
    for (size_t d = 0; d < di.size(); ++d) {
        f.V(f.d_parent[d], d) = md(f.d_parent[d], d);
        f.V_transverse(f.d_parent[d], d) = 0.0;
    }
    for (auto i : mi) f.m_labels.push_back(labels[i]);
    for (auto i : di) f.d_labels.push_back(labels[i]);
    if (f.H_D.size() > 0 && sym_eigenvalues(f.H_D)(0) <= 0.0)
        throw ValidationError("md_block_form: H_D is not positive definite at this point");
    return f;
}

Vec md_dependent_response(const MDBlockForm& f, const Vec& u_M) {
    if (u_M.size() != f.H_M.rows()) throw ValidationError("md_dependent_response: size mismatch");
    Eigen::LLT<Mat> llt(f.H_D);
    if (llt.info() != Eigen::Success) throw NumericError("H_D factorisation failed");
    return -llt.solve(f.V.transpose() * u_M);
}

// ---------------------------------------------------------------- V3

Mat v3_full_comp(int n_c, double w, double jzz, double x, double jxx) {
    double n = n_c;
    double sa = std::sqrt(n - 1);
    Mat h = Mat::Zero(6, 6);
    h(0, 0) = -2 * w + (n - 2) / 4 * jxx + jzz;
    h(1, 1) = -w + (n - 2) / 4 * jxx;
    h(2, 2) = -2 * w;
    h(3, 3) = -w;
    h(4, 4) = -w;
    auto set = [&](int i, int j, double v) { h(i, j) = h(j, i) = v; };
    set(0, 1, -x / 2);
    set(0, 2, sa / 4 * jxx);
    set(0, 4, -sa / 2 * x);
    set(1, 3, sa / 4 * jxx);
    set(1, 5, -sa / 2 * x);
    set(2, 3, -x / 2);
    set(2, 4, -x / 2);
    set(3, 5, -x / 2);
    set(4, 5, -x / 2);
    return h;
}

Mat v3_full_ang(int n_c, double w, double jzz, double x, double jxx) {
    double n = n_c;
    double sn = std::sqrt(n);
    Mat h = Mat::Zero(6, 6);
    h(0, 0) = -2 * w + (n - 1) / 4 * jxx + (n - 1) / n * jzz;
    h(1, 1) = -w + (n - 1) / 4 * jxx;
    h(2, 2) = -w;
    h(4, 4) = -2 * w - jxx / 4 + jzz / n;
    h(5, 5) = -w - jxx / 4;
    auto set = [&](int i, int j, double v) { h(i, j) = h(j, i) = v; };
    set(0, 1, -x / 2);
    set(0, 2, -sn / 2 * x);
    set(0, 4, -std::sqrt((n - 1) / (n * n)) * jzz);
    set(1, 3, -sn / 2 * x);
    set(2, 3, -x / 2);
    set(4, 5, -x / 2);
    return h;
}

Mat v3_eff_ang(int n_c, double w, double jzz, double x, double jxx) {
    double n = n_c;
    Mat h = Mat::Zero(3, 3);
    h(0, 0) = -2 * w + (n - 1) / 4 * jxx + (n - 1) / n * jzz;
    h(1, 1) = -w;
    h(2, 2) = -2 * w - jxx / 4 + jzz / n;
    h(0, 1) = h(1, 0) = -std::sqrt(n) / 2 * x;
    h(0, 2) = h(2, 0) = -std::sqrt((n - 1) / (n * n)) * jzz;
    return h;
}

Mat v3_eff_comp(int n_c, double w, double jzz, double jxx) {
    double n = n_c;
    Mat h(2, 2);
    h << -2 * w, std::sqrt(n - 1) / 4 * jxx, std::sqrt(n - 1) / 4 * jxx, -2 * w + (n - 2) / 4 * jxx + jzz;
    return h;
}

Mat v3_transform(int n_c) {
    double n = n_c;
    double p = std::sqrt((n - 1) / n), q = std::sqrt(1 / n);
    Mat u = Mat::Zero(6, 6);
    u(0, 0) = p; u(2, 0) = q;   // 1c1r
    u(1, 1) = p; u(3, 1) = q;   // 1c0r
    u(4, 2) = 1;                // 0c1r
    u(5, 3) = 1;                // 0c0r
    u(0, 4) = -q; u(2, 4) = p;  // q1r
    u(1, 5) = -q; u(3, 5) = p;  // q0r
    return u;
}

std::vector<std::string> V3Result::comp_labels() {
    return {"1a0b1r", "1a0b0r", "0a1b1r", "0a1b0r", "0a0b1r", "0a0b0r"};
}

std::vector<std::string> V3Result::ang_labels() {
    return {"1c1r", "1c0r", "0c1r", "0c0r", "q1r", "q0r"};
}

V3Result v3_model(int n_c, double w, double jzz, const StageConfig& cfg, const std::vector<double>& grid) {
    if (n_c < 2) throw ValidationError("v3_model: n_c must be >= 2");
    if (!(w > 0) || !(jzz > 0)) throw ValidationError("v3_model: w and jzz must be > 0");
    validate(cfg);
    check_grid(grid);
    V3Result res;
    res.transform = v3_transform(n_c);
    double n = n_c;
    Vec prev3, prev6;
    for (double t : grid) {
        auto p = main_params(cfg, t);
        V3Point pt;
        pt.t = t;
        pt.x = p.x;
        pt.jxx = p.jxx;
        pt.full_comp = v3_full_comp(n_c, w, jzz, p.x, p.jxx);
        pt.full_ang = v3_full_ang(n_c, w, jzz, p.x, p.jxx);
        pt.eff_ang = v3_eff_ang(n_c, w, jzz, p.x, p.jxx);
        pt.eff_comp = v3_eff_comp(n_c, w, jzz, p.jxx);
        auto g3 = ground_state(pt.eff_ang, prev3.size() ? &prev3 : nullptr);
        prev3 = g3.vector;
        double cr = g3.vector(0), qr = g3.vector(2);
        pt.alpha = cr * std::sqrt(1 / n) + qr * std::sqrt((n - 1) / n);
        pt.beta = cr * std::sqrt((n - 1) / n) - qr * std::sqrt(1 / n);
        auto g6 = ground_state(pt.full_comp, prev6.size() ? &prev6 : nullptr);
        Vec psi = g6.vector;
        if (psi.sum() < 0) psi = -psi;
        prev6 = psi;
        Vec phi = res.transform.transpose() * psi;
        pt.signed_comp = psi.cwiseAbs2().cwiseProduct(psi.cwiseSign());
        pt.signed_ang = phi.cwiseAbs2().cwiseProduct(phi.cwiseSign());
        res.points.push_back(std::move(pt));
    }
    return res;
}

// ---------------------------------------------------------------- composite / iterations

void validate(const CompositeInstance& c) {
    if (c.groups.empty()) throw ValidationError("composite needs at least one LM structure");
    for (const auto& g : c.groups)
        if (g.m < 1 || g.n_c < 1) throw ValidationError("composite group needs m >= 1 and n_c >= 1");
    if (c.m_r < 1) throw ValidationError("composite needs m_r >= 1");
    if (!(c.w > 0) || !(c.jzz > 0)) throw ValidationError("composite w and jzz must be > 0");
}

ExplicitGraph expand(const CompositeInstance& c) {
    validate(c);
    ExplicitGraph g;
    std::vector<std::vector<int>> group_vertices;
    int v = 0;
    for (const auto& grp : c.groups) {
        std::vector<int> gv;
        for (int i = 0; i < grp.m; ++i) {
            std::vector<int> cl;
            for (int k = 0; k < grp.n_c; ++k) cl.push_back(v++);
            for (size_t a = 0; a < cl.size(); ++a)
                for (size_t b = a + 1; b < cl.size(); ++b) {
                    g.edges.push_back({cl[a], cl[b], EdgeClass::clique});
                    g.xx_edges.emplace_back(cl[a], cl[b]);
                }
            gv.insert(gv.end(), cl.begin(), cl.end());
        }
        group_vertices.push_back(gv);
    }
    std::vector<int> rs;
    for (int j = 0; j < c.m_r; ++j) rs.push_back(v++);
    for (size_t a = 0; a < group_vertices.size(); ++a)
        for (size_t b = a + 1; b < group_vertices.size(); ++b)
            for (int p : group_vertices[a])
                for (int q : group_vertices[b]) g.edges.push_back({p, q, EdgeClass::plain});
    for (const auto& gv : group_vertices)
        for (int p : gv)
            for (int r : rs) g.edges.push_back({p, r, EdgeClass::plain});
    g.vertex_count = v;
    g.weights.assign(v, c.w);
    g.jzz = c.jzz;
    auto icfg = composite_iterations(c);
    double jmax = 0.0;
    for (const auto& s : icfg.steps) jmax = std::max(jmax, s.jxx);
    g.jzz_clique = 50.0 * (icfg.gamma1() + jmax + c.m_r);
    return g;
}

IterationConfig composite_iterations(const CompositeInstance& c, double gamma1_factor) {
    validate(c);
    IterationConfig icfg;
    icfg.gamma1_factor = gamma1_factor;
    int v = 0;
    for (const auto& grp : c.groups) {
        auto step = make_iteration_step(grp.m, grp.n_c);
        for (int i = 0; i < grp.m; ++i) {
            for (int a = 0; a < grp.n_c; ++a)
                for (int b = a + 1; b < grp.n_c; ++b) step.driver_edges.emplace_back(v + a, v + b);
            v += grp.n_c;
        }
        icfg.steps.push_back(step);
    }
    validate(icfg);
    return icfg;
}

namespace {

Mat csz_or_zero(int m) { return m >= 1 ? dicke_ops(m).csz : Mat(Mat::Zero(1, 1)); }
Mat csx_or_zero(int m) { return m >= 1 ? dicke_ops(m).csx : Mat(Mat::Zero(1, 1)); }

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

Vec composite_levels(const CompositeInstance& c, double x, const std::vector<double>& jxx, int k) {
    validate(c);
    int G = static_cast<int>(c.groups.size());
    if (static_cast<int>(jxx.size()) != G) throw ValidationError("composite_levels: one jxx per group");
    std::vector<double> all;
    std::vector<int> q(G, 0);
    while (true) {
        bool ok = true;
        for (int g = 0; g < G; ++g) ok = ok && (q[g] == 0 || c.groups[g].n_c >= 2);
        if (ok) {
            // factors: groups (Dicke over pair cliques), then R
            std::vector<Mat> ham, occ;
            double mult = 1.0, offset = 0.0;
            for (int g = 0; g < G; ++g) {
                const auto& grp = c.groups[g];
                int M = grp.m - q[g];
                auto cr = clique_reduce(grp.n_c, c.w, x, jxx[g]);
                ham.push_back(-std::sqrt(static_cast<double>(grp.n_c)) * x * csx_or_zero(M) - cr.w_eff * csz_or_zero(M));
                occ.push_back(csz_or_zero(M) + q[g] * Mat::Identity(M + 1, M + 1));
                offset += q[g] * cr.theta;
                mult *= binom(grp.m, q[g]) * std::pow(grp.n_c - 1.0, q[g]);
            }
            ham.push_back(-x * csx_or_zero(c.m_r) - c.w * csz_or_zero(c.m_r));
            occ.push_back(csz_or_zero(c.m_r));
            int F = G + 1;
            auto embed_at = [&](const std::vector<std::pair<int, Mat>>& ops) {
                Mat r = Mat::Identity(1, 1);
                for (int f = 0; f < F; ++f) {
                    Mat piece = Mat::Identity(ham[f].rows(), ham[f].cols());
                    for (const auto& [pos, op] : ops)
                        if (pos == f) piece = op;
                    r = kron(r, piece);
                }
                return r;
            };
            Mat h = embed_at({});
            h *= offset;
            for (int f = 0; f < F; ++f) h += embed_at({{f, ham[f]}});
            for (int a = 0; a < F; ++a)
                for (int b = a + 1; b < F; ++b) h += c.jzz * embed_at({{a, occ[a]}, {b, occ[b]}});
            Vec ev = sym_eigenvalues(h);
            long long copies = static_cast<long long>(std::min<double>(mult, k));
            for (Eigen::Index i = 0; i < std::min<Eigen::Index>(k, ev.size()); ++i)
                for (long long cp = 0; cp < copies; ++cp) all.push_back(ev(i));
        }
        int g = 0;
        while (g < G && ++q[g] > c.groups[g].m) q[g++] = 0;
        if (g == G) break;
    }
    std::sort(all.begin(), all.end());
    int keep = std::min<int>(k, static_cast<int>(all.size()));
    Vec out(keep);
    for (int i = 0; i < keep; ++i) out(i) = all[i];
    return out;
}

std::vector<IterationTrace> iterate_demo(const CompositeInstance& c, const IterationConfig& icfg,
                                         const std::vector<double>& grid, int k) {
    validate(c);
    validate(icfg);
    check_grid(grid);
    int G = static_cast<int>(c.groups.size());
    if (static_cast<int>(icfg.steps.size()) != G) throw ValidationError("iterate_demo: one step per LM structure");
    double g1 = icfg.gamma1();
    std::vector<IterationTrace> out;
    for (int d = 0; d <= G; ++d) {
        IterationTrace it;
        it.drivers = d;
        it.trace.grid = grid;
        it.trace.levels.resize(grid.size());
        std::vector<TaggedCurve> lm(G);
        for (int g = 0; g < G; ++g) lm[g].tag = "bare-LM" + std::to_string(g + 1);
        TaggedCurve gm{"bare-GM", {}};
        auto jxx_at = [&](double t) {
            std::vector<double> j(G, 0.0);
            for (int g = 0; g < d; ++g) j[g] = iter_params(icfg, t, g).jxx;
            return j;
        };
        auto lm_at = [&](int g, double t) {
            double x = (1.0 - t) * g1;
            auto cr = clique_reduce(c.groups[g].n_c, c.w, x, jxx_at(t)[g]);
            return c.groups[g].m * beta0(cr.same_sign.w, cr.same_sign.x);
        };
        auto gm_at = [&](double t) { return c.m_r * beta0(c.w, (1.0 - t) * g1); };
        parallel_for(static_cast<int>(grid.size()), 0, [&](int i) {
            double t = grid[i];
            Vec ev = composite_levels(c, (1.0 - t) * g1, jxx_at(t), k);
            it.trace.levels[i].assign(ev.data(), ev.data() + ev.size());
        });
        for (double t : grid) {
            for (int g = 0; g < G; ++g) lm[g].values.push_back(lm_at(g, t));
            gm.values.push_back(gm_at(t));
        }
        for (int g = 0; g < G; ++g) {
            double t_lo = 1.0 - icfg.steps[g].gamma2 / g1;
            std::vector<double> sg, sl, sr;
            for (size_t i = 0; i < grid.size(); ++i)
                if (grid[i] + 1e-12 >= t_lo) {
                    sg.push_back(grid[i]);
                    sl.push_back(lm[g].values[i]);
                    sr.push_back(gm.values[i]);
                }
            auto rep = detect_anticrossing(sg, sl, sr, {}, {}, 0.1,
                                           [&](double t) { return lm_at(g, t) - gm_at(t); });
            it.crossings += static_cast<int>(rep.t_star.size());
            it.crossing_t.insert(it.crossing_t.end(), rep.t_star.begin(), rep.t_star.end());
        }
        it.trace.curves = lm;
        it.trace.curves.push_back(gm);
        out.push_back(std::move(it));
    }
    return out;
}

}  // namespace xxmis
