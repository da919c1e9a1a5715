#include "xxmis/cli.hpp"

#include "xxmis/analysis.hpp"
#include "xxmis/bounds.hpp"
#include "xxmis/errors.hpp"
#include "xxmis/hamiltonians.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace xxmis {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

struct CsvWriter::Impl {
    std::ofstream os;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
    impl_->os.open(path, std::ios::binary);
    if (!impl_->os) {
        delete impl_;
        throw ValidationError("cannot write " + path);
    }
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i) impl_->os << (i ? "," : "") << cols[i];
    impl_->os << "\n";
}

void CsvWriter::row(const std::vector<double>& vals, const std::vector<std::string>& tail) {
    bool first = true;
    for (double v : vals) {
        impl_->os << (first ? "" : ",") << format_double(v);
        first = false;
    }
    for (const auto& s : tail) {
        impl_->os << (first ? "" : ",") << s;
        first = false;
    }
    impl_->os << "\n";
}

namespace {

struct Options {
    std::string instance;
    std::string structure = "shared";
    std::string cliques;
    int m_r = -1;
    double w = 1.0;
    std::optional<double> gamma2, gamma1_factor, alpha, jxx, jzz;
    std::string timing = "linear";
    int grid = 401;
    int k = 4;
    int depth = 2;
    std::string out = ".";
    bool no_refine = false;
    // bounds
    int m = 0, mg = 0, nc = 0;
    // v3
    int v3_nc = 9;
    // iterate
    std::string groups = "2x30,3x10";
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        int v = 0;
        auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
            throw ValidationError("bad integer list '" + s + "'");
        out.push_back(v);
    }
    return out;
}

GicInstance instance_from(const Options& o) {
    GicInstance inst;
    if (!o.instance.empty()) {
        inst = load_instance(o.instance);
    } else {
        if (o.cliques.empty() || o.m_r < 0)
            throw ValidationError("give --instance or --cliques with --mr");
        auto sizes = parse_int_list(o.cliques);
        int m = static_cast<int>(sizes.size());
        if (o.structure == "shared") inst = make_gshare(m, sizes, o.m_r, o.w);
        else if (o.structure == "disjoint") inst = make_gdis(m, sizes, o.m_r, o.w);
        else throw ValidationError("structure must be shared or disjoint");
    }
    if (o.jzz) inst.jzz = *o.jzz;
    validate(inst);
    return inst;
}

StageConfig config_from(const Options& o, double default_gamma2) {
    StageConfig c;
    c.gamma2 = o.gamma2.value_or(default_gamma2);
    c.gamma1 = o.gamma1_factor.value_or(2.0) * c.gamma2;
    c.gamma0 = 2.0 * c.gamma1;
    if (o.jxx) c.alpha = *o.jxx / c.gamma2;
    else if (o.alpha) c.alpha = *o.alpha;
    else c.alpha = 2.0 * (c.gamma2 - 1.0) / c.gamma2;
    if (o.timing == "halves") c.timing = StageTiming::halves;
    else if (o.timing != "linear") throw ValidationError("timing must be linear or halves");
    validate(c);
    return c;
}

std::string out_path(const Options& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

std::vector<std::string> level_cols(int k) {
    std::vector<std::string> c;
    for (int i = 0; i < k; ++i) c.push_back("E" + std::to_string(i));
    return c;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
    auto inst = instance_from(o);
    auto cfg = config_from(o, inst.m_l());
    auto run = run_spectrum(inst, cfg, uniform_grid(o.grid), o.k, !o.no_refine);
    {
        CsvWriter csv(out_path(o, "spectrum.csv"));
        auto cols = level_cols(o.k);
        cols.insert(cols.begin(), "t");
        for (int i = 0; i < o.k; ++i) cols.push_back("tag" + std::to_string(i));
        csv.header(cols);
        for (size_t i = 0; i < run.trace.grid.size(); ++i) {
            std::vector<double> row{run.trace.grid[i]};
            row.insert(row.end(), run.trace.levels[i].begin(), run.trace.levels[i].end());
            csv.row(row, run.level_tags[i]);
        }
    }
    {
        CsvWriter csv(out_path(o, "bare.csv"));
        csv.header({"t", "x", "jxx", "bare_LM", "bare_GM", "AS0"});
        for (size_t i = 0; i < run.trace.grid.size(); ++i) {
            auto p = main_params(cfg, run.trace.grid[i]);
            csv.row({run.trace.grid[i], p.x, p.jxx, run.trace.curve("bare-LM")->values[i],
                     run.trace.curve("bare-GM")->values[i], run.trace.curve("AS0")->values[i]});
        }
    }
    const auto& r = run.stage2;
    out << "t_sep " << format_double(run.t_sep) << "\n";
    out << "stage2 bare crossings " << r.t_star.size();
    for (double t : r.t_star) out << " " << format_double(t);
    out << "\n";
    out << "stage2 min gap " << format_double(r.min_gap) << " at t " << format_double(r.t_min_gap) << "\n";
    out << "small gap " << (r.small_gap ? "yes" : "no") << " (threshold 0.1 of the next spacing)\n";
    out << "classification " << crossing_class_name(r.classification) << "\n";
    return 0;
}

int cmd_bounds(const Options& o, std::ostream& out) {
    BoundsReport b;
    if (!o.instance.empty() || !o.cliques.empty()) {
        auto inst = instance_from(o);
        auto cfg = config_from(o, inst.m_l());
        auto v = feasibility_check(inst, cfg);
        b = v.bounds;
        out << format_bounds(b);
        out << "J_xx        " << format_double(v.jxx) << (v.jxx_in_window ? "  in window" : "  outside window") << "\n";
        for (const auto& s : v.violated) out << "violated    " << s << "\n";
    } else {
        if (o.m < 1 || o.m_r < 0 || o.nc < 1) throw ValidationError("bounds needs --m, --mr and --nc");
        int mg = o.mg > 0 ? o.mg : o.m + o.m_r;
        Structure s = o.structure == "disjoint" || mg == o.m_r ? Structure::disjoint : Structure::shared;
        double jzz = o.jzz.value_or(default_jzz(o.nc));
        b = jxx_bounds(o.m, o.m_r, mg, o.nc, o.gamma2.value_or(o.m), jzz, s);
        out << format_bounds(b);
    }
    CsvWriter csv(out_path(o, "bounds.csv"));
    csv.header({"jxx_lift", "jxx_steer", "jxx_sep", "jxx_sink", "jzz_steer", "window_lo", "window_hi", "witness"});
    double nan = std::nan("");
    csv.row({b.jxx_lift, b.jxx_steer, b.jxx_sep, b.jxx_sink, b.jzz_steer, b.window ? b.window->first : nan,
             b.window ? b.window->second : nan, b.witness});
    return 0;
}

std::vector<double> stage1_grid(const StageConfig& cfg, int points) {
    return uniform_grid(points, 0.0, cfg.t_sep());
}

int cmd_steering(const Options& o, std::ostream& out) {
    auto inst = instance_from(o);
    auto cfg = config_from(o, inst.m_l());
    auto tr = localization(inst, cfg, stage1_grid(cfg, o.grid), o.depth);
    CsvWriter csv(out_path(o, "localization.csv"));
    std::vector<std::string> cols{"t", "wL0"};
    for (int d = 1; d <= o.depth; ++d) cols.push_back("wR_cum_" + std::to_string(d));
    csv.header(cols);
    for (size_t i = 0; i < tr.grid.size(); ++i) {
        std::vector<double> row{tr.grid[i], tr.w_l0[i]};
        row.insert(row.end(), tr.w_r_cum[i].begin(), tr.w_r_cum[i].end());
        csv.row(row);
    }
    out << "stage 1 end t " << format_double(tr.grid.back()) << "\n";
    out << "wL0 " << format_double(tr.w_l0.back()) << "\n";
    for (int d = 1; d <= o.depth; ++d)
        out << "wR_cum_" << d << " " << format_double(tr.w_r_cum.back()[d - 1]) << "\n";
    return 0;
}

int cmd_negativity(const Options& o, std::ostream& out) {
    auto inst = instance_from(o);
    auto cfg = config_from(o, inst.m_l());
    auto neg = negativity(inst, cfg, uniform_grid(o.grid));
    CsvWriter csv(out_path(o, "negativity.csv"));
    csv.header({"t", "fraction"});
    double onset = -1.0, peak = 0.0;
    for (auto [t, f] : neg) {
        csv.row({t, f});
        if (onset < 0 && f > 1e-10) onset = t;
        peak = std::max(peak, f);
    }
    out << "onset t " << (onset < 0 ? std::string("none") : format_double(onset)) << "\n";
    out << "peak fraction " << format_double(peak) << "\n";
    return 0;
}

int cmd_v3(const Options& o, std::ostream& out) {
    Options v = o;
    if (!v.gamma2) v.gamma2 = 1.0;
    if (!v.jxx && !v.alpha) v.alpha = 0.0;
    auto cfg = config_from(v, 1.0);
    double jzz = o.jzz.value_or(default_jzz(o.v3_nc));
    auto res = v3_model(o.v3_nc, o.w, jzz, cfg, uniform_grid(o.grid));
    CsvWriter csv(out_path(o, "v3.csv"));
    std::vector<std::string> cols{"t", "x", "jxx", "alpha", "beta"};
    for (const auto& l : V3Result::comp_labels()) cols.push_back("comp_" + l);
    for (const auto& l : V3Result::ang_labels()) cols.push_back("ang_" + l);
    csv.header(cols);
    double beta_min = 0.0, alpha_min = 1.0;
    for (const auto& p : res.points) {
        std::vector<double> row{p.t, p.x, p.jxx, p.alpha, p.beta};
        row.insert(row.end(), p.signed_comp.data(), p.signed_comp.data() + p.signed_comp.size());
        row.insert(row.end(), p.signed_ang.data(), p.signed_ang.data() + p.signed_ang.size());
        csv.row(row);
        beta_min = std::min(beta_min, p.beta);
        alpha_min = std::min(alpha_min, p.alpha);
    }
    out << "min alpha " << format_double(alpha_min) << "\n";
    out << "min beta " << format_double(beta_min) << "\n";
    return 0;
}

int cmd_iterate(const Options& o, std::ostream& out) {
    CompositeInstance c;
    std::stringstream ss(o.groups);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto x = tok.find('x');
        if (x == std::string::npos) throw ValidationError("groups take the form MxN,MxN");
        auto a = parse_int_list(tok.substr(0, x)), b = parse_int_list(tok.substr(x + 1));
        c.groups.push_back({a[0], b[0]});
    }
    c.m_r = o.m_r < 0 ? 5 : o.m_r;
    c.w = o.w;
    int nmax = 1;
    for (const auto& g : c.groups) nmax = std::max(nmax, g.n_c);
    c.jzz = o.jzz.value_or(default_jzz(nmax));
    auto icfg = composite_iterations(c, o.gamma1_factor.value_or(2.0));
    auto res = iterate_demo(c, icfg, uniform_grid(o.grid), o.k);
    CsvWriter csv(out_path(o, "iterate.csv"));
    auto cols = level_cols(o.k);
    cols.insert(cols.begin(), {"drivers", "t"});
    for (const auto& cv : res[0].trace.curves) cols.push_back(cv.tag == "bare-GM" ? "bare_GM" : "bare_LM" + cv.tag.substr(7));
    csv.header(cols);
    for (const auto& it : res) {
        for (size_t i = 0; i < it.trace.grid.size(); ++i) {
            std::vector<double> row{static_cast<double>(it.drivers), it.trace.grid[i]};
            auto lv = it.trace.levels[i];
            lv.resize(o.k, std::nan(""));
            row.insert(row.end(), lv.begin(), lv.end());
            for (const auto& cv : it.trace.curves) row.push_back(cv.values[i]);
            csv.row(row);
        }
        out << "drivers " << it.drivers << " crossings " << it.crossings;
        for (double t : it.crossing_t) out << " " << format_double(t);
        out << "\n";
    }
    return 0;
}

int cmd_stage0(const Options& o, std::ostream& out) {
    auto inst = instance_from(o);
    auto cfg = config_from(o, inst.m_l());
    auto scan = stage0_gap_scan(inst, cfg, uniform_grid(o.grid));
    CsvWriter csv(out_path(o, "stage0.csv"));
    csv.header({"t", "gap"});
    for (size_t i = 0; i < scan.t.size(); ++i) csv.row({scan.t[i], scan.gap[i]});
    out << "min gap " << format_double(scan.min_gap) << " at t " << format_double(scan.t_min) << "\n";
    out << "reference " << format_double(scan.reference) << (scan.passes ? "  ok" : "  below") << "\n";
    out << "projection error bound " << format_double(scan.epsilon) << "\n";
    return scan.passes ? 0 : 1;
}

void add_instance_flags(CLI::App* sub, Options& o) {
    sub->add_option("--instance", o.instance, "instance file");
    sub->add_option("--structure", o.structure, "shared or disjoint");
    sub->add_option("--cliques", o.cliques, "clique sizes, comma separated");
    sub->add_option("--mr", o.m_r, "number of R vertices");
    sub->add_option("--w", o.w, "vertex weight");
    sub->add_option("--jzz", o.jzz, "J_zz override");
}

void add_schedule_flags(CLI::App* sub, Options& o) {
    sub->add_option("--gamma2", o.gamma2, "Γ2 (default m)");
    sub->add_option("--gamma1-factor", o.gamma1_factor, "Γ1 = K·Γ2 (default 2)");
    auto* a = sub->add_option("--alpha", o.alpha, "α");
    auto* j = sub->add_option("--jxx", o.jxx, "J_xx");
    a->excludes(j);
    j->excludes(a);
    sub->add_option("--timing", o.timing, "linear or halves");
}

void add_run_flags(CLI::App* sub, Options& o) {
    sub->add_option("--grid", o.grid, "grid points on [0,1]")->check(CLI::Range(2, 1000000));
    sub->add_option("--k", o.k, "levels")->check(CLI::Range(2, 64));
    sub->add_option("--out", o.out, "output directory");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"xxmis"};
    app.require_subcommand(1, 1);
    std::string which;
    auto add = [&](const char* name, const char* help) {
        auto* s = app.add_subcommand(name, help);
        s->callback([&which, name] { which = name; });
        return s;
    };
    auto* spectrum = add("spectrum", "Stage 1-2 spectrum, bare curves and crossing report");
    add_instance_flags(spectrum, o);
    add_schedule_flags(spectrum, o);
    add_run_flags(spectrum, o);
    spectrum->add_flag("--no-refine", o.no_refine, "skip local grid refinement");

    auto* bounds = add("bounds", "J_xx feasibility bounds");
    add_instance_flags(bounds, o);
    add_schedule_flags(bounds, o);
    bounds->add_option("--m", o.m, "LM cliques");
    bounds->add_option("--mg", o.mg, "m_g");
    bounds->add_option("--nc", o.nc, "clique size");
    bounds->add_option("--out", o.out, "output directory");

    auto* steering = add("steering", "Stage 1 structural localization");
    add_instance_flags(steering, o);
    add_schedule_flags(steering, o);
    add_run_flags(steering, o);
    steering->add_option("--depth", o.depth, "R-block depth")->check(CLI::PositiveNumber);

    auto* neg = add("negativity", "negative amplitude fraction of the ground state");
    add_instance_flags(neg, o);
    add_schedule_flags(neg, o);
    add_run_flags(neg, o);

    auto* v3 = add("v3", "three-vertex interference model");
    v3->add_option("--nc", o.v3_nc, "clique size");
    v3->add_option("--w", o.w, "vertex weight");
    v3->add_option("--jzz", o.jzz, "J_zz");
    add_schedule_flags(v3, o);
    add_run_flags(v3, o);

    auto* iter = add("iterate", "multi-driver iteration demo");
    iter->add_option("--groups", o.groups, "LM structures as MxN,MxN");
    iter->add_option("--mr", o.m_r, "R vertices");
    iter->add_option("--w", o.w, "vertex weight");
    iter->add_option("--jzz", o.jzz, "J_zz");
    iter->add_option("--gamma1-factor", o.gamma1_factor, "Γ1 = K·max Γ2");
    add_run_flags(iter, o);

    auto* s0 = add("stage0", "Stage 0 gap scan on the full Hamiltonian");
    add_instance_flags(s0, o);
    add_schedule_flags(s0, o);
    add_run_flags(s0, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }
    try {
        if (which == "spectrum") return cmd_spectrum(o, out);
        if (which == "bounds") return cmd_bounds(o, out);
        if (which == "steering") return cmd_steering(o, out);
        if (which == "negativity") return cmd_negativity(o, out);
        if (which == "v3") return cmd_v3(o, out);
        if (which == "iterate") return cmd_iterate(o, out);
        if (which == "stage0") return cmd_stage0(o, out);
        err << "error: no analysis selected\n";
        return 2;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace xxmis
