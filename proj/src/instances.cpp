#include "xxmis/instances.hpp"

#include "xxmis/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace xxmis {

const char* structure_name(Structure s) {
    return s == Structure::shared ? "shared" : "disjoint";
}

int GicInstance::m_g() const {
    return structure == Structure::shared ? m_l() + r_count : r_count;
}

int GicInstance::max_size() const {
    int n = 0;
    for (const auto& c : cliques) n = std::max(n, c.size);
    return n;
}

int GicInstance::min_size() const {
    int n = cliques.empty() ? 0 : cliques.front().size;
    for (const auto& c : cliques) n = std::min(n, c.size);
    return n;
}

bool GicInstance::uniform_size() const {
    return std::all_of(cliques.begin(), cliques.end(),
                       [&](const CliqueSpec& c) { return c.size == cliques.front().size; });
}

bool GicInstance::uniform_weight() const {
    return std::all_of(cliques.begin(), cliques.end(),
                       [&](const CliqueSpec& c) { return c.weight == r_weight; });
}

double GicInstance::degeneracy() const {
    double d = 1.0;
    for (const auto& c : cliques) d *= c.size;
    return d;
}

int GicInstance::vertex_count() const {
    int n = r_count;
    for (const auto& c : cliques) n += c.size;
    return n;
}

bool GicInstance::anti_crossing_bearing() const {
    double s = 0.0;
    for (const auto& c : cliques) s += std::sqrt(static_cast<double>(c.size));
    return s > m_g();
}

double default_jzz(int n_c) {
    return 1.0 + (std::sqrt(static_cast<double>(n_c)) + 1.0) / 2.0;
}

namespace {

GicInstance make_family(Structure st, int m_l, const std::vector<int>& sizes, int m_r, double w,
                        std::optional<double> jzz, std::optional<double> jzz_clique) {
    if (m_l < 1) throw ValidationError("m_l must be >= 1");
    if (static_cast<int>(sizes.size()) != m_l)
        throw ValidationError("sizes must list exactly m_l clique sizes");
    if (m_r < 0) throw ValidationError("m_r must be >= 0");
    if (!(w > 0)) throw ValidationError("weight must be > 0");
    GicInstance inst;
    inst.structure = st;
    for (int n : sizes) {
        if (n < 1) throw ValidationError("clique size must be >= 1");
        inst.cliques.push_back({n, w, st == Structure::shared});
    }
    inst.r_count = m_r;
    inst.r_weight = w;
    inst.jzz = jzz ? *jzz : default_jzz(inst.max_size());
    inst.jzz_clique = jzz_clique;
    validate(inst);
    return inst;
}

}  // namespace

GicInstance make_gdis(int m_l, const std::vector<int>& sizes, int m_r, double w,
                      std::optional<double> jzz, std::optional<double> jzz_clique) {
    return make_family(Structure::disjoint, m_l, sizes, m_r, w, jzz, jzz_clique);
}

GicInstance make_gshare(int m_l, const std::vector<int>& sizes, int m_r, double w,
                        std::optional<double> jzz, std::optional<double> jzz_clique) {
    return make_family(Structure::shared, m_l, sizes, m_r, w, jzz, jzz_clique);
}

void validate(const GicInstance& inst) {
    if (inst.cliques.empty()) throw ValidationError("instance needs at least one clique (m_l >= 1)");
    for (const auto& c : inst.cliques) {
        if (c.size < 1) throw ValidationError("clique size must be >= 1");
        if (!(c.weight > 0)) throw ValidationError("clique weight must be > 0");
        if (c.shares_with_gm != (inst.structure == Structure::shared))
            throw ValidationError("shared structure requires exactly one shared vertex per clique");
    }
    if (inst.r_count < 0) throw ValidationError("m_r must be >= 0");
    if (!(inst.r_weight > 0)) throw ValidationError("R weight must be > 0");
    if (!(inst.jzz > 0)) throw ValidationError("jzz must be > 0");
    if (inst.jzz_clique && !(*inst.jzz_clique > 0)) throw ValidationError("jzz_clique must be > 0");
}

GicInstance with_default_penalty(GicInstance inst, double gamma1, double jxx) {
    if (!inst.jzz_clique) inst.jzz_clique = 50.0 * (gamma1 + jxx + inst.m_g());
    return inst;
}

bool ExplicitGraph::adjacent(int a, int b) const {
    for (const auto& e : edges)
        if ((e.i == a && e.j == b) || (e.i == b && e.j == a)) return true;
    return false;
}

std::vector<std::vector<char>> ExplicitGraph::adjacency() const {
    std::vector<std::vector<char>> adj(vertex_count, std::vector<char>(vertex_count, 0));
    for (const auto& e : edges) adj[e.i][e.j] = adj[e.j][e.i] = 1;
    return adj;
}

void validate(const ExplicitGraph& g) {
    if (g.vertex_count < 0 || static_cast<int>(g.weights.size()) != g.vertex_count)
        throw ValidationError("weight count must equal vertex count");
    std::set<std::pair<int, int>> clique_pairs;
    for (const auto& e : g.edges) {
        if (e.i == e.j) throw ValidationError("self-loop");
        if (e.i < 0 || e.j < 0 || e.i >= g.vertex_count || e.j >= g.vertex_count)
            throw ValidationError("edge endpoint out of range");
        if (e.cls == EdgeClass::clique) clique_pairs.insert(std::minmax(e.i, e.j));
    }
    for (auto [a, b] : g.xx_edges)
        if (!clique_pairs.count(std::minmax(a, b)))
            throw ValidationError("xx edge is not a clique-class edge");
}

std::vector<int> clique_vertices(const GicInstance& inst, int i) {
    int start = 0;
    for (int c = 0; c < i; ++c) start += inst.cliques[c].size;
    std::vector<int> v(inst.cliques[i].size);
    for (int k = 0; k < inst.cliques[i].size; ++k) v[k] = start + k;
    return v;
}

std::vector<int> r_vertices(const GicInstance& inst) {
    int start = inst.vertex_count() - inst.r_count;
    std::vector<int> v(inst.r_count);
    for (int k = 0; k < inst.r_count; ++k) v[k] = start + k;
    return v;
}

std::vector<int> gm_vertices(const GicInstance& inst) {
    std::vector<int> gm;
    if (inst.structure == Structure::shared)
        for (int i = 0; i < inst.m_l(); ++i) gm.push_back(clique_vertices(inst, i).back());
    for (int r : r_vertices(inst)) gm.push_back(r);
    return gm;
}

ExplicitGraph expand(const GicInstance& inst) {
    validate(inst);
    ExplicitGraph g;
    g.vertex_count = inst.vertex_count();
    g.jzz = inst.jzz;
    g.jzz_clique = inst.jzz_clique.value_or(inst.jzz);
    for (const auto& c : inst.cliques)
        for (int k = 0; k < c.size; ++k) g.weights.push_back(c.weight);
    for (int k = 0; k < inst.r_count; ++k) g.weights.push_back(inst.r_weight);

    for (int i = 0; i < inst.m_l(); ++i) {
        auto v = clique_vertices(inst, i);
        for (size_t a = 0; a < v.size(); ++a)
            for (size_t b = a + 1; b < v.size(); ++b) {
                g.edges.push_back({v[a], v[b], EdgeClass::clique});
                g.xx_edges.emplace_back(v[a], v[b]);
            }
    }
    auto rs = r_vertices(inst);
    for (int i = 0; i < inst.m_l(); ++i) {
        auto v = clique_vertices(inst, i);
        int attached = inst.structure == Structure::shared ? static_cast<int>(v.size()) - 1
                                                           : static_cast<int>(v.size());
        for (int a = 0; a < attached; ++a)
            for (int r : rs) g.edges.push_back({v[a], r, EdgeClass::plain});
    }
    return g;
}

DriverPartition identify_cliques(const ExplicitGraph& g, const std::vector<int>& seed) {
    validate(g);
    auto adj = g.adjacency();
    std::vector<char> in_seed(g.vertex_count, 0);
    for (int v : seed) {
        if (v < 0 || v >= g.vertex_count) throw ValidationError("seed vertex out of range");
        if (in_seed[v]) throw ValidationError("seed lists a vertex twice");
        in_seed[v] = 1;
    }
    for (size_t a = 0; a < seed.size(); ++a)
        for (size_t b = a + 1; b < seed.size(); ++b)
            if (adj[seed[a]][seed[b]]) throw ValidationError("seed is not an independent set");
    for (int u = 0; u < g.vertex_count; ++u) {
        if (in_seed[u]) continue;
        bool blocked = false;
        for (int v : seed) blocked = blocked || adj[u][v];
        if (!blocked) throw ValidationError("seed is not a maximal independent set");
    }

    DriverPartition part;
    std::vector<int> owner(g.vertex_count, -1);
    for (size_t s = 0; s < seed.size(); ++s) {
        int v = seed[s];
        std::vector<int> cl;
        for (int u = 0; u < g.vertex_count; ++u) {
            if (u == v) { cl.push_back(u); continue; }
            if (in_seed[u] || !adj[u][v]) continue;
            bool other = false;
            for (int w : seed) other = other || (w != v && adj[u][w]);
            if (!other) cl.push_back(u);
        }
        for (int u : cl) owner[u] = static_cast<int>(s);
        part.cliques.push_back(std::move(cl));
    }
    for (const auto& cl : part.cliques)
        for (size_t a = 0; a < cl.size(); ++a)
            for (size_t b = a + 1; b < cl.size(); ++b)
                if (!adj[cl[a]][cl[b]])
                    throw ValidationError("dMDC-not-supported: identified set is not a clique");
    for (int u = 0; u < g.vertex_count; ++u)
        for (int v = u + 1; v < g.vertex_count; ++v)
            if (adj[u][v] && owner[u] >= 0 && owner[v] >= 0 && owner[u] != owner[v])
                throw ValidationError("dMDC-not-supported: identified cliques are not independent");
    for (int u = 0; u < g.vertex_count; ++u)
        if (owner[u] < 0) part.leftover.push_back(u);
    return part;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError("instance: bad number for '" + key + "': " + s);
    return v;
}

int parse_int(const std::string& key, const std::string& s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ValidationError("instance: bad integer for '" + key + "': " + s);
    return v;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string write_instance(const GicInstance& inst) {
    validate(inst);
    if (!inst.uniform_weight())
        throw ValidationError("text format stores a single weight; instance is non-uniform");
    std::ostringstream os;
    os << "structure = " << structure_name(inst.structure) << "\n";
    os << "cliques = ";
    for (int i = 0; i < inst.m_l(); ++i) os << (i ? "," : "") << inst.cliques[i].size;
    os << "\n";
    os << "m_r = " << inst.r_count << "\n";
    os << "w = " << fmt_double(inst.r_weight) << "\n";
    os << "jzz = " << fmt_double(inst.jzz) << "\n";
    if (inst.jzz_clique) os << "jzz_clique = " << fmt_double(*inst.jzz_clique) << "\n";
    return os.str();
}

GicInstance parse_instance(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("instance line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        static const std::set<std::string> known{"structure", "cliques", "m_r", "w", "jzz", "jzz_clique"};
        if (!known.count(key)) throw ValidationError("instance: unknown key '" + key + "'");
        if (kv.count(key)) throw ValidationError("instance: duplicate key '" + key + "'");
        kv[key] = val;
    }
    for (const char* req : {"structure", "cliques", "m_r", "w"})
        if (!kv.count(req)) throw ValidationError(std::string("instance: missing key '") + req + "'");

    Structure st;
    if (kv["structure"] == "disjoint") st = Structure::disjoint;
    else if (kv["structure"] == "shared") st = Structure::shared;
    else throw ValidationError("instance: structure must be disjoint or shared");

    std::vector<int> sizes;
    std::istringstream cs(kv["cliques"]);
    std::string tok;
    while (std::getline(cs, tok, ',')) sizes.push_back(parse_int("cliques", trim(tok)));
    int m_r = parse_int("m_r", kv["m_r"]);
    double w = parse_double("w", kv["w"]);
    std::optional<double> jzz, jzzc;
    if (kv.count("jzz")) jzz = parse_double("jzz", kv["jzz"]);
    if (kv.count("jzz_clique")) jzzc = parse_double("jzz_clique", kv["jzz_clique"]);
    int m_l = static_cast<int>(sizes.size());
    return st == Structure::shared ? make_gshare(m_l, sizes, m_r, w, jzz, jzzc)
                                   : make_gdis(m_l, sizes, m_r, w, jzz, jzzc);
}

GicInstance load_instance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot open instance file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_instance(ss.str());
}

}  // namespace xxmis
