#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xxmis {

enum class Structure { disjoint, shared };

const char* structure_name(Structure s);

struct CliqueSpec {
    int size = 1;
    double weight = 1.0;
    bool shares_with_gm = false;
};

struct GicInstance {
    std::vector<CliqueSpec> cliques;
    int r_count = 0;
    double r_weight = 1.0;
    Structure structure = Structure::disjoint;
    double jzz = 0.0;
    // Unset until a schedule is attached (see with_default_penalty).
    std::optional<double> jzz_clique;

    int m_l() const { return static_cast<int>(cliques.size()); }
    int m_g() const;
    int max_size() const;
    int min_size() const;
    bool uniform_size() const;
    bool uniform_weight() const;
    double degeneracy() const;
    int vertex_count() const;
    // Σ√n_i > m_g
    bool anti_crossing_bearing() const;
};

double default_jzz(int n_c);

GicInstance make_gdis(int m_l, const std::vector<int>& sizes, int m_r, double w,
                      std::optional<double> jzz = std::nullopt,
                      std::optional<double> jzz_clique = std::nullopt);
GicInstance make_gshare(int m_l, const std::vector<int>& sizes, int m_r, double w,
                        std::optional<double> jzz = std::nullopt,
                        std::optional<double> jzz_clique = std::nullopt);

void validate(const GicInstance& inst);

// Fills jzz_clique with 50·(Γ1 + J_xx + m_g) when unset.
GicInstance with_default_penalty(GicInstance inst, double gamma1, double jxx);

enum class EdgeClass { clique, plain };

struct Edge {
    int i = 0;
    int j = 0;
    EdgeClass cls = EdgeClass::plain;
};

struct ExplicitGraph {
    int vertex_count = 0;
    std::vector<double> weights;
    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> xx_edges;
    double jzz = 1.0;
    double jzz_clique = 1.0;

    bool adjacent(int a, int b) const;
    std::vector<std::vector<char>> adjacency() const;
};

void validate(const ExplicitGraph& g);

// Clique vertices first (shared vertex last in its clique), then R.
ExplicitGraph expand(const GicInstance& inst);

// Vertex ids of clique i in expand() numbering.
std::vector<int> clique_vertices(const GicInstance& inst, int i);
std::vector<int> r_vertices(const GicInstance& inst);
std::vector<int> gm_vertices(const GicInstance& inst);

struct DriverPartition {
    std::vector<std::vector<int>> cliques;
    std::vector<int> leftover;
};

DriverPartition identify_cliques(const ExplicitGraph& g, const std::vector<int>& seed);

// key = value text format
std::string write_instance(const GicInstance& inst);
GicInstance parse_instance(const std::string& text);
GicInstance load_instance(const std::string& path);

}  // namespace xxmis
