#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "axel/matrix.hpp"
#include "axel/rng.hpp"

namespace axel {

// Immutable undirected graph in compressed-neighbor-list form.
// Neighbor lists are sorted, symmetric and self-loop free. `edges` lists each
// undirected edge once with u < v; `arc_edge` maps every CSR arc to its edge
// id, shared by both directions.
struct Graph {
    int n = 0;
    std::vector<int> offsets;    // size n+1
    std::vector<int> neighbors;  // size 2*|E|
    std::vector<std::pair<int, int>> edges;
    std::vector<int> arc_edge;

    int degree(int v) const { return offsets[v + 1] - offsets[v]; }
    std::span<const int> neighbors_of(int v) const {
        return {neighbors.data() + offsets[v], static_cast<std::size_t>(degree(v))};
    }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_arcs() const { return static_cast<int>(neighbors.size()); }
    bool has_edge(int u, int v) const;

    // Symmetrizes, deduplicates and drops self-loops. Ids must be in [0, n).
    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& raw);
};

struct Labels {
    bool is_int = true;
    std::vector<int> ints;       // class labels, when is_int
    std::vector<double> reals;   // regression targets otherwise
    int num_classes = 0;         // max label + 1, when is_int
    bool empty() const { return ints.empty() && reals.empty(); }
    int size() const { return is_int ? static_cast<int>(ints.size()) : static_cast<int>(reals.size()); }
};

struct NodeData {
    Matrix features;
    Labels labels;
};

struct SplitMask {
    std::vector<std::uint8_t> train, val, test;
    std::uint64_t seed = 0;
};

struct EdgeListResult {
    Graph graph;
    // original_ids[dense_id] = id as it appeared in the file; identity when the
    // input was already dense 0-based.
    std::vector<long long> original_ids;
    bool remapped = false;
};

// Text edge list, "u v" per line, '#' comments. A "# n=<count>" directive
// overrides the inferred node count (only upward, to keep isolated nodes).
// Sparse or non-0-based ids are remapped to dense ids in sorted order.
EdgeListResult load_edge_list(const std::string& path);

// Numeric CSV, one node per row. A non-numeric first line is treated as a
// header and skipped.
Matrix load_features_csv(const std::string& path);

// Single-column CSV. Optional header "label:int" / "label:float" pins the
// type; otherwise integer if every value parses as one.
Labels load_labels_csv(const std::string& path);

// Fraction of undirected edges whose endpoints share a label.
double edge_homophily_ratio(const Graph& g, const std::vector<int>& labels);

struct SbmConfig {
    int n = 400;
    int k_classes = 2;
    double p_intra = 0.05;
    double p_inter = 0.005;
    std::string feature_model = "gaussian";  // or "noise"
    double delta = 1.0;   // pairwise distance between class means
    int feature_dim = 8;
    std::uint64_t seed = 0;
};

// Stochastic block model with class-informative Gaussian features (class
// means at pairwise distance delta, identity covariance) or pure-noise
// features. Classes are assigned round-robin.
std::pair<Graph, NodeData> synth_sbm(const SbmConfig& cfg);

// Expected edge homophily of an SBM configuration (closed form).
double sbm_expected_homophily(const SbmConfig& cfg);

// Random 60/20/20-style split over the labeled nodes: permute, cut.
// Rounding: floor for val/test, remainder to train.
SplitMask split_nodes(const std::vector<int>& labeled_ids, int n,
                      double r_train, double r_val, double r_test,
                      std::uint64_t seed);

// Divides each feature row by its L1 norm (no-op on zero rows).
void row_normalize(Matrix& features);

}  // namespace axel
