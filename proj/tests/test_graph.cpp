#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "axel/graph.hpp"

using namespace axel;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("load_edge_list builds a symmetric deduplicated path graph") {
    const auto p = write_temp("edges_path.txt", "# a comment\n0 1\n1 2\n");
    const auto res = load_edge_list(p.string());
    CHECK(res.graph.n == 3);
    CHECK(res.graph.num_edges() == 2);
    const auto nb = res.graph.neighbors_of(1);
    REQUIRE(nb.size() == 2);
    CHECK(nb[0] == 0);
    CHECK(nb[1] == 2);
    CHECK_FALSE(res.remapped);
}

TEST_CASE("load_edge_list deduplicates reversed duplicates and drops self-loops") {
    const auto p = write_temp("edges_dup.txt", "0 1\n1 0\n1 1\n");
    const auto res = load_edge_list(p.string());
    CHECK(res.graph.n == 2);
    CHECK(res.graph.num_edges() == 1);
}

TEST_CASE("load_edge_list error paths") {
    const auto bad = write_temp("edges_bad.txt", "0 x\n");
    CHECK_THROWS_AS(load_edge_list(bad.string()), FormatError);
    const auto neg = write_temp("edges_neg.txt", "0 -2\n");
    CHECK_THROWS_AS(load_edge_list(neg.string()), FormatError);
    CHECK_THROWS_AS(load_edge_list("/nonexistent/file.txt"), FormatError);
}

TEST_CASE("load_edge_list remaps sparse ids and honors the n directive") {
    const auto p = write_temp("edges_sparse.txt", "10 20\n20 30\n");
    const auto res = load_edge_list(p.string());
    CHECK(res.graph.n == 3);
    CHECK(res.remapped);
    CHECK(res.original_ids[0] == 10);
    CHECK(res.original_ids[1] == 20);
    CHECK(res.original_ids[2] == 30);

    const auto q = write_temp("edges_header.txt", "# n=5\n0 1\n");
    const auto res2 = load_edge_list(q.string());
    CHECK(res2.graph.n == 5);
    CHECK(res2.graph.degree(4) == 0);
}

TEST_CASE("graph symmetry and no self-loop invariants") {
    Rng rng(5);
    std::vector<std::pair<int, int>> edges;
    const int n = 40;
    for (int e = 0; e < 200; ++e) edges.emplace_back(rng.below_int(n), rng.below_int(n));
    const Graph g = Graph::from_edges(n, edges);
    for (int v = 0; v < n; ++v) {
        for (int u : g.neighbors_of(v)) {
            CHECK(u != v);
            CHECK(g.has_edge(u, v));
        }
    }
    // arc_edge consistency: both directions share the edge id
    for (int e = 0; e < g.num_edges(); ++e) {
        auto [u, v] = g.edges[e];
        CHECK(u < v);
    }
}

TEST_CASE("features csv loads dense matrices with optional header") {
    const auto p = write_temp("feat.csv", "0,0\n0,0\n0,0\n");
    const Matrix m = load_features_csv(p.string());
    CHECK(m.rows == 3);
    CHECK(m.cols == 2);
    for (double v : m.data) CHECK(v == 0.0);

    const auto q = write_temp("feat_header.csv", "f0,f1\n1.5,2\n3,4\n");
    const Matrix m2 = load_features_csv(q.string());
    CHECK(m2.rows == 2);
    CHECK(m2.at(0, 0) == 1.5);

    const auto ragged = write_temp("feat_ragged.csv", "1,2\n3\n");
    CHECK_THROWS_AS(load_features_csv(ragged.string()), FormatError);
}

TEST_CASE("labels csv infers classes from typed header") {
    const auto p = write_temp("labels.csv", "label:int\n0\n6\n3\n2\n");
    const Labels l = load_labels_csv(p.string());
    CHECK(l.is_int);
    CHECK(l.num_classes == 7);
    CHECK(l.ints.size() == 4);

    const auto q = write_temp("labels_real.csv", "label:float\n0.25\n0.5\n");
    const Labels lr = load_labels_csv(q.string());
    CHECK_FALSE(lr.is_int);
    CHECK(lr.reals[0] == 0.25);
}

TEST_CASE("edge homophily on hand graphs") {
    const Graph tri = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(edge_homophily_ratio(tri, {4, 4, 4}) == 1.0);
    const Graph path = Graph::from_edges(2, {{0, 1}});
    CHECK(edge_homophily_ratio(path, {0, 1}) == 0.0);
    CHECK_THROWS_AS(edge_homophily_ratio(path, {0}), ContractError);
}

TEST_CASE("edge homophily invariant under label permutation") {
    SbmConfig cfg;
    cfg.n = 100;
    cfg.k_classes = 3;
    cfg.seed = 7;
    auto [g, data] = synth_sbm(cfg);
    const double h = edge_homophily_ratio(g, data.labels.ints);
    std::vector<int> permuted(data.labels.ints);
    for (int& c : permuted) c = (c + 1) % 3;
    CHECK(edge_homophily_ratio(g, permuted) == h);
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
}

TEST_CASE("sbm extremes: pure intra is homophilic, pure inter is heterophilic") {
    SbmConfig cfg;
    cfg.n = 60;
    cfg.k_classes = 2;
    cfg.p_intra = 0.2;
    cfg.p_inter = 0.0;
    cfg.seed = 3;
    auto [g1, d1] = synth_sbm(cfg);
    CHECK(edge_homophily_ratio(g1, d1.labels.ints) == 1.0);

    cfg.p_intra = 0.0;
    cfg.p_inter = 0.2;
    auto [g2, d2] = synth_sbm(cfg);
    CHECK(edge_homophily_ratio(g2, d2.labels.ints) == 0.0);

    cfg.p_intra = 1.5;
    CHECK_THROWS_AS(synth_sbm(cfg), ConfigError);
}

TEST_CASE("sbm empirical homophily tracks the closed-form expectation") {
    SbmConfig cfg;
    cfg.n = 400;
    cfg.k_classes = 2;
    cfg.p_intra = 0.05;
    cfg.p_inter = 0.005;
    const double expected = sbm_expected_homophily(cfg);
    double acc = 0.0;
    const int trials = 20;
    for (int s = 0; s < trials; ++s) {
        cfg.seed = 1000 + s;
        auto [g, data] = synth_sbm(cfg);
        acc += edge_homophily_ratio(g, data.labels.ints);
    }
    CHECK(std::abs(acc / trials - expected) < 0.05);
}

TEST_CASE("split_nodes ratios, rounding and determinism") {
    std::vector<int> ids10(10);
    for (int i = 0; i < 10; ++i) ids10[i] = i;
    const SplitMask m10 = split_nodes(ids10, 10, 0.6, 0.2, 0.2, 42);
    auto count = [](const std::vector<std::uint8_t>& v) {
        int c = 0;
        for (auto b : v) c += b;
        return c;
    };
    CHECK(count(m10.train) == 6);
    CHECK(count(m10.val) == 2);
    CHECK(count(m10.test) == 2);

    std::vector<int> ids5(5);
    for (int i = 0; i < 5; ++i) ids5[i] = i;
    const SplitMask m5 = split_nodes(ids5, 5, 0.6, 0.2, 0.2, 42);
    CHECK(count(m5.train) == 3);
    CHECK(count(m5.val) == 1);
    CHECK(count(m5.test) == 1);

    const SplitMask again = split_nodes(ids10, 10, 0.6, 0.2, 0.2, 42);
    CHECK(again.train == m10.train);
    CHECK(again.val == m10.val);
    CHECK(again.test == m10.test);

    // disjoint and covering
    for (int i = 0; i < 10; ++i)
        CHECK(m10.train[i] + m10.val[i] + m10.test[i] == 1);

    CHECK_THROWS_AS(split_nodes({}, 5, 0.6, 0.2, 0.2, 1), ContractError);
    CHECK_THROWS_AS(split_nodes(ids5, 5, 0.5, 0.2, 0.2, 1), ConfigError);
}
