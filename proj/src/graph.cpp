#include "axel/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace axel {

bool Graph::has_edge(int u, int v) const {
    auto nb = neighbors_of(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& raw) {
    Graph g;
    g.n = n;
    std::vector<std::pair<int, int>> uniq;
    uniq.reserve(raw.size());
    for (auto [u, v] : raw) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw FormatError("edge endpoint out of range");
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        uniq.emplace_back(u, v);
    }
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    g.edges = std::move(uniq);

    std::vector<int> deg(n, 0);
    for (auto [u, v] : g.edges) {
        ++deg[u];
        ++deg[v];
    }
    g.offsets.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) g.offsets[v + 1] = g.offsets[v] + deg[v];
    g.neighbors.resize(g.offsets[n]);
    g.arc_edge.resize(g.offsets[n]);
    std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
        auto [u, v] = g.edges[e];
        g.neighbors[cursor[u]] = v;
        g.arc_edge[cursor[u]++] = e;
        g.neighbors[cursor[v]] = u;
        g.arc_edge[cursor[v]++] = e;
    }
    // sorted-edge insertion yields sorted neighbor lists already; keep the
    // invariant explicit for safety
    for (int v = 0; v < n; ++v) {
        if (!std::is_sorted(g.neighbors.begin() + g.offsets[v],
                            g.neighbors.begin() + g.offsets[v + 1])) {
            std::vector<std::pair<int, int>> tmp;
            for (int a = g.offsets[v]; a < g.offsets[v + 1]; ++a)
                tmp.emplace_back(g.neighbors[a], g.arc_edge[a]);
            std::sort(tmp.begin(), tmp.end());
            for (int a = g.offsets[v]; a < g.offsets[v + 1]; ++a) {
                g.neighbors[a] = tmp[a - g.offsets[v]].first;
                g.arc_edge[a] = tmp[a - g.offsets[v]].second;
            }
        }
    }
    return g;
}

EdgeListResult load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open edge list: " + path);

    std::vector<std::pair<long long, long long>> raw;
    long long header_n = -1;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        if (line[first] == '#') {
            auto pos = line.find("n=");
            if (pos != std::string::npos) {
                std::istringstream hs(line.substr(pos + 2));
                long long k;
                if (hs >> k && k > 0) header_n = k;
            }
            continue;
        }
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v)) {
            throw FormatError("edge list line " + std::to_string(line_no) +
                              ": expected two integers");
        }
        std::string rest;
        if (ls >> rest && !rest.empty() && rest[0] != '#')
            throw FormatError("edge list line " + std::to_string(line_no) +
                              ": trailing tokens");
        if (u < 0 || v < 0)
            throw FormatError("edge list line " + std::to_string(line_no) +
                              ": negative id");
        raw.emplace_back(u, v);
    }

    std::vector<long long> ids;
    ids.reserve(raw.size() * 2);
    for (auto [u, v] : raw) {
        ids.push_back(u);
        ids.push_back(v);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    EdgeListResult res;
    const long long max_id = ids.empty() ? -1 : ids.back();
    const bool dense = static_cast<long long>(ids.size()) == max_id + 1;
    std::vector<std::pair<int, int>> dense_edges;
    dense_edges.reserve(raw.size());
    int n;
    if (dense) {
        n = static_cast<int>(max_id + 1);
        for (auto [u, v] : raw)
            dense_edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        res.remapped = false;
    } else {
        n = static_cast<int>(ids.size());
        std::map<long long, int> remap;
        for (int i = 0; i < n; ++i) remap[ids[i]] = i;
        for (auto [u, v] : raw) dense_edges.emplace_back(remap[u], remap[v]);
        res.remapped = true;
    }
    if (header_n > n) n = static_cast<int>(header_n);
    res.graph = Graph::from_edges(n, dense_edges);
    res.original_ids.resize(n);
    for (int i = 0; i < n; ++i)
        res.original_ids[i] = dense ? i : (i < static_cast<int>(ids.size()) ? ids[i] : i);
    return res;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

}  // namespace

Matrix load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open features csv: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    int cols = -1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        std::vector<double> row;
        row.reserve(fields.size());
        bool numeric = true;
        for (const auto& f : fields) {
            double v;
            if (!parse_double(f, v)) {
                numeric = false;
                break;
            }
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty() && cols == -1) continue;  // header line
            throw FormatError("features csv line " + std::to_string(line_no) +
                              ": non-numeric field");
        }
        if (cols == -1) cols = static_cast<int>(row.size());
        if (static_cast<int>(row.size()) != cols)
            throw FormatError("features csv line " + std::to_string(line_no) +
                              ": ragged row");
        rows.push_back(std::move(row));
    }
    Matrix m(static_cast<int>(rows.size()), cols < 0 ? 0 : cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
    return m;
}

Labels load_labels_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open labels csv: " + path);
    Labels out;
    bool type_pinned = false;
    std::vector<std::string> values;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 1)
            throw FormatError("labels csv line " + std::to_string(line_no) +
                              ": expected one column");
        double ignore;
        if (values.empty() && !parse_double(fields[0], ignore)) {
            // typed header: "label", "label:int" or "label:float"
            auto colon = fields[0].find(':');
            if (colon != std::string::npos) {
                const std::string ty = fields[0].substr(colon + 1);
                if (ty == "int") {
                    out.is_int = true;
                    type_pinned = true;
                } else if (ty == "float" || ty == "real") {
                    out.is_int = false;
                    type_pinned = true;
                } else {
                    throw FormatError("labels csv: unknown column type '" + ty + "'");
                }
            }
            continue;
        }
        values.push_back(fields[0]);
    }
    bool all_int = true;
    std::vector<double> reals;
    reals.reserve(values.size());
    for (const auto& s : values) {
        double v;
        if (!parse_double(s, v)) throw FormatError("labels csv: non-numeric value '" + s + "'");
        reals.push_back(v);
        if (v != std::floor(v)) all_int = false;
    }
    if (!type_pinned) out.is_int = all_int;
    if (out.is_int && !all_int) throw FormatError("labels csv: non-integer value under label:int");
    if (out.is_int) {
        out.ints.reserve(reals.size());
        int max_label = -1;
        for (double v : reals) {
            if (v < 0) throw FormatError("labels csv: negative class label");
            out.ints.push_back(static_cast<int>(v));
            max_label = std::max(max_label, out.ints.back());
        }
        out.num_classes = max_label + 1;
    } else {
        out.reals = std::move(reals);
    }
    return out;
}

double edge_homophily_ratio(const Graph& g, const std::vector<int>& labels) {
    if (static_cast<int>(labels.size()) != g.n)
        throw ContractError("edge_homophily_ratio: labels missing for some nodes");
    if (g.edges.empty()) throw ContractError("edge_homophily_ratio: graph has no edges");
    int same = 0;
    for (auto [u, v] : g.edges)
        if (labels[u] == labels[v]) ++same;
    return static_cast<double>(same) / static_cast<double>(g.edges.size());
}

std::pair<Graph, NodeData> synth_sbm(const SbmConfig& cfg) {
    if (cfg.p_intra < 0 || cfg.p_intra > 1 || cfg.p_inter < 0 || cfg.p_inter > 1)
        throw ConfigError("synth_sbm: probabilities must lie in [0,1]");
    if (cfg.n < cfg.k_classes) throw ConfigError("synth_sbm: n < k_classes");
    if (cfg.feature_dim < cfg.k_classes && cfg.feature_model == "gaussian")
        throw ConfigError("synth_sbm: feature_dim must be >= k_classes for gaussian features");

    Rng rng(cfg.seed);
    std::vector<int> cls(cfg.n);
    for (int i = 0; i < cfg.n; ++i) cls[i] = i % cfg.k_classes;

    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < cfg.n; ++u) {
        for (int v = u + 1; v < cfg.n; ++v) {
            const double p = cls[u] == cls[v] ? cfg.p_intra : cfg.p_inter;
            if (rng.uniform() < p) edges.emplace_back(u, v);
        }
    }
    Graph g = Graph::from_edges(cfg.n, edges);

    NodeData data;
    data.features = Matrix(cfg.n, cfg.feature_dim);
    const double mean_scale = cfg.delta / std::sqrt(2.0);  // pairwise mean distance = delta
    for (int i = 0; i < cfg.n; ++i) {
        for (int j = 0; j < cfg.feature_dim; ++j) {
            double mu = 0.0;
            if (cfg.feature_model == "gaussian" && j == cls[i]) mu = mean_scale;
            data.features.at(i, j) = mu + rng.normal();
        }
    }
    data.labels.is_int = true;
    data.labels.ints = std::move(cls);
    data.labels.num_classes = cfg.k_classes;
    return {std::move(g), std::move(data)};
}

double sbm_expected_homophily(const SbmConfig& cfg) {
    // class sizes under round-robin assignment
    std::vector<long long> sizes(cfg.k_classes, cfg.n / cfg.k_classes);
    for (int c = 0; c < cfg.n % cfg.k_classes; ++c) ++sizes[c];
    long long intra_pairs = 0, inter_pairs = 0;
    long long total = 1LL * cfg.n * (cfg.n - 1) / 2;
    for (long long s : sizes) intra_pairs += s * (s - 1) / 2;
    inter_pairs = total - intra_pairs;
    const double num = cfg.p_intra * static_cast<double>(intra_pairs);
    const double den = num + cfg.p_inter * static_cast<double>(inter_pairs);
    return den > 0 ? num / den : 0.0;
}

SplitMask split_nodes(const std::vector<int>& labeled_ids, int n, double r_train,
                      double r_val, double r_test, std::uint64_t seed) {
    if (labeled_ids.empty()) throw ContractError("split_nodes: empty label set");
    if (std::abs(r_train + r_val + r_test - 1.0) > 1e-9)
        throw ConfigError("split_nodes: ratios must sum to 1");

    std::vector<int> perm(labeled_ids);
    Rng rng(seed);
    for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below_int(i + 1)]);

    const int m = static_cast<int>(perm.size());
    const int n_val = static_cast<int>(std::floor(r_val * m));
    const int n_test = static_cast<int>(std::floor(r_test * m));
    const int n_train = m - n_val - n_test;

    SplitMask mask;
    mask.seed = seed;
    mask.train.assign(n, 0);
    mask.val.assign(n, 0);
    mask.test.assign(n, 0);
    for (int i = 0; i < m; ++i) {
        if (i < n_train)
            mask.train[perm[i]] = 1;
        else if (i < n_train + n_val)
            mask.val[perm[i]] = 1;
        else
            mask.test[perm[i]] = 1;
    }
    return mask;
}

void row_normalize(Matrix& features) {
    for (int i = 0; i < features.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < features.cols; ++j) s += std::abs(features.at(i, j));
        if (s > 0)
            for (int j = 0; j < features.cols; ++j) features.at(i, j) /= s;
    }
}

}  // namespace axel
