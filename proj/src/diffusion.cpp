#include "axel/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "axel/kernels.hpp"

namespace axel::diffusion {

LtWeights LtWeights::degree_normalized(const Graph& g) {
    LtWeights w;
    w.in_weight.resize(g.num_arcs());
    for (int v = 0; v < g.n; ++v) {
        const int deg = g.degree(v);
        for (int a = g.offsets[v]; a < g.offsets[v + 1]; ++a)
            w.in_weight[a] = 1.0 / deg;
    }
    return w;
}

namespace {

int arc_index(const Graph& g, int from, int to) {
    // position of `from` in `to`'s sorted neighbor list
    const auto nb = g.neighbors_of(to);
    const auto it = std::lower_bound(nb.begin(), nb.end(), from);
    if (it == nb.end() || *it != from) throw ContractError("LtWeights: no such edge");
    return g.offsets[to] + static_cast<int>(it - nb.begin());
}

}  // namespace

double LtWeights::get(const Graph& g, int from, int to) const {
    return in_weight[arc_index(g, from, to)];
}

void LtWeights::set(const Graph& g, int from, int to, double w) {
    in_weight[arc_index(g, from, to)] = w;
}

void LtWeights::validate(const Graph& g) const {
    if (static_cast<int>(in_weight.size()) != g.num_arcs())
        throw ConfigError("LtWeights: arc count mismatch");
    for (int v = 0; v < g.n; ++v) {
        double s = 0.0;
        for (int a = g.offsets[v]; a < g.offsets[v + 1]; ++a) {
            if (in_weight[a] < 0) throw ConfigError("LtWeights: negative weight");
            s += in_weight[a];
        }
        if (s > 1.0 + 1e-9)
            throw ConfigError("LtWeights: in-weights of node " + std::to_string(v) +
                              " sum to " + std::to_string(s) + " > 1");
    }
}

std::vector<int> sample_seeds(const Graph& g, double fraction, std::uint64_t seed) {
    if (fraction <= 0 || fraction > 1) throw ConfigError("sample_seeds: fraction in (0,1]");
    const int k = std::max(1, static_cast<int>(std::llround(fraction * g.n)));
    std::vector<int> ids(g.n);
    for (int i = 0; i < g.n; ++i) ids[i] = i;
    Rng rng(seed);
    for (int i = g.n - 1; i > 0; --i) std::swap(ids[i], ids[rng.below_int(i + 1)]);
    ids.resize(std::min(k, g.n));
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::uint8_t> lt_run(const Graph& g, const std::vector<int>& seeds,
                                 const std::vector<double>& thresholds,
                                 const LtWeights& weights) {
    if (static_cast<int>(thresholds.size()) != g.n)
        throw ContractError("lt_run: thresholds size mismatch");
    weights.validate(g);

    std::vector<std::uint8_t> active(g.n, 0);
    std::vector<double> influence(g.n, 0.0);
    std::queue<int> frontier;
    for (int s : seeds) {
        if (!active[s]) {
            active[s] = 1;
            frontier.push(s);
        }
    }
    while (!frontier.empty()) {
        const int u = frontier.front();
        frontier.pop();
        for (int a = g.offsets[u]; a < g.offsets[u + 1]; ++a) {
            const int v = g.neighbors[a];
            if (active[v]) continue;
            influence[v] += weights.get(g, u, v);
            if (influence[v] >= thresholds[v]) {
                active[v] = 1;
                frontier.push(v);
            }
        }
    }
    return active;
}

namespace {

DiffusionResult finish_counts(const std::vector<long long>& counts,
                              const std::vector<int>& seeds, int R) {
    DiffusionResult res;
    res.num_simulations = R;
    res.seeds_used = seeds;
    res.probs.resize(counts.size());
    res.stderrs.resize(counts.size());
    for (std::size_t v = 0; v < counts.size(); ++v) {
        const double p = static_cast<double>(counts[v]) / R;
        res.probs[v] = p;
        res.stderrs[v] = std::sqrt(p * (1.0 - p) / R);
    }
    return res;
}

}  // namespace

DiffusionResult lt_estimate(const Graph& g, const std::vector<int>& seeds,
                            const LtWeights& weights, const DiffusionConfig& cfg) {
    if (cfg.num_simulations < 1) throw ConfigError("lt_estimate: num_simulations >= 1");
    weights.validate(g);
    const int R = cfg.num_simulations;
    std::vector<long long> counts(g.n, 0);

    // integer counts merge associatively, so the result is independent of the
    // thread schedule; each run's RNG stream depends only on (seed, run)
#pragma omp parallel if (kernels::parallel_enabled())
    {
        std::vector<long long> local(g.n, 0);
        std::vector<double> thresholds(g.n);
#pragma omp for schedule(static)
        for (int r = 0; r < R; ++r) {
            Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(r)));
            for (int v = 0; v < g.n; ++v) thresholds[v] = rng.uniform();
            const auto active = lt_run(g, seeds, thresholds, weights);
            for (int v = 0; v < g.n; ++v) local[v] += active[v];
        }
#pragma omp critical
        for (int v = 0; v < g.n; ++v) counts[v] += local[v];
    }
    return finish_counts(counts, seeds, R);
}

namespace {

// Memoized backward-walk probability over simple paths through non-seed nodes.
struct LiveEdgeOracle {
    const Graph& g;
    const LtWeights& w;
    std::vector<int> free_index;     // node -> index among non-seed nodes, -1 for seeds
    std::vector<double> memo;
    std::vector<std::uint8_t> have;
    int m;

    LiveEdgeOracle(const Graph& g_, const LtWeights& w_, const std::vector<int>& free_ids)
        : g(g_), w(w_), free_index(g_.n, -1), m(static_cast<int>(free_ids.size())) {
        for (int i = 0; i < m; ++i) free_index[free_ids[i]] = i;
        memo.assign(static_cast<std::size_t>(m) << m, 0.0);
        have.assign(memo.size(), 0);
    }

    double reach(int v, std::uint32_t visited) {
        const std::size_t key = (static_cast<std::size_t>(visited) * m) + free_index[v];
        if (have[key]) return memo[key];
        double p = 0.0;
        for (int a = g.offsets[v]; a < g.offsets[v + 1]; ++a) {
            const int u = g.neighbors[a];
            const double wu = w.in_weight[a];
            if (wu == 0.0) continue;
            const int fu = free_index[u];
            if (fu < 0) {
                p += wu;  // direct pick of a seed
            } else if (!(visited >> fu & 1u)) {
                p += wu * reach(u, visited | (1u << fu));
            }
            // picking an already-visited node closes a cycle: never reaches a seed
        }
        have[key] = 1;
        memo[key] = p;
        return p;
    }
};

}  // namespace

std::vector<double> exact_lt_oracle(const Graph& g, const std::vector<int>& seeds,
                                    const LtWeights& weights, int max_free) {
    weights.validate(g);
    std::vector<std::uint8_t> is_seed(g.n, 0);
    for (int s : seeds) is_seed[s] = 1;
    std::vector<int> free_ids;
    for (int v = 0; v < g.n; ++v)
        if (!is_seed[v]) free_ids.push_back(v);
    if (static_cast<int>(free_ids.size()) > max_free)
        throw ContractError("exact_lt_oracle: refusing, " +
                            std::to_string(free_ids.size()) + " non-seed nodes > " +
                            std::to_string(max_free));

    LiveEdgeOracle oracle(g, weights, free_ids);
    std::vector<double> probs(g.n, 1.0);
    for (int v : free_ids)
        probs[v] = oracle.reach(v, 1u << oracle.free_index[v]);
    return probs;
}

DiffusionResult sis_estimate(const Graph& g, const std::vector<int>& seeds,
                             const DiffusionConfig& cfg) {
    const auto& sp = cfg.sis;
    if (sp.horizon < 1) throw ConfigError("sis_estimate: horizon >= 1");
    if (sp.beta_inf < 0 || sp.beta_inf > 1 || sp.gamma < 0 || sp.gamma > 1)
        throw ConfigError("sis_estimate: rates must lie in [0,1]");
    if (cfg.num_simulations < 1) throw ConfigError("sis_estimate: num_simulations >= 1");

    const int R = cfg.num_simulations;
    std::vector<long long> counts(g.n, 0);

#pragma omp parallel if (kernels::parallel_enabled())
    {
        std::vector<long long> local(g.n, 0);
        std::vector<std::uint8_t> infected(g.n), next(g.n);
#pragma omp for schedule(static)
        for (int r = 0; r < R; ++r) {
            Rng rng(Rng::derive(cfg.seed ^ 0x515eULL, static_cast<std::uint64_t>(r)));
            std::fill(infected.begin(), infected.end(), 0);
            for (int s : seeds) infected[s] = 1;
            for (int step = 0; step < sp.horizon; ++step) {
                std::copy(infected.begin(), infected.end(), next.begin());
                // transmissions from nodes infected at step start
                for (int u = 0; u < g.n; ++u) {
                    if (!infected[u]) continue;
                    for (int a = g.offsets[u]; a < g.offsets[u + 1]; ++a) {
                        const int v = g.neighbors[a];
                        if (infected[v]) continue;
                        if (rng.uniform() < sp.beta_inf) next[v] = 1;
                    }
                }
                // recoveries; newly infected nodes are exempt this step
                for (int u = 0; u < g.n; ++u) {
                    if (!infected[u]) continue;
                    if (rng.uniform() < sp.gamma) next[u] = 0;
                }
                std::swap(infected, next);
            }
            for (int v = 0; v < g.n; ++v) local[v] += infected[v];
        }
#pragma omp critical
        for (int v = 0; v < g.n; ++v) counts[v] += local[v];
    }
    return finish_counts(counts, seeds, R);
}

}  // namespace axel::diffusion
