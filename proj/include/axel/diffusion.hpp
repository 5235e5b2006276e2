#pragma once

#include <cstdint>
#include <vector>

#include "axel/graph.hpp"
#include "axel/rng.hpp"

namespace axel::diffusion {

enum class DiffusionModel { lt, sis };

struct SisParams {
    double beta_inf = 0.3;  // infection probability per infected neighbor per step
    double gamma = 0.2;     // recovery probability per step
    int horizon = 10;       // T
};

struct DiffusionConfig {
    DiffusionModel model = DiffusionModel::lt;
    int num_simulations = 2000;
    std::uint64_t seed = 0;
    SisParams sis;
};

// Per-arc LT influence weights: in_weight[a] for CSR arc a in v's list is the
// weight of neighbors[a] -> v. In-weights into any node must sum to <= 1.
struct LtWeights {
    std::vector<double> in_weight;

    static LtWeights degree_normalized(const Graph& g);
    double get(const Graph& g, int from, int to) const;
    void set(const Graph& g, int from, int to, double w);
    void validate(const Graph& g) const;
};

struct DiffusionResult {
    std::vector<double> probs;    // per-node activation probability estimate
    std::vector<double> stderrs;  // sqrt(p(1-p)/R)
    std::vector<int> seeds_used;
    int num_simulations = 0;
};

// Uniform sample without replacement of round(fraction*n) nodes, at least 1.
std::vector<int> sample_seeds(const Graph& g, double fraction, std::uint64_t seed);

// Progressive cascade at fixed thresholds: inactive v activates when the
// total in-weight from active neighbors reaches theta_v. Deterministic.
std::vector<std::uint8_t> lt_run(const Graph& g, const std::vector<int>& seeds,
                                 const std::vector<double>& thresholds,
                                 const LtWeights& weights);

// Monte-Carlo LT with thresholds resampled i.i.d. U[0,1) per run.
DiffusionResult lt_estimate(const Graph& g, const std::vector<int>& seeds,
                            const LtWeights& weights, const DiffusionConfig& cfg);

// Exact LT activation probabilities via the live-edge equivalence: each node
// independently keeps one in-arc (from u with probability w_uv, none with the
// remainder); P(v active) sums over simple backward paths to a seed.
// Refuses graphs with more than max_free non-seed nodes.
std::vector<double> exact_lt_oracle(const Graph& g, const std::vector<int>& seeds,
                                    const LtWeights& weights, int max_free = 12);

// Discrete-time SIS, synchronous infect-then-recover. Nodes infected during a
// step do not face recovery that same step. probs = infected at step T.
DiffusionResult sis_estimate(const Graph& g, const std::vector<int>& seeds,
                             const DiffusionConfig& cfg);

}  // namespace axel::diffusion
