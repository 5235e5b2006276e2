#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "axel/common.hpp"
#include "axel/rng.hpp"

namespace axel::axelrod {

enum class Neighborhood { von_neumann, moore };

struct GridConfig {
    int L = 10;       // grid side
    int f = 5;        // traits per agent
    int q = 15;       // values per trait
    bool periodic = false;
    Neighborhood neighborhood = Neighborhood::von_neumann;
};

struct StepOutcome {
    bool interacted = false;
    std::optional<int> copied_dim;
    int active = -1;
    int passive = -1;
};

struct RunResult {
    long long steps_taken = 0;
    bool reached = false;
};

struct Checkpoint {
    long long step;
    double mean_similarity;
    int region_count;
    bool equilibrium;
};

// Discrete cultural dissemination on an L x L grid. Traits start uniform
// random in {0..q-1}. One step: pick a random agent and a random neighbor,
// interact with probability equal to their trait overlap, and on interaction
// copy one uniformly chosen differing trait.
class CultureGrid {
public:
    CultureGrid(const GridConfig& cfg, std::uint64_t seed);

    const GridConfig& config() const { return cfg_; }
    int agents() const { return cfg_.L * cfg_.L; }
    int trait(int agent, int k) const { return traits_[static_cast<std::size_t>(agent) * cfg_.f + k]; }
    void set_trait(int agent, int k, int value);

    const std::vector<int>& neighbors(int agent) const { return adj_[agent]; }

    // fraction of matching traits, in {0, 1/f, ..., 1}
    double similarity(int i, int j) const;

    StepOutcome step();
    StepOutcome step_pair(int active, int passive);

    // true iff every adjacent pair has similarity exactly 0 or 1
    bool is_equilibrium() const;

    // check_interval <= 0 selects the default 10 * L^2
    RunResult run_to_equilibrium(long long max_steps, long long check_interval = 0,
                                 const std::function<void(const Checkpoint&)>& observer = nullptr);

    // connected components under "adjacent AND culturally identical"
    int count_regions() const;

    double mean_neighbor_similarity() const;

    std::vector<int> snapshot() const { return traits_; }

private:
    GridConfig cfg_;
    std::vector<int> traits_;
    std::vector<std::vector<int>> adj_;
    Rng rng_;

    int match_count(int i, int j) const;
};

}  // namespace axel::axelrod
