#include "axel/axelrod.hpp"

#include <algorithm>

namespace axel::axelrod {

CultureGrid::CultureGrid(const GridConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed) {
    if (cfg.L < 1 || cfg.f < 1 || cfg.q < 1)
        throw ConfigError("CultureGrid: L, f, q must be positive");
    const int n = agents();
    traits_.resize(static_cast<std::size_t>(n) * cfg_.f);
    for (auto& v : traits_) v = rng_.below_int(cfg_.q);

    adj_.resize(n);
    const int L = cfg_.L;
    auto wrap = [L](int x) { return (x + L) % L; };
    for (int r = 0; r < L; ++r) {
        for (int c = 0; c < L; ++c) {
            const int id = r * L + c;
            auto add = [&](int rr, int cc) {
                if (cfg_.periodic) {
                    rr = wrap(rr);
                    cc = wrap(cc);
                } else if (rr < 0 || rr >= L || cc < 0 || cc >= L) {
                    return;
                }
                adj_[id].push_back(rr * L + cc);
            };
            add(r - 1, c);
            add(r + 1, c);
            add(r, c - 1);
            add(r, c + 1);
            if (cfg_.neighborhood == Neighborhood::moore) {
                add(r - 1, c - 1);
                add(r - 1, c + 1);
                add(r + 1, c - 1);
                add(r + 1, c + 1);
            }
            std::sort(adj_[id].begin(), adj_[id].end());
            adj_[id].erase(std::unique(adj_[id].begin(), adj_[id].end()), adj_[id].end());
        }
    }
}

void CultureGrid::set_trait(int agent, int k, int value) {
    if (value < 0 || value >= cfg_.q) throw ContractError("set_trait: value out of {0..q-1}");
    traits_[static_cast<std::size_t>(agent) * cfg_.f + k] = value;
}

int CultureGrid::match_count(int i, int j) const {
    const int* ti = traits_.data() + static_cast<std::size_t>(i) * cfg_.f;
    const int* tj = traits_.data() + static_cast<std::size_t>(j) * cfg_.f;
    int m = 0;
    for (int k = 0; k < cfg_.f; ++k) m += ti[k] == tj[k];
    return m;
}

double CultureGrid::similarity(int i, int j) const {
    return static_cast<double>(match_count(i, j)) / cfg_.f;
}

StepOutcome CultureGrid::step() {
    const int k = rng_.below_int(agents());
    const auto& nb = adj_[k];
    const int r = nb[rng_.below_int(static_cast<int>(nb.size()))];
    return step_pair(k, r);
}

StepOutcome CultureGrid::step_pair(int active, int passive) {
    StepOutcome out;
    out.active = active;
    out.passive = passive;
    const double s = similarity(active, passive);
    const double u = rng_.uniform();
    if (!(u < s)) return out;  // strict inequality: s=0 never interacts
    out.interacted = true;

    int differing[64];
    std::vector<int> differing_big;
    int ndiff = 0;
    const bool small = cfg_.f <= 64;
    const int* ta = traits_.data() + static_cast<std::size_t>(active) * cfg_.f;
    const int* tp = traits_.data() + static_cast<std::size_t>(passive) * cfg_.f;
    for (int k = 0; k < cfg_.f; ++k) {
        if (ta[k] != tp[k]) {
            if (small)
                differing[ndiff] = k;
            else
                differing_big.push_back(k);
            ++ndiff;
        }
    }
    if (ndiff == 0) return out;  // identical agents: interaction copies nothing
    const int pick = rng_.below_int(ndiff);
    const int dim = small ? differing[pick] : differing_big[pick];
    traits_[static_cast<std::size_t>(active) * cfg_.f + dim] = tp[dim];
    out.copied_dim = dim;
    return out;
}

bool CultureGrid::is_equilibrium() const {
    const int n = agents();
    for (int i = 0; i < n; ++i) {
        for (int j : adj_[i]) {
            if (j < i) continue;
            const int m = match_count(i, j);
            if (m != 0 && m != cfg_.f) return false;
        }
    }
    return true;
}

RunResult CultureGrid::run_to_equilibrium(long long max_steps, long long check_interval,
                                          const std::function<void(const Checkpoint&)>& observer) {
    if (max_steps <= 0) throw ContractError("run_to_equilibrium: max_steps must be positive");
    if (check_interval <= 0) check_interval = 10LL * agents();

    RunResult res;
    while (res.steps_taken < max_steps) {
        const long long batch = std::min(check_interval, max_steps - res.steps_taken);
        for (long long s = 0; s < batch; ++s) step();
        res.steps_taken += batch;
        const bool eq = is_equilibrium();
        if (observer) {
            observer(Checkpoint{res.steps_taken, mean_neighbor_similarity(),
                                count_regions(), eq});
        }
        if (eq) {
            res.reached = true;
            return res;
        }
    }
    res.reached = is_equilibrium();
    return res;
}

int CultureGrid::count_regions() const {
    const int n = agents();
    std::vector<int> comp(n, -1);
    std::vector<int> stack;
    int regions = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] != -1) continue;
        comp[s] = regions;
        stack.push_back(s);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int u : adj_[v]) {
                if (comp[u] == -1 && match_count(v, u) == cfg_.f) {
                    comp[u] = regions;
                    stack.push_back(u);
                }
            }
        }
        ++regions;
    }
    return regions;
}

double CultureGrid::mean_neighbor_similarity() const {
    const int n = agents();
    double acc = 0.0;
    long long pairs = 0;
    for (int i = 0; i < n; ++i) {
        for (int j : adj_[i]) {
            if (j < i) continue;
            acc += similarity(i, j);
            ++pairs;
        }
    }
    return pairs > 0 ? acc / pairs : 1.0;
}

}  // namespace axel::axelrod
