#include "svnet/community.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "svnet/common.hpp"

namespace svn {
namespace {

inline double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

constexpr double kImprovementEps = 1e-12;

// Working graph at one aggregation level. Units are original nodes at the
// leaf level and modules above it; flows are normalized visit rates.
struct UnitGraph {
    std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;
    std::vector<double> flow;       // visit-rate mass per unit
    std::vector<double> exit_flow;  // boundary flow per unit

    std::size_t size() const { return adj.size(); }
};

UnitGraph leaf_graph(const ValidatedNetwork& n) {
    UnitGraph g;
    g.adj.resize(n.nodes.size());
    g.flow.assign(n.nodes.size(), 0.0);
    double total_weight = 0.0;
    for (const auto& e : n.edges) total_weight += e.weight;
    const double norm = 2.0 * total_weight;
    for (const auto& e : n.edges) {
        const double f = e.weight / norm;
        g.adj[e.a].emplace_back(e.b, f);
        g.adj[e.b].emplace_back(e.a, f);
        g.flow[e.a] += f;
        g.flow[e.b] += f;
    }
    g.exit_flow = g.flow;  // no self-loops at the leaf level
    return g;
}

// Greedy single-unit moves minimizing the map equation, evaluated through
// O(1) updates of the expanded codelength terms.
class Optimizer {
public:
    Optimizer(const UnitGraph& g, std::vector<std::uint32_t> init) : g_(g), module_of_(std::move(init)) {
        const std::size_t n = g_.size();
        mod_flow_.assign(n, 0.0);
        mod_exit_.assign(n, 0.0);
        mod_size_.assign(n, 0);
        for (std::uint32_t u = 0; u < n; ++u) {
            mod_flow_[module_of_[u]] += g_.flow[u];
            mod_size_[module_of_[u]]++;
        }
        q_total_ = 0.0;
        for (std::uint32_t u = 0; u < n; ++u) {
            for (const auto& [v, f] : g_.adj[u])
                if (module_of_[u] != module_of_[v]) mod_exit_[module_of_[u]] += f;
        }
        for (std::uint32_t m = 0; m < n; ++m) {
            q_total_ += mod_exit_[m];
            if (mod_size_[m] == 0) empty_.push_back(m);
        }
        flow_to_.assign(n, 0.0);
    }

    // Sweeps until a full pass makes no move; returns total moves applied.
    std::size_t local_moving(Rng& rng) {
        std::vector<std::uint32_t> order(g_.size());
        std::iota(order.begin(), order.end(), 0);
        std::size_t total_moves = 0;
        for (int sweep = 0; sweep < 200; ++sweep) {
            rng.shuffle(order);
            std::size_t moves = 0;
            for (std::uint32_t u : order)
                if (try_move(u)) ++moves;
            total_moves += moves;
            if (moves == 0) break;
        }
        return total_moves;
    }

    // Module labels relabelled densely in order of first appearance.
    std::vector<std::uint32_t> dense_assignment(std::uint32_t& module_count) const {
        std::vector<std::uint32_t> relabel(g_.size(), UINT32_MAX);
        std::vector<std::uint32_t> out(g_.size());
        std::uint32_t next = 0;
        for (std::uint32_t u = 0; u < g_.size(); ++u) {
            std::uint32_t m = module_of_[u];
            if (relabel[m] == UINT32_MAX) relabel[m] = next++;
            out[u] = relabel[m];
        }
        module_count = next;
        return out;
    }

private:
    bool try_move(std::uint32_t u) {
        const std::uint32_t a = module_of_[u];
        touched_.clear();
        for (const auto& [v, f] : g_.adj[u]) {
            const std::uint32_t m = module_of_[v];
            if (flow_to_[m] == 0.0) touched_.push_back(m);
            flow_to_[m] += f;
        }

        const double exit_u = g_.exit_flow[u];
        const double flow_u = g_.flow[u];
        const double f_ua = flow_to_[a];
        const double qa = mod_exit_[a];
        const double pa = mod_flow_[a];
        const double qa_new = qa - exit_u + 2.0 * f_ua;
        const double pa_new = pa - flow_u;
        const double base_a = -2.0 * plogp(qa) + plogp(qa + pa);
        const double new_a = -2.0 * plogp(qa_new) + plogp(qa_new + pa_new);

        double best_delta = 0.0;
        std::uint32_t best_module = a;

        auto consider = [&](std::uint32_t b, double f_ub) {
            if (b == a) return;
            const double qb = mod_exit_[b];
            const double pb = mod_flow_[b];
            const double qb_new = qb + exit_u - 2.0 * f_ub;
            const double pb_new = pb + flow_u;
            const double q_tot_new = q_total_ + (qa_new - qa) + (qb_new - qb);
            const double delta = plogp(q_tot_new) - plogp(q_total_) + (new_a - base_a) -
                                 2.0 * (plogp(qb_new) - plogp(qb)) +
                                 plogp(qb_new + pb_new) - plogp(qb + pb);
            if (delta < best_delta - kImprovementEps ||
                (delta < best_delta + kImprovementEps && best_module != a && b < best_module)) {
                best_delta = delta;
                best_module = b;
            }
        };

        for (std::uint32_t m : touched_) consider(m, flow_to_[m]);
        // splitting move: retreat into an empty module
        if (mod_size_[a] > 1 && !empty_.empty()) consider(empty_.back(), 0.0);

        bool moved = false;
        if (best_module != a && best_delta < -kImprovementEps) {
            const std::uint32_t b = best_module;
            const double f_ub = flow_to_[b];
            const double qb = mod_exit_[b];
            mod_exit_[a] = qa_new;
            mod_flow_[a] = pa_new;
            mod_exit_[b] = qb + exit_u - 2.0 * f_ub;
            mod_flow_[b] += flow_u;
            q_total_ += (qa_new - qa) + (mod_exit_[b] - qb);
            mod_size_[a]--;
            mod_size_[b]++;
            module_of_[u] = b;
            if (!empty_.empty() && b == empty_.back()) empty_.pop_back();
            if (mod_size_[a] == 0) empty_.push_back(a);
            moved = true;
        }

        for (std::uint32_t m : touched_) flow_to_[m] = 0.0;
        return moved;
    }

    const UnitGraph& g_;
    std::vector<std::uint32_t> module_of_;
    std::vector<double> mod_flow_;
    std::vector<double> mod_exit_;
    std::vector<std::uint32_t> mod_size_;
    std::vector<std::uint32_t> empty_;
    std::vector<double> flow_to_;
    std::vector<std::uint32_t> touched_;
    double q_total_ = 0.0;
};

UnitGraph aggregate(const UnitGraph& g, const std::vector<std::uint32_t>& assign,
                    std::uint32_t module_count) {
    UnitGraph out;
    out.adj.resize(module_count);
    out.flow.assign(module_count, 0.0);
    out.exit_flow.assign(module_count, 0.0);
    for (std::uint32_t u = 0; u < g.size(); ++u) out.flow[assign[u]] += g.flow[u];

    std::map<std::pair<std::uint32_t, std::uint32_t>, double> between;
    for (std::uint32_t u = 0; u < g.size(); ++u) {
        for (const auto& [v, f] : g.adj[u]) {
            if (u >= v) continue;  // each undirected edge once
            const std::uint32_t ma = assign[u], mb = assign[v];
            if (ma == mb) continue;
            between[{std::min(ma, mb), std::max(ma, mb)}] += f;
        }
    }
    for (const auto& [key, f] : between) {
        out.adj[key.first].emplace_back(key.second, f);
        out.adj[key.second].emplace_back(key.first, f);
        out.exit_flow[key.first] += f;
        out.exit_flow[key.second] += f;
    }
    return out;
}

// One multilevel pass: local moving at the leaf level seeded with `init`,
// then repeated aggregation + moving. Returns the leaf assignment and
// whether any move was applied.
std::pair<std::vector<std::uint32_t>, bool> run_multilevel(
    const UnitGraph& leaf, std::vector<std::uint32_t> init, Rng& rng) {
    bool moved_any = false;

    Optimizer opt(leaf, std::move(init));
    moved_any |= opt.local_moving(rng) > 0;
    std::uint32_t module_count = 0;
    std::vector<std::uint32_t> total = opt.dense_assignment(module_count);

    UnitGraph g = leaf;
    std::vector<std::uint32_t> level_assign = total;
    while (module_count < g.size()) {
        g = aggregate(g, level_assign, module_count);
        std::vector<std::uint32_t> singletons(g.size());
        std::iota(singletons.begin(), singletons.end(), 0);
        Optimizer level_opt(g, std::move(singletons));
        const std::size_t moves = level_opt.local_moving(rng);
        level_assign = level_opt.dense_assignment(module_count);
        for (auto& m : total) m = level_assign[m];
        if (moves == 0) break;
        moved_any = true;
    }
    return {total, moved_any};
}

bool canonical_less(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void DetectorConfig::validate() const {
    if (trials < 1) throw ConfigError("trials must be >= 1, got " + std::to_string(trials));
    if (refine_rounds < 0) throw ConfigError("refine_rounds must be >= 0");
}

Partition detect(const ValidatedNetwork& n, const DetectorConfig& cfg) {
    cfg.validate();
    if (n.empty()) throw DataError("detect: empty network");

    const UnitGraph leaf = leaf_graph(n);
    const Rng root(cfg.seed);

    Partition best;
    bool have_best = false;

    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng = root.fork(static_cast<std::uint64_t>(trial));

        std::vector<std::uint32_t> assign(leaf.size());
        std::iota(assign.begin(), assign.end(), 0);
        auto [total, moved] = run_multilevel(leaf, std::move(assign), rng);
        for (int round = 0; round < cfg.refine_rounds && moved; ++round) {
            std::tie(total, moved) = run_multilevel(leaf, std::move(total), rng);
        }

        Partition candidate;
        candidate.module_of = std::move(total);
        candidate.module_count = 0;
        for (std::uint32_t m : candidate.module_of)
            candidate.module_count = std::max<std::size_t>(candidate.module_count, m + 1);
        candidate.codelength = map_equation(n, candidate.module_of);
        candidate.canonicalize();

        if (!have_best || candidate.codelength < best.codelength - kImprovementEps ||
            (candidate.codelength < best.codelength + kImprovementEps &&
             canonical_less(candidate.module_of, best.module_of))) {
            best = std::move(candidate);
            have_best = true;
        }
    }

    // never worse than the trivial single-module map
    const double baseline = one_module_codelength(n);
    if (baseline < best.codelength - kImprovementEps) {
        best.module_of.assign(n.nodes.size(), 0);
        best.module_count = 1;
        best.codelength = baseline;
    }
    return best;
}

}  // namespace svn
