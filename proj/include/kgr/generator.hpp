// SPDX-License-Identifier: Apache-2.0
//
// Graph sampler targeting exact (depth, complexity) cells. The target chain
// is built with exactly D operation events (exchanges touching the target
// count), distractor chains carry comparable depths, and the whole graph is
// rejected and resampled on any constraint failure.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgr/core.hpp"
#include "kgr/kinship.hpp"
#include "kgr/names.hpp"
#include "kgr/rng.hpp"

namespace kgr {

struct ComplexityPreset {
    int level{};
    std::vector<std::pair<int, double>> chain_distribution;  // chain count -> probability
    int person_lo{};
    int person_hi{};
    double crossover_rate{};
    double exchange_rate{};
};

inline const std::vector<ComplexityPreset>& complexity_presets() {
    static const std::vector<ComplexityPreset> presets = {
        {1, {{1, 1.0}}, 5, 8, 0.0, 0.0},
        {2, {{1, 0.5}, {2, 0.5}}, 8, 12, 0.2, 0.0},
        {3, {{2, 1.0}}, 10, 15, 0.3, 0.2},
        {4, {{3, 1.0}}, 12, 18, 0.5, 0.5},
        {5, {{4, 1.0}}, 15, 22, 0.8, 0.8},
        {6, {{5, 1.0}}, 18, 25, 1.0, 1.0},
    };
    return presets;
}

inline constexpr int kMinDepth = 1, kMaxDepth = 10;
inline constexpr int kMinComplexity = 1, kMaxComplexity = 6;

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenOptions {
    int name_pool = 1;  // rl
    RuleDistribution rule_distribution = RuleDistribution::Rl;
};

namespace gen_detail {

struct RetryGraph {};  // internal: abandon this attempt, resample

struct ChainSlot {
    bool exchange{false};
    int partner{-1};     // partner chain index for exchange slots
    int exchange_id{-1};
};

struct ChainPlan {
    ObjectId object{};
    int depth{};
    std::vector<PersonId> pool;
    std::vector<ChainSlot> slots;
    std::size_t next{0};     // next slot to emit; init not included
    bool init_done{false};
};

inline int sample_chain_count(const ComplexityPreset& p, Rng& rng) {
    double x = rng.unit();
    for (const auto& [k, prob] : p.chain_distribution) {
        x -= prob;
        if (x < 0) return k;
    }
    return p.chain_distribution.back().first;
}

// Candidate kinds applicable at `st` for a chain whose working circle is
// `circle`. When the next slot is an exchange the state must end clean
// (owner == possessor), which forbids loan and forces return while on loan.
inline std::vector<EventKind> applicable_kinds(const ObjectState& st,
                                               const std::vector<PersonId>& circle,
                                               bool next_is_exchange) {
    std::vector<EventKind> kinds;
    const bool clean = st.owner == st.possessor;
    if (clean) {
        if (circle.size() >= 2) {
            kinds.push_back(EventKind::Gift);
            kinds.push_back(EventKind::Sale);
            if (!next_is_exchange) kinds.push_back(EventKind::Loan);
        }
        if (st.integrity == Integrity::Intact) kinds.push_back(EventKind::Break);
        else kinds.push_back(EventKind::Repair);
    } else {
        kinds.push_back(EventKind::Return);
        if (!next_is_exchange) {
            if (st.integrity == Integrity::Intact) kinds.push_back(EventKind::Break);
            else kinds.push_back(EventKind::Repair);
            bool has_third = false;
            for (PersonId p : circle)
                if (p != st.owner && p != st.possessor) { has_third = true; break; }
            if (has_third) kinds.push_back(EventKind::Loan);
        }
    }
    return kinds;
}

inline PersonId pick_other(const std::vector<PersonId>& circle, std::initializer_list<PersonId> not_these,
                           Rng& rng) {
    std::vector<PersonId> options;
    for (PersonId p : circle) {
        bool excluded = false;
        for (PersonId q : not_these)
            if (p == q) { excluded = true; break; }
        if (!excluded) options.push_back(p);
    }
    if (options.empty()) throw RetryGraph{};
    return options[rng.below(options.size())];
}

// Noise fact (a, w, b) is rejected when it (or a closure inverse it may
// trigger) would add an out-edge colliding with a planted chain prefix,
// which would make planted-path composition multi-valued.
inline bool collides_with_chains(PersonId subject, BasicRelation rel,
                                 const std::vector<std::vector<PersonId>>& chains,
                                 const std::vector<std::vector<BasicRelation>>& paths) {
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const auto& chain = chains[c];
        const auto& path = paths[c];
        for (std::size_t j = 0; j < path.size(); ++j)
            if (chain[j] == subject && path[j] == rel) return true;
    }
    return false;
}

inline void plant_static(Graph& g, Rng& rng, RuleDistribution dist) {
    const int n = static_cast<int>(g.persons.size());
    std::vector<PersonId> avail(n);
    std::iota(avail.begin(), avail.end(), 0);
    rng.shuffle(avail);
    std::size_t cursor = 0;

    std::vector<std::vector<PersonId>> chains;
    std::vector<std::vector<BasicRelation>> paths;
    std::vector<KinshipFact> facts;

    auto take_tuple = [&](int count) -> std::vector<PersonId> {
        if (cursor + count > avail.size()) return {};
        std::vector<PersonId> t(avail.begin() + cursor, avail.begin() + cursor + count);
        cursor += count;
        return t;
    };

    // Inductive planting: rule from the split's group distribution, two or
    // three support chains on disjoint person tuples.
    const CompositeRule& rule = sample_rule(dist, rng);
    int support_count = rng.range(2, 3);
    if ((rule.hop() + 1) * support_count > n) support_count = 2;
    if ((rule.hop() + 1) * support_count <= n) {
        g.planted.rule = rule.name;
        g.planted.path = rule.path;
        for (int s = 0; s < support_count; ++s) {
            auto tuple = take_tuple(rule.hop() + 1);
            auto planted = plant_rule_chain(rule, tuple);
            facts.insert(facts.end(), planted.begin(), planted.end());
            g.planted.supports.push_back(tuple);
            chains.push_back(std::move(tuple));
            paths.push_back(rule.path);
        }
    }

    // Analogy needs two realizations of a group A-C rule. Reuse the planted
    // support chains when they qualify; otherwise plant a separate pair.
    if (g.planted.has_inductive() && group_of_rule(g.planted.rule) <= 'C') {
        g.planted.analogy_rule = g.planted.rule;
        g.planted.analogy_path = g.planted.path;
        g.planted.analogy_chains = {g.planted.supports[0], g.planted.supports[1]};
    } else {
        const CompositeRule& arule = sample_analogy_rule(dist, rng);
        if (cursor + 2 * (arule.hop() + 1) <= avail.size()) {
            g.planted.analogy_rule = arule.name;
            g.planted.analogy_path = arule.path;
            for (int s = 0; s < 2; ++s) {
                auto tuple = take_tuple(arule.hop() + 1);
                auto planted = plant_rule_chain(arule, tuple);
                facts.insert(facts.end(), planted.begin(), planted.end());
                g.planted.analogy_chains.push_back(tuple);
                chains.push_back(std::move(tuple));
                paths.push_back(arule.path);
            }
        }
    }

    // Noise kinship facts; may reuse persons already in planted tuples.
    const int noise_target = rng.range(1, 3);
    int added = 0;
    for (int attempt = 0; attempt < 96 && added < noise_target; ++attempt) {
        const PersonId a = static_cast<PersonId>(rng.below(n));
        const PersonId b = static_cast<PersonId>(rng.below(n));
        if (a == b) continue;
        const BasicRelation w = kBasicRelations[rng.below(kBasicRelations.size())];
        if (fact_exists(facts, {a, w, b})) continue;
        if (collides_with_chains(a, w, chains, paths)) continue;
        bool inverse_ok = true;
        for (auto winv : inverse_candidates(w))
            if (collides_with_chains(b, winv, chains, paths)) { inverse_ok = false; break; }
        if (!inverse_ok) continue;
        facts.push_back({a, w, b});
        ++added;
    }

    g.kinship_facts = close_under_inverse(std::move(facts), rng);

    // Closure sampling could still have introduced a branching edge; verify
    // every planted chain composes to exactly its endpoint.
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const auto endpoints = compose_path(g.kinship_facts, chains[c].front(), paths[c]);
        if (endpoints.size() != 1 || endpoints[0] != chains[c].back()) throw RetryGraph{};
    }
}

inline Graph build_attempt(int depth, int complexity, std::uint64_t seed, const GenOptions& opt,
                           Rng& rng) {
    const auto& preset = complexity_presets()[complexity - 1];
    Graph g;
    g.seed = seed;
    g.depth = depth;
    g.complexity = complexity;
    g.name_pool = opt.name_pool;

    const int k_chains = sample_chain_count(preset, rng);
    const int n_persons = rng.range(preset.person_lo, preset.person_hi);

    NamePool pool(opt.name_pool);
    std::unordered_set<std::string> used;
    Rng name_rng = rng.fork(0x4a11);
    for (int i = 0; i < n_persons; ++i)
        g.persons.push_back({i, pool.sample_person(name_rng, used)});
    std::unordered_set<std::string> used_objects;
    for (int i = 0; i < k_chains; ++i)
        g.objects.push_back({i, pool.sample_object(name_rng, used_objects)});
    g.chain_of_object.resize(k_chains);
    std::iota(g.chain_of_object.begin(), g.chain_of_object.end(), 0);
    g.target_object = 0;

    // Person partition: two seed persons per chain, leftovers spread randomly.
    std::vector<PersonId> shuffled(n_persons);
    std::iota(shuffled.begin(), shuffled.end(), 0);
    rng.shuffle(shuffled);
    std::vector<ChainPlan> plans(k_chains);
    std::size_t pi = 0;
    for (int c = 0; c < k_chains; ++c) {
        plans[c].object = c;
        plans[c].pool = {shuffled[pi], shuffled[pi + 1]};
        pi += 2;
    }
    for (; pi < shuffled.size(); ++pi)
        plans[rng.below(k_chains)].pool.push_back(shuffled[pi]);

    plans[0].depth = depth;
    for (int c = 1; c < k_chains; ++c)
        plans[c].depth = rng.range(std::max(1, depth - 3), depth);

    // Cross-chain person overlap: the reused target person becomes the
    // distractor chain's initial owner, so the overlap is always realized.
    std::vector<PersonId> forced_owner(k_chains, -1);
    for (int c = 1; c < k_chains; ++c) {
        if (rng.chance(preset.crossover_rate)) {
            const PersonId shared = plans[0].pool[rng.below(plans[0].pool.size())];
            if (std::find(plans[c].pool.begin(), plans[c].pool.end(), shared) == plans[c].pool.end())
                plans[c].pool.push_back(shared);
            forced_owner[c] = shared;
        }
    }

    for (auto& plan : plans) plan.slots.resize(plan.depth);

    // One exchange per adjacent chain pair with probability exchange_rate,
    // occupying one free slot in each chain.
    int exchange_id = 0;
    for (int c = 0; c + 1 < k_chains; ++c) {
        if (!rng.chance(preset.exchange_rate)) continue;
        auto free_slot = [&](const ChainPlan& plan) {
            std::vector<int> xs;
            for (int s = 0; s < plan.depth; ++s)
                if (!plan.slots[s].exchange) xs.push_back(s);
            return xs;
        };
        const auto a_free = free_slot(plans[c]);
        const auto b_free = free_slot(plans[c + 1]);
        if (a_free.empty() || b_free.empty()) continue;
        const int sa = a_free[rng.below(a_free.size())];
        const int sb = b_free[rng.below(b_free.size())];
        plans[c].slots[sa] = {true, c + 1, exchange_id};
        plans[c + 1].slots[sb] = {true, c, exchange_id};
        ++exchange_id;
    }

    // Emit the shared timeline: init declarations head each chain; a random
    // ready chain advances each tick, and exchange slots synchronize pairs.
    std::vector<ObjectState> cur(k_chains);
    std::vector<bool> alive(k_chains, false);
    int time = 0;
    auto chain_done = [&](const ChainPlan& p) {
        return p.init_done && p.next >= p.slots.size();
    };

    auto emit_init = [&](int c) {
        auto& plan = plans[c];
        const PersonId owner =
            forced_owner[c] >= 0 ? forced_owner[c] : plan.pool[rng.below(plan.pool.size())];
        DynamicEvent e;
        e.time_index = time++;
        e.kind = rng.chance(0.5) ? EventKind::Own : EventKind::Create;
        e.actor = owner;
        e.objects = {plan.object};
        g.dynamic_events.push_back(e);
        cur[c] = {owner, owner, Integrity::Intact};
        plan.init_done = true;
        alive[c] = true;
    };

    auto circle_of = [&](int c) {
        std::vector<PersonId> circle = plans[c].pool;
        for (PersonId p : {cur[c].owner, cur[c].possessor})
            if (std::find(circle.begin(), circle.end(), p) == circle.end()) circle.push_back(p);
        return circle;
    };

    auto emit_single = [&](int c) {
        auto& plan = plans[c];
        const bool next_is_exchange =
            plan.next + 1 < plan.slots.size() && plan.slots[plan.next + 1].exchange;
        const auto circle = circle_of(c);
        const auto kinds = applicable_kinds(cur[c], circle, next_is_exchange);
        if (kinds.empty()) throw RetryGraph{};
        const EventKind kind = kinds[rng.below(kinds.size())];
        DynamicEvent e;
        e.time_index = time++;
        e.kind = kind;
        e.objects = {plan.object};
        const auto& st = cur[c];
        switch (kind) {
            case EventKind::Gift:
            case EventKind::Sale:
                e.actor = st.owner;
                e.counterparty = pick_other(circle, {st.owner}, rng);
                break;
            case EventKind::Loan:
                e.actor = st.possessor;
                e.counterparty = pick_other(circle, {st.owner, st.possessor}, rng);
                break;
            case EventKind::Return:
                e.actor = st.possessor;
                e.counterparty = st.owner;
                break;
            case EventKind::Break:
            case EventKind::Repair:
                e.actor = st.possessor;
                break;
            default:
                throw RetryGraph{};
        }
        WorldState w;
        w.states[plan.object] = cur[c];
        cur[c] = apply_event(w, e).states.at(plan.object);
        g.dynamic_events.push_back(e);
        ++plan.next;
    };

    auto emit_exchange = [&](int c) {
        auto& plan = plans[c];
        const int partner = plan.slots[plan.next].partner;
        if (cur[c].owner == cur[partner].owner) throw RetryGraph{};
        DynamicEvent e;
        e.time_index = time++;
        e.kind = EventKind::Exchange;
        e.actor = cur[c].owner;
        e.counterparty = cur[partner].owner;
        e.objects = {plan.object, plans[partner].object};
        const ObjectState a = cur[c], b = cur[partner];
        cur[c] = {b.owner, b.owner, a.integrity};
        cur[partner] = {a.owner, a.owner, b.integrity};
        g.dynamic_events.push_back(e);
        ++plan.next;
        ++plans[partner].next;
    };

    for (;;) {
        std::vector<int> ready;
        for (int c = 0; c < k_chains; ++c) {
            if (chain_done(plans[c])) continue;
            if (!plans[c].init_done) {
                ready.push_back(c);
                continue;
            }
            const auto& slot = plans[c].slots[plans[c].next];
            if (!slot.exchange) {
                ready.push_back(c);
            } else {
                const auto& partner = plans[slot.partner];
                if (partner.init_done && partner.next < partner.slots.size() &&
                    partner.slots[partner.next].exchange &&
                    partner.slots[partner.next].exchange_id == slot.exchange_id)
                    ready.push_back(c);
            }
        }
        if (ready.empty()) break;
        const int c = ready[rng.below(ready.size())];
        if (!plans[c].init_done) emit_init(c);
        else if (plans[c].slots[plans[c].next].exchange) emit_exchange(c);
        else emit_single(c);
    }

    plant_static(g, rng, opt.rule_distribution);

    // Hard guarantees: full replay validity and exact depth.
    replay(g.initial_state, g.dynamic_events);
    if (reasoning_depth(g, g.target_object) != depth) throw RetryGraph{};
    return g;
}

}  // namespace gen_detail

// Graph whose reasoning depth on the target object equals `depth` exactly.
// Deterministic in (depth, complexity, seed, options); rejection-resamples
// within a fixed retry budget and never silently relaxes a constraint.
inline Graph generate_graph(int depth, int complexity, std::uint64_t seed,
                            const GenOptions& opt = {}) {
    if (depth < kMinDepth || depth > kMaxDepth || complexity < kMinComplexity ||
        complexity > kMaxComplexity)
        throw GenerationError("cell out of range: D=" + std::to_string(depth) +
                              " T=" + std::to_string(complexity));
    constexpr int kRetryBudget = 64;
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
        Rng rng(mix_seed({seed, static_cast<std::uint64_t>(attempt)}));
        try {
            Graph g = gen_detail::build_attempt(depth, complexity, seed, opt, rng);
            char buf[32];
            std::snprintf(buf, sizeof buf, "g%016llx", static_cast<unsigned long long>(seed));
            g.id = buf;
            return g;
        } catch (const gen_detail::RetryGraph&) {
            continue;
        }
    }
    throw GenerationError("generation retry budget exhausted for D=" + std::to_string(depth) +
                          " T=" + std::to_string(complexity) +
                          " seed=" + std::to_string(seed));
}

// ---------------------------------------------------------------------------
// Split manifests.

struct CellSpec {
    int depth{};
    int complexity{};
    long long count{};
};

struct SplitManifest {
    std::string name;
    std::uint64_t seed{};
    int name_pool{1};
    RuleDistribution rule_distribution{RuleDistribution::Rl};
    std::vector<CellSpec> cells;

    long long total() const {
        long long t = 0;
        for (const auto& c : cells) t += c.count;
        return t;
    }
};

inline std::uint64_t graph_seed(const SplitManifest& m, const CellSpec& cell, long long index) {
    return mix_seed({m.seed, static_cast<std::uint64_t>(cell.depth),
                     static_cast<std::uint64_t>(cell.complexity),
                     static_cast<std::uint64_t>(index)});
}

// Exactly `count` graphs per cell, emitted in (cell, index) order. Per-graph
// seeds derive from (split seed, cell, index), so content is independent of
// scheduling.
template <class Fn>
inline void generate_split(const SplitManifest& m, Fn&& per_graph) {
    for (const auto& cell : m.cells) {
        GenOptions opt{m.name_pool, m.rule_distribution};
        for (long long i = 0; i < cell.count; ++i) {
            try {
                Graph g = generate_graph(cell.depth, cell.complexity, graph_seed(m, cell, i), opt);
                g.id = m.name + "-d" + std::to_string(cell.depth) + "t" +
                       std::to_string(cell.complexity) + "-" + std::to_string(i);
                per_graph(std::move(g), cell, i);
            } catch (const GenerationError& e) {
                throw GenerationError("cell D" + std::to_string(cell.depth) + "/T" +
                                      std::to_string(cell.complexity) + " index " +
                                      std::to_string(i) + ": " + e.what());
            }
        }
    }
}

// Canonical split manifests. Eval and the RL pool cover the 60-cell grid;
// pretrain covers D1-4 x T1-2.
inline SplitManifest make_grid_manifest(const std::string& name, std::uint64_t seed, int d_lo,
                                        int d_hi, int t_lo, int t_hi, long long per_cell,
                                        int name_pool, RuleDistribution dist) {
    SplitManifest m{name, seed, name_pool, dist, {}};
    for (int d = d_lo; d <= d_hi; ++d)
        for (int t = t_lo; t <= t_hi; ++t) m.cells.push_back({d, t, per_cell});
    return m;
}

inline SplitManifest pretrain_manifest(std::uint64_t seed, long long per_cell = 400000) {
    return make_grid_manifest("pretrain", seed, 1, 4, 1, 2, per_cell, 0, RuleDistribution::Pretrain);
}

inline SplitManifest rl_pool_manifest(std::uint64_t seed, long long per_cell = 20000) {
    return make_grid_manifest("rl", seed, 1, 10, 1, 6, per_cell, 1, RuleDistribution::Rl);
}

inline SplitManifest eval_manifest(std::uint64_t seed, long long per_cell = 80) {
    return make_grid_manifest("eval", seed, 1, 10, 1, 6, per_cell, 2, RuleDistribution::Eval);
}

}  // namespace kgr
