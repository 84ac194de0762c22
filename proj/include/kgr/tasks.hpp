// SPDX-License-Identifier: Apache-2.0
//
// Task instantiation: the four reasoning families with gold traces and gold
// answers, the abductive masking guard backed by a re-insertion search, and
// cell-matched few-shot prompt assembly.
#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "kgr/core.hpp"
#include "kgr/generator.hpp"
#include "kgr/names.hpp"
#include "kgr/renderer.hpp"
#include "kgr/traces.hpp"

namespace kgr {

struct TaskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace task_detail {

inline StateNames state_names(const Graph& g, const ObjectState& st) {
    return {g.person_name(st.owner), g.person_name(st.possessor),
            st.integrity == Integrity::Intact};
}

struct TargetChain {
    const DynamicEvent* init{nullptr};
    std::vector<const DynamicEvent*> ops;
    ObjectState s0{};
    std::vector<ObjectState> states;  // after each op
};

inline TargetChain target_chain(const Graph& g) {
    TargetChain tc;
    WorldState w = g.initial_state;
    for (const auto& e : g.dynamic_events) {
        w = apply_event(w, e);
        if (!e.touches(g.target_object)) continue;
        if (is_init(e.kind)) {
            tc.init = &e;
            tc.s0 = w.states.at(g.target_object);
        } else {
            tc.ops.push_back(&e);
            tc.states.push_back(w.states.at(g.target_object));
        }
    }
    if (!tc.init) throw TaskError("target object has no initialization declaration");
    return tc;
}

// Object-local transition for candidate search; checks only the preconditions
// observable on this object's chain.
inline std::optional<ObjectState> apply_local(ObjectId obj, const ObjectState& st,
                                              const DynamicEvent& e) {
    switch (e.kind) {
        case EventKind::Own:
        case EventKind::Create:
            return std::nullopt;  // already initialized
        case EventKind::Gift:
        case EventKind::Sale:
            if (!e.counterparty || *e.counterparty == e.actor) return std::nullopt;
            if (st.owner != e.actor || st.possessor != e.actor) return std::nullopt;
            return ObjectState{*e.counterparty, *e.counterparty, st.integrity};
        case EventKind::Exchange: {
            if (!e.counterparty || *e.counterparty == e.actor) return std::nullopt;
            const bool offered = e.objects[0] == obj;
            const PersonId holder = offered ? e.actor : *e.counterparty;
            const PersonId receiver = offered ? *e.counterparty : e.actor;
            if (st.owner != holder || st.possessor != holder) return std::nullopt;
            return ObjectState{receiver, receiver, st.integrity};
        }
        case EventKind::Loan:
            if (!e.counterparty || *e.counterparty == st.possessor) return std::nullopt;
            if (st.possessor != e.actor) return std::nullopt;
            return ObjectState{st.owner, *e.counterparty, st.integrity};
        case EventKind::Return:
            if (st.possessor != e.actor || st.owner == st.possessor) return std::nullopt;
            return ObjectState{st.owner, st.owner, st.integrity};
        case EventKind::Break:
            if (st.possessor != e.actor || st.integrity != Integrity::Intact) return std::nullopt;
            return ObjectState{st.owner, st.possessor, Integrity::Broken};
        case EventKind::Repair:
            if (st.possessor != e.actor || st.integrity != Integrity::Broken) return std::nullopt;
            return ObjectState{st.owner, st.possessor, Integrity::Intact};
    }
    return std::nullopt;
}

struct LocalChain {
    ObjectId object{};
    ObjectState s0{};
    int init_time{-1};
    std::vector<DynamicEvent> ops;  // events touching the object, timeline order
};

inline LocalChain local_chain(const std::vector<DynamicEvent>& events, ObjectId obj) {
    LocalChain c;
    c.object = obj;
    for (const auto& e : events) {
        if (!e.touches(obj)) continue;
        if (is_init(e.kind)) {
            c.s0 = {e.actor, e.actor, Integrity::Intact};
            c.init_time = e.time_index;
        } else {
            c.ops.push_back(e);
        }
    }
    return c;
}

inline bool chain_consistent(const LocalChain& c) {
    ObjectState st = c.s0;
    for (const auto& e : c.ops) {
        const auto next = apply_local(c.object, st, e);
        if (!next) return false;
        st = *next;
    }
    return true;
}

// Distinct (kind, actor, counterparty) tuples whose single insertion makes
// the whole visible story replay-consistent. Exchange tuples are canonically
// oriented with the target side first.
struct CandidateTuple {
    EventKind kind{};
    PersonId actor{};
    PersonId counterparty{-1};

    friend bool operator<(const CandidateTuple& a, const CandidateTuple& b) {
        return std::tie(a.kind, a.actor, a.counterparty) <
               std::tie(b.kind, b.actor, b.counterparty);
    }
};

inline std::set<CandidateTuple> reinsertion_solutions(const Graph& g,
                                                      const std::vector<DynamicEvent>& visible) {
    const ObjectId target = g.target_object;
    const LocalChain tc = local_chain(visible, target);
    const std::size_t M = tc.ops.size();

    // Consistency of non-target chains is candidate-independent except for
    // exchange candidates touching them.
    std::vector<LocalChain> others;
    int broken_other = -1;  // at most one: the masked event touches <= 1 other chain
    for (const auto& obj : g.objects) {
        if (obj.id == target) continue;
        others.push_back(local_chain(visible, obj.id));
        if (!chain_consistent(others.back())) broken_other = static_cast<int>(others.size() - 1);
    }

    // Reachable target prefix states; ps[i] = state before op i.
    std::vector<ObjectState> ps;
    ps.push_back(tc.s0);
    std::size_t reachable = M;
    for (std::size_t i = 0; i < M; ++i) {
        const auto next = apply_local(target, ps.back(), tc.ops[i]);
        if (!next) {
            reachable = i;
            break;
        }
        ps.push_back(*next);
    }

    auto suffix_ok = [&](ObjectState st, std::size_t from) {
        for (std::size_t i = from; i < M; ++i) {
            const auto next = apply_local(target, st, tc.ops[i]);
            if (!next) return false;
            st = *next;
        }
        return true;
    };

    std::set<CandidateTuple> solutions;
    const int N = static_cast<int>(g.persons.size());

    for (std::size_t slot = 0; slot <= reachable && slot <= M; ++slot) {
        const ObjectState sb = ps[slot];
        auto try_candidate = [&](DynamicEvent e, CandidateTuple tuple) {
            if (broken_other >= 0) return;  // only exchange candidates can fix another chain
            const auto st = apply_local(target, sb, e);
            if (st && suffix_ok(*st, slot)) solutions.insert(tuple);
        };

        const bool clean = sb.owner == sb.possessor;
        if (clean) {
            for (PersonId q = 0; q < N; ++q) {
                if (q == sb.owner) continue;
                DynamicEvent e{0, EventKind::Gift, sb.owner, q, {target}};
                try_candidate(e, {EventKind::Gift, sb.owner, q});
                e.kind = EventKind::Sale;
                try_candidate(e, {EventKind::Sale, sb.owner, q});
            }
        }
        for (PersonId q = 0; q < N; ++q) {
            if (q == sb.possessor) continue;
            try_candidate({0, EventKind::Loan, sb.possessor, q, {target}},
                          {EventKind::Loan, sb.possessor, q});
        }
        if (!clean)
            try_candidate({0, EventKind::Return, sb.possessor, sb.owner, {target}},
                          {EventKind::Return, sb.possessor, sb.owner});
        if (sb.integrity == Integrity::Intact)
            try_candidate({0, EventKind::Break, sb.possessor, std::nullopt, {target}},
                          {EventKind::Break, sb.possessor, -1});
        else
            try_candidate({0, EventKind::Repair, sb.possessor, std::nullopt, {target}},
                          {EventKind::Repair, sb.possessor, -1});

        if (!clean) continue;
        // Exchange candidates: the inserted swap must fit a global time window
        // compatible with both chains and leave both suffixes consistent.
        const int t_lo = slot == 0 ? tc.init_time : tc.ops[slot - 1].time_index;
        const int t_hi =
            slot == M ? std::numeric_limits<int>::max() : tc.ops[slot].time_index;
        for (std::size_t oi = 0; oi < others.size(); ++oi) {
            if (broken_other >= 0 && static_cast<int>(oi) != broken_other) continue;
            const LocalChain& oc = others[oi];
            if (oc.init_time < 0) continue;
            ObjectState qs = oc.s0;
            for (std::size_t j = 0; j <= oc.ops.size(); ++j) {
                const int o_lo = j == 0 ? oc.init_time : oc.ops[j - 1].time_index;
                const int o_hi = j == oc.ops.size() ? std::numeric_limits<int>::max()
                                                    : oc.ops[j].time_index;
                const bool window = std::max(t_lo, o_lo) < std::min(t_hi, o_hi);
                if (window && qs.owner == qs.possessor && qs.owner != sb.owner) {
                    DynamicEvent e{0, EventKind::Exchange, sb.owner, qs.owner,
                                   {target, oc.object}};
                    const auto st = apply_local(target, sb, e);
                    const auto qt = apply_local(oc.object, qs, e);
                    bool ok = st && qt && suffix_ok(*st, slot);
                    if (ok) {
                        ObjectState rest = *qt;
                        for (std::size_t i = j; i < oc.ops.size() && ok; ++i) {
                            const auto next = apply_local(oc.object, rest, oc.ops[i]);
                            if (!next) ok = false;
                            else rest = *next;
                        }
                    }
                    if (ok) solutions.insert({EventKind::Exchange, sb.owner, qs.owner});
                }
                if (j < oc.ops.size()) {
                    const auto next = apply_local(oc.object, qs, oc.ops[j]);
                    if (!next) break;  // beyond the reachable prefix of this chain
                    qs = *next;
                }
            }
        }
    }
    return solutions;
}

}  // namespace task_detail

// ---------------------------------------------------------------------------
// Deductive.

// Up to six instances: the three state slots at the final time, plus the
// same slots at a sampled intermediate step when D >= 2.
inline std::vector<TaskInstance> make_deductive(const Graph& g, std::uint64_t seed) {
    using namespace task_detail;
    const TargetChain tc = target_chain(g);
    const int depth = static_cast<int>(tc.ops.size());
    Rng rng(mix_seed({g.seed, seed, 0xded}));

    std::vector<TaskInstance> out;
    auto make = [&](Slot slot, QueryMode mode, int k, std::string form) {
        DeductiveTrace trace;
        trace.object_name = g.object_name(g.target_object);
        trace.initial = state_names(g, tc.s0);
        trace.slot = slot;
        trace.mode = mode;
        trace.query_index = k;
        for (int i = 0; i < k; ++i)
            trace.steps.push_back({event_surface(g, *tc.ops[i]), state_names(g, tc.states[i])});

        const StateNames& queried = k == 0 ? trace.initial : trace.steps.back().after;
        std::string answer;
        switch (slot) {
            case Slot::Owner: answer = queried.owner; break;
            case Slot::Possessor: answer = queried.possessor; break;
            case Slot::Integrity: answer = queried.intact ? "intact" : "broken"; break;
        }

        TaskInstance x;
        x.id = g.id + ":ded:" + form;
        x.family = Family::Deductive;
        x.form = form;
        x.question = render_deductive_question(slot, mode, k, trace.object_name);
        x.gold_trace = std::move(trace);
        x.gold_answer = std::move(answer);
        x.depth = g.depth;
        x.complexity = g.complexity;
        x.graph_id = g.id;
        out.push_back(std::move(x));
    };

    make(Slot::Possessor, QueryMode::FullInfo, depth, "final_possessor");
    make(Slot::Owner, QueryMode::FullInfo, depth, "final_owner");
    make(Slot::Integrity, QueryMode::FullInfo, depth, "final_integrity");
    if (depth >= 2) {
        make(Slot::Possessor, QueryMode::Hard, rng.range(1, depth - 1), "kth_step_possessor");
        make(Slot::Owner, QueryMode::Hard, rng.range(1, depth - 1), "kth_step_owner");
        make(Slot::Integrity, QueryMode::Hard, rng.range(1, depth - 1), "kth_step_integrity");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Abductive.

struct AbductiveMask {
    MaskMode mode{MaskMode::MaskOneEvent};
    int event_position{-1};                   // index into the target op chain
    std::optional<DynamicEvent> appended_repair;
};

// Builds the instance for an explicit mask choice. The story is not rendered
// here; the MaskSpec for render_story is returned through `mask_out`.
inline TaskInstance make_abductive_at(const Graph& g, const AbductiveMask& mask,
                                      MaskSpec* mask_out = nullptr) {
    using namespace task_detail;
    const TargetChain tc = target_chain(g);
    const std::string object = g.object_name(g.target_object);

    AbductiveTrace trace;
    trace.mode = mask.mode;
    trace.object_name = object;

    MaskSpec spec;

    // Full op list including the appended repair, with per-op before states.
    std::vector<const DynamicEvent*> ops = tc.ops;
    std::vector<ObjectState> states = tc.states;
    if (mask.appended_repair) {
        spec.appended_event = mask.appended_repair;
        ops.push_back(&*spec.appended_event);
        ObjectState repaired = states.back();
        repaired.integrity = Integrity::Intact;
        states.push_back(repaired);
    }
    auto before_of = [&](std::size_t i) { return i == 0 ? tc.s0 : states[i - 1]; };
    auto back_step = [&](std::size_t i) {
        return AbductiveTrace::BackStep{event_surface(g, *ops[i]),
                                        state_names(g, before_of(i)),
                                        state_names(g, states[i])};
    };

    if (mask.mode == MaskMode::MaskOneInitialFact) {
        // The init declaration disappears; the backward pass walks every op
        // and derives the required initial state.
        for (std::size_t i = ops.size(); i-- > 0;) trace.back_steps.push_back(back_step(i));
        trace.required_initial = state_names(g, tc.s0);
        trace.masked = event_surface(g, *tc.init);
        for (std::size_t i = 0; i < g.dynamic_events.size(); ++i)
            if (&g.dynamic_events[i] == tc.init) spec.masked_event_index = i;
    } else {
        const std::size_t m = static_cast<std::size_t>(mask.event_position);
        if (m >= tc.ops.size())
            throw TaskError("mask position out of range");
        const std::size_t last = ops.size() - 1;
        if (m == last) {
            trace.gap_site = AbductiveTrace::GapSite::AfterLastStep;
            for (std::size_t i = m; i-- > 0;) trace.back_steps.push_back(back_step(i));
            trace.gap_before = state_names(g, before_of(m));
            trace.gap_after = state_names(g, states[m]);
        } else if (m == 0) {
            trace.gap_site = AbductiveTrace::GapSite::BeforeFirstStep;
            for (std::size_t i = ops.size(); i-- > 1;) trace.back_steps.push_back(back_step(i));
            trace.initial_shown = state_names(g, tc.s0);
            trace.gap_before = state_names(g, tc.s0);
            trace.gap_after = state_names(g, states[0]);
        } else {
            trace.gap_site = AbductiveTrace::GapSite::Interior;
            for (std::size_t i = ops.size(); i-- > m + 1;) trace.back_steps.push_back(back_step(i));
            trace.back_steps.push_back(back_step(m - 1));
            trace.gap_before = state_names(g, states[m - 1]);
            trace.gap_after = state_names(g, states[m]);
        }
        trace.masked = event_surface(g, *tc.ops[m]);
        for (std::size_t i = 0; i < g.dynamic_events.size(); ++i)
            if (&g.dynamic_events[i] == tc.ops[m]) spec.masked_event_index = i;
    }

    TaskInstance x;
    x.id = g.id + ":abd";
    x.family = Family::Abductive;
    x.form = std::string(to_string(mask.mode));
    x.question = render_abductive_question(object);
    x.gold_answer = render_event_sentence(trace.masked, SurfaceVariant::Active);
    x.gold_trace = std::move(trace);
    x.depth = g.depth;
    x.complexity = g.complexity;
    x.graph_id = g.id;
    if (mask_out) *mask_out = spec;
    return x;
}

// Mask-mode sampling (0.75 event / 0.25 initial fact) with the ambiguity
// guard: resample positions toward a unique re-insertion solution, appending
// an automatic repair when a broken-ending chain causes the ambiguity. When
// no position is unique the sampled position is kept; the gold element still
// restores consistency.
inline TaskInstance make_abductive(const Graph& g, std::uint64_t seed,
                                   MaskSpec* mask_out = nullptr) {
    using namespace task_detail;
    const TargetChain tc = target_chain(g);
    if (tc.ops.empty()) throw TaskError("graph has no maskable operation event");
    Rng rng(mix_seed({g.seed, seed, 0xabd}));

    if (!rng.chance(0.75))
        return make_abductive_at(g, {MaskMode::MaskOneInitialFact, -1, std::nullopt}, mask_out);

    const int D = static_cast<int>(tc.ops.size());
    std::vector<int> positions(D);
    std::iota(positions.begin(), positions.end(), 0);
    rng.shuffle(positions);

    const bool ends_broken = tc.states.back().integrity == Integrity::Broken;
    auto visible_without = [&](int m, const std::optional<DynamicEvent>& appended) {
        std::vector<DynamicEvent> visible;
        for (const auto& e : g.dynamic_events)
            if (&e != tc.ops[m]) visible.push_back(e);
        if (appended) visible.push_back(*appended);
        return visible;
    };
    auto repair_event = [&]() {
        DynamicEvent e;
        e.time_index = g.dynamic_events.back().time_index + 1;
        e.kind = EventKind::Repair;
        e.actor = tc.states.back().possessor;
        e.objects = {g.target_object};
        return e;
    };

    for (int m : positions) {
        const auto solutions = reinsertion_solutions(g, visible_without(m, std::nullopt));
        if (solutions.size() == 1)
            return make_abductive_at(g, {MaskMode::MaskOneEvent, m, std::nullopt}, mask_out);
        if (ends_broken) {
            const auto repair = repair_event();
            if (reinsertion_solutions(g, visible_without(m, repair)).size() == 1)
                return make_abductive_at(g, {MaskMode::MaskOneEvent, m, repair}, mask_out);
        }
    }
    return make_abductive_at(g, {MaskMode::MaskOneEvent, positions.front(), std::nullopt},
                             mask_out);
}

// ---------------------------------------------------------------------------
// Inductive and analogy.

namespace task_detail {

inline std::string strip_period(std::string s) {
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

inline std::string chain_question_clause(const std::vector<std::string>& persons,
                                         const std::vector<BasicRelation>& path, Rng& rng) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += ", and ";
        s += strip_period(render_fact_sentence(persons[i], to_string(path[i]), persons[i + 1],
                                               static_cast<int>(rng.below(4))));
    }
    return s + ".";
}

}  // namespace task_detail

// Support composite statements plus restated noise facts (shuffled), the
// fresh query chain, and one of four ask paraphrases.
inline TaskInstance make_inductive(const Graph& g, std::uint64_t seed) {
    using namespace task_detail;
    if (!g.planted.has_inductive())
        throw TaskError("insufficient persons for inductive supports");
    Rng rng(mix_seed({g.seed, seed, 0x1d}));

    InductiveTrace trace;
    trace.rule = g.planted.rule;
    trace.path = g.planted.path;
    for (const auto& tuple : g.planted.supports) {
        std::vector<std::string> names;
        for (PersonId p : tuple) names.push_back(g.person_name(p));
        trace.supports.push_back(std::move(names));
    }

    NamePool pool(g.name_pool);
    std::unordered_set<std::string> used;
    for (const auto& p : g.persons) used.insert(p.full_name);
    for (std::size_t i = 0; i <= trace.path.size(); ++i)
        trace.query_persons.push_back(pool.sample_person(rng, used));

    std::vector<std::string> statements;
    for (const auto& support : trace.supports)
        statements.push_back(render_rule_sentence(support.front(), trace.rule, support.back(),
                                                  static_cast<int>(rng.below(4))));
    if (!g.kinship_facts.empty()) {
        const int noise = rng.range(1, 3);
        std::vector<std::size_t> idx(g.kinship_facts.size());
        std::iota(idx.begin(), idx.end(), 0);
        rng.shuffle(idx);
        for (int i = 0; i < noise && i < static_cast<int>(idx.size()); ++i) {
            const auto& f = g.kinship_facts[idx[i]];
            statements.push_back(render_fact_sentence(g.person_name(f.subject),
                                                      to_string(f.relation),
                                                      g.person_name(f.object),
                                                      static_cast<int>(rng.below(4))));
        }
    }
    rng.shuffle(statements);

    std::string question;
    for (const auto& s : statements) question += s + " ";
    question += chain_question_clause(trace.query_persons, trace.path, rng);
    question += " " + render_inductive_ask(trace.query_persons.front(),
                                           trace.query_persons.back(),
                                           static_cast<int>(rng.below(4)));

    TaskInstance x;
    x.id = g.id + ":ind";
    x.family = Family::Inductive;
    x.form = "rule_composition";
    x.question = std::move(question);
    x.gold_answer = trace.rule;
    x.gold_trace = std::move(trace);
    x.depth = g.depth;
    x.complexity = g.complexity;
    x.graph_id = g.id;
    return x;
}

inline TaskInstance make_analogy(const Graph& g, std::uint64_t seed) {
    if (!g.planted.has_analogy())
        throw TaskError("no shared composite path for analogy");
    Rng rng(mix_seed({g.seed, seed, 0xa7a}));

    AnalogyTrace trace;
    trace.rule = g.planted.analogy_rule;
    trace.path = g.planted.analogy_path;
    for (PersonId p : g.planted.analogy_chains[0])
        trace.source_chain.push_back(g.person_name(p));
    for (PersonId p : g.planted.analogy_chains[1])
        trace.target_chain.push_back(g.person_name(p));

    TaskInstance x;
    x.id = g.id + ":ana";
    x.family = Family::Analogy;
    x.form = "a_to_b_as_c";
    x.question = render_analogy_question(trace.source_chain.front(), trace.source_chain.back(),
                                         trace.target_chain.front(),
                                         static_cast<int>(rng.below(4)));
    x.gold_answer = trace.target_chain.back();
    x.gold_trace = std::move(trace);
    x.depth = g.depth;
    x.complexity = g.complexity;
    x.graph_id = g.id;
    return x;
}

// ---------------------------------------------------------------------------
// Few-shot prompts.

// k solved exemplars from the same family and (D, T) cell, excluding the
// target, followed by the target question. Fixed layout; see the golden
// fixture in the tests.
inline std::string build_fewshot_prompt(const TaskInstance& target,
                                        const std::vector<TaskInstance>& pool, int k,
                                        std::uint64_t seed) {
    std::vector<const TaskInstance*> candidates;
    for (const auto& x : pool) {
        if (x.id == target.id) continue;
        if (x.family != target.family || x.depth != target.depth ||
            x.complexity != target.complexity)
            continue;
        candidates.push_back(&x);
    }
    if (static_cast<int>(candidates.size()) < k)
        throw TaskError("insufficient exemplars: need " + std::to_string(k) + ", have " +
                        std::to_string(candidates.size()));

    Rng rng(mix_seed({seed, 0x9804}));
    std::vector<const TaskInstance*> picked;
    for (int i = 0; i < k; ++i) {
        const std::size_t j = rng.below(candidates.size());
        picked.push_back(candidates[j]);
        candidates.erase(candidates.begin() + static_cast<long>(j));
    }

    std::string prompt;
    for (const TaskInstance* x : picked) {
        if (!x->story.empty()) prompt += "Story: " + x->story + "\n";
        prompt += "Question: " + x->question + "\n";
        prompt += "Solution: " + render_gold_solution(*x) + "\n\n";
    }
    if (!target.story.empty()) prompt += "Story: " + target.story + "\n";
    prompt += "Question: " + target.question + "\nSolution:";
    return prompt;
}

}  // namespace kgr
