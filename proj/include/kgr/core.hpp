// SPDX-License-Identifier: Apache-2.0
//
// Dynamic world core: entities, object states, event semantics, the
// deterministic transition function, and the reasoning-depth measure.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgr/kinship.hpp"

namespace kgr {

using ObjectId = int;

struct Person {
    PersonId id{};
    std::string full_name;
};

struct Object {
    ObjectId id{};
    std::string surface_name;  // noun phrase without the article, e.g. "ivory chess piece"
};

enum class Integrity { Intact, Broken };

struct ObjectState {
    PersonId owner{};
    PersonId possessor{};
    Integrity integrity{Integrity::Intact};

    friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

enum class EventKind { Own, Create, Gift, Sale, Exchange, Loan, Return, Break, Repair };

inline constexpr std::array<EventKind, 9> kEventKinds = {
    EventKind::Own,  EventKind::Create, EventKind::Gift,
    EventKind::Sale, EventKind::Exchange, EventKind::Loan,
    EventKind::Return, EventKind::Break, EventKind::Repair,
};

// own and create are initialization declarations; everything else is an
// operation event and counts toward reasoning depth.
inline bool is_init(EventKind k) { return k == EventKind::Own || k == EventKind::Create; }

inline std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::Own: return "own";
        case EventKind::Create: return "create";
        case EventKind::Gift: return "gift";
        case EventKind::Sale: return "sale";
        case EventKind::Exchange: return "exchange";
        case EventKind::Loan: return "loan";
        case EventKind::Return: return "return";
        case EventKind::Break: return "break";
        case EventKind::Repair: return "repair";
    }
    return "?";
}

inline std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (auto k : kEventKinds)
        if (to_string(k) == s) return k;
    return std::nullopt;
}

struct DynamicEvent {
    int time_index{};
    EventKind kind{};
    PersonId actor{};
    std::optional<PersonId> counterparty;
    std::vector<ObjectId> objects;  // 1 object; 2 (distinct) only for exchange

    bool touches(ObjectId o) const {
        return std::find(objects.begin(), objects.end(), o) != objects.end();
    }
    friend bool operator==(const DynamicEvent&, const DynamicEvent&) = default;
};

struct WorldState {
    std::map<ObjectId, ObjectState> states;

    const ObjectState* find(ObjectId o) const {
        auto it = states.find(o);
        return it == states.end() ? nullptr : &it->second;
    }
    friend bool operator==(const WorldState&, const WorldState&) = default;
};

struct PreconditionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownObjectError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_precondition(const DynamicEvent& e, const std::string& what) {
    throw PreconditionError("event t=" + std::to_string(e.time_index) + " kind=" +
                            std::string(to_string(e.kind)) + ": " + what);
}

inline const ObjectState& require_state(const WorldState& s, const DynamicEvent& e, ObjectId o) {
    const ObjectState* st = s.find(o);
    if (!st) fail_precondition(e, "object not initialized");
    return *st;
}

}  // namespace detail

// Deterministic transition. Only slots of affected objects change:
// ownership transfers move both owner and possessor, loan/return move the
// possessor only, break/repair toggle integrity, and exchange swaps both
// objects to their new holders. Precondition violations throw; the generator
// never emits such events, the error path exists for oracle and fuzz use.
inline WorldState apply_event(const WorldState& state, const DynamicEvent& e) {
    using detail::fail_precondition;
    WorldState out = state;
    switch (e.kind) {
        case EventKind::Own:
        case EventKind::Create: {
            if (e.objects.size() != 1) fail_precondition(e, "needs exactly one object");
            if (state.find(e.objects[0])) fail_precondition(e, "object already initialized");
            out.states[e.objects[0]] = {e.actor, e.actor, Integrity::Intact};
            return out;
        }
        case EventKind::Gift:
        case EventKind::Sale: {
            if (e.objects.size() != 1) fail_precondition(e, "needs exactly one object");
            if (!e.counterparty) fail_precondition(e, "needs a counterparty");
            const auto& st = detail::require_state(state, e, e.objects[0]);
            if (st.owner != e.actor || st.possessor != e.actor)
                fail_precondition(e, "actor must own and possess the object");
            if (*e.counterparty == e.actor) fail_precondition(e, "counterparty equals actor");
            out.states[e.objects[0]] = {*e.counterparty, *e.counterparty, st.integrity};
            return out;
        }
        case EventKind::Exchange: {
            if (e.objects.size() != 2 || e.objects[0] == e.objects[1])
                fail_precondition(e, "needs exactly two distinct objects");
            if (!e.counterparty) fail_precondition(e, "needs a counterparty");
            if (*e.counterparty == e.actor) fail_precondition(e, "counterparty equals actor");
            const auto& a = detail::require_state(state, e, e.objects[0]);
            const auto& b = detail::require_state(state, e, e.objects[1]);
            if (a.owner != e.actor || a.possessor != e.actor)
                fail_precondition(e, "actor must own and possess the offered object");
            if (b.owner != *e.counterparty || b.possessor != *e.counterparty)
                fail_precondition(e, "counterparty must own and possess the offered object");
            out.states[e.objects[0]] = {*e.counterparty, *e.counterparty, a.integrity};
            out.states[e.objects[1]] = {e.actor, e.actor, b.integrity};
            return out;
        }
        case EventKind::Loan: {
            if (e.objects.size() != 1) fail_precondition(e, "needs exactly one object");
            if (!e.counterparty) fail_precondition(e, "needs a counterparty");
            const auto& st = detail::require_state(state, e, e.objects[0]);
            if (st.possessor != e.actor) fail_precondition(e, "actor must possess the object");
            if (*e.counterparty == st.possessor) fail_precondition(e, "cannot lend to the possessor");
            out.states[e.objects[0]] = {st.owner, *e.counterparty, st.integrity};
            return out;
        }
        case EventKind::Return: {
            if (e.objects.size() != 1) fail_precondition(e, "needs exactly one object");
            const auto& st = detail::require_state(state, e, e.objects[0]);
            if (st.possessor != e.actor) fail_precondition(e, "actor must possess the object");
            if (st.owner == st.possessor) fail_precondition(e, "object is not on loan");
            if (e.counterparty && *e.counterparty != st.owner)
                fail_precondition(e, "return counterparty must be the owner");
            out.states[e.objects[0]] = {st.owner, st.owner, st.integrity};
            return out;
        }
        case EventKind::Break: {
            if (e.objects.size() != 1) fail_precondition(e, "needs exactly one object");
            const auto& st = detail::require_state(state, e, e.objects[0]);
            if (st.possessor != e.actor) fail_precondition(e, "actor must possess the object");
            if (st.integrity != Integrity::Intact) fail_precondition(e, "object already broken");
            out.states[e.objects[0]] = {st.owner, st.possessor, Integrity::Broken};
            return out;
        }
        case EventKind::Repair: {
            if (e.objects.size() != 1) fail_precondition(e, "needs exactly one object");
            const auto& st = detail::require_state(state, e, e.objects[0]);
            if (st.possessor != e.actor) fail_precondition(e, "actor must possess the object");
            if (st.integrity != Integrity::Broken) fail_precondition(e, "object is not broken");
            out.states[e.objects[0]] = {st.owner, st.possessor, Integrity::Intact};
            return out;
        }
    }
    detail::fail_precondition(e, "unknown event kind");
}

// Full state trajectory including the initial state; length = |events| + 1.
inline std::vector<WorldState> replay(const WorldState& initial,
                                      std::span<const DynamicEvent> events) {
    std::vector<WorldState> traj;
    traj.reserve(events.size() + 1);
    traj.push_back(initial);
    for (std::size_t i = 0; i < events.size(); ++i) {
        try {
            traj.push_back(apply_event(traj.back(), events[i]));
        } catch (const PreconditionError& err) {
            throw PreconditionError("at index " + std::to_string(i) + ": " + err.what());
        }
    }
    return traj;
}

// Static structure planted into a graph's kinship component. `path` is the
// realization actually planted (usually the rule's canonical path).
struct PlantedStatic {
    std::string rule;
    std::vector<BasicRelation> path;
    std::vector<std::vector<PersonId>> supports;  // each hop+1 persons, pairwise disjoint

    std::string analogy_rule;
    std::vector<BasicRelation> analogy_path;
    std::vector<std::vector<PersonId>> analogy_chains;  // exactly 2 when present

    bool has_inductive() const { return !supports.empty(); }
    bool has_analogy() const { return analogy_chains.size() == 2; }
};

struct Graph {
    std::string id;
    std::uint64_t seed{};
    int depth{};
    int complexity{1};
    int name_pool{0};  // split-scoped vocabulary index

    std::vector<Person> persons;
    std::vector<Object> objects;
    std::vector<DynamicEvent> dynamic_events;  // global timeline, init declarations included
    std::vector<KinshipFact> kinship_facts;    // closed under inverse
    WorldState initial_state;                  // state before any event; empty by convention
    ObjectId target_object{};
    std::vector<int> chain_of_object;          // object id -> chain index
    PlantedStatic planted;

    const std::string& person_name(PersonId p) const { return persons.at(p).full_name; }
    const std::string& object_name(ObjectId o) const { return objects.at(o).surface_name; }

    // Operation events touching `o`, in timeline order.
    std::vector<const DynamicEvent*> ops_on(ObjectId o) const {
        std::vector<const DynamicEvent*> out;
        for (const auto& e : dynamic_events)
            if (!is_init(e.kind) && e.touches(o)) out.push_back(&e);
        return out;
    }

    // Per-object state trajectory over that object's own events (init first).
    // Returns the states after each event touching `o`, preceded by nothing:
    // index i is the state after the i-th touching event.
    std::vector<ObjectState> object_trajectory(ObjectId o) const;
};

// Count of operation-class events whose affected objects include the target.
// Initialization declarations are excluded; an exchange counts only when the
// target is one of the two exchanged objects.
inline int reasoning_depth(const Graph& g, ObjectId target) {
    if (target < 0 || target >= static_cast<int>(g.objects.size()))
        throw UnknownObjectError("reasoning_depth: unknown object id " + std::to_string(target));
    int d = 0;
    for (const auto& e : g.dynamic_events)
        if (!is_init(e.kind) && e.touches(target)) ++d;
    return d;
}

inline std::vector<ObjectState> Graph::object_trajectory(ObjectId o) const {
    // Every event is applied (exchange partners couple chains); only the
    // states after events touching o are recorded.
    std::vector<ObjectState> out;
    WorldState w = initial_state;
    for (const auto& e : dynamic_events) {
        w = apply_event(w, e);
        if (e.touches(o)) out.push_back(w.states.at(o));
    }
    return out;
}

}  // namespace kgr
