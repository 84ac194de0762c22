// SPDX-License-Identifier: Apache-2.0
//
// Task instances and family-specific gold traces. Traces carry resolved
// surface names so an instance is self-contained for verification.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kgr/grammar.hpp"
#include "kgr/kinship.hpp"

namespace kgr {

enum class Family { Deductive, Abductive, Inductive, Analogy };

inline constexpr std::array<Family, 4> kFamilies = {
    Family::Deductive, Family::Abductive, Family::Inductive, Family::Analogy};

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::Deductive: return "deductive";
        case Family::Abductive: return "abductive";
        case Family::Inductive: return "inductive";
        case Family::Analogy: return "analogy";
    }
    return "?";
}

inline std::optional<Family> family_from_string(std::string_view s) {
    for (auto f : kFamilies)
        if (to_string(f) == s) return f;
    return std::nullopt;
}

enum class Slot { Owner, Possessor, Integrity };
enum class QueryMode { FullInfo, Hard };
enum class MaskMode { MaskOneEvent, MaskOneInitialFact };

inline std::string_view to_string(Slot s) {
    switch (s) {
        case Slot::Owner: return "owner";
        case Slot::Possessor: return "possessor";
        case Slot::Integrity: return "integrity";
    }
    return "?";
}

inline std::string_view to_string(QueryMode m) {
    return m == QueryMode::FullInfo ? "full_info" : "hard";
}

inline std::string_view to_string(MaskMode m) {
    return m == MaskMode::MaskOneEvent ? "mask_one_event" : "mask_one_initial_fact";
}

// Forward chain over the target object: initial state plus each operation
// with its post-state, up to the queried step.
struct DeductiveTrace {
    std::string object_name;
    StateNames initial;
    struct Step {
        EventSurface event;
        StateNames after;
        friend bool operator==(const Step&, const Step&) = default;
    };
    std::vector<Step> steps;
    Slot slot{Slot::Possessor};
    QueryMode mode{QueryMode::FullInfo};
    int query_index{};  // k_q; equals steps.size()
};

// Backward verification over the visible steps, with either a mid-chain gap
// (event mask) or a required-but-unstated initial state (fact mask).
struct AbductiveTrace {
    MaskMode mode{MaskMode::MaskOneEvent};
    // Where the event-mask gap sits in the backward narrative. None for
    // fact masks.
    enum class GapSite { None, Interior, BeforeFirstStep, AfterLastStep };
    GapSite gap_site{GapSite::None};
    std::string object_name;
    struct BackStep {
        EventSurface event;
        StateNames before;
        StateNames after;
        friend bool operator==(const BackStep&, const BackStep&) = default;
    };
    std::vector<BackStep> back_steps;           // backward narrative order
    std::optional<StateNames> initial_shown;    // stated initial state, when the narrative reaches it
    std::optional<StateNames> gap_before;       // event mask only
    std::optional<StateNames> gap_after;        // event mask only
    std::optional<StateNames> required_initial; // fact mask only
    EventSurface masked;                        // the hidden element, canonical tuple
};

struct InductiveTrace {
    std::vector<std::vector<std::string>> supports;  // each hop+1 person names
    std::vector<BasicRelation> path;
    std::string rule;
    std::vector<std::string> query_persons;  // hop+1 names, fresh
};

struct AnalogyTrace {
    std::vector<BasicRelation> path;
    std::string rule;
    std::vector<std::string> source_chain;  // A .. B
    std::vector<std::string> target_chain;  // C .. P-hat
};

using GoldTrace = std::variant<DeductiveTrace, AbductiveTrace, InductiveTrace, AnalogyTrace>;

struct TaskInstance {
    std::string id;
    Family family{Family::Deductive};
    std::string form;  // question-form label
    std::string question;
    std::string story;  // rendered story for this instance (may be empty)
    GoldTrace gold_trace;
    std::string gold_answer;
    int depth{};
    int complexity{};
    std::string graph_id;
};

}  // namespace kgr
