// SPDX-License-Identifier: Apache-2.0
//
// Natural-language rendering: stories from symbolic graphs via a seeded
// riffle merge of the dynamic and static sentence streams, plus the
// canonical question and gold-solution layouts per task family.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kgr/core.hpp"
#include "kgr/grammar.hpp"
#include "kgr/rng.hpp"
#include "kgr/traces.hpp"

namespace kgr {

struct StorySentence {
    enum class Stream { Dynamic, Static };
    Stream stream{Stream::Dynamic};
    std::string text;
};

struct StoryDoc {
    std::vector<StorySentence> sentences;
    std::vector<std::string> omitted_elements;  // canonical surfaces of masked elements

    std::string text() const {
        std::string out;
        for (const auto& s : sentences) {
            if (!out.empty()) out += ' ';
            out += s.text;
        }
        return out;
    }
};

// Abductive masking directives for the story renderer.
struct MaskSpec {
    std::optional<std::size_t> masked_event_index;  // index into graph.dynamic_events
    std::optional<DynamicEvent> appended_event;     // solvability repair, rendered last
};

namespace detail {

// Variant keyed by (seed, event time) so masking one sentence does not
// reshuffle the others.
inline SurfaceVariant variant_for(std::uint64_t seed, int time_index) {
    return kSurfaceVariants[mix_seed({seed, 0x5eedu, static_cast<std::uint64_t>(time_index)}) & 3];
}

inline int frame_for(std::uint64_t seed, std::size_t fact_index) {
    return static_cast<int>(mix_seed({seed, 0xfac7u, fact_index}) & 3);
}

}  // namespace detail

// Dynamic and static streams rendered separately, then interleaved by a
// seeded stable merge: each static sentence draws an insertion gap uniformly
// among dynamic-sentence gaps, and the sorted gap multiset preserves both
// streams' internal orders.
inline StoryDoc render_story(const Graph& g, const MaskSpec* masks, std::uint64_t seed) {
    StoryDoc doc;

    std::vector<std::string> dynamic;
    for (std::size_t i = 0; i < g.dynamic_events.size(); ++i) {
        const auto& e = g.dynamic_events[i];
        if (masks && masks->masked_event_index && *masks->masked_event_index == i) {
            doc.omitted_elements.push_back(
                render_event_sentence(event_surface(g, e), SurfaceVariant::Active));
            continue;
        }
        dynamic.push_back(
            render_event_sentence(event_surface(g, e), detail::variant_for(seed, e.time_index)));
    }
    if (masks && masks->appended_event) {
        const auto& e = *masks->appended_event;
        dynamic.push_back(
            render_event_sentence(event_surface(g, e), detail::variant_for(seed, e.time_index)));
    }

    std::vector<std::string> statics;
    for (std::size_t i = 0; i < g.kinship_facts.size(); ++i) {
        const auto& f = g.kinship_facts[i];
        statics.push_back(render_fact_sentence(g.person_name(f.subject),
                                               to_string(f.relation),
                                               g.person_name(f.object),
                                               detail::frame_for(seed, i)));
    }

    Rng rng(mix_seed({seed, 0x1e4f, g.seed}));
    std::vector<std::size_t> gaps(statics.size());
    for (auto& gp : gaps) gp = rng.below(dynamic.size() + 1);
    std::sort(gaps.begin(), gaps.end());

    std::size_t si = 0;
    for (std::size_t di = 0; di <= dynamic.size(); ++di) {
        while (si < gaps.size() && gaps[si] == di) {
            doc.sentences.push_back({StorySentence::Stream::Static, statics[si]});
            ++si;
        }
        if (di < dynamic.size())
            doc.sentences.push_back({StorySentence::Stream::Dynamic, dynamic[di]});
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Questions.

inline std::string render_deductive_question(Slot slot, QueryMode mode, int k,
                                             const std::string& object) {
    const std::string obj = "the " + object;
    if (mode == QueryMode::FullInfo) {
        switch (slot) {
            case Slot::Owner: return "After all events, who owns " + obj + "?";
            case Slot::Possessor: return "After all events, who possesses " + obj + "?";
            case Slot::Integrity: return "Is " + obj + " broken or intact after all events?";
        }
    }
    const std::string lead = "After the " + ordinal(k) + " operation involving " + obj + ", ";
    switch (slot) {
        case Slot::Owner: return lead + "who owns " + obj + "?";
        case Slot::Possessor: return lead + "who possesses " + obj + "?";
        case Slot::Integrity: return lead + "is " + obj + " broken or intact?";
    }
    return "";
}

inline std::string render_abductive_question(const std::string& object) {
    return "Some information is missing from the story. Please infer the missing event or "
           "information involving the " + object + ".";
}

inline std::string render_inductive_ask(const std::string& a, const std::string& z, int variant) {
    switch (variant & 3) {
        case 0: return "What is the relationship between " + a + " and " + z + "?";
        case 1: return "What is " + a + " to " + z + "?";
        case 2: return "What relation does " + a + " hold to " + z + "?";
        default: return "How is " + a + " related to " + z + "?";
    }
}

inline std::string render_analogy_question(const std::string& a, const std::string& b,
                                           const std::string& c, int variant) {
    switch (variant & 3) {
        case 0: return a + " is to " + b + " as " + c + " is to ?";
        case 1: return "Complete the analogy: " + a + " is to " + b + " as " + c + " is to ?";
        case 2: return a + " relates to " + b + " as " + c + " relates to ?";
        default: return "As " + a + " is to " + b + ", " + c + " is to ?";
    }
}

// ---------------------------------------------------------------------------
// Gold solutions. Layouts are fixed per family; parsing them back yields
// A=1 and P=1 against the instance they came from.

namespace detail {

inline std::string chain_clause(const std::vector<std::string>& persons,
                                const std::vector<BasicRelation>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += ", and ";
        s += persons[i] + " is the " + std::string(to_string(path[i])) + " of " + persons[i + 1];
    }
    return s;
}

inline std::string path_words(const std::vector<BasicRelation>& path) {
    std::string s;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) s += " then ";
        s += to_string(path[i]);
    }
    return s;
}

}  // namespace detail

inline std::string render_gold_solution(const DeductiveTrace& t) {
    std::string s = "Initial state: " + render_state_clause(t.initial, t.object_name) + ".\n";
    int k = 0;
    for (const auto& step : t.steps) {
        s += "\nStep " + std::to_string(++k) + ": " +
             render_event_sentence(step.event, SurfaceVariant::Active) +
             " State: " + render_state_clause(step.after, t.object_name) + ".\n";
    }
    std::string answer;
    const StateNames& queried = t.steps.empty() ? t.initial : t.steps.back().after;
    switch (t.slot) {
        case Slot::Owner: answer = queried.owner; break;
        case Slot::Possessor: answer = queried.possessor; break;
        case Slot::Integrity: answer = queried.intact ? "intact" : "broken"; break;
    }
    s += "\nTherefore, the answer is " + answer + ".";
    return s;
}

inline std::string render_gold_solution(const AbductiveTrace& t) {
    using GapSite = AbductiveTrace::GapSite;
    std::string s = "Tracing backwards.\n";
    bool first = true;
    for (const auto& step : t.back_steps) {
        s += first ? "\nLast step: " : "\nPrevious step: ";
        s += render_event_sentence(step.event, SurfaceVariant::Active);
        s += " Before: " + render_state_clause(step.before, t.object_name) + ".";
        s += " After: " + render_state_clause(step.after, t.object_name) + ".";
        if (!first) {
            const bool gap_here =
                t.gap_site == GapSite::Interior && &step == &t.back_steps.back();
            s += gap_here ? " After does not match before of the next step, gap found."
                          : " After matches before of the next step, no gap.";
        }
        s += "\n";
        first = false;
    }
    if (t.mode == MaskMode::MaskOneInitialFact) {
        s += "\nRequired initial state: " +
             render_state_clause(*t.required_initial, t.object_name) +
             ". The story does not state this.\n";
    } else {
        switch (t.gap_site) {
            case GapSite::BeforeFirstStep:
                s += "\nInitial state: " + render_state_clause(*t.initial_shown, t.object_name) +
                     ". Initial state does not match before of the next step, gap found.\n";
                break;
            case GapSite::AfterLastStep:
                if (t.back_steps.empty())
                    s += "\nNo operation on the " + t.object_name + " is stated.\n";
                else
                    s += "\nAll stated steps are consistent, so the missing step comes after "
                         "the last stated event.\n";
                break;
            default:
                break;
        }
        s += "\nBefore the missing step: " + render_state_clause(*t.gap_before, t.object_name) +
             ". After the missing step: " + render_state_clause(*t.gap_after, t.object_name) + ".\n";
    }
    s += "\nTherefore, the missing information is: " +
         render_event_sentence(t.masked, SurfaceVariant::Active);
    return s;
}

inline std::string render_gold_solution(const InductiveTrace& t) {
    std::string s;
    for (const auto& support : t.supports) {
        s += "Example: " + detail::chain_clause(support, t.path) + ", so " + support.front() +
             " is the " + t.rule + " of " + support.back() + ".\n\n";
    }
    s += "The pattern is " + detail::path_words(t.path) + " gives " + t.rule + ".\n";
    s += "\nApplying to query: " + detail::chain_clause(t.query_persons, t.path) +
         ". By the same pattern, " + t.query_persons.front() + " is the " + t.rule + " of " +
         t.query_persons.back() + ".\n";
    s += "\nTherefore, the answer is " + t.rule + ".";
    return s;
}

inline std::string render_gold_solution(const AnalogyTrace& t) {
    std::string s = "From the story, " + detail::chain_clause(t.source_chain, t.path) +
                    ". Through " + detail::path_words(t.path) + ", " + t.source_chain.front() +
                    " is the " + t.rule + " of " + t.source_chain.back() + ".\n";
    s += "\nSimilarly, " + detail::chain_clause(t.target_chain, t.path) + ". By the same pattern, " +
         t.target_chain.front() + " is the " + t.rule + " of " + t.target_chain.back() + ".\n";
    s += "\nTherefore, the answer is " + t.target_chain.back() + ".";
    return s;
}

inline std::string render_gold_solution(const TaskInstance& x) {
    return std::visit([](const auto& t) { return render_gold_solution(t); }, x.gold_trace);
}

}  // namespace kgr
