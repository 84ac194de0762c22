// SPDX-License-Identifier: Apache-2.0
//
// Solution verification: parse model text into family-specific traces,
// compute the strict process/answer verdict, and the outcome-gated reward.
// Parse failure is a value, never an exception; a malformed trace still
// yields a best-effort answer extraction.
#pragma once

#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgr/grammar.hpp"
#include "kgr/traces.hpp"

namespace kgr {

// Light normalization: ASCII case-fold, whitespace collapse, trailing
// punctuation strip, leading article strip. Idempotent. The generated domain
// is ASCII, where Unicode NFC is the identity.
inline std::string normalize(std::string_view in) {
    std::string s;
    s.reserve(in.size());
    bool pending_space = false;
    for (unsigned char c : in) {
        if (std::isspace(c)) {
            pending_space = !s.empty();
            continue;
        }
        if (pending_space) {
            s += ' ';
            pending_space = false;
        }
        s += static_cast<char>(std::tolower(c));
    }
    while (!s.empty()) {
        const char c = s.back();
        if (c == '.' || c == ',' || c == '!' || c == '?' || c == ';' || c == ':')
            s.pop_back();
        else
            break;
    }
    while (s.rfind("the ", 0) == 0) s.erase(0, 4);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

// ---------------------------------------------------------------------------
// Parsed trace structures (the verifier's intermediate representation).

struct ParsedDeductive {
    std::string object_name;
    StateNames initial;
    struct Op {
        EventKind kind{};
        StateNames before;
        StateNames after;
    };
    std::vector<Op> operations;
    std::string answer;
};

struct ParsedAbductive {
    std::string object_name;
    struct Op {
        EventKind kind{};
        StateNames before;
        StateNames after;
    };
    std::vector<Op> operations;  // backward narrative order
    std::optional<StateNames> initial_state;
    std::optional<StateNames> missing_step_before;
    std::optional<StateNames> missing_step_after;
    std::string answer;
};

struct ParsedInductive {
    std::vector<BasicRelation> pattern_path;
    std::string pattern_rule;
    std::string query_rule;
    std::string query_subject;
    std::string query_object;
    std::string answer;
};

struct ParsedAnalogy {
    std::vector<BasicRelation> source_path;
    std::string source_rule;
    std::string target_rule;
    std::string target_entity;
    std::string answer;
};

struct ParseFailure {
    std::string reason;
    std::string answer;  // best-effort extraction
};

using ParsedTrace =
    std::variant<ParsedDeductive, ParsedAbductive, ParsedInductive, ParsedAnalogy, ParseFailure>;

namespace verify_detail {

inline std::string extract_after(std::string_view text, std::string_view marker) {
    const auto pos = text.rfind(marker);
    if (pos == std::string_view::npos) return "";
    std::string_view rest = grammar::trim(text.substr(pos + marker.size()));
    return std::string(rest);
}

inline std::string extract_answer(std::string_view text) {
    for (std::string_view m : {"the missing information is:", "the missing information is",
                               "the answer is:", "the answer is"}) {
        if (auto a = extract_after(text, m); !a.empty()) return a;
    }
    return "";
}

// State clause starting at `from`: everything up to and including the next ')'.
inline std::optional<ParsedState> state_at(std::string_view text, std::size_t from) {
    const auto close = text.find(')', from);
    if (close == std::string_view::npos) return std::nullopt;
    return parse_state_clause(text.substr(from, close + 1 - from));
}

struct Marked {
    std::size_t pos;
    std::size_t end;  // position just past the marker
};

inline std::optional<Marked> find_marker(std::string_view text, std::string_view marker,
                                         std::size_t from) {
    const auto pos = text.find(marker, from);
    if (pos == std::string_view::npos) return std::nullopt;
    return Marked{pos, pos + marker.size()};
}

}  // namespace verify_detail

inline ParsedTrace parse_deductive_solution(std::string_view text) {
    using namespace verify_detail;
    const std::string answer = extract_answer(text);
    const auto init = find_marker(text, "Initial state:", 0);
    if (!init) return ParseFailure{"missing 'Initial state:'", answer};
    const auto init_state = state_at(text, init->end);
    if (!init_state) return ParseFailure{"unparsable initial state", answer};

    ParsedDeductive out;
    out.object_name = init_state->object;
    out.initial = init_state->state;
    out.answer = answer;

    StateNames prev = out.initial;
    std::size_t cursor = init->end;
    for (;;) {
        const auto step = find_marker(text, "Step ", cursor);
        if (!step) break;
        const auto colon = text.find(':', step->end);
        if (colon == std::string_view::npos)
            return ParseFailure{"malformed step header", answer};
        const auto state_marker = find_marker(text, "State:", colon);
        if (!state_marker) return ParseFailure{"step without a state", answer};
        const auto event_text = text.substr(colon + 1, state_marker->pos - colon - 1);
        const auto event = parse_event_sentence(event_text);
        if (!event) return ParseFailure{"unparsable step event", answer};
        const auto after = state_at(text, state_marker->end);
        if (!after) return ParseFailure{"unparsable step state", answer};
        out.operations.push_back({event->kind, prev, after->state});
        prev = after->state;
        cursor = state_marker->end;
    }
    return out;
}

inline ParsedTrace parse_abductive_solution(std::string_view text) {
    using namespace verify_detail;
    const std::string answer = extract_answer(text);
    ParsedAbductive out;
    out.answer = answer;

    std::size_t cursor = 0;
    for (;;) {
        auto step = find_marker(text, "Last step:", cursor);
        const auto prev_step = find_marker(text, "Previous step:", cursor);
        if (!step || (prev_step && prev_step->pos < step->pos)) step = prev_step;
        if (!step) break;
        const auto before_m = find_marker(text, "Before:", step->end);
        if (!before_m) return ParseFailure{"step without 'Before:'", answer};
        const auto event = parse_event_sentence(text.substr(step->end, before_m->pos - step->end));
        if (!event) return ParseFailure{"unparsable step event", answer};
        const auto before = state_at(text, before_m->end);
        const auto after_m = find_marker(text, "After:", before_m->end);
        if (!before || !after_m) return ParseFailure{"unparsable step states", answer};
        const auto after = state_at(text, after_m->end);
        if (!after) return ParseFailure{"unparsable step states", answer};
        if (out.object_name.empty()) out.object_name = before->object;
        out.operations.push_back({event->kind, before->state, after->state});
        cursor = after_m->end;
    }

    if (const auto m = find_marker(text, "Before the missing step:", 0)) {
        const auto st = state_at(text, m->end);
        if (!st) return ParseFailure{"unparsable missing-step state", answer};
        out.missing_step_before = st->state;
        if (out.object_name.empty()) out.object_name = st->object;
    }
    if (const auto m = find_marker(text, "After the missing step:", 0)) {
        const auto st = state_at(text, m->end);
        if (!st) return ParseFailure{"unparsable missing-step state", answer};
        out.missing_step_after = st->state;
    }
    for (std::string_view marker : {"Required initial state:", "Initial state:"}) {
        if (const auto m = find_marker(text, marker, 0)) {
            const auto st = state_at(text, m->end);
            if (!st) return ParseFailure{"unparsable initial state", answer};
            out.initial_state = st->state;
            if (out.object_name.empty()) out.object_name = st->object;
            break;
        }
    }

    if (out.operations.empty() && !out.initial_state && !out.missing_step_before)
        return ParseFailure{"no backward trace found", answer};
    return out;
}

inline ParsedTrace parse_inductive_solution(std::string_view text) {
    using namespace verify_detail;
    const std::string answer = extract_answer(text);
    const auto pat = find_marker(text, "The pattern is ", 0);
    if (!pat) return ParseFailure{"missing pattern statement", answer};
    const auto gives = text.find(" gives ", pat->end);
    if (gives == std::string_view::npos) return ParseFailure{"missing 'gives' clause", answer};

    ParsedInductive out;
    out.answer = answer;
    std::string_view words = text.substr(pat->end, gives - pat->end);
    std::size_t start = 0;
    while (start <= words.size()) {
        auto next = words.find(" then ", start);
        const auto word = words.substr(start, next == std::string_view::npos ? words.size() - start
                                                                             : next - start);
        const auto rel = relation_from_string(grammar::trim(word));
        if (!rel) return ParseFailure{"unknown relation in pattern", answer};
        out.pattern_path.push_back(*rel);
        if (next == std::string_view::npos) break;
        start = next + 6;
    }
    const auto stop = text.find_first_of(".\n", gives + 7);
    out.pattern_rule =
        std::string(grammar::trim(text.substr(gives + 7, stop == std::string_view::npos
                                                              ? std::string_view::npos
                                                              : stop - gives - 7)));
    if (out.pattern_rule.empty()) return ParseFailure{"empty pattern rule", answer};

    if (const auto app = find_marker(text, "By the same pattern, ", 0)) {
        const auto end = text.find('.', app->end);
        const auto clause =
            text.substr(app->end, end == std::string_view::npos ? std::string_view::npos
                                                                : end - app->end);
        if (const auto f = parse_fact_sentence(clause)) {
            out.query_rule = f->relation;
            out.query_subject = f->subject;
            out.query_object = f->object;
        }
    }
    if (out.query_rule.empty()) return ParseFailure{"missing query application", answer};
    return out;
}

inline ParsedTrace parse_analogy_solution(std::string_view text) {
    using namespace verify_detail;
    const std::string answer = extract_answer(text);
    const auto through = find_marker(text, "Through ", 0);
    if (!through) return ParseFailure{"missing 'Through' clause", answer};
    const auto comma = text.find(", ", through->end);
    if (comma == std::string_view::npos) return ParseFailure{"malformed 'Through' clause", answer};

    ParsedAnalogy out;
    out.answer = answer;
    std::string_view words = text.substr(through->end, comma - through->end);
    std::size_t start = 0;
    while (start <= words.size()) {
        auto next = words.find(" then ", start);
        const auto word = words.substr(start, next == std::string_view::npos ? words.size() - start
                                                                             : next - start);
        const auto rel = relation_from_string(grammar::trim(word));
        if (!rel) return ParseFailure{"unknown relation in path", answer};
        out.source_path.push_back(*rel);
        if (next == std::string_view::npos) break;
        start = next + 6;
    }
    const auto src_end = text.find('.', comma);
    if (const auto f = parse_fact_sentence(
            text.substr(comma + 2, src_end == std::string_view::npos ? std::string_view::npos
                                                                     : src_end - comma - 2))) {
        out.source_rule = f->relation;
    }
    if (out.source_rule.empty()) return ParseFailure{"missing source derivation", answer};

    if (const auto app = find_marker(text, "By the same pattern, ", 0)) {
        const auto end = text.find('.', app->end);
        const auto clause = text.substr(
            app->end, end == std::string_view::npos ? std::string_view::npos : end - app->end);
        if (const auto f = parse_fact_sentence(clause)) {
            out.target_rule = f->relation;
            out.target_entity = f->object;
        }
    }
    if (out.target_rule.empty()) return ParseFailure{"missing target mapping", answer};
    return out;
}

inline ParsedTrace parse_solution(Family family, std::string_view text) {
    switch (family) {
        case Family::Deductive: return parse_deductive_solution(text);
        case Family::Abductive: return parse_abductive_solution(text);
        case Family::Inductive: return parse_inductive_solution(text);
        case Family::Analogy: return parse_analogy_solution(text);
    }
    return ParseFailure{"unknown family", ""};
}

// ---------------------------------------------------------------------------
// Process matching.

namespace verify_detail {

inline bool names_eq(const std::string& a, const std::string& b) {
    return normalize(a) == normalize(b);
}

inline bool states_eq(const StateNames& a, const StateNames& b) {
    return a.intact == b.intact && names_eq(a.owner, b.owner) &&
           names_eq(a.possessor, b.possessor);
}

inline bool opt_states_eq(const std::optional<StateNames>& a, const std::optional<StateNames>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || states_eq(*a, *b);
}

}  // namespace verify_detail

// Strict per-family process match. Returns 1 only on a full structural match
// with no missing or extra step; `why` (optional) receives the first mismatch.
inline int match_process(const ParsedTrace& parsed, const TaskInstance& gold,
                         std::string* why = nullptr) {
    using namespace verify_detail;
    auto fail = [&](const std::string& reason) {
        if (why) *why = reason;
        return 0;
    };

    if (const auto* pf = std::get_if<ParseFailure>(&parsed))
        return fail("parse failure: " + pf->reason);

    switch (gold.family) {
        case Family::Deductive: {
            const auto* p = std::get_if<ParsedDeductive>(&parsed);
            const auto& g = std::get<DeductiveTrace>(gold.gold_trace);
            if (!p) return fail("wrong trace family");
            if (!names_eq(p->object_name, g.object_name)) return fail("object mismatch");
            if (!states_eq(p->initial, g.initial)) return fail("initial state mismatch");
            if (p->operations.size() != g.steps.size())
                return fail("step count mismatch: " + std::to_string(p->operations.size()) +
                            " vs " + std::to_string(g.steps.size()));
            StateNames prev = g.initial;
            for (std::size_t i = 0; i < g.steps.size(); ++i) {
                const auto& po = p->operations[i];
                const auto& gs = g.steps[i];
                if (po.kind != gs.event.kind) return fail("step " + std::to_string(i + 1) + " kind");
                if (!states_eq(po.before, prev)) return fail("step " + std::to_string(i + 1) + " before-state");
                if (!states_eq(po.after, gs.after)) return fail("step " + std::to_string(i + 1) + " after-state");
                prev = gs.after;
            }
            return 1;
        }
        case Family::Abductive: {
            const auto* p = std::get_if<ParsedAbductive>(&parsed);
            const auto& g = std::get<AbductiveTrace>(gold.gold_trace);
            if (!p) return fail("wrong trace family");
            if (!names_eq(p->object_name, g.object_name)) return fail("object mismatch");
            if (p->operations.size() != g.back_steps.size())
                return fail("visible step count mismatch");
            for (std::size_t i = 0; i < g.back_steps.size(); ++i) {
                const auto& po = p->operations[i];
                const auto& gs = g.back_steps[i];
                if (po.kind != gs.event.kind) return fail("step " + std::to_string(i + 1) + " kind");
                if (!states_eq(po.before, gs.before)) return fail("step " + std::to_string(i + 1) + " before-state");
                if (!states_eq(po.after, gs.after)) return fail("step " + std::to_string(i + 1) + " after-state");
            }
            if (!opt_states_eq(p->missing_step_before, g.gap_before)) return fail("missing-step before-state");
            if (!opt_states_eq(p->missing_step_after, g.gap_after)) return fail("missing-step after-state");
            const std::optional<StateNames>& gold_initial =
                g.mode == MaskMode::MaskOneInitialFact ? g.required_initial : g.initial_shown;
            if (!opt_states_eq(p->initial_state, gold_initial)) return fail("initial-state claim");
            return 1;
        }
        case Family::Inductive: {
            const auto* p = std::get_if<ParsedInductive>(&parsed);
            const auto& g = std::get<InductiveTrace>(gold.gold_trace);
            if (!p) return fail("wrong trace family");
            if (p->pattern_path != g.path) return fail("pattern path mismatch");
            if (!names_eq(p->pattern_rule, g.rule)) return fail("pattern rule mismatch");
            if (!names_eq(p->query_rule, g.rule)) return fail("query rule mismatch");
            if (!names_eq(p->query_subject, g.query_persons.front()) ||
                !names_eq(p->query_object, g.query_persons.back()))
                return fail("query application mismatch");
            return 1;
        }
        case Family::Analogy: {
            const auto* p = std::get_if<ParsedAnalogy>(&parsed);
            const auto& g = std::get<AnalogyTrace>(gold.gold_trace);
            if (!p) return fail("wrong trace family");
            if (p->source_path != g.path) return fail("source path mismatch");
            if (!names_eq(p->source_rule, g.rule)) return fail("source rule mismatch");
            if (!names_eq(p->target_rule, g.rule)) return fail("target rule mismatch");
            if (!names_eq(p->target_entity, g.target_chain.back())) return fail("target mapping mismatch");
            return 1;
        }
    }
    return fail("unknown family");
}

// ---------------------------------------------------------------------------
// Answer matching.

namespace verify_detail {

inline bool init_class(EventKind k) { return is_init(k); }

// Canonical-tuple equality for masked elements. Initialization declarations
// compare as one class (own/create set the same state); exchanges accept the
// mirrored description.
inline bool events_equivalent(const EventSurface& a, const EventSurface& b) {
    const bool both_init = init_class(a.kind) && init_class(b.kind);
    if (!both_init && a.kind != b.kind) return false;
    if (a.kind == EventKind::Exchange) {
        const bool direct = names_eq(a.actor, b.actor) && names_eq(a.counterparty, b.counterparty) &&
                            names_eq(a.object, b.object) && names_eq(a.object2, b.object2);
        const bool mirrored = names_eq(a.actor, b.counterparty) && names_eq(a.counterparty, b.actor) &&
                              names_eq(a.object, b.object2) && names_eq(a.object2, b.object);
        return direct || mirrored;
    }
    return names_eq(a.actor, b.actor) && names_eq(a.counterparty, b.counterparty) &&
           names_eq(a.object, b.object);
}

}  // namespace verify_detail

// Normalized equality for deductive/inductive/analogy answers; canonical
// event-tuple equivalence for abductive answers (any surface variant of the
// same missing element is accepted).
inline int match_answer(Family family, std::string_view answer_text, std::string_view gold_answer) {
    if (family == Family::Abductive) {
        const auto got = parse_event_sentence(answer_text);
        const auto want = parse_event_sentence(gold_answer);
        if (got && want) return verify_detail::events_equivalent(*got, *want) ? 1 : 0;
    }
    return normalize(answer_text) == normalize(gold_answer) ? 1 : 0;
}

// Outcome-gated reward: no reward when the final answer is wrong; otherwise
// the process indicator carries `process_ratio` of the weight and the answer
// the remainder. Quantized to 1e-9 so short-decimal ratios yield
// short-decimal rewards (0.8 gives exactly 0.2, not 1.0 - 0.8's ulp error),
// which keeps serialized rewards reproducible across languages.
inline double compute_reward(int answer_match, int process_match, double process_ratio = 0.8) {
    if (!(process_ratio >= 0.0 && process_ratio <= 1.0))
        throw std::invalid_argument("process_ratio must be in [0, 1]");
    if (answer_match != 0 && answer_match != 1)
        throw std::invalid_argument("answer_match must be 0 or 1");
    if (process_match != 0 && process_match != 1)
        throw std::invalid_argument("process_match must be 0 or 1");
    if (answer_match == 0) return 0.0;
    const double r = process_ratio * process_match + (1.0 - process_ratio);
    return std::nearbyint(r * 1e9) / 1e9;
}

struct Verdict {
    int answer_match{};
    int process_match{};
    double reward{};
    std::string diagnostics;  // analysis only; never affects reward
};

inline Verdict verify_response(const TaskInstance& instance, std::string_view response_text,
                               double process_ratio = 0.8) {
    Verdict v;
    const ParsedTrace parsed = parse_solution(instance.family, response_text);
    std::string why;
    v.process_match = match_process(parsed, instance, &why);

    std::string answer;
    std::visit([&](const auto& p) { answer = p.answer; }, parsed);
    v.answer_match = match_answer(instance.family, answer, instance.gold_answer);
    v.reward = compute_reward(v.answer_match, v.process_match, process_ratio);
    v.diagnostics = why;
    return v;
}

}  // namespace kgr
