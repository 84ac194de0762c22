// SPDX-License-Identifier: Apache-2.0
//
// Surface grammar shared by the story renderer and the solution verifier.
// One template per (event kind, variant); every rendered event sentence
// parses back to its canonical tuple. Parsing is agreement-tolerant so model
// outputs with bare verb forms ("sell", "own") are still recovered.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "kgr/core.hpp"

namespace kgr {

enum class SurfaceVariant { Active, Passive, Cleft, Epistemic };

inline constexpr std::array<SurfaceVariant, 4> kSurfaceVariants = {
    SurfaceVariant::Active, SurfaceVariant::Passive,
    SurfaceVariant::Cleft, SurfaceVariant::Epistemic,
};

inline std::string_view to_string(SurfaceVariant v) {
    switch (v) {
        case SurfaceVariant::Active: return "active";
        case SurfaceVariant::Passive: return "passive";
        case SurfaceVariant::Cleft: return "cleft";
        case SurfaceVariant::Epistemic: return "epistemic";
    }
    return "?";
}

// Canonical event tuple with surface names resolved. `object2` is set only
// for exchange; `counterparty` is empty for init/break/repair.
struct EventSurface {
    EventKind kind{};
    std::string actor;
    std::string counterparty;
    std::string object;   // bare noun phrase, no article
    std::string object2;

    friend bool operator==(const EventSurface&, const EventSurface&) = default;
};

// Object state with surface names resolved.
struct StateNames {
    std::string owner;
    std::string possessor;
    bool intact{true};

    friend bool operator==(const StateNames&, const StateNames&) = default;
};

namespace grammar {

inline std::string_view verb_3sg(EventKind k) {
    switch (k) {
        case EventKind::Own: return "owns";
        case EventKind::Create: return "creates";
        case EventKind::Gift: return "gives";
        case EventKind::Sale: return "sells";
        case EventKind::Exchange: return "exchanges";
        case EventKind::Loan: return "lends";
        case EventKind::Return: return "returns";
        case EventKind::Break: return "breaks";
        case EventKind::Repair: return "repairs";
    }
    return "?";
}

inline std::string_view verb_inf(EventKind k) {
    switch (k) {
        case EventKind::Own: return "own";
        case EventKind::Create: return "create";
        case EventKind::Gift: return "give";
        case EventKind::Sale: return "sell";
        case EventKind::Exchange: return "exchange";
        case EventKind::Loan: return "lend";
        case EventKind::Return: return "return";
        case EventKind::Break: return "break";
        case EventKind::Repair: return "repair";
    }
    return "?";
}

inline std::string_view verb_participle(EventKind k) {
    switch (k) {
        case EventKind::Own: return "owned";
        case EventKind::Create: return "created";
        case EventKind::Gift: return "given";
        case EventKind::Sale: return "sold";
        case EventKind::Exchange: return "exchanged";
        case EventKind::Loan: return "lent";
        case EventKind::Return: return "returned";
        case EventKind::Break: return "broken";
        case EventKind::Repair: return "repaired";
    }
    return "?";
}

// Active verb phrase without the actor: "gives the red ball to Bob".
inline std::string active_vp(const EventSurface& e, bool infinitive) {
    std::string vp(infinitive ? verb_inf(e.kind) : verb_3sg(e.kind));
    switch (e.kind) {
        case EventKind::Own:
            return (infinitive ? "currently own the " : "currently owns the ") + e.object;
        case EventKind::Create:
        case EventKind::Break:
        case EventKind::Repair:
            return vp + " the " + e.object;
        case EventKind::Gift:
        case EventKind::Sale:
        case EventKind::Loan:
        case EventKind::Return:
            return vp + " the " + e.object + " to " + e.counterparty;
        case EventKind::Exchange:
            return vp + " the " + e.object + " with " + e.counterparty + " for the " + e.object2;
    }
    return vp;
}

}  // namespace grammar

// One sentence per (kind, variant), with a trailing period.
inline std::string render_event_sentence(const EventSurface& e, SurfaceVariant v) {
    using namespace grammar;
    switch (v) {
        case SurfaceVariant::Active:
            return e.actor + " " + active_vp(e, false) + ".";
        case SurfaceVariant::Cleft:
            return "It is " + e.actor + " who " + active_vp(e, false) + ".";
        case SurfaceVariant::Passive: {
            std::string s = "The " + e.object + " is ";
            switch (e.kind) {
                case EventKind::Own: return s + "owned by " + e.actor + ".";
                case EventKind::Create: return s + "created by " + e.actor + ".";
                case EventKind::Break: return s + "broken by " + e.actor + ".";
                case EventKind::Repair: return s + "repaired by " + e.actor + ".";
                case EventKind::Gift:
                case EventKind::Sale:
                case EventKind::Loan:
                case EventKind::Return:
                    return s + std::string(verb_participle(e.kind)) + " to " + e.counterparty +
                           " by " + e.actor + ".";
                case EventKind::Exchange:
                    return s + "exchanged with " + e.counterparty + " for the " + e.object2 +
                           " by " + e.actor + ".";
            }
            return s;
        }
        case SurfaceVariant::Epistemic:
            switch (e.kind) {
                case EventKind::Own:
                    return "It is known that " + e.actor + " owns the " + e.object + ".";
                case EventKind::Break:
                    return e.actor + " accidentally breaks the " + e.object + ".";
                default:
                    return e.actor + " decides to " + active_vp(e, true) + ".";
            }
    }
    return "";
}

// The canonical surface of an event given a name lookup, active voice.
inline EventSurface event_surface(const Graph& g, const DynamicEvent& e) {
    EventSurface s;
    s.kind = e.kind;
    s.actor = g.person_name(e.actor);
    if (e.counterparty) s.counterparty = g.person_name(*e.counterparty);
    s.object = g.object_name(e.objects[0]);
    if (e.objects.size() > 1) s.object2 = g.object_name(e.objects[1]);
    return s;
}

namespace grammar {

inline bool take_prefix(std::string_view& s, std::string_view lit) {
    if (s.substr(0, lit.size()) != lit) return false;
    s.remove_prefix(lit.size());
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\n' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\n' || s.back() == '\t' ||
                          s.back() == '.'))
        s.remove_suffix(1);
    return s;
}

// "{O} to {B}" tail for transfer verbs.
inline bool split_to(std::string_view rest, std::string& obj, std::string& cp) {
    const auto pos = rest.find(" to ");
    if (pos == std::string_view::npos) return false;
    obj = std::string(rest.substr(0, pos));
    cp = std::string(rest.substr(pos + 4));
    return !obj.empty() && !cp.empty();
}

// "{O1} with {B} for the {O2}" tail for exchange.
inline bool split_exchange(std::string_view rest, EventSurface& e) {
    const auto w = rest.find(" with ");
    if (w == std::string_view::npos) return false;
    e.object = std::string(rest.substr(0, w));
    rest.remove_prefix(w + 6);
    auto f = rest.find(" for the ");
    std::size_t skip = 9;
    if (f == std::string_view::npos) {
        f = rest.find(" for ");
        skip = 5;
    }
    if (f == std::string_view::npos) return false;
    e.counterparty = std::string(rest.substr(0, f));
    e.object2 = std::string(rest.substr(f + skip));
    return !e.object.empty() && !e.counterparty.empty() && !e.object2.empty();
}

// Verb phrase with the actor already removed; accepts 3sg and bare forms.
inline std::optional<EventSurface> parse_vp(std::string_view vp, const std::string& actor) {
    struct Pattern {
        std::string_view lead;
        EventKind kind;
        bool has_cp;
    };
    // Longer, more specific leads first.
    static const Pattern patterns[] = {
        {"currently owns the ", EventKind::Own, false},
        {"currently own the ", EventKind::Own, false},
        {"accidentally breaks the ", EventKind::Break, false},
        {"accidentally break the ", EventKind::Break, false},
        {"exchanges the ", EventKind::Exchange, true},
        {"exchange the ", EventKind::Exchange, true},
        {"gives the ", EventKind::Gift, true},
        {"give the ", EventKind::Gift, true},
        {"sells the ", EventKind::Sale, true},
        {"sell the ", EventKind::Sale, true},
        {"lends the ", EventKind::Loan, true},
        {"lend the ", EventKind::Loan, true},
        {"returns the ", EventKind::Return, true},
        {"return the ", EventKind::Return, true},
        {"breaks the ", EventKind::Break, false},
        {"break the ", EventKind::Break, false},
        {"repairs the ", EventKind::Repair, false},
        {"repair the ", EventKind::Repair, false},
        {"creates the ", EventKind::Create, false},
        {"create the ", EventKind::Create, false},
        {"owns and possesses the ", EventKind::Own, false},
        {"own and possess the ", EventKind::Own, false},
        {"owns the ", EventKind::Own, false},
        {"own the ", EventKind::Own, false},
    };
    for (const auto& p : patterns) {
        std::string_view rest = vp;
        if (!take_prefix(rest, p.lead)) continue;
        EventSurface e;
        e.kind = p.kind;
        e.actor = actor;
        if (p.kind == EventKind::Exchange) {
            if (!split_exchange(rest, e)) return std::nullopt;
        } else if (p.has_cp) {
            if (!split_to(rest, e.object, e.counterparty)) return std::nullopt;
        } else {
            if (rest.empty()) return std::nullopt;
            e.object = std::string(rest);
        }
        return e;
    }
    return std::nullopt;
}

inline std::optional<EventSurface> parse_passive(std::string_view s) {
    if (!take_prefix(s, "The ")) return std::nullopt;
    const auto is_pos = s.find(" is ");
    if (is_pos == std::string_view::npos) return std::nullopt;
    EventSurface e;
    e.object = std::string(s.substr(0, is_pos));
    std::string_view rest = s.substr(is_pos + 4);
    take_prefix(rest, "currently ");

    struct Pattern {
        std::string_view lead;
        EventKind kind;
        bool has_cp;
    };
    static const Pattern patterns[] = {
        {"owned by ", EventKind::Own, false},
        {"created by ", EventKind::Create, false},
        {"broken by ", EventKind::Break, false},
        {"repaired by ", EventKind::Repair, false},
        {"given to ", EventKind::Gift, true},
        {"sold to ", EventKind::Sale, true},
        {"lent to ", EventKind::Loan, true},
        {"returned to ", EventKind::Return, true},
    };
    for (const auto& p : patterns) {
        std::string_view r = rest;
        if (!take_prefix(r, p.lead)) continue;
        e.kind = p.kind;
        if (p.has_cp) {
            const auto by = r.rfind(" by ");
            if (by == std::string_view::npos) return std::nullopt;
            e.counterparty = std::string(r.substr(0, by));
            e.actor = std::string(r.substr(by + 4));
        } else {
            e.actor = std::string(r);
        }
        if (e.actor.empty()) return std::nullopt;
        return e;
    }
    // "The {O1} is exchanged with {B} for the {O2} by {A}."
    std::string_view r = rest;
    if (take_prefix(r, "exchanged with ")) {
        e.kind = EventKind::Exchange;
        auto f = r.find(" for the ");
        std::size_t skip = 9;
        if (f == std::string_view::npos) {
            f = r.find(" for ");
            skip = 5;
        }
        if (f == std::string_view::npos) return std::nullopt;
        e.counterparty = std::string(r.substr(0, f));
        r.remove_prefix(f + skip);
        const auto by = r.rfind(" by ");
        if (by == std::string_view::npos) return std::nullopt;
        e.object2 = std::string(r.substr(0, by));
        e.actor = std::string(r.substr(by + 4));
        if (e.actor.empty() || e.object2.empty()) return std::nullopt;
        return e;
    }
    return std::nullopt;
}

}  // namespace grammar

// Recovers the canonical tuple from any surface variant. Returns nullopt for
// text that is not an event sentence.
inline std::optional<EventSurface> parse_event_sentence(std::string_view text) {
    using namespace grammar;
    std::string_view s = trim(text);
    if (s.empty()) return std::nullopt;

    if (std::string_view t = s; take_prefix(t, "It is known that ")) {
        const auto v = t.find(" owns the ");
        const auto v2 = v == std::string_view::npos ? t.find(" own the ") : v;
        if (v2 == std::string_view::npos) return std::nullopt;
        return parse_vp(t.substr(v2 + 1), std::string(t.substr(0, v2)));
    }
    if (std::string_view t = s; take_prefix(t, "It is ")) {
        const auto who = t.find(" who ");
        if (who == std::string_view::npos) return std::nullopt;
        return parse_vp(t.substr(who + 5), std::string(t.substr(0, who)));
    }
    if (s.substr(0, 4) == "The ") {
        if (auto e = grammar::parse_passive(s)) return e;
    }
    for (std::string_view marker : {" decides to ", " decide to "}) {
        const auto pos = s.find(marker);
        if (pos != std::string_view::npos)
            return parse_vp(s.substr(pos + marker.size()), std::string(s.substr(0, pos)));
    }
    // Active: the actor ends where a known verb phrase begins. Scan word
    // boundaries; person names never contain verb tokens.
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != ' ') continue;
        if (auto e = parse_vp(s.substr(i + 1), std::string(s.substr(0, i)))) return e;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Kinship fact sentences. Four frames for basic facts; the same four frames
// serve composite-relation mentions in questions.

inline std::string render_fact_sentence(const std::string& subject, std::string_view relation,
                                        const std::string& object, int frame) {
    const std::string rel(relation);
    switch (frame & 3) {
        case 0: return subject + " is the " + rel + " of " + object + ".";
        case 1: return subject + " holds the relation of " + rel + " to " + object + ".";
        case 2: return subject + " acts in the role of " + rel + " to " + object + ".";
        default: return subject + " serves as " + object + "'s " + rel + ".";
    }
}

// Composite-rule mention for question text ("holds the great-aunt relation to").
inline std::string render_rule_sentence(const std::string& subject, std::string_view rule,
                                        const std::string& object, int frame) {
    const std::string r(rule);
    switch (frame & 3) {
        case 0: return subject + " is the " + r + " of " + object + ".";
        case 1: return subject + " holds the " + r + " relation to " + object + ".";
        case 2: return subject + " acts as the " + r + " of " + object + ".";
        default: return subject + " serves as " + object + "'s " + r + ".";
    }
}

struct FactSurface {
    std::string subject;
    std::string relation;  // basic relation or composite rule label
    std::string object;

    friend bool operator==(const FactSurface&, const FactSurface&) = default;
};

inline std::optional<FactSurface> parse_fact_sentence(std::string_view text) {
    using namespace grammar;
    std::string_view s = trim(text);
    FactSurface f;
    for (auto [lead, tail] : {std::pair<std::string_view, std::string_view>{" holds the relation of ", " to "},
                              {" acts in the role of ", " to "},
                              {" is the ", " of "},
                              {" acts as the ", " of "}}) {
        const auto a = s.find(lead);
        if (a == std::string_view::npos) continue;
        std::string_view rest = s.substr(a + lead.size());
        const auto b = rest.find(tail);
        if (b == std::string_view::npos) continue;
        f.subject = std::string(s.substr(0, a));
        f.relation = std::string(rest.substr(0, b));
        f.object = std::string(rest.substr(b + tail.size()));
        return f;
    }
    // "{A} holds the {r} relation to {B}."
    if (const auto a = s.find(" holds the "); a != std::string_view::npos) {
        std::string_view rest = s.substr(a + 11);
        const auto b = rest.find(" relation to ");
        if (b != std::string_view::npos) {
            f.subject = std::string(s.substr(0, a));
            f.relation = std::string(rest.substr(0, b));
            f.object = std::string(rest.substr(b + 13));
            return f;
        }
    }
    // "{A} serves as {B}'s {r}."
    if (const auto a = s.find(" serves as "); a != std::string_view::npos) {
        std::string_view rest = s.substr(a + 11);
        const auto b = rest.rfind("'s ");
        if (b != std::string_view::npos) {
            f.subject = std::string(s.substr(0, a));
            f.object = std::string(rest.substr(0, b));
            f.relation = std::string(rest.substr(b + 3));
            return f;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// State clauses used in solution text.

// "{P} owns and possesses the {O}" or "{U} owns the {O}, {V} possesses the {O}",
// with an "(intact)"/"(broken)" suffix.
inline std::string render_state_clause(const StateNames& st, const std::string& object) {
    std::string s;
    if (st.owner == st.possessor) {
        s = st.owner + " owns and possesses the " + object;
    } else {
        s = st.owner + " owns the " + object + ", " + st.possessor + " possesses the " + object;
    }
    s += st.intact ? " (intact)" : " (broken)";
    return s;
}

struct ParsedState {
    StateNames state;
    std::string object;
};

inline std::optional<ParsedState> parse_state_clause(std::string_view text) {
    using namespace grammar;
    std::string_view s = trim(text);
    ParsedState out;
    if (const auto g = s.rfind("(intact)"); g != std::string_view::npos) {
        out.state.intact = true;
        s = trim(s.substr(0, g));
    } else if (const auto b = s.rfind("(broken)"); b != std::string_view::npos) {
        out.state.intact = false;
        s = trim(s.substr(0, b));
    } else {
        return std::nullopt;
    }

    for (std::string_view both : {" owns and possesses the ", " own and possess the "}) {
        const auto p = s.find(both);
        if (p == std::string_view::npos) continue;
        out.state.owner = out.state.possessor = std::string(s.substr(0, p));
        out.object = std::string(s.substr(p + both.size()));
        return out.object.empty() ? std::nullopt : std::optional(out);
    }

    const auto comma = s.find(", ");
    if (comma == std::string_view::npos) return std::nullopt;
    std::string_view left = s.substr(0, comma);
    std::string_view right = s.substr(comma + 2);
    std::string obj_l, obj_r;
    for (std::string_view ownv : {" owns the ", " own the "}) {
        const auto p = left.find(ownv);
        if (p == std::string_view::npos) continue;
        out.state.owner = std::string(left.substr(0, p));
        obj_l = std::string(left.substr(p + ownv.size()));
        break;
    }
    for (std::string_view possv : {" possesses the ", " possess the "}) {
        const auto p = right.find(possv);
        if (p == std::string_view::npos) continue;
        out.state.possessor = std::string(right.substr(0, p));
        obj_r = std::string(right.substr(p + possv.size()));
        break;
    }
    if (out.state.owner.empty() || out.state.possessor.empty() || obj_l.empty() || obj_l != obj_r)
        return std::nullopt;
    out.object = obj_l;
    return out;
}

inline std::string ordinal(int n) {
    const int mod100 = n % 100;
    const int mod10 = n % 10;
    const char* suffix = "th";
    if (mod100 < 11 || mod100 > 13) {
        if (mod10 == 1) suffix = "st";
        else if (mod10 == 2) suffix = "nd";
        else if (mod10 == 3) suffix = "rd";
    }
    return std::to_string(n) + suffix;
}

}  // namespace kgr
