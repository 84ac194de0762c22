// SPDX-License-Identifier: Apache-2.0
//
// File formats: versioned JSONL schemas for graphs, tasks, verdicts, reports
// and streams, the split-manifest config, machine-readable rule/preset/recipe
// tables, and the content hash used by determinism checks. All emissions are
// deterministic: keys are ordered, floats print shortest-round-trip.
#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kgr/core.hpp"
#include "kgr/generator.hpp"
#include "kgr/metrics.hpp"
#include "kgr/recipes.hpp"
#include "kgr/renderer.hpp"
#include "kgr/traces.hpp"
#include "kgr/verifier.hpp"

namespace kgr {

using nlohmann::json;

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace schema {
inline constexpr const char* graph = "kgr.graph/1";
inline constexpr const char* task = "kgr.task/1";
inline constexpr const char* response = "kgr.response/1";
inline constexpr const char* verdict = "kgr.verdict/1";
inline constexpr const char* report = "kgr.report/1";
inline constexpr const char* stream = "kgr.stream/1";
inline constexpr const char* story = "kgr.story/1";
inline constexpr const char* summary = "kgr.summary/1";
inline constexpr const char* tables = "kgr.tables/1";
inline constexpr const char* reward_request = "kgr.reward_request/1";
inline constexpr const char* reward_response = "kgr.reward_response/1";
}  // namespace schema

// FNV-1a 64-bit; enough to pin byte-identical reruns.
class ContentHash {
public:
    void update(std::string_view bytes) {
        for (unsigned char c : bytes) {
            h_ ^= c;
            h_ *= 1099511628211ull;
        }
    }
    std::string hex() const {
        char buf[32];
        std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h_));
        return buf;
    }

private:
    std::uint64_t h_ = 14695981039346656037ull;
};

namespace io_detail {

inline std::string seed_to_string(std::uint64_t seed) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(seed));
    return buf;
}

inline std::uint64_t seed_from_json(const json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) return static_cast<std::uint64_t>(j.get<long long>());
    if (j.is_string()) return std::stoull(j.get<std::string>(), nullptr, 0);
    throw SchemaError("seed must be an integer or a string");
}

inline void require_version(const json& j, const char* expected, std::size_t line_no) {
    if (!j.contains("v") || !j["v"].is_string() || j["v"].get<std::string>() != expected)
        throw SchemaError("line " + std::to_string(line_no) + ": expected schema '" +
                          expected + "'");
}

}  // namespace io_detail

// Calls fn(parsed_object, line_number) per JSONL line after verifying the
// schema version. Errors carry line numbers.
template <class Fn>
inline void for_each_jsonl(std::istream& in, const char* expected_schema, Fn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
        io_detail::require_version(j, expected_schema, line_no);
        fn(j, line_no);
    }
}

// ---------------------------------------------------------------------------
// Graphs.

inline json to_json(const Graph& g) {
    json persons = json::array();
    for (const auto& p : g.persons) persons.push_back(p.full_name);
    json objects = json::array();
    for (const auto& o : g.objects) objects.push_back(o.surface_name);

    json events = json::array();
    for (const auto& e : g.dynamic_events) {
        json ev{{"t", e.time_index}, {"kind", std::string(to_string(e.kind))}, {"actor", e.actor}};
        if (e.counterparty) ev["cp"] = *e.counterparty;
        ev["objects"] = e.objects;
        events.push_back(std::move(ev));
    }
    json kinship = json::array();
    for (const auto& f : g.kinship_facts)
        kinship.push_back(json::array({f.subject, std::string(to_string(f.relation)), f.object}));

    json j{{"v", schema::graph},
           {"id", g.id},
           {"seed", io_detail::seed_to_string(g.seed)},
           {"depth", g.depth},
           {"complexity", g.complexity},
           {"name_pool", name_pool_label(g.name_pool)},
           {"persons", std::move(persons)},
           {"objects", std::move(objects)},
           {"chain_of_object", g.chain_of_object},
           {"target_object", g.target_object},
           {"events", std::move(events)},
           {"kinship", std::move(kinship)}};

    auto path_json = [](const std::vector<BasicRelation>& path) {
        json arr = json::array();
        for (auto r : path) arr.push_back(std::string(to_string(r)));
        return arr;
    };
    if (g.planted.has_inductive() || g.planted.has_analogy()) {
        json planted;
        if (g.planted.has_inductive()) {
            planted["rule"] = g.planted.rule;
            planted["path"] = path_json(g.planted.path);
            planted["supports"] = g.planted.supports;
        }
        if (g.planted.has_analogy()) {
            planted["analogy_rule"] = g.planted.analogy_rule;
            planted["analogy_path"] = path_json(g.planted.analogy_path);
            planted["analogy_chains"] = g.planted.analogy_chains;
        }
        j["planted"] = std::move(planted);
    }
    return j;
}

inline Graph graph_from_json(const json& j) {
    Graph g;
    g.id = j.at("id").get<std::string>();
    g.seed = io_detail::seed_from_json(j.at("seed"));
    g.depth = j.at("depth").get<int>();
    g.complexity = j.at("complexity").get<int>();
    g.name_pool = name_pool_from_label(j.at("name_pool").get<std::string>());
    int id = 0;
    for (const auto& name : j.at("persons")) g.persons.push_back({id++, name.get<std::string>()});
    id = 0;
    for (const auto& name : j.at("objects")) g.objects.push_back({id++, name.get<std::string>()});
    g.chain_of_object = j.at("chain_of_object").get<std::vector<int>>();
    g.target_object = j.at("target_object").get<int>();
    for (const auto& ev : j.at("events")) {
        DynamicEvent e;
        e.time_index = ev.at("t").get<int>();
        const auto kind = event_kind_from_string(ev.at("kind").get<std::string>());
        if (!kind) throw SchemaError("unknown event kind " + ev.at("kind").get<std::string>());
        e.kind = *kind;
        e.actor = ev.at("actor").get<int>();
        if (ev.contains("cp")) e.counterparty = ev.at("cp").get<int>();
        e.objects = ev.at("objects").get<std::vector<int>>();
        g.dynamic_events.push_back(std::move(e));
    }
    for (const auto& f : j.at("kinship")) {
        const auto rel = relation_from_string(f.at(1).get<std::string>());
        if (!rel) throw SchemaError("unknown relation " + f.at(1).get<std::string>());
        g.kinship_facts.push_back({f.at(0).get<int>(), *rel, f.at(2).get<int>()});
    }
    auto path_from = [](const json& arr) {
        std::vector<BasicRelation> path;
        for (const auto& w : arr) {
            const auto rel = relation_from_string(w.get<std::string>());
            if (!rel) throw SchemaError("unknown relation " + w.get<std::string>());
            path.push_back(*rel);
        }
        return path;
    };
    if (j.contains("planted")) {
        const auto& p = j["planted"];
        if (p.contains("rule")) {
            g.planted.rule = p.at("rule").get<std::string>();
            g.planted.path = path_from(p.at("path"));
            g.planted.supports = p.at("supports").get<std::vector<std::vector<int>>>();
        }
        if (p.contains("analogy_rule")) {
            g.planted.analogy_rule = p.at("analogy_rule").get<std::string>();
            g.planted.analogy_path = path_from(p.at("analogy_path"));
            g.planted.analogy_chains = p.at("analogy_chains").get<std::vector<std::vector<int>>>();
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Stories.

inline json story_to_json(const std::string& graph_id, const StoryDoc& doc) {
    json sentences = json::array();
    for (const auto& s : doc.sentences)
        sentences.push_back(json{
            {"stream", s.stream == StorySentence::Stream::Dynamic ? "dynamic" : "static"},
            {"text", s.text}});
    json j{{"v", schema::story},
           {"graph_id", graph_id},
           {"sentences", std::move(sentences)},
           {"text", doc.text()}};
    if (!doc.omitted_elements.empty()) j["omitted"] = doc.omitted_elements;
    return j;
}

// ---------------------------------------------------------------------------
// Task instances.

inline json to_json(const StateNames& s) {
    return json{{"owner", s.owner}, {"possessor", s.possessor}, {"intact", s.intact}};
}

inline StateNames state_from_json(const json& j) {
    return {j.at("owner").get<std::string>(), j.at("possessor").get<std::string>(),
            j.at("intact").get<bool>()};
}

inline json to_json(const EventSurface& e) {
    json j{{"kind", std::string(to_string(e.kind))}, {"actor", e.actor}, {"object", e.object}};
    if (!e.counterparty.empty()) j["cp"] = e.counterparty;
    if (!e.object2.empty()) j["object2"] = e.object2;
    return j;
}

inline EventSurface event_surface_from_json(const json& j) {
    EventSurface e;
    const auto kind = event_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw SchemaError("unknown event kind");
    e.kind = *kind;
    e.actor = j.at("actor").get<std::string>();
    e.object = j.at("object").get<std::string>();
    if (j.contains("cp")) e.counterparty = j.at("cp").get<std::string>();
    if (j.contains("object2")) e.object2 = j.at("object2").get<std::string>();
    return e;
}

namespace io_detail {

inline json path_to_json(const std::vector<BasicRelation>& path) {
    json arr = json::array();
    for (auto r : path) arr.push_back(std::string(to_string(r)));
    return arr;
}

inline std::vector<BasicRelation> path_from_json(const json& arr) {
    std::vector<BasicRelation> path;
    for (const auto& w : arr) {
        const auto rel = relation_from_string(w.get<std::string>());
        if (!rel) throw SchemaError("unknown relation in path");
        path.push_back(*rel);
    }
    return path;
}

inline const char* gap_site_label(AbductiveTrace::GapSite s) {
    switch (s) {
        case AbductiveTrace::GapSite::None: return "none";
        case AbductiveTrace::GapSite::Interior: return "interior";
        case AbductiveTrace::GapSite::BeforeFirstStep: return "before_first_step";
        case AbductiveTrace::GapSite::AfterLastStep: return "after_last_step";
    }
    return "none";
}

inline AbductiveTrace::GapSite gap_site_from_label(const std::string& s) {
    if (s == "interior") return AbductiveTrace::GapSite::Interior;
    if (s == "before_first_step") return AbductiveTrace::GapSite::BeforeFirstStep;
    if (s == "after_last_step") return AbductiveTrace::GapSite::AfterLastStep;
    return AbductiveTrace::GapSite::None;
}

}  // namespace io_detail

inline json trace_to_json(const GoldTrace& trace) {
    using namespace io_detail;
    json j;
    if (const auto* t = std::get_if<DeductiveTrace>(&trace)) {
        j["object"] = t->object_name;
        j["initial"] = to_json(t->initial);
        json steps = json::array();
        for (const auto& s : t->steps)
            steps.push_back(json{{"event", to_json(s.event)}, {"after", to_json(s.after)}});
        j["steps"] = std::move(steps);
        j["slot"] = std::string(to_string(t->slot));
        j["mode"] = std::string(to_string(t->mode));
        j["k"] = t->query_index;
    } else if (const auto* t = std::get_if<AbductiveTrace>(&trace)) {
        j["mode"] = std::string(to_string(t->mode));
        j["gap_site"] = gap_site_label(t->gap_site);
        j["object"] = t->object_name;
        json steps = json::array();
        for (const auto& s : t->back_steps)
            steps.push_back(json{{"event", to_json(s.event)},
                                 {"before", to_json(s.before)},
                                 {"after", to_json(s.after)}});
        j["back_steps"] = std::move(steps);
        if (t->initial_shown) j["initial_shown"] = to_json(*t->initial_shown);
        if (t->gap_before) j["gap_before"] = to_json(*t->gap_before);
        if (t->gap_after) j["gap_after"] = to_json(*t->gap_after);
        if (t->required_initial) j["required_initial"] = to_json(*t->required_initial);
        j["masked"] = to_json(t->masked);
    } else if (const auto* t = std::get_if<InductiveTrace>(&trace)) {
        j["supports"] = t->supports;
        j["path"] = path_to_json(t->path);
        j["rule"] = t->rule;
        j["query"] = t->query_persons;
    } else if (const auto* t = std::get_if<AnalogyTrace>(&trace)) {
        j["path"] = path_to_json(t->path);
        j["rule"] = t->rule;
        j["source"] = t->source_chain;
        j["target"] = t->target_chain;
    }
    return j;
}

inline GoldTrace trace_from_json(Family family, const json& j) {
    using namespace io_detail;
    switch (family) {
        case Family::Deductive: {
            DeductiveTrace t;
            t.object_name = j.at("object").get<std::string>();
            t.initial = state_from_json(j.at("initial"));
            for (const auto& s : j.at("steps"))
                t.steps.push_back(
                    {event_surface_from_json(s.at("event")), state_from_json(s.at("after"))});
            t.slot = j.at("slot") == "owner" ? Slot::Owner
                     : j.at("slot") == "possessor" ? Slot::Possessor
                                                   : Slot::Integrity;
            t.mode = j.at("mode") == "hard" ? QueryMode::Hard : QueryMode::FullInfo;
            t.query_index = j.at("k").get<int>();
            return t;
        }
        case Family::Abductive: {
            AbductiveTrace t;
            t.mode = j.at("mode") == "mask_one_initial_fact" ? MaskMode::MaskOneInitialFact
                                                             : MaskMode::MaskOneEvent;
            t.gap_site = gap_site_from_label(j.value("gap_site", "none"));
            t.object_name = j.at("object").get<std::string>();
            for (const auto& s : j.at("back_steps"))
                t.back_steps.push_back({event_surface_from_json(s.at("event")),
                                        state_from_json(s.at("before")),
                                        state_from_json(s.at("after"))});
            if (j.contains("initial_shown")) t.initial_shown = state_from_json(j["initial_shown"]);
            if (j.contains("gap_before")) t.gap_before = state_from_json(j["gap_before"]);
            if (j.contains("gap_after")) t.gap_after = state_from_json(j["gap_after"]);
            if (j.contains("required_initial"))
                t.required_initial = state_from_json(j["required_initial"]);
            t.masked = event_surface_from_json(j.at("masked"));
            return t;
        }
        case Family::Inductive: {
            InductiveTrace t;
            t.supports = j.at("supports").get<std::vector<std::vector<std::string>>>();
            t.path = path_from_json(j.at("path"));
            t.rule = j.at("rule").get<std::string>();
            t.query_persons = j.at("query").get<std::vector<std::string>>();
            return t;
        }
        case Family::Analogy: {
            AnalogyTrace t;
            t.path = path_from_json(j.at("path"));
            t.rule = j.at("rule").get<std::string>();
            t.source_chain = j.at("source").get<std::vector<std::string>>();
            t.target_chain = j.at("target").get<std::vector<std::string>>();
            return t;
        }
    }
    throw SchemaError("unknown family");
}

inline json to_json(const TaskInstance& x) {
    json j{{"v", schema::task},
           {"id", x.id},
           {"family", std::string(to_string(x.family))},
           {"form", x.form},
           {"question", x.question},
           {"gold_trace", trace_to_json(x.gold_trace)},
           {"gold_answer", x.gold_answer},
           {"depth", x.depth},
           {"complexity", x.complexity},
           {"graph_id", x.graph_id}};
    if (!x.story.empty()) j["story"] = x.story;
    return j;
}

inline TaskInstance task_from_json(const json& j) {
    TaskInstance x;
    x.id = j.at("id").get<std::string>();
    const auto family = family_from_string(j.at("family").get<std::string>());
    if (!family) throw SchemaError("unknown family " + j.at("family").get<std::string>());
    x.family = *family;
    x.form = j.at("form").get<std::string>();
    x.question = j.at("question").get<std::string>();
    x.gold_trace = trace_from_json(x.family, j.at("gold_trace"));
    x.gold_answer = j.at("gold_answer").get<std::string>();
    x.depth = j.at("depth").get<int>();
    x.complexity = j.at("complexity").get<int>();
    x.graph_id = j.at("graph_id").get<std::string>();
    x.story = j.value("story", "");
    return x;
}

// ---------------------------------------------------------------------------
// Verdicts and reports.

inline json verdict_to_json(const std::string& id, const TaskInstance& x, const Verdict& v,
                            const std::string& recipe) {
    json j{{"v", schema::verdict},
           {"id", id},
           {"family", std::string(to_string(x.family))},
           {"depth", x.depth},
           {"complexity", x.complexity},
           {"A", v.answer_match},
           {"P", v.process_match},
           {"reward", v.reward},
           {"correct", v.answer_match == 1 && v.process_match == 1}};
    if (!recipe.empty()) j["recipe"] = recipe;
    if (!v.diagnostics.empty()) j["diag"] = v.diagnostics;
    return j;
}

inline VerdictRecord verdict_record_from_json(const json& j) {
    VerdictRecord r;
    r.recipe = j.value("recipe", "");
    const auto family = family_from_string(j.at("family").get<std::string>());
    if (!family) throw SchemaError("unknown family");
    r.family = *family;
    r.depth = j.at("depth").get<int>();
    r.complexity = j.at("complexity").get<int>();
    r.instance_id = j.at("id").get<std::string>();
    r.correct = j.at("correct").get<bool>();
    return r;
}

inline json to_json(const GridReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        json pass;
        for (const auto& [k, v] : c.pass_at) pass[std::to_string(k)] = v;
        json jc{{"recipe", c.recipe},
                {"family", std::string(to_string(c.family))},
                {"depth", c.depth},
                {"complexity", c.complexity},
                {"instances", c.instances},
                {"samples", c.samples},
                {"pass_at", std::move(pass)}};
        if (c.sg) jc["sg"] = *c.sg;
        if (c.cg) jc["cg"] = *c.cg;
        if (c.in_recipe) jc["in_recipe"] = *c.in_recipe;
        cells.push_back(std::move(jc));
    }
    json j{{"v", schema::report}, {"cells", std::move(cells)}};
    if (!report.decoding.empty()) j["decoding"] = report.decoding;
    return j;
}

inline GridReport report_from_json(const json& j) {
    io_detail::require_version(j, schema::report, 0);
    GridReport report;
    report.decoding = j.value("decoding", "");
    for (const auto& jc : j.at("cells")) {
        CellReport c;
        c.recipe = jc.at("recipe").get<std::string>();
        const auto family = family_from_string(jc.at("family").get<std::string>());
        if (!family) throw SchemaError("unknown family in report");
        c.family = *family;
        c.depth = jc.at("depth").get<int>();
        c.complexity = jc.at("complexity").get<int>();
        c.instances = jc.at("instances").get<long long>();
        c.samples = jc.at("samples").get<long long>();
        for (const auto& [k, v] : jc.at("pass_at").items())
            c.pass_at[std::stoi(k)] = v.get<double>();
        if (jc.contains("sg")) c.sg = jc["sg"].get<double>();
        if (jc.contains("cg")) c.cg = jc["cg"].get<double>();
        if (jc.contains("in_recipe")) c.in_recipe = jc["in_recipe"].get<bool>();
        report.cells.push_back(std::move(c));
    }
    return report;
}

inline std::string report_to_csv(const GridReport& report) {
    std::ostringstream out;
    std::vector<int> ks;
    if (!report.cells.empty())
        for (const auto& [k, v] : report.cells.front().pass_at) ks.push_back(k);
    out << "recipe,family,depth,complexity,instances,samples";
    for (int k : ks) out << ",pass@" << k;
    out << ",sg,cg,in_recipe\n";
    for (const auto& c : report.cells) {
        out << c.recipe << ',' << to_string(c.family) << ',' << c.depth << ',' << c.complexity
            << ',' << c.instances << ',' << c.samples;
        for (int k : ks) {
            out << ',';
            if (c.pass_at.count(k)) out << json(c.pass_at.at(k)).dump();
        }
        out << ',';
        if (c.sg) out << json(*c.sg).dump();
        out << ',';
        if (c.cg) out << json(*c.cg).dump();
        out << ',';
        if (c.in_recipe) out << (*c.in_recipe ? "true" : "false");
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Split manifests.

inline RuleDistribution rule_distribution_from_label(const std::string& s) {
    if (s == "pretrain") return RuleDistribution::Pretrain;
    if (s == "eval") return RuleDistribution::Eval;
    if (s == "rl") return RuleDistribution::Rl;
    throw SchemaError("unknown rule_distribution: " + s);
}

inline const char* rule_distribution_label(RuleDistribution d) {
    switch (d) {
        case RuleDistribution::Pretrain: return "pretrain";
        case RuleDistribution::Eval: return "eval";
        case RuleDistribution::Rl: return "rl";
    }
    return "rl";
}

// Accepts either an explicit cell list or a grid block, or a builtin split
// name with an optional per-cell count override.
inline SplitManifest manifest_from_json(const json& j) {
    if (j.contains("builtin")) {
        const std::string which = j.at("builtin").get<std::string>();
        const std::uint64_t seed =
            j.contains("seed") ? io_detail::seed_from_json(j["seed"]) : 0;
        SplitManifest m;
        if (which == "pretrain") m = pretrain_manifest(seed);
        else if (which == "rl") m = rl_pool_manifest(seed);
        else if (which == "eval") m = eval_manifest(seed);
        else throw SchemaError("unknown builtin split: " + which);
        if (j.contains("count"))
            for (auto& c : m.cells) c.count = j["count"].get<long long>();
        return m;
    }
    SplitManifest m;
    m.name = j.at("name").get<std::string>();
    m.seed = io_detail::seed_from_json(j.at("seed"));
    m.name_pool = name_pool_from_label(j.value("name_pool", "rl"));
    m.rule_distribution = rule_distribution_from_label(j.value("rule_distribution", "rl"));
    if (j.contains("cells")) {
        for (const auto& c : j["cells"])
            m.cells.push_back({c.at("depth").get<int>(), c.at("complexity").get<int>(),
                               c.at("count").get<long long>()});
    } else if (j.contains("grid")) {
        const auto& grid = j["grid"];
        const auto d = grid.at("depth").get<std::vector<int>>();
        const auto t = grid.at("complexity").get<std::vector<int>>();
        const long long count = grid.at("count").get<long long>();
        for (int dd = d.at(0); dd <= d.at(1); ++dd)
            for (int tt = t.at(0); tt <= t.at(1); ++tt) m.cells.push_back({dd, tt, count});
    } else {
        throw SchemaError("manifest needs 'cells', 'grid', or 'builtin'");
    }
    return m;
}

inline json manifest_to_json(const SplitManifest& m) {
    json cells = json::array();
    for (const auto& c : m.cells)
        cells.push_back(json{{"depth", c.depth}, {"complexity", c.complexity}, {"count", c.count}});
    return json{{"name", m.name},
                {"seed", io_detail::seed_to_string(m.seed)},
                {"name_pool", name_pool_label(m.name_pool)},
                {"rule_distribution", rule_distribution_label(m.rule_distribution)},
                {"cells", std::move(cells)}};
}

// ---------------------------------------------------------------------------
// Machine-readable tables: one source of truth for tests and docs.

// Surface templates derived from the renderer itself by placeholder
// substitution, so the data file cannot drift from the code.
inline json grammar_to_json() {
    json events;
    for (auto kind : kEventKinds) {
        EventSurface e{kind, "{actor}", "{counterparty}", "{object}", ""};
        if (is_init(kind) || kind == EventKind::Break || kind == EventKind::Repair)
            e.counterparty.clear();
        if (kind == EventKind::Exchange) e.object2 = "{object2}";
        json variants;
        for (auto v : kSurfaceVariants)
            variants[std::string(to_string(v))] = render_event_sentence(e, v);
        events[std::string(to_string(kind))] = std::move(variants);
    }
    json fact_frames = json::array();
    json rule_frames = json::array();
    for (int f = 0; f < 4; ++f) {
        fact_frames.push_back(render_fact_sentence("{subject}", "{relation}", "{object}", f));
        rule_frames.push_back(render_rule_sentence("{subject}", "{rule}", "{object}", f));
    }
    json states = json::array();
    states.push_back(render_state_clause({"{owner}", "{owner}", true}, "{object}"));
    states.push_back(render_state_clause({"{owner}", "{possessor}", false}, "{object}"));
    return json{{"event_sentences", std::move(events)},
                {"kinship_frames", std::move(fact_frames)},
                {"rule_mention_frames", std::move(rule_frames)},
                {"state_clauses", std::move(states)}};
}

inline json tables_to_json() {
    json rules = json::array();
    for (const auto& r : composite_rules()) {
        json path = json::array();
        for (auto w : r.path) path.push_back(std::string(to_string(w)));
        rules.push_back(json{{"name", r.name}, {"hop", r.hop()}, {"path", std::move(path)}});
    }
    json groups = json::array();
    for (const auto& g : frequency_groups())
        groups.push_back(json{{"group", std::string(1, g.group)},
                              {"weight", g.weight},
                              {"members", g.members}});
    json presets = json::array();
    for (const auto& p : complexity_presets()) {
        json chains;
        for (const auto& [k, prob] : p.chain_distribution) chains[std::to_string(k)] = prob;
        presets.push_back(json{{"level", p.level},
                               {"chains", std::move(chains)},
                               {"persons", json::array({p.person_lo, p.person_hi})},
                               {"crossover", p.crossover_rate},
                               {"exchange", p.exchange_rate}});
    }
    json recipes = json::array();
    for (const auto& r : builtin_recipes()) {
        json cells = json::array();
        for (const auto& [d, t] : r.cells) cells.push_back(json::array({d, t}));
        json budget;
        for (const auto& [family, b] : r.family_budget)
            budget[std::string(to_string(family))] = b;
        recipes.push_back(json{{"name", r.name},
                               {"cell_count", r.cells.size()},
                               {"cells", std::move(cells)},
                               {"budget", std::move(budget)}});
    }
    return json{{"v", schema::tables},
                {"composite_rules", std::move(rules)},
                {"frequency_groups", std::move(groups)},
                {"complexity_presets", std::move(presets)},
                {"recipes", std::move(recipes)},
                {"surface_grammar", grammar_to_json()}};
}

}  // namespace kgr
