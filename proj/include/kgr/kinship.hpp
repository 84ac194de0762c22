// SPDX-License-Identifier: Apache-2.0
//
// Static kinship component: basic relation vocabulary, inverse closure,
// composite rules with canonical composition paths, frequency groups, and
// path composition over a closed fact set.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgr/rng.hpp"

namespace kgr {

using PersonId = int;

enum class BasicRelation {
    Father,
    Mother,
    Son,
    Daughter,
    Husband,
    Wife,
    Brother,
    Sister,
    Friend,
};

inline constexpr std::array<BasicRelation, 9> kBasicRelations = {
    BasicRelation::Father,  BasicRelation::Mother, BasicRelation::Son,
    BasicRelation::Daughter, BasicRelation::Husband, BasicRelation::Wife,
    BasicRelation::Brother, BasicRelation::Sister, BasicRelation::Friend,
};

inline std::string_view to_string(BasicRelation r) {
    switch (r) {
        case BasicRelation::Father: return "father";
        case BasicRelation::Mother: return "mother";
        case BasicRelation::Son: return "son";
        case BasicRelation::Daughter: return "daughter";
        case BasicRelation::Husband: return "husband";
        case BasicRelation::Wife: return "wife";
        case BasicRelation::Brother: return "brother";
        case BasicRelation::Sister: return "sister";
        case BasicRelation::Friend: return "friend";
    }
    return "?";
}

inline std::optional<BasicRelation> relation_from_string(std::string_view s) {
    for (auto r : kBasicRelations)
        if (to_string(r) == s) return r;
    return std::nullopt;
}

// A fact (subject, relation, object) reads "subject is the <relation> of object".
struct KinshipFact {
    PersonId subject{};
    BasicRelation relation{};
    PersonId object{};

    friend bool operator==(const KinshipFact&, const KinshipFact&) = default;
    friend auto operator<=>(const KinshipFact&, const KinshipFact&) = default;
};

struct CompositeRule {
    std::string name;
    std::vector<BasicRelation> path;

    int hop() const { return static_cast<int>(path.size()); }
};

// The 23 composite rules with their canonical composition paths.
inline const std::vector<CompositeRule>& composite_rules() {
    using R = BasicRelation;
    static const std::vector<CompositeRule> table = {
        {"grandmother", {R::Mother, R::Father}},
        {"grandfather", {R::Father, R::Father}},
        {"aunt", {R::Sister, R::Father}},
        {"uncle", {R::Brother, R::Father}},
        {"mother-in-law", {R::Mother, R::Husband}},
        {"father-in-law", {R::Father, R::Husband}},
        {"brother-in-law", {R::Brother, R::Husband}},
        {"sister-in-law", {R::Sister, R::Husband}},
        {"grandson", {R::Son, R::Son}},
        {"granddaughter", {R::Daughter, R::Son}},
        {"nephew", {R::Son, R::Brother}},
        {"niece", {R::Daughter, R::Brother}},
        {"son-in-law", {R::Husband, R::Daughter}},
        {"daughter-in-law", {R::Wife, R::Son}},
        {"great-grandfather", {R::Father, R::Father, R::Father}},
        {"great-grandmother", {R::Mother, R::Father, R::Father}},
        {"great-grandson", {R::Son, R::Son, R::Son}},
        {"great-granddaughter", {R::Daughter, R::Son, R::Son}},
        {"great-uncle", {R::Brother, R::Father, R::Father}},
        {"great-aunt", {R::Sister, R::Father, R::Father}},
        {"grand-nephew", {R::Son, R::Son, R::Brother}},
        {"grand-niece", {R::Daughter, R::Son, R::Brother}},
        {"cousin", {R::Son, R::Brother, R::Father}},
    };
    return table;
}

struct FrequencyGroup {
    char group;
    double weight;
    std::vector<std::string> members;
};

// Six-group frequency stratification of the 23 rules.
inline const std::vector<FrequencyGroup>& frequency_groups() {
    static const std::vector<FrequencyGroup> table = {
        {'A', 0.50, {"grandmother", "grandfather", "great-grandfather", "great-grandmother"}},
        {'B', 0.30, {"aunt", "uncle", "cousin", "grand-nephew"}},
        {'C', 0.15, {"mother-in-law", "brother-in-law", "grand-niece", "great-uncle"}},
        {'D', 0.04, {"grandson", "granddaughter", "great-grandson", "great-granddaughter"}},
        {'E', 0.01, {"nephew", "niece", "great-aunt"}},
        {'F', 0.00, {"son-in-law", "daughter-in-law", "sister-in-law", "father-in-law"}},
    };
    return table;
}

inline char group_of_rule(std::string_view rule_name) {
    for (const auto& g : frequency_groups())
        for (const auto& m : g.members)
            if (m == rule_name) return g.group;
    throw std::invalid_argument("unknown composite rule: " + std::string(rule_name));
}

inline const CompositeRule* find_rule(std::string_view name) {
    for (const auto& r : composite_rules())
        if (r.name == name) return &r;
    return nullptr;
}

// The unique rule whose canonical path equals `path`, if any.
inline const CompositeRule* rule_for_path(std::span<const BasicRelation> path) {
    for (const auto& r : composite_rules()) {
        if (r.path.size() == path.size() &&
            std::equal(r.path.begin(), r.path.end(), path.begin()))
            return &r;
    }
    return nullptr;
}

// Inverse candidates for a planted fact (a, w, b): relations w' such that
// (b, w', a) is an acceptable inverse. Gendered inverses are sampled; gender
// consistency across facts is deliberately not enforced.
inline std::vector<BasicRelation> inverse_candidates(BasicRelation r) {
    using R = BasicRelation;
    switch (r) {
        case R::Father:
        case R::Mother: return {R::Son, R::Daughter};
        case R::Son:
        case R::Daughter: return {R::Father, R::Mother};
        case R::Husband: return {R::Wife};
        case R::Wife: return {R::Husband};
        case R::Brother:
        case R::Sister: return {R::Brother, R::Sister};
        case R::Friend: return {R::Friend};
    }
    return {};
}

inline bool fact_exists(const std::vector<KinshipFact>& facts, const KinshipFact& f) {
    return std::find(facts.begin(), facts.end(), f) != facts.end();
}

// Ensures every fact has an inverse companion. Original facts are preserved;
// the operation is idempotent because an already-present inverse satisfies the
// closure test and nothing new is sampled for it.
inline std::vector<KinshipFact> close_under_inverse(std::vector<KinshipFact> facts, Rng& rng) {
    std::size_t i = 0;
    while (i < facts.size()) {
        const KinshipFact f = facts[i];
        const auto candidates = inverse_candidates(f.relation);
        bool satisfied = false;
        for (auto w : candidates) {
            if (fact_exists(facts, {f.object, w, f.subject})) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied)
            facts.push_back({f.object, candidates[rng.below(candidates.size())], f.subject});
        ++i;
    }
    return facts;
}

// All persons reachable from `start` by following `path` relations in order.
// Empty result means no realization; an empty path yields {start}.
inline std::vector<PersonId> compose_path(const std::vector<KinshipFact>& facts,
                                          PersonId start,
                                          std::span<const BasicRelation> path) {
    std::vector<PersonId> frontier = {start};
    for (auto rel : path) {
        std::vector<PersonId> next;
        for (PersonId p : frontier)
            for (const auto& f : facts)
                if (f.subject == p && f.relation == rel) next.push_back(f.object);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return frontier;
}

// Facts linking persons[0..hop] along the rule's path.
inline std::vector<KinshipFact> plant_rule_chain(const CompositeRule& rule,
                                                 std::span<const PersonId> persons) {
    if (persons.size() != rule.path.size() + 1)
        throw std::invalid_argument("plant_rule_chain: need hop+1 distinct persons for " + rule.name);
    std::vector<KinshipFact> facts;
    facts.reserve(rule.path.size());
    for (std::size_t i = 0; i < rule.path.size(); ++i)
        facts.push_back({persons[i], rule.path[i], persons[i + 1]});
    return facts;
}

// Rule sampling distributions per split family.
enum class RuleDistribution { Pretrain, Eval, Rl };

namespace detail {
inline const FrequencyGroup& sample_group(RuleDistribution dist, bool analogy, Rng& rng) {
    const auto& groups = frequency_groups();
    // Analogy draws only from groups A-C; inductive from A-E (Eval also F).
    const std::size_t limit = analogy ? 3 : (dist == RuleDistribution::Eval ? 6 : 5);
    if (dist == RuleDistribution::Pretrain) {
        double total = 0;
        for (std::size_t i = 0; i < limit; ++i) total += groups[i].weight;
        double x = rng.unit() * total;
        for (std::size_t i = 0; i < limit; ++i) {
            x -= groups[i].weight;
            if (x < 0) return groups[i];
        }
        return groups[limit - 1];
    }
    return groups[rng.below(limit)];
}
}  // namespace detail

// Sample a composite rule for an inductive task.
inline const CompositeRule& sample_rule(RuleDistribution dist, Rng& rng) {
    const auto& g = detail::sample_group(dist, /*analogy=*/false, rng);
    return *find_rule(g.members[rng.below(g.members.size())]);
}

// Sample a composite rule for an analogy task (groups A-C only).
inline const CompositeRule& sample_analogy_rule(RuleDistribution dist, Rng& rng) {
    const auto& g = detail::sample_group(dist, /*analogy=*/true, rng);
    return *find_rule(g.members[rng.below(g.members.size())]);
}

}  // namespace kgr
