// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "kgr/kinship.hpp"
#include "kgr/rng.hpp"
#include "worked_example.hpp"

using namespace kgr;
using R = BasicRelation;

TEST_CASE("closure inserts an inverse for every fact and is idempotent") {
    Rng rng(7);
    SECTION("sister pair") {
        const auto closed = close_under_inverse({{0, R::Sister, 1}}, rng);
        REQUIRE(closed.size() == 2);
        CHECK(closed[0] == KinshipFact{0, R::Sister, 1});
        CHECK(closed[1].subject == 1);
        CHECK(closed[1].object == 0);
        CHECK((closed[1].relation == R::Sister || closed[1].relation == R::Brother));
    }
    SECTION("empty set") {
        CHECK(close_under_inverse({}, rng).empty());
    }
    SECTION("father gains a sampled child inverse; re-closing changes nothing") {
        const auto once = close_under_inverse({{0, R::Father, 1}}, rng);
        REQUIRE(once.size() == 2);
        CHECK((once[1].relation == R::Son || once[1].relation == R::Daughter));
        Rng rng2(8);
        CHECK(close_under_inverse(once, rng2) == once);
    }
    SECTION("idempotence over random fact sets") {
        for (int i = 0; i < 50; ++i) {
            Rng r(mix_seed({21u, (std::uint64_t)i}));
            std::vector<KinshipFact> facts;
            for (int f = 0; f < 6; ++f) {
                const PersonId a = static_cast<PersonId>(r.below(8));
                PersonId b = static_cast<PersonId>(r.below(8));
                if (a == b) b = (b + 1) % 8;
                const auto rel = kBasicRelations[r.below(kBasicRelations.size())];
                if (!fact_exists(facts, {a, rel, b})) facts.push_back({a, rel, b});
            }
            auto once = close_under_inverse(facts, r);
            auto twice = close_under_inverse(once, r);
            CHECK(once == twice);
            // originals preserved, in order
            for (std::size_t k = 0; k < facts.size(); ++k) CHECK(once[k] == facts[k]);
        }
    }
}

TEST_CASE("compose_path follows the worked-example great-aunt realization") {
    const auto g = fixtures::worked_example();
    const std::vector<R> path = {R::Sister, R::Father, R::Mother};
    CHECK(compose_path(g.kinship_facts, fixtures::kAgnes, path) ==
          std::vector<PersonId>{fixtures::kAndrea});
    CHECK(compose_path(g.kinship_facts, fixtures::kEdward, path) ==
          std::vector<PersonId>{fixtures::kAndrew});
}

TEST_CASE("compose_path with an empty path is the identity") {
    CHECK(compose_path({}, 3, {}) == std::vector<PersonId>{3});
}

TEST_CASE("rule_for_path looks up canonical paths only") {
    const std::vector<R> grandfather = {R::Father, R::Father};
    REQUIRE(rule_for_path(grandfather) != nullptr);
    CHECK(rule_for_path(grandfather)->name == "grandfather");

    const std::vector<R> single = {R::Friend};
    CHECK(rule_for_path(single) == nullptr);

    std::set<std::string> seen;
    for (const auto& rule : composite_rules()) {
        const auto* found = rule_for_path(rule.path);
        REQUIRE(found != nullptr);
        CHECK(found->name == rule.name);
        CHECK(seen.insert(rule.name).second);
    }
    CHECK(seen.size() == 23);
}

TEST_CASE("the rule table matches the canonical 23 rows") {
    const auto& rules = composite_rules();
    REQUIRE(rules.size() == 23);
    int hop2 = 0, hop3 = 0;
    for (const auto& r : rules) (r.hop() == 2 ? hop2 : hop3)++;
    CHECK(hop2 == 14);
    CHECK(hop3 == 9);

    auto path_of = [&](const char* name) { return find_rule(name)->path; };
    CHECK(path_of("grandmother") == std::vector<R>{R::Mother, R::Father});
    CHECK(path_of("grandfather") == std::vector<R>{R::Father, R::Father});
    CHECK(path_of("aunt") == std::vector<R>{R::Sister, R::Father});
    CHECK(path_of("uncle") == std::vector<R>{R::Brother, R::Father});
    CHECK(path_of("mother-in-law") == std::vector<R>{R::Mother, R::Husband});
    CHECK(path_of("father-in-law") == std::vector<R>{R::Father, R::Husband});
    CHECK(path_of("brother-in-law") == std::vector<R>{R::Brother, R::Husband});
    CHECK(path_of("sister-in-law") == std::vector<R>{R::Sister, R::Husband});
    CHECK(path_of("grandson") == std::vector<R>{R::Son, R::Son});
    CHECK(path_of("granddaughter") == std::vector<R>{R::Daughter, R::Son});
    CHECK(path_of("nephew") == std::vector<R>{R::Son, R::Brother});
    CHECK(path_of("niece") == std::vector<R>{R::Daughter, R::Brother});
    CHECK(path_of("son-in-law") == std::vector<R>{R::Husband, R::Daughter});
    CHECK(path_of("daughter-in-law") == std::vector<R>{R::Wife, R::Son});
    CHECK(path_of("great-grandfather") == std::vector<R>{R::Father, R::Father, R::Father});
    CHECK(path_of("great-grandmother") == std::vector<R>{R::Mother, R::Father, R::Father});
    CHECK(path_of("great-grandson") == std::vector<R>{R::Son, R::Son, R::Son});
    CHECK(path_of("great-granddaughter") == std::vector<R>{R::Daughter, R::Son, R::Son});
    CHECK(path_of("great-uncle") == std::vector<R>{R::Brother, R::Father, R::Father});
    CHECK(path_of("great-aunt") == std::vector<R>{R::Sister, R::Father, R::Father});
    CHECK(path_of("grand-nephew") == std::vector<R>{R::Son, R::Son, R::Brother});
    CHECK(path_of("grand-niece") == std::vector<R>{R::Daughter, R::Son, R::Brother});
    CHECK(path_of("cousin") == std::vector<R>{R::Son, R::Brother, R::Father});
}

TEST_CASE("frequency groups partition the rules with the fixed weights") {
    const auto& groups = frequency_groups();
    REQUIRE(groups.size() == 6);
    const double weights[] = {0.50, 0.30, 0.15, 0.04, 0.01, 0.00};
    std::set<std::string> all;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        CHECK(groups[i].group == static_cast<char>('A' + i));
        CHECK(groups[i].weight == weights[i]);
        for (const auto& m : groups[i].members) {
            CHECK(find_rule(m) != nullptr);
            CHECK(all.insert(m).second);
        }
    }
    CHECK(all.size() == 23);
    CHECK(group_of_rule("great-aunt") == 'E');
    CHECK(group_of_rule("son-in-law") == 'F');
}

TEST_CASE("plant_rule_chain links persons along the rule path") {
    SECTION("worked-example variant path over four persons") {
        const CompositeRule variant{"great-aunt", {R::Sister, R::Father, R::Mother}};
        const std::vector<PersonId> persons = {0, 1, 2, 3};
        const auto facts = plant_rule_chain(variant, persons);
        REQUIRE(facts.size() == 3);
        CHECK(facts[0] == KinshipFact{0, R::Sister, 1});
        CHECK(facts[1] == KinshipFact{1, R::Father, 2});
        CHECK(facts[2] == KinshipFact{2, R::Mother, 3});
    }
    SECTION("hop-2 rule gives two facts") {
        const auto facts = plant_rule_chain(*find_rule("grandfather"), std::vector<PersonId>{0, 1, 2});
        CHECK(facts.size() == 2);
    }
    SECTION("wrong person count is an error") {
        CHECK_THROWS_AS(plant_rule_chain(*find_rule("grandfather"), std::vector<PersonId>{0, 1}),
                        std::invalid_argument);
    }
}

TEST_CASE("planting round-trips through rule_for_path and compose_path") {
    Rng rng(404);
    for (const auto& rule : composite_rules()) {
        std::vector<PersonId> persons;
        for (int i = 0; i <= rule.hop(); ++i) persons.push_back(i);
        auto facts = plant_rule_chain(rule, persons);
        CHECK(rule_for_path(rule.path)->name == rule.name);
        const auto closed = close_under_inverse(std::move(facts), rng);
        CHECK(compose_path(closed, persons.front(), rule.path) ==
              std::vector<PersonId>{persons.back()});
    }
}

TEST_CASE("rule sampling respects the split distributions") {
    Rng rng(2024);
    int a_count = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        const auto& r = sample_rule(RuleDistribution::Rl, rng);
        CHECK(group_of_rule(r.name) <= 'E');
        const auto& a = sample_analogy_rule(RuleDistribution::Rl, rng);
        CHECK(group_of_rule(a.name) <= 'C');
        if (group_of_rule(sample_rule(RuleDistribution::Pretrain, rng).name) == 'A') ++a_count;
    }
    // Group A carries weight 0.50; allow generous sampling noise.
    CHECK(a_count > n * 0.45);
    CHECK(a_count < n * 0.55);

    bool saw_f = false;
    for (int i = 0; i < 4000 && !saw_f; ++i)
        saw_f = group_of_rule(sample_rule(RuleDistribution::Eval, rng).name) == 'F';
    CHECK(saw_f);
}
