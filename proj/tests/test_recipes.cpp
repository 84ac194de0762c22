// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "kgr/recipes.hpp"

using namespace kgr;

TEST_CASE("the 15 recipes cover their published cell counts") {
    const std::map<std::string, std::size_t> expected = {
        {"Baseline", 8},        {"Cmplx-Mid", 8},      {"Cmplx-High", 8},
        {"Cmplx-Intersect", 8}, {"Cmplx-Uniform", 24}, {"Depth-Mid", 6},
        {"Depth-High", 6},      {"Depth-Intersect", 6}, {"Depth-Uniform", 20},
        {"Diag-Mid", 6},        {"Diag-High", 6},      {"Deep-Mix", 24},
        {"Shallow-Mix", 36},    {"Offbase-Mix", 52},   {"Full-Coverage", 60},
    };
    const auto& recipes = builtin_recipes();
    REQUIRE(recipes.size() == 15);
    for (const auto& r : recipes) {
        REQUIRE(expected.count(r.name));
        CHECK(r.cells.size() == expected.at(r.name));
        std::set<Cell> unique(r.cells.begin(), r.cells.end());
        CHECK(unique.size() == r.cells.size());
        for (const auto& [d, t] : r.cells) {
            CHECK((d >= 1 && d <= 10));
            CHECK((t >= 1 && t <= 6));
        }
    }
    // Shallow-Mix = D1-4 x T1-6 union D5-10 x T1-2; Offbase-Mix = complement of
    // the pretraining block.
    const Recipe* shallow = find_recipe("Shallow-Mix");
    for (const auto& [d, t] : shallow->cells) CHECK((d <= 4 || t <= 2));
    const Recipe* offbase = find_recipe("Offbase-Mix");
    for (const auto& [d, t] : offbase->cells) CHECK(!(d <= 4 && t <= 2));
}

TEST_CASE("every recipe budget sums to 220k with the 140/60/10/10 split") {
    for (const auto& recipe : builtin_recipes()) {
        CHECK(recipe.family_budget.at(Family::Deductive) == 140000);
        CHECK(recipe.family_budget.at(Family::Abductive) == 60000);
        CHECK(recipe.family_budget.at(Family::Inductive) == 10000);
        CHECK(recipe.family_budget.at(Family::Analogy) == 10000);

        const auto alloc = allocate_budget(recipe);
        std::map<Family, long long> totals;
        for (const auto& [cell, families] : alloc)
            for (const auto& [family, count] : families) totals[family] += count;
        long long total = 0;
        for (const auto& [family, budget] : recipe.family_budget) {
            CHECK(totals.at(family) == budget);
            total += totals.at(family);
        }
        CHECK(total == 220000);
    }
}

TEST_CASE("budget allocation splits evenly with lexicographic remainders") {
    const Recipe* baseline = find_recipe("Baseline");
    const auto alloc = allocate_budget(*baseline);
    for (const auto& [cell, families] : alloc)
        CHECK(families.at(Family::Abductive) == 7500);  // 60000 / 8 exactly

    const Recipe* full = find_recipe("Full-Coverage");
    const auto full_alloc = allocate_budget(*full);
    long long sum = 0;
    for (const auto& [cell, families] : full_alloc) {
        const long long n = families.at(Family::Deductive);
        CHECK((n == 2333 || n == 2334));  // 140000 over 60 cells
        sum += n;
    }
    CHECK(sum == 140000);

    Recipe empty{"empty", {}, default_family_budget()};
    CHECK_THROWS_AS(allocate_budget(empty), std::invalid_argument);
}

TEST_CASE("single-cell recipes put the whole budget in that cell") {
    Recipe one{"one", {{5, 3}}, default_family_budget()};
    const auto alloc = allocate_budget(one);
    CHECK(alloc.at({5, 3}).at(Family::Deductive) == 140000);
    CHECK(alloc.at({5, 3}).at(Family::Analogy) == 10000);
}

TEST_CASE("blocked schedules partition the axis and H2E reverses E2H") {
    const Recipe* cu = find_recipe("Cmplx-Uniform");
    Schedule s;
    s.kind = Schedule::Kind::Blocked;
    s.axis = Axis::Complexity;
    s.blocks = 3;
    const auto blocks = make_blocks(*cu, s);
    REQUIRE(blocks.size() == 3);
    for (int b = 0; b < 3; ++b) {
        CHECK(blocks[b].size() == 8);  // D1-4 x two complexity levels
        for (const auto& [d, t] : blocks[b]) {
            CHECK(t >= 2 * b + 1);
            CHECK(t <= 2 * b + 2);
        }
    }

    s.order = Schedule::Order::H2E;
    const auto reversed = make_blocks(*cu, s);
    REQUIRE(reversed.size() == 3);
    for (int b = 0; b < 3; ++b) CHECK(reversed[b] == blocks[2 - b]);

    // many-block: one complexity level per stage
    s.order = Schedule::Order::E2H;
    s.blocks = 6;
    CHECK(make_blocks(*cu, s).size() == 6);

    // uniform: a single stage with every cell
    Schedule uniform;
    const auto one = make_blocks(*cu, uniform);
    REQUIRE(one.size() == 1);
    CHECK(one[0].size() == 24);

    // depth axis defaults to one level per stage at blocks=10
    const Recipe* du = find_recipe("Depth-Uniform");
    Schedule depth_many;
    depth_many.kind = Schedule::Kind::Blocked;
    depth_many.axis = Axis::Depth;
    depth_many.blocks = 10;
    CHECK(make_blocks(*du, depth_many).size() == 10);
}

namespace {

TaskPool make_pool(const Recipe& recipe, long long per_cell_family) {
    TaskPool pool;
    for (const auto& cell : recipe.cells)
        for (auto family : kFamilies) {
            auto& ids = pool.ids[{cell, family}];
            for (long long i = 0; i < per_cell_family; ++i)
                ids.push_back("p" + std::to_string(cell.first) + "-" +
                              std::to_string(cell.second) + "-" +
                              std::string(to_string(family)) + "-" + std::to_string(i));
        }
    return pool;
}

Recipe scaled(const Recipe& base, double factor) {
    Recipe r = base;
    for (auto& [family, budget] : r.family_budget)
        budget = std::max<long long>(1, llround(budget * factor));
    return r;
}

}  // namespace

TEST_CASE("uniform schedules emit one stream covering the recipe cells") {
    const Recipe recipe = scaled(*find_recipe("Cmplx-Uniform"), 0.01);
    const TaskPool pool = make_pool(recipe, 80);
    const auto streams = sample_stage_streams(recipe, Schedule{}, pool, 5);
    REQUIRE(streams.size() == 1);
    long long total = 0;
    std::set<Cell> covered;
    std::map<Family, long long> per_family;
    for (const auto& item : streams[0]) {
        ++total;
        covered.insert(item.cell);
        ++per_family[item.family];
        CHECK_FALSE(item.replay);
    }
    CHECK(total == 2200);
    CHECK(covered.size() == 24);
    CHECK(per_family.at(Family::Deductive) == 1400);
    CHECK(per_family.at(Family::Analogy) == 100);
}

TEST_CASE("replay draws about the configured fraction from seen blocks") {
    const Recipe recipe = scaled(*find_recipe("Cmplx-Uniform"), 0.1);  // 22000 items
    const TaskPool pool = make_pool(recipe, 1200);
    Schedule s;
    s.kind = Schedule::Kind::Blocked;
    s.axis = Axis::Complexity;
    s.blocks = 3;
    s.replay_fraction = 0.2;
    const auto streams = sample_stage_streams(recipe, s, pool, 9);
    REQUIRE(streams.size() == 3);

    // stage 1 has no replay
    for (const auto& item : streams[0]) CHECK_FALSE(item.replay);

    long long stage2 = 0, stage2_replay = 0;
    std::set<Cell> stage1_cells;
    for (const auto& item : streams[0]) stage1_cells.insert(item.cell);
    for (const auto& item : streams[1]) {
        ++stage2;
        if (item.replay) {
            ++stage2_replay;
            CHECK(stage1_cells.count(item.cell));
        }
    }
    const double fraction = static_cast<double>(stage2_replay) / static_cast<double>(stage2);
    CHECK(fraction > 0.18);
    CHECK(fraction < 0.22);

    // coverage: all sampled cells belong to recipe cells or seen cells
    const std::set<Cell> recipe_cells(recipe.cells.begin(), recipe.cells.end());
    for (const auto& stream : streams)
        for (const auto& item : stream) CHECK(recipe_cells.count(item.cell));
}

TEST_CASE("non-replay draws never repeat a pool id") {
    const Recipe recipe = scaled(*find_recipe("Baseline"), 0.02);
    const TaskPool pool = make_pool(recipe, 800);
    Schedule s;
    s.kind = Schedule::Kind::Blocked;
    s.axis = Axis::Depth;
    s.blocks = 2;
    s.replay_fraction = 0.2;
    const auto streams = sample_stage_streams(recipe, s, pool, 77);
    std::set<std::string> ids;
    for (const auto& stream : streams)
        for (const auto& item : stream)
            if (!item.replay) CHECK(ids.insert(item.id).second);
}

TEST_CASE("pool exhaustion names the deficient bucket") {
    const Recipe recipe = scaled(*find_recipe("Baseline"), 0.01);
    TaskPool pool = make_pool(recipe, 1);  // far too small
    CHECK_THROWS_MATCHES(sample_stage_streams(recipe, Schedule{}, pool, 1), PoolExhaustedError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("pool exhausted for cell")));
}

TEST_CASE("stream sampling is deterministic in the seed") {
    const Recipe recipe = scaled(*find_recipe("Diag-Mid"), 0.005);
    const TaskPool pool = make_pool(recipe, 300);
    Schedule s;
    s.kind = Schedule::Kind::Blocked;
    s.axis = Axis::Depth;
    s.blocks = 3;
    s.replay_fraction = 0.2;
    const auto a = sample_stage_streams(recipe, s, pool, 123);
    const auto b = sample_stage_streams(recipe, s, pool, 123);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].size() == b[i].size());
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            CHECK(a[i][j].id == b[i][j].id);
            CHECK(a[i][j].replay == b[i][j].replay);
        }
    }
}
