// SPDX-License-Identifier: Apache-2.0
//
// RL data recipes over the depth-by-complexity grid: the 15 named coverage
// regions, the fixed task-family budget split, curriculum/replay schedules,
// and deterministic stream sampling from a shared task pool.
#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgr/metrics.hpp"
#include "kgr/rng.hpp"
#include "kgr/traces.hpp"

namespace kgr {

struct Recipe {
    std::string name;
    std::vector<Cell> cells;                 // sorted (depth, complexity)
    std::map<Family, long long> family_budget;
};

inline std::map<Family, long long> default_family_budget() {
    return {{Family::Deductive, 140000},
            {Family::Abductive, 60000},
            {Family::Inductive, 10000},
            {Family::Analogy, 10000}};
}

namespace recipe_detail {

inline std::vector<Cell> block_cells(int d_lo, int d_hi, int t_lo, int t_hi) {
    std::vector<Cell> cells;
    for (int d = d_lo; d <= d_hi; ++d)
        for (int t = t_lo; t <= t_hi; ++t) cells.push_back({d, t});
    return cells;
}

inline std::vector<Cell> merge(std::vector<Cell> a, const std::vector<Cell>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

inline std::vector<Cell> except(const std::vector<Cell>& universe, const std::vector<Cell>& hole) {
    std::vector<Cell> out;
    const std::set<Cell> drop(hole.begin(), hole.end());
    for (const auto& c : universe)
        if (!drop.count(c)) out.push_back(c);
    return out;
}

}  // namespace recipe_detail

// The 15 recipes. Cell sets: Baseline 8, Cmplx-Mid/High/Intersect 8,
// Cmplx-Uniform 24, Depth-Mid/High/Intersect 6, Depth-Uniform 20, Diag 6,
// Deep-Mix 24, Shallow-Mix 36, Offbase-Mix 52, Full-Coverage 60.
inline const std::vector<Recipe>& builtin_recipes() {
    using namespace recipe_detail;
    static const std::vector<Recipe> recipes = [] {
        const auto budget = default_family_budget();
        const auto full = block_cells(1, 10, 1, 6);
        std::vector<Recipe> r;
        r.push_back({"Baseline", block_cells(1, 4, 1, 2), budget});
        r.push_back({"Cmplx-Mid", block_cells(1, 4, 3, 4), budget});
        r.push_back({"Cmplx-High", block_cells(1, 4, 5, 6), budget});
        r.push_back({"Cmplx-Intersect", block_cells(1, 4, 2, 3), budget});
        r.push_back({"Cmplx-Uniform", block_cells(1, 4, 1, 6), budget});
        r.push_back({"Depth-Mid", block_cells(5, 7, 1, 2), budget});
        r.push_back({"Depth-High", block_cells(8, 10, 1, 2), budget});
        r.push_back({"Depth-Intersect", block_cells(4, 6, 1, 2), budget});
        r.push_back({"Depth-Uniform", block_cells(1, 10, 1, 2), budget});
        r.push_back({"Diag-Mid", block_cells(5, 7, 3, 4), budget});
        r.push_back({"Diag-High", block_cells(8, 10, 5, 6), budget});
        r.push_back({"Deep-Mix", block_cells(5, 10, 3, 6), budget});
        r.push_back({"Shallow-Mix",
                     merge(block_cells(1, 4, 1, 6), block_cells(5, 10, 1, 2)), budget});
        r.push_back({"Offbase-Mix", except(full, block_cells(1, 4, 1, 2)), budget});
        r.push_back({"Full-Coverage", full, budget});
        return r;
    }();
    return recipes;
}

inline const Recipe* find_recipe(std::string_view name) {
    for (const auto& r : builtin_recipes())
        if (r.name == name) return &r;
    return nullptr;
}

// Per-(cell, family) counts: each family budget split as evenly as possible
// across the recipe's cells, remainders assigned in (depth, complexity)
// lexicographic order so totals land exactly on the budget.
inline std::map<Cell, std::map<Family, long long>> allocate_budget(const Recipe& recipe) {
    if (recipe.cells.empty()) throw std::invalid_argument("allocate_budget: empty cell set");
    std::vector<Cell> cells = recipe.cells;
    std::sort(cells.begin(), cells.end());
    std::map<Cell, std::map<Family, long long>> out;
    const long long ncells = static_cast<long long>(cells.size());
    for (const auto& [family, budget] : recipe.family_budget) {
        const long long base = budget / ncells;
        const long long extra = budget % ncells;
        for (long long i = 0; i < ncells; ++i)
            out[cells[i]][family] = base + (i < extra ? 1 : 0);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Curriculum schedules.

struct Schedule {
    enum class Kind { Uniform, Blocked };
    enum class Order { E2H, H2E };
    Kind kind{Kind::Uniform};
    Axis axis{Axis::Complexity};
    int blocks{3};
    Order order{Order::E2H};
    double replay_fraction{0.0};
};

// Contiguous axis-value blocks, easy-to-hard; H2E is the exact reverse.
inline std::vector<std::vector<Cell>> make_blocks(const Recipe& recipe, const Schedule& schedule) {
    if (schedule.kind == Schedule::Kind::Uniform) return {recipe.cells};
    std::set<int> values;
    for (const auto& c : recipe.cells)
        values.insert(schedule.axis == Axis::Depth ? c.first : c.second);
    std::vector<int> axis_values(values.begin(), values.end());
    const int m = static_cast<int>(axis_values.size());
    const int nblocks = std::min(schedule.blocks, m);
    if (nblocks < 1) throw std::invalid_argument("make_blocks: need at least one block");

    std::vector<std::vector<Cell>> blocks;
    int start = 0;
    for (int b = 0; b < nblocks; ++b) {
        const int size = m / nblocks + (b < m % nblocks ? 1 : 0);
        const std::set<int> group(axis_values.begin() + start, axis_values.begin() + start + size);
        start += size;
        std::vector<Cell> cells;
        for (const auto& c : recipe.cells)
            if (group.count(schedule.axis == Axis::Depth ? c.first : c.second))
                cells.push_back(c);
        blocks.push_back(std::move(cells));
    }
    if (schedule.order == Schedule::Order::H2E) std::reverse(blocks.begin(), blocks.end());
    return blocks;
}

// ---------------------------------------------------------------------------
// Stream sampling.

struct TaskPool {
    // (cell, family) -> instance ids
    std::map<std::pair<Cell, Family>, std::vector<std::string>> ids;
};

struct StreamItem {
    int stage{};
    Family family{Family::Deductive};
    Cell cell{};
    std::string id;
    bool replay{false};
};

struct PoolExhaustedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One stream per block. Within a stage, replay_fraction of the items are
// drawn uniformly from already-seen blocks' cells (re-exposure may repeat
// ids); the rest are drawn without replacement from the current block.
inline std::vector<std::vector<StreamItem>> sample_stage_streams(const Recipe& recipe,
                                                                 const Schedule& schedule,
                                                                 const TaskPool& pool,
                                                                 std::uint64_t seed) {
    const auto blocks = make_blocks(recipe, schedule);
    const int nblocks = static_cast<int>(blocks.size());
    Rng rng(mix_seed({seed, 0x57e4}));

    // Shuffled copies give the without-replacement order; cursors advance
    // across stages.
    std::map<std::pair<Cell, Family>, std::vector<std::string>> shuffled;
    std::map<std::pair<Cell, Family>, std::size_t> cursor;
    for (const auto& [key, ids] : pool.ids) {
        auto copy = ids;
        rng.shuffle(copy);
        shuffled[key] = std::move(copy);
        cursor[key] = 0;
    }

    auto draw = [&](const Cell& cell, Family family) -> std::string {
        const auto key = std::make_pair(cell, family);
        const auto it = shuffled.find(key);
        if (it == shuffled.end() || cursor[key] >= it->second.size())
            throw PoolExhaustedError("pool exhausted for cell D" + std::to_string(cell.first) +
                                     "/T" + std::to_string(cell.second) + " family " +
                                     std::string(to_string(family)));
        return it->second[cursor[key]++];
    };

    std::vector<std::vector<StreamItem>> streams;
    std::vector<Cell> seen;
    for (int b = 0; b < nblocks; ++b) {
        std::vector<StreamItem> stream;
        for (const auto& [family, budget] : recipe.family_budget) {
            const long long stage_budget = budget / nblocks + (b < budget % nblocks ? 1 : 0);
            const long long replay_n =
                seen.empty() ? 0
                             : static_cast<long long>(schedule.replay_fraction *
                                                          static_cast<double>(stage_budget) +
                                                      0.5);
            const long long current_n = stage_budget - replay_n;

            // Current block: even split across its cells, remainder in
            // (depth, complexity) order.
            const long long ncells = static_cast<long long>(blocks[b].size());
            std::vector<Cell> cells = blocks[b];
            std::sort(cells.begin(), cells.end());
            for (long long i = 0; i < ncells; ++i) {
                const long long quota = current_n / ncells + (i < current_n % ncells ? 1 : 0);
                for (long long j = 0; j < quota; ++j)
                    stream.push_back({b, family, cells[i], draw(cells[i], family), false});
            }
            for (long long j = 0; j < replay_n; ++j) {
                const Cell cell = seen[rng.below(seen.size())];
                const auto key = std::make_pair(cell, family);
                const auto it = shuffled.find(key);
                if (it == shuffled.end() || it->second.empty())
                    throw PoolExhaustedError("replay pool empty for family " +
                                             std::string(to_string(family)));
                stream.push_back({b, family, cell, it->second[rng.below(it->second.size())], true});
            }
        }
        rng.shuffle(stream);
        streams.push_back(std::move(stream));
        seen.insert(seen.end(), blocks[b].begin(), blocks[b].end());
    }
    return streams;
}

}  // namespace kgr
