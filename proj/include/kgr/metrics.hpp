// SPDX-License-Identifier: Apache-2.0
//
// Evaluation analytics: the unbiased combinatorial pass@k estimator, SG/CG
// gains, per-axis mean ranks with averaged ties, task-pair Pearson
// correlation over pooled recipe-cell observations, and verdict aggregation
// into grid reports.
#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kgr/traces.hpp"

namespace kgr {

// 1 - C(n-c, k) / C(n, k), in product form so no binomial overflows.
inline double pass_at_k(long long n, long long c, long long k) {
    if (c < 0 || n < 0 || c > n) throw std::invalid_argument("pass_at_k: need 0 <= c <= n");
    if (k < 1 || k > n) throw std::invalid_argument("pass_at_k: need 1 <= k <= n");
    if (n - c < k) return 1.0;
    double miss = 1.0;
    for (long long i = 0; i < k; ++i)
        miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
    return 1.0 - miss;
}

struct Gains {
    double sg{};  // delta pass@1
    double cg{};  // delta pass@128
};

// SG/CG from matching pass@k tables. Both tables must carry the same k grid
// including k=1 and k=128.
inline Gains gains(const std::map<int, double>& post, const std::map<int, double>& pre,
                   int ceiling_k = 128) {
    if (post.size() != pre.size())
        throw std::invalid_argument("gains: evaluation subsets do not match");
    for (const auto& [k, v] : post)
        if (!pre.count(k)) throw std::invalid_argument("gains: evaluation subsets do not match");
    if (!post.count(1) || !post.count(ceiling_k))
        throw std::invalid_argument("gains: tables must include pass@1 and the ceiling k");
    return {post.at(1) - pre.at(1), post.at(ceiling_k) - pre.at(ceiling_k)};
}

// ---------------------------------------------------------------------------
// Mean rank and correlation over cell-level CG values.

using Cell = std::pair<int, int>;  // (depth, complexity)
using CellValues = std::map<Cell, double>;

enum class Axis { Depth, Complexity };

namespace metrics_detail {

// Ranks descending, ties averaged: rank 1 is best.
inline std::vector<double> average_ranks_desc(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
        i = j + 1;
    }
    return ranks;
}

}  // namespace metrics_detail

// Per-recipe mean of slice ranks along the axis. All recipes must share one
// valid-cell set; within each slice recipes are ranked by slice-mean CG
// descending.
inline std::map<std::string, double> mean_rank(
    const std::map<std::string, CellValues>& cg_by_recipe, Axis axis) {
    if (cg_by_recipe.empty()) throw std::invalid_argument("mean_rank: no recipes");
    const CellValues& first = cg_by_recipe.begin()->second;
    for (const auto& [name, cells] : cg_by_recipe) {
        if (cells.size() != first.size())
            throw std::invalid_argument("mean_rank: recipe " + name + " has a mismatched cell set");
        for (const auto& [cell, v] : cells)
            if (!first.count(cell))
                throw std::invalid_argument("mean_rank: recipe " + name +
                                            " has a mismatched cell set");
    }

    std::set<int> slices;
    for (const auto& [cell, v] : first)
        slices.insert(axis == Axis::Depth ? cell.first : cell.second);

    std::vector<std::string> recipes;
    for (const auto& [name, cells] : cg_by_recipe) recipes.push_back(name);

    std::map<std::string, double> sum;
    for (int slice : slices) {
        std::vector<double> slice_means;
        for (const auto& name : recipes) {
            const auto& cells = cg_by_recipe.at(name);
            double total = 0;
            int count = 0;
            for (const auto& [cell, v] : cells) {
                const int key = axis == Axis::Depth ? cell.first : cell.second;
                if (key == slice) {
                    total += v;
                    ++count;
                }
            }
            slice_means.push_back(total / count);
        }
        const auto ranks = metrics_detail::average_ranks_desc(slice_means);
        for (std::size_t i = 0; i < recipes.size(); ++i) sum[recipes[i]] += ranks[i];
    }
    for (auto& [name, v] : sum) v /= static_cast<double>(slices.size());
    return sum;
}

// Pearson correlation over pooled (recipe, cell) CG observations common to
// both families.
template <class Key>
inline double pearson(const std::map<Key, double>& a, const std::map<Key, double>& b) {
    std::vector<std::pair<double, double>> xs;
    for (const auto& [k, va] : a) {
        const auto it = b.find(k);
        if (it != b.end()) xs.push_back({va, it->second});
    }
    if (xs.size() < 2)
        throw std::invalid_argument("pearson: need at least two common observations");
    double ma = 0, mb = 0;
    for (const auto& [x, y] : xs) {
        ma += x;
        mb += y;
    }
    ma /= static_cast<double>(xs.size());
    mb /= static_cast<double>(xs.size());
    double nab = 0, za = 0, zb = 0;
    for (const auto& [x, y] : xs) {
        nab += (x - ma) * (y - mb);
        za += (x - ma) * (x - ma);
        zb += (y - mb) * (y - mb);
    }
    if (za == 0.0 || zb == 0.0)
        throw std::invalid_argument("pearson: degenerate variance");
    return nab / (std::sqrt(za) * std::sqrt(zb));
}

// ---------------------------------------------------------------------------
// Verdict aggregation.

struct VerdictRecord {
    std::string recipe;
    Family family{Family::Deductive};
    int depth{};
    int complexity{};
    std::string instance_id;
    bool correct{};  // strict: A and P
};

struct CellReport {
    std::string recipe;
    Family family{Family::Deductive};
    int depth{};
    int complexity{};
    long long instances{};
    long long samples{};
    std::map<int, double> pass_at;
    std::optional<double> sg;
    std::optional<double> cg;
    std::optional<bool> in_recipe;
};

struct GridReport {
    std::vector<CellReport> cells;
    std::string decoding;  // passthrough metadata, not used in computation
};

// Mean per-instance pass@k per (recipe, family, cell). Errors when some
// instance drew fewer than max(ks) samples.
inline GridReport aggregate_verdicts(const std::vector<VerdictRecord>& records,
                                     const std::vector<int>& ks) {
    struct Counts {
        long long n{};
        long long c{};
    };
    std::map<std::tuple<std::string, int, int, int>, std::map<std::string, Counts>> units;
    for (const auto& r : records) {
        auto& unit = units[{r.recipe, static_cast<int>(r.family), r.depth, r.complexity}];
        auto& counts = unit[r.instance_id];
        ++counts.n;
        if (r.correct) ++counts.c;
    }
    GridReport report;
    for (const auto& [key, unit] : units) {
        CellReport cell;
        cell.recipe = std::get<0>(key);
        cell.family = static_cast<Family>(std::get<1>(key));
        cell.depth = std::get<2>(key);
        cell.complexity = std::get<3>(key);
        cell.instances = static_cast<long long>(unit.size());
        for (const auto& [id, counts] : unit) cell.samples += counts.n;
        for (int k : ks) {
            double total = 0;
            for (const auto& [id, counts] : unit) {
                if (counts.n < k)
                    throw std::invalid_argument("instance " + id + " has fewer than k=" +
                                                std::to_string(k) + " samples");
                total += pass_at_k(counts.n, counts.c, k);
            }
            cell.pass_at[k] = total / static_cast<double>(unit.size());
        }
        report.cells.push_back(std::move(cell));
    }
    return report;
}

// Attaches SG/CG against a baseline report; cells are matched on
// (family, depth, complexity).
inline void attach_gains(GridReport& post, const GridReport& pre, int ceiling_k = 128) {
    std::map<std::tuple<int, int, int>, const CellReport*> base;
    for (const auto& cell : pre.cells)
        base[{static_cast<int>(cell.family), cell.depth, cell.complexity}] = &cell;
    for (auto& cell : post.cells) {
        const auto it = base.find({static_cast<int>(cell.family), cell.depth, cell.complexity});
        if (it == base.end())
            throw std::invalid_argument("baseline report is missing a matching cell");
        const Gains g = gains(cell.pass_at, it->second->pass_at, ceiling_k);
        cell.sg = g.sg;
        cell.cg = g.cg;
    }
}

// Marks cells as in- or out-of-recipe given the recipe's covered cells.
inline void attach_coverage(GridReport& report, const std::set<Cell>& covered) {
    for (auto& cell : report.cells)
        cell.in_recipe = covered.count({cell.depth, cell.complexity}) > 0;
}

}  // namespace kgr
