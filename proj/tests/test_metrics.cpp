// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kgr/metrics.hpp"
#include "kgr/rng.hpp"

using namespace kgr;

namespace {

// Exhaustive subset-enumeration oracle: the average over all C(n, k) subsets
// of the indicator "the subset contains a correct sample".
double pass_at_k_oracle(int n, int c, int k) {
    long long with = 0, total = 0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        ++total;
        // samples 0..c-1 are the correct ones
        if (mask & ((1u << c) - 1)) ++with;
    }
    return static_cast<double>(with) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("pass@k equals the subset-enumeration oracle for all n <= 10") {
    for (int n = 1; n <= 10; ++n)
        for (int c = 0; c <= n; ++c)
            for (int k = 1; k <= n; ++k)
                CHECK(pass_at_k(n, c, k) == Catch::Approx(pass_at_k_oracle(n, c, k)).margin(1e-12));
}

TEST_CASE("pass@k closed-form anchors") {
    CHECK(pass_at_k(5, 5, 3) == 1.0);
    CHECK(pass_at_k(2, 1, 1) == Catch::Approx(0.5));
    CHECK(pass_at_k(100, 0, 10) == 0.0);
    CHECK(pass_at_k(128, 1, 128) == 1.0);
}

TEST_CASE("pass@k rejects invalid arguments") {
    CHECK_THROWS_AS(pass_at_k(4, 5, 1), std::invalid_argument);
    CHECK_THROWS_AS(pass_at_k(4, 2, 5), std::invalid_argument);
    CHECK_THROWS_AS(pass_at_k(4, 2, 0), std::invalid_argument);
}

TEST_CASE("pass@k is monotone in k and c, and zero iff c = 0") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(64));
        const int c = static_cast<int>(rng.below(n + 1));
        double prev = 0;
        for (int k = 1; k <= n; ++k) {
            const double v = pass_at_k(n, c, k);
            CHECK(v >= prev - 1e-15);
            CHECK((v == 0.0) == (c == 0));
            prev = v;
            if (c + 1 <= n) CHECK(pass_at_k(n, c + 1, k) >= v - 1e-15);
        }
        if (c >= 1) CHECK(pass_at_k(n, c, n) == Catch::Approx(1.0));
    }
}

TEST_CASE("SG/CG reproduce the worked gain pair from the stated pass rates") {
    const std::map<int, double> post = {{1, 0.58}, {128, 0.79}};
    const std::map<int, double> pre = {{1, 0.42}, {128, 0.64}};
    const Gains g = gains(post, pre);
    CHECK(g.sg == Catch::Approx(0.16).margin(1e-12));
    CHECK(g.cg == Catch::Approx(0.15).margin(1e-12));

    const Gains zero = gains(pre, pre);
    CHECK(zero.sg == 0.0);
    CHECK(zero.cg == 0.0);

    CHECK_THROWS_AS(gains({{1, 0.5}}, pre), std::invalid_argument);
    CHECK_THROWS_AS(gains({{1, 0.5}, {8, 0.6}}, {{1, 0.4}, {16, 0.6}}), std::invalid_argument);
}

TEST_CASE("mean rank: strict dominance and tie averaging") {
    CellValues better, worse;
    for (int d = 1; d <= 3; ++d)
        for (int t = 1; t <= 2; ++t) {
            better[{d, t}] = 0.5;
            worse[{d, t}] = 0.1;
        }
    const auto ranks = mean_rank({{"A", better}, {"B", worse}}, Axis::Depth);
    CHECK(ranks.at("A") == 1.0);
    CHECK(ranks.at("B") == 2.0);

    const auto tied = mean_rank({{"A", better}, {"B", better}, {"C", better}}, Axis::Complexity);
    for (const auto& [name, r] : tied) CHECK(r == Catch::Approx(2.0));  // (R+1)/2 with R=3
}

TEST_CASE("mean rank matches the hand-worked three-recipe fixture") {
    // Dyadic values keep the hand arithmetic float-exact.
    // Slice means: d=1 -> A: .5, B: .25, C: .5 ; d=2 -> A: .125, B: .75, C: .5
    // Ranks d=1: A,C tie at 1.5, B 3 ; d=2: B 1, C 2, A 3.
    // Mean ranks: A 2.25, B 2.0, C 1.75.
    CellValues a = {{{1, 1}, 0.25}, {{1, 2}, 0.75}, {{2, 1}, 0.0}, {{2, 2}, 0.25}};
    CellValues b = {{{1, 1}, 0.25}, {{1, 2}, 0.25}, {{2, 1}, 0.75}, {{2, 2}, 0.75}};
    CellValues c = {{{1, 1}, 0.5}, {{1, 2}, 0.5}, {{2, 1}, 0.25}, {{2, 2}, 0.75}};
    const auto ranks = mean_rank({{"A", a}, {"B", b}, {"C", c}}, Axis::Depth);
    CHECK(ranks.at("A") == 2.25);
    CHECK(ranks.at("B") == 2.0);
    CHECK(ranks.at("C") == 1.75);
}

TEST_CASE("mean rank is scale-invariant") {
    // Positive affine maps commute with the slice means the ranks are built
    // from, so every rank (and mean rank) is unchanged.
    Rng rng(17);
    std::map<std::string, CellValues> cg;
    for (const char* name : {"R1", "R2", "R3", "R4"})
        for (int d = 1; d <= 4; ++d)
            for (int t = 1; t <= 3; ++t) cg[name][{d, t}] = rng.unit() - 0.5;
    const auto base = mean_rank(cg, Axis::Depth);
    std::map<std::string, CellValues> warped = cg;
    for (auto& [name, cells] : warped)
        for (auto& [cell, v] : cells) v = 3.7 * v + 1.2;
    const auto after = mean_rank(warped, Axis::Depth);
    for (const auto& [name, r] : base) CHECK(after.at(name) == Catch::Approx(r));
}

TEST_CASE("mean rank requires matching cell sets") {
    CellValues a = {{{1, 1}, 0.1}};
    CellValues b = {{{1, 2}, 0.1}};
    CHECK_THROWS_AS(mean_rank({{"A", a}, {"B", b}}, Axis::Depth), std::invalid_argument);
}

TEST_CASE("pearson correlation endpoints and degeneracy") {
    std::map<int, double> a, b, neg, flat;
    Rng rng(23);
    for (int i = 0; i < 40; ++i) {
        const double v = rng.unit();
        a[i] = v;
        b[i] = v;
        neg[i] = -v;
        flat[i] = 0.25;
    }
    CHECK(pearson(a, b) == Catch::Approx(1.0).margin(1e-12));
    CHECK(pearson(a, neg) == Catch::Approx(-1.0).margin(1e-12));
    CHECK_THROWS_AS(pearson(a, flat), std::invalid_argument);
    const std::map<int, double> tiny = {{0, 1.0}};
    CHECK_THROWS_AS(pearson(tiny, tiny), std::invalid_argument);
}

TEST_CASE("pearson matches a direct two-pass computation on a random fixture") {
    Rng rng(29);
    std::map<int, double> a, b;
    for (int i = 0; i < 100; ++i) {
        a[i] = rng.unit() * 2 - 1;
        b[i] = 0.4 * a[i] + rng.unit();
    }
    double ma = 0, mb = 0;
    for (int i = 0; i < 100; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= 100;
    mb /= 100;
    double cov = 0, va = 0, vb = 0;
    for (int i = 0; i < 100; ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    CHECK(pearson(a, b) == Catch::Approx(cov / std::sqrt(va * vb)).margin(1e-12));
}

TEST_CASE("pearson is invariant under positive affine transforms") {
    Rng rng(31);
    std::map<int, double> a, b, a2, b2;
    for (int i = 0; i < 50; ++i) {
        a[i] = rng.unit();
        b[i] = rng.unit() * 0.5 + 0.2 * a[i];
        a2[i] = 3.0 * a[i] + 7.0;
        b2[i] = 0.25 * b[i] - 2.0;
    }
    CHECK(pearson(a2, b2) == Catch::Approx(pearson(a, b)).margin(1e-12));
}

TEST_CASE("verdict aggregation averages per-instance pass@k") {
    std::vector<VerdictRecord> records;
    // instance x: 2 of 4 correct; instance y: 0 of 4
    for (int s = 0; s < 4; ++s) {
        records.push_back({"R", Family::Deductive, 3, 2, "x", s < 2});
        records.push_back({"R", Family::Deductive, 3, 2, "y", false});
    }
    const GridReport report = aggregate_verdicts(records, {1, 4});
    REQUIRE(report.cells.size() == 1);
    const auto& cell = report.cells[0];
    CHECK(cell.instances == 2);
    CHECK(cell.samples == 8);
    CHECK(cell.pass_at.at(1) == Catch::Approx(0.25));  // (0.5 + 0) / 2
    CHECK(cell.pass_at.at(4) == Catch::Approx(0.5));   // (1 + 0) / 2

    CHECK_THROWS_AS(aggregate_verdicts(records, {8}), std::invalid_argument);
}

TEST_CASE("attach_gains joins on (family, depth, complexity)") {
    std::vector<VerdictRecord> post_records, pre_records;
    for (int s = 0; s < 4; ++s) {
        post_records.push_back({"R", Family::Inductive, 2, 1, "x", s < 2});
        pre_records.push_back({"pre", Family::Inductive, 2, 1, "x", s < 1});
    }
    GridReport post = aggregate_verdicts(post_records, {1, 4});
    const GridReport pre = aggregate_verdicts(pre_records, {1, 4});
    attach_gains(post, pre, 4);
    REQUIRE(post.cells[0].sg.has_value());
    CHECK(*post.cells[0].sg == Catch::Approx(0.25));
    CHECK(*post.cells[0].cg == Catch::Approx(0.0));

    GridReport mismatched = aggregate_verdicts(post_records, {1, 4});
    mismatched.cells[0].depth = 9;
    CHECK_THROWS_AS(attach_gains(mismatched, pre, 4), std::invalid_argument);
}

TEST_CASE("attach_coverage flags in- and out-of-recipe cells") {
    std::vector<VerdictRecord> records = {{"R", Family::Deductive, 1, 1, "x", true},
                                          {"R", Family::Deductive, 9, 6, "y", false}};
    GridReport report = aggregate_verdicts(records, {1});
    attach_coverage(report, {{1, 1}});
    for (const auto& cell : report.cells) {
        REQUIRE(cell.in_recipe.has_value());
        CHECK(*cell.in_recipe == (cell.depth == 1));
    }
}
