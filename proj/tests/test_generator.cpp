// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "kgr/generator.hpp"
#include "kgr/io.hpp"

using namespace kgr;

TEST_CASE("the six presets match the structural table") {
    const auto& p = complexity_presets();
    REQUIRE(p.size() == 6);
    CHECK(p[0].chain_distribution == std::vector<std::pair<int, double>>{{1, 1.0}});
    CHECK(p[1].chain_distribution == std::vector<std::pair<int, double>>{{1, 0.5}, {2, 0.5}});
    CHECK(p[2].chain_distribution == std::vector<std::pair<int, double>>{{2, 1.0}});
    CHECK(p[3].chain_distribution == std::vector<std::pair<int, double>>{{3, 1.0}});
    CHECK(p[4].chain_distribution == std::vector<std::pair<int, double>>{{4, 1.0}});
    CHECK(p[5].chain_distribution == std::vector<std::pair<int, double>>{{5, 1.0}});
    const int lo[] = {5, 8, 10, 12, 15, 18};
    const int hi[] = {8, 12, 15, 18, 22, 25};
    const double cross[] = {0.0, 0.2, 0.3, 0.5, 0.8, 1.0};
    const double exch[] = {0.0, 0.0, 0.2, 0.5, 0.8, 1.0};
    for (int i = 0; i < 6; ++i) {
        CHECK(p[i].level == i + 1);
        CHECK(p[i].person_lo == lo[i]);
        CHECK(p[i].person_hi == hi[i]);
        CHECK(p[i].crossover_rate == cross[i]);
        CHECK(p[i].exchange_rate == exch[i]);
    }
}

TEST_CASE("generated graphs hit their cell exactly and conform to the preset") {
    for (int d = 1; d <= 10; ++d) {
        for (int t = 1; t <= 6; ++t) {
            const auto& preset = complexity_presets()[t - 1];
            for (int i = 0; i < 5; ++i) {
                const Graph g = generate_graph(d, t, mix_seed({42u, (std::uint64_t)d,
                                                               (std::uint64_t)t, (std::uint64_t)i}));
                CHECK(reasoning_depth(g, g.target_object) == d);
                CHECK(g.persons.size() >= static_cast<std::size_t>(preset.person_lo));
                CHECK(g.persons.size() <= static_cast<std::size_t>(preset.person_hi));

                bool support = false;
                const int chains = static_cast<int>(g.objects.size());
                for (const auto& [k, prob] : preset.chain_distribution)
                    if (k == chains && prob > 0) support = true;
                CHECK(support);

                int exchanges = 0;
                for (const auto& e : g.dynamic_events)
                    if (e.kind == EventKind::Exchange) ++exchanges;
                if (preset.exchange_rate == 0.0) CHECK(exchanges == 0);

                CHECK_NOTHROW(replay(g.initial_state, g.dynamic_events));
            }
        }
    }
}

TEST_CASE("T2 chain counts follow the half/half distribution") {
    int singles = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
        const Graph g = generate_graph(3, 2, mix_seed({7u, (std::uint64_t)i}));
        if (g.objects.size() == 1) ++singles;
    }
    // p = 0.5, sigma = 5 at n = 100; assert within three sigma.
    CHECK(singles >= 35);
    CHECK(singles <= 65);
}

TEST_CASE("higher crossover rates raise cross-chain participant overlap") {
    auto mean_overlap = [](int t) {
        int overlaps = 0, graphs = 0;
        for (int i = 0; i < 60; ++i) {
            const Graph g = generate_graph(8, t, mix_seed({13u, (std::uint64_t)t, (std::uint64_t)i}));
            if (g.objects.size() < 2) continue;
            std::set<PersonId> target;
            for (const auto& e : g.dynamic_events) {
                if (!e.touches(g.target_object)) continue;
                target.insert(e.actor);
                if (e.counterparty) target.insert(*e.counterparty);
            }
            bool shared = false;
            for (const auto& e : g.dynamic_events) {
                if (e.touches(g.target_object)) continue;
                if (target.count(e.actor) || (e.counterparty && target.count(*e.counterparty)))
                    shared = true;
            }
            ++graphs;
            if (shared) ++overlaps;
        }
        return static_cast<double>(overlaps) / graphs;
    };
    CHECK(mean_overlap(6) > mean_overlap(3));
}

TEST_CASE("identical manifests produce byte-identical output") {
    SplitManifest m = make_grid_manifest("t", 2025, 1, 4, 1, 3, 2, 1, RuleDistribution::Rl);
    auto run = [&] {
        std::ostringstream out;
        generate_split(m, [&](Graph g, const CellSpec&, long long) {
            out << to_json(g).dump() << "\n";
        });
        return out.str();
    };
    const std::string a = run();
    const std::string b = run();
    CHECK(a == b);
    CHECK(!a.empty());
}

TEST_CASE("split sizes follow the |D| x |T| x n_cell identity") {
    auto count_split = [](const SplitManifest& m) {
        long long n = 0;
        generate_split(m, [&](const Graph&, const CellSpec&, long long) { ++n; });
        return n;
    };
    CHECK(count_split(eval_manifest(1, 1)) == 60);
    CHECK(count_split(pretrain_manifest(1, 5)) == 40);
    CHECK(eval_manifest(1).total() == 4800);
    CHECK(pretrain_manifest(1).total() == 3200000);
    CHECK(rl_pool_manifest(1).total() == 1200000);

    SplitManifest empty = make_grid_manifest("e", 1, 1, 2, 1, 2, 0, 1, RuleDistribution::Rl);
    CHECK(count_split(empty) == 0);
}

TEST_CASE("any single graph is reproducible from its derived seed") {
    const SplitManifest m = make_grid_manifest("r", 31337, 5, 5, 3, 3, 3, 1, RuleDistribution::Rl);
    std::vector<Graph> emitted;
    generate_split(m, [&](Graph g, const CellSpec&, long long) { emitted.push_back(std::move(g)); });
    REQUIRE(emitted.size() == 3);

    const Graph solo = generate_graph(5, 3, graph_seed(m, m.cells[0], 1),
                                      {m.name_pool, m.rule_distribution});
    json a = to_json(emitted[1]);
    json b = to_json(solo);
    a.erase("id");
    b.erase("id");
    CHECK(a == b);
}

TEST_CASE("out-of-range cells are rejected") {
    CHECK_THROWS_AS(generate_graph(0, 1, 1), GenerationError);
    CHECK_THROWS_AS(generate_graph(11, 1, 1), GenerationError);
    CHECK_THROWS_AS(generate_graph(5, 7, 1), GenerationError);
}

TEST_CASE("name pools keep splits disjoint") {
    const Graph pre = generate_graph(3, 2, 11, {0, RuleDistribution::Pretrain});
    const Graph ev = generate_graph(3, 2, 11, {2, RuleDistribution::Eval});
    std::set<std::string> pre_names;
    for (const auto& p : pre.persons) pre_names.insert(p.full_name);
    for (const auto& p : ev.persons) CHECK(!pre_names.count(p.full_name));
    std::set<std::string> pre_objects;
    for (const auto& o : pre.objects) pre_objects.insert(o.surface_name);
    for (const auto& o : ev.objects) CHECK(!pre_objects.count(o.surface_name));
}
