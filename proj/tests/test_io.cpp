// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "kgr/io.hpp"
#include "kgr/server.hpp"
#include "kgr/tasks.hpp"
#include "worked_example.hpp"

using namespace kgr;

TEST_CASE("graphs round-trip through JSON byte-identically") {
    for (int i = 0; i < 40; ++i) {
        const Graph g = generate_graph(1 + i % 10, 1 + i % 6, mix_seed({2u, (std::uint64_t)i}));
        const json j = to_json(g);
        CHECK(to_json(graph_from_json(j)) == j);
    }
}

TEST_CASE("task instances round-trip through JSON") {
    const Graph g = fixtures::worked_example();
    std::vector<TaskInstance> xs = make_deductive(g, 1);
    xs.push_back(make_abductive(g, 1));
    xs.push_back(make_inductive(g, 1));
    xs.push_back(make_analogy(g, 1));
    for (auto& x : xs) {
        x.story = "story text.";
        const json j = to_json(x);
        const TaskInstance back = task_from_json(j);
        CHECK(to_json(back) == j);
        // verification still works after a round trip
        const Verdict v = verify_response(back, render_gold_solution(back));
        CHECK(v.answer_match == 1);
        CHECK(v.process_match == 1);
    }
}

TEST_CASE("jsonl readers reject unknown schema versions with line numbers") {
    std::istringstream in(
        "{\"v\":\"kgr.graph/1\",\"x\":1}\n"
        "{\"v\":\"kgr.graph/999\",\"x\":2}\n");
    CHECK_THROWS_MATCHES(
        for_each_jsonl(in, schema::graph, [](const json&, std::size_t) {}), SchemaError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("line 2")));

    std::istringstream bad("not json at all\n");
    CHECK_THROWS_MATCHES(
        for_each_jsonl(bad, schema::graph, [](const json&, std::size_t) {}), SchemaError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("line 1")));

    std::istringstream missing("{\"x\":1}\n");
    CHECK_THROWS_AS(for_each_jsonl(missing, schema::graph, [](const json&, std::size_t) {}),
                    SchemaError);
}

TEST_CASE("manifest parsing accepts cells, grids, and builtins") {
    const json cells = {{"name", "tiny"},
                        {"seed", 7},
                        {"name_pool", "eval"},
                        {"rule_distribution", "eval"},
                        {"cells", json::array({{{"depth", 1}, {"complexity", 1}, {"count", 3}}})}};
    const SplitManifest a = manifest_from_json(cells);
    CHECK(a.total() == 3);
    CHECK(a.name_pool == 2);

    const json grid = {{"name", "block"},
                       {"seed", "0x10"},
                       {"grid", {{"depth", json::array({1, 2})},
                                 {"complexity", json::array({1, 3})},
                                 {"count", 5}}}};
    const SplitManifest b = manifest_from_json(grid);
    CHECK(b.cells.size() == 6);
    CHECK(b.total() == 30);
    CHECK(b.seed == 16);

    const SplitManifest c = manifest_from_json({{"builtin", "eval"}, {"seed", 1}, {"count", 2}});
    CHECK(c.cells.size() == 60);
    CHECK(c.total() == 120);
    CHECK(c.rule_distribution == RuleDistribution::Eval);

    CHECK_THROWS_AS(manifest_from_json({{"builtin", "nope"}}), SchemaError);
    CHECK_THROWS_AS(manifest_from_json({{"name", "x"}, {"seed", 1}}), SchemaError);
}

TEST_CASE("the emitted tables mirror the embedded ones") {
    const json t = tables_to_json();
    CHECK(t.at("composite_rules").size() == 23);
    CHECK(t.at("frequency_groups").size() == 6);
    CHECK(t.at("complexity_presets").size() == 6);
    CHECK(t.at("recipes").size() == 15);

    int hop2 = 0, hop3 = 0;
    for (const auto& r : t["composite_rules"]) {
        if (r.at("hop") == 2) ++hop2;
        if (r.at("hop") == 3) ++hop3;
        const auto* rule = find_rule(r.at("name").get<std::string>());
        REQUIRE(rule != nullptr);
        REQUIRE(r.at("path").size() == rule->path.size());
        for (std::size_t i = 0; i < rule->path.size(); ++i)
            CHECK(r.at("path")[i].get<std::string>() == std::string(to_string(rule->path[i])));
    }
    CHECK(hop2 == 14);
    CHECK(hop3 == 9);

    double weight_sum = 0;
    for (const auto& g : t["frequency_groups"]) weight_sum += g.at("weight").get<double>();
    CHECK(weight_sum == Catch::Approx(1.0));

    for (const auto& r : t["recipes"]) {
        long long total = 0;
        for (const auto& [family, b] : r.at("budget").items()) total += b.get<long long>();
        CHECK(total == 220000);
        CHECK(r.at("cells").size() == r.at("cell_count").get<std::size_t>());
    }

    // grammar templates: substituting a concrete tuple into the shipped
    // template reproduces the renderer's sentence
    const auto& grammar = t.at("surface_grammar");
    CHECK(grammar.at("event_sentences").size() == 9);
    const EventSurface gift{EventKind::Gift, "Alice", "Bob", "red ball", ""};
    std::string tpl = grammar["event_sentences"]["gift"]["active"].get<std::string>();
    auto subst = [](std::string s, const std::string& from, const std::string& to) {
        for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from))
            s.replace(pos, from.size(), to);
        return s;
    };
    tpl = subst(subst(subst(tpl, "{actor}", "Alice"), "{counterparty}", "Bob"), "{object}",
                "red ball");
    CHECK(tpl == render_event_sentence(gift, SurfaceVariant::Active));
    CHECK(grammar.at("kinship_frames").size() == 4);
    CHECK(grammar.at("rule_mention_frames").size() == 4);
}

TEST_CASE("grid reports round-trip through JSON and CSV carries every cell") {
    std::vector<VerdictRecord> records;
    for (int s = 0; s < 4; ++s) {
        records.push_back({"R", Family::Deductive, 3, 2, "x", s < 2});
        records.push_back({"R", Family::Abductive, 1, 1, "y", s < 1});
    }
    GridReport report = aggregate_verdicts(records, {1, 4});
    report.decoding = "greedy";
    attach_coverage(report, {{3, 2}});
    const json j = to_json(report);
    const GridReport back = report_from_json(j);
    CHECK(to_json(back) == j);

    const std::string csv = report_to_csv(report);
    CHECK(csv.find("recipe,family,depth,complexity") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + two cells
}

TEST_CASE("the reward server scores the three reward cases over the wire") {
    const Graph g = fixtures::worked_example();
    const TaskInstance x = make_deductive(g, 1)[0];
    const std::string gold = render_gold_solution(x);

    auto request = [&](const std::string& id, const std::string& text) {
        json j{{"v", schema::reward_request},
               {"id", id},
               {"family", std::string(to_string(x.family))},
               {"gold_trace", trace_to_json(x.gold_trace)},
               {"gold_answer", x.gold_answer},
               {"response_text", text}};
        return j.dump();
    };

    std::string broken_trace = gold;
    const auto cut_from = broken_trace.find("Step 4:");
    const auto cut_to = broken_trace.find("Step 5:");
    broken_trace = broken_trace.substr(0, cut_from) + broken_trace.substr(cut_to);

    std::string wrong_answer = gold;
    const std::string gold_answer = "Eric Aston Fairbanks";
    for (std::size_t pos = wrong_answer.find(gold_answer); pos != std::string::npos;
         pos = wrong_answer.find(gold_answer, pos))
        wrong_answer.replace(pos, gold_answer.size(), "Dustin Keith Ravenscroft");

    std::istringstream in(request("a", gold) + "\n" + request("b", broken_trace) + "\n" +
                          request("c", wrong_answer) + "\nnot json\n");
    std::ostringstream out;
    serve_lines(in, out);

    std::istringstream lines(out.str());
    std::string line;
    std::vector<json> responses;
    while (std::getline(lines, line)) responses.push_back(json::parse(line));
    REQUIRE(responses.size() == 4);
    CHECK(responses[0].at("reward") == 1.0);
    CHECK(responses[1].at("reward") == Catch::Approx(0.2));
    CHECK(responses[2].at("reward") == 0.0);
    CHECK(responses[0].at("id") == "a");
    CHECK(responses[1].at("id") == "b");
    CHECK(responses[2].at("id") == "c");
    CHECK(responses[3].contains("error"));
}

TEST_CASE("server verdicts are bit-identical to in-process verification") {
    const Graph g = generate_graph(6, 3, 2718);
    std::vector<TaskInstance> xs = make_deductive(g, 4);
    xs.push_back(make_abductive(g, 4));

    std::string wire_in;
    std::vector<Verdict> direct;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::string text = render_gold_solution(xs[i]);
        if (i % 2 == 1) text += " Therefore, the answer is wrong thing.";
        direct.push_back(verify_response(xs[i], text));
        json j{{"v", schema::reward_request},
               {"id", std::to_string(i)},
               {"family", std::string(to_string(xs[i].family))},
               {"gold_trace", trace_to_json(xs[i].gold_trace)},
               {"gold_answer", xs[i].gold_answer},
               {"response_text", text}};
        wire_in += j.dump() + "\n";
    }
    std::istringstream in(wire_in);
    std::ostringstream out;
    serve_lines(in, out);
    std::istringstream lines(out.str());
    std::string line;
    for (std::size_t i = 0; std::getline(lines, line); ++i) {
        const json r = json::parse(line);
        CHECK(r.at("A").get<int>() == direct[i].answer_match);
        CHECK(r.at("P").get<int>() == direct[i].process_match);
        CHECK(r.at("reward").get<double>() == direct[i].reward);
    }
}

TEST_CASE("a tcp round trip preserves per-connection order") {
    std::atomic<bool> stop{false};
    std::atomic<int> port{0};
    std::thread server([&] { serve_tcp(0, 0.8, &stop, &port); });
    while (port.load() == 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));

    const Graph g = fixtures::worked_example();
    const TaskInstance x = make_deductive(g, 1)[0];
    json req{{"v", schema::reward_request},
             {"id", "t1"},
             {"family", "deductive"},
             {"gold_trace", trace_to_json(x.gold_trace)},
             {"gold_answer", x.gold_answer},
             {"response_text", render_gold_solution(x)}};

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    REQUIRE(fd >= 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port.load()));
    REQUIRE(::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    const std::string payload = req.dump() + "\n";
    REQUIRE(::write(fd, payload.data(), payload.size()) ==
            static_cast<ssize_t>(payload.size()));
    std::string response;
    char buf[4096];
    while (response.find('\n') == std::string::npos) {
        const ssize_t got = ::read(fd, buf, sizeof buf);
        REQUIRE(got > 0);
        response.append(buf, static_cast<std::size_t>(got));
    }
    ::close(fd);
    const json r = json::parse(response.substr(0, response.find('\n')));
    CHECK(r.at("id") == "t1");
    CHECK(r.at("reward") == 1.0);

    stop.store(true);
    server.join();
}
