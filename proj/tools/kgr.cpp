// SPDX-License-Identifier: Apache-2.0
//
// kgr: generate knowledge-graph reasoning benchmarks, instantiate tasks,
// verify solution traces, compute rewards, and aggregate grid metrics.
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgr/io.hpp"
#include "kgr/server.hpp"
#include "kgr/tasks.hpp"

namespace {

using namespace kgr;

// KGR_DATA_DIR prefixes relative paths (environment overrides are for paths
// only).
std::string resolve_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    if (const char* base = std::getenv("KGR_DATA_DIR")) return std::string(base) + "/" + path;
    return path;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(resolve_path(path));
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(resolve_path(path));
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

json load_json(const std::string& path) {
    auto in = open_in(path);
    json j;
    in >> j;
    return j;
}

std::vector<int> parse_k_list(const std::string& s) {
    std::vector<int> ks;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) ks.push_back(std::stoi(tok));
    if (ks.empty()) throw std::runtime_error("empty --k list");
    return ks;
}

// ---------------------------------------------------------------------------

int cmd_generate(const std::string& manifest_path, const std::string& out_path,
                 const std::string& summary_path, bool count_only, int threads) {
    const SplitManifest manifest = manifest_from_json(load_json(manifest_path));
    if (!count_only && out_path.empty()) throw std::runtime_error("generate needs --out");
    if (count_only) {
        json j{{"v", schema::summary},
               {"split", manifest.name},
               {"cells", manifest_to_json(manifest)["cells"]},
               {"total", manifest.total()}};
        std::cout << j.dump() << "\n";
        return 0;
    }

    // Cell-parallel generation; output merged in (cell, index) order so the
    // bytes are independent of the thread count.
    std::vector<std::string> per_cell(manifest.cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t ci = next.fetch_add(1);
            if (ci >= manifest.cells.size()) return;
            const CellSpec& cell = manifest.cells[ci];
            std::string buffer;
            GenOptions opt{manifest.name_pool, manifest.rule_distribution};
            for (long long i = 0; i < cell.count; ++i) {
                Graph g = generate_graph(cell.depth, cell.complexity, graph_seed(manifest, cell, i),
                                         opt);
                g.id = manifest.name + "-d" + std::to_string(cell.depth) + "t" +
                       std::to_string(cell.complexity) + "-" + std::to_string(i);
                buffer += to_json(g).dump();
                buffer += '\n';
            }
            per_cell[ci] = std::move(buffer);
        }
    };
    std::vector<std::future<void>> futures;
    for (int t = 1; t < threads; ++t) futures.push_back(std::async(std::launch::async, worker));
    worker();
    for (auto& f : futures) f.get();

    auto out = open_out(out_path);
    ContentHash hash;
    long long total = 0;
    json cell_counts = json::array();
    for (std::size_t ci = 0; ci < manifest.cells.size(); ++ci) {
        out << per_cell[ci];
        hash.update(per_cell[ci]);
        total += manifest.cells[ci].count;
        cell_counts.push_back(json{{"depth", manifest.cells[ci].depth},
                                   {"complexity", manifest.cells[ci].complexity},
                                   {"count", manifest.cells[ci].count}});
    }
    json summary{{"v", schema::summary},
                 {"split", manifest.name},
                 {"total", total},
                 {"cells", std::move(cell_counts)},
                 {"content_hash", hash.hex()}};
    if (!summary_path.empty()) open_out(summary_path) << summary.dump(2) << "\n";
    std::cerr << "wrote " << total << " graphs, " << hash.hex() << "\n";
    return 0;
}

int cmd_render(const std::string& graphs_path, const std::string& out_path, std::uint64_t seed) {
    auto in = open_in(graphs_path);
    auto out = open_out(out_path);
    for_each_jsonl(in, schema::graph, [&](const json& j, std::size_t) {
        const Graph g = graph_from_json(j);
        out << story_to_json(g.id, render_story(g, nullptr, seed ? seed : g.seed)).dump() << "\n";
    });
    return 0;
}

int cmd_tasks(const std::string& graphs_path, const std::string& out_path, std::uint64_t seed,
              const std::string& families, bool with_story, const std::string& gold_path) {
    const bool want_ded = families.find("ded") != std::string::npos;
    const bool want_abd = families.find("abd") != std::string::npos;
    const bool want_ind = families.find("ind") != std::string::npos;
    const bool want_ana = families.find("ana") != std::string::npos;

    auto in = open_in(graphs_path);
    auto out = open_out(out_path);
    std::ofstream gold;
    if (!gold_path.empty()) gold = open_out(gold_path);
    long long count = 0;
    for_each_jsonl(in, schema::graph, [&](const json& j, std::size_t) {
        const Graph g = graph_from_json(j);
        const std::uint64_t story_seed = seed ? seed : g.seed;
        std::string story;
        if (with_story) story = render_story(g, nullptr, story_seed).text();

        auto emit = [&](TaskInstance x, const std::string& masked_story) {
            if (with_story) x.story = masked_story.empty() ? story : masked_story;
            if (gold.is_open())
                gold << json{{"v", schema::response},
                             {"id", x.id},
                             {"text", render_gold_solution(x)}}
                            .dump()
                     << "\n";
            out << to_json(x).dump() << "\n";
            ++count;
        };
        if (want_ded)
            for (auto& x : make_deductive(g, seed)) emit(std::move(x), "");
        if (want_abd) {
            MaskSpec spec;
            TaskInstance x = make_abductive(g, seed, &spec);
            emit(std::move(x),
                 with_story ? render_story(g, &spec, story_seed).text() : std::string());
        }
        if (want_ind && g.planted.has_inductive()) emit(make_inductive(g, seed), "");
        if (want_ana && g.planted.has_analogy()) emit(make_analogy(g, seed), "");
    });
    std::cerr << "wrote " << count << " task instances\n";
    return 0;
}

int cmd_prompt(const std::string& tasks_path, const std::string& target_id, int k,
               std::uint64_t seed, const std::string& out_path) {
    std::vector<TaskInstance> pool;
    const TaskInstance* target = nullptr;
    auto in = open_in(tasks_path);
    for_each_jsonl(in, schema::task,
                   [&](const json& j, std::size_t) { pool.push_back(task_from_json(j)); });
    for (const auto& x : pool)
        if (x.id == target_id) target = &x;
    if (!target) throw std::runtime_error("target instance not found: " + target_id);
    const std::string prompt = build_fewshot_prompt(*target, pool, k, seed);
    if (out_path.empty()) std::cout << prompt << "\n";
    else open_out(out_path) << prompt << "\n";
    return 0;
}

int cmd_verify(const std::string& tasks_path, const std::string& responses_path,
               const std::string& out_path, double process_ratio, const std::string& recipe,
               long long samples_per_instance) {
    std::map<std::string, TaskInstance> instances;
    {
        auto in = open_in(tasks_path);
        for_each_jsonl(in, schema::task, [&](const json& j, std::size_t) {
            TaskInstance x = task_from_json(j);
            instances[x.id] = std::move(x);
        });
    }
    std::map<std::string, long long> seen;
    auto in = open_in(responses_path);
    auto out = open_out(out_path);
    for_each_jsonl(in, schema::response, [&](const json& j, std::size_t line_no) {
        const std::string id = j.at("id").get<std::string>();
        const auto it = instances.find(id);
        if (it == instances.end())
            throw SchemaError("line " + std::to_string(line_no) + ": unknown instance id " + id);
        const Verdict v =
            verify_response(it->second, j.at("text").get<std::string>(), process_ratio);
        out << verdict_to_json(id, it->second, v, j.value("recipe", recipe)).dump() << "\n";
        ++seen[id];
    });
    if (samples_per_instance > 0)
        for (const auto& [id, n] : seen)
            if (n != samples_per_instance)
                throw std::runtime_error("instance " + id + " has " + std::to_string(n) +
                                         " responses, expected " +
                                         std::to_string(samples_per_instance));
    return 0;
}

std::vector<VerdictRecord> load_verdicts(const std::string& path) {
    std::vector<VerdictRecord> records;
    auto in = open_in(path);
    for_each_jsonl(in, schema::verdict, [&](const json& j, std::size_t) {
        records.push_back(verdict_record_from_json(j));
    });
    return records;
}

int cmd_score(const std::string& verdicts_path, const std::string& pre_path,
              const std::string& k_list, const std::string& out_path, const std::string& csv_path,
              const std::string& recipe, const std::string& decoding) {
    const auto ks = parse_k_list(k_list);
    GridReport report = aggregate_verdicts(load_verdicts(verdicts_path), ks);
    report.decoding = decoding;
    if (!pre_path.empty()) {
        const GridReport pre = aggregate_verdicts(load_verdicts(pre_path), ks);
        attach_gains(report, pre, *std::max_element(ks.begin(), ks.end()));
    }
    if (!recipe.empty()) {
        const Recipe* r = find_recipe(recipe);
        if (!r) throw std::runtime_error("unknown recipe: " + recipe);
        attach_coverage(report, std::set<Cell>(r->cells.begin(), r->cells.end()));
        for (auto& cell : report.cells)
            if (cell.recipe.empty()) cell.recipe = recipe;
    }
    if (out_path.empty()) std::cout << to_json(report).dump(2) << "\n";
    else open_out(out_path) << to_json(report).dump(2) << "\n";
    if (!csv_path.empty()) open_out(csv_path) << report_to_csv(report);
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out_dir) {
    std::vector<GridReport> reports;
    for (const auto& path : inputs) reports.push_back(report_from_json(load_json(path)));

    // Flat heatmap rows.
    std::ostringstream heat;
    heat << "recipe,family,depth,complexity,cg,sg,in_recipe\n";
    std::map<Family, std::map<std::string, CellValues>> cg;  // family -> recipe -> cells
    std::map<Family, std::map<std::tuple<std::string, int, int>, double>> pooled;
    for (const auto& report : reports) {
        for (const auto& c : report.cells) {
            if (!c.cg) throw std::runtime_error("report cell lacks CG; score with --pre first");
            heat << c.recipe << ',' << to_string(c.family) << ',' << c.depth << ',' << c.complexity
                 << ',' << json(*c.cg).dump() << ',' << (c.sg ? json(*c.sg).dump() : "") << ','
                 << (c.in_recipe ? (*c.in_recipe ? "true" : "false") : "") << '\n';
            cg[c.family][c.recipe][{c.depth, c.complexity}] = *c.cg;
            pooled[c.family][{c.recipe, c.depth, c.complexity}] = *c.cg;
        }
    }
    open_out(out_dir + "/heatmap.csv") << heat.str();

    for (Axis axis : {Axis::Depth, Axis::Complexity}) {
        std::ostringstream rank;
        rank << "family,recipe,mean_rank\n";
        for (const auto& [family, by_recipe] : cg) {
            if (by_recipe.size() < 2) continue;
            for (const auto& [name, value] : mean_rank(by_recipe, axis))
                rank << to_string(family) << ',' << name << ',' << json(value).dump() << '\n';
        }
        open_out(out_dir + (axis == Axis::Depth ? "/rank_depth.csv" : "/rank_complexity.csv"))
            << rank.str();
    }

    std::ostringstream corr;
    corr << "family_a,family_b,pearson_r,observations\n";
    for (auto a : kFamilies) {
        for (auto b : kFamilies) {
            if (static_cast<int>(a) >= static_cast<int>(b)) continue;
            if (!pooled.count(a) || !pooled.count(b)) continue;
            std::size_t common = 0;
            for (const auto& [key, v] : pooled[a])
                if (pooled[b].count(key)) ++common;
            if (common < 2) continue;
            corr << to_string(a) << ',' << to_string(b) << ','
                 << json(pearson(pooled[a], pooled[b])).dump() << ',' << common << '\n';
        }
    }
    open_out(out_dir + "/correlations.csv") << corr.str();
    return 0;
}

int cmd_sample(const std::string& tasks_path, const std::string& recipe_name,
               const std::string& schedule_kind, const std::string& axis, int blocks,
               const std::string& order, double replay, double scale, std::uint64_t seed,
               const std::string& out_path) {
    const Recipe* base = find_recipe(recipe_name);
    if (!base) throw std::runtime_error("unknown recipe: " + recipe_name);
    Recipe recipe = *base;
    if (scale != 1.0)
        for (auto& [family, budget] : recipe.family_budget)
            budget = std::max<long long>(1, llround(static_cast<double>(budget) * scale));

    Schedule schedule;
    schedule.kind =
        schedule_kind == "blocked" ? Schedule::Kind::Blocked : Schedule::Kind::Uniform;
    schedule.axis = axis == "depth" ? Axis::Depth : Axis::Complexity;
    schedule.blocks = blocks;
    schedule.order = order == "h2e" ? Schedule::Order::H2E : Schedule::Order::E2H;
    schedule.replay_fraction = replay;

    TaskPool pool;
    {
        auto in = open_in(tasks_path);
        for_each_jsonl(in, schema::task, [&](const json& j, std::size_t) {
            const auto family = family_from_string(j.at("family").get<std::string>());
            if (!family) throw SchemaError("unknown family");
            pool.ids[{{j.at("depth").get<int>(), j.at("complexity").get<int>()}, *family}]
                .push_back(j.at("id").get<std::string>());
        });
    }

    const auto streams = sample_stage_streams(recipe, schedule, pool, seed);
    auto out = open_out(out_path);
    long long seq = 0;
    for (const auto& stream : streams) {
        for (const auto& item : stream) {
            out << json{{"v", schema::stream},
                        {"stage", item.stage},
                        {"seq", seq++},
                        {"family", std::string(to_string(item.family))},
                        {"depth", item.cell.first},
                        {"complexity", item.cell.second},
                        {"id", item.id},
                        {"replay", item.replay}}
                       .dump()
                << "\n";
        }
    }
    std::cerr << "wrote " << seq << " stream items in " << streams.size() << " stage(s)\n";
    return 0;
}

int cmd_serve(int tcp_port, double process_ratio) {
    if (tcp_port >= 0) {
        std::atomic<int> bound{0};
        std::cerr << "reward server listening on tcp port " << (tcp_port ? tcp_port : 0) << "\n";
        return serve_tcp(tcp_port, process_ratio, nullptr, &bound);
    }
    serve_lines(std::cin, std::cout, process_ratio);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge-graph reasoning benchmark toolkit"};
    app.require_subcommand(1);

    std::string manifest, out, summary, graphs, tasks, responses, verdicts, pre, csv, recipe,
        decoding, target_id, gold_responses, families = "ded,abd,ind,ana", k_list = "1,128", schedule = "uniform",
        axis = "complexity", order = "e2h", out_dir = ".";
    std::vector<std::string> report_inputs;
    std::uint64_t seed = 0;
    int threads = 1, k = 3, blocks = 3, tcp_port = -1;
    long long samples_per_instance = 0;
    double process_ratio = 0.8, replay = 0.0, scale = 1.0;
    bool count_only = false, no_story = false;

    auto* generate = app.add_subcommand("generate", "generate graphs from a split manifest");
    generate->add_option("--manifest", manifest)->required();
    generate->add_option("--out", out);
    generate->add_option("--summary", summary);
    generate->add_flag("--count-only", count_only, "print totals without materializing graphs");
    generate->add_option("--threads", threads);

    auto* render = app.add_subcommand("render", "render stories from graphs");
    render->add_option("--graphs", graphs)->required();
    render->add_option("--out", out)->required();
    render->add_option("--seed", seed);

    auto* taskcmd = app.add_subcommand("tasks", "instantiate task families from graphs");
    taskcmd->add_option("--graphs", graphs)->required();
    taskcmd->add_option("--out", out)->required();
    taskcmd->add_option("--seed", seed);
    taskcmd->add_option("--families", families, "comma list: ded,abd,ind,ana");
    taskcmd->add_flag("--no-story", no_story);
    taskcmd->add_option("--gold-responses", gold_responses,
                        "also write gold solutions as a response JSONL");

    auto* prompt = app.add_subcommand("prompt", "assemble a cell-matched few-shot prompt");
    prompt->add_option("--tasks", tasks)->required();
    prompt->add_option("--target", target_id)->required();
    prompt->add_option("--k", k);
    prompt->add_option("--seed", seed);
    prompt->add_option("--out", out);

    auto* verify = app.add_subcommand("verify", "verify responses against gold traces");
    verify->add_option("--tasks", tasks)->required();
    verify->add_option("--responses", responses)->required();
    verify->add_option("--out", out)->required();
    verify->add_option("--process-ratio", process_ratio);
    verify->add_option("--recipe", recipe, "recipe label stamped on verdicts");
    verify->add_option("--samples-per-instance", samples_per_instance,
                       "require exactly this many responses per instance");

    auto* score = app.add_subcommand("score", "aggregate verdicts into a grid report");
    score->add_option("--verdicts", verdicts)->required();
    score->add_option("--pre", pre, "baseline verdicts for SG/CG");
    score->add_option("--k", k_list, "pass@k list, e.g. 1,8,128");
    score->add_option("--out", out);
    score->add_option("--csv", csv);
    score->add_option("--recipe", recipe, "recipe for in/out-of-recipe flags");
    score->add_option("--decoding", decoding, "decoding metadata recorded on the report");

    auto* report = app.add_subcommand("report", "rank/correlation/heatmap CSVs from reports");
    report->add_option("--in", report_inputs)->required();
    report->add_option("--out-dir", out_dir);

    auto* sample = app.add_subcommand("sample", "sample recipe/schedule task streams");
    sample->add_option("--tasks", tasks)->required();
    sample->add_option("--recipe", recipe)->required();
    sample->add_option("--schedule", schedule, "uniform or blocked");
    sample->add_option("--axis", axis, "depth or complexity");
    sample->add_option("--blocks", blocks);
    sample->add_option("--order", order, "e2h or h2e");
    sample->add_option("--replay", replay, "replay fraction");
    sample->add_option("--scale", scale, "scale family budgets for small pools");
    sample->add_option("--seed", seed);
    sample->add_option("--out", out)->required();

    auto* tables = app.add_subcommand("tables", "emit rule/preset/recipe tables as JSON");
    tables->add_option("--out", out);

    auto* serve = app.add_subcommand("serve", "reward server over stdio or tcp");
    serve->add_option("--tcp", tcp_port, "tcp port (default: stdio transport)");
    serve->add_option("--process-ratio", process_ratio);

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed())
            return cmd_generate(manifest, out, summary, count_only, std::max(1, threads));
        if (render->parsed()) return cmd_render(graphs, out, seed);
        if (taskcmd->parsed())
            return cmd_tasks(graphs, out, seed, families, !no_story, gold_responses);
        if (prompt->parsed()) return cmd_prompt(tasks, target_id, k, seed, out);
        if (verify->parsed())
            return cmd_verify(tasks, responses, out, process_ratio, recipe, samples_per_instance);
        if (score->parsed())
            return cmd_score(verdicts, pre, k_list, out, csv, recipe, decoding);
        if (report->parsed()) return cmd_report(report_inputs, out_dir);
        if (sample->parsed())
            return cmd_sample(tasks, recipe, schedule, axis, blocks, order, replay, scale, seed,
                              out);
        if (tables->parsed()) {
            if (out.empty()) std::cout << tables_to_json().dump(2) << "\n";
            else open_out(out) << tables_to_json().dump(2) << "\n";
            return 0;
        }
        if (serve->parsed()) return cmd_serve(tcp_port, process_ratio);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
