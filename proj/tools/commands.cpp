#include "commands.hpp"

#include <charconv>
#include <cstdio>
#include <numeric>

#include "rsched/error.hpp"
#include "rsched/io.hpp"

namespace rsched::cli {

namespace {

std::string scientific9(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.8e", value);
    return buf;
}

void ensure_directory(const std::filesystem::path &dir) {
    if (!dir.empty())
        std::filesystem::create_directories(dir);
}

double parse_number(std::string_view token, const char *field) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(field, "expected a number, got '" + std::string(token) + "'");
    return value;
}

} // namespace

GenSummary cmd_gen(const GeneratorOptions &options, const std::filesystem::path &out_path, std::ostream &log) {
    const Instance instance = generate_instance(options);
    if (out_path.has_parent_path())
        ensure_directory(out_path.parent_path());
    save_instance(instance, out_path);

    GenSummary summary;
    summary.edges = instance.graph.edge_count();
    const auto values = instance.platform.exec_time.values();
    summary.mean_exec = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    log << "wrote " << out_path.string() << ": " << instance.n_tasks() << " tasks, " << instance.n_procs()
        << " processors, " << summary.edges << " edges, mean exec time " << summary.mean_exec << '\n';
    return summary;
}

EvolutionConfig resolve_config(const RunConfig &config, const Instance &instance) {
    EvolutionConfig resolved = config.evolution;
    resolved.pop_size = config.pop_size.value_or(2 * instance.n_tasks());
    validate_config(resolved);
    return resolved;
}

std::string front_csv(std::span<const Individual> front) {
    std::string out = "makespan,reliability_cost,schedule\n";
    for (const auto &ind : front)
        out += format_double(ind.objectives.makespan) + ',' + scientific9(ind.objectives.reliability_cost) + ",\"" +
               format_schedule_inline(ind.schedule) + "\"\n";
    return out;
}

std::vector<FrontRow> parse_front_csv(std::string_view text) {
    std::vector<FrontRow> rows;
    bool header = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty())
            continue;
        if (header) {
            header = false;
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos)
            throw ParseError("front row", "expected three columns");
        FrontRow row;
        row.makespan = parse_number(line.substr(0, c1), "makespan");
        row.reliability_cost = parse_number(line.substr(c1 + 1, c2 - c1 - 1), "reliability_cost");
        auto sched = line.substr(c2 + 1);
        if (sched.size() >= 2 && sched.front() == '"' && sched.back() == '"')
            sched = sched.substr(1, sched.size() - 2);
        row.schedule = parse_schedule(sched);
        rows.push_back(std::move(row));
    }
    return rows;
}

SolveResult cmd_solve(const RunConfig &config, std::ostream &log) {
    const Instance instance = load_instance(config.instance_path);
    SolveResult result;
    result.config = resolve_config(config, instance);
    result.run = run(instance, result.config);

    ensure_directory(config.output_dir);
    result.front_path = config.output_dir / "front.csv";
    write_file_atomic(result.front_path, front_csv(result.run.front));
    if (config.emit_stats) {
        result.stats_path = config.output_dir / "stats.csv";
        write_file_atomic(*result.stats_path, stats_csv(result.run.stats));
    }

    const auto &c = result.config;
    log << "pop_size=" << c.pop_size << " generations=" << c.generations << " pC=" << c.p_crossover
        << " pM=" << c.p_mutation << " seed=" << c.seed << '\n';
    log << "front size " << result.run.front.size();
    if (!result.run.front.empty())
        log << ", best makespan " << result.run.front.front().objectives.makespan << ", best reliability cost "
            << scientific9(result.run.front.back().objectives.reliability_cost);
    log << '\n' << "wrote " << result.front_path.string() << '\n';
    if (result.stats_path)
        log << "wrote " << result.stats_path->string() << '\n';
    return result;
}

EvalReport cmd_eval(const std::filesystem::path &instance_path, const std::filesystem::path &schedule_path,
                    std::ostream &out) {
    const Instance instance = load_instance(instance_path);
    const Schedule schedule = parse_schedule(read_file(schedule_path));
    const auto violations = schedule_violations(schedule, instance);
    if (!violations.empty()) {
        std::string message = "illegal schedule:";
        for (const auto &v : violations)
            message += "\n  " + v;
        throw ValidationError(message);
    }

    EvalReport report;
    auto makespan = evaluate_makespan(schedule, instance);
    report.objectives = {makespan.makespan, evaluate_reliability_cost(schedule, instance)};
    report.timing = std::move(makespan.timing);
    if (instance.deadlines)
        report.misses = deadline_misses(report.timing, *instance.deadlines);

    out << "makespan " << format_double(report.objectives.makespan) << '\n';
    out << "reliability_cost " << scientific9(report.objectives.reliability_cost) << '\n';
    out << "task,processor,start,finish";
    if (report.misses)
        out << ",deadline,missed";
    out << '\n';
    const auto proc_of = schedule.assignment(instance.n_tasks());
    for (std::size_t i = 0; i < instance.n_tasks(); ++i) {
        out << i << ',' << proc_of[i] << ',' << format_double(report.timing.start[i]) << ','
            << format_double(report.timing.finish[i]);
        if (report.misses)
            out << ',' << format_double((*instance.deadlines)[i]) << ',' << (report.misses->missed[i] ? 1 : 0);
        out << '\n';
    }
    if (report.misses)
        out << "deadline_misses " << report.misses->count << '\n';
    return report;
}

OracleReport cmd_oracle(const RunConfig &config, std::ostream &out) {
    const Instance instance = load_instance(config.instance_path);
    oracle::check_size_guard(instance);
    const EvolutionConfig engine = resolve_config(config, instance);

    OracleReport report;
    report.exact = oracle::exact_pareto_front(instance);
    const auto result = run(instance, engine);
    for (const auto &ind : result.front)
        report.found.push_back(ind.objectives);
    report.distance = oracle::front_distance(report.found, report.exact);

    ensure_directory(config.output_dir);
    write_file_atomic(config.output_dir / "oracle.csv", oracle::front_distance_csv(report.distance));

    out << "coverage " << report.distance.coverage << '\n';
    out << "deviation " << report.distance.deviation << '\n';
    out << "exact front (" << report.exact.points.size() << " points)\n";
    for (std::size_t k = 0; k < report.exact.points.size(); ++k)
        out << "  " << format_double(report.exact.points[k].makespan) << ' '
            << scientific9(report.exact.points[k].reliability_cost) << ' '
            << format_schedule_inline(report.exact.witnesses[k]) << '\n';
    out << "engine front (" << result.front.size() << " points)\n";
    for (const auto &ind : result.front)
        out << "  " << format_double(ind.objectives.makespan) << ' ' << scientific9(ind.objectives.reliability_cost)
            << ' ' << format_schedule_inline(ind.schedule) << '\n';
    return report;
}

PaperCaseResult cmd_paper_case(const PaperCaseOptions &options, std::ostream &out) {
    const bool first = options.which == PaperCase::Case1;
    const std::string name = first ? "case1" : "case2";
    std::vector<Distribution> dists{Distribution::Normal};
    if (first)
        dists.push_back(Distribution::Exponential);

    ensure_directory(options.output_dir);
    PaperCaseResult result;
    for (Distribution dist : dists) {
        GeneratorOptions gen;
        gen.n_tasks = first ? 10 : 50;
        gen.n_procs = first ? 2 : 4;
        gen.epsilon = options.epsilon;
        gen.dist = dist;
        gen.seed = options.seed;
        const Instance instance = generate_instance(gen);
        const std::string stem = name + "_" + to_string(dist);
        save_instance(instance, options.output_dir / (stem + "_instance.txt"));

        for (std::size_t generations : options.generations) {
            EvolutionConfig config = default_config(instance);
            config.generations = generations;
            config.seed = options.seed;
            auto run_result = run(instance, config);

            PaperCaseRun entry{dist, generations, options.output_dir / (stem + "_g" + std::to_string(generations) +
                                                                        "_front.csv"),
                               std::move(run_result.front)};
            write_file_atomic(entry.front_path, front_csv(entry.front));
            out << stem << " generations=" << generations << " front size " << entry.front.size()
                << " -> " << entry.front_path.string() << '\n';
            result.runs.push_back(std::move(entry));
        }
    }
    return result;
}

} // namespace rsched::cli
