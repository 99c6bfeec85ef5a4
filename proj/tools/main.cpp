#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "rsched/error.hpp"

namespace {

struct NullBuffer : std::streambuf {
    int overflow(int c) override { return c; }
};

void add_evolution_flags(CLI::App &cmd, rsched::cli::RunConfig &config, std::size_t &pop_size,
                         std::string &allocation) {
    cmd.add_option("-i,--instance", config.instance_path, "Instance file")->required()->check(CLI::ExistingFile);
    cmd.add_option("-g,--generations", config.evolution.generations, "Generations to evolve")
        ->capture_default_str();
    cmd.add_option("--pop-size", pop_size, "Population size (default: twice the task count)");
    cmd.add_option("--pc", config.evolution.p_crossover, "Crossover probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--pm", config.evolution.p_mutation, "Mutation probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--tournament", config.evolution.tournament_size, "Tournament size")->capture_default_str();
    cmd.add_option("--threads", config.evolution.threads, "Offspring evaluation threads")->capture_default_str();
    cmd.add_option("--allocation", allocation, "Initial dealing of height groups to processors")
        ->capture_default_str()
        ->check(CLI::IsMember({"split", "round-robin"}));
}

} // namespace

int main(int argc, char **argv) {
    using namespace rsched;
    CLI::App app{"Bi-objective (makespan, reliability cost) DAG scheduling with NSGA-II"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    bool quiet = false;
    app.add_option("--seed", seed, "Random seed")->capture_default_str();
    app.add_option("--out-dir", out_dir, "Directory for output files")->capture_default_str();
    app.add_flag("-q,--quiet", quiet, "Suppress progress output");

    // gen
    auto *gen = app.add_subcommand("gen", "Generate a random instance (P-method DAG)");
    gen->fallthrough();
    GeneratorOptions gen_options;
    std::string dist_name = "normal";
    std::filesystem::path gen_out;
    gen->add_option("-n,--tasks", gen_options.n_tasks, "Task count")->capture_default_str()->check(
        CLI::PositiveNumber);
    gen->add_option("-m,--procs", gen_options.n_procs, "Processor count")->capture_default_str()->check(
        CLI::PositiveNumber);
    gen->add_option("-e,--epsilon", gen_options.epsilon, "Edge probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    gen->add_option("-d,--dist", dist_name, "Execution-time distribution")
        ->capture_default_str()
        ->check(CLI::IsMember({"normal", "exponential", "exp"}));
    gen->add_option("--mean", gen_options.mean_exec, "Mean execution time")->capture_default_str()->check(
        CLI::PositiveNumber);
    gen->add_option("--delay-min", gen_options.link_delay_min, "Smallest link delay per byte")->capture_default_str();
    gen->add_option("--delay-max", gen_options.link_delay_max, "Largest link delay per byte")->capture_default_str();
    bool no_deadlines = false;
    gen->add_flag("--no-deadlines", no_deadlines, "Omit task deadlines");
    gen->add_option("-o,--out", gen_out, "Output file (default: <out-dir>/instance.txt)");

    // solve
    auto *solve = app.add_subcommand("solve", "Run NSGA-II and write the Pareto front");
    solve->fallthrough();
    cli::RunConfig solve_config;
    std::size_t solve_pop = 0;
    std::string solve_allocation = "split";
    add_evolution_flags(*solve, solve_config, solve_pop, solve_allocation);
    bool no_stats = false;
    solve->add_flag("--no-stats", no_stats, "Skip the per-generation statistics file");

    // eval
    auto *eval = app.add_subcommand("eval", "Evaluate a schedule file against an instance");
    eval->fallthrough();
    std::filesystem::path eval_instance, eval_schedule;
    eval->add_option("-i,--instance", eval_instance, "Instance file")->required()->check(CLI::ExistingFile);
    eval->add_option("-s,--schedule", eval_schedule, "Schedule file")->required()->check(CLI::ExistingFile);

    // oracle
    auto *orc = app.add_subcommand("oracle", "Compare the engine against the exhaustive front");
    orc->fallthrough();
    cli::RunConfig oracle_config;
    std::size_t oracle_pop = 0;
    std::string oracle_allocation = "split";
    add_evolution_flags(*orc, oracle_config, oracle_pop, oracle_allocation);

    // paper-case
    auto *paper = app.add_subcommand("paper-case", "Run the 10-task/2-processor and 50-task/4-processor case studies");
    paper->fallthrough();
    std::string case_name = "case1";
    cli::PaperCaseOptions paper_options;
    paper->add_option("-c,--case", case_name, "case1 (10 tasks, 2 procs) or case2 (50 tasks, 4 procs)")
        ->capture_default_str()
        ->check(CLI::IsMember({"case1", "case2"}));
    paper->add_option("-g,--generations", paper_options.generations, "Generation counts to run")
        ->capture_default_str();
    paper->add_option("-e,--epsilon", paper_options.epsilon, "Edge probability")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e);
    }

    NullBuffer null_buffer;
    std::ostream null_stream(&null_buffer);
    std::ostream &log = quiet ? null_stream : std::cout;

    try {
        if (*gen) {
            gen_options.dist = *parse_distribution(dist_name);
            gen_options.seed = seed;
            gen_options.with_deadlines = !no_deadlines;
            cli::cmd_gen(gen_options, gen_out.empty() ? out_dir / "instance.txt" : gen_out, log);
        } else if (*solve) {
            solve_config.evolution.seed = seed;
            solve_config.output_dir = out_dir;
            solve_config.emit_stats = !no_stats;
            solve_config.evolution.allocation = *parse_allocation(solve_allocation);
            if (solve->count("--pop-size"))
                solve_config.pop_size = solve_pop;
            cli::cmd_solve(solve_config, log);
        } else if (*eval) {
            cli::cmd_eval(eval_instance, eval_schedule, std::cout);
        } else if (*orc) {
            oracle_config.evolution.seed = seed;
            oracle_config.output_dir = out_dir;
            oracle_config.evolution.allocation = *parse_allocation(oracle_allocation);
            if (orc->count("--pop-size"))
                oracle_config.pop_size = oracle_pop;
            cli::cmd_oracle(oracle_config, std::cout);
        } else if (*paper) {
            paper_options.which = case_name == "case1" ? cli::PaperCase::Case1 : cli::PaperCase::Case2;
            paper_options.seed = seed;
            paper_options.output_dir = out_dir;
            cli::cmd_paper_case(paper_options, log);
        }
    } catch (const ParameterError &e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
