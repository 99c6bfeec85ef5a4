#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rsched/instance.hpp"
#include "rsched/nsga2.hpp"
#include "rsched/oracle.hpp"

namespace rsched::cli {

struct GenSummary {
    std::size_t edges = 0;
    double mean_exec = 0.0;
};

/// Generates an instance from `options` and writes it to `out_path`.
GenSummary cmd_gen(const GeneratorOptions &options, const std::filesystem::path &out_path, std::ostream &log);

struct RunConfig {
    std::filesystem::path instance_path;
    EvolutionConfig evolution;
    /// When unset the population is twice the task count.
    std::optional<std::size_t> pop_size;
    std::filesystem::path output_dir = ".";
    bool emit_stats = true;
};

/// Resolves the effective engine configuration for `instance`.
EvolutionConfig resolve_config(const RunConfig &config, const Instance &instance);

struct SolveResult {
    EvolutionConfig config;
    RunResult run;
    std::filesystem::path front_path;
    std::optional<std::filesystem::path> stats_path;
};

/// Runs the optimizer, writing front.csv (and stats.csv when requested) into the output directory.
SolveResult cmd_solve(const RunConfig &config, std::ostream &log);

struct FrontRow {
    double makespan = 0.0;
    double reliability_cost = 0.0;
    Schedule schedule;
};

/// Columns: makespan, reliability_cost (9 significant digits), schedule.
std::string front_csv(std::span<const Individual> front);
std::vector<FrontRow> parse_front_csv(std::string_view text);

struct EvalReport {
    ObjectiveVector objectives;
    Timing timing;
    std::optional<DeadlineReport> misses;
};

/// Throws ValidationError listing every violation when the schedule is illegal.
EvalReport cmd_eval(const std::filesystem::path &instance_path, const std::filesystem::path &schedule_path,
                    std::ostream &out);

struct OracleReport {
    oracle::ExactFront exact;
    std::vector<ObjectiveVector> found;
    oracle::FrontDistance distance;
};

/// Exact front versus the engine's front; writes oracle.csv into the output directory.
OracleReport cmd_oracle(const RunConfig &config, std::ostream &out);

enum class PaperCase { Case1, Case2 };

struct PaperCaseOptions {
    PaperCase which = PaperCase::Case1;
    std::uint64_t seed = 1;
    std::vector<std::size_t> generations{1, 5};
    double epsilon = 0.5;
    std::filesystem::path output_dir = ".";
};

struct PaperCaseRun {
    Distribution dist;
    std::size_t generations;
    std::filesystem::path front_path;
    std::vector<Individual> front;
};

struct PaperCaseResult {
    std::vector<PaperCaseRun> runs;
};

/// case1: 10 tasks on 2 processors, normal and exponential execution times.
/// case2: 50 tasks on 4 processors, normal execution times.
/// One front file per (distribution, generation count).
PaperCaseResult cmd_paper_case(const PaperCaseOptions &options, std::ostream &out);

} // namespace rsched::cli
