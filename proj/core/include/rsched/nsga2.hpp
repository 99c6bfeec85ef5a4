#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rsched/schedule.hpp"

namespace rsched {

struct Individual {
    Schedule schedule;
    ObjectiveVector objectives;
    std::optional<std::size_t> rank; ///< front index, 0 = best
    std::optional<double> crowding;  ///< +infinity for front extremes
};

struct Population {
    std::vector<Individual> members;
    std::size_t generation = 0;
};

struct EvolutionConfig {
    std::size_t pop_size = 20;
    std::size_t generations = 100;
    double p_crossover = 0.9;
    double p_mutation = 0.1;
    std::uint64_t seed = 1;
    std::size_t tournament_size = 2;
    Allocation allocation = Allocation::RandomSplit;
    /// Worker threads used to evaluate offspring. Results do not depend on it.
    std::size_t threads = 1;
};

/// Crossover 0.9, mutation 0.1, population twice the task count.
EvolutionConfig default_config(const Instance &instance);

/// Throws ParameterError naming the first broken field.
void validate_config(const EvolutionConfig &config);

/// Pareto dominance for minimization.
bool dominates(const ObjectiveVector &a, const ObjectiveVector &b);

using Front = std::vector<std::size_t>;

/// Fronts in order of rank; each front lists member indices ascending.
std::vector<Front> fast_nondominated_sort(std::span<const ObjectiveVector> objectives);

/// Crowding distance of every member of `front`, in the same order as `front`.
std::vector<double> assign_crowding(const Front &front, std::span<const ObjectiveVector> objectives);

/// Sorts `members` into fronts and stores rank and crowding on each.
std::vector<Front> rank_and_crowd(std::span<Individual> members);

/// Crowded-comparison order: lower rank, then larger crowding, then lower index.
/// Throws ContractError if either member is unranked.
bool crowded_precedes(std::span<const Individual> members, std::size_t a, std::size_t b);

/// Index of the winner of a tournament drawn uniformly with replacement.
std::size_t tournament_select(std::span<const Individual> members, std::size_t tournament_size, Rng &rng);

/// Cut position of every processor list: number of leading tasks with height <= cut.
std::vector<std::size_t> crossover_sites(const Schedule &s, const std::vector<std::size_t> &heights,
                                         std::size_t cut);

/// Children keep each parent's per-processor prefix up to `cut` and swap the suffixes.
std::pair<Schedule, Schedule> crossover_at(const Schedule &a, const Schedule &b,
                                           const std::vector<std::size_t> &heights, std::size_t cut);

/// Draws the cut uniformly on {0, ..., max height}, then crossover_at.
std::pair<Schedule, Schedule> crossover(const Schedule &a, const Schedule &b, const std::vector<std::size_t> &heights,
                                        Rng &rng);
/// Checked variant; throws ContractError if a parent is illegal.
std::pair<Schedule, Schedule> crossover(const Schedule &a, const Schedule &b, const TaskGraph &graph, Rng &rng);

/// Exchanges the positions of two tasks (possibly on different processors).
Schedule swap_tasks(const Schedule &s, std::size_t first, std::size_t second);

/// Swaps a uniformly drawn task with a uniformly drawn distinct task of the
/// same height; returns `s` unchanged when the drawn task has no such partner.
Schedule mutate(const Schedule &s, const std::vector<std::size_t> &heights, Rng &rng);
Schedule mutate(const Schedule &s, const TaskGraph &graph, Rng &rng);

/// Evaluates every schedule, splitting the work over `threads` workers.
std::vector<ObjectiveVector> evaluate_all(std::span<const Schedule> schedules, const Evaluator &evaluator,
                                          std::size_t threads);

/// N_pop random legal schedules, evaluated, ranked and crowded. Member k
/// starts dealing on processor k mod M.
Population initial_population(const Evaluator &evaluator, const EvolutionConfig &config, Rng &rng);

/// Child population Q_t. Per pair the stream is consumed as: two tournaments,
/// the crossover coin (plus the cut when crossing), then the mutation coin and
/// mutation draws of the first child, then those of the second child.
std::vector<Individual> make_offspring(const Population &population, const EvolutionConfig &config,
                                       const Evaluator &evaluator, Rng &rng);

/// One elitist step: P_t and Q_t are pooled, sorted into fronts and truncated
/// back to N_pop, filling the last admitted front by descending crowding.
Population evolve_generation(const Population &population, const EvolutionConfig &config,
                             const Evaluator &evaluator, Rng &rng);

struct GenerationStats {
    std::size_t generation = 0;
    double best_makespan = 0.0;
    double best_rc = 0.0;
    double mean_makespan = 0.0;
    double mean_rc = 0.0;
    std::size_t front0_size = 0;
};

GenerationStats summarize(const Population &population);

struct RunResult {
    /// Final rank-0 members, deduplicated by objective vector, by makespan ascending.
    std::vector<Individual> front;
    /// One row per generation, including generation 0.
    std::vector<GenerationStats> stats;
    Population final_population;
};

RunResult run(const Instance &instance, const EvolutionConfig &config);

/// Rank-0 members of `population`, deduplicated by objective vector and
/// sorted by (makespan, reliability cost).
std::vector<Individual> reported_front(const Population &population);

std::string stats_csv(std::span<const GenerationStats> stats);

} // namespace rsched
