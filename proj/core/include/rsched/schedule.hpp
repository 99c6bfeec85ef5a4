#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsched/instance.hpp"

namespace rsched {

/// Chromosome: the execution order of every processor. Task i runs on
/// processor j iff i appears in proc_lists[j].
struct Schedule {
    std::vector<std::vector<std::size_t>> proc_lists;

    std::size_t n_procs() const noexcept { return proc_lists.size(); }
    /// Processor of every task; requires the partition property.
    std::vector<std::size_t> assignment(std::size_t n_tasks) const;

    bool operator==(const Schedule &) const = default;
};

struct Timing {
    std::vector<double> start;
    std::vector<double> finish;
    std::vector<double> earliest;
};

struct ObjectiveVector {
    double makespan = 0.0;
    double reliability_cost = 0.0;

    bool operator==(const ObjectiveVector &) const = default;
};

/// Longest predecessor chain ending at each task; 0 for sources.
/// Throws StructuralError on a cyclic graph.
std::vector<std::size_t> compute_heights(const TaskGraph &graph);

/// How random_schedule deals a shuffled height group to processors.
enum class Allocation {
    /// Processors, visited from the starting one onwards, take consecutive
    /// blocks of the shuffled group: each draws a block size uniformly between
    /// 0 and the number of tasks left, and the last processor takes the rest.
    RandomSplit,
    /// One task per processor in turn. Fixes the per-processor count of every
    /// height group, which crossover and mutation then preserve.
    RoundRobin,
};

std::string to_string(Allocation allocation);
std::optional<Allocation> parse_allocation(std::string_view text);

/// Random legal schedule: tasks are grouped by height, each group is shuffled
/// and dealt to processors starting at `first_proc` for the first group and
/// one processor further along for every later group. When `first_proc` is
/// empty it is drawn uniformly.
Schedule random_schedule(const Instance &instance, const std::vector<std::size_t> &heights, Rng &rng,
                         Allocation allocation = Allocation::RandomSplit,
                         std::optional<std::size_t> first_proc = std::nullopt);
Schedule random_schedule(const Instance &instance, Rng &rng);

/// Every task appears exactly once and every list is non-decreasing in height.
bool is_legal(const Schedule &schedule, const std::vector<std::size_t> &heights);
bool is_legal(const Schedule &schedule, const TaskGraph &graph);

struct MakespanResult {
    double makespan = 0.0;
    Timing timing;
};

/// List-scheduling evaluation: tasks run in list order on their processor and
/// wait for every predecessor's data. Throws ContractError on an illegal schedule.
MakespanResult evaluate_makespan(const Schedule &schedule, const Instance &instance);

double evaluate_reliability_cost(const Schedule &schedule, const Instance &instance);

ObjectiveVector evaluate(const Schedule &schedule, const Instance &instance);

/// Evaluators that skip the legality check; `heights` must belong to the instance.
class Evaluator {
  public:
    explicit Evaluator(const Instance &instance);

    const Instance &instance() const noexcept { return *instance_; }
    const std::vector<std::size_t> &heights() const noexcept { return heights_; }

    ObjectiveVector operator()(const Schedule &schedule) const;
    MakespanResult makespan(const Schedule &schedule) const;
    double reliability_cost(const Schedule &schedule) const;

  private:
    const Instance *instance_;
    std::vector<std::size_t> heights_;
};

struct DeadlineReport {
    std::size_t count = 0;
    std::vector<bool> missed;
};

/// Flags tasks whose finish time exceeds their deadline. Finish times are
/// never truncated to the deadline.
DeadlineReport deadline_misses(const Timing &timing, const std::vector<double> &deadlines);

/// One line per processor with comma-separated task indices; an empty line is an idle processor.
std::string format_schedule(const Schedule &schedule);
/// Single-line form with processors separated by '|', used inside CSV fields.
std::string format_schedule_inline(const Schedule &schedule);

/// Accepts both forms. Throws ParseError.
Schedule parse_schedule(std::string_view text);

/// Human-readable list of legality violations; empty iff is_legal.
std::vector<std::string> schedule_violations(const Schedule &schedule, const Instance &instance);

} // namespace rsched
