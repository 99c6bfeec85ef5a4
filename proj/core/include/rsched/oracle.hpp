#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rsched/schedule.hpp"

namespace rsched::oracle {

/// Enumeration guard: instances above these sizes are rejected with SizeError.
inline constexpr std::size_t kMaxTasks = 8;
inline constexpr std::size_t kMaxProcs = 3;

/// Throws SizeError when the instance exceeds the guard.
void check_size_guard(const Instance &instance);

/// Calls `visit` once for every legal schedule: every assignment of tasks to
/// processors crossed with every height-ordered arrangement of each
/// processor's tasks. Returns the number of schedules visited.
std::size_t enumerate_legal_schedules(const Instance &instance, const std::function<void(const Schedule &)> &visit);

/// Closed-form count of legal schedules: the sum over assignments of the
/// product, per processor and height, of (tasks in that class)!.
std::size_t count_legal_schedules(const Instance &instance);

/// Independent evaluator: discrete-event simulation for the makespan and the
/// four-index double sum for reliability cost.
ObjectiveVector simulate(const Schedule &schedule, const Instance &instance);

struct ExactFront {
    std::vector<ObjectiveVector> points; ///< sorted by makespan ascending
    std::vector<Schedule> witnesses;     ///< witnesses[k] attains points[k]
};

ExactFront exact_pareto_front(const Instance &instance);

/// Componentwise equality with relative tolerance.
bool same_point(const ObjectiveVector &a, const ObjectiveVector &b, double rel_tol = 1e-9);

struct FrontRow {
    ObjectiveVector exact;
    bool matched = false;
    ObjectiveVector nearest_found;
    double distance = 0.0; ///< normalized distance from the exact point to nearest_found
};

struct FrontDistance {
    double coverage = 0.0;  ///< fraction of exact points matched by some found point
    double deviation = 0.0; ///< max over found points of normalized distance to the nearest exact point
    std::vector<FrontRow> rows;
};

/// Distances are Euclidean after dividing each objective by the exact front's
/// range in that objective (or by its magnitude when the range is zero).
FrontDistance front_distance(std::span<const ObjectiveVector> found, const ExactFront &exact);

/// Columns: exact_makespan, exact_rc, matched, nearest_makespan, nearest_rc, deviation.
std::string front_distance_csv(const FrontDistance &report);

} // namespace rsched::oracle
