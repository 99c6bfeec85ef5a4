#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rsched/matrix.hpp"

namespace rsched {

/// The single random stream threaded through every generator and the optimizer.
using Rng = std::mt19937_64;

/// Task DAG. `predecessors[i]` lists the immediate predecessors of task i in
/// ascending order; `data_volume(k, l)` is the number of bytes task k sends to
/// task l and is nonzero exactly on edges.
struct TaskGraph {
    std::size_t n_tasks = 0;
    std::vector<std::vector<std::size_t>> predecessors;
    Matrix<double> data_volume;

    /// Builds the graph whose edges are the nonzero entries of `volumes`.
    static TaskGraph from_volumes(Matrix<double> volumes);

    std::size_t edge_count() const;
    /// Immediate successors of every task, ascending.
    std::vector<std::vector<std::size_t>> successors() const;

    bool operator==(const TaskGraph &) const = default;
};

struct Platform {
    std::size_t n_procs = 0;
    Matrix<double> exec_time;    ///< tasks x procs, time units
    std::vector<double> proc_failure;  ///< per processor, failures per time unit
    Matrix<double> link_failure; ///< procs x procs, zero diagonal
    Matrix<double> link_delay;   ///< procs x procs, time per byte, zero diagonal

    bool operator==(const Platform &) const = default;
};

struct Instance {
    TaskGraph graph;
    Platform platform;
    std::optional<std::vector<double>> deadlines;

    std::size_t n_tasks() const noexcept { return graph.n_tasks; }
    std::size_t n_procs() const noexcept { return platform.n_procs; }

    bool operator==(const Instance &) const = default;
};

enum class Distribution { Exponential, Normal };

std::string to_string(Distribution dist);
/// Accepts "exponential"/"exp" and "normal" (case-sensitive).
std::optional<Distribution> parse_distribution(std::string_view text);

/// Kahn order with ties taken lowest index first; nullopt when the graph has a cycle.
std::optional<std::vector<std::size_t>> topological_order(const TaskGraph &graph);

/// Returns one human-readable entry per violated invariant; empty when the instance is well formed.
std::vector<std::string> validate(const Instance &instance);

/// Strict upper-triangular 0/1 adjacency matrix; each entry above the diagonal
/// is an independent Bernoulli(epsilon) trial, drawn row by row.
Matrix<int> generate_pmethod(std::size_t n, double epsilon, Rng &rng);

/// Floor applied to execution-time and slack draws so normal draws stay strictly positive.
inline constexpr double kMinDuration = 0.001;

/// Normal draws use a standard deviation of `kNormalSpreadRatio * mean`.
inline constexpr double kNormalSpreadRatio = 0.25;

/// One draw from `dist` with the given mean, clamped to kMinDuration.
double draw_duration(Distribution dist, double mean, Rng &rng);

Matrix<double> generate_exec_times(std::size_t n, std::size_t m, Distribution dist, double mean, Rng &rng);

/// Integer volumes uniform on {1, ..., 10} on every edge of `adjacency`, zero elsewhere.
Matrix<double> generate_data_volumes(const Matrix<int> &adjacency, Rng &rng);

inline constexpr double kFailureRateMin = 0.0000075;
inline constexpr double kFailureRateMax = 0.0000125;

struct FailureRates {
    std::vector<double> proc;
    Matrix<double> link;
};

FailureRates generate_failure_rates(std::size_t m, Rng &rng);

/// Off-diagonal entries uniform on [lo, hi], zero diagonal.
Matrix<double> generate_link_delays(std::size_t m, double lo, double hi, Rng &rng);

/// Assignment-independent earliest-start bound: 0 for sources, otherwise the
/// max over predecessors p of (bound(p) + fastest execution time of p).
std::vector<double> earliest_start_bounds(const TaskGraph &graph, const Matrix<double> &exec_time);

/// Worst-case incoming communication time of each task: max over predecessors
/// of volume times the largest link delay.
std::vector<double> communication_bounds(const TaskGraph &graph, const Matrix<double> &link_delay);

/// d_i = earliest-start bound + slowest execution time + random slack + communication bound.
/// The slack is drawn from `dist` with mean equal to the task's mean execution
/// time, one draw per task in index order.
std::vector<double> generate_deadlines(const TaskGraph &graph, const Platform &platform, Distribution dist,
                                       Rng &rng);

struct GeneratorOptions {
    std::size_t n_tasks = 10;
    std::size_t n_procs = 2;
    double epsilon = 0.5;
    Distribution dist = Distribution::Normal;
    double mean_exec = 5.0;
    double link_delay_min = 0.1;
    double link_delay_max = 1.0;
    bool with_deadlines = true;
    std::uint64_t seed = 1;
};

/// Composes every generator into a complete instance. Draw order: adjacency,
/// execution times, data volumes, failure rates, link delays, deadlines.
Instance generate_instance(const GeneratorOptions &options);

/// Text serialization; the layout is described in docs/instance-format.md.
inline constexpr int kInstanceFormatVersion = 1;

std::string serialize_instance(const Instance &instance);
/// Throws ParseError, VersionError, or ValidationError.
Instance parse_instance(std::string_view text);

/// Writes atomically (temp file + rename).
void save_instance(const Instance &instance, const std::filesystem::path &destination);
Instance load_instance(const std::filesystem::path &source);

} // namespace rsched
