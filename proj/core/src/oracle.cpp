#include "rsched/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "rsched/error.hpp"
#include "rsched/io.hpp"
#include "rsched/nsga2.hpp"

namespace rsched::oracle {

namespace {

// Longest incoming path length, memoized DFS over the volume matrix. Kept
// separate from compute_heights so the enumeration does not share its code.
std::vector<std::size_t> path_depths(const Instance &instance) {
    const std::size_t n = instance.n_tasks();
    const auto &volume = instance.graph.data_volume;
    std::vector<std::size_t> depth(n, 0);
    std::vector<int> state(n, 0); // 0 = new, 1 = on stack, 2 = done
    std::function<std::size_t(std::size_t)> visit = [&](std::size_t v) -> std::size_t {
        if (state[v] == 2)
            return depth[v];
        if (state[v] == 1)
            throw StructuralError("precedence graph contains a cycle");
        state[v] = 1;
        std::size_t d = 0;
        for (std::size_t u = 0; u < n; ++u)
            if (volume(u, v) != 0.0)
                d = std::max(d, visit(u) + 1);
        state[v] = 2;
        depth[v] = d;
        return d;
    };
    for (std::size_t v = 0; v < n; ++v)
        visit(v);
    return depth;
}

std::size_t factorial(std::size_t k) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= k; ++i)
        f *= i;
    return f;
}

// Advances `assignment` as a base-m counter; false after the last one.
bool next_assignment(std::vector<std::size_t> &assignment, std::size_t m) {
    for (auto &digit : assignment) {
        if (++digit < m)
            return true;
        digit = 0;
    }
    return false;
}

} // namespace

void check_size_guard(const Instance &instance) {
    if (instance.n_tasks() > kMaxTasks || instance.n_procs() > kMaxProcs)
        throw SizeError("instance with " + std::to_string(instance.n_tasks()) + " tasks and " +
                        std::to_string(instance.n_procs()) + " processors exceeds the enumeration guard (at most " +
                        std::to_string(kMaxTasks) + " tasks and " + std::to_string(kMaxProcs) + " processors)");
}

std::size_t count_legal_schedules(const Instance &instance) {
    check_size_guard(instance);
    const std::size_t n = instance.n_tasks();
    const std::size_t m = instance.n_procs();
    const auto depth = path_depths(instance);
    const std::size_t levels = n == 0 ? 0 : *std::max_element(depth.begin(), depth.end()) + 1;

    std::size_t total = 0;
    std::vector<std::size_t> assignment(n, 0);
    do {
        std::vector<std::size_t> class_size(m * levels, 0);
        for (std::size_t t = 0; t < n; ++t)
            ++class_size[assignment[t] * levels + depth[t]];
        std::size_t product = 1;
        for (std::size_t c : class_size)
            product *= factorial(c);
        total += product;
    } while (next_assignment(assignment, m));
    return total;
}

std::size_t enumerate_legal_schedules(const Instance &instance,
                                      const std::function<void(const Schedule &)> &visit) {
    check_size_guard(instance);
    const std::size_t n = instance.n_tasks();
    const std::size_t m = instance.n_procs();
    const auto depth = path_depths(instance);
    const std::size_t levels = n == 0 ? 0 : *std::max_element(depth.begin(), depth.end()) + 1;

    std::size_t visited = 0;
    std::vector<std::size_t> assignment(n, 0);
    do {
        // classes[j * levels + h] holds processor j's tasks of depth h.
        std::vector<std::vector<std::size_t>> classes(m * levels);
        for (std::size_t t = 0; t < n; ++t)
            classes[assignment[t] * levels + depth[t]].push_back(t);

        // Odometer over the permutations of every class.
        while (true) {
            Schedule schedule{std::vector<std::vector<std::size_t>>(m)};
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t h = 0; h < levels; ++h) {
                    const auto &cls = classes[j * levels + h];
                    schedule.proc_lists[j].insert(schedule.proc_lists[j].end(), cls.begin(), cls.end());
                }
            visit(schedule);
            ++visited;

            std::size_t c = 0;
            for (; c < classes.size(); ++c)
                if (std::next_permutation(classes[c].begin(), classes[c].end()))
                    break; // wrapped classes before c are back in sorted order
            if (c == classes.size())
                break;
        }
    } while (next_assignment(assignment, m));
    return visited;
}

ObjectiveVector simulate(const Schedule &schedule, const Instance &instance) {
    const std::size_t n = instance.n_tasks();
    const std::size_t m = instance.n_procs();
    const auto &plat = instance.platform;
    const auto &volume = instance.graph.data_volume;

    std::vector<std::size_t> proc_of(n, 0);
    std::vector<std::vector<int>> x(n, std::vector<int>(m, 0));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t t : schedule.proc_lists[j]) {
            proc_of[t] = j;
            x[t][j] = 1;
        }

    // Event queue of task completions. A processor is idle between the
    // completion of one task and the dispatch of the next; the head of its
    // list is dispatched once every input-producing task has completed.
    using Event = std::tuple<double, std::size_t>; // (finish time, task)
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::vector<std::size_t> head(m, 0);
    std::vector<bool> busy(m, false);
    std::vector<double> free_at(m, 0.0);
    std::vector<bool> completed(n, false);
    std::vector<double> finish(n, 0.0);
    std::size_t n_completed = 0;
    double makespan = 0.0;

    auto dispatch = [&] {
        for (std::size_t j = 0; j < m; ++j) {
            if (busy[j] || head[j] >= schedule.proc_lists[j].size())
                continue;
            const std::size_t t = schedule.proc_lists[j][head[j]];
            bool inputs_done = true;
            double data_ready = 0.0;
            for (std::size_t u = 0; u < n && inputs_done; ++u) {
                if (volume(u, t) == 0.0)
                    continue;
                if (!completed[u]) {
                    inputs_done = false;
                    break;
                }
                const double transfer = proc_of[u] == j ? 0.0 : volume(u, t) * plat.link_delay(proc_of[u], j);
                data_ready = std::max(data_ready, finish[u] + transfer);
            }
            if (!inputs_done)
                continue;
            const double begin = std::max(free_at[j], data_ready);
            events.emplace(begin + plat.exec_time(t, j), t);
            busy[j] = true;
        }
    };

    dispatch();
    while (!events.empty()) {
        const auto [time, t] = events.top();
        events.pop();
        const std::size_t j = proc_of[t];
        completed[t] = true;
        finish[t] = time;
        ++n_completed;
        makespan = std::max(makespan, time);
        busy[j] = false;
        free_at[j] = time;
        ++head[j];
        dispatch();
    }
    if (n_completed != n)
        throw StructuralError("simulation deadlocked");

    double rc = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i < n; ++i)
            rc += plat.proc_failure[j] * x[i][j] * plat.exec_time(i, j);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t b = 0; b < m; ++b)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t jt = 0; jt < n; ++jt)
                    rc += plat.link_failure(k, b) * x[i][k] * x[jt][b] * volume(i, jt) * plat.link_delay(k, b);
    return {makespan, rc};
}

ExactFront exact_pareto_front(const Instance &instance) {
    ExactFront front;
    enumerate_legal_schedules(instance, [&](const Schedule &s) {
        const ObjectiveVector v = simulate(s, instance);
        for (const auto &p : front.points)
            if (p == v || dominates(p, v))
                return;
        std::size_t keep = 0;
        for (std::size_t k = 0; k < front.points.size(); ++k) {
            if (dominates(v, front.points[k]))
                continue;
            if (keep != k) {
                front.points[keep] = front.points[k];
                front.witnesses[keep] = std::move(front.witnesses[k]);
            }
            ++keep;
        }
        front.points.resize(keep);
        front.witnesses.resize(keep);
        front.points.push_back(v);
        front.witnesses.push_back(s);
    });

    std::vector<std::size_t> order(front.points.size());
    for (std::size_t k = 0; k < order.size(); ++k)
        order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return front.points[a].makespan < front.points[b].makespan;
    });
    ExactFront sorted;
    for (std::size_t k : order) {
        sorted.points.push_back(front.points[k]);
        sorted.witnesses.push_back(std::move(front.witnesses[k]));
    }
    return sorted;
}

bool same_point(const ObjectiveVector &a, const ObjectiveVector &b, double rel_tol) {
    auto close = [rel_tol](double x, double y) {
        return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
    };
    return close(a.makespan, b.makespan) && close(a.reliability_cost, b.reliability_cost);
}

FrontDistance front_distance(std::span<const ObjectiveVector> found, const ExactFront &exact) {
    if (exact.points.empty())
        throw ContractError("front_distance requires a nonempty exact front");

    auto scale_of = [&](auto get) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (const auto &p : exact.points) {
            lo = std::min(lo, get(p));
            hi = std::max(hi, get(p));
        }
        if (hi > lo)
            return hi - lo;
        return std::abs(hi) > 0.0 ? std::abs(hi) : 1.0;
    };
    const double s_mk = scale_of([](const ObjectiveVector &v) { return v.makespan; });
    const double s_rc = scale_of([](const ObjectiveVector &v) { return v.reliability_cost; });
    auto dist = [&](const ObjectiveVector &a, const ObjectiveVector &b) {
        return std::hypot((a.makespan - b.makespan) / s_mk, (a.reliability_cost - b.reliability_cost) / s_rc);
    };

    FrontDistance report;
    std::size_t matched = 0;
    for (const auto &e : exact.points) {
        FrontRow row;
        row.exact = e;
        row.distance = std::numeric_limits<double>::infinity();
        for (const auto &f : found) {
            if (same_point(e, f))
                row.matched = true;
            const double d = dist(e, f);
            if (d < row.distance) {
                row.distance = d;
                row.nearest_found = f;
            }
        }
        if (row.matched)
            ++matched;
        report.rows.push_back(row);
    }
    report.coverage = static_cast<double>(matched) / static_cast<double>(exact.points.size());
    for (const auto &f : found) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto &e : exact.points)
            nearest = same_point(e, f) ? 0.0 : std::min(nearest, dist(e, f));
        report.deviation = std::max(report.deviation, nearest);
    }
    return report;
}

std::string front_distance_csv(const FrontDistance &report) {
    std::string out = "exact_makespan,exact_rc,matched,nearest_makespan,nearest_rc,deviation\n";
    for (const auto &row : report.rows) {
        const bool has_nearest = std::isfinite(row.distance);
        out += format_double(row.exact.makespan) + ',' + format_double(row.exact.reliability_cost) + ',' +
               (row.matched ? "1" : "0") + ',' + (has_nearest ? format_double(row.nearest_found.makespan) : "") +
               ',' + (has_nearest ? format_double(row.nearest_found.reliability_cost) : "") + ',' +
               (has_nearest ? format_double(row.matched ? 0.0 : row.distance) : "") + '\n';
    }
    return out;
}

} // namespace rsched::oracle
