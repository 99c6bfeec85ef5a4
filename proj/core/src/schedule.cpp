#include "rsched/schedule.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <tuple>

#include "rsched/error.hpp"

namespace rsched {

std::vector<std::size_t> Schedule::assignment(std::size_t n_tasks) const {
    std::vector<std::size_t> proc_of(n_tasks, std::numeric_limits<std::size_t>::max());
    for (std::size_t j = 0; j < proc_lists.size(); ++j)
        for (std::size_t t : proc_lists[j])
            proc_of[t] = j;
    return proc_of;
}

std::vector<std::size_t> compute_heights(const TaskGraph &graph) {
    const auto order = topological_order(graph);
    if (!order)
        throw StructuralError("cannot compute heights: precedence graph contains a cycle");
    std::vector<std::size_t> height(graph.n_tasks, 0);
    for (std::size_t i : *order)
        for (std::size_t p : graph.predecessors[i])
            height[i] = std::max(height[i], height[p] + 1);
    return height;
}

std::string to_string(Allocation allocation) {
    return allocation == Allocation::RandomSplit ? "split" : "round-robin";
}

std::optional<Allocation> parse_allocation(std::string_view text) {
    if (text == "split")
        return Allocation::RandomSplit;
    if (text == "round-robin")
        return Allocation::RoundRobin;
    return std::nullopt;
}

Schedule random_schedule(const Instance &instance, const std::vector<std::size_t> &heights, Rng &rng,
                         Allocation allocation, std::optional<std::size_t> first_proc) {
    const std::size_t m = instance.n_procs();
    const std::size_t max_height = heights.empty() ? 0 : *std::max_element(heights.begin(), heights.end());

    std::vector<std::vector<std::size_t>> groups(max_height + 1);
    for (std::size_t t = 0; t < heights.size(); ++t)
        groups[heights[t]].push_back(t);

    Schedule schedule{std::vector<std::vector<std::size_t>>(m)};
    std::size_t start = 0;
    if (first_proc) {
        start = *first_proc % m;
    } else {
        std::uniform_int_distribution<std::size_t> first(0, m - 1);
        start = first(rng);
    }
    for (auto &group : groups) {
        std::shuffle(group.begin(), group.end(), rng);
        if (allocation == Allocation::RoundRobin) {
            for (std::size_t k = 0; k < group.size(); ++k)
                schedule.proc_lists[(start + k) % m].push_back(group[k]);
        } else {
            std::size_t next = 0;
            for (std::size_t step = 0; step < m && next < group.size(); ++step) {
                const std::size_t remaining = group.size() - next;
                std::size_t take = remaining;
                if (step + 1 < m) {
                    std::uniform_int_distribution<std::size_t> block(0, remaining);
                    take = block(rng);
                }
                auto &list = schedule.proc_lists[(start + step) % m];
                list.insert(list.end(), group.begin() + static_cast<std::ptrdiff_t>(next),
                            group.begin() + static_cast<std::ptrdiff_t>(next + take));
                next += take;
            }
        }
        start = (start + 1) % m;
    }
    return schedule;
}

Schedule random_schedule(const Instance &instance, Rng &rng) {
    return random_schedule(instance, compute_heights(instance.graph), rng);
}

bool is_legal(const Schedule &schedule, const std::vector<std::size_t> &heights) {
    std::vector<char> seen(heights.size(), 0);
    std::size_t count = 0;
    for (const auto &list : schedule.proc_lists) {
        std::size_t previous = 0;
        for (std::size_t t : list) {
            if (t >= heights.size() || seen[t])
                return false;
            seen[t] = 1;
            ++count;
            if (heights[t] < previous)
                return false;
            previous = heights[t];
        }
    }
    return count == heights.size();
}

bool is_legal(const Schedule &schedule, const TaskGraph &graph) { return is_legal(schedule, compute_heights(graph)); }

std::vector<std::string> schedule_violations(const Schedule &schedule, const Instance &instance) {
    std::vector<std::string> out;
    const std::size_t n = instance.n_tasks();
    if (schedule.n_procs() != instance.n_procs())
        out.push_back("schedule has " + std::to_string(schedule.n_procs()) + " processor lists, instance has " +
                      std::to_string(instance.n_procs()) + " processors");
    const auto heights = compute_heights(instance.graph);
    std::vector<std::size_t> occurrences(n, 0);
    for (std::size_t j = 0; j < schedule.n_procs(); ++j) {
        const auto &list = schedule.proc_lists[j];
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::size_t t = list[k];
            if (t >= n) {
                out.push_back("task index " + std::to_string(t) + " on processor " + std::to_string(j) +
                              " is out of range");
                continue;
            }
            ++occurrences[t];
            if (k > 0 && list[k - 1] < n && heights[t] < heights[list[k - 1]])
                out.push_back("processor " + std::to_string(j) + ": task " + std::to_string(t) + " (height " +
                              std::to_string(heights[t]) + ") follows task " + std::to_string(list[k - 1]) +
                              " (height " + std::to_string(heights[list[k - 1]]) + ")");
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        if (occurrences[t] == 0)
            out.push_back("task " + std::to_string(t) + " is not scheduled");
        else if (occurrences[t] > 1)
            out.push_back("task " + std::to_string(t) + " is scheduled " + std::to_string(occurrences[t]) + " times");
    }
    return out;
}

// --- evaluation ------------------------------------------------------------

Evaluator::Evaluator(const Instance &instance) : instance_(&instance), heights_(compute_heights(instance.graph)) {}

MakespanResult Evaluator::makespan(const Schedule &schedule) const {
    const Instance &inst = *instance_;
    const std::size_t n = inst.n_tasks();
    const auto &exec = inst.platform.exec_time;
    const auto &delay = inst.platform.link_delay;
    const auto &volume = inst.graph.data_volume;

    // Predecessors have strictly smaller height and list predecessors have
    // smaller or equal height earlier in the list, so visiting tasks by
    // (height, processor, position) sees every dependency first.
    struct Slot {
        std::size_t height, proc, pos, task;
    };
    std::vector<Slot> order;
    order.reserve(n);
    std::vector<std::size_t> proc_of(n);
    for (std::size_t j = 0; j < schedule.proc_lists.size(); ++j) {
        const auto &list = schedule.proc_lists[j];
        for (std::size_t k = 0; k < list.size(); ++k) {
            order.push_back({heights_[list[k]], j, k, list[k]});
            proc_of[list[k]] = j;
        }
    }
    std::sort(order.begin(), order.end(), [](const Slot &a, const Slot &b) {
        return std::tie(a.height, a.proc, a.pos) < std::tie(b.height, b.proc, b.pos);
    });

    MakespanResult result;
    Timing &timing = result.timing;
    timing.start.assign(n, 0.0);
    timing.finish.assign(n, 0.0);
    timing.earliest.assign(n, 0.0);
    std::vector<char> done(n, 0);
    for (const Slot &slot : order) {
        const std::size_t i = slot.task;
        const std::size_t j = slot.proc;
        double earliest = 0.0;
        for (std::size_t p : inst.graph.predecessors[i]) {
            if (!done[p])
                throw StructuralError("task " + std::to_string(i) + " scheduled before its predecessor " +
                                      std::to_string(p));
            const std::size_t k = proc_of[p];
            const double comm = k == j ? 0.0 : volume(p, i) * delay(k, j);
            earliest = std::max(earliest, timing.finish[p] + comm);
        }
        double start = earliest;
        if (slot.pos > 0)
            start = std::max(start, timing.finish[schedule.proc_lists[j][slot.pos - 1]]);
        timing.earliest[i] = earliest;
        timing.start[i] = start;
        timing.finish[i] = start + exec(i, j);
        done[i] = 1;
        result.makespan = std::max(result.makespan, timing.finish[i]);
    }
    return result;
}

double Evaluator::reliability_cost(const Schedule &schedule) const {
    const Instance &inst = *instance_;
    const std::size_t n = inst.n_tasks();
    const auto &p = inst.platform;
    const auto proc_of = schedule.assignment(n);

    double rc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = proc_of[i];
        double task_cost = p.proc_failure[j] * p.exec_time(i, j);
        for (std::size_t pred : inst.graph.predecessors[i]) {
            const std::size_t k = proc_of[pred];
            task_cost += p.link_failure(k, j) * inst.graph.data_volume(pred, i) * p.link_delay(k, j);
        }
        rc += task_cost;
    }
    return rc;
}

ObjectiveVector Evaluator::operator()(const Schedule &schedule) const {
    return {makespan(schedule).makespan, reliability_cost(schedule)};
}

namespace {

void require_legal(const Schedule &schedule, const Instance &instance, const std::vector<std::size_t> &heights) {
    if (schedule.n_procs() != instance.n_procs() || !is_legal(schedule, heights))
        throw ContractError("schedule is not legal for this instance");
}

} // namespace

MakespanResult evaluate_makespan(const Schedule &schedule, const Instance &instance) {
    Evaluator eval(instance);
    require_legal(schedule, instance, eval.heights());
    return eval.makespan(schedule);
}

double evaluate_reliability_cost(const Schedule &schedule, const Instance &instance) {
    Evaluator eval(instance);
    require_legal(schedule, instance, eval.heights());
    return eval.reliability_cost(schedule);
}

ObjectiveVector evaluate(const Schedule &schedule, const Instance &instance) {
    Evaluator eval(instance);
    require_legal(schedule, instance, eval.heights());
    return eval(schedule);
}

DeadlineReport deadline_misses(const Timing &timing, const std::vector<double> &deadlines) {
    DeadlineReport report;
    report.missed.assign(timing.finish.size(), false);
    for (std::size_t i = 0; i < timing.finish.size() && i < deadlines.size(); ++i) {
        if (timing.finish[i] > deadlines[i]) {
            report.missed[i] = true;
            ++report.count;
        }
    }
    return report;
}

// --- text form -------------------------------------------------------------

namespace {

std::string join_list(const std::vector<std::size_t> &list) {
    std::string out;
    for (std::size_t k = 0; k < list.size(); ++k) {
        if (k)
            out += ',';
        out += std::to_string(list[k]);
    }
    return out;
}

std::vector<std::size_t> parse_list(std::string_view text, std::size_t proc) {
    const std::string field = "processor " + std::to_string(proc);
    std::vector<std::size_t> list;
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
            s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (text.empty())
        return list;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        const auto token = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
        std::size_t value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size())
            throw ParseError(field, "expected a task index, got '" + std::string(token) + "'");
        list.push_back(value);
        if (comma == std::string_view::npos)
            break;
        pos = comma + 1;
    }
    return list;
}

} // namespace

std::string format_schedule(const Schedule &schedule) {
    std::string out;
    for (const auto &list : schedule.proc_lists) {
        out += join_list(list);
        out += '\n';
    }
    return out;
}

std::string format_schedule_inline(const Schedule &schedule) {
    std::string out;
    for (std::size_t j = 0; j < schedule.proc_lists.size(); ++j) {
        if (j)
            out += '|';
        out += join_list(schedule.proc_lists[j]);
    }
    return out;
}

Schedule parse_schedule(std::string_view text) {
    const char separator = text.find('|') != std::string_view::npos ? '|' : '\n';
    if (separator == '\n' && !text.empty() && text.back() == '\n')
        text.remove_suffix(1);
    if (separator == '|')
        while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
            text.remove_suffix(1);
    if (text.empty())
        throw ParseError("schedule", "no processor lists");

    Schedule schedule;
    std::size_t pos = 0;
    while (true) {
        const auto sep = text.find(separator, pos);
        const auto piece = text.substr(pos, sep == std::string_view::npos ? text.npos : sep - pos);
        schedule.proc_lists.push_back(parse_list(piece, schedule.proc_lists.size()));
        if (sep == std::string_view::npos)
            break;
        pos = sep + 1;
    }
    return schedule;
}

} // namespace rsched
