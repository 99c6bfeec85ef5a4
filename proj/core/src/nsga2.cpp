#include "rsched/nsga2.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <thread>

#include "rsched/error.hpp"
#include "rsched/io.hpp"

namespace rsched {

EvolutionConfig default_config(const Instance &instance) {
    EvolutionConfig config;
    config.pop_size = 2 * instance.n_tasks();
    return config;
}

void validate_config(const EvolutionConfig &config) {
    if (config.pop_size < 2)
        throw ParameterError("pop_size must be at least 2");
    if (config.pop_size % 2 != 0)
        throw ParameterError("pop_size must be even");
    if (!(config.p_crossover >= 0.0 && config.p_crossover <= 1.0))
        throw ParameterError("p_crossover must lie in [0, 1]");
    if (!(config.p_mutation >= 0.0 && config.p_mutation <= 1.0))
        throw ParameterError("p_mutation must lie in [0, 1]");
    if (config.tournament_size == 0)
        throw ParameterError("tournament_size must be positive");
    if (config.threads == 0)
        throw ParameterError("threads must be positive");
}

bool dominates(const ObjectiveVector &a, const ObjectiveVector &b) {
    return a.makespan <= b.makespan && a.reliability_cost <= b.reliability_cost &&
           (a.makespan < b.makespan || a.reliability_cost < b.reliability_cost);
}

std::vector<Front> fast_nondominated_sort(std::span<const ObjectiveVector> objectives) {
    const std::size_t n = objectives.size();
    std::vector<std::vector<std::size_t>> dominated(n); // S_p
    std::vector<std::size_t> dominators(n, 0);          // n_p
    std::vector<Front> fronts;
    Front current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(objectives[p], objectives[q]))
                dominated[p].push_back(q);
            else if (dominates(objectives[q], objectives[p]))
                ++dominators[p];
        }
        if (dominators[p] == 0)
            current.push_back(p);
    }
    while (!current.empty()) {
        Front next;
        for (std::size_t p : current)
            for (std::size_t q : dominated[p])
                if (--dominators[q] == 0)
                    next.push_back(q);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> assign_crowding(const Front &front, std::span<const ObjectiveVector> objectives) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::size_t l = front.size();
    std::vector<double> distance(l, 0.0);
    if (l <= 2) {
        std::fill(distance.begin(), distance.end(), inf);
        return distance;
    }

    using Getter = double (*)(const ObjectiveVector &);
    const Getter getters[] = {
        [](const ObjectiveVector &v) { return v.makespan; },
        [](const ObjectiveVector &v) { return v.reliability_cost; },
    };
    std::vector<std::size_t> order(l);
    for (Getter get : getters) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return get(objectives[front[a]]) < get(objectives[front[b]]);
        });
        const double lo = get(objectives[front[order.front()]]);
        const double hi = get(objectives[front[order.back()]]);
        distance[order.front()] = inf;
        distance[order.back()] = inf;
        const double range = hi - lo;
        if (range <= 0.0)
            continue;
        for (std::size_t k = 1; k + 1 < l; ++k) {
            const double gap = get(objectives[front[order[k + 1]]]) - get(objectives[front[order[k - 1]]]);
            distance[order[k]] += gap / range;
        }
    }
    return distance;
}

std::vector<Front> rank_and_crowd(std::span<Individual> members) {
    std::vector<ObjectiveVector> objectives(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        objectives[i] = members[i].objectives;
    auto fronts = fast_nondominated_sort(objectives);
    for (std::size_t r = 0; r < fronts.size(); ++r) {
        const auto crowding = assign_crowding(fronts[r], objectives);
        for (std::size_t k = 0; k < fronts[r].size(); ++k) {
            members[fronts[r][k]].rank = r;
            members[fronts[r][k]].crowding = crowding[k];
        }
    }
    return fronts;
}

bool crowded_precedes(std::span<const Individual> members, std::size_t a, std::size_t b) {
    const Individual &x = members[a];
    const Individual &y = members[b];
    if (!x.rank || !y.rank || !x.crowding || !y.crowding)
        throw ContractError("crowded comparison requires ranked and crowded individuals");
    if (*x.rank != *y.rank)
        return *x.rank < *y.rank;
    if (*x.crowding != *y.crowding)
        return *x.crowding > *y.crowding;
    return a < b;
}

std::size_t tournament_select(std::span<const Individual> members, std::size_t tournament_size, Rng &rng) {
    if (members.empty())
        throw ContractError("tournament selection from an empty population");
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    std::size_t best = pick(rng);
    for (std::size_t k = 1; k < tournament_size; ++k) {
        const std::size_t challenger = pick(rng);
        if (crowded_precedes(members, challenger, best))
            best = challenger;
    }
    return best;
}

std::vector<std::size_t> crossover_sites(const Schedule &s, const std::vector<std::size_t> &heights,
                                         std::size_t cut) {
    std::vector<std::size_t> sites(s.n_procs());
    for (std::size_t j = 0; j < s.n_procs(); ++j) {
        const auto &list = s.proc_lists[j];
        // Lists are height-sorted, so the prefix of height <= cut is contiguous.
        sites[j] = static_cast<std::size_t>(
            std::partition_point(list.begin(), list.end(), [&](std::size_t t) { return heights[t] <= cut; }) -
            list.begin());
    }
    return sites;
}

std::pair<Schedule, Schedule> crossover_at(const Schedule &a, const Schedule &b,
                                           const std::vector<std::size_t> &heights, std::size_t cut) {
    const auto sites_a = crossover_sites(a, heights, cut);
    const auto sites_b = crossover_sites(b, heights, cut);
    Schedule child_a{std::vector<std::vector<std::size_t>>(a.n_procs())};
    Schedule child_b{std::vector<std::vector<std::size_t>>(b.n_procs())};
    for (std::size_t j = 0; j < a.n_procs(); ++j) {
        const auto &la = a.proc_lists[j];
        const auto &lb = b.proc_lists[j];
        auto &ca = child_a.proc_lists[j];
        auto &cb = child_b.proc_lists[j];
        ca.assign(la.begin(), la.begin() + static_cast<std::ptrdiff_t>(sites_a[j]));
        ca.insert(ca.end(), lb.begin() + static_cast<std::ptrdiff_t>(sites_b[j]), lb.end());
        cb.assign(lb.begin(), lb.begin() + static_cast<std::ptrdiff_t>(sites_b[j]));
        cb.insert(cb.end(), la.begin() + static_cast<std::ptrdiff_t>(sites_a[j]), la.end());
    }
    return {std::move(child_a), std::move(child_b)};
}

std::pair<Schedule, Schedule> crossover(const Schedule &a, const Schedule &b, const std::vector<std::size_t> &heights,
                                        Rng &rng) {
    const std::size_t max_height = heights.empty() ? 0 : *std::max_element(heights.begin(), heights.end());
    std::uniform_int_distribution<std::size_t> cut(0, max_height);
    return crossover_at(a, b, heights, cut(rng));
}

std::pair<Schedule, Schedule> crossover(const Schedule &a, const Schedule &b, const TaskGraph &graph, Rng &rng) {
    const auto heights = compute_heights(graph);
    if (!is_legal(a, heights) || !is_legal(b, heights) || a.n_procs() != b.n_procs())
        throw ContractError("crossover requires two legal parents over the same instance");
    return crossover(a, b, heights, rng);
}

Schedule swap_tasks(const Schedule &s, std::size_t first, std::size_t second) {
    Schedule out = s;
    std::size_t *slot_first = nullptr;
    std::size_t *slot_second = nullptr;
    for (auto &list : out.proc_lists)
        for (auto &t : list) {
            if (t == first)
                slot_first = &t;
            else if (t == second)
                slot_second = &t;
        }
    if (slot_first && slot_second)
        std::swap(*slot_first, *slot_second);
    return out;
}

Schedule mutate(const Schedule &s, const std::vector<std::size_t> &heights, Rng &rng) {
    const std::size_t n = heights.size();
    if (n < 2)
        return s;
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    const std::size_t task = pick(rng);
    std::vector<std::size_t> partners;
    for (std::size_t t = 0; t < n; ++t)
        if (t != task && heights[t] == heights[task])
            partners.push_back(t);
    if (partners.empty())
        return s;
    std::uniform_int_distribution<std::size_t> pick_partner(0, partners.size() - 1);
    return swap_tasks(s, task, partners[pick_partner(rng)]);
}

Schedule mutate(const Schedule &s, const TaskGraph &graph, Rng &rng) { return mutate(s, compute_heights(graph), rng); }

std::vector<ObjectiveVector> evaluate_all(std::span<const Schedule> schedules, const Evaluator &evaluator,
                                          std::size_t threads) {
    std::vector<ObjectiveVector> out(schedules.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min(threads, schedules.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < schedules.size(); ++i)
            out[i] = evaluator(schedules[i]);
        return out;
    }
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        const std::size_t chunk = (schedules.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(schedules.size(), lo + chunk);
            pool.emplace_back([&, lo, hi] {
                for (std::size_t i = lo; i < hi; ++i)
                    out[i] = evaluator(schedules[i]);
            });
        }
    }
    return out;
}

namespace {

std::vector<Individual> evaluated(std::vector<Schedule> schedules, const Evaluator &evaluator, std::size_t threads) {
    const auto objectives = evaluate_all(schedules, evaluator, threads);
    std::vector<Individual> out(schedules.size());
    for (std::size_t i = 0; i < schedules.size(); ++i) {
        out[i].schedule = std::move(schedules[i]);
        out[i].objectives = objectives[i];
    }
    return out;
}

} // namespace

Population initial_population(const Evaluator &evaluator, const EvolutionConfig &config, Rng &rng) {
    std::vector<Schedule> schedules;
    schedules.reserve(config.pop_size);
    for (std::size_t k = 0; k < config.pop_size; ++k)
        schedules.push_back(
            random_schedule(evaluator.instance(), evaluator.heights(), rng, config.allocation, k));
    Population population{evaluated(std::move(schedules), evaluator, config.threads), 0};
    rank_and_crowd(population.members);
    return population;
}

std::vector<Individual> make_offspring(const Population &population, const EvolutionConfig &config,
                                       const Evaluator &evaluator, Rng &rng) {
    const auto &heights = evaluator.heights();
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<Schedule> children;
    children.reserve(config.pop_size);
    for (std::size_t pair = 0; pair < config.pop_size / 2; ++pair) {
        const auto &a = population.members[tournament_select(population.members, config.tournament_size, rng)];
        const auto &b = population.members[tournament_select(population.members, config.tournament_size, rng)];
        std::pair<Schedule, Schedule> kids;
        if (coin(rng) < config.p_crossover)
            kids = crossover(a.schedule, b.schedule, heights, rng);
        else
            kids = {a.schedule, b.schedule};
        for (Schedule *child : {&kids.first, &kids.second}) {
            if (coin(rng) < config.p_mutation)
                *child = mutate(*child, heights, rng);
            children.push_back(std::move(*child));
        }
    }
    return evaluated(std::move(children), evaluator, config.threads);
}

Population evolve_generation(const Population &population, const EvolutionConfig &config,
                             const Evaluator &evaluator, Rng &rng) {
    auto offspring = make_offspring(population, config, evaluator, rng);

    std::vector<Individual> pool;
    pool.reserve(population.members.size() + offspring.size());
    pool.insert(pool.end(), population.members.begin(), population.members.end());
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    const auto fronts = rank_and_crowd(pool);

    Population next;
    next.generation = population.generation + 1;
    next.members.reserve(config.pop_size);
    for (const Front &front : fronts) {
        if (next.members.size() + front.size() <= config.pop_size) {
            for (std::size_t idx : front)
                next.members.push_back(pool[idx]);
            continue;
        }
        Front last = front;
        std::sort(last.begin(), last.end(),
                  [&](std::size_t a, std::size_t b) { return crowded_precedes(pool, a, b); });
        const std::size_t room = config.pop_size - next.members.size();
        for (std::size_t k = 0; k < room; ++k)
            next.members.push_back(pool[last[k]]);
        break;
    }
    return next;
}

GenerationStats summarize(const Population &population) {
    GenerationStats s;
    s.generation = population.generation;
    s.best_makespan = std::numeric_limits<double>::infinity();
    s.best_rc = std::numeric_limits<double>::infinity();
    for (const auto &ind : population.members) {
        s.best_makespan = std::min(s.best_makespan, ind.objectives.makespan);
        s.best_rc = std::min(s.best_rc, ind.objectives.reliability_cost);
        s.mean_makespan += ind.objectives.makespan;
        s.mean_rc += ind.objectives.reliability_cost;
        if (ind.rank && *ind.rank == 0)
            ++s.front0_size;
    }
    if (!population.members.empty()) {
        s.mean_makespan /= static_cast<double>(population.members.size());
        s.mean_rc /= static_cast<double>(population.members.size());
    }
    return s;
}

std::vector<Individual> reported_front(const Population &population) {
    std::vector<Individual> front;
    for (const auto &ind : population.members)
        if (ind.rank && *ind.rank == 0)
            front.push_back(ind);
    std::stable_sort(front.begin(), front.end(), [](const Individual &a, const Individual &b) {
        if (a.objectives.makespan != b.objectives.makespan)
            return a.objectives.makespan < b.objectives.makespan;
        return a.objectives.reliability_cost < b.objectives.reliability_cost;
    });
    front.erase(std::unique(front.begin(), front.end(),
                            [](const Individual &a, const Individual &b) { return a.objectives == b.objectives; }),
                front.end());
    return front;
}

RunResult run(const Instance &instance, const EvolutionConfig &config) {
    validate_config(config);
    const Evaluator evaluator(instance);
    Rng rng(config.seed);

    RunResult result;
    Population population = initial_population(evaluator, config, rng);
    result.stats.push_back(summarize(population));
    for (std::size_t g = 0; g < config.generations; ++g) {
        population = evolve_generation(population, config, evaluator, rng);
        result.stats.push_back(summarize(population));
    }
    result.front = reported_front(population);
    result.final_population = std::move(population);
    return result;
}

std::string stats_csv(std::span<const GenerationStats> stats) {
    std::string out = "generation,best_makespan,best_rc,mean_makespan,mean_rc,front0_size\n";
    for (const auto &s : stats) {
        out += std::to_string(s.generation) + ',' + format_double(s.best_makespan) + ',' + format_double(s.best_rc) +
               ',' + format_double(s.mean_makespan) + ',' + format_double(s.mean_rc) + ',' +
               std::to_string(s.front0_size) + '\n';
    }
    return out;
}

} // namespace rsched
