#include "rsched/instance.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <sstream>

#include "rsched/error.hpp"
#include "rsched/io.hpp"

namespace rsched {

TaskGraph TaskGraph::from_volumes(Matrix<double> volumes) {
    TaskGraph graph;
    graph.n_tasks = volumes.rows();
    graph.predecessors.resize(graph.n_tasks);
    for (std::size_t k = 0; k < volumes.rows(); ++k)
        for (std::size_t l = 0; l < volumes.cols(); ++l)
            if (volumes(k, l) != 0.0)
                graph.predecessors[l].push_back(k);
    graph.data_volume = std::move(volumes);
    return graph;
}

std::size_t TaskGraph::edge_count() const {
    std::size_t count = 0;
    for (const auto &preds : predecessors)
        count += preds.size();
    return count;
}

std::vector<std::vector<std::size_t>> TaskGraph::successors() const {
    std::vector<std::vector<std::size_t>> succ(n_tasks);
    for (std::size_t i = 0; i < predecessors.size(); ++i)
        for (std::size_t p : predecessors[i])
            if (p < n_tasks)
                succ[p].push_back(i);
    for (auto &s : succ)
        std::sort(s.begin(), s.end());
    return succ;
}

std::string to_string(Distribution dist) {
    return dist == Distribution::Exponential ? "exponential" : "normal";
}

std::optional<Distribution> parse_distribution(std::string_view text) {
    if (text == "exponential" || text == "exp")
        return Distribution::Exponential;
    if (text == "normal")
        return Distribution::Normal;
    return std::nullopt;
}

std::optional<std::vector<std::size_t>> topological_order(const TaskGraph &graph) {
    const std::size_t n = graph.n_tasks;
    std::vector<std::size_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        indegree[i] = graph.predecessors[i].size();
    const auto succ = graph.successors();

    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indegree[i] == 0)
            ready.push(i);

    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        const std::size_t v = ready.top();
        ready.pop();
        order.push_back(v);
        for (std::size_t s : succ[v])
            if (--indegree[s] == 0)
                ready.push(s);
    }
    if (order.size() != n)
        return std::nullopt;
    return order;
}

namespace {

void check_square_platform_matrix(const Matrix<double> &m, std::size_t procs, const char *name,
                                  std::vector<std::string> &out) {
    if (m.rows() != procs || m.cols() != procs) {
        out.push_back(std::string(name) + " must be " + std::to_string(procs) + "x" + std::to_string(procs));
        return;
    }
    for (std::size_t k = 0; k < procs; ++k) {
        if (m(k, k) != 0.0)
            out.push_back(std::string(name) + " diagonal entry " + std::to_string(k) + " must be 0");
        for (std::size_t b = 0; b < procs; ++b)
            if (!(m(k, b) >= 0.0) || !std::isfinite(m(k, b)))
                out.push_back(std::string(name) + "(" + std::to_string(k) + "," + std::to_string(b) +
                              ") must be finite and nonnegative");
    }
}

} // namespace

std::vector<std::string> validate(const Instance &instance) {
    std::vector<std::string> out;
    const TaskGraph &g = instance.graph;
    const Platform &p = instance.platform;
    const std::size_t n = g.n_tasks;
    const std::size_t m = p.n_procs;

    if (n == 0)
        out.emplace_back("n_tasks must be positive");
    if (m == 0)
        out.emplace_back("n_procs must be positive");

    bool graph_shape_ok = true;
    if (g.predecessors.size() != n) {
        out.emplace_back("predecessor list count differs from n_tasks");
        graph_shape_ok = false;
    }
    if (g.data_volume.rows() != n || g.data_volume.cols() != n) {
        out.emplace_back("data_volume must be n_tasks x n_tasks");
        graph_shape_ok = false;
    }

    if (graph_shape_ok) {
        bool indices_ok = true;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t pred : g.predecessors[i]) {
                if (pred >= n) {
                    out.push_back("predecessor " + std::to_string(pred) + " of task " + std::to_string(i) +
                                  " out of range");
                    indices_ok = false;
                } else if (pred == i) {
                    out.push_back("self-edge on task " + std::to_string(i));
                }
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t l = 0; l < n; ++l) {
                const double v = g.data_volume(k, l);
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    out.push_back("data_volume(" + std::to_string(k) + "," + std::to_string(l) +
                                  ") must be finite and nonnegative");
                    continue;
                }
                if (k == l) {
                    if (v != 0.0)
                        out.push_back("self-edge on task " + std::to_string(k) + ": data_volume(" +
                                      std::to_string(k) + "," + std::to_string(k) + ") is nonzero");
                    continue;
                }
                const auto &preds = g.predecessors[l];
                const bool is_edge = std::find(preds.begin(), preds.end(), k) != preds.end();
                if (is_edge && v == 0.0)
                    out.push_back("edge (" + std::to_string(k) + "," + std::to_string(l) + ") has zero data volume");
                if (!is_edge && v != 0.0)
                    out.push_back("data_volume(" + std::to_string(k) + "," + std::to_string(l) +
                                  ") is nonzero but is not an edge");
            }
        }
        if (indices_ok && !topological_order(g))
            out.emplace_back("precedence graph contains a cycle");
    }

    if (p.exec_time.rows() != n || p.exec_time.cols() != m) {
        out.emplace_back("exec_time must be n_tasks x n_procs");
    } else {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < m; ++j)
                if (!(p.exec_time(i, j) > 0.0) || !std::isfinite(p.exec_time(i, j)))
                    out.push_back("exec_time(" + std::to_string(i) + "," + std::to_string(j) +
                                  ") must be finite and positive");
    }
    if (p.proc_failure.size() != m) {
        out.emplace_back("proc_failure must have n_procs entries");
    } else {
        for (std::size_t j = 0; j < m; ++j)
            if (!(p.proc_failure[j] >= 0.0) || !std::isfinite(p.proc_failure[j]))
                out.push_back("proc_failure(" + std::to_string(j) + ") must be finite and nonnegative");
    }
    check_square_platform_matrix(p.link_failure, m, "link_failure", out);
    check_square_platform_matrix(p.link_delay, m, "link_delay", out);

    if (instance.deadlines) {
        if (instance.deadlines->size() != n) {
            out.emplace_back("deadlines must have n_tasks entries");
        } else {
            for (std::size_t i = 0; i < n; ++i)
                if (!((*instance.deadlines)[i] > 0.0))
                    out.push_back("deadline(" + std::to_string(i) + ") must be positive");
        }
    }
    return out;
}

Matrix<int> generate_pmethod(std::size_t n, double epsilon, Rng &rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw ParameterError("epsilon must lie in [0, 1]");
    if (n == 0)
        throw ParameterError("task count must be positive");
    Matrix<int> adjacency(n, n, 0);
    std::bernoulli_distribution trial(epsilon);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            adjacency(i, j) = trial(rng) ? 1 : 0;
    return adjacency;
}

double draw_duration(Distribution dist, double mean, Rng &rng) {
    double value = 0.0;
    if (dist == Distribution::Exponential) {
        std::exponential_distribution<double> d(1.0 / mean);
        value = d(rng);
    } else {
        std::normal_distribution<double> d(mean, kNormalSpreadRatio * mean);
        value = d(rng);
    }
    return std::max(value, kMinDuration);
}

Matrix<double> generate_exec_times(std::size_t n, std::size_t m, Distribution dist, double mean, Rng &rng) {
    if (!(mean > 0.0) || !std::isfinite(mean))
        throw ParameterError("mean execution time must be positive");
    Matrix<double> exec(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            exec(i, j) = draw_duration(dist, mean, rng);
    return exec;
}

Matrix<double> generate_data_volumes(const Matrix<int> &adjacency, Rng &rng) {
    Matrix<double> volumes(adjacency.rows(), adjacency.cols(), 0.0);
    std::uniform_int_distribution<int> bytes(1, 10);
    for (std::size_t k = 0; k < adjacency.rows(); ++k)
        for (std::size_t l = 0; l < adjacency.cols(); ++l)
            if (adjacency(k, l) != 0)
                volumes(k, l) = static_cast<double>(bytes(rng));
    return volumes;
}

FailureRates generate_failure_rates(std::size_t m, Rng &rng) {
    if (m == 0)
        throw ParameterError("processor count must be positive");
    std::uniform_real_distribution<double> rate(kFailureRateMin, kFailureRateMax);
    FailureRates rates{std::vector<double>(m), Matrix<double>(m, m, 0.0)};
    for (auto &r : rates.proc)
        r = rate(rng);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t b = 0; b < m; ++b)
            if (k != b)
                rates.link(k, b) = rate(rng);
    return rates;
}

Matrix<double> generate_link_delays(std::size_t m, double lo, double hi, Rng &rng) {
    if (!(lo >= 0.0 && lo <= hi) || !std::isfinite(hi))
        throw ParameterError("link delay range must satisfy 0 <= lo <= hi");
    Matrix<double> delay(m, m, 0.0);
    std::uniform_real_distribution<double> d(lo, hi);
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t b = 0; b < m; ++b)
            if (k != b)
                delay(k, b) = lo == hi ? lo : d(rng);
    return delay;
}

std::vector<double> earliest_start_bounds(const TaskGraph &graph, const Matrix<double> &exec_time) {
    auto order = topological_order(graph);
    if (!order)
        throw StructuralError("precedence graph contains a cycle");
    std::vector<double> bound(graph.n_tasks, 0.0);
    for (std::size_t i : *order) {
        for (std::size_t p : graph.predecessors[i]) {
            const auto row = exec_time.row(p);
            const double fastest = *std::min_element(row.begin(), row.end());
            bound[i] = std::max(bound[i], bound[p] + fastest);
        }
    }
    return bound;
}

std::vector<double> communication_bounds(const TaskGraph &graph, const Matrix<double> &link_delay) {
    const auto delays = link_delay.values();
    const double worst_delay = delays.empty() ? 0.0 : *std::max_element(delays.begin(), delays.end());
    std::vector<double> comm(graph.n_tasks, 0.0);
    for (std::size_t i = 0; i < graph.n_tasks; ++i)
        for (std::size_t p : graph.predecessors[i])
            comm[i] = std::max(comm[i], graph.data_volume(p, i) * worst_delay);
    return comm;
}

std::vector<double> generate_deadlines(const TaskGraph &graph, const Platform &platform, Distribution dist,
                                       Rng &rng) {
    const auto earliest = earliest_start_bounds(graph, platform.exec_time);
    const auto comm = communication_bounds(graph, platform.link_delay);
    std::vector<double> deadlines(graph.n_tasks);
    for (std::size_t i = 0; i < graph.n_tasks; ++i) {
        const auto row = platform.exec_time.row(i);
        const double slowest = *std::max_element(row.begin(), row.end());
        double mean = 0.0;
        for (double c : row)
            mean += c;
        mean /= static_cast<double>(row.size());
        const double slack = draw_duration(dist, mean, rng);
        deadlines[i] = earliest[i] + slowest + slack + comm[i];
    }
    return deadlines;
}

Instance generate_instance(const GeneratorOptions &options) {
    if (options.n_tasks == 0)
        throw ParameterError("task count must be positive");
    if (options.n_procs == 0)
        throw ParameterError("processor count must be positive");
    Rng rng(options.seed);
    const auto adjacency = generate_pmethod(options.n_tasks, options.epsilon, rng);

    Instance instance;
    instance.platform.n_procs = options.n_procs;
    instance.platform.exec_time =
        generate_exec_times(options.n_tasks, options.n_procs, options.dist, options.mean_exec, rng);
    instance.graph = TaskGraph::from_volumes(generate_data_volumes(adjacency, rng));
    auto rates = generate_failure_rates(options.n_procs, rng);
    instance.platform.proc_failure = std::move(rates.proc);
    instance.platform.link_failure = std::move(rates.link);
    instance.platform.link_delay =
        generate_link_delays(options.n_procs, options.link_delay_min, options.link_delay_max, rng);
    if (options.with_deadlines)
        instance.deadlines = generate_deadlines(instance.graph, instance.platform, options.dist, rng);
    return instance;
}

// --- text format -----------------------------------------------------------

namespace {

constexpr std::string_view kMagic = "rsched-instance";

void write_row(std::ostringstream &out, std::span<const double> row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i)
            out << ' ';
        out << format_double(row[i]);
    }
    out << '\n';
}

void write_matrix(std::ostringstream &out, std::string_view name, const Matrix<double> &m) {
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r)
        write_row(out, m.row(r));
}

class LineReader {
  public:
    explicit LineReader(std::string_view text) : text_(text) {}

    /// Next non-empty, non-comment line split into whitespace tokens.
    std::vector<std::string_view> next(const std::string &field) {
        while (pos_ < text_.size()) {
            auto end = text_.find('\n', pos_);
            if (end == std::string_view::npos)
                end = text_.size();
            std::string_view line = text_.substr(pos_, end - pos_);
            pos_ = end + 1;
            if (!line.empty() && line.back() == '\r')
                line.remove_suffix(1);
            auto tokens = split(line);
            if (tokens.empty() || tokens.front().starts_with('#'))
                continue;
            return tokens;
        }
        throw ParseError(field, "unexpected end of input");
    }

  private:
    static std::vector<std::string_view> split(std::string_view line) {
        std::vector<std::string_view> out;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
                ++i;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t')
                ++j;
            if (j > i)
                out.push_back(line.substr(i, j - i));
            i = j;
        }
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double to_double(std::string_view token, const std::string &field) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(field, "expected a number, got '" + std::string(token) + "'");
    return value;
}

std::size_t to_count(std::string_view token, const std::string &field) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size())
        throw ParseError(field, "expected a nonnegative integer, got '" + std::string(token) + "'");
    return value;
}

std::size_t read_key_count(LineReader &reader, const std::string &key) {
    auto tokens = reader.next(key);
    if (tokens.size() != 2 || tokens[0] != key)
        throw ParseError(key, "expected '" + key + " <count>'");
    return to_count(tokens[1], key);
}

std::vector<double> read_row(LineReader &reader, const std::string &field, std::size_t cols) {
    auto tokens = reader.next(field);
    if (tokens.size() != cols)
        throw ParseError(field, "expected " + std::to_string(cols) + " values, got " + std::to_string(tokens.size()));
    std::vector<double> row(cols);
    for (std::size_t c = 0; c < cols; ++c)
        row[c] = to_double(tokens[c], field);
    return row;
}

Matrix<double> read_matrix(LineReader &reader, const std::string &name, std::size_t rows, std::size_t cols) {
    auto header = reader.next(name);
    if (header.size() != 3 || header[0] != name)
        throw ParseError(name, "expected '" + name + " <rows> <cols>'");
    if (to_count(header[1], name) != rows || to_count(header[2], name) != cols)
        throw ParseError(name, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols));
    Matrix<double> m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto row = read_row(reader, name, cols);
        std::copy(row.begin(), row.end(), m.row(r).begin());
    }
    return m;
}

} // namespace

std::string serialize_instance(const Instance &instance) {
    const std::size_t n = instance.n_tasks();
    const std::size_t m = instance.n_procs();
    std::ostringstream out;
    out << kMagic << ' ' << kInstanceFormatVersion << '\n';
    out << "n_tasks " << n << '\n';
    out << "n_procs " << m << '\n';
    write_matrix(out, "data_volume", instance.graph.data_volume);
    write_matrix(out, "exec_time", instance.platform.exec_time);
    out << "proc_failure " << instance.platform.proc_failure.size() << '\n';
    write_row(out, instance.platform.proc_failure);
    write_matrix(out, "link_failure", instance.platform.link_failure);
    write_matrix(out, "link_delay", instance.platform.link_delay);
    if (instance.deadlines) {
        out << "deadlines " << instance.deadlines->size() << '\n';
        write_row(out, *instance.deadlines);
    } else {
        out << "deadlines 0\n";
    }
    out << "end\n";
    return out.str();
}

Instance parse_instance(std::string_view text) {
    LineReader reader(text);
    {
        auto magic = reader.next("header");
        if (magic.size() != 2 || magic[0] != kMagic)
            throw ParseError("header", "expected '" + std::string(kMagic) + " <version>'");
        const auto version = to_count(magic[1], "header");
        if (version != static_cast<std::size_t>(kInstanceFormatVersion))
            throw VersionError("unsupported instance format version " + std::to_string(version) + " (expected " +
                               std::to_string(kInstanceFormatVersion) + ")");
    }
    const std::size_t n = read_key_count(reader, "n_tasks");
    const std::size_t m = read_key_count(reader, "n_procs");

    Instance instance;
    instance.graph = TaskGraph::from_volumes(read_matrix(reader, "data_volume", n, n));
    instance.platform.n_procs = m;
    instance.platform.exec_time = read_matrix(reader, "exec_time", n, m);
    if (read_key_count(reader, "proc_failure") != m)
        throw ParseError("proc_failure", "expected " + std::to_string(m) + " entries");
    instance.platform.proc_failure = m ? read_row(reader, "proc_failure", m) : std::vector<double>{};
    instance.platform.link_failure = read_matrix(reader, "link_failure", m, m);
    instance.platform.link_delay = read_matrix(reader, "link_delay", m, m);
    const std::size_t n_deadlines = read_key_count(reader, "deadlines");
    if (n_deadlines != 0) {
        if (n_deadlines != n)
            throw ParseError("deadlines", "expected 0 or " + std::to_string(n) + " entries");
        instance.deadlines = read_row(reader, "deadlines", n);
    }
    auto end = reader.next("end");
    if (end.size() != 1 || end[0] != "end")
        throw ParseError("end", "expected 'end'");

    const auto violations = validate(instance);
    if (!violations.empty()) {
        std::string message = "invalid instance:";
        for (const auto &v : violations)
            message += "\n  " + v;
        throw ValidationError(message);
    }
    return instance;
}

void save_instance(const Instance &instance, const std::filesystem::path &destination) {
    write_file_atomic(destination, serialize_instance(instance));
}

Instance load_instance(const std::filesystem::path &source) { return parse_instance(read_file(source)); }

} // namespace rsched
