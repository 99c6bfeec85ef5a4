#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "rsched/error.hpp"
#include "rsched/io.hpp"
#include "test_support.hpp"

using namespace rsched;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
  protected:
    void SetUp() override {
        const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() /
               ("rsched-cli-" + std::to_string(::getpid()) + "-" + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path gen(std::size_t n, std::size_t m, std::uint64_t seed, const std::string &name = "instance.txt") {
        GeneratorOptions options;
        options.n_tasks = n;
        options.n_procs = m;
        options.seed = seed;
        std::ostringstream log;
        cli::cmd_gen(options, dir_ / name, log);
        return dir_ / name;
    }

    static int run_binary(const std::string &args) {
        const std::string command = std::string(RSCHED_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(command.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path dir_;
};

std::size_t count_files(const fs::path &dir, std::string_view suffix) {
    std::size_t n = 0;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.path().string().ends_with(suffix))
            ++n;
    return n;
}

} // namespace

TEST_F(CliTest, GenWritesAReloadableDeterministicInstance) {
    const auto a = gen(10, 2, 42, "a.txt");
    const auto b = gen(10, 2, 42, "b.txt");
    const auto inst = load_instance(a);
    EXPECT_EQ(inst.n_tasks(), 10u);
    EXPECT_EQ(inst.n_procs(), 2u);
    EXPECT_TRUE(validate(inst).empty());
    EXPECT_EQ(read_file(a), read_file(b));
}

TEST_F(CliTest, BinaryGenMatchesTheLibrary) {
    const auto out = dir_ / "bin.txt";
    ASSERT_EQ(run_binary("--seed 42 gen --tasks 10 --procs 2 --epsilon 0.5 --dist normal -o " + out.string()), 0);
    EXPECT_EQ(read_file(out), read_file(gen(10, 2, 42)));
}

TEST_F(CliTest, BadArgumentsExitNonzero) {
    EXPECT_NE(run_binary("gen --epsilon 1.5 -o " + (dir_ / "x.txt").string()), 0);
    EXPECT_FALSE(fs::exists(dir_ / "x.txt"));
    EXPECT_NE(run_binary("solve --instance " + (dir_ / "missing.txt").string()), 0);
    EXPECT_NE(run_binary("frobnicate"), 0);
}

TEST_F(CliTest, OddPopulationIsAUsageError) {
    const auto inst = gen(6, 2, 1);
    EXPECT_EQ(run_binary("--out-dir " + dir_.string() + " solve -i " + inst.string() + " --pop-size 7 -g 1"), 2);
    EXPECT_FALSE(fs::exists(dir_ / "front.csv"));
}

TEST_F(CliTest, SolveUsesTwiceTheTaskCountAndEchoesIt) {
    cli::RunConfig config;
    config.instance_path = gen(10, 2, 3);
    config.evolution.generations = 5;
    config.output_dir = dir_;
    std::ostringstream log;
    const auto result = cli::cmd_solve(config, log);
    EXPECT_EQ(result.config.pop_size, 20u);
    EXPECT_NE(log.str().find("pop_size=20"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "front.csv"));
    EXPECT_TRUE(fs::exists(dir_ / "stats.csv"));
}

TEST_F(CliTest, MoreGenerationsNeverWorsenTheBestMakespan) {
    cli::RunConfig config;
    config.instance_path = gen(10, 2, 4);
    config.output_dir = dir_;
    std::ostringstream log;
    config.evolution.generations = 1;
    const auto one = cli::cmd_solve(config, log);
    config.evolution.generations = 5;
    const auto five = cli::cmd_solve(config, log);
    EXPECT_LE(five.run.front.front().objectives.makespan, one.run.front.front().objectives.makespan);
}

TEST_F(CliTest, FrontCsvRowsReEvaluateToTheirObjectives) {
    cli::RunConfig config;
    config.instance_path = gen(10, 3, 5);
    config.evolution.generations = 20;
    config.output_dir = dir_;
    std::ostringstream log;
    cli::cmd_solve(config, log);
    const auto inst = load_instance(config.instance_path);
    const auto text = read_file(dir_ / "front.csv");
    EXPECT_TRUE(text.starts_with("makespan,reliability_cost,schedule\n"));
    const auto rows = cli::parse_front_csv(text);
    ASSERT_FALSE(rows.empty());
    for (const auto &row : rows) {
        const auto v = evaluate(row.schedule, inst);
        EXPECT_EQ(v.makespan, row.makespan);
        EXPECT_NEAR(v.reliability_cost, row.reliability_cost, 1e-8 * v.reliability_cost);
    }
}

TEST_F(CliTest, EvalReproducesTheFrontObjectives) {
    cli::RunConfig config;
    config.instance_path = gen(8, 2, 6);
    config.evolution.generations = 10;
    config.output_dir = dir_;
    std::ostringstream log;
    const auto solved = cli::cmd_solve(config, log);
    const auto &best = solved.run.front.front();
    write_file_atomic(dir_ / "s.txt", format_schedule(best.schedule));
    std::ostringstream out;
    const auto report = cli::cmd_eval(config.instance_path, dir_ / "s.txt", out);
    EXPECT_EQ(report.objectives, best.objectives);
    EXPECT_NE(out.str().find("deadline_misses"), std::string::npos);
    EXPECT_EQ(run_binary("eval -i " + config.instance_path.string() + " -s " + (dir_ / "s.txt").string()), 0);
}

TEST_F(CliTest, EvalRejectsAnIllegalSchedule) {
    const auto inst_path = dir_ / "chain.txt";
    save_instance(rsched::testing::make_instance(2, 1, {{0, 1}}), inst_path);
    write_file_atomic(dir_ / "bad.txt", "1,0\n");
    std::ostringstream out;
    EXPECT_THROW(cli::cmd_eval(inst_path, dir_ / "bad.txt", out), ValidationError);
    EXPECT_NE(run_binary("eval -i " + inst_path.string() + " -s " + (dir_ / "bad.txt").string()), 0);
}

TEST_F(CliTest, EvalOfASingleTaskStartsAtZero) {
    const auto inst_path = dir_ / "one.txt";
    save_instance(rsched::testing::make_instance(1, 2, {}), inst_path);
    write_file_atomic(dir_ / "s.txt", "\n0\n");
    std::ostringstream out;
    const auto report = cli::cmd_eval(inst_path, dir_ / "s.txt", out);
    EXPECT_EQ(report.timing.start[0], 0.0);
    EXPECT_NE(out.str().find("0,1,0,1"), std::string::npos);
}

TEST_F(CliTest, OracleOnASingleTaskCoversEverything) {
    const auto inst_path = dir_ / "one.txt";
    auto inst = rsched::testing::make_instance(1, 2, {});
    inst.platform.exec_time(0, 1) = 2.0;
    inst.platform.proc_failure[1] = 1e-6;
    save_instance(inst, inst_path);
    for (auto alloc : {Allocation::RandomSplit, Allocation::RoundRobin}) {
        cli::RunConfig config;
        config.instance_path = inst_path;
        config.evolution.generations = 2;
        config.evolution.allocation = alloc;
        config.output_dir = dir_;
        std::ostringstream out;
        const auto report = cli::cmd_oracle(config, out);
        EXPECT_DOUBLE_EQ(report.distance.coverage, 1.0);
        EXPECT_TRUE(fs::exists(dir_ / "oracle.csv"));
    }
}

TEST_F(CliTest, OracleRefusesALargeInstance) {
    cli::RunConfig config;
    config.instance_path = gen(50, 4, 7);
    config.output_dir = dir_;
    std::ostringstream out;
    EXPECT_THROW(cli::cmd_oracle(config, out), SizeError);
    EXPECT_NE(run_binary("--out-dir " + dir_.string() + " oracle -i " + config.instance_path.string()), 0);
    EXPECT_FALSE(fs::exists(dir_ / "oracle.csv"));
}

TEST_F(CliTest, PaperCaseFileCounts) {
    std::ostringstream out;
    cli::PaperCaseOptions options;
    options.output_dir = dir_ / "c1";
    EXPECT_EQ(cli::cmd_paper_case(options, out).runs.size(), 4u);
    EXPECT_EQ(count_files(dir_ / "c1", "_front.csv"), 4u);

    options.which = cli::PaperCase::Case2;
    options.output_dir = dir_ / "c2";
    EXPECT_EQ(cli::cmd_paper_case(options, out).runs.size(), 2u);
    EXPECT_EQ(count_files(dir_ / "c2", "_front.csv"), 2u);
}

TEST_F(CliTest, NoTemporaryFilesAreLeftBehind) {
    cli::RunConfig config;
    config.instance_path = gen(6, 2, 8);
    config.evolution.generations = 3;
    config.output_dir = dir_;
    std::ostringstream log;
    cli::cmd_solve(config, log);
    EXPECT_EQ(count_files(dir_, ".tmp"), 0u);
}
