#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wfkit/simulator.hpp"
#include "wfkit/trace.hpp"

using namespace wfkit;

namespace {

TaskSpec make_task(std::string id, double runtime, std::vector<std::string> parents = {},
                   std::int64_t cores = 1) {
    TaskSpec t;
    t.id = id;
    t.name = std::move(id);
    t.runtime_seconds = runtime;
    t.cores = cores;
    t.parents = std::move(parents);
    return t;
}

WorkflowTrace make_trace(std::vector<TaskSpec> tasks) {
    WorkflowTrace trace;
    trace.name = "sim-test";
    trace.tasks = std::move(tasks);
    return trace;
}

const TaskTimeline& timeline_of(const SimulationResult& result, const std::string& id) {
    for (const auto& t : result.timelines) {
        if (t.task_id == id) return t;
    }
    REQUIRE_MESSAGE(false, "no timeline for " << id);
    static TaskTimeline unreachable;
    return unreachable;
}

// Random DAG over n tasks with edges only from lower to higher index.
WorkflowTrace random_dag(std::mt19937_64& gen, int n, int max_cores) {
    std::uniform_real_distribution<double> runtime(0.5, 20.0);
    std::uniform_int_distribution<int> cores(1, max_cores);
    std::uniform_int_distribution<int> coin(0, 3);
    std::vector<TaskSpec> tasks;
    for (int i = 0; i < n; ++i) {
        auto t = make_task("t" + std::to_string(i), runtime(gen), {}, cores(gen));
        for (int j = 0; j < i; ++j) {
            if (coin(gen) == 0) t.parents.push_back("t" + std::to_string(j));
        }
        tasks.push_back(std::move(t));
    }
    return make_trace(std::move(tasks));
}

}  // namespace

TEST_CASE("a single ten-second task completes at exactly ten seconds") {
    auto result = simulate(make_trace({make_task("only", 10.0)}), PlatformSpec{});
    REQUIRE(result.timelines.size() == 1);
    CHECK(result.timelines[0].submit_sec == 0.0);
    CHECK(result.timelines[0].start_sec == 0.0);
    CHECK(result.timelines[0].completion_sec == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(result.makespan_sec == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(makespan(result) == result.makespan_sec);
}

TEST_CASE("a three-task chain serializes to thirty seconds") {
    auto result = simulate(make_trace({
                               make_task("a", 10.0),
                               make_task("b", 10.0, {"a"}),
                               make_task("c", 10.0, {"b"}),
                           }),
                           PlatformSpec{});
    CHECK(timeline_of(result, "a").completion_sec == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(timeline_of(result, "b").submit_sec == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(timeline_of(result, "b").completion_sec == doctest::Approx(20.0).epsilon(1e-9));
    CHECK(timeline_of(result, "c").completion_sec == doctest::Approx(30.0).epsilon(1e-9));
    CHECK(result.makespan_sec == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("ninety-six independent tasks need one wave on two nodes, two on one") {
    std::vector<TaskSpec> tasks;
    for (int i = 0; i < 96; ++i) {
        tasks.push_back(make_task("t" + std::to_string(i), 10.0));
    }
    auto trace = make_trace(tasks);

    PlatformSpec two_nodes;
    two_nodes.node_count = 2;
    CHECK(simulate(trace, two_nodes).makespan_sec == doctest::Approx(10.0).epsilon(1e-9));

    PlatformSpec one_node;
    CHECK(simulate(trace, one_node).makespan_sec == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("reading 1.25e9 bytes over a 1.25e9 B/s filesystem costs one second") {
    auto t = make_task("io", 0.0);
    t.files.push_back({"in.dat", 1'250'000'000, FileLink::kInput});
    auto result = simulate(make_trace({t}), PlatformSpec{});
    CHECK(result.makespan_sec == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("input and output transfers and per-file latency all add up") {
    auto t = make_task("io", 4.0);
    t.files.push_back({"a.dat", 2'500'000'000, FileLink::kInput});
    t.files.push_back({"b.dat", 1'250'000'000, FileLink::kInput});
    t.files.push_back({"c.dat", 625'000'000, FileLink::kOutput});
    PlatformSpec platform;
    platform.per_file_latency_sec = 0.25;
    // 2.0 + 1.0 input transfer + 2 * 0.25 input latency + 4.0 compute
    // + 0.5 output transfer + 0.25 output latency
    auto result = simulate(make_trace({t}), platform);
    CHECK(result.makespan_sec == doctest::Approx(8.25).epsilon(1e-9));
}

TEST_CASE("a faster platform shortens only the compute share") {
    auto t = make_task("io", 6.0);
    t.files.push_back({"in.dat", 1'250'000'000, FileLink::kInput});
    PlatformSpec fast;
    fast.speed_factor = 3.0;
    auto result = simulate(make_trace({t}), fast);
    CHECK(result.makespan_sec == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("doubling speed on a file-free workflow halves the makespan exactly") {
    std::mt19937_64 gen(2024);
    for (int round = 0; round < 20; ++round) {
        auto trace = random_dag(gen, 24, 8);
        PlatformSpec base;
        base.cores_per_node = 8;
        PlatformSpec doubled = base;
        doubled.speed_factor = 2.0;
        auto slow = simulate(trace, base);
        auto fast = simulate(trace, doubled);
        REQUIRE(fast.makespan_sec == slow.makespan_sec / 2.0);
        for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
            REQUIRE(fast.timelines[i].completion_sec ==
                    slow.timelines[i].completion_sec / 2.0);
        }
    }
}

TEST_CASE("parents always complete before a child is submitted or started") {
    std::mt19937_64 gen(7);
    for (int round = 0; round < 30; ++round) {
        auto trace = random_dag(gen, 30, 4);
        PlatformSpec platform;
        platform.node_count = 2;
        platform.cores_per_node = 4;
        auto result = simulate(trace, platform);
        std::map<std::string, const TaskTimeline*> by_id;
        for (const auto& t : result.timelines) by_id[t.task_id] = &t;
        for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
            const auto& mine = result.timelines[i];
            REQUIRE(mine.start_sec >= mine.submit_sec);
            REQUIRE(mine.completion_sec >= mine.start_sec);
            double latest_parent = 0.0;
            for (const auto& parent : trace.tasks[i].parents) {
                REQUIRE(by_id.at(parent)->completion_sec <= mine.submit_sec);
                latest_parent = std::max(latest_parent, by_id.at(parent)->completion_sec);
            }
            // Submission happens the instant the last parent finishes.
            REQUIRE(mine.submit_sec == latest_parent);
        }
    }
}

TEST_CASE("running tasks never exceed the cluster's total core count") {
    std::mt19937_64 gen(13);
    for (int round = 0; round < 20; ++round) {
        auto trace = random_dag(gen, 30, 6);
        PlatformSpec platform;
        platform.node_count = 3;
        platform.cores_per_node = 6;
        auto result = simulate(trace, platform);
        std::vector<double> instants;
        for (const auto& t : result.timelines) instants.push_back(t.start_sec);
        for (double now : instants) {
            std::int64_t used = 0;
            for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
                const auto& t = result.timelines[i];
                if (t.start_sec <= now && now < t.completion_sec) {
                    used += trace.tasks[i].cores;
                }
            }
            REQUIRE(used <= 3 * 6);
        }
    }
}

TEST_CASE("no task waits while cores it could use sit free (single node)") {
    std::mt19937_64 gen(21);
    for (int round = 0; round < 20; ++round) {
        auto trace = random_dag(gen, 30, 8);
        PlatformSpec platform;
        platform.cores_per_node = 8;
        auto result = simulate(trace, platform);
        // At every scheduling instant, a still-waiting task must not fit in
        // the cores left over after that instant's allocations.
        std::set<double> instants;
        for (const auto& t : result.timelines) {
            instants.insert(t.start_sec);
            instants.insert(t.completion_sec);
        }
        for (double now : instants) {
            std::int64_t used = 0;
            for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
                const auto& t = result.timelines[i];
                if (t.start_sec <= now && now < t.completion_sec) {
                    used += trace.tasks[i].cores;
                }
            }
            for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
                const auto& t = result.timelines[i];
                if (t.submit_sec <= now && now < t.start_sec) {
                    REQUIRE(trace.tasks[i].cores > 8 - used);
                }
            }
        }
    }
}

TEST_CASE("wide tasks fall back to the first node with room") {
    // 2 + 4 cores fill node 0 and the 6-core task overflows to node 1, so
    // the whole batch runs in a single wave.
    PlatformSpec platform;
    platform.node_count = 2;
    platform.cores_per_node = 6;
    auto result = simulate(make_trace({
                               make_task("wide4", 10.0, {}, 4),
                               make_task("wide6", 10.0, {}, 6),
                               make_task("slim", 10.0, {}, 2),
                           }),
                           platform);
    CHECK(timeline_of(result, "wide4").start_sec == 0.0);
    CHECK(timeline_of(result, "wide6").start_sec == 0.0);
    CHECK(timeline_of(result, "slim").start_sec == 0.0);
    CHECK(result.makespan_sec == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("a task wider than a node is rejected by name") {
    auto trace = make_trace({make_task("ok", 1.0), make_task("oversized", 1.0, {}, 64)});
    try {
        simulate(trace, PlatformSpec{});
        FAIL("expected SimulationError");
    } catch (const SimulationError& err) {
        CHECK(std::string(err.what()).find("oversized") != std::string::npos);
        CHECK(std::string(err.what()).find("64") != std::string::npos);
    }
}

TEST_CASE("cyclic parent relations surface as a cycle error") {
    auto trace = make_trace({make_task("a", 1.0, {"b"}), make_task("b", 1.0, {"a"})});
    CHECK_THROWS_AS(simulate(trace, PlatformSpec{}), CycleError);
}

TEST_CASE("nonsensical platforms are rejected") {
    auto trace = make_trace({make_task("a", 1.0)});
    PlatformSpec no_nodes;
    no_nodes.node_count = 0;
    CHECK_THROWS_AS(simulate(trace, no_nodes), SimulationError);
    PlatformSpec zero_speed;
    zero_speed.speed_factor = 0.0;
    CHECK_THROWS_AS(simulate(trace, zero_speed), SimulationError);
}

TEST_CASE("an empty workflow simulates to an empty zero-length schedule") {
    auto result = simulate(make_trace({}), PlatformSpec{});
    CHECK(result.timelines.empty());
    CHECK(result.makespan_sec == 0.0);
    CHECK_THROWS_AS(makespan(result), std::invalid_argument);
}

TEST_CASE("equal-priority ties are broken by deterministic topological rank") {
    // Four identical tasks, room for two at a time: the lexicographically
    // first two ids must win the first wave, every run.
    PlatformSpec platform;
    platform.cores_per_node = 2;
    auto result = simulate(make_trace({
                               make_task("d", 5.0),
                               make_task("b", 5.0),
                               make_task("a", 5.0),
                               make_task("c", 5.0),
                           }),
                           platform);
    CHECK(timeline_of(result, "a").start_sec == 0.0);
    CHECK(timeline_of(result, "b").start_sec == 0.0);
    CHECK(timeline_of(result, "c").start_sec == 5.0);
    CHECK(timeline_of(result, "d").start_sec == 5.0);
}

TEST_CASE("simulation output is byte-identical across repeated runs") {
    std::mt19937_64 gen(99);
    auto trace = random_dag(gen, 40, 8);
    PlatformSpec platform;
    platform.node_count = 2;
    platform.cores_per_node = 8;
    platform.per_file_latency_sec = 0.01;
    auto first = result_to_json(simulate(trace, platform));
    auto second = result_to_json(simulate(trace, platform));
    CHECK(first == second);
    CHECK(result_to_csv(simulate(trace, platform)) ==
          result_to_csv(simulate(trace, platform)));
}

TEST_CASE("results round-trip through their JSON form") {
    auto result = simulate(make_trace({
                               make_task("a", 10.0),
                               make_task("b", 2.5, {"a"}),
                           }),
                           PlatformSpec{});
    auto parsed = result_from_json(result_to_json(result));
    REQUIRE(parsed.timelines.size() == 2);
    CHECK(parsed.makespan_sec == result.makespan_sec);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(parsed.timelines[i].task_id == result.timelines[i].task_id);
        CHECK(parsed.timelines[i].submit_sec == result.timelines[i].submit_sec);
        CHECK(parsed.timelines[i].start_sec == result.timelines[i].start_sec);
        CHECK(parsed.timelines[i].completion_sec == result.timelines[i].completion_sec);
    }
    CHECK_THROWS_AS(result_from_json("{\"tasks\": []}"), std::runtime_error);
    CHECK_THROWS_AS(result_from_json("not json"), std::runtime_error);
}

TEST_CASE("CSV export lists one row per task in trace order") {
    auto result = simulate(make_trace({
                               make_task("first", 1.5),
                               make_task("second", 1.0, {"first"}),
                           }),
                           PlatformSpec{});
    CHECK(result_to_csv(result) ==
          "id,submit,start,completion\n"
          "first,0,0,1.5\n"
          "second,1.5,1.5,2.5\n");
}
