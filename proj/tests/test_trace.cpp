#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wfkit/trace.hpp"

using namespace wfkit;

namespace {

TaskSpec make_task(std::string id, std::vector<std::string> parents = {},
                   std::vector<FileSpec> files = {}) {
    TaskSpec t;
    t.id = id;
    t.name = id;
    t.category = "generic";
    t.runtime_seconds = 1.0;
    t.parents = std::move(parents);
    t.files = std::move(files);
    return t;
}

WorkflowTrace make_trace(std::vector<TaskSpec> tasks) {
    WorkflowTrace trace;
    trace.name = "test";
    trace.tasks = std::move(tasks);
    return trace;
}

bool has_code(const std::vector<Violation>& violations, ViolationCode code) {
    return std::any_of(violations.begin(), violations.end(),
                       [code](const Violation& v) { return v.code == code; });
}

}  // namespace

TEST_CASE("minimal document with empty tasks parses") {
    auto trace = parse_trace(R"({"name":"w","schemaVersion":"1.0","tasks":[]})");
    CHECK(trace.name == "w");
    CHECK(trace.schema_version == "1.0");
    CHECK(trace.tasks.empty());
    CHECK(validate(trace).empty());
}

TEST_CASE("task defaults: cores=1, name falls back to id") {
    auto trace = parse_trace(
        R"({"name":"w","schemaVersion":"1.0","tasks":[
             {"id":"t1","category":"x","runtimeSeconds":10,"parents":[],"files":[]}]})");
    REQUIRE(trace.tasks.size() == 1);
    const auto& t = trace.tasks[0];
    CHECK(t.id == "t1");
    CHECK(t.name == "t1");
    CHECK(t.category == "x");
    CHECK(t.cores == 1);
    CHECK(t.runtime_seconds == doctest::Approx(10.0));
}

TEST_CASE("missing runtimeSeconds is a SYNTAX violation at the task's path") {
    try {
        parse_trace(R"({"name":"w","schemaVersion":"1.0","tasks":[{"id":"t1"}]})");
        FAIL("expected TraceParseError");
    } catch (const TraceParseError& e) {
        CHECK(e.violation().code == ViolationCode::kSyntax);
        CHECK(e.violation().path == "/tasks/0/runtimeSeconds");
    }
}

TEST_CASE("malformed JSON and wrong-typed fields are SYNTAX") {
    CHECK_THROWS_AS(parse_trace("{nope"), TraceParseError);
    CHECK_THROWS_AS(parse_trace("[1,2,3]"), TraceParseError);
    CHECK_THROWS_AS(
        parse_trace(R"({"name":"w","schemaVersion":"1.0","tasks":[
            {"id":"t","runtimeSeconds":"fast"}]})"),
        TraceParseError);
    // cores must be an integer, not a real
    CHECK_THROWS_AS(
        parse_trace(R"({"name":"w","schemaVersion":"1.0","tasks":[
            {"id":"t","runtimeSeconds":1,"cores":1.5}]})"),
        TraceParseError);
    // bad link enum value
    CHECK_THROWS_AS(
        parse_trace(R"({"name":"w","schemaVersion":"1.0","tasks":[
            {"id":"t","runtimeSeconds":1,
             "files":[{"name":"f","sizeBytes":1,"link":"sideways"}]}]})"),
        TraceParseError);
}

TEST_CASE("unknown fields: ignored by default, rejected in strict mode") {
    const std::string text =
        R"({"name":"w","schemaVersion":"1.0","novel":true,"tasks":[
            {"id":"t","runtimeSeconds":1,"cpuUtilization":0.5}]})";
    CHECK_NOTHROW(parse_trace(text));
    ParseOptions strict;
    strict.strict_unknown_fields = true;
    CHECK_THROWS_AS(parse_trace(text, strict), TraceParseError);
}

TEST_CASE("optional fields survive a parse") {
    auto trace = parse_trace(
        R"({"name":"w","description":"d","schemaVersion":"1.0","wms":"pegasus",
            "executedAt":"2020-01-01T00:00:00Z","makespanSeconds":12.5,
            "machines":[{"nodeName":"n0","cores":48,"cpuSpeedMHz":2400.0,
                         "memoryBytes":64000000000}],
            "tasks":[{"id":"t","runtimeSeconds":1,"cores":4,"memoryBytes":100,
                      "energyJoules":5.5,"machine":"n0"}]})");
    CHECK(trace.description == "d");
    CHECK(trace.wms == "pegasus");
    CHECK(trace.executed_at == "2020-01-01T00:00:00Z");
    CHECK(trace.makespan_seconds == doctest::Approx(12.5));
    REQUIRE(trace.machines.size() == 1);
    CHECK(trace.machines[0].cores == 48);
    CHECK(trace.machines[0].cpu_speed_mhz == doctest::Approx(2400.0));
    const auto& t = trace.tasks[0];
    CHECK(t.cores == 4);
    CHECK(t.memory_bytes == 100);
    CHECK(t.energy_joules == doctest::Approx(5.5));
    CHECK(t.machine == "n0");
    CHECK(validate(trace).empty());
}

TEST_CASE("round trip: parse(serialize(t)) == t") {
    WorkflowTrace trace;
    trace.name = "roundtrip";
    trace.description = "two tasks";
    trace.wms = "none";
    trace.makespan_seconds = 48.846;
    trace.machines.push_back({"node0", 48, 2600.0, std::int64_t{1} << 35});
    auto a = make_task("a", {}, {{"a_out.dat", 1024, FileLink::kOutput}});
    a.runtime_seconds = 48.846;
    auto b = make_task("b", {"a"},
                       {{"a_out.dat", 1024, FileLink::kInput},
                        {"b_out.dat", 2048, FileLink::kOutput}});
    b.cores = 4;
    b.memory_bytes = 1 << 20;
    b.machine = "node0";
    trace.tasks = {a, b};
    REQUIRE(validate(trace).empty());

    std::string text = serialize_trace(trace);
    WorkflowTrace again = parse_trace(text);
    CHECK(again == trace);
    // runtime 48.846 survives the decimal form exactly
    CHECK(again.tasks[0].runtime_seconds == 48.846);
}

TEST_CASE("serialization is byte deterministic") {
    auto trace = make_trace({make_task("a"), make_task("b", {"a"})});
    std::string once = serialize_trace(trace);
    std::string twice = serialize_trace(parse_trace(once));
    CHECK(once == twice);
}

TEST_CASE("validate: duplicate id") {
    auto trace = make_trace({make_task("a"), make_task("a")});
    auto violations = validate(trace);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == ViolationCode::kDuplicateId);
    CHECK(violations[0].path == "/tasks/1/id");
}

TEST_CASE("validate: unknown parent") {
    auto trace = make_trace({make_task("a", {"ghost"})});
    auto violations = validate(trace);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == ViolationCode::kUnknownParent);
    CHECK(violations[0].path == "/tasks/0/parents/0");
}

TEST_CASE("validate: mutual parents form a cycle") {
    auto trace = make_trace({make_task("a", {"b"}), make_task("b", {"a"})});
    CHECK(has_code(validate(trace), ViolationCode::kCycle));
}

TEST_CASE("validate: consuming a non-parent's output is FILE_INCONSISTENT") {
    auto a = make_task("a", {}, {{"f.dat", 10, FileLink::kOutput}});
    auto b = make_task("b", {}, {{"f.dat", 10, FileLink::kInput}});
    auto violations = validate(make_trace({a, b}));
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == ViolationCode::kFileInconsistent);
    CHECK(violations[0].path == "/tasks/1/files/0");
}

TEST_CASE("validate: chain with matching files is clean") {
    auto a = make_task("a", {}, {{"f.dat", 10, FileLink::kOutput}});
    auto b = make_task("b", {"a"}, {{"f.dat", 10, FileLink::kInput}});
    CHECK(validate(make_trace({a, b})).empty());
}

TEST_CASE("validate: duplicate (name, link) pair within files") {
    auto a = make_task("a", {},
                       {{"f.dat", 10, FileLink::kInput},
                        {"f.dat", 20, FileLink::kInput}});
    auto violations = validate(make_trace({a}));
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == ViolationCode::kFileInconsistent);
}

TEST_CASE("validate: same name with opposite links is fine (in-place update)") {
    auto a = make_task("a", {},
                       {{"f.dat", 10, FileLink::kInput},
                        {"f.dat", 20, FileLink::kOutput}});
    // "a" consumes f.dat that it also produces; no other producer exists.
    CHECK(validate(make_trace({a})).empty());
}

TEST_CASE("validate: unknown machine and negative values") {
    auto trace = make_trace({make_task("a")});
    trace.tasks[0].machine = "missing";
    CHECK(has_code(validate(trace), ViolationCode::kUnknownMachine));

    trace = make_trace({make_task("a")});
    trace.tasks[0].runtime_seconds = -1;
    CHECK(has_code(validate(trace), ViolationCode::kNegativeValue));

    trace = make_trace({make_task("a")});
    trace.tasks[0].cores = 0;
    CHECK(has_code(validate(trace), ViolationCode::kNegativeValue));

    trace = make_trace({make_task("a", {}, {{"f", -5, FileLink::kInput}})});
    CHECK(has_code(validate(trace), ViolationCode::kNegativeValue));

    trace = make_trace({make_task("a")});
    trace.makespan_seconds = -0.5;
    CHECK(has_code(validate(trace), ViolationCode::kNegativeValue));
}

TEST_CASE("validate reports every violation, not just the first") {
    auto a = make_task("a", {"ghost"});
    a.runtime_seconds = -2;
    auto b = make_task("b");
    b.cores = -1;
    auto violations = validate(make_trace({a, b}));
    CHECK(violations.size() == 3);
    CHECK(has_code(violations, ViolationCode::kUnknownParent));
    CHECK(has_code(violations, ViolationCode::kNegativeValue));
}

TEST_CASE("violation line format is code<TAB>path<TAB>message") {
    Violation v{ViolationCode::kUnknownParent, "no such task", "/tasks/0/parents/1"};
    CHECK(v.to_line() == "UNKNOWN_PARENT\t/tasks/0/parents/1\tno such task");
    CHECK(to_string(ViolationCode::kFileInconsistent) == "FILE_INCONSISTENT");
}

TEST_CASE("topological order: singleton, diamond, tie-break") {
    CHECK(topological_order(make_trace({make_task("a")})) ==
          std::vector<std::string>{"a"});

    auto diamond = make_trace({make_task("a"), make_task("b", {"a"}),
                               make_task("c", {"a"}), make_task("d", {"b", "c"})});
    CHECK(topological_order(diamond) ==
          std::vector<std::string>({"a", "b", "c", "d"}));

    auto pair = make_trace({make_task("z"), make_task("a")});
    CHECK(topological_order(pair) == std::vector<std::string>({"a", "z"}));
}

TEST_CASE("topological order throws on a cycle") {
    auto trace = make_trace({make_task("a", {"b"}), make_task("b", {"a"})});
    CHECK_THROWS_AS(topological_order(trace), CycleError);
}

TEST_CASE("task_type_of strips a trailing _<digits> suffix only") {
    TaskSpec t;
    t.category = "explicit";
    t.name = "individuals_00001";
    CHECK(task_type_of(t) == "explicit");
    t.category.clear();
    CHECK(task_type_of(t) == "individuals");
    t.name = "mProject";
    CHECK(task_type_of(t) == "mProject");
    t.name = "weird_";
    CHECK(task_type_of(t) == "weird_");
    t.name = "a_1b";
    CHECK(task_type_of(t) == "a_1b");
}

TEST_CASE("total input/output bytes sum by link") {
    auto t = make_task("a", {},
                       {{"i1", 10, FileLink::kInput},
                        {"i2", 30, FileLink::kInput},
                        {"o1", 5, FileLink::kOutput}});
    CHECK(t.total_input_bytes() == 40);
    CHECK(t.total_output_bytes() == 5);
}

// Brute-force reachability oracle: does following parent links from any task
// ever come back to it?
static bool has_cycle_oracle(const WorkflowTrace& trace) {
    std::set<std::string> ids;
    for (const auto& t : trace.tasks) ids.insert(t.id);
    for (const auto& start : trace.tasks) {
        std::vector<std::string> stack{start.id};
        std::set<std::string> seen;
        while (!stack.empty()) {
            auto cur = stack.back();
            stack.pop_back();
            for (const auto& t : trace.tasks) {
                if (t.id != cur) continue;
                for (const auto& p : t.parents) {
                    if (!ids.contains(p)) continue;
                    if (p == start.id) return true;
                    if (seen.insert(p).second) stack.push_back(p);
                }
            }
        }
    }
    return false;
}

TEST_CASE("cycle detection agrees with a brute-force oracle on random graphs") {
    std::mt19937 rng(1234);
    for (int round = 0; round < 300; ++round) {
        int n = 2 + static_cast<int>(rng() % 11);
        std::vector<TaskSpec> tasks;
        for (int i = 0; i < n; ++i) tasks.push_back(make_task("t" + std::to_string(i)));
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j && rng() % 5 == 0) {
                    tasks[i].parents.push_back("t" + std::to_string(j));
                }
            }
        }
        auto trace = make_trace(tasks);
        bool expected = has_cycle_oracle(trace);
        CAPTURE(round);
        CHECK(has_code(validate(trace), ViolationCode::kCycle) == expected);
        if (!expected) {
            // Order must respect every edge.
            auto order = topological_order(trace);
            REQUIRE(order.size() == trace.tasks.size());
            std::map<std::string, std::size_t> pos;
            for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
            for (const auto& t : trace.tasks) {
                for (const auto& p : t.parents) {
                    CHECK(pos.at(p) < pos.at(t.id));
                }
            }
        } else {
            CHECK_THROWS_AS(topological_order(trace), CycleError);
        }
    }
}

TEST_CASE("injecting one defect yields exactly that violation code") {
    auto base = [] {
        auto a = make_task("a", {}, {{"a.out", 10, FileLink::kOutput}});
        auto b = make_task("b", {"a"},
                           {{"a.out", 10, FileLink::kInput},
                            {"b.out", 20, FileLink::kOutput}});
        auto c = make_task("c", {"b"}, {{"b.out", 20, FileLink::kInput}});
        return make_trace({a, b, c});
    };
    REQUIRE(validate(base()).empty());

    auto dup = base();
    dup.tasks[2].id = "a";
    {
        auto v = validate(dup);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::kDuplicateId);
    }

    auto dangling = base();
    dangling.tasks[2].parents.push_back("nobody");
    {
        auto v = validate(dangling);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::kUnknownParent);
    }

    auto orphan = base();
    orphan.tasks[2].parents = {};  // c still consumes b.out
    {
        auto v = validate(orphan);
        REQUIRE(v.size() == 1);
        CHECK(v[0].code == ViolationCode::kFileInconsistent);
    }
}
