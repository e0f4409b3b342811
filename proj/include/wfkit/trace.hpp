#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfkit {

/// Data direction of a file relative to the task that lists it.
enum class FileLink { kInput, kOutput };

struct FileSpec {
    std::string name;
    std::int64_t size_bytes = 0;
    FileLink link = FileLink::kInput;

    bool operator==(const FileSpec&) const = default;
};

struct MachineSpec {
    std::string node_name;
    std::int64_t cores = 1;
    std::optional<double> cpu_speed_mhz;
    std::optional<std::int64_t> memory_bytes;

    bool operator==(const MachineSpec&) const = default;
};

struct TaskSpec {
    std::string id;
    std::string name;
    std::string category;  // task type label, unit of statistical summarization
    double runtime_seconds = 0.0;
    std::int64_t cores = 1;
    std::optional<std::int64_t> memory_bytes;
    std::optional<double> energy_joules;
    std::optional<std::string> machine;
    std::vector<std::string> parents;
    std::vector<FileSpec> files;

    bool operator==(const TaskSpec&) const = default;

    std::int64_t total_input_bytes() const;
    std::int64_t total_output_bytes() const;
};

/// One workflow execution: a DAG of tasks plus the machines it ran on.
/// Immutable by convention once built; all operations below are pure.
struct WorkflowTrace {
    std::string name;
    std::optional<std::string> description;
    std::string schema_version = "1.0";
    std::optional<std::string> wms;
    std::optional<std::string> executed_at;  // ISO-8601
    std::optional<double> makespan_seconds;
    std::vector<MachineSpec> machines;
    std::vector<TaskSpec> tasks;

    bool operator==(const WorkflowTrace&) const = default;
};

enum class ViolationCode {
    kSyntax,
    kDuplicateId,
    kUnknownParent,
    kCycle,
    kFileInconsistent,
    kUnknownMachine,
    kNegativeValue,
};

std::string to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string message;
    std::string path;  // JSON-pointer-style locator

    /// CLI line format: <code>\t<path>\t<message>
    std::string to_line() const;
};

/// Thrown by parse_trace on malformed JSON or a missing/mistyped field.
class TraceParseError : public std::runtime_error {
public:
    explicit TraceParseError(Violation violation)
        : std::runtime_error(violation.to_line()), violation_(std::move(violation)) {}
    const Violation& violation() const { return violation_; }

private:
    Violation violation_;
};

/// Thrown by topological_order when the parent relation has a cycle.
class CycleError : public std::runtime_error {
public:
    explicit CycleError(std::string message) : std::runtime_error(std::move(message)) {}
};

struct ParseOptions {
    /// Reject documents containing fields outside the schema. Default is
    /// to ignore them so richer logs still load.
    bool strict_unknown_fields = false;
};

/// Parses a canonical-format JSON document. Missing optional fields take
/// their documented defaults: task name defaults to the id, category stays
/// empty (task_type_of supplies the analysis-time fallback), cores defaults
/// to 1, parents/files/machines default to empty.
WorkflowTrace parse_trace(const std::string& text, const ParseOptions& options = {});

/// Canonical serialization: object keys sorted, tasks in input order,
/// reals in shortest round-trip decimal form. parse_trace(serialize_trace(t))
/// structurally equals t, and equal traces serialize to identical bytes.
std::string serialize_trace(const WorkflowTrace& trace);

/// Returns every invariant violation (never just the first). Empty iff the
/// trace is well formed, including the file-consistency rule: a task that
/// consumes a file produced by another task must list the producer among
/// its parents.
std::vector<Violation> validate(const WorkflowTrace& trace);

/// Kahn's algorithm over the parent relation; ties broken by lexicographic
/// task id so the order is deterministic. Throws CycleError on a cycle.
std::vector<std::string> topological_order(const WorkflowTrace& trace);

/// Task type for analysis: the explicit category when set, otherwise the
/// task name with a trailing "_<digits>" suffix stripped.
std::string task_type_of(const TaskSpec& task);

}  // namespace wfkit
