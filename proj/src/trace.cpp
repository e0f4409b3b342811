#include "wfkit/trace.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

namespace wfkit {

using nlohmann::json;

std::string to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::kSyntax: return "SYNTAX";
        case ViolationCode::kDuplicateId: return "DUPLICATE_ID";
        case ViolationCode::kUnknownParent: return "UNKNOWN_PARENT";
        case ViolationCode::kCycle: return "CYCLE";
        case ViolationCode::kFileInconsistent: return "FILE_INCONSISTENT";
        case ViolationCode::kUnknownMachine: return "UNKNOWN_MACHINE";
        case ViolationCode::kNegativeValue: return "NEGATIVE_VALUE";
    }
    return "UNKNOWN";
}

std::string Violation::to_line() const {
    return to_string(code) + "\t" + path + "\t" + message;
}

std::int64_t TaskSpec::total_input_bytes() const {
    std::int64_t total = 0;
    for (const auto& f : files) {
        if (f.link == FileLink::kInput) total += f.size_bytes;
    }
    return total;
}

std::int64_t TaskSpec::total_output_bytes() const {
    std::int64_t total = 0;
    for (const auto& f : files) {
        if (f.link == FileLink::kOutput) total += f.size_bytes;
    }
    return total;
}

std::string task_type_of(const TaskSpec& task) {
    if (!task.category.empty()) return task.category;
    const std::string& name = task.name;
    auto underscore = name.find_last_of('_');
    if (underscore != std::string::npos && underscore + 1 < name.size()) {
        bool all_digits = std::all_of(name.begin() + underscore + 1, name.end(),
                                      [](unsigned char c) { return std::isdigit(c); });
        if (all_digits) return name.substr(0, underscore);
    }
    return name;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw TraceParseError({ViolationCode::kSyntax, message, path});
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path + "/" + key, "missing required field \"" + key + "\"");
    return *it;
}

std::string as_string(const json& value, const std::string& path) {
    if (!value.is_string()) fail(path, "expected a string");
    return value.get<std::string>();
}

double as_real(const json& value, const std::string& path) {
    if (!value.is_number()) fail(path, "expected a number");
    return value.get<double>();
}

std::int64_t as_integer(const json& value, const std::string& path) {
    if (!value.is_number_integer()) fail(path, "expected an integer");
    return value.get<std::int64_t>();
}

void check_unknown_fields(const json& obj, const std::set<std::string>& known,
                          const std::string& path, const ParseOptions& options) {
    if (!options.strict_unknown_fields) return;
    for (const auto& [key, value] : obj.items()) {
        if (!known.contains(key)) fail(path + "/" + key, "unknown field \"" + key + "\"");
    }
}

FileSpec parse_file(const json& node, const std::string& path, const ParseOptions& options) {
    if (!node.is_object()) fail(path, "expected a file object");
    check_unknown_fields(node, {"name", "sizeBytes", "link"}, path, options);
    FileSpec file;
    file.name = as_string(require(node, "name", path), path + "/name");
    file.size_bytes = as_integer(require(node, "sizeBytes", path), path + "/sizeBytes");
    std::string link = as_string(require(node, "link", path), path + "/link");
    if (link == "input") {
        file.link = FileLink::kInput;
    } else if (link == "output") {
        file.link = FileLink::kOutput;
    } else {
        fail(path + "/link", "link must be \"input\" or \"output\"");
    }
    return file;
}

MachineSpec parse_machine(const json& node, const std::string& path, const ParseOptions& options) {
    if (!node.is_object()) fail(path, "expected a machine object");
    check_unknown_fields(node, {"nodeName", "cores", "cpuSpeedMHz", "memoryBytes"}, path, options);
    MachineSpec machine;
    machine.node_name = as_string(require(node, "nodeName", path), path + "/nodeName");
    machine.cores = as_integer(require(node, "cores", path), path + "/cores");
    if (auto it = node.find("cpuSpeedMHz"); it != node.end()) {
        machine.cpu_speed_mhz = as_real(*it, path + "/cpuSpeedMHz");
    }
    if (auto it = node.find("memoryBytes"); it != node.end()) {
        machine.memory_bytes = as_integer(*it, path + "/memoryBytes");
    }
    return machine;
}

TaskSpec parse_task(const json& node, const std::string& path, const ParseOptions& options) {
    if (!node.is_object()) fail(path, "expected a task object");
    check_unknown_fields(node,
                         {"id", "name", "category", "runtimeSeconds", "cores", "memoryBytes",
                          "energyJoules", "machine", "parents", "files"},
                         path, options);
    TaskSpec task;
    task.id = as_string(require(node, "id", path), path + "/id");
    task.name = node.contains("name") ? as_string(node["name"], path + "/name") : task.id;
    task.runtime_seconds =
        as_real(require(node, "runtimeSeconds", path), path + "/runtimeSeconds");
    if (auto it = node.find("category"); it != node.end()) {
        task.category = as_string(*it, path + "/category");
    } else {
        task.category.clear();
    }
    if (auto it = node.find("cores"); it != node.end()) {
        task.cores = as_integer(*it, path + "/cores");
    }
    if (auto it = node.find("memoryBytes"); it != node.end()) {
        task.memory_bytes = as_integer(*it, path + "/memoryBytes");
    }
    if (auto it = node.find("energyJoules"); it != node.end()) {
        task.energy_joules = as_real(*it, path + "/energyJoules");
    }
    if (auto it = node.find("machine"); it != node.end()) {
        task.machine = as_string(*it, path + "/machine");
    }
    if (auto it = node.find("parents"); it != node.end()) {
        if (!it->is_array()) fail(path + "/parents", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            task.parents.push_back(
                as_string((*it)[i], path + "/parents/" + std::to_string(i)));
        }
    }
    if (auto it = node.find("files"); it != node.end()) {
        if (!it->is_array()) fail(path + "/files", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            task.files.push_back(
                parse_file((*it)[i], path + "/files/" + std::to_string(i), options));
        }
    }
    return task;
}

}  // namespace

WorkflowTrace parse_trace(const std::string& text, const ParseOptions& options) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail("", "malformed JSON document");
    if (!doc.is_object()) fail("", "top-level value must be an object");
    check_unknown_fields(doc,
                         {"name", "description", "schemaVersion", "wms", "executedAt",
                          "makespanSeconds", "machines", "tasks"},
                         "", options);

    WorkflowTrace trace;
    trace.name = as_string(require(doc, "name", ""), "/name");
    trace.schema_version = as_string(require(doc, "schemaVersion", ""), "/schemaVersion");
    if (auto it = doc.find("description"); it != doc.end()) {
        trace.description = as_string(*it, "/description");
    }
    if (auto it = doc.find("wms"); it != doc.end()) {
        trace.wms = as_string(*it, "/wms");
    }
    if (auto it = doc.find("executedAt"); it != doc.end()) {
        trace.executed_at = as_string(*it, "/executedAt");
    }
    if (auto it = doc.find("makespanSeconds"); it != doc.end()) {
        trace.makespan_seconds = as_real(*it, "/makespanSeconds");
    }
    if (auto it = doc.find("machines"); it != doc.end()) {
        if (!it->is_array()) fail("/machines", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            trace.machines.push_back(
                parse_machine((*it)[i], "/machines/" + std::to_string(i), options));
        }
    }
    const json& tasks = require(doc, "tasks", "");
    if (!tasks.is_array()) fail("/tasks", "expected an array");
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        trace.tasks.push_back(parse_task(tasks[i], "/tasks/" + std::to_string(i), options));
    }
    return trace;
}

std::string serialize_trace(const WorkflowTrace& trace) {
    // nlohmann::json stores object members in a std::map, so dumped keys are
    // sorted; doubles render in shortest round-trip form. Both properties are
    // what makes re-serialization byte-stable.
    json doc;
    doc["name"] = trace.name;
    doc["schemaVersion"] = trace.schema_version;
    if (trace.description) doc["description"] = *trace.description;
    if (trace.wms) doc["wms"] = *trace.wms;
    if (trace.executed_at) doc["executedAt"] = *trace.executed_at;
    if (trace.makespan_seconds) doc["makespanSeconds"] = *trace.makespan_seconds;
    doc["machines"] = json::array();
    for (const auto& machine : trace.machines) {
        json m;
        m["nodeName"] = machine.node_name;
        m["cores"] = machine.cores;
        if (machine.cpu_speed_mhz) m["cpuSpeedMHz"] = *machine.cpu_speed_mhz;
        if (machine.memory_bytes) m["memoryBytes"] = *machine.memory_bytes;
        doc["machines"].push_back(std::move(m));
    }
    doc["tasks"] = json::array();
    for (const auto& task : trace.tasks) {
        json t;
        t["id"] = task.id;
        t["name"] = task.name;
        t["category"] = task.category;
        t["runtimeSeconds"] = task.runtime_seconds;
        t["cores"] = task.cores;
        if (task.memory_bytes) t["memoryBytes"] = *task.memory_bytes;
        if (task.energy_joules) t["energyJoules"] = *task.energy_joules;
        if (task.machine) t["machine"] = *task.machine;
        t["parents"] = task.parents;
        t["files"] = json::array();
        for (const auto& file : task.files) {
            json f;
            f["name"] = file.name;
            f["sizeBytes"] = file.size_bytes;
            f["link"] = file.link == FileLink::kInput ? "input" : "output";
            t["files"].push_back(std::move(f));
        }
        doc["tasks"].push_back(std::move(t));
    }
    return doc.dump(2) + "\n";
}

namespace {

/// Kahn residue over the parent relation, keyed by task index. Parents that
/// do not resolve to a task are skipped (they are reported separately).
/// Returns indices left unordered, i.e. tasks on or downstream of a cycle.
std::vector<std::size_t> kahn_unordered(
    const std::vector<TaskSpec>& tasks,
    const std::unordered_map<std::string, std::size_t>& index_of,
    std::vector<std::size_t>* order_out) {
    const std::size_t n = tasks.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> pending(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& parent : tasks[i].parents) {
            auto it = index_of.find(parent);
            if (it == index_of.end()) continue;
            children[it->second].push_back(i);
            ++pending[i];
        }
    }
    auto by_id = [&](std::size_t a, std::size_t b) {
        if (tasks[a].id != tasks[b].id) return tasks[a].id < tasks[b].id;
        return a < b;
    };
    std::set<std::size_t, decltype(by_id)> ready(by_id);
    for (std::size_t i = 0; i < n; ++i) {
        if (pending[i] == 0) ready.insert(i);
    }
    std::vector<bool> placed(n, false);
    while (!ready.empty()) {
        std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        placed[i] = true;
        if (order_out) order_out->push_back(i);
        for (std::size_t child : children[i]) {
            if (--pending[child] == 0) ready.insert(child);
        }
    }
    std::vector<std::size_t> unordered;
    for (std::size_t i = 0; i < n; ++i) {
        if (!placed[i]) unordered.push_back(i);
    }
    return unordered;
}

}  // namespace

std::vector<Violation> validate(const WorkflowTrace& trace) {
    std::vector<Violation> violations;
    auto report = [&](ViolationCode code, std::string path, std::string message) {
        violations.push_back({code, std::move(message), std::move(path)});
    };

    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
        const auto& task = trace.tasks[i];
        auto [it, inserted] = index_of.try_emplace(task.id, i);
        if (!inserted) {
            report(ViolationCode::kDuplicateId, "/tasks/" + std::to_string(i) + "/id",
                   "task id \"" + task.id + "\" already used by task " +
                       std::to_string(it->second));
        }
    }
    std::unordered_set<std::string> machine_names;
    for (const auto& machine : trace.machines) machine_names.insert(machine.node_name);

    if (trace.makespan_seconds && *trace.makespan_seconds < 0) {
        report(ViolationCode::kNegativeValue, "/makespanSeconds",
               "makespanSeconds must be >= 0");
    }
    for (std::size_t i = 0; i < trace.machines.size(); ++i) {
        const auto& machine = trace.machines[i];
        const std::string path = "/machines/" + std::to_string(i);
        if (machine.cores < 1) {
            report(ViolationCode::kNegativeValue, path + "/cores", "cores must be >= 1");
        }
        if (machine.cpu_speed_mhz && *machine.cpu_speed_mhz <= 0) {
            report(ViolationCode::kNegativeValue, path + "/cpuSpeedMHz",
                   "cpuSpeedMHz must be > 0");
        }
        if (machine.memory_bytes && *machine.memory_bytes <= 0) {
            report(ViolationCode::kNegativeValue, path + "/memoryBytes",
                   "memoryBytes must be > 0");
        }
    }

    // Producers of each output file name, for the consistency rule below.
    std::unordered_map<std::string, std::vector<std::size_t>> producers;
    for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
        for (const auto& file : trace.tasks[i].files) {
            if (file.link == FileLink::kOutput) producers[file.name].push_back(i);
        }
    }

    for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
        const auto& task = trace.tasks[i];
        const std::string path = "/tasks/" + std::to_string(i);
        if (task.runtime_seconds < 0) {
            report(ViolationCode::kNegativeValue, path + "/runtimeSeconds",
                   "runtimeSeconds must be >= 0");
        }
        if (task.cores < 1) {
            report(ViolationCode::kNegativeValue, path + "/cores", "cores must be >= 1");
        }
        if (task.memory_bytes && *task.memory_bytes < 0) {
            report(ViolationCode::kNegativeValue, path + "/memoryBytes",
                   "memoryBytes must be >= 0");
        }
        if (task.energy_joules && *task.energy_joules < 0) {
            report(ViolationCode::kNegativeValue, path + "/energyJoules",
                   "energyJoules must be >= 0");
        }
        if (task.machine && !machine_names.contains(*task.machine)) {
            report(ViolationCode::kUnknownMachine, path + "/machine",
                   "machine \"" + *task.machine + "\" is not listed in machines");
        }
        for (std::size_t j = 0; j < task.parents.size(); ++j) {
            if (!index_of.contains(task.parents[j])) {
                report(ViolationCode::kUnknownParent,
                       path + "/parents/" + std::to_string(j),
                       "parent \"" + task.parents[j] + "\" names no task");
            }
        }
        std::set<std::pair<std::string, FileLink>> seen_files;
        std::unordered_set<std::string> parent_set(task.parents.begin(), task.parents.end());
        for (std::size_t j = 0; j < task.files.size(); ++j) {
            const auto& file = task.files[j];
            const std::string file_path = path + "/files/" + std::to_string(j);
            if (file.name.empty()) {
                report(ViolationCode::kSyntax, file_path + "/name",
                       "file name must be non-empty");
            }
            if (file.size_bytes < 0) {
                report(ViolationCode::kNegativeValue, file_path + "/sizeBytes",
                       "sizeBytes must be >= 0");
            }
            if (!seen_files.insert({file.name, file.link}).second) {
                report(ViolationCode::kFileInconsistent, file_path,
                       "duplicate (name, link) pair \"" + file.name + "\"");
            }
            if (file.link == FileLink::kInput) {
                auto it = producers.find(file.name);
                if (it == producers.end()) continue;
                for (std::size_t producer : it->second) {
                    if (producer == i) continue;
                    if (!parent_set.contains(trace.tasks[producer].id)) {
                        report(ViolationCode::kFileInconsistent, file_path,
                               "input file \"" + file.name + "\" is produced by \"" +
                                   trace.tasks[producer].id +
                                   "\", which is not a parent of \"" + task.id + "\"");
                    }
                }
            }
        }
    }

    auto unordered = kahn_unordered(trace.tasks, index_of, nullptr);
    if (!unordered.empty()) {
        std::string members;
        for (std::size_t k = 0; k < unordered.size() && k < 8; ++k) {
            if (k) members += ", ";
            members += trace.tasks[unordered[k]].id;
        }
        if (unordered.size() > 8) members += ", ...";
        report(ViolationCode::kCycle, "/tasks",
               "parent relation has a cycle involving: " + members);
    }
    return violations;
}

std::vector<std::string> topological_order(const WorkflowTrace& trace) {
    std::unordered_map<std::string, std::size_t> index_of;
    for (std::size_t i = 0; i < trace.tasks.size(); ++i) {
        index_of.try_emplace(trace.tasks[i].id, i);
    }
    std::vector<std::size_t> order;
    order.reserve(trace.tasks.size());
    auto unordered = kahn_unordered(trace.tasks, index_of, &order);
    if (!unordered.empty()) {
        throw CycleError("CYCLE: parent relation has a cycle involving \"" +
                         trace.tasks[unordered.front()].id + "\"");
    }
    std::vector<std::string> ids;
    ids.reserve(order.size());
    for (std::size_t i : order) ids.push_back(trace.tasks[i].id);
    return ids;
}

}  // namespace wfkit
