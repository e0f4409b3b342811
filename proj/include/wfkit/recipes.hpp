#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wfkit/fitting.hpp"
#include "wfkit/trace.hpp"

namespace wfkit {

/// The structural vocabulary recipes are written in. A level transforms the
/// current frontier (the previous level's terminal tasks):
///   FAN          — `arity` parallel tasks, each a child of the whole frontier
///                  (sources when the frontier is empty)
///   PIPELINE     — a chain of `arity` tasks appended to every frontier task
///                  (types cycle through taskTypes along the chain)
///   MERGE_ALL    — one task consuming the entire frontier
///   MERGE_GROUPS — one merge task per contiguous frontier group of `arity`
///   CROSS        — one task per frontier slot, consuming its `arity` cyclic
///                  neighbors (the extreme fan-in/out overlay)
enum class PatternKind { kFan, kPipeline, kMergeAll, kMergeGroups, kCross };

struct LevelPattern {
    PatternKind kind;
    std::vector<std::string> task_types;
    int arity = 1;  // FAN width / PIPELINE depth / group size / CROSS degree
};

struct ScaleParamSpec {
    std::string name;
    int min;
};

/// A named application template: scale parameters (grown in listed order by
/// resolve_scale) and the concrete level list they induce.
struct RecipeTemplate {
    std::string name;
    std::vector<ScaleParamSpec> scale_params;
    std::vector<LevelPattern> (*levels)(const std::vector<int>& scale);

    int min_tasks() const;
};

const RecipeTemplate& recipe_template(std::string_view name);
std::vector<std::string> recipe_names();

struct SkeletonTask {
    std::string id;
    std::string task_type;
    int level;
    std::vector<std::size_t> parents;  // indices into Skeleton::tasks
};

struct Skeleton {
    std::vector<SkeletonTask> tasks;
};

class GenerationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// maxTasks below the recipe's structural minimum.
class ScaleError : public GenerationError {
    using GenerationError::GenerationError;
};

/// A referenced task type lacks a (complete) summary entry.
class MissingSummaryError : public GenerationError {
    using GenerationError::GenerationError;
};

/// Task count induced by a concrete scale assignment.
int count_tasks(const RecipeTemplate& recipe, const std::vector<int>& scale);

/// Largest scale assignment whose task count fits maxTasks, grown one step
/// at a time round-robin over the recipe's parameter order.
std::vector<int> resolve_scale(const RecipeTemplate& recipe, int max_tasks);

Skeleton build_skeleton(const RecipeTemplate& recipe,
                        const std::vector<int>& scale, std::uint64_t seed);

/// Samples metrics for every skeleton task from its type's summaries. Each
/// task draws from an independent stream seeded by (seed, task id), so the
/// result does not depend on traversal order.
WorkflowTrace instantiate(const Skeleton& skeleton, const SummaryMap& summaries,
                          std::uint64_t seed);

struct GenerationConfig {
    std::string recipe;
    int max_tasks = 1;
    std::uint64_t seed = 0;
};

WorkflowTrace generate(const GenerationConfig& config, const SummaryMap& summaries);

}  // namespace wfkit
