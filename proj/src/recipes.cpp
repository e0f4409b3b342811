#include "wfkit/recipes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

namespace wfkit {
namespace {

// --- the six application templates ------------------------------------------
//
// Structural anchors: Seismology is a plain fan + merge; 1000Genome runs
// 6-task per-chromosome pipelines into per-group combiners and a global
// overlap stage; Montage layers a cyclic-neighbor CROSS (mDiffFit) between
// its projection fan and its heavy merges. The Epigenomics, Cycles, and SoyKB
// shapes are multi-lane pipelines with hierarchical merges sized to their
// real task-count regimes.

std::vector<LevelPattern> seismology_levels(const std::vector<int>& s) {
    int w = s[0];
    return {
        {PatternKind::kFan, {"sG1IterDecon"}, w},
        {PatternKind::kMergeAll, {"wrapper_siftSTFByMisfit"}, 1},
    };
}

std::vector<LevelPattern> genome1000_levels(const std::vector<int>& s) {
    int k = s[0], b = s[1];  // chains per branch, branches
    return {
        {PatternKind::kFan, {"individuals"}, b * k},
        {PatternKind::kPipeline, {"individuals"}, 5},
        {PatternKind::kMergeGroups, {"individuals_merge"}, k},
        {PatternKind::kPipeline, {"sifting"}, 1},
        {PatternKind::kMergeAll, {"mutation_overlap"}, 1},
        {PatternKind::kPipeline, {"frequency"}, 1},
    };
}

std::vector<LevelPattern> epigenomics_levels(const std::vector<int>& s) {
    int w = s[0], lanes = s[1];  // splits per lane, lanes
    return {
        {PatternKind::kFan, {"filterContams"}, lanes * w},
        {PatternKind::kPipeline, {"sol2sanger", "fastq2bfq", "map"}, 3},
        {PatternKind::kMergeGroups, {"mapMerge"}, w},
        {PatternKind::kMergeAll, {"maqIndex"}, 1},
        {PatternKind::kPipeline, {"pileup"}, 1},
    };
}

std::vector<LevelPattern> montage_levels(const std::vector<int>& s) {
    int w = s[0];
    return {
        {PatternKind::kFan, {"mProject"}, w},
        {PatternKind::kCross, {"mDiffFit"}, 2},
        {PatternKind::kMergeAll, {"mConcatFit"}, 1},
        {PatternKind::kPipeline, {"mBgModel"}, 1},
        {PatternKind::kFan, {"mBackground"}, w},
        {PatternKind::kMergeAll, {"mImgtbl"}, 1},
        {PatternKind::kPipeline, {"mAdd"}, 1},
        {PatternKind::kPipeline, {"mShrink"}, 1},
        {PatternKind::kPipeline, {"mJPEG"}, 1},
    };
}

std::vector<LevelPattern> cycles_levels(const std::vector<int>& s) {
    int c = s[0], p = s[1];  // crop cells per parameter set, parameter sets
    return {
        {PatternKind::kFan, {"baseline_cycles"}, p * c},
        {PatternKind::kPipeline, {"cycles"}, 1},
        {PatternKind::kMergeGroups, {"cycles_fertilizer_increase_output_parser"}, c},
        {PatternKind::kMergeAll, {"cycles_output_summary"}, 1},
        {PatternKind::kPipeline, {"cycles_plots"}, 1},
    };
}

std::vector<LevelPattern> soykb_levels(const std::vector<int>& s) {
    int samples = s[0];
    return {
        {PatternKind::kFan, {"alignment_to_reference"}, samples},
        {PatternKind::kPipeline,
         {"sort_sam", "dedup", "add_replace", "realign_target_creator",
          "indel_realign"},
         5},
        {PatternKind::kMergeAll, {"combine_variants"}, 1},
        {PatternKind::kPipeline, {"genotype_gvcfs", "select_variants_snp"}, 2},
    };
}

const std::vector<RecipeTemplate>& registry() {
    static const std::vector<RecipeTemplate> recipes = {
        {"seismology", {{"width", 1}}, seismology_levels},
        {"genome1000", {{"chains", 1}, {"branches", 1}}, genome1000_levels},
        {"epigenomics", {{"splits", 1}, {"lanes", 1}}, epigenomics_levels},
        {"montage", {{"width", 2}}, montage_levels},
        {"cycles", {{"cells", 1}, {"paramSets", 1}}, cycles_levels},
        {"soykb", {{"samples", 1}}, soykb_levels},
    };
    return recipes;
}

std::vector<int> min_scale(const RecipeTemplate& recipe) {
    std::vector<int> scale;
    for (const auto& p : recipe.scale_params) scale.push_back(p.min);
    return scale;
}

std::string padded_id(const std::string& type, int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "_%06d", index);
    return type + buf;
}

}  // namespace

int RecipeTemplate::min_tasks() const {
    return count_tasks(*this, min_scale(*this));
}

const RecipeTemplate& recipe_template(std::string_view name) {
    for (const auto& recipe : registry()) {
        if (recipe.name == name) return recipe;
    }
    throw GenerationError("unknown recipe \"" + std::string(name) + "\"");
}

std::vector<std::string> recipe_names() {
    std::vector<std::string> names;
    for (const auto& recipe : registry()) names.push_back(recipe.name);
    return names;
}

int count_tasks(const RecipeTemplate& recipe, const std::vector<int>& scale) {
    int total = 0;
    int frontier = 0;
    for (const auto& level : recipe.levels(scale)) {
        switch (level.kind) {
            case PatternKind::kFan:
                total += level.arity;
                frontier = level.arity;
                break;
            case PatternKind::kPipeline:
                total += level.arity * frontier;
                break;
            case PatternKind::kMergeAll:
                total += 1;
                frontier = 1;
                break;
            case PatternKind::kMergeGroups: {
                int groups = (frontier + level.arity - 1) / level.arity;
                total += groups;
                frontier = groups;
                break;
            }
            case PatternKind::kCross:
                total += frontier;
                break;
        }
    }
    return total;
}

std::vector<int> resolve_scale(const RecipeTemplate& recipe, int max_tasks) {
    std::vector<int> scale = min_scale(recipe);
    int minimum = count_tasks(recipe, scale);
    if (max_tasks < minimum) {
        throw ScaleError("recipe \"" + recipe.name + "\" needs at least " +
                         std::to_string(minimum) + " tasks (requested " +
                         std::to_string(max_tasks) + ")");
    }
    bool grew = true;
    while (grew) {
        grew = false;
        for (std::size_t i = 0; i < scale.size(); ++i) {
            ++scale[i];
            if (count_tasks(recipe, scale) <= max_tasks) {
                grew = true;
            } else {
                --scale[i];
            }
        }
    }
    return scale;
}

Skeleton build_skeleton(const RecipeTemplate& recipe,
                        const std::vector<int>& scale, std::uint64_t /*seed*/) {
    Skeleton skeleton;
    std::map<std::string, int> type_counter;
    std::vector<std::size_t> frontier;

    auto add_task = [&](const std::string& type, int level,
                        std::vector<std::size_t> parents) {
        std::size_t index = skeleton.tasks.size();
        skeleton.tasks.push_back(
            {padded_id(type, type_counter[type]++), type, level, std::move(parents)});
        return index;
    };

    const auto levels = recipe.levels(scale);
    for (int li = 0; li < static_cast<int>(levels.size()); ++li) {
        const LevelPattern& level = levels[li];
        std::vector<std::size_t> next;
        switch (level.kind) {
            case PatternKind::kFan:
                for (int i = 0; i < level.arity; ++i) {
                    next.push_back(add_task(level.task_types.front(), li, frontier));
                }
                break;
            case PatternKind::kPipeline:
                for (std::size_t head : frontier) {
                    std::size_t tail = head;
                    for (int d = 0; d < level.arity; ++d) {
                        const auto& type =
                            level.task_types[d % level.task_types.size()];
                        tail = add_task(type, li, {tail});
                    }
                    next.push_back(tail);
                }
                break;
            case PatternKind::kMergeAll:
                next.push_back(add_task(level.task_types.front(), li, frontier));
                break;
            case PatternKind::kMergeGroups:
                for (std::size_t g = 0; g < frontier.size();
                     g += static_cast<std::size_t>(level.arity)) {
                    std::size_t end = std::min(
                        frontier.size(), g + static_cast<std::size_t>(level.arity));
                    next.push_back(add_task(
                        level.task_types.front(), li,
                        {frontier.begin() + g, frontier.begin() + end}));
                }
                break;
            case PatternKind::kCross:
                for (std::size_t j = 0; j < frontier.size(); ++j) {
                    std::vector<std::size_t> parents;
                    for (int m = 0; m < level.arity; ++m) {
                        std::size_t parent = frontier[(j + m) % frontier.size()];
                        if (std::find(parents.begin(), parents.end(), parent) ==
                            parents.end()) {
                            parents.push_back(parent);
                        }
                    }
                    next.push_back(add_task(level.task_types.front(), li,
                                            std::move(parents)));
                }
                break;
        }
        frontier = std::move(next);
    }
    return skeleton;
}

namespace {

const MetricSummary& metric_or_throw(
    const TaskTypeSummary* summary, const std::string& type,
    std::optional<MetricSummary> TaskTypeSummary::*member, const char* which) {
    if (summary == nullptr || !(summary->*member)) {
        throw MissingSummaryError("no " + std::string(which) +
                                  " summary for task type \"" + type + "\"");
    }
    return *(summary->*member);
}

/// Sizes are sampled as reals but stored as byte counts; round into the
/// integer part of [min, max] so the bounds still hold afterwards.
std::int64_t to_bytes(double sampled, const MetricSummary& summary) {
    auto lo = static_cast<std::int64_t>(std::ceil(summary.min));
    auto hi = static_cast<std::int64_t>(std::floor(summary.max));
    if (lo > hi) return static_cast<std::int64_t>(std::llround(summary.min));
    return std::clamp(static_cast<std::int64_t>(std::llround(sampled)), lo, hi);
}

}  // namespace

WorkflowTrace instantiate(const Skeleton& skeleton, const SummaryMap& summaries,
                          std::uint64_t seed) {
    WorkflowTrace trace;
    trace.schema_version = "1.0";

    std::vector<std::int64_t> output_bytes(skeleton.tasks.size(), 0);
    for (std::size_t i = 0; i < skeleton.tasks.size(); ++i) {
        const SkeletonTask& node = skeleton.tasks[i];
        auto entry = summaries.find(node.task_type);
        const TaskTypeSummary* summary =
            entry == summaries.end() ? nullptr : &entry->second;

        TaskSpec task;
        task.id = node.id;
        task.name = node.id;
        task.category = node.task_type;
        task.cores = 1;

        Rng rng(derive_seed(seed, node.id));
        task.runtime_seconds = sample_clamped(
            metric_or_throw(summary, node.task_type, &TaskTypeSummary::runtime,
                            "runtime"),
            rng);
        const MetricSummary& out_summary = metric_or_throw(
            summary, node.task_type, &TaskTypeSummary::output_size, "outputSize");
        output_bytes[i] = to_bytes(sample_clamped(out_summary, rng), out_summary);

        for (std::size_t parent : node.parents) {
            task.parents.push_back(skeleton.tasks[parent].id);
            task.files.push_back({skeleton.tasks[parent].id + "_out.dat",
                                  output_bytes[parent], FileLink::kInput});
        }
        if (node.parents.empty()) {
            const MetricSummary& in_summary = metric_or_throw(
                summary, node.task_type, &TaskTypeSummary::input_size, "inputSize");
            task.files.push_back({node.id + "_in.dat",
                                  to_bytes(sample_clamped(in_summary, rng), in_summary),
                                  FileLink::kInput});
        }
        task.files.push_back({node.id + "_out.dat", output_bytes[i], FileLink::kOutput});
        trace.tasks.push_back(std::move(task));
    }
    return trace;
}

WorkflowTrace generate(const GenerationConfig& config, const SummaryMap& summaries) {
    const RecipeTemplate& recipe = recipe_template(config.recipe);
    auto scale = resolve_scale(recipe, config.max_tasks);
    Skeleton skeleton = build_skeleton(recipe, scale, config.seed);
    WorkflowTrace trace = instantiate(skeleton, summaries, config.seed);
    trace.name = recipe.name;
    trace.description = "synthetic " + recipe.name + " trace (maxTasks=" +
                        std::to_string(config.max_tasks) +
                        ", seed=" + std::to_string(config.seed) + ")";
    return trace;
}

}  // namespace wfkit
