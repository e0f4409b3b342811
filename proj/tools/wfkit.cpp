// wfkit: validate, analyze, generate, simulate, and compare workflow traces.
//
// Exit codes: 0 success, 1 validation failures, 2 usage error, 3 I/O error,
// 4 generation or simulation error. All diagnostics go to stderr; violation
// listings and reports go to stdout; bulk data goes to files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wfkit/fitting.hpp"
#include "wfkit/metrics.hpp"
#include "wfkit/recipes.hpp"
#include "wfkit/rng.hpp"
#include "wfkit/simulator.hpp"
#include "wfkit/trace.hpp"

namespace fs = std::filesystem;
using namespace wfkit;

namespace {

constexpr int kOk = 0;
constexpr int kInvalidTrace = 1;
constexpr int kUsage = 2;
constexpr int kIoError = 3;
constexpr int kPipelineError = 4;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("error while reading " + path.string());
    return std::move(buffer).str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw IoError("error while writing " + path.string());
}

/// Loads and validates one trace; prints violations and returns nullopt if
/// it is not clean. `label` prefixes diagnostics when several files are in
/// flight; the bare validate listing stays unprefixed.
std::optional<WorkflowTrace> load_valid_trace(const fs::path& path, std::ostream& out,
                                              const std::string& label = {}) {
    auto text = read_file(path);
    WorkflowTrace trace;
    try {
        trace = parse_trace(text);
    } catch (const TraceParseError& err) {
        out << label << err.violation().to_line() << "\n";
        return std::nullopt;
    }
    auto violations = validate(trace);
    for (const auto& v : violations) out << label << v.to_line() << "\n";
    if (!violations.empty()) return std::nullopt;
    return trace;
}

/// The summaries shipped with the tool, resolved relative to the executable
/// so the build and install trees both work without configuration.
fs::path default_summaries(const std::string& recipe) {
    std::vector<fs::path> roots;
    std::error_code ec;
    fs::path exe = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
        fs::path dir = exe.parent_path();
        roots.push_back(dir);
        roots.push_back(dir / "..");
        roots.push_back(dir / ".." / "..");
    }
    roots.push_back(fs::current_path());
    for (const auto& root : roots) {
        fs::path candidate = root / "recipes" / (recipe + ".json");
        if (fs::exists(candidate, ec)) return candidate;
    }
    throw IoError("no bundled summaries for recipe \"" + recipe +
                  "\"; pass --summaries <file>");
}

SummaryMap load_summaries(const std::string& explicit_path, const std::string& recipe) {
    fs::path path =
        explicit_path.empty() ? default_summaries(recipe) : fs::path(explicit_path);
    try {
        return summaries_from_json(read_file(path));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& err) {
        throw IoError("unusable summaries in " + path.string() + ": " + err.what());
    }
}

std::uint64_t fresh_seed() {
    std::random_device device;
    return (static_cast<std::uint64_t>(device()) << 32) ^ device();
}

struct PlatformFlags {
    int nodes = 1;
    int cores = 48;
    double bandwidth = 1.25e9;
    double speed = 1.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--nodes", nodes, "Compute nodes in the cluster")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--cores", cores, "Cores per node")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--bandwidth", bandwidth,
                        "Shared filesystem bandwidth, bytes per second")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        cmd->add_option("--speed", speed, "Relative compute speed factor")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    }

    PlatformSpec to_spec() const {
        PlatformSpec spec;
        spec.node_count = nodes;
        spec.cores_per_node = cores;
        spec.fs_bandwidth_bytes_per_sec = bandwidth;
        spec.speed_factor = speed;
        return spec;
    }
};

int cmd_validate(const std::string& trace_path) {
    return load_valid_trace(trace_path, std::cout) ? kOk : kInvalidTrace;
}

int cmd_analyze(const std::vector<std::string>& trace_paths, const std::string& out_path) {
    std::vector<WorkflowTrace> traces;
    bool clean = true;
    for (const auto& path : trace_paths) {
        auto trace = load_valid_trace(path, std::cerr, path + ": ");
        if (trace) {
            traces.push_back(std::move(*trace));
        } else {
            clean = false;
        }
    }
    if (!clean) return kInvalidTrace;
    auto result = summarize_traces(traces);
    for (const auto& warning : result.warnings) {
        std::cerr << "warning: " << warning << "\n";
    }
    write_file(out_path, summaries_to_json(result.summaries));
    return kOk;
}

int cmd_generate(const std::string& recipe, int max_tasks,
                 std::optional<std::uint64_t> seed, const std::string& summaries_path,
                 const std::string& out_path) {
    std::uint64_t effective_seed = seed ? *seed : fresh_seed();
    if (!seed) std::cerr << "seed: " << effective_seed << "\n";
    auto summaries = load_summaries(summaries_path, recipe);
    auto trace = generate({recipe, max_tasks, effective_seed}, summaries);
    write_file(out_path, serialize_trace(trace));
    return kOk;
}

int cmd_simulate(const std::string& trace_path, const PlatformFlags& platform,
                 const std::string& out_path, const std::string& csv_path) {
    auto trace = load_valid_trace(trace_path, std::cout);
    if (!trace) return kInvalidTrace;
    auto result = simulate(*trace, platform.to_spec());
    write_file(out_path, result_to_json(result));
    if (!csv_path.empty()) write_file(csv_path, result_to_csv(result));
    return kOk;
}

SimulationResult load_result(const fs::path& path) {
    try {
        return result_from_json(read_file(path));
    } catch (const IoError&) {
        throw;
    } catch (const std::exception& err) {
        throw IoError("unusable simulation result in " + path.string() + ": " +
                      err.what());
    }
}

int cmd_compare_files(const std::string& path_a, const std::string& path_b) {
    auto a = load_result(path_a);
    auto b = load_result(path_b);
    if (a.timelines.empty() || b.timelines.empty()) {
        throw IoError("cannot compare empty simulation results");
    }
    std::cout << report_to_json(compare(a, b));
    return kOk;
}

int cmd_compare_runs(int runs, const std::string& recipe, int max_tasks_a,
                     int max_tasks_b, std::optional<std::uint64_t> seed,
                     const std::string& summaries_path, const PlatformFlags& platform) {
    std::uint64_t base_seed = seed ? *seed : fresh_seed();
    if (!seed) std::cerr << "seed: " << base_seed << "\n";
    auto summaries = load_summaries(summaries_path, recipe);
    auto spec = platform.to_spec();

    ComparisonReport total;
    for (int run = 0; run < runs; ++run) {
        std::string label = "run" + std::to_string(run);
        auto a = simulate(generate({recipe, max_tasks_a,
                                    derive_seed(base_seed, label + "/a")},
                                   summaries),
                          spec);
        auto b = simulate(generate({recipe, max_tasks_b,
                                    derive_seed(base_seed, label + "/b")},
                                   summaries),
                          spec);
        auto report = compare(a, b);
        total.submit_rmse += report.submit_rmse;
        total.completion_rmse += report.completion_rmse;
        total.normalized_submit_rmse += report.normalized_submit_rmse;
        total.normalized_completion_rmse += report.normalized_completion_rmse;
        if (run == 0) total.task_counts = report.task_counts;
    }
    total.submit_rmse /= runs;
    total.completion_rmse /= runs;
    total.normalized_submit_rmse /= runs;
    total.normalized_completion_rmse /= runs;
    std::cout << report_to_json(total);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Workflow trace modeling toolkit"};
    app.require_subcommand(1);

    // validate
    std::string validate_trace;
    auto* validate_cmd =
        app.add_subcommand("validate", "Check a trace file and list violations");
    validate_cmd->add_option("trace", validate_trace, "Trace JSON file")->required();

    // analyze
    std::vector<std::string> analyze_traces;
    std::string analyze_out;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Fit per-task-type models across traces");
    analyze_cmd->add_option("traces", analyze_traces, "Trace JSON files")->required();
    analyze_cmd->add_option("--out", analyze_out, "Summaries output file")->required();

    // generate
    std::string gen_recipe;
    int gen_max_tasks = 0;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_summaries;
    std::string gen_out;
    auto* generate_cmd =
        app.add_subcommand("generate", "Synthesize a workflow trace from a recipe");
    generate_cmd->add_option("--recipe", gen_recipe, "Application recipe name")
        ->required()
        ->check(CLI::IsMember(recipe_names()));
    generate_cmd->add_option("--max-tasks", gen_max_tasks, "Upper bound on task count")
        ->required()
        ->check(CLI::PositiveNumber);
    generate_cmd->add_option("--seed", gen_seed, "Generation seed (default: random)");
    generate_cmd->add_option("--summaries", gen_summaries,
                             "Summaries file (default: bundled recipes/<name>.json)");
    generate_cmd->add_option("--out", gen_out, "Trace output file")->required();

    // simulate
    std::string sim_trace;
    std::string sim_out;
    std::string sim_csv;
    PlatformFlags sim_platform;
    auto* simulate_cmd =
        app.add_subcommand("simulate", "Replay a trace on a modeled cluster");
    simulate_cmd->add_option("trace", sim_trace, "Trace JSON file")->required();
    sim_platform.attach(simulate_cmd);
    simulate_cmd->add_option("--out", sim_out, "Result JSON output file")->required();
    simulate_cmd->add_option("--csv", sim_csv, "Optional per-task CSV output file");

    // compare
    std::vector<std::string> compare_results;
    int compare_runs = 0;
    std::string cmp_recipe;
    std::vector<int> cmp_max_tasks;
    std::optional<std::uint64_t> cmp_seed;
    std::string cmp_summaries;
    PlatformFlags cmp_platform;
    auto* compare_cmd = app.add_subcommand(
        "compare", "Score timeline agreement between two simulation results");
    compare_cmd->add_option("results", compare_results,
                            "Two simulation result JSON files");
    auto* runs_opt = compare_cmd->add_option(
        "--runs", compare_runs,
        "Generate and simulate this many seeded pipelines per side and average");
    runs_opt->check(CLI::PositiveNumber);
    compare_cmd->add_option("--recipe", cmp_recipe, "Recipe for --runs mode")
        ->needs(runs_opt)
        ->check(CLI::IsMember(recipe_names()));
    compare_cmd
        ->add_option("--max-tasks", cmp_max_tasks,
                     "Task bounds for the two --runs sides")
        ->needs(runs_opt)
        ->expected(2);
    compare_cmd->add_option("--seed", cmp_seed, "Base seed for --runs mode")
        ->needs(runs_opt);
    compare_cmd->add_option("--summaries", cmp_summaries, "Summaries file for --runs mode")
        ->needs(runs_opt);
    cmp_platform.attach(compare_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        // Fold CLI11's many parse-failure codes into the one usage code;
        // --help stays a success.
        int code = app.exit(err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(validate_trace);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze_traces, analyze_out);
        if (generate_cmd->parsed()) {
            return cmd_generate(gen_recipe, gen_max_tasks, gen_seed, gen_summaries,
                                gen_out);
        }
        if (simulate_cmd->parsed()) {
            return cmd_simulate(sim_trace, sim_platform, sim_out, sim_csv);
        }
        if (compare_cmd->parsed()) {
            if (compare_runs > 0) {
                if (!compare_results.empty()) {
                    std::cerr << "compare: positional results and --runs are mutually "
                                 "exclusive\n";
                    return kUsage;
                }
                if (cmp_recipe.empty() || cmp_max_tasks.size() != 2) {
                    std::cerr << "compare: --runs needs --recipe and --max-tasks A B\n";
                    return kUsage;
                }
                return cmd_compare_runs(compare_runs, cmp_recipe, cmp_max_tasks[0],
                                        cmp_max_tasks[1], cmp_seed, cmp_summaries,
                                        cmp_platform);
            }
            if (compare_results.size() != 2) {
                std::cerr << "compare: expected exactly two result files\n";
                return kUsage;
            }
            return cmd_compare_files(compare_results[0], compare_results[1]);
        }
    } catch (const IoError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kIoError;
    } catch (const GenerationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kPipelineError;
    } catch (const SimulationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kPipelineError;
    } catch (const CycleError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kInvalidTrace;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kPipelineError;
    }
    return kUsage;
}
