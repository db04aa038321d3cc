// txaccel command-line entry point: generate, evolve, evaluate.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "txaccel/benchmark.hpp"
#include "txaccel/error.hpp"
#include "txaccel/evolution.hpp"
#include "txaccel/gp.hpp"
#include "txaccel/transport.hpp"
#include "txaccel/version.hpp"

namespace fs = std::filesystem;
using namespace txaccel;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("TXACCEL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InvalidConfig(fmt::format("TXACCEL_SEED is not an unsigned integer: '{}'", env));
        }
    }
    return kDefaultSeed;
}

/// key=value record of one invocation; one per output directory.
class Manifest {
public:
    Manifest(std::string command, int argc, char** argv) : command_(std::move(command)) {
        for (int i = 0; i < argc; ++i) args_.emplace_back(argv[i]);
        start_ = std::chrono::steady_clock::now();
    }

    template <typename T>
    void set(const std::string& key, const T& value) {
        entries_.emplace_back(key, fmt::format("{}", value));
    }

    void write(const fs::path& dir) const {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(dir / "manifest.txt", std::ios::binary);
        if (!out) throw DataError("cannot write manifest in '" + dir.string() + "'");
        out << "command=" << command_ << '\n';
        out << "artifact_version=" << kVersion << '\n';
        out << "command_line=" << fmt::format("{}", fmt::join(args_, " ")) << '\n';
        for (const auto& [k, v] : entries_) out << k << '=' << v << '\n';
        out << fmt::format("wall_clock_seconds={:.3f}\n", secs);
    }

private:
    std::string command_;
    std::vector<std::string> args_;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::chrono::steady_clock::time_point start_;
};

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory '" + dir.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    fs::path out = "dataset.csv";
    std::optional<std::uint64_t> seed;
    DatasetConfig config;
    std::size_t expect_count = 240;
};

int run_generate(const GenerateArgs& a, Manifest& manifest) {
    const std::uint64_t seed = resolve_seed(a.seed);
    DatasetConfig config = a.config;
    config.required_count = a.expect_count == 0 ? std::nullopt : std::optional<std::size_t>(a.expect_count);

    const auto sequences = generate_dataset(config, seed);
    const fs::path dir = a.out.has_parent_path() ? a.out.parent_path() : fs::path(".");
    ensure_dir(dir);
    write_dataset_csv(a.out, sequences);
    fs::path meta = a.out;
    meta += ".meta";
    write_dataset_metadata(meta, config, seed, sequences.size());

    manifest.set("seed", seed);
    manifest.set("output", a.out.string());
    manifest.set("metadata", meta.string());
    manifest.set("c_min", config.c_min);
    manifest.set("c_max", config.c_max);
    manifest.set("c_count", config.c_count);
    manifest.set("c_jitter", config.jitter_c);
    manifest.set("widths_mfp", fmt::format("{}", fmt::join(config.widths_mfp, ",")));
    manifest.set("n_min", config.n_min);
    manifest.set("n_max", config.n_max);
    manifest.set("n_step", config.n_step);
    manifest.set("expect_count", a.expect_count);
    manifest.set("sequences", sequences.size());
    manifest.write(dir);
    std::cout << fmt::format("wrote {} sequences x {} orders to {}\n", sequences.size(), config.orders().size(),
                             a.out.string());
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvolveArgs {
    fs::path data;
    fs::path out = "evolve_out";
    std::optional<std::uint64_t> seed;
    EvolutionConfig config;
    bool no_constants = false;
};

int run_evolve(const EvolveArgs& a, Manifest& manifest) {
    EvolutionConfig config = a.config;
    config.rng_seed = resolve_seed(a.seed);
    config.use_constants = !a.no_constants;
    config.validate();

    const auto sequences = read_dataset_csv(a.data);
    auto [train, validation] = split_dataset(sequences, config.train_fraction, config.rng_seed);
    // Surface short sequences before any evolution work.
    FitnessCases(train, config.evaluation_orders);
    FitnessCases(validation, config.evaluation_orders);

    ensure_dir(a.out);
    const EvolutionReport report = evolve(config, train, validation, [](const EvolutionState& s) {
        const auto& h = s.history.back();
        std::cerr << fmt::format("generation {:>3}  best {:.4f}  mean {:.4f}\n", h.generation, h.best_fitness,
                                 h.mean_fitness);
    });

    {
        std::ofstream out(a.out / "best_formula.txt", std::ios::binary);
        out << gp::serialize(report.best) << '\n';
        if (!out) throw DataError("cannot write best_formula.txt");
    }
    write_history_csv(a.out / "history.csv", report.history);
    {
        std::ofstream out(a.out / "summary.txt", std::ios::binary);
        out << fmt::format("train_sequences={}\n", train.size());
        out << fmt::format("validation_sequences={}\n", validation.size());
        out << fmt::format("train_comparisons={}\n", train.size() * config.evaluation_orders.size());
        out << fmt::format("generations_run={}\n", report.history.back().generation);
        out << fmt::format("reached_target={}\n", report.reached_target);
        out << fmt::format("train_fitness={:.17g}\n", report.train_fitness);
        out << fmt::format("validation_fitness={:.17g}\n", report.validation_fitness);
        out << fmt::format("total_evaluations={}\n", report.total_evaluations);
        if (!out) throw DataError("cannot write summary.txt");
    }

    manifest.set("data", a.data.string());
    manifest.set("out", a.out.string());
    manifest.set("seed", config.rng_seed);
    manifest.set("pop", config.population_size);
    manifest.set("gens", config.max_generations);
    manifest.set("cx", config.crossover_rate);
    manifest.set("mut", config.mutation_rate);
    manifest.set("elite", config.elite_count);
    manifest.set("tourn", config.tournament_size);
    manifest.set("depth", config.max_depth);
    manifest.set("target", config.target_fitness);
    manifest.set("split", config.train_fraction);
    manifest.set("positions", fmt::format("{}", fmt::join(config.evaluation_orders, ",")));
    manifest.set("restarts", config.param_opt.restarts);
    manifest.set("max_fevals", config.param_opt.max_function_evals);
    manifest.set("constants", config.use_constants);
    manifest.set("threads", config.threads);
    manifest.write(a.out);

    std::cout << fmt::format("best: {}\ntrain fitness {:.4f}, validation fitness {:.4f}\n", gp::serialize(report.best),
                             report.train_fitness, report.validation_fitness);
    return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    fs::path data;
    std::optional<fs::path> formula;
    std::vector<std::string> methods{"aitken", "wynn", "evolved"};
    std::vector<int> positions = default_evaluation_orders();
    int bins = 10;
    fs::path out = "evaluate_out";
    std::size_t threads = 0;
};

int run_evaluate(const EvaluateArgs& a, Manifest& manifest) {
    std::vector<Accelerator> methods;
    std::string evolved_source = "builtin";
    for (const auto& name : a.methods) {
        if (name == "raw") {
            methods.push_back(identity_accelerator());
        } else if (name == "aitken") {
            methods.push_back(aitken_accelerator());
        } else if (name == "wynn") {
            methods.push_back(wynn_accelerator(2));
        } else if (name == "evolved") {
            if (a.formula) {
                methods.push_back(gp::formula_accelerator(gp::parse(read_text(*a.formula)), "evolved"));
                evolved_source = a.formula->string();
            } else {
                methods.push_back(evolved_accelerator());
            }
        } else {
            throw InvalidConfig("unknown method '" + name + "' (expected raw, aitken, wynn, evolved)");
        }
    }

    const auto sequences = read_dataset_csv(a.data);
    BenchmarkOptions options;
    options.bins = a.bins;
    options.threads = a.threads;
    options.dataset_id = a.data.filename().string();
    BenchmarkReport report = run_benchmark(sequences, methods, a.positions, options);
    report.metadata["evolved_source"] = evolved_source;

    ensure_dir(a.out);
    write_methods_csv(a.out / "methods.csv", report);
    write_grid_csv(a.out / "grid.csv", report);
    const std::string comparison = compare_to_published(report);
    {
        std::ofstream out(a.out / "comparison.txt", std::ios::binary);
        out << comparison;
        for (const auto& [k, v] : report.metadata) out << k << '=' << v << '\n';
        if (!out) throw DataError("cannot write comparison.txt");
    }

    manifest.set("data", a.data.string());
    manifest.set("formula", evolved_source);
    manifest.set("methods", fmt::format("{}", fmt::join(a.methods, ",")));
    manifest.set("positions", fmt::format("{}", fmt::join(a.positions, ",")));
    manifest.set("bins", a.bins);
    manifest.set("out", a.out.string());
    manifest.set("threads", a.threads);
    manifest.write(a.out);
    std::cout << comparison;
    return kOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SyntaxError& e) {
        std::cerr << "formula syntax error: " << e.what() << '\n';
        return kData;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const OutOfRange& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n  " << e.diagnostics() << '\n';
        return kNumerical;
    } catch (const UnsupportedProblem& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slab S_N convergence sequences, GP-evolved accelerators, and benchmarks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate the S_N center-flux dataset (CSV + .meta sidecar)");
    generate->add_option("--out", gen.out, "Dataset CSV path")->capture_default_str();
    generate->add_option("--seed", gen.seed, "Seed (only used with --jitter-c); falls back to TXACCEL_SEED, then 1");
    generate->add_option("--c-min", gen.config.c_min, "Smallest scattering ratio")->capture_default_str();
    generate->add_option("--c-max", gen.config.c_max, "Largest scattering ratio")->capture_default_str();
    generate->add_option("--c-count", gen.config.c_count, "Number of log-spaced c values")->capture_default_str();
    generate->add_option("--widths", gen.config.widths_mfp, "Slab widths in mean free paths")
        ->delimiter(',')
        ->capture_default_str();
    generate->add_option("--n-min", gen.config.n_min, "Smallest quadrature order")->capture_default_str();
    generate->add_option("--n-max", gen.config.n_max, "Largest quadrature order")->capture_default_str();
    generate->add_option("--n-step", gen.config.n_step, "Quadrature order increment")->capture_default_str();
    generate->add_flag("--jitter-c", gen.config.jitter_c, "Jitter interior c values within their log cells");
    generate->add_option("--expect-count", gen.expect_count, "Required sequence count (0 = any)")
        ->capture_default_str();
    generate->add_option("--threads", gen.config.threads, "Worker threads (0 = hardware)")->capture_default_str();

    EvolveArgs evo;
    auto* evolve_cmd = app.add_subcommand("evolve", "Evolve an accelerator formula on a dataset");
    evolve_cmd->add_option("--data", evo.data, "Dataset CSV")->required();
    evolve_cmd->add_option("--pop", evo.config.population_size, "Population size")->capture_default_str();
    evolve_cmd->add_option("--gens", evo.config.max_generations, "Maximum generations")->capture_default_str();
    evolve_cmd->add_option("--cx", evo.config.crossover_rate, "Crossover rate")->capture_default_str();
    evolve_cmd->add_option("--mut", evo.config.mutation_rate, "Mutation rate")->capture_default_str();
    evolve_cmd->add_option("--elite", evo.config.elite_count, "Elite count")->capture_default_str();
    evolve_cmd->add_option("--tourn", evo.config.tournament_size, "Tournament size")->capture_default_str();
    evolve_cmd->add_option("--depth", evo.config.max_depth, "Maximum tree depth (1-4)")->capture_default_str();
    evolve_cmd->add_option("--target", evo.config.target_fitness, "Stop once training fitness exceeds this")
        ->capture_default_str();
    evolve_cmd->add_option("--split", evo.config.train_fraction, "Training fraction")->capture_default_str();
    evolve_cmd->add_option("--positions", evo.config.evaluation_orders, "Evaluation orders")
        ->delimiter(',')
        ->capture_default_str();
    evolve_cmd->add_option("--seed", evo.seed, "Seed; falls back to TXACCEL_SEED, then 1");
    evolve_cmd->add_option("--restarts", evo.config.param_opt.restarts, "Random restarts for p")
        ->capture_default_str();
    evolve_cmd->add_option("--max-fevals", evo.config.param_opt.max_function_evals,
                           "Fitness evaluations per simplex run")
        ->capture_default_str();
    evolve_cmd->add_flag("--no-constants", evo.no_constants, "Disable ephemeral constants in the terminal set");
    evolve_cmd->add_option("--threads", evo.config.threads, "Worker threads (0 = hardware)")->capture_default_str();
    evolve_cmd->add_option("--out", evo.out, "Output directory")->capture_default_str();

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "Benchmark accelerators against the raw sequence");
    evaluate_cmd->add_option("--data", ev.data, "Dataset CSV")->required();
    evaluate_cmd->add_option("--formula", ev.formula, "Formula file for 'evolved' (default: built-in formula)");
    evaluate_cmd->add_option("--methods", ev.methods, "Methods: raw, aitken, wynn, evolved")
        ->delimiter(',')
        ->capture_default_str();
    evaluate_cmd->add_option("--positions", ev.positions, "Evaluation orders")->delimiter(',')->capture_default_str();
    evaluate_cmd->add_option("--bins", ev.bins, "Equal-width c bins for the grid")->capture_default_str();
    evaluate_cmd->add_option("--out", ev.out, "Output directory")->capture_default_str();
    evaluate_cmd->add_option("--threads", ev.threads, "Worker threads (0 = hardware)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    if (generate->parsed()) {
        Manifest m("generate", argc, argv);
        return guarded([&] { return run_generate(gen, m); });
    }
    if (evolve_cmd->parsed()) {
        Manifest m("evolve", argc, argv);
        return guarded([&] { return run_evolve(evo, m); });
    }
    Manifest m("evaluate", argc, argv);
    return guarded([&] { return run_evaluate(ev, m); });
}
