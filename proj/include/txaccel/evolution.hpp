#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "txaccel/gp.hpp"
#include "txaccel/rng.hpp"
#include "txaccel/sequence.hpp"

namespace txaccel {

struct ParamOptConfig {
    int restarts = 5;
    std::size_t max_function_evals = 200;  ///< per restart
    double p_min = -2.0;
    double p_max = 2.0;
    double initial_step = 0.25;
};

struct EvolutionConfig {
    int population_size = 40;
    int max_generations = 200;
    double crossover_rate = 0.70;
    double mutation_rate = 0.30;
    int elite_count = 2;
    int tournament_size = 3;
    int max_depth = 4;
    double target_fitness = 0.75;
    double train_fraction = 0.70;
    std::vector<int> evaluation_orders = default_evaluation_orders();
    std::uint64_t rng_seed = 1;
    ParamOptConfig param_opt;
    bool use_constants = true;
    std::size_t threads = 0;

    /// Throws InvalidConfig when a field is outside its allowed range.
    void validate() const;
    gp::GenerationOptions generation_options() const;
};

/// Precomputed (current window, previous window, raw error) for every training comparison.
class FitnessCases {
public:
    /// Throws OutOfRange ("insufficient window") if a sequence lacks an order or its history.
    FitnessCases(std::span<const Sequence> sequences, std::span<const int> orders);

    std::size_t size() const noexcept { return cases_.size(); }
    bool empty() const noexcept { return cases_.empty(); }

    struct Case {
        Window current;
        Window previous;
        double raw_error;
    };
    std::span<const Case> cases() const noexcept { return cases_; }

private:
    std::vector<Case> cases_;
};

/// Fraction of comparisons where the formula's consecutive relative error strictly beats raw.
/// Outputs that hit a closure fallback count as losses. Returns 0 for an empty case set.
double fitness(const gp::Formula& f, const FitnessCases& cases);
double fitness(const gp::Formula& f, std::span<const Sequence> training, std::span<const int> orders);

struct ParamResult {
    gp::Formula formula;
    double fitness = 0.0;
    std::size_t evaluations = 0;  ///< fitness evaluations spent, including the baseline
    bool optimizer_invoked = false;
};

/// Maximizes fitness over p with Nelder-Mead from the current p and `restarts` random starts.
/// Formulas without a p node are returned unchanged.
ParamResult optimize_parameter(const gp::Formula& f, const FitnessCases& cases, const ParamOptConfig& config,
                               Rng& rng);
/// Same, with explicit restart points (drawn elsewhere).
ParamResult optimize_parameter(const gp::Formula& f, const FitnessCases& cases, const ParamOptConfig& config,
                               std::span<const double> starts);

struct Individual {
    gp::Formula formula;
    double fitness = 0.0;
};

/// Highest fitness, then fewest nodes, then lowest index.
bool ranks_before(const Individual& a, std::size_t ia, const Individual& b, std::size_t ib);

/// Fittest of `tournament_size` members drawn uniformly with replacement.
std::size_t tournament_select(std::span<const Individual> population, int tournament_size, Rng& rng);

struct GenerationRecord {
    int generation = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    std::size_t evaluations = 0;
};

struct EvolutionState {
    int generation = 0;
    std::vector<Individual> population;
    Individual best;
    std::vector<GenerationRecord> history;
};

struct EvolutionReport {
    gp::Formula best;
    double train_fitness = 0.0;
    double validation_fitness = 0.0;  ///< NaN when the validation set is empty
    std::vector<GenerationRecord> history;
    bool reached_target = false;
    std::size_t total_evaluations = 0;
};

using GenerationObserver = std::function<void(const EvolutionState&)>;

/// Seeded generational GP with elitism. Throws InvalidConfig on an empty training set
/// or an invalid configuration.
EvolutionReport evolve(const EvolutionConfig& config, std::span<const Sequence> training,
                       std::span<const Sequence> validation, const GenerationObserver& observer = {});

/// Seeded shuffle, then the first round(train_fraction * n) sequences train.
std::pair<std::vector<Sequence>, std::vector<Sequence>> split_dataset(std::span<const Sequence> sequences,
                                                                      double train_fraction, std::uint64_t seed);

/// `generation,best_fitness,mean_fitness,evals`
void write_history_csv(const std::filesystem::path& path, std::span<const GenerationRecord> history);

}  // namespace txaccel
