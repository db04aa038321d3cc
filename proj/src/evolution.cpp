#include "txaccel/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "txaccel/error.hpp"
#include "txaccel/nelder_mead.hpp"
#include "txaccel/parallel.hpp"

namespace txaccel {

void EvolutionConfig::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidConfig(msg); };
    if (population_size < 2) fail(fmt::format("population size must be >= 2, got {}", population_size));
    if (max_generations < 0) fail(fmt::format("max generations must be >= 0, got {}", max_generations));
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("crossover rate must be in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("mutation rate must be in [0, 1]");
    if (elite_count <= 0 || elite_count >= population_size) {
        fail(fmt::format("elite count must be in (0, population size), got {}", elite_count));
    }
    if (tournament_size < 2) fail(fmt::format("tournament size must be >= 2, got {}", tournament_size));
    if (max_depth < 1 || max_depth > gp::kMaxDepth) {
        fail(fmt::format("max depth must be in [1, {}], got {}", gp::kMaxDepth, max_depth));
    }
    if (!(target_fitness > 0.0 && target_fitness <= 1.0)) fail("target fitness must be in (0, 1]");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) fail("train fraction must be in (0, 1)");
    if (evaluation_orders.empty()) fail("no evaluation orders");
    if (param_opt.restarts < 0) fail("parameter restarts must be >= 0");
    if (!(param_opt.p_min <= param_opt.p_max)) fail("p range is empty");
}

gp::GenerationOptions EvolutionConfig::generation_options() const {
    gp::GenerationOptions o;
    o.max_depth = max_depth;
    o.use_constants = use_constants;
    return o;
}

FitnessCases::FitnessCases(std::span<const Sequence> sequences, std::span<const int> orders) {
    cases_.reserve(sequences.size() * orders.size());
    for (const auto& seq : sequences) {
        for (int order : orders) {
            std::size_t index = 0;
            try {
                index = seq.index_of(order);
            } catch (const OutOfRange&) {
                throw OutOfRange(fmt::format("insufficient window: sequence '{}' has no term at order {}",
                                             seq.id(), order));
            }
            // Both this position and its predecessor need a full four-term window.
            if (index < kWindowSize) {
                throw OutOfRange(fmt::format(
                    "insufficient window: order {} in sequence '{}' has {} predecessors, need {}", order, seq.id(),
                    index, kWindowSize));
            }
            const double raw = relative_error(seq.values()[index], seq.values()[index - 1]);
            cases_.push_back({trailing_window(seq, index), trailing_window(seq, index - 1), raw});
        }
    }
}

double fitness(const gp::Formula& f, const FitnessCases& cases) {
    if (cases.empty()) return 0.0;
    std::size_t wins = 0;
    for (const auto& c : cases.cases()) {
        const gp::FormulaValue cur = gp::evaluate(f, c.current);
        if (cur.guarded) continue;
        const gp::FormulaValue prev = gp::evaluate(f, c.previous);
        if (prev.guarded) continue;
        wins += success_at(relative_error(cur.value, prev.value), c.raw_error);
    }
    return static_cast<double>(wins) / static_cast<double>(cases.size());
}

double fitness(const gp::Formula& f, std::span<const Sequence> training, std::span<const int> orders) {
    return fitness(f, FitnessCases(training, orders));
}

ParamResult optimize_parameter(const gp::Formula& f, const FitnessCases& cases, const ParamOptConfig& config,
                               std::span<const double> starts) {
    ParamResult out{f, 0.0, 0, false};
    if (!f.uses_param()) {
        out.fitness = fitness(f, cases);
        out.evaluations = 1;
        return out;
    }
    out.optimizer_invoked = true;
    gp::Formula trial = f;
    double best_p = f.p;
    double best_fit = -1.0;
    auto objective = [&](const std::vector<double>& x) {
        trial.p = x[0];
        const double fit = std::isfinite(x[0]) ? fitness(trial, cases) : 0.0;
        ++out.evaluations;
        if (fit > best_fit) {
            best_fit = fit;
            best_p = x[0];
        }
        return -fit;
    };

    NelderMeadOptions nm;
    nm.initial_step = config.initial_step;
    nm.max_evaluations = config.max_function_evals;
    nelder_mead(objective, {f.p}, nm);
    for (double start : starts) nelder_mead(objective, {start}, nm);

    out.formula.p = best_p;
    out.fitness = best_fit;
    return out;
}

ParamResult optimize_parameter(const gp::Formula& f, const FitnessCases& cases, const ParamOptConfig& config,
                               Rng& rng) {
    std::vector<double> starts;
    if (f.uses_param()) {
        for (int r = 0; r < config.restarts; ++r) starts.push_back(rng.uniform(config.p_min, config.p_max));
    }
    return optimize_parameter(f, cases, config, starts);
}

bool ranks_before(const Individual& a, std::size_t ia, const Individual& b, std::size_t ib) {
    if (a.fitness != b.fitness) return a.fitness > b.fitness;
    if (a.formula.node_count() != b.formula.node_count()) return a.formula.node_count() < b.formula.node_count();
    return ia < ib;
}

std::size_t tournament_select(std::span<const Individual> population, int tournament_size, Rng& rng) {
    if (population.empty()) throw InvalidArgument("tournament on an empty population");
    std::size_t winner = rng.below(population.size());
    for (int t = 1; t < tournament_size; ++t) {
        const std::size_t challenger = rng.below(population.size());
        if (ranks_before(population[challenger], challenger, population[winner], winner)) winner = challenger;
    }
    return winner;
}

namespace {

struct Candidate {
    gp::Formula formula;
    bool needs_evaluation = true;
    double fitness = 0.0;  ///< carried over when needs_evaluation is false
};

/// Optimizes p (where present) and evaluates fitness for every candidate flagged for it.
/// Restart points are drawn serially in candidate order so worker count cannot affect results.
std::size_t evaluate_candidates(std::vector<Candidate>& candidates, const FitnessCases& cases,
                                const EvolutionConfig& config, Rng& rng) {
    std::vector<std::vector<double>> starts(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].needs_evaluation || !candidates[i].formula.uses_param()) continue;
        for (int r = 0; r < config.param_opt.restarts; ++r) {
            starts[i].push_back(rng.uniform(config.param_opt.p_min, config.param_opt.p_max));
        }
    }
    std::vector<std::size_t> evals(candidates.size(), 0);
    parallel_for(candidates.size(), config.threads, [&](std::size_t i) {
        auto& c = candidates[i];
        if (!c.needs_evaluation) return;
        ParamResult r = optimize_parameter(c.formula, cases, config.param_opt, starts[i]);
        c.formula = std::move(r.formula);
        c.fitness = r.fitness;
        c.needs_evaluation = false;
        evals[i] = r.evaluations;
    });
    return std::accumulate(evals.begin(), evals.end(), std::size_t{0});
}

GenerationRecord summarize(int generation, const std::vector<Individual>& population, std::size_t evals) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.evaluations = evals;
    rec.best_fitness = 0.0;
    double sum = 0.0;
    for (const auto& ind : population) {
        rec.best_fitness = std::max(rec.best_fitness, ind.fitness);
        sum += ind.fitness;
    }
    rec.mean_fitness = population.empty() ? 0.0 : sum / static_cast<double>(population.size());
    return rec;
}

std::size_t best_index(const std::vector<Individual>& population) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < population.size(); ++i) {
        if (ranks_before(population[i], i, population[best], best)) best = i;
    }
    return best;
}

}  // namespace

EvolutionReport evolve(const EvolutionConfig& config, std::span<const Sequence> training,
                       std::span<const Sequence> validation, const GenerationObserver& observer) {
    config.validate();
    if (training.empty()) throw InvalidConfig("training set is empty");
    const FitnessCases cases(training, config.evaluation_orders);
    const gp::GenerationOptions gen = config.generation_options();
    Rng rng(config.rng_seed);
    const auto pop_size = static_cast<std::size_t>(config.population_size);

    // Generation 0: the Aitken formula plus ramped grow/full formulas over depths 2..max_depth.
    std::vector<Candidate> candidates;
    candidates.reserve(pop_size);
    gp::Formula seed = gp::aitken_formula();
    if (seed.numerator.depth() > config.max_depth) {
        seed.numerator = gp::enforce_depth(seed.numerator, config.max_depth, rng, gen);
    }
    candidates.push_back({seed});
    const int min_depth = std::min(2, config.max_depth);
    const int depth_span = config.max_depth - min_depth + 1;
    for (std::size_t i = 1; i < pop_size; ++i) {
        const int depth = min_depth + static_cast<int>((i - 1) % depth_span);
        const auto method = ((i - 1) / depth_span) % 2 == 0 ? gp::Method::Grow : gp::Method::Full;
        gp::Formula f;
        f.numerator = gp::random_tree(depth, method, rng, gen);
        f.denominator = gp::random_tree(depth, method, rng, gen);
        f.p = rng.uniform(config.param_opt.p_min, config.param_opt.p_max);
        candidates.push_back({std::move(f)});
    }

    EvolutionState state;
    std::size_t evals = evaluate_candidates(candidates, cases, config, rng);
    std::size_t total_evals = evals;
    for (auto& c : candidates) state.population.push_back({std::move(c.formula), c.fitness});
    state.best = state.population[best_index(state.population)];
    state.history.push_back(summarize(0, state.population, evals));
    if (observer) observer(state);

    bool reached = state.best.fitness > config.target_fitness;
    for (int g = 1; g <= config.max_generations && !reached; ++g) {
        std::vector<std::size_t> ranked(pop_size);
        std::iota(ranked.begin(), ranked.end(), 0);
        std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
            return ranks_before(state.population[a], a, state.population[b], b);
        });

        std::vector<Candidate> next;
        next.reserve(pop_size);
        for (int e = 0; e < config.elite_count; ++e) {
            const auto& elite = state.population[ranked[e]];
            next.push_back({elite.formula, false, elite.fitness});
        }
        while (next.size() < pop_size) {
            const std::size_t ia = tournament_select(state.population, config.tournament_size, rng);
            const std::size_t ib = tournament_select(state.population, config.tournament_size, rng);
            Candidate a{state.population[ia].formula, false, state.population[ia].fitness};
            Candidate b{state.population[ib].formula, false, state.population[ib].fitness};
            if (rng.chance(config.crossover_rate)) {
                auto [ca, cb] = gp::crossover(a.formula, b.formula, rng, gen);
                a = {std::move(ca), true};
                b = {std::move(cb), true};
            }
            if (rng.chance(config.mutation_rate)) a = {gp::mutate(a.formula, rng, gen), true};
            if (rng.chance(config.mutation_rate)) b = {gp::mutate(b.formula, rng, gen), true};
            next.push_back(std::move(a));
            if (next.size() < pop_size) next.push_back(std::move(b));
        }

        evals = evaluate_candidates(next, cases, config, rng);
        total_evals += evals;
        state.population.clear();
        for (auto& c : next) state.population.push_back({std::move(c.formula), c.fitness});
        state.generation = g;
        state.best = state.population[best_index(state.population)];
        state.history.push_back(summarize(g, state.population, evals));
        if (observer) observer(state);
        reached = state.best.fitness > config.target_fitness;
    }

    EvolutionReport report;
    report.best = state.best.formula;
    report.train_fitness = state.best.fitness;
    report.history = std::move(state.history);
    report.reached_target = reached;
    report.total_evaluations = total_evals;
    report.validation_fitness = validation.empty()
                                    ? std::numeric_limits<double>::quiet_NaN()
                                    : fitness(report.best, FitnessCases(validation, config.evaluation_orders));
    return report;
}

std::pair<std::vector<Sequence>, std::vector<Sequence>> split_dataset(std::span<const Sequence> sequences,
                                                                      double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument(fmt::format("train fraction must be in (0, 1), got {}", train_fraction));
    }
    std::vector<std::size_t> idx(sequences.size());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);

    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(sequences.size())));
    std::pair<std::vector<Sequence>, std::vector<Sequence>> out;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        (k < n_train ? out.first : out.second).push_back(sequences[idx[k]]);
    }
    return out;
}

void write_history_csv(const std::filesystem::path& path, std::span<const GenerationRecord> history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << "generation,best_fitness,mean_fitness,evals\n";
    for (const auto& h : history) {
        out << fmt::format("{},{:.17g},{:.17g},{}\n", h.generation, h.best_fitness, h.mean_fitness, h.evaluations);
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace txaccel
