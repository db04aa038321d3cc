#include "txaccel/transport.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "txaccel/error.hpp"
#include "txaccel/parallel.hpp"
#include "txaccel/quadrature.hpp"
#include "txaccel/rng.hpp"
#include "txaccel/version.hpp"

namespace txaccel {

namespace {

constexpr double kImagTolerance = 1e-10;
constexpr double kPairingTolerance = 1e-10;
constexpr double kMaxConditionNumber = 1e12;
constexpr double kSymmetryTolerance = 1e-10;

void validate(const SlabProblem& p, int order) {
    if (order < 4 || order > kMaxQuadratureOrder || order % 2 != 0) {
        throw InvalidArgument(fmt::format("S_N order must be even and in [4, 64], got {}", order));
    }
    if (!(p.sigma_t > 0.0) || !std::isfinite(p.sigma_t)) {
        throw InvalidArgument(fmt::format("sigma_t must be positive, got {}", p.sigma_t));
    }
    if (!(p.width > 0.0) || !std::isfinite(p.width)) {
        throw InvalidArgument(fmt::format("slab width must be positive, got {}", p.width));
    }
    if (!(p.source >= 0.0) || !std::isfinite(p.source)) {
        throw InvalidArgument(fmt::format("source must be non-negative, got {}", p.source));
    }
    if (!(p.scattering_ratio >= 0.0)) {
        throw InvalidArgument(fmt::format("scattering ratio must be >= 0, got {}", p.scattering_ratio));
    }
    if (p.scattering_ratio >= 1.0) {
        throw UnsupportedProblem(fmt::format(
            "scattering ratio c = {} >= 1: no constant particular solution exists", p.scattering_ratio));
    }
}

/// Modal representation of the S_N solution; evaluates the scalar flux anywhere in the slab.
class ModalSolution {
public:
    ModalSolution(const SlabProblem& problem, int order) {
        validate(problem, order);
        const QuadratureSet quad = gauss_legendre(order);
        const int n = order;
        const double st = problem.sigma_t;
        const double ss = problem.scattering_ratio * st;
        length_ = problem.width / st;
        // Constant angular flux balancing the per-direction source Q/2.
        particular_ = 0.5 * problem.infinite_medium_flux();

        Eigen::MatrixXd system(n, n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double a = (i == j ? -st : 0.0) + 0.5 * ss * quad.weights[j];
                system(i, j) = a / quad.nodes[i];
            }
        }

        Eigen::EigenSolver<Eigen::MatrixXd> solver(system, true);
        if (solver.info() != Eigen::Success) {
            throw NumericalFailure("eigen-decomposition of the S_N system failed",
                                   fmt::format("order={} c={} width={}", order,
                                               problem.scattering_ratio, problem.width));
        }
        const Eigen::VectorXcd lambda = solver.eigenvalues();
        const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
        for (int k = 0; k < n; ++k) {
            if (std::abs(lambda[k].imag()) > kImagTolerance * scale) {
                throw NumericalFailure("S_N spectrum is not real",
                                       fmt::format("order={} c={} eigenvalue={}+{}i", order,
                                                   problem.scattering_ratio, lambda[k].real(),
                                                   lambda[k].imag()));
            }
        }
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(),
                  [&](int a, int b) { return lambda[a].real() < lambda[b].real(); });
        for (int k = 0; k < n / 2; ++k) {
            const double lo = lambda[idx[k]].real();
            const double hi = lambda[idx[n - 1 - k]].real();
            if (std::abs(lo + hi) > kPairingTolerance * scale || !(lo < 0.0)) {
                throw NumericalFailure("S_N spectrum is not +/- paired",
                                       fmt::format("order={} c={} pair=({}, {})", order,
                                                   problem.scattering_ratio, lo, hi));
            }
        }

        eigenvalues_.resize(n);
        Eigen::MatrixXd vectors(n, n);
        for (int k = 0; k < n; ++k) {
            eigenvalues_[k] = lambda[idx[k]].real();
            vectors.col(k) = solver.eigenvectors().col(idx[k]).real();
        }

        // Rows: incoming ordinates at each face. Columns: modes, each anchored where it is <= 1.
        Eigen::MatrixXd boundary(n, n);
        for (int m = 0; m < n; ++m) {
            const bool left_face = quad.nodes[m] > 0.0;
            for (int k = 0; k < n; ++k) {
                boundary(m, k) = vectors(m, k) * mode_factor(k, left_face ? 0.0 : length_);
            }
        }
        const Eigen::VectorXd rhs = Eigen::VectorXd::Constant(n, -particular_);

        Eigen::JacobiSVD<Eigen::MatrixXd> svd(boundary);
        const auto& sv = svd.singularValues();
        const double condition = sv(0) / sv(n - 1);
        if (!(condition <= kMaxConditionNumber)) {
            throw NumericalFailure("boundary system is ill-conditioned",
                                   fmt::format("order={} c={} width={} condition={:.3e}", order,
                                               problem.scattering_ratio, problem.width, condition));
        }
        const Eigen::VectorXd coef = boundary.colPivHouseholderQr().solve(rhs);

        weight_sum_ = std::accumulate(quad.weights.begin(), quad.weights.end(), 0.0);
        modal_weight_.resize(n);
        for (int k = 0; k < n; ++k) {
            double u = 0.0;
            for (int m = 0; m < n; ++m) u += quad.weights[m] * vectors(m, k);
            modal_weight_[k] = coef[k] * u;
        }
    }

    double length() const { return length_; }

    double scalar_flux(double x) const {
        double phi = weight_sum_ * particular_;
        for (std::size_t k = 0; k < eigenvalues_.size(); ++k) {
            phi += modal_weight_[k] * mode_factor(k, x);
        }
        return phi;
    }

private:
    double mode_factor(std::size_t k, double x) const {
        const double lam = eigenvalues_[k];
        return lam < 0.0 ? std::exp(lam * x) : std::exp(lam * (x - length_));
    }

    double length_ = 0.0;
    double particular_ = 0.0;
    double weight_sum_ = 0.0;
    std::vector<double> eigenvalues_;
    std::vector<double> modal_weight_;
};

template <typename Fn>
auto annotate_order(int order, Fn&& fn) {
    const auto suffix = fmt::format(" (quadrature order {})", order);
    try {
        return fn();
    } catch (const NumericalFailure& e) {
        throw NumericalFailure(e.what() + suffix, e.diagnostics());
    } catch (const UnsupportedProblem& e) {
        throw UnsupportedProblem(e.what() + suffix);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(e.what() + suffix);
    }
}

}  // namespace

SnSolution solve_sn(const SlabProblem& problem, int order) {
    const ModalSolution modal(problem, order);
    const double half = 0.5 * modal.length();
    const double center = modal.scalar_flux(half);

    const double delta = modal.length() / 100.0;
    const double left = modal.scalar_flux(half - delta);
    const double right = modal.scalar_flux(half + delta);
    if (std::abs(left - right) > kSymmetryTolerance * std::max(std::abs(center), 1e-300)) {
        throw NumericalFailure("scalar flux is not symmetric about the slab center",
                               fmt::format("order={} c={} width={} left={:.17g} right={:.17g}", order,
                                           problem.scattering_ratio, problem.width, left, right));
    }
    return {problem, order, center};
}

std::vector<double> scalar_flux_profile(const SlabProblem& problem, int order,
                                        const std::vector<double>& depths) {
    const ModalSolution modal(problem, order);
    std::vector<double> out;
    out.reserve(depths.size());
    for (double x : depths) out.push_back(modal.scalar_flux(x));
    return out;
}

Sequence generate_sequence(const SlabProblem& problem, const std::vector<int>& orders, std::string id) {
    std::vector<double> values;
    values.reserve(orders.size());
    for (int order : orders) {
        values.push_back(annotate_order(order, [&] { return solve_sn(problem, order).center_scalar_flux; }));
    }
    return Sequence(std::move(id), problem.scattering_ratio, problem.width, orders, std::move(values));
}

std::vector<int> DatasetConfig::orders() const {
    if (n_step <= 0 || n_step % 2 != 0 || n_min < 4 || n_min % 2 != 0 || n_max < n_min ||
        n_max > kMaxQuadratureOrder) {
        throw InvalidConfig(fmt::format(
            "invalid order grid: n_min={} n_max={} n_step={} (need even 4 <= n_min <= n_max <= 64, even step)",
            n_min, n_max, n_step));
    }
    std::vector<int> out;
    for (int n = n_min; n <= n_max; n += n_step) out.push_back(n);
    return out;
}

std::vector<double> DatasetConfig::c_values(std::uint64_t seed) const {
    if (c_count < 1 || !(c_min > 0.0) || !(c_max < 1.0) || !(c_min <= c_max) ||
        (c_count == 1 && c_min != c_max) || (c_count > 1 && c_min == c_max)) {
        throw InvalidConfig(fmt::format("invalid c grid: c_min={} c_max={} c_count={}", c_min, c_max, c_count));
    }
    if (c_count == 1) return {c_min};
    const double lo = std::log(c_min);
    const double step = (std::log(c_max) - lo) / (c_count - 1);
    Rng rng(seed);
    std::vector<double> out(c_count);
    for (int i = 0; i < c_count; ++i) {
        double offset = i;
        if (jitter_c && i > 0 && i + 1 < c_count) offset += rng.uniform(-0.5, 0.5);
        out[i] = std::exp(lo + offset * step);
    }
    out.front() = c_min;
    out.back() = c_max;
    return out;
}

std::vector<Sequence> generate_dataset(const DatasetConfig& config, std::uint64_t rng_seed) {
    const std::vector<int> orders = config.orders();
    const std::vector<double> cs = config.c_values(rng_seed);
    if (config.widths_mfp.empty()) throw InvalidConfig("no slab widths given");
    for (double w : config.widths_mfp) {
        if (!(w > 0.0) || !std::isfinite(w)) throw InvalidConfig(fmt::format("invalid slab width {}", w));
    }
    const std::size_t total = cs.size() * config.widths_mfp.size();
    if (config.required_count && total != *config.required_count) {
        throw InvalidConfig(fmt::format("grid has {} c values x {} widths = {} sequences, expected {}",
                                        cs.size(), config.widths_mfp.size(), total, *config.required_count));
    }

    std::vector<std::optional<Sequence>> slots(total);
    parallel_for(total, config.threads, [&](std::size_t k) {
        const std::size_t ci = k / config.widths_mfp.size();
        const std::size_t wi = k % config.widths_mfp.size();
        SlabProblem problem{config.sigma_t, cs[ci], config.widths_mfp[wi], config.source};
        slots[k] = generate_sequence(problem, orders, fmt::format("s{:03}", k));
    });
    std::vector<Sequence> out;
    out.reserve(total);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

void write_dataset_csv(const std::filesystem::path& path, const std::vector<Sequence>& sequences) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << "sequence_id,c,width_mfp,order,center_flux\n";
    for (const auto& seq : sequences) {
        for (std::size_t i = 0; i < seq.size(); ++i) {
            out << fmt::format("{},{:.17g},{:.17g},{},{:.17g}\n", seq.id(), seq.c(), seq.width_mfp(),
                               seq.orders()[i], seq.values()[i]);
        }
    }
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

namespace {

template <typename T>
T parse_field(std::string_view text, std::size_t line) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw DataError(fmt::format("line {}: cannot parse '{}'", line, text));
    }
    return value;
}

}  // namespace

std::vector<Sequence> read_dataset_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw DataError("dataset '" + path.string() + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "sequence_id,c,width_mfp,order,center_flux") {
        throw DataError("unexpected dataset header: '" + line + "'");
    }

    struct Pending {
        double c;
        double width;
        std::vector<int> orders;
        std::vector<double> values;
    };
    std::vector<std::string> ids;
    std::map<std::string, Pending> pending;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 5) {
            throw DataError(fmt::format("line {}: expected 5 fields, got {}", line_no, fields.size()));
        }
        const std::string id(fields[0]);
        const auto c = parse_field<double>(fields[1], line_no);
        const auto width = parse_field<double>(fields[2], line_no);
        const auto order = parse_field<int>(fields[3], line_no);
        const auto value = parse_field<double>(fields[4], line_no);
        auto [it, inserted] = pending.try_emplace(id, Pending{c, width, {}, {}});
        if (inserted) {
            ids.push_back(id);
        } else if (it->second.c != c || it->second.width != width) {
            throw DataError(fmt::format("line {}: sequence '{}' changes c or width", line_no, id));
        }
        it->second.orders.push_back(order);
        it->second.values.push_back(value);
    }

    std::vector<Sequence> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        auto& p = pending.at(id);
        try {
            out.emplace_back(id, p.c, p.width, std::move(p.orders), std::move(p.values));
        } catch (const InvalidArgument& e) {
            throw DataError(e.what());
        }
    }
    return out;
}

void write_dataset_metadata(const std::filesystem::path& path, const DatasetConfig& config,
                            std::uint64_t seed, std::size_t sequence_count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    out << "artifact_version=" << kVersion << '\n';
    out << "solver=analytic_sn_modal\n";
    out << fmt::format("sigma_t={:.17g}\n", config.sigma_t);
    out << fmt::format("source={:.17g}\n", config.source);
    out << fmt::format("c_min={:.17g}\n", config.c_min);
    out << fmt::format("c_max={:.17g}\n", config.c_max);
    out << "c_count=" << config.c_count << '\n';
    out << "c_spacing=log\n";
    out << "c_jitter=" << (config.jitter_c ? "true" : "false") << '\n';
    out << fmt::format("c_values={:.17g}\n", fmt::join(config.c_values(seed), ","));
    out << fmt::format("widths_mfp={:.17g}\n", fmt::join(config.widths_mfp, ","));
    out << "n_min=" << config.n_min << '\n';
    out << "n_max=" << config.n_max << '\n';
    out << "n_step=" << config.n_step << '\n';
    out << "seed=" << seed << '\n';
    out << "sequence_count=" << sequence_count << '\n';
    out << "evaluation_point=center\n";
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace txaccel
