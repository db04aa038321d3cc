#include "txaccel/accelerators.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "txaccel/error.hpp"

namespace txaccel {

namespace {

constexpr double kProtectThreshold = 1e-10;
constexpr double kWynnThreshold = 1e-300;

double finite_or_undefined(double v) noexcept { return std::isfinite(v) ? v : kUndefined; }

}  // namespace

double aitken(double s_n, double s_nm1, double s_nm2) noexcept {
    const double second = s_n - 2.0 * s_nm1 + s_nm2;
    if (!(std::abs(second) >= kProtectThreshold * std::max(1.0, std::abs(s_n)))) return kUndefined;
    const double first = s_n - s_nm1;
    return finite_or_undefined(s_n - first * first / second);
}

double wynn_epsilon(std::span<const double> terms, int target_column) {
    if (target_column < 0 || target_column % 2 != 0) {
        throw InvalidArgument(fmt::format("Wynn epsilon column must be even and >= 0, got {}", target_column));
    }
    if (terms.empty() || static_cast<std::size_t>(target_column) + 1 > terms.size()) {
        throw InvalidArgument(fmt::format("Wynn epsilon column {} needs at least {} terms, got {}",
                                          target_column, target_column + 1, terms.size()));
    }
    // Two live columns of the table: eps_{k-1} and eps_k, indexed by the upper index n.
    std::vector<double> older(terms.size() + 1, 0.0);
    std::vector<double> current(terms.begin(), terms.end());
    for (int k = 0; k < target_column; ++k) {
        std::vector<double> next(current.size() - 1);
        for (std::size_t n = 0; n + 1 < current.size(); ++n) {
            const double diff = current[n + 1] - current[n];
            if (!(std::abs(diff) >= kWynnThreshold)) return kUndefined;
            next[n] = older[n + 1] + 1.0 / diff;
        }
        older = std::move(current);
        current = std::move(next);
    }
    return finite_or_undefined(current.back());
}

double evolved_formula(const Window& w) noexcept {
    const double linear = 2.0 * w.s_n - 4.0 * w.s_nm1 + w.s_nm2;
    if (!(std::abs(w.s_nm1) >= kProtectThreshold) || !(std::abs(linear) >= kProtectThreshold)) {
        return kUndefined;
    }
    const double ratio = w.s_n / w.s_nm1;
    if (!(std::abs(ratio) >= kProtectThreshold)) return kUndefined;
    const double numerator = w.s_n * w.s_nm2 - w.s_n * w.s_n - w.s_nm1 * w.s_nm1;
    return finite_or_undefined(numerator / (linear * ratio));
}

Accelerator identity_accelerator() {
    return {"raw", 1, [](const Window& w) { return w.s_n; }};
}

Accelerator aitken_accelerator() {
    return {"aitken", 3, [](const Window& w) { return aitken(w.s_n, w.s_nm1, w.s_nm2); }};
}

Accelerator wynn_accelerator(int column) {
    if (column < 0 || column % 2 != 0 || column + 1 > static_cast<int>(kWindowSize)) {
        throw InvalidArgument(fmt::format("Wynn column {} is not supported by a {}-term window", column,
                                          kWindowSize));
    }
    const auto needed = static_cast<std::size_t>(column + 1);
    return {column == 2 ? std::string("wynn") : fmt::format("wynn{}", column), needed,
            [column, needed](const Window& w) {
                const double all[kWindowSize] = {w.s_nm3, w.s_nm2, w.s_nm1, w.s_n};
                return wynn_epsilon(std::span<const double>(all).last(needed), column);
            }};
}

Accelerator evolved_accelerator() {
    return {"evolved", 3, [](const Window& w) { return evolved_formula(w); }};
}

std::size_t AcceleratorResult::invalid_count() const {
    return static_cast<std::size_t>(std::count(invalid.begin(), invalid.end(), true));
}

AcceleratorResult apply_accelerator(const Accelerator& acc, const Sequence& seq,
                                    std::span<const int> positions) {
    AcceleratorResult out;
    out.method = acc.name;
    out.positions.assign(positions.begin(), positions.end());
    for (int order : positions) {
        const std::size_t index = seq.index_of(order);
        if (index < acc.min_window) {
            throw OutOfRange(fmt::format(
                "insufficient window: '{}' needs {} terms at order {} and its predecessor in sequence '{}'",
                acc.name, acc.min_window, order, seq.id()));
        }
        const double current = finite_or_undefined(acc.transform(trailing_window(seq, index)));
        const double previous = finite_or_undefined(acc.transform(trailing_window(seq, index - 1)));
        const bool bad = is_undefined(current) || is_undefined(previous);
        out.values.push_back(current);
        out.previous_values.push_back(previous);
        out.invalid.push_back(bad);
        out.errors.push_back(bad ? kUndefined : relative_error(current, previous));
    }
    return out;
}

}  // namespace txaccel
