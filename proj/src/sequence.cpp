#include "txaccel/sequence.hpp"

#include <cmath>

#include "txaccel/error.hpp"

namespace txaccel {

Sequence::Sequence(std::string id, double c, double width_mfp, std::vector<int> orders,
                   std::vector<double> values)
    : id_(std::move(id)),
      c_(c),
      width_mfp_(width_mfp),
      orders_(std::move(orders)),
      values_(std::move(values)) {
    if (orders_.empty() || orders_.size() != values_.size()) {
        throw InvalidArgument("sequence '" + id_ + "': orders and values must be non-empty and equal length");
    }
    for (std::size_t i = 1; i < orders_.size(); ++i) {
        if (orders_[i] <= orders_[i - 1]) {
            throw InvalidArgument("sequence '" + id_ + "': orders must be strictly increasing");
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("sequence '" + id_ + "': non-finite value");
    }
}

std::size_t Sequence::index_of(int order) const {
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (orders_[i] == order) return i;
    }
    throw OutOfRange("sequence '" + id_ + "' has no term at order " + std::to_string(order));
}

double relative_error(double curr, double prev) noexcept {
    const double denom = std::abs(curr);
    if (!(denom >= 1e-300) || !std::isfinite(curr) || !std::isfinite(prev)) return kUndefined;
    return std::abs(curr - prev) / denom;
}

bool success_at(double formula_err, double raw_err) noexcept {
    if (is_undefined(formula_err)) return false;
    return formula_err < raw_err;
}

Window trailing_window(const Sequence& seq, std::size_t index) {
    if (index >= seq.size()) {
        throw OutOfRange("index " + std::to_string(index) + " past end of sequence '" + seq.id() + "'");
    }
    const auto v = seq.values();
    auto at = [&](std::size_t back) { return back <= index ? v[index - back] : 0.0; };
    return {at(0), at(1), at(2), at(3)};
}

Window window_at(const Sequence& seq, int position_order) {
    const std::size_t index = seq.index_of(position_order);
    if (index + 1 < kWindowSize) {
        throw OutOfRange("insufficient window: order " + std::to_string(position_order) +
                         " in sequence '" + seq.id() + "' has " + std::to_string(index) +
                         " predecessors, need 3");
    }
    return trailing_window(seq, index);
}

std::vector<int> default_evaluation_orders() { return {20, 28, 36, 44, 52}; }

}  // namespace txaccel
