#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "txaccel/sequence.hpp"
#include "txaccel/transport.hpp"

namespace txaccel::fixture {

/// S_k = a + b r^k at orders 4, 8, ..., 52.
inline Sequence geometric(const std::string& id, double a, double b, double r, double c = 0.5) {
    std::vector<int> orders;
    std::vector<double> values;
    for (int k = 0; k < 13; ++k) {
        orders.push_back(4 + 4 * k);
        values.push_back(a + b * std::pow(r, k));
    }
    return Sequence(id, c, 1.0, orders, values);
}

/// Small transport dataset: `c_count` log-spaced c values times the given widths.
inline std::vector<Sequence> transport_dataset(int c_count, std::vector<double> widths, std::uint64_t seed = 1) {
    DatasetConfig cfg;
    cfg.c_count = c_count;
    cfg.widths_mfp = std::move(widths);
    cfg.required_count.reset();
    return generate_dataset(cfg, seed);
}

}  // namespace txaccel::fixture
