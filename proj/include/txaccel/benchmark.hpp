#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "txaccel/accelerators.hpp"
#include "txaccel/sequence.hpp"

namespace txaccel {

struct MethodSummary {
    std::string method;
    std::size_t wins = 0;
    std::size_t losses = 0;    ///< includes invalids
    std::size_t invalids = 0;
    double success_rate = 0.0;
};

/// Success fraction for one (evaluation order, c bin) cell.
struct GridCell {
    int order = 0;
    double c_low = 0.0;
    double c_high = 0.0;
    std::size_t wins = 0;
    std::size_t count = 0;

    double success_rate() const { return count == 0 ? 0.0 : static_cast<double>(wins) / count; }
};

struct BenchmarkReport {
    std::vector<MethodSummary> methods;
    /// Per method, cells ordered by evaluation order then c bin.
    std::map<std::string, std::vector<GridCell>> grids;
    std::vector<int> orders;
    std::size_t sequence_count = 0;
    int bins = 10;
    std::map<std::string, std::string> metadata;

    const MethodSummary& summary(const std::string& method) const;
};

struct BenchmarkOptions {
    int bins = 10;
    std::size_t threads = 0;
    std::string dataset_id = "unnamed";
};

/// Compares every method against the raw sequence at each (sequence, order).
/// Throws InvalidArgument for bins < 1 and propagates OutOfRange for short sequences.
BenchmarkReport run_benchmark(const std::vector<Sequence>& sequences, const std::vector<Accelerator>& methods,
                              const std::vector<int>& orders, const BenchmarkOptions& options = {});

/// `method,wins,losses,invalids,success_rate`
void write_methods_csv(const std::filesystem::path& path, const BenchmarkReport& report);
/// `method,order,c_bin_low,c_bin_high,success_rate,count`
void write_grid_csv(const std::filesystem::path& path, const BenchmarkReport& report);

/// Published success rates vs raw: Aitken 39 %, Wynn-epsilon 32 %, GP-evolved 78 %.
struct PublishedRate {
    std::string method;
    double rate;
};
std::vector<PublishedRate> published_rates();

/// Side-by-side table of this report's rates and the published ones; rows further than
/// `flag_points` percentage points away are flagged.
std::string compare_to_published(const BenchmarkReport& report, double flag_points = 15.0);

}  // namespace txaccel
