#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace txaccel {

/// Center-flux values indexed by quadrature order, with the slab parameters that produced them.
class Sequence {
public:
    /// Throws InvalidArgument unless orders strictly increase, sizes match, and all values are finite.
    Sequence(std::string id, double c, double width_mfp, std::vector<int> orders,
             std::vector<double> values);

    const std::string& id() const noexcept { return id_; }
    double c() const noexcept { return c_; }
    double width_mfp() const noexcept { return width_mfp_; }
    std::span<const int> orders() const noexcept { return orders_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Index of `order` in orders(); throws OutOfRange if absent.
    std::size_t index_of(int order) const;

    bool operator==(const Sequence&) const = default;

private:
    std::string id_;
    double c_;
    double width_mfp_;
    std::vector<int> orders_;
    std::vector<double> values_;
};

/// The four most recent terms ending at some position, newest first.
struct Window {
    double s_n = 0.0;
    double s_nm1 = 0.0;
    double s_nm2 = 0.0;
    double s_nm3 = 0.0;

    bool operator==(const Window&) const = default;
};

inline constexpr std::size_t kWindowSize = 4;

/// Marker for an undefined error or accelerated value. Compares as +infinity.
inline constexpr double kUndefined = std::numeric_limits<double>::infinity();

inline bool is_undefined(double v) noexcept { return !(v < kUndefined); }

/// |curr - prev| / |curr|, or kUndefined when |curr| < 1e-300.
double relative_error(double curr, double prev) noexcept;

/// Strict improvement over the raw error. Ties and undefined formula errors lose.
bool success_at(double formula_err, double raw_err) noexcept;

/// Window ending at `position_order`. Throws OutOfRange when the order is absent
/// or has fewer than three predecessors.
Window window_at(const Sequence& seq, int position_order);

/// Window ending at index `index`. Slots older than the start of the sequence
/// are zero; throws OutOfRange if `index` is past the end.
Window trailing_window(const Sequence& seq, std::size_t index);

/// Evaluation positions used throughout: N = 20, 28, 36, 44, 52.
std::vector<int> default_evaluation_orders();

}  // namespace txaccel
