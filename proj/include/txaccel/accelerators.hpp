#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "txaccel/sequence.hpp"

namespace txaccel {

/// A sequence transform applied position by position to a trailing window.
///
/// `transform` reads only the `min_window` newest slots of the window and returns either a
/// finite value or kUndefined. apply_accelerator maps any other non-finite output to kUndefined.
struct Accelerator {
    std::string name;
    std::size_t min_window = 1;
    std::function<double(const Window&)> transform;
};

/// Aitken delta-squared on (S_n, S_{n-1}, S_{n-2}). kUndefined when the second difference
/// is below 1e-10 * max(1, |S_n|).
double aitken(double s_n, double s_nm1, double s_nm2) noexcept;

/// Wynn epsilon table over `terms` (oldest first). Returns the entry of the even column
/// `target_column` built from the most recent terms; column 0 is the last term itself.
/// kUndefined when a cross-rule difference falls below 1e-300 in magnitude.
/// Throws InvalidArgument on an odd column or one the term count cannot support.
double wynn_epsilon(std::span<const double> terms, int target_column);

/// The GP-discovered rational accelerator
///   A_n = (S_n S_{n-2} - S_n^2 - S_{n-1}^2) / ((2 S_n - 4 S_{n-1} + S_{n-2}) (S_n / S_{n-1})).
/// kUndefined when S_{n-1}, the linear factor, or the ratio factor is below 1e-10 in magnitude.
double evolved_formula(const Window& window) noexcept;

Accelerator identity_accelerator();
Accelerator aitken_accelerator();
/// Wynn epsilon over the trailing window; column 2 uses the three newest terms.
Accelerator wynn_accelerator(int column = 2);
Accelerator evolved_accelerator();

/// Accelerated values at each evaluation position, with the consecutive relative error
/// against the accelerator's own value at the preceding order.
struct AcceleratorResult {
    std::string method;
    std::vector<int> positions;
    std::vector<double> values;           ///< A at the position
    std::vector<double> previous_values;  ///< A at the preceding order
    std::vector<double> errors;           ///< relative_error(values, previous_values)
    std::vector<bool> invalid;            ///< either value undefined

    std::size_t invalid_count() const;
};

/// Throws OutOfRange when a position is absent or lacks history for `acc.min_window`
/// at both the position and its predecessor.
AcceleratorResult apply_accelerator(const Accelerator& acc, const Sequence& seq,
                                    std::span<const int> positions);

}  // namespace txaccel
