#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "txaccel/sequence.hpp"

namespace txaccel {

/// Homogeneous slab with vacuum boundaries, isotropic scattering and a uniform isotropic source.
///
/// `source` is the total emission density; each direction receives Q/2, so
///   mu dpsi/dx + sigma_t psi = (sigma_s / 2) phi + Q / 2,   phi = sum_m w_m psi_m,
/// and the infinite-medium scalar flux is Q / (sigma_t (1 - c)).
struct SlabProblem {
    double sigma_t = 1.0;           ///< total cross section [1/cm]
    double scattering_ratio = 0.0;  ///< c = sigma_s / sigma_t, in [0, 1)
    double width = 1.0;             ///< slab width in mean free paths (L * sigma_t)
    double source = 1.0;            ///< Q, total isotropic emission density

    /// Infinite-medium scalar flux Q / (sigma_t (1 - c)).
    double infinite_medium_flux() const { return source / (sigma_t * (1.0 - scattering_ratio)); }
};

struct SnSolution {
    SlabProblem problem;
    int order = 0;
    double center_scalar_flux = 0.0;
};

/// Exact angle-discretized solution of the N-ordinate slab equations, evaluated at the slab center.
///
/// The homogeneous system psi' = M psi, M = D^-1 (-sigma_t I + (sigma_s / 2) 1 w^T), is
/// diagonalized; decaying modes are anchored at x = 0 and growing modes at x = L so that no
/// exponential exceeds one. Vacuum boundary conditions fix the modal coefficients.
///
/// Throws InvalidArgument for a bad order or invalid problem, UnsupportedProblem for c >= 1,
/// and NumericalFailure when any structural self-check (real +/- paired spectrum, boundary
/// system conditioning, left/right symmetry about the center) fails.
SnSolution solve_sn(const SlabProblem& problem, int order);

/// Scalar flux at arbitrary depths x in [0, L] (physical units) for the same solution.
std::vector<double> scalar_flux_profile(const SlabProblem& problem, int order,
                                        const std::vector<double>& depths);

/// Center flux for each order. Solver errors are rethrown annotated with the failing order.
Sequence generate_sequence(const SlabProblem& problem, const std::vector<int>& orders,
                           std::string id = {});

/// Grid of slab problems. Sequences are produced c-major: for each c, every width.
struct DatasetConfig {
    double c_min = 0.001;
    double c_max = 0.999;
    int c_count = 40;
    std::vector<double> widths_mfp{1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    int n_min = 4;
    int n_max = 52;
    int n_step = 4;
    double sigma_t = 1.0;
    double source = 1.0;
    /// Jitter interior c values inside their log-spaced cells using the seed.
    bool jitter_c = false;
    /// Required number of sequences; nullopt accepts any grid size.
    std::optional<std::size_t> required_count = 240;
    std::size_t threads = 0;

    std::vector<int> orders() const;
    /// Log-spaced c grid with exact endpoints (jittered interior if requested).
    std::vector<double> c_values(std::uint64_t seed) const;
};

/// One sequence per (c, width) pair. Throws InvalidConfig when the grid is malformed
/// or its size differs from required_count.
std::vector<Sequence> generate_dataset(const DatasetConfig& config, std::uint64_t rng_seed);

/// Writes `sequence_id,c,width_mfp,order,center_flux` rows with 17 significant digits.
void write_dataset_csv(const std::filesystem::path& path, const std::vector<Sequence>& sequences);

/// Reads a dataset CSV; sequences keep first-appearance order. Throws DataError on malformed input.
std::vector<Sequence> read_dataset_csv(const std::filesystem::path& path);

/// key=value sidecar describing how a dataset was generated.
void write_dataset_metadata(const std::filesystem::path& path, const DatasetConfig& config,
                            std::uint64_t seed, std::size_t sequence_count);

}  // namespace txaccel
