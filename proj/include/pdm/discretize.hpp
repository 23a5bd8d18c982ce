#pragma once

#include "pdm/model.hpp"
#include "pdm/tridiagonal.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm {

inline constexpr int kDefaultGridPoints = 4000;
inline constexpr int kMinGridPoints = 64;

/// Uniform grid on [0, r_max] with spacing h = r_max / (M + 1) and interior
/// nodes r_i = i h, i = 1..M. The end at r_max is always pinned to zero. At the
/// origin the solution is pinned as well (Vanishing), or the node r_0 = 0 is an
/// extra unknown with a mirror condition (Reflecting, SquareRoot).
class RadialGrid {
public:
    RadialGrid(double r_max, int interior_points, OriginCondition origin = OriginCondition::Vanishing);

    double r_max() const { return r_max_; }
    int interior_points() const { return interior_points_; }
    OriginCondition origin() const { return origin_; }
    double h() const { return r_max_ / (interior_points_ + 1); }

    bool has_origin_node() const { return origin_ != OriginCondition::Vanishing; }
    /// Number of unknowns: M, or M + 1 with an origin node.
    std::size_t size() const;
    /// Radius of unknown j (0-based).
    double r(std::size_t j) const;
    std::vector<double> nodes() const;

    /// Same box with spacing h / 2 (2M + 1 interior points).
    RadialGrid refined() const;
    RadialGrid with_points(int interior_points) const;

private:
    double r_max_;
    int interior_points_;
    OriginCondition origin_;
};

/// Raised when the highest requested level is estimated to lie too close to
/// (or in) the continuum for a bound-state box to resolve it.
class ContinuumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GridOverrides {
    std::optional<double> r_max;
    std::optional<int> interior_points;
};

/// Levels whose closed-form estimate exceeds this fraction of the threshold are rejected.
inline constexpr double kContinuumFraction = 0.995;

/// Box size for the k_levels lowest states of the radial problem.
double default_r_max(const ModelParams& params, int k_levels);

RadialGrid build_grid(const ModelParams& params, int k_levels, const GridOverrides& overrides = {});

/// Conservative three-point discretisation of -(p R')' + U R = 2E R.
/// Unit weight, except 1/2 on a reflecting origin row.
///
/// For the SquareRoot origin the unknown is F = r^{-1/2} R instead and the
/// rows discretise -(r p F')' + 2 V r F = 2E r F by finite volumes (weight r_i,
/// h/8 on the origin cell).
GeneralizedProblem assemble_bdd(const RadialGrid& grid, const ModelParams& params);

/// -R'' + W R = 2 m E R with weight b_i = 2 m(r_i) (halved on a reflecting origin row).
/// SquareRoot origin: -(r F')' + omega^2 r^3 F = 2 m r E F, finite volumes as above.
GeneralizedProblem assemble_naive(const RadialGrid& grid, const ModelParams& params);

/// Map an FD eigenvector (in the assembled unknown) to R at the grid nodes.
std::vector<double> radial_samples(const RadialGrid& grid, std::span<const double> unknowns);

enum class Method { FiniteDifference, Shooting };

std::string_view to_string(Method method);

struct Level {
    int n = 0;
    double energy = 0.0;
    double error_estimate = 0.0;
    double residual = 0.0;
    bool converged = false;
    bool trusted = false;
    std::string failure;
    /// Radial function R at grid nodes (FD), normalised to sum R^2 h = 1.
    std::vector<double> samples;
};

struct Spectrum {
    ModelParams params;
    Ordering ordering;
    Method method;
    RadialGrid grid;  // finest grid used
    bool reduced_accuracy_boundary = false;
    std::vector<Level> levels;

    bool all_converged() const;
};

/// Trust margin below the continuum threshold.
double continuum_margin(double threshold, double error_estimate);

/// Raw FD solve on one grid: energies E for the k lowest levels, no extrapolation.
Spectrum solve_fd(const ModelParams& params, Ordering ordering, const RadialGrid& grid, int k,
                  double tol = 0.0);

struct RichardsonEstimate {
    double value;
    double error;
};

/// E* = E_fine + (E_fine - E_coarse) / (2^order - 1), error |E_fine - E_coarse| / (2^order - 1).
RichardsonEstimate richardson(double coarse, double fine, int order = 2);

/// FD at h and h/2 with Richardson extrapolation and trust flags.
Spectrum refine_and_extrapolate(const ModelParams& params, Ordering ordering, int k,
                                const GridOverrides& overrides = {}, double tol = 0.0);

}  // namespace pdm
