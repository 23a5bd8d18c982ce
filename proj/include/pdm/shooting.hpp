#pragma once

#include "pdm/discretize.hpp"
#include "pdm/model.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace pdm {

class ShootingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Setup for Numerov shooting on -v'' + W v = 2 m E v (Liouville or naive form).
/// Node i sits at r_i = i h for i = 0..M+1; v vanishes at r_{M+1} = r_max.
class ShootSpec {
public:
    ShootSpec(EffectiveRadialForm form, RadialGrid grid);

    const EffectiveRadialForm& form() const { return form_; }
    const RadialGrid& grid() const { return grid_; }
    /// Small-r exponent of the regular solution, l + (N - 1)/2.
    double series_exponent() const { return series_exponent_; }
    int last_node() const { return grid_.interior_points() + 1; }

    /// f(r_i) = W(r_i) - 2 m(r_i) E; not defined at i = 0 when the centrifugal term is present.
    double f(int i, double energy) const;
    /// Index of the outermost classical turning point, clamped into the interior.
    int matching_point(double energy) const;
    /// Lowest value of W / (2m) over the interior nodes: no node appears below it.
    double energy_floor() const;

private:
    EffectiveRadialForm form_;
    RadialGrid grid_;
    double series_exponent_;
    std::vector<double> W_;       // W at nodes 0..M+1 (NaN where singular)
    std::vector<double> weight_;  // 2m at nodes 0..M+1
};

ShootSpec make_shoot_spec(const ModelParams& params, Ordering ordering, const RadialGrid& grid);

struct SweepResult {
    int node_count = 0;
    /// Normalised discrete Wronskian of the outward and inward solutions at the
    /// matching point, divided by h; a continuous function of E for a fixed match index.
    double mismatch = 0.0;
    int match_index = 0;
};

/// One outward/inward Numerov pass at energy E. `match_index` pins the matching point.
SweepResult numerov_sweep(const ShootSpec& spec, double energy, std::optional<int> match_index = std::nullopt);

struct EnergyBracket {
    double lo;
    double hi;
};

/// Eigenvalue with exactly n_target interior nodes inside the bracket.
/// Throws ShootingError("bracket invalid") or ShootingError("no convergence").
double find_eigenvalue(const ShootSpec& spec, int n_target, EnergyBracket bracket, double tol);

/// Bracket search for level n: floor of W/2m up to the first energy with more
/// than n nodes (capped below the continuum threshold).
EnergyBracket bracket_level(const ShootSpec& spec, int n_target);

struct Eigenfunction {
    std::vector<double> r;            // nodes 0..M+1
    std::vector<double> v;            // matched Liouville variable
    std::vector<double> R;            // radial function, normalised to int R^2 dr = 1
    std::vector<double> full_radial;  // r^{-(N-1)/2} R
    double norm_unit = 0.0;           // int v^2 dr
    double norm_mass = 0.0;           // int v^2 2m dr
    double norm_R_from_v = 0.0;       // int R^2 dr via v and m
    double norm_R_direct = 0.0;       // int R^2 dr from R samples
    int sign_changes = 0;
    double mismatch = 0.0;
};

/// Matched eigenfunction at a converged eigenvalue. Throws ShootingError("not an
/// eigenvalue") when |mismatch| exceeds max_mismatch.
Eigenfunction eigenfunction(const ShootSpec& spec, double energy, double max_mismatch = 1e-5);

inline constexpr double kDefaultShootTolerance = 1e-9;

/// Shooting spectrum for the k lowest levels on the grid and its refinement;
/// energies from the fine grid, error estimate |E_h/2 - E_h| / 15.
Spectrum shoot_spectrum(const ModelParams& params, Ordering ordering, int k,
                        const GridOverrides& overrides = {}, double tol = kDefaultShootTolerance);

/// Shooting on one grid only (no error estimate).
Spectrum shoot_on_grid(const ModelParams& params, Ordering ordering, const RadialGrid& grid, int k,
                       double tol = kDefaultShootTolerance);

}  // namespace pdm
