#pragma once

// Cross-ordering and cross-method comparisons built on the FD and shooting solvers.

#include "pdm/discretize.hpp"
#include "pdm/model.hpp"
#include "pdm/shooting.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SolveOptions {
    GridOverrides overrides;
    double fd_tol = 0.0;  // relative bisection width; 0 selects the default
    double shoot_tol = kDefaultShootTolerance;
};

/// One method's value for one level.
struct MethodValue {
    std::optional<double> energy;  // empty when the level was not found
    double error = 0.0;
    bool trusted = false;
    std::string failure;
};

struct LevelRecord {
    int l = 0;
    int n = 0;
    double nu = 0.0;
    MethodValue naive_fd, naive_shoot, bdd_fd, bdd_shoot;
    double naive_closed = 0.0;

    /// E_fd - E_shoot per ordering.
    std::optional<double> naive_method_gap, bdd_method_gap;
    /// E_bdd - E_naive from the extrapolated FD values.
    std::optional<double> ordering_gap;
    /// Sum over orderings of max(FD error estimate, |E_fd - E_shoot|).
    std::optional<double> ordering_gap_error;
    bool naive_reliable = false;
    bool bdd_reliable = false;
    /// ordering_gap > 100 * ordering_gap_error.
    bool orderings_differ = false;
};

/// Allowed |E_fd - E_shoot| before a level is marked unreliable.
double method_tolerance(double fd_error);

struct ComparisonReport {
    ModelParams params;
    std::optional<double> threshold;
    std::vector<Spectrum> spectra;  // naive fd, naive shoot, bdd fd, bdd shoot
    std::vector<LevelRecord> records;
    std::vector<std::string> notes;
};

/// Factual notes attached to every report.
std::vector<std::string> standard_notes(const ModelParams& params);

ComparisonReport compare_orderings(const ModelParams& params, int k, const SolveOptions& options = {});

struct DegeneracyEntry {
    int n = 0;
    int l = 0;
    MethodValue naive_fd, naive_shoot, bdd_fd, bdd_shoot;
};

struct DegeneracyTable {
    double nu = 0.0;
    std::vector<DegeneracyEntry> entries;
    /// max - min of the energies over the (n, l) pairs, per ordering and method.
    double naive_fd_spread = 0.0, naive_shoot_spread = 0.0;
    double bdd_fd_spread = 0.0, bdd_shoot_spread = 0.0;
};

/// (n, l) pairs with 2n + l + N/2 = nu.
std::vector<std::pair<int, int>> degenerate_pairs(int dimension, double nu);

/// Throws AnalysisError("no degenerate pairs") when nu admits fewer than two pairs.
DegeneracyTable degeneracy_split(const ModelParams& base, double nu, const SolveOptions& options = {});

struct AccumulationProfile {
    double threshold = 0.0;
    std::vector<double> energies;  // trusted naive FD levels
    std::vector<double> gaps;      // E_{k+1} - E_k
    std::vector<double> closed_form;
    int requested = 0;
    bool strictly_increasing = false;
    bool below_threshold = false;
    bool gaps_decreasing = false;
};

/// Naive-ordering levels piling up below omega^2/(2 lambda). Throws
/// AnalysisError("threshold unbounded") for lambda = 0.
AccumulationProfile accumulation_profile(const ModelParams& params, int k, const SolveOptions& options = {});

struct ConvergenceLevel {
    int n = 0;
    std::vector<double> energies;  // one per grid
    std::vector<double> orders;    // one per consecutive triple; empty when undefined
    std::string failure;           // "order undefined" or solver failure
};

struct ConvergenceStudy {
    Ordering ordering;
    Method method;
    double r_max = 0.0;
    std::vector<int> grid_points;
    std::vector<ConvergenceLevel> levels;
};

/// Observed order log2(|E_h - E_h/2| / |E_h/2 - E_h/4|) over grids whose spacing
/// halves exactly (M_{i+1} + 1 = 2 (M_i + 1)). `grids` needs at least three entries.
ConvergenceStudy convergence_order(const ModelParams& params, Ordering ordering, Method method,
                                   const std::vector<int>& grids, int k = 1,
                                   std::optional<double> r_max = std::nullopt);

/// log2 ratios of successive differences of energies on halving grids; empty
/// when any difference is below 1e-13 (already converged, order undefined).
std::optional<std::vector<double>> observed_orders(const std::vector<double>& energies);

/// Grid sizes M, 2M+1, 4M+3, ... (count entries).
std::vector<int> halving_grids(int base_points, int count = 3);

}  // namespace pdm
