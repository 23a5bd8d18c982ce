#include "pdm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <tuple>

namespace pdm {

namespace {

constexpr double kInequivalenceFactor = 100.0;
constexpr double kOrderFloor = 1e-13;

MethodValue value_of(const Spectrum& spectrum, int n)
{
    MethodValue v;
    if (n >= static_cast<int>(spectrum.levels.size())) {
        v.failure = "level not computed";
        return v;
    }
    const auto& level = spectrum.levels[n];
    if (level.converged) v.energy = level.energy;
    v.error = level.error_estimate;
    v.trusted = level.trusted;
    v.failure = level.failure;
    return v;
}

Spectrum solve(const ModelParams& params, Ordering ordering, Method method, int k, const SolveOptions& options)
{
    if (method == Method::FiniteDifference)
        return refine_and_extrapolate(params, ordering, k, options.overrides, options.fd_tol);
    return shoot_spectrum(params, ordering, k, options.overrides, options.shoot_tol);
}

// Cross-method check for one ordering; clears both trust flags when the methods disagree.
std::optional<double> reconcile(MethodValue& fd, MethodValue& shoot, bool& reliable)
{
    reliable = false;
    if (!fd.energy || !shoot.energy) {
        fd.trusted = shoot.trusted = false;
        return std::nullopt;
    }
    const double gap = *fd.energy - *shoot.energy;
    reliable = std::abs(gap) <= method_tolerance(fd.error);
    if (!reliable) fd.trusted = shoot.trusted = false;
    return gap;
}

double spread(const std::vector<DegeneracyEntry>& entries, MethodValue DegeneracyEntry::*field)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& e : entries) {
        const auto& v = e.*field;
        if (!v.energy) return std::numeric_limits<double>::quiet_NaN();
        lo = std::min(lo, *v.energy);
        hi = std::max(hi, *v.energy);
    }
    return hi - lo;
}

}  // namespace

double method_tolerance(double fd_error) { return std::max(1e-7, 3.0 * fd_error); }

std::vector<std::string> standard_notes(const ModelParams& params)
{
    std::vector<std::string> notes;
    notes.emplace_back("hbar = 1; lambda and omega carry the units.");
    if (const auto t = continuum_threshold(params)) {
        std::ostringstream s;
        s.precision(17);
        s << "continuum threshold omega^2/(2 lambda) = " << *t
          << "; levels within the trust margin of it are flagged untrusted.";
        notes.push_back(s.str());
    } else {
        notes.emplace_back("continuum threshold unbounded (lambda = 0, constant mass).");
    }
    notes.emplace_back(
        "In the naive Hamiltonian the kinetic term is divided by m(r) = 1 + lambda r^2 while the potential "
        "omega^2 r^2 / (2 m(r)) has a spring constant scaled by 1/m(r), so the two terms use reciprocal mass "
        "profiles; only the two orderings are modelled, no mass-consistent variant.");
    notes.emplace_back("m(r) grows without bound as r -> infinity for lambda > 0.");
    return notes;
}

ComparisonReport compare_orderings(const ModelParams& params, int k, const SolveOptions& options)
{
    ComparisonReport report{params, continuum_threshold(params), {}, {}, standard_notes(params)};
    for (auto ordering : {Ordering::Naive, Ordering::BenDanielDuke})
        for (auto method : {Method::FiniteDifference, Method::Shooting})
            report.spectra.push_back(solve(params, ordering, method, k, options));

    for (int n = 0; n < k; ++n) {
        LevelRecord rec;
        rec.l = params.ell();
        rec.n = n;
        rec.nu = params.nu(n);
        rec.naive_fd = value_of(report.spectra[0], n);
        rec.naive_shoot = value_of(report.spectra[1], n);
        rec.bdd_fd = value_of(report.spectra[2], n);
        rec.bdd_shoot = value_of(report.spectra[3], n);
        rec.naive_closed = naive_closed_form_energy(n, params);
        rec.naive_method_gap = reconcile(rec.naive_fd, rec.naive_shoot, rec.naive_reliable);
        rec.bdd_method_gap = reconcile(rec.bdd_fd, rec.bdd_shoot, rec.bdd_reliable);
        if (rec.naive_fd.energy && rec.bdd_fd.energy && rec.naive_method_gap && rec.bdd_method_gap) {
            rec.ordering_gap = *rec.bdd_fd.energy - *rec.naive_fd.energy;
            rec.ordering_gap_error = std::max(rec.naive_fd.error, std::abs(*rec.naive_method_gap)) +
                                     std::max(rec.bdd_fd.error, std::abs(*rec.bdd_method_gap));
            rec.orderings_differ = std::abs(*rec.ordering_gap) > kInequivalenceFactor * *rec.ordering_gap_error;
        }
        report.records.push_back(std::move(rec));
    }
    std::sort(report.records.begin(), report.records.end(),
              [](const LevelRecord& a, const LevelRecord& b) { return std::tie(a.l, a.n) < std::tie(b.l, b.n); });
    return report;
}

std::vector<std::pair<int, int>> degenerate_pairs(int dimension, double nu)
{
    // 2n + l = nu - N/2 must be a non-negative integer.
    const double rest = nu - 0.5 * dimension;
    const double rounded = std::round(rest);
    std::vector<std::pair<int, int>> pairs;
    if (rest < 0.0 || std::abs(rest - rounded) > 1e-12) return pairs;
    const int total = static_cast<int>(rounded);
    for (int n = 0; 2 * n <= total; ++n) pairs.emplace_back(n, total - 2 * n);
    return pairs;
}

DegeneracyTable degeneracy_split(const ModelParams& base, double nu, const SolveOptions& options)
{
    const auto pairs = degenerate_pairs(base.dimension(), nu);
    if (pairs.size() < 2) throw AnalysisError("no degenerate pairs");

    DegeneracyTable table;
    table.nu = nu;
    for (const auto& [n, l] : pairs) {
        const auto params = base.with_ell(l);
        const int k = n + 1;
        DegeneracyEntry e;
        e.n = n;
        e.l = l;
        e.naive_fd = value_of(solve(params, Ordering::Naive, Method::FiniteDifference, k, options), n);
        e.naive_shoot = value_of(solve(params, Ordering::Naive, Method::Shooting, k, options), n);
        e.bdd_fd = value_of(solve(params, Ordering::BenDanielDuke, Method::FiniteDifference, k, options), n);
        e.bdd_shoot = value_of(solve(params, Ordering::BenDanielDuke, Method::Shooting, k, options), n);
        table.entries.push_back(std::move(e));
    }
    table.naive_fd_spread = spread(table.entries, &DegeneracyEntry::naive_fd);
    table.naive_shoot_spread = spread(table.entries, &DegeneracyEntry::naive_shoot);
    table.bdd_fd_spread = spread(table.entries, &DegeneracyEntry::bdd_fd);
    table.bdd_shoot_spread = spread(table.entries, &DegeneracyEntry::bdd_shoot);
    return table;
}

AccumulationProfile accumulation_profile(const ModelParams& params, int k, const SolveOptions& options)
{
    const auto threshold = continuum_threshold(params);
    if (!threshold) throw AnalysisError("threshold unbounded");

    AccumulationProfile profile;
    profile.threshold = *threshold;
    profile.requested = k;
    const auto spectrum = refine_and_extrapolate(params, Ordering::Naive, k, options.overrides, options.fd_tol);
    for (const auto& level : spectrum.levels) {
        if (!level.trusted) break;
        profile.energies.push_back(level.energy);
    }
    for (int n = 0; n < k; ++n) profile.closed_form.push_back(naive_closed_form_energy(n, params));
    for (std::size_t i = 1; i < profile.energies.size(); ++i)
        profile.gaps.push_back(profile.energies[i] - profile.energies[i - 1]);

    const auto& e = profile.energies;
    const auto& g = profile.gaps;
    profile.strictly_increasing = std::adjacent_find(e.begin(), e.end(), std::greater_equal<>()) == e.end();
    profile.below_threshold =
        std::all_of(e.begin(), e.end(), [&](double v) { return v < profile.threshold; });
    profile.gaps_decreasing = std::adjacent_find(g.begin(), g.end(), std::less_equal<>()) == g.end();
    return profile;
}

std::optional<std::vector<double>> observed_orders(const std::vector<double>& energies)
{
    std::vector<double> orders;
    for (std::size_t i = 0; i + 2 < energies.size(); ++i) {
        const double d1 = std::abs(energies[i] - energies[i + 1]);
        const double d2 = std::abs(energies[i + 1] - energies[i + 2]);
        if (d1 < kOrderFloor || d2 < kOrderFloor) return std::nullopt;
        orders.push_back(std::log2(d1 / d2));
    }
    return orders;
}

std::vector<int> halving_grids(int base_points, int count)
{
    std::vector<int> grids{base_points};
    for (int i = 1; i < count; ++i) grids.push_back(2 * grids.back() + 1);
    return grids;
}

ConvergenceStudy convergence_order(const ModelParams& params, Ordering ordering, Method method,
                                   const std::vector<int>& grids, int k, std::optional<double> r_max)
{
    if (grids.size() < 3) throw std::invalid_argument("convergence study needs at least three grids");
    for (std::size_t i = 1; i < grids.size(); ++i)
        if (grids[i] + 1 != 2 * (grids[i - 1] + 1))
            throw std::invalid_argument("grid spacings must halve exactly (M' + 1 = 2 (M + 1))");

    ConvergenceStudy study{ordering, method, r_max.value_or(default_r_max(params, k)), grids, {}};
    std::vector<Spectrum> runs;
    for (int points : grids) {
        const RadialGrid grid(study.r_max, points, params.origin_condition());
        // Tight tolerances so the solver width sits far below the discretisation error.
        runs.push_back(method == Method::FiniteDifference ? solve_fd(params, ordering, grid, k, 1e-15)
                                                          : shoot_on_grid(params, ordering, grid, k, 1e-14));
    }
    for (int n = 0; n < k; ++n) {
        ConvergenceLevel level;
        level.n = n;
        for (const auto& run : runs) {
            const auto& lv = run.levels[n];
            if (!lv.converged && level.failure.empty()) level.failure = lv.failure;
            level.energies.push_back(lv.energy);
        }
        if (level.failure.empty()) {
            if (auto orders = observed_orders(level.energies)) level.orders = std::move(*orders);
            else level.failure = "order undefined";
        }
        study.levels.push_back(std::move(level));
    }
    return study;
}

}  // namespace pdm
