#include "pdm/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pdm {

namespace {

// Gaussian decay exponent required at r_max for the highest level.
constexpr double kDecayExponent = 45.0;
// WKB tunnelling action required between the outer turning point and r_max.
constexpr double kTailAction = 36.0;

// Integral of sqrt(r^2 - a^2) from a to R.
double tail_integral(double R, double a)
{
    const double s = std::sqrt(std::max(R * R - a * a, 0.0));
    return 0.5 * R * s - 0.5 * a * a * std::log((R + s) / a);
}

}  // namespace

RadialGrid::RadialGrid(double r_max, int interior_points, OriginCondition origin)
    : r_max_(r_max), interior_points_(interior_points), origin_(origin)
{
    if (!(r_max > 0.0) || !std::isfinite(r_max)) throw std::invalid_argument("r_max must be > 0");
    if (interior_points < kMinGridPoints)
        throw std::invalid_argument("grid_points must be ≥ " + std::to_string(kMinGridPoints));
}

std::size_t RadialGrid::size() const
{
    return static_cast<std::size_t>(interior_points_) + (has_origin_node() ? 1 : 0);
}

double RadialGrid::r(std::size_t j) const
{
    const std::size_t first = has_origin_node() ? 0 : 1;
    return static_cast<double>(j + first) * h();
}

std::vector<double> RadialGrid::nodes() const
{
    std::vector<double> out(size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = r(j);
    return out;
}

RadialGrid RadialGrid::refined() const { return {r_max_, 2 * interior_points_ + 1, origin_}; }

RadialGrid RadialGrid::with_points(int interior_points) const { return {r_max_, interior_points, origin_}; }

double default_r_max(const ModelParams& params, int k_levels)
{
    if (k_levels < 1) throw std::invalid_argument("levels must be ≥ 1");
    const double w2 = params.omega() * params.omega();
    const double e_hat = naive_closed_form_energy(k_levels - 1, params);
    if (const auto threshold = continuum_threshold(params); threshold && e_hat >= kContinuumFraction * *threshold) {
        std::ostringstream msg;
        msg << "level likely in continuum: estimate " << e_hat << " for level " << (k_levels - 1)
            << " is within " << (1.0 - kContinuumFraction) * 100 << "% of threshold " << *threshold;
        throw ContinuumError(msg.str());
    }
    const double omega_eff2 = w2 - 2.0 * params.lambda() * e_hat;

    const double decay_rate = std::sqrt(std::max(omega_eff2, 0.25 * w2));
    const double r_gauss = std::sqrt(2.0 * kDecayExponent / decay_rate);

    // Beyond the outer turning point r_t of Omega^2 r^2 = 2E the solution decays as
    // exp(-Omega * tail_integral); make that action large enough.
    const double omega_eff = std::sqrt(omega_eff2);
    const double r_turn = std::sqrt(2.0 * e_hat) / omega_eff;
    double lo = r_turn;
    double hi = 2.0 * r_turn + 1.0;
    while (omega_eff * tail_integral(hi, r_turn) < kTailAction) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (omega_eff * tail_integral(mid, r_turn) < kTailAction ? lo : hi) = mid;
    }
    return std::max(r_gauss, hi);
}

RadialGrid build_grid(const ModelParams& params, int k_levels, const GridOverrides& overrides)
{
    const double r_max = overrides.r_max ? *overrides.r_max : default_r_max(params, k_levels);
    const int points = overrides.interior_points.value_or(kDefaultGridPoints);
    return {r_max, points, params.origin_condition()};
}

namespace {

// Finite volumes for -(P F')' + Q F = mu w F on the cells around r_i = i h,
// origin cell [0, h/2]; each row divided by h.
template <class Flux, class Source, class Density>
GeneralizedProblem assemble_cylindrical(const RadialGrid& grid, Flux P, Source Q, Density w)
{
    const std::size_t n = grid.size();
    const double h = grid.h();
    const double h2 = h * h;
    GeneralizedProblem gp;
    gp.A.diag.resize(n);
    gp.A.off.resize(n - 1);
    gp.b.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid.r(j);
        const double p_plus = P(r + 0.5 * h);
        if (j == 0) {
            // Cell [0, h/2], integrals of Q and w by the midpoint rule.
            gp.A.diag[j] = p_plus / h2 + 0.5 * Q(0.25 * h);
            gp.b[j] = 0.5 * w(0.25 * h);
        } else {
            gp.A.diag[j] = (P(r - 0.5 * h) + p_plus) / h2 + Q(r);
            gp.b[j] = w(r);
        }
        if (j + 1 < n) gp.A.off[j] = -p_plus / h2;
    }
    return gp;
}

void require_square_root_case(const ModelParams& params)
{
    if (params.dimension() != 2 || params.ell() != 0)
        throw std::logic_error("square-root origin treatment is specific to N = 2, l = 0");
}

}  // namespace

GeneralizedProblem assemble_bdd(const RadialGrid& grid, const ModelParams& params)
{
    if (grid.origin() == OriginCondition::SquareRoot) {
        require_square_root_case(params);
        const double lam = params.lambda();
        return assemble_cylindrical(
            grid, [lam](double r) { return r / (1.0 + lam * r * r); },
            [&params](double r) { return 2.0 * potential_eval(r, params) * r; }, [](double r) { return r; });
    }
    const auto form = bdd_sturm_liouville_form(params);
    const std::size_t n = grid.size();
    const double h = grid.h();
    const double h2 = h * h;
    GeneralizedProblem gp;
    gp.A.diag.resize(n);
    gp.A.off.resize(n - 1);
    gp.b.assign(n, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid.r(j);
        const double p_plus = form.p(r + 0.5 * h);
        if (r == 0.0) {
            // Mirror node R_{-1} = R_1, row scaled by 1/2 to keep the matrix symmetric.
            gp.A.diag[j] = p_plus / h2 + 0.5 * form.U(0.0);
            gp.b[j] = 0.5;
        } else {
            const double p_minus = form.p(r - 0.5 * h);
            gp.A.diag[j] = (p_minus + p_plus) / h2 + form.U(r);
        }
        if (j + 1 < n) gp.A.off[j] = -p_plus / h2;
    }
    return gp;
}

GeneralizedProblem assemble_naive(const RadialGrid& grid, const ModelParams& params)
{
    if (grid.origin() == OriginCondition::SquareRoot) {
        require_square_root_case(params);
        const double w2 = params.omega() * params.omega();
        const double lam = params.lambda();
        return assemble_cylindrical(
            grid, [](double r) { return r; }, [w2](double r) { return w2 * r * r * r; },
            [lam](double r) { return 2.0 * (1.0 + lam * r * r) * r; });
    }
    const auto form = naive_form(params);
    const std::size_t n = grid.size();
    const double h2 = grid.h() * grid.h();
    GeneralizedProblem gp;
    gp.A.diag.resize(n);
    gp.A.off.assign(n - 1, -1.0 / h2);
    gp.b.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double r = grid.r(j);
        if (r == 0.0) {
            gp.A.diag[j] = 1.0 / h2 + 0.5 * form.W(0.0);
            gp.b[j] = 0.5 * form.weight(0.0);
        } else {
            gp.A.diag[j] = 2.0 / h2 + form.W(r);
            gp.b[j] = form.weight(r);
        }
    }
    return gp;
}

std::vector<double> radial_samples(const RadialGrid& grid, std::span<const double> unknowns)
{
    std::vector<double> R(unknowns.begin(), unknowns.end());
    if (grid.origin() == OriginCondition::SquareRoot)
        for (std::size_t j = 0; j < R.size(); ++j) R[j] *= std::sqrt(grid.r(j));
    double s = 0.0;
    for (std::size_t j = 0; j < R.size(); ++j) s += (grid.r(j) == 0.0 ? 0.5 : 1.0) * R[j] * R[j];
    const double nrm = std::sqrt(s * grid.h());
    for (double& v : R) v /= nrm;
    return R;
}

std::string_view to_string(Method method)
{
    return method == Method::FiniteDifference ? "fd" : "shoot";
}

bool Spectrum::all_converged() const
{
    return std::all_of(levels.begin(), levels.end(), [](const Level& l) { return l.converged; });
}

double continuum_margin(double threshold, double error_estimate)
{
    return std::max(10.0 * error_estimate, 1e-6 * threshold);
}

Spectrum solve_fd(const ModelParams& params, Ordering ordering, const RadialGrid& grid, int k, double tol)
{
    if (k < 1) throw std::invalid_argument("levels must be ≥ 1");
    if (static_cast<std::size_t>(k) > grid.size()) throw std::invalid_argument("more levels than grid unknowns");
    const auto gp = ordering == Ordering::Naive ? assemble_naive(grid, params) : assemble_bdd(grid, params);
    const auto reduced = reduce_to_standard(gp);
    const auto pairs = lowest_eigenpairs(reduced.C, static_cast<std::size_t>(k), tol);
    // The divergence form carries eigenvalue 2E.
    const double to_energy = ordering == Ordering::Naive ? 1.0 : 0.5;
    const auto threshold = continuum_threshold(params);

    Spectrum spec{params, ordering, Method::FiniteDifference, grid, params.reduced_accuracy_boundary(), {}};
    for (const auto& pair : pairs) {
        Level level;
        level.n = static_cast<int>(pair.index);
        level.energy = to_energy * pair.value;
        level.converged = pair.converged;
        level.failure = pair.failure;

        auto x = reduced.back_map(pair.vector);
        const auto Ax = gp.A.apply(x);
        double r2 = 0.0, x2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double d = Ax[i] - pair.value * gp.b[i] * x[i];
            r2 += d * d;
            x2 += x[i] * x[i];
        }
        level.residual = std::sqrt(r2 / x2);

        level.samples = radial_samples(grid, x);
        level.trusted = level.converged && (!threshold || level.energy < *threshold - continuum_margin(*threshold, 0.0));
        spec.levels.push_back(std::move(level));
    }
    return spec;
}

RichardsonEstimate richardson(double coarse, double fine, int order)
{
    const double factor = std::ldexp(1.0, order) - 1.0;
    return {fine + (fine - coarse) / factor, std::abs(fine - coarse) / factor};
}

Spectrum refine_and_extrapolate(const ModelParams& params, Ordering ordering, int k,
                                const GridOverrides& overrides, double tol)
{
    const auto grid = build_grid(params, k, overrides);
    const auto coarse = solve_fd(params, ordering, grid, k, tol);
    auto fine = solve_fd(params, ordering, grid.refined(), k, tol);
    const auto threshold = continuum_threshold(params);
    for (std::size_t i = 0; i < fine.levels.size(); ++i) {
        auto& level = fine.levels[i];
        const auto& c = coarse.levels[i];
        const auto est = richardson(c.energy, level.energy);
        level.energy = est.value;
        level.error_estimate = est.error;
        level.converged = level.converged && c.converged;
        if (level.failure.empty()) level.failure = c.failure;
        level.trusted = level.converged &&
                        (!threshold || level.energy < *threshold - continuum_margin(*threshold, est.error));
    }
    return fine;
}

}  // namespace pdm
