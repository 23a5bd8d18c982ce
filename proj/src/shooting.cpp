#include "pdm/shooting.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace pdm {

namespace {

constexpr double kRescaleAbove = 1e200;
constexpr double kRescaleFactor = 1e-200;
constexpr int kMaxBisections = 400;
constexpr int kSeriesStartNodes = 32;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

struct Sweep {
    std::vector<double> out;  // outward solution, nodes 0..M+1
    std::vector<double> in;   // inward solution, nodes m..M (rest zero)
    std::vector<double> g;    // h^2 f / 12 at nodes 0..M+1
    int node_count = 0;
    int match = 0;
    double mismatch = 0.0;
};

// Numerov: (1 - g_{i+1}) v_{i+1} = 2 (1 + 5 g_i) v_i - (1 - g_{i-1}) v_{i-1}
Sweep run_sweep(const ShootSpec& spec, double energy, std::optional<int> match_index, bool keep_inward)
{
    const int last = spec.last_node();  // M + 1
    const int M = last - 1;
    const double h = spec.grid().h();
    const bool reflecting = spec.grid().origin() == OriginCondition::Reflecting;
    const double c = spec.form().centrifugal();

    Sweep s;
    s.g.assign(last + 1, 0.0);
    const int g_first = (reflecting || c == 0.0) ? 0 : 1;
    for (int i = g_first; i <= last; ++i) {
        const double fi = spec.f(i, energy);
        if (!std::isfinite(fi)) throw ShootingError("integration failed: non-finite f at node " + std::to_string(i));
        s.g[i] = h * h * fi / 12.0;
    }
    const auto& g = s.g;

    s.match = match_index ? std::clamp(*match_index, 2, M - 2) : spec.matching_point(energy);

    // Outward.
    auto& v = s.out;
    v.assign(last + 1, 0.0);
    int start = 0;  // first index whose successor comes from the recurrence
    int count_from = 1;
    if (reflecting) {
        // Mirror symmetry v_{-1} = v_1 in the recurrence at i = 0.
        v[0] = 1.0;
        v[1] = (1.0 + 5.0 * g[0]) / (1.0 - g[1]);
        start = 1;
        count_from = 0;
    } else if (c == 0.0) {
        v[0] = 0.0;
        v[1] = 1.0;
        start = 1;
    } else {
        // Regular series v = r^s (1 + a r^2 + b r^4), scaled by h^-s. With the
        // attractive -1/(4 r^2) tail (eta = 0) the first steps are too coarse for
        // Numerov, so the series fills a longer stretch before the recurrence.
        const double sexp = spec.series_exponent();
        const auto& form = spec.form();
        const double f0 = form.W_smooth(0.0) - form.weight(0.0) * energy;
        const double f2 = (form.W_smooth(h) - form.weight(h) * energy - f0) / (h * h);
        const double a = f0 / (4.0 * sexp + 2.0);
        const double b = (f0 * a + f2) / (8.0 * sexp + 12.0);
        start = c > 0.0 ? 2 : std::min(kSeriesStartNodes, M / 4);
        for (int i = 1; i <= start; ++i) {
            const double r2 = (i * h) * (i * h);
            v[i] = std::pow(static_cast<double>(i), sexp) * (1.0 + a * r2 + b * r2 * r2);
        }
    }
    for (int i = start; i < last; ++i) {
        v[i + 1] = (2.0 * (1.0 + 5.0 * g[i]) * v[i] - (1.0 - g[i - 1]) * v[i - 1]) / (1.0 - g[i + 1]);
        if (std::abs(v[i + 1]) > kRescaleAbove)
            for (int j = 0; j <= i + 1; ++j) v[j] *= kRescaleFactor;
    }
    int prev = 0;
    for (int i = count_from; i <= last; ++i) {
        const int sg = sign_of(v[i]);
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++s.node_count;
        prev = sg;
    }

    // Inward from r_max, seeded with the local decaying exponential.
    auto& q = s.in;
    q.assign(last + 1, 0.0);
    const int m = s.match;
    q[M] = 1.0;
    const double f_bar = 6.0 * (g[M] + g[M - 1]) / (h * h);
    q[M - 1] = std::exp(h * std::sqrt(std::max(f_bar, 0.0)));
    const int stop = keep_inward ? m : m + 1;
    for (int i = M - 1; i >= stop; --i) {
        q[i - 1] = (2.0 * (1.0 + 5.0 * g[i]) * q[i] - (1.0 - g[i + 1]) * q[i + 1]) / (1.0 - g[i - 1]);
        if (std::abs(q[i - 1]) > kRescaleAbove)
            for (int j = i - 1; j <= M; ++j) q[j] *= kRescaleFactor;
    }

    const double yo_m = (1.0 - g[m]) * v[m];
    const double yo_n = (1.0 - g[m + 1]) * v[m + 1];
    const double yq_m = (1.0 - g[m]) * q[m];
    const double yq_n = (1.0 - g[m + 1]) * q[m + 1];
    const double no = std::hypot(yo_m, yo_n);
    const double nq = std::hypot(yq_m, yq_n);
    s.mismatch = (yo_m * yq_n - yo_n * yq_m) / (no * nq * h);
    return s;
}

double trapezoid(std::span<const double> y, double h)
{
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += (i == 0 || i + 1 == y.size() ? 0.5 : 1.0) * y[i];
    return s * h;
}

}  // namespace

ShootSpec::ShootSpec(EffectiveRadialForm form, RadialGrid grid)
    : form_(std::move(form)), grid_(grid), series_exponent_(form_.params().origin_exponent())
{
    if (form_.formulation() == Formulation::SturmLiouville)
        throw std::invalid_argument("shooting requires a form without first-derivative terms");
    const int last = last_node();
    const double h = grid_.h();
    W_.resize(last + 1);
    weight_.resize(last + 1);
    for (int i = 0; i <= last; ++i) {
        const double r = i * h;
        W_[i] = (i == 0 && form_.centrifugal() != 0.0) ? std::numeric_limits<double>::quiet_NaN() : form_.W(r);
        weight_[i] = form_.weight(r);
    }
}

double ShootSpec::f(int i, double energy) const { return W_[i] - weight_[i] * energy; }

int ShootSpec::matching_point(double energy) const
{
    const int M = last_node() - 1;
    int m = M / 2;
    for (int i = M; i >= 2; --i) {
        if (f(i - 1, energy) < 0.0 && f(i, energy) >= 0.0) {
            m = i;
            break;
        }
    }
    return std::clamp(m, 2, M - 2);
}

double ShootSpec::energy_floor() const
{
    double lo = std::numeric_limits<double>::infinity();
    for (int i = 1; i < last_node(); ++i) lo = std::min(lo, W_[i] / weight_[i]);
    return lo;
}

ShootSpec make_shoot_spec(const ModelParams& params, Ordering ordering, const RadialGrid& grid)
{
    return {liouville_form(params, ordering), grid};
}

SweepResult numerov_sweep(const ShootSpec& spec, double energy, std::optional<int> match_index)
{
    const auto s = run_sweep(spec, energy, match_index, false);
    return {s.node_count, s.mismatch, s.match};
}

double find_eigenvalue(const ShootSpec& spec, int n_target, EnergyBracket bracket, double tol)
{
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    double lo = bracket.lo;
    double hi = bracket.hi;
    int c_lo = numerov_sweep(spec, lo).node_count;
    int c_hi = numerov_sweep(spec, hi).node_count;
    if (!(lo < hi) || c_lo > n_target || c_hi <= n_target)
        throw ShootingError("bracket invalid: node counts " + std::to_string(c_lo) + ".." +
                            std::to_string(c_hi) + " do not span " + std::to_string(n_target));

    // Isolate the window holding exactly the n_target-node state.
    int it = 0;
    for (; it < kMaxBisections && !(c_lo == n_target && c_hi == n_target + 1); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const int c = numerov_sweep(spec, mid).node_count;
        if (c > n_target) {
            hi = mid;
            c_hi = c;
        } else {
            lo = mid;
            c_lo = c;
        }
    }
    if (!(c_lo == n_target && c_hi == n_target + 1)) throw ShootingError("no convergence: node window not isolated");

    const int match = spec.matching_point(0.5 * (lo + hi));
    auto mismatch = [&](double e) { return numerov_sweep(spec, e, match).mismatch; };
    const double d_lo = mismatch(lo);
    const double d_hi = mismatch(hi);

    if (sign_of(d_lo) * sign_of(d_hi) < 0) {
        boost::uintmax_t max_iter = 200;
        const auto done = [tol](double a, double b) { return std::abs(b - a) <= tol; };
        const auto root = boost::math::tools::toms748_solve(mismatch, lo, hi, d_lo, d_hi, done, max_iter);
        if (std::abs(root.second - root.first) > tol && max_iter >= 200)
            throw ShootingError("no convergence: mismatch refinement stalled");
        return 0.5 * (root.first + root.second);
    }

    // Mismatch without a sign change in the window (inward seed and the box edge
    // disagree); fall back to the node-count transition, i.e. the box eigenvalue.
    for (; it < kMaxBisections && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (numerov_sweep(spec, mid).node_count > n_target ? hi : lo) = mid;
    }
    if (hi - lo > tol && 0.5 * (lo + hi) != lo && 0.5 * (lo + hi) != hi)
        throw ShootingError("no convergence: bisection budget exhausted");
    return 0.5 * (lo + hi);
}

EnergyBracket bracket_level(const ShootSpec& spec, int n_target)
{
    const auto& params = spec.form().params();
    const double floor = spec.energy_floor();
    const double lo = floor - std::max(1.0, std::abs(floor));
    const auto threshold = continuum_threshold(params);
    const double cap = threshold ? *threshold * (1.0 - 1e-12) : std::numeric_limits<double>::infinity();

    double hi = std::min(cap, naive_closed_form_energy(n_target, params) + params.omega());
    for (int it = 0; it < 200; ++it) {
        if (numerov_sweep(spec, hi).node_count > n_target) return {lo, hi};
        if (hi >= cap) break;
        hi = std::min(cap, hi + (hi - lo));
    }
    throw ShootingError("bracket invalid: level " + std::to_string(n_target) +
                        " not found below the continuum threshold");
}

Eigenfunction eigenfunction(const ShootSpec& spec, double energy, double max_mismatch)
{
    const auto s = run_sweep(spec, energy, std::nullopt, true);
    if (!(std::abs(s.mismatch) <= max_mismatch))
        throw ShootingError("not an eigenvalue: derivative mismatch " + std::to_string(s.mismatch));

    const int last = spec.last_node();
    const int m = s.match;
    const double h = spec.grid().h();
    const auto& params = spec.form().params();

    Eigenfunction ef;
    ef.mismatch = s.mismatch;
    ef.v.assign(last + 1, 0.0);
    const double scale = (s.out[m] * s.in[m] + s.out[m + 1] * s.in[m + 1]) /
                         (s.in[m] * s.in[m] + s.in[m + 1] * s.in[m + 1]);
    for (int i = 0; i <= m; ++i) ef.v[i] = s.out[i];
    for (int i = m + 1; i < last; ++i) ef.v[i] = scale * s.in[i];
    ef.v[last] = 0.0;

    ef.r.resize(last + 1);
    std::vector<double> mass(last + 1);
    for (int i = 0; i <= last; ++i) {
        ef.r[i] = i * h;
        mass[i] = mass_eval(ef.r[i], params.lambda()).m;
    }

    const bool scaled = spec.form().liouville_scaled();
    std::vector<double> r2(last + 1);
    for (int i = 0; i <= last; ++i) r2[i] = (scaled ? mass[i] : 1.0) * ef.v[i] * ef.v[i];
    const double nrm = std::sqrt(trapezoid(r2, h));
    const auto first = std::find_if(ef.v.begin(), ef.v.end(), [](double x) { return x != 0.0; });
    const double sign = (first != ef.v.end() && *first < 0.0) ? -1.0 : 1.0;
    for (double& x : ef.v) x *= sign / nrm;

    ef.R.resize(last + 1);
    std::vector<double> v2(last + 1), v2m(last + 1), R2(last + 1);
    for (int i = 0; i <= last; ++i) {
        ef.R[i] = scaled ? std::sqrt(mass[i]) * ef.v[i] : ef.v[i];
        v2[i] = ef.v[i] * ef.v[i];
        v2m[i] = 2.0 * mass[i] * v2[i];
        R2[i] = ef.R[i] * ef.R[i];
    }
    ef.norm_unit = trapezoid(v2, h);
    ef.norm_mass = trapezoid(v2m, h);
    ef.norm_R_from_v = scaled ? 0.5 * ef.norm_mass : ef.norm_unit;
    ef.norm_R_direct = trapezoid(R2, h);

    const double half_dim = 0.5 * (params.dimension() - 1);
    ef.full_radial.resize(last + 1);
    for (int i = 1; i <= last; ++i) ef.full_radial[i] = std::pow(ef.r[i], -half_dim) * ef.R[i];
    // r^l behaviour at the origin: zero for l > 0, even extrapolation for l = 0.
    ef.full_radial[0] = params.ell() > 0 ? 0.0
                        : spec.grid().origin() == OriginCondition::Reflecting
                            ? ef.R[0]
                            : (4.0 * ef.full_radial[1] - ef.full_radial[2]) / 3.0;

    int prev = 0;
    for (int i = 1; i < last; ++i) {
        const int sg = sign_of(ef.v[i]);
        if (sg == 0) continue;
        if (prev != 0 && sg != prev) ++ef.sign_changes;
        prev = sg;
    }
    return ef;
}

Spectrum shoot_on_grid(const ModelParams& params, Ordering ordering, const RadialGrid& grid, int k, double tol)
{
    if (k < 1) throw std::invalid_argument("levels must be ≥ 1");
    const auto spec = make_shoot_spec(params, ordering, grid);
    const auto threshold = continuum_threshold(params);
    Spectrum out{params, ordering, Method::Shooting, grid, params.reduced_accuracy_boundary(), {}};
    for (int n = 0; n < k; ++n) {
        Level level;
        level.n = n;
        try {
            const auto bracket = bracket_level(spec, n);
            level.energy = find_eigenvalue(spec, n, bracket, tol);
            level.residual = std::abs(numerov_sweep(spec, level.energy).mismatch);
            level.converged = true;
            level.trusted = !threshold || level.energy < *threshold - continuum_margin(*threshold, 0.0);
        } catch (const ShootingError& e) {
            level.energy = std::numeric_limits<double>::quiet_NaN();
            level.failure = e.what();
        }
        out.levels.push_back(std::move(level));
    }
    return out;
}

Spectrum shoot_spectrum(const ModelParams& params, Ordering ordering, int k, const GridOverrides& overrides,
                        double tol)
{
    const auto grid = build_grid(params, k, overrides);
    const auto coarse = shoot_on_grid(params, ordering, grid, k, tol);
    auto fine = shoot_on_grid(params, ordering, grid.refined(), k, tol);
    const auto threshold = continuum_threshold(params);
    const auto spec = make_shoot_spec(params, ordering, fine.grid);
    for (std::size_t i = 0; i < fine.levels.size(); ++i) {
        auto& level = fine.levels[i];
        const auto& c = coarse.levels[i];
        if (!c.converged) {
            level.converged = false;
            if (level.failure.empty()) level.failure = c.failure;
        }
        if (!level.converged) {
            level.trusted = false;
            continue;
        }
        level.error_estimate = std::max(std::abs(level.energy - c.energy) / 15.0, tol);
        level.trusted = !threshold || level.energy < *threshold - continuum_margin(*threshold, level.error_estimate);
        try {
            const auto ef = eigenfunction(spec, level.energy);
            level.samples.assign(ef.R.begin() + (fine.grid.has_origin_node() ? 0 : 1),
                                 ef.R.end() - 1);
        } catch (const ShootingError& e) {
            level.converged = false;
            level.trusted = false;
            level.failure = e.what();
        }
    }
    return fine;
}

}  // namespace pdm
