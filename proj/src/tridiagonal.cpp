#include "pdm/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pdm {

namespace {

constexpr double kDefaultRelTol = 1e-10;
constexpr int kMaxInverseIterations = 8;

double norm2(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

// LU factorisation of (T - shift I) with partial pivoting, LAPACK dgttrf layout.
struct TridiagonalLU {
    std::vector<double> dl, d, du, du2;
    std::vector<std::size_t> ipiv;

    TridiagonalLU(const TridiagonalOperator& T, double shift)
    {
        const std::size_t n = T.size();
        d.resize(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = T.diag[i] - shift;
        dl = T.off;
        du = T.off;
        du2.assign(n > 2 ? n - 2 : 0, 0.0);
        ipiv.resize(n);
        std::iota(ipiv.begin(), ipiv.end(), std::size_t{0});

        const double tiny = std::numeric_limits<double>::epsilon() *
                            std::max(1.0, std::abs(shift));
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (d[i] == 0.0) d[i] = tiny;
                const double fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                const double fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                const double temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                ipiv[i] = i + 1;
            }
        }
        if (n > 0 && d[n - 1] == 0.0) d[n - 1] = tiny;
    }

    void solve(std::vector<double>& b) const
    {
        const std::size_t n = d.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (ipiv[i] == i) {
                b[i + 1] -= dl[i] * b[i];
            } else {
                const double temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (std::size_t j = n >= 2 ? n - 2 : 0; j-- > 0;)
            b[j] = (b[j] - du[j] * b[j + 1] - du2[j] * b[j + 2]) / d[j];
    }
};

std::pair<double, double> gershgorin(const TridiagonalOperator& T)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = T.size();
    for (std::size_t i = 0; i < n; ++i) {
        double radius = 0.0;
        if (i > 0) radius += std::abs(T.off[i - 1]);
        if (i + 1 < n) radius += std::abs(T.off[i]);
        lo = std::min(lo, T.diag[i] - radius);
        hi = std::max(hi, T.diag[i] + radius);
    }
    const double pad = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    return {lo - pad, hi + pad};
}

}  // namespace

std::vector<double> TridiagonalOperator::apply(std::span<const double> x) const
{
    const std::size_t n = size();
    if (x.size() != n) throw std::invalid_argument("dimension mismatch in tridiagonal apply");
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag[i] * x[i];
        if (i > 0) s += off[i - 1] * x[i - 1];
        if (i + 1 < n) s += off[i] * x[i + 1];
        y[i] = s;
    }
    return y;
}

void TridiagonalOperator::validate() const
{
    if (diag.empty()) throw std::invalid_argument("empty tridiagonal operator");
    if (off.size() + 1 != diag.size()) throw std::invalid_argument("off-diagonal length must be n - 1");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(diag.begin(), diag.end(), finite) || !std::all_of(off.begin(), off.end(), finite))
        throw std::invalid_argument("tridiagonal operator has non-finite entries");
}

void GeneralizedProblem::validate() const
{
    A.validate();
    if (b.size() != A.size()) throw std::invalid_argument("weight length must match operator size");
    for (double w : b)
        if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weight entries must be positive");
}

std::vector<double> StandardReduction::back_map(std::span<const double> y) const
{
    std::vector<double> x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = y[i] * inv_sqrt_b[i];
    return x;
}

StandardReduction reduce_to_standard(const GeneralizedProblem& gp)
{
    gp.validate();
    const std::size_t n = gp.A.size();
    StandardReduction out;
    out.inv_sqrt_b.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.inv_sqrt_b[i] = 1.0 / std::sqrt(gp.b[i]);
    out.C.diag.resize(n);
    out.C.off.resize(n - 1);
    for (std::size_t i = 0; i < n; ++i) out.C.diag[i] = gp.A.diag[i] / gp.b[i];
    for (std::size_t i = 0; i + 1 < n; ++i)
        out.C.off[i] = gp.A.off[i] / std::sqrt(gp.b[i] * gp.b[i + 1]);
    return out;
}

std::size_t sturm_count(const TridiagonalOperator& T, double sigma)
{
    const std::size_t n = T.size();
    const double safe_min = std::numeric_limits<double>::min();
    std::size_t count = 0;
    double q = T.diag[0] - sigma;
    for (std::size_t i = 0;;) {
        if (std::abs(q) < safe_min) q = -safe_min;
        if (q < 0.0) ++count;
        if (++i == n) break;
        q = T.diag[i] - sigma - T.off[i - 1] * T.off[i - 1] / q;
    }
    return count;
}

double default_eigen_tolerance(double value)
{
    return kDefaultRelTol * std::max(1.0, std::abs(value));
}

std::vector<Eigenpair> lowest_eigenpairs(const TridiagonalOperator& T, std::size_t k, double tol)
{
    T.validate();
    const std::size_t n = T.size();
    if (k > n) throw std::invalid_argument("requested more eigenpairs than the operator dimension");
    const double rel_tol = tol > 0.0 ? tol : kDefaultRelTol;

    const auto [glo, ghi] = gershgorin(T);
    std::vector<Eigenpair> out;
    out.reserve(k);

    // Residual attainable in floating point for a unit vector.
    const double rounding_floor = 10.0 * std::sqrt(static_cast<double>(n)) *
                                  std::numeric_limits<double>::epsilon() * std::max(std::abs(glo), std::abs(ghi));

    double lower = glo;
    for (std::size_t j = 0; j < k; ++j) {
        // Invariant: count(lo) <= j < count(hi).
        double lo = lower;
        double hi = ghi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) break;
            if (sturm_count(T, mid) > j)
                hi = mid;
            else
                lo = mid;
        }
        Eigenpair pair;
        pair.index = j;
        pair.value = 0.5 * (lo + hi);
        lower = lo;

        const double width = std::max(rel_tol * std::max(1.0, std::abs(pair.value)), rounding_floor);
        // Shift slightly off the eigenvalue so the factorisation stays nonsingular.
        const double shift = pair.value + 4.0 * std::numeric_limits<double>::epsilon() *
                                              std::max(1.0, std::abs(pair.value));
        const TridiagonalLU lu(T, shift);
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3 * j);
        double residual = std::numeric_limits<double>::infinity();
        for (int it = 0; it < kMaxInverseIterations; ++it) {
            lu.solve(x);
            const double nx = norm2(x);
            if (!std::isfinite(nx) || nx == 0.0) break;
            for (double& v : x) v /= nx;
            const auto Tx = T.apply(x);
            double r2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) r2 += (Tx[i] - pair.value * x[i]) * (Tx[i] - pair.value * x[i]);
            residual = std::sqrt(r2);
            if (residual <= width && it >= 1) break;
        }
        // Deterministic sign: first significant component positive.
        const auto first = std::find_if(x.begin(), x.end(), [](double v) { return std::abs(v) > 1e-8; });
        if (first != x.end() && *first < 0.0)
            for (double& v : x) v = -v;
        pair.vector = std::move(x);
        pair.residual = residual;
        pair.converged = std::isfinite(residual) && residual <= 1e3 * width;
        if (!pair.converged) pair.failure = "not converged";
        out.push_back(std::move(pair));
    }
    return out;
}

}  // namespace pdm
