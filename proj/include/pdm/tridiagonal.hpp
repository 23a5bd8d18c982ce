#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pdm {

/// Symmetric tridiagonal matrix: diag has n entries, off has n - 1.
struct TridiagonalOperator {
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const { return diag.size(); }
    /// y = T x
    std::vector<double> apply(std::span<const double> x) const;
    /// Throws std::invalid_argument on shape mismatch or non-finite entries.
    void validate() const;
};

/// A x = E diag(b) x with b > 0.
struct GeneralizedProblem {
    TridiagonalOperator A;
    std::vector<double> b;

    void validate() const;
};

/// Congruence C = B^{-1/2} A B^{-1/2}; eigenvectors map back through x = B^{-1/2} y.
struct StandardReduction {
    TridiagonalOperator C;
    std::vector<double> inv_sqrt_b;

    std::vector<double> back_map(std::span<const double> y) const;
};

StandardReduction reduce_to_standard(const GeneralizedProblem& gp);

/// Number of eigenvalues of T strictly below sigma (Sturm sequence of the LDL^T pivots).
std::size_t sturm_count(const TridiagonalOperator& T, double sigma);

struct Eigenpair {
    std::size_t index = 0;
    double value = 0.0;
    std::vector<double> vector;  // unit 2-norm
    double residual = 0.0;       // ||T x - value x|| for the unit vector x
    bool converged = false;
    std::string failure;
};

/// Default bisection width for an eigenvalue near `value`.
double default_eigen_tolerance(double value);

/// The k algebraically smallest eigenpairs: bisection on Sturm counts, each
/// eigenvalue to width <= tol * max(1, |value|) (tol <= 0 selects the default
/// relative width 1e-10), eigenvectors by inverse iteration. A level whose
/// residual stays above 1e3 times its width (never below the rounding level
/// ~ sqrt(n) eps ||T||) is returned with converged = false.
std::vector<Eigenpair> lowest_eigenpairs(const TridiagonalOperator& T, std::size_t k, double tol = 0.0);

}  // namespace pdm
