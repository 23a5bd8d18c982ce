#pragma once

// Radial model for a particle with position-dependent mass m(r) = 1 + lambda r^2
// in an N-dimensional oscillator potential, hbar = 1.

#include <optional>
#include <string_view>

namespace pdm {

/// Which kinetic-energy operator is in force.
///   Naive          (1/m) Laplacian, applied literally.
///   BenDanielDuke  div (1/m) grad.
enum class Ordering { Naive, BenDanielDuke };

std::string_view to_string(Ordering ordering);
std::optional<Ordering> parse_ordering(std::string_view text);

/// Behaviour of the regular radial solution R(r) at r = 0.
///   Vanishing   R ~ r^s with s >= 1 (pinned to zero).
///   Reflecting  R ~ r^0, R'(0) = 0 (only N = 1, l = 0).
///   SquareRoot  R ~ r^{1/2} (eta = 0, only N = 2, l = 0); finite differences
///               work with F = r^{-1/2} R, which is even and nonzero at r = 0.
enum class OriginCondition { Vanishing, Reflecting, SquareRoot };

struct MassValue {
    double m;
    double m_prime;
    double m_double_prime;
};

/// Physical inputs. Validated on construction; negative lambda is rejected.
class ModelParams {
public:
    ModelParams(int dimension, int ell, double lambda, double omega, int levels = 1);

    int dimension() const { return dimension_; }
    int ell() const { return ell_; }
    double lambda() const { return lambda_; }
    double omega() const { return omega_; }
    int levels() const { return levels_; }
    static constexpr double hbar = 1.0;

    /// |l - 1 + N/2|
    double eta() const;
    /// l + (N-1)/2: small-r exponent of the regular radial solution.
    double origin_exponent() const;
    OriginCondition origin_condition() const;
    /// True for eta < 1/2, where the -1/(4 r^2) tail degrades uniform-grid accuracy.
    bool reduced_accuracy_boundary() const;
    /// Oscillator label nu = 2n + l + N/2.
    double nu(int n) const;

    /// Copy with a different lambda / l (used by sweeps and degeneracy tables).
    ModelParams with_lambda(double lambda) const;
    ModelParams with_ell(int ell) const;
    ModelParams with_levels(int levels) const;

private:
    int dimension_;
    int ell_;
    double lambda_;
    double omega_;
    int levels_;
};

double eta(int ell, int dimension);

MassValue mass_eval(double r, double lambda);

/// omega^2 r^2 / (2 (1 + lambda r^2))
double potential_eval(double r, const ModelParams& params);

/// omega^2 / (2 lambda); empty when lambda == 0 (potential unbounded).
std::optional<double> continuum_threshold(const ModelParams& params);

/// Closed-form energy of the naive ordering: E = nu sqrt(omega^2 + lambda^2 nu^2) - lambda nu^2.
double naive_closed_form_energy(int n, const ModelParams& params);

enum class Formulation {
    /// -v'' + W v = 2 m E v, v = m^{-1/2} R (BDD) or v = R (naive).
    LiouvilleStandardWeight,
    /// -(p R')' + U R = 2 E R with p = 1/m.
    SturmLiouville,
    /// -R'' + W R = 2 m E R for the naive ordering.
    NaiveGeneralized,
};

/// Coefficient functions of one exact rewriting of the radial equation.
///
/// The centrifugal part is kept separate, W(r) = c / r^2 + smooth(r), so that
/// series starts at the origin can use smooth(0) and c = 0 never yields 0 * inf.
class EffectiveRadialForm {
public:
    EffectiveRadialForm(ModelParams params, Ordering ordering, Formulation formulation);

    const ModelParams& params() const { return params_; }
    Ordering ordering() const { return ordering_; }
    Formulation formulation() const { return formulation_; }

    /// eta^2 - 1/4
    double centrifugal() const { return centrifugal_; }

    /// Liouville / naive forms: W(r).
    double W(double r) const;
    /// W(r) - c/r^2, finite at r = 0.
    double W_smooth(double r) const;

    /// Sturm-Liouville form: U(r) and p(r) = 1/m(r).
    double U(double r) const;
    double p(double r) const;

    /// Weight in the eigen-relation: 2m for the Liouville and naive forms
    /// (eigenvalue E), 1 for the Sturm-Liouville form (eigenvalue 2E).
    double weight(double r) const;

    /// True when the dependent variable is v = m^{-1/2} R rather than R itself.
    bool liouville_scaled() const;

private:
    ModelParams params_;
    Ordering ordering_;
    Formulation formulation_;
    double centrifugal_;
};

EffectiveRadialForm naive_form(const ModelParams& params);
EffectiveRadialForm bdd_sturm_liouville_form(const ModelParams& params);
EffectiveRadialForm bdd_liouville_form(const ModelParams& params);

/// Second-order form consumed by the shooting solver for a given ordering.
EffectiveRadialForm liouville_form(const ModelParams& params, Ordering ordering);

}  // namespace pdm
