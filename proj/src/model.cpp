#include "pdm/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pdm {

std::string_view to_string(Ordering ordering)
{
    return ordering == Ordering::Naive ? "naive" : "bdd";
}

std::optional<Ordering> parse_ordering(std::string_view text)
{
    if (text == "naive") return Ordering::Naive;
    if (text == "bdd") return Ordering::BenDanielDuke;
    return std::nullopt;
}

ModelParams::ModelParams(int dimension, int ell, double lambda, double omega, int levels)
    : dimension_(dimension), ell_(ell), lambda_(lambda), omega_(omega), levels_(levels)
{
    if (dimension < 1) throw std::invalid_argument("dim must be ≥ 1");
    if (ell < 0) throw std::invalid_argument("ell must be ≥ 0");
    if (levels < 1) throw std::invalid_argument("levels must be ≥ 1");
    if (!std::isfinite(lambda) || lambda < 0.0) throw std::invalid_argument("lambda must be ≥ 0");
    if (!std::isfinite(omega) || omega <= 0.0) throw std::invalid_argument("omega must be > 0");
}

double ModelParams::eta() const { return pdm::eta(ell_, dimension_); }

double ModelParams::origin_exponent() const { return ell_ + 0.5 * (dimension_ - 1); }

OriginCondition ModelParams::origin_condition() const
{
    if (origin_exponent() == 0.0) return OriginCondition::Reflecting;
    if (eta() == 0.0) return OriginCondition::SquareRoot;
    return OriginCondition::Vanishing;
}

bool ModelParams::reduced_accuracy_boundary() const { return eta() < 0.5; }

double ModelParams::nu(int n) const { return 2.0 * n + ell_ + 0.5 * dimension_; }

ModelParams ModelParams::with_lambda(double lambda) const
{
    return ModelParams(dimension_, ell_, lambda, omega_, levels_);
}

ModelParams ModelParams::with_ell(int ell) const
{
    return ModelParams(dimension_, ell, lambda_, omega_, levels_);
}

ModelParams ModelParams::with_levels(int levels) const
{
    return ModelParams(dimension_, ell_, lambda_, omega_, levels);
}

double eta(int ell, int dimension)
{
    // 2(l - 1) + N is an integer, so the half is exact.
    return std::abs(2 * (ell - 1) + dimension) / 2.0;
}

MassValue mass_eval(double r, double lambda)
{
    return {1.0 + lambda * r * r, 2.0 * lambda * r, 2.0 * lambda};
}

double potential_eval(double r, const ModelParams& params)
{
    const double w2 = params.omega() * params.omega();
    return w2 * r * r / (2.0 * (1.0 + params.lambda() * r * r));
}

std::optional<double> continuum_threshold(const ModelParams& params)
{
    if (params.lambda() == 0.0) return std::nullopt;
    return params.omega() * params.omega() / (2.0 * params.lambda());
}

double naive_closed_form_energy(int n, const ModelParams& params)
{
    if (n < 0) throw std::invalid_argument("level index must be ≥ 0");
    const double nu = params.nu(n);
    const double w = params.omega();
    const double lam = params.lambda();
    // Rationalised form of nu sqrt(w^2 + lam^2 nu^2) - lam nu^2; avoids cancellation for large nu.
    const double root = std::sqrt(w * w + lam * lam * nu * nu);
    return nu * w * w / (root + lam * nu);
}

EffectiveRadialForm::EffectiveRadialForm(ModelParams params, Ordering ordering, Formulation formulation)
    : params_(params), ordering_(ordering), formulation_(formulation)
{
    const double e = params_.eta();
    centrifugal_ = e * e - 0.25;
    if (formulation == Formulation::NaiveGeneralized && ordering != Ordering::Naive)
        throw std::invalid_argument("naive generalized form requires the naive ordering");
    if (formulation != Formulation::NaiveGeneralized && ordering != Ordering::BenDanielDuke)
        throw std::invalid_argument("Liouville and Sturm-Liouville forms are BDD forms");
}

double EffectiveRadialForm::W_smooth(double r) const
{
    if (formulation_ == Formulation::SturmLiouville)
        throw std::logic_error("W is not defined for the Sturm-Liouville form");
    const double w2 = params_.omega() * params_.omega();
    const double base = w2 * r * r;  // 2 m V = omega^2 r^2
    if (formulation_ == Formulation::NaiveGeneralized) return base;
    const double lam = params_.lambda();
    const double m = 1.0 + lam * r * r;
    return base - lam * params_.dimension() / m + 3.0 * lam * lam * r * r / (m * m);
}

double EffectiveRadialForm::W(double r) const
{
    const double smooth = W_smooth(r);
    return centrifugal_ == 0.0 ? smooth : centrifugal_ / (r * r) + smooth;
}

double EffectiveRadialForm::U(double r) const
{
    if (formulation_ != Formulation::SturmLiouville)
        throw std::logic_error("U is only defined for the Sturm-Liouville form");
    const double lam = params_.lambda();
    const double m = 1.0 + lam * r * r;
    double u = -lam * (params_.dimension() - 1) / (m * m) + 2.0 * potential_eval(r, params_);
    if (centrifugal_ != 0.0) u += centrifugal_ / (m * r * r);
    return u;
}

double EffectiveRadialForm::p(double r) const
{
    return 1.0 / (1.0 + params_.lambda() * r * r);
}

double EffectiveRadialForm::weight(double r) const
{
    if (formulation_ == Formulation::SturmLiouville) return 1.0;
    return 2.0 * (1.0 + params_.lambda() * r * r);
}

bool EffectiveRadialForm::liouville_scaled() const
{
    return formulation_ == Formulation::LiouvilleStandardWeight;
}

EffectiveRadialForm naive_form(const ModelParams& params)
{
    return {params, Ordering::Naive, Formulation::NaiveGeneralized};
}

EffectiveRadialForm bdd_sturm_liouville_form(const ModelParams& params)
{
    return {params, Ordering::BenDanielDuke, Formulation::SturmLiouville};
}

EffectiveRadialForm bdd_liouville_form(const ModelParams& params)
{
    return {params, Ordering::BenDanielDuke, Formulation::LiouvilleStandardWeight};
}

EffectiveRadialForm liouville_form(const ModelParams& params, Ordering ordering)
{
    return ordering == Ordering::Naive ? naive_form(params) : bdd_liouville_form(params);
}

}  // namespace pdm
