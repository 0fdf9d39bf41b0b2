#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace bfp {

// Raised when an iterative scheme fails to reach its tolerance. Carries the
// best value computed so far.
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double best)
        : std::runtime_error(what), best_estimate(best) {}
    double best_estimate;
};

// Branch selector for the Lambert W function. Principal satisfies W(x) >= -1,
// NonPrincipal satisfies W(x) <= -1 on (-1/e, 0).
enum class Branch { Principal, NonPrincipal };

inline constexpr double default_quad_rel_tol = 1e-8;
inline constexpr double default_root_tol = 1e-8;

// Standard normal distribution function, clamped to [0,1] in the far tails.
double std_normal_cdf(double x) noexcept;

// log of the standard normal density.
double std_normal_log_pdf(double x) noexcept;

// Inverse of std_normal_cdf for 0 < p < 1. Wichura's PPND16 rational
// approximation polished by one Newton step. Throws std::domain_error outside
// the open unit interval.
double std_normal_quantile(double p);

// Solves w * exp(w) = y. Principal branch requires y >= -1/e, non-principal
// requires -1/e <= y < 0. Throws std::domain_error outside the branch domain.
double lambert_w(double y, Branch branch);

// Distribution function of the standard (central) t distribution.
double t_cdf(double x, double df);

// Density of the location-scale t distribution truncated to [lower, upper].
// Infinite bounds give the untruncated density. Throws numerical_error when
// the truncation interval carries essentially no mass.
double t_density(double x, double df, double location, double scale,
                 double lower, double upper);
double t_density(double x, double df, double location = 0.0, double scale = 1.0);

// log t_density; -inf outside the truncation interval.
double t_log_density(double x, double df, double location, double scale,
                     double lower, double upper);

// Density of the non-central t distribution with df degrees of freedom and
// non-centrality ncp, evaluated in log space.
double nct_density(double x, double df, double ncp);
double nct_log_density(double x, double df, double ncp);

// Adaptive Gauss-Kronrod quadrature. Infinite or semi-infinite ranges are
// mapped to the unit interval with a rational substitution. Throws
// numerical_error (carrying the best estimate) if the refinement budget is
// exhausted before the relative tolerance is met.
double integrate(const std::function<double(double)>& f, double lower,
                 double upper, double rel_tol = default_quad_rel_tol);

// Same quadrature over a chain of segments cuts[0] < cuts[1] < ... sharing
// one error budget, so segments with negligible mass are not over-refined.
// The first and last cut may be infinite.
double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> cuts,
                           double rel_tol = default_quad_rel_tol);

// Bracketed root finding, bisection with secant acceleration. Stops when
// |f(x)| <= tol or the bracket width drops below tol. Throws
// numerical_error if [lo, hi] does not bracket a sign change.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = default_root_tol);

}  // namespace bfp
