#pragma once

#include <cmath>
#include <optional>

#include "bfp/model.hpp"

namespace bfp {

// Parameter estimate with its precision, given either as an observed standard
// error or as (unit variance, effective n) with se^2 = unit_variance / n.
struct EstimateInput {
    double estimate = 0.0;
    double se = 1.0;

    static EstimateInput from_se(double estimate, double se);
    static EstimateInput from_unit_variance(double estimate, double unit_variance,
                                            double n);
};

// Bayes factor in favor of H0 over H1, kept on the log scale internally since
// the natural scale overflows for large n.
struct BayesFactor {
    double log_value = 0.0;
    double value() const { return std::exp(log_value); }
};

// BF for a normally distributed estimate with a point or normal analysis
// prior. BF > 1 favors H0, BF < 1 favors H1.
BayesFactor bf01(const EstimateInput& input, double null_value,
                 const AnalysisPrior& prior);

// t-test BF: central t density at the observed statistic over the marginal of
// the non-central t density under a truncated location-scale t prior on the
// standardized mean difference. n1, n2 are per-group sample sizes; one-sample
// and paired designs pass n1 only (the number of observations/pairs).
// rel_tol controls the denominator quadrature.
BayesFactor tbf01(double t, double n1, std::optional<double> n2,
                  const TruncatedTPrior& prior, bool paired = false,
                  double rel_tol = 1e-8);

// BF under a non-local normal moment prior located at the null value.
BayesFactor nmbf01(const EstimateInput& input, double null_value,
                   const NormalMomentPrior& prior);

// Degrees of freedom and effective sample size implied by a t-test layout.
struct TTestLayout {
    double df;
    double effective_n;
};
TTestLayout t_test_layout(double n1, std::optional<double> n2, bool paired);

}  // namespace bfp
