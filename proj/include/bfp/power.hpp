#pragma once

#include <optional>

#include "bfp/model.hpp"

namespace bfp {

struct PowerQuery {
    TestSpec test;
    AnalysisPrior analysis;
    DesignPrior design;
    double n = 1.0;
};

// Probability of compelling evidence at the queried sample size, together
// with the n -> infinity limit and the intermediate quantities of the closed
// forms (filled where the respective formula applies).
struct PowerResult {
    double probability = 0.0;
    double limiting_power = 1.0;
    std::optional<double> z;          // point analysis prior
    std::optional<double> m, x;       // normal analysis prior
    std::optional<double> y, a;       // normal moment analysis prior
    std::optional<double> t_crit_lo;  // t-test path
    std::optional<double> t_crit_hi;
};

// Power of the point-analysis-prior BF (likelihood ratio). Requires the prior
// mean to differ from the null value.
PowerResult power_point_analysis(const PowerQuery& query);

// n -> infinity limit of the point-analysis power, oriented by the spec's
// direction. Point design priors limit to 0, 1/2, or 1.
double power_limit_point_analysis(const TestSpec& test, const PointPrior& prior,
                                  const DesignPrior& design);

// Power of the normal-analysis-prior BF.
PowerResult power_normal_analysis(const PowerQuery& query);

// Power of the normal-moment-prior BF (prior located at the null value).
PowerResult power_nm_analysis(const PowerQuery& query);

// Dispatches on the analysis prior. The t-test path has its own entry point.
PowerResult power(const PowerQuery& query);

enum class TTestKind { OneSample, Paired, TwoSample };

// Success region {t : BF01(t) <= k} of the t-test BF, always of the form
// (-inf, lo] u [hi, +inf). Absent crossings are reported as -inf/+inf; a
// region covering the whole line comes back as {+inf, +inf}.
struct TRegion {
    double t_crit_lo;
    double t_crit_hi;
};
TRegion t_success_region(double n_per_group, const TruncatedTPrior& prior, double k,
                         TTestKind kind);

// Two-step t-test power: success region in t, then the probability that the
// design prior's predictive t distribution lands in it. The predictive
// distribution is the normal approximation; exact_point_design switches to
// the non-central t distribution (point design priors only).
PowerResult power_t(double n_per_group, const TruncatedTPrior& prior,
                    const DesignPrior& design, double k, TTestKind kind,
                    Direction direction = Direction::EvidenceForH1,
                    bool exact_point_design = false);

}  // namespace bfp
