#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "bfp/model.hpp"

namespace bfp {

// Raised when no finite sample size can reach the target power. Carries the
// limiting power (NaN when the bound comes from a formula's domain rather
// than a power limit) and, for searches, the power at the upper bound.
class infeasible_error : public std::runtime_error {
public:
    infeasible_error(const std::string& what, double limiting_power,
                     double power_at_bound = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what),
          limiting_power(limiting_power),
          power_at_bound(power_at_bound) {}
    double limiting_power;
    double power_at_bound;
};

enum class SsdMethod {
    ClosedFormEq8,   // point analysis prior, normal design prior
    ClosedFormEq9,   // point analysis prior, point design prior
    ClosedFormEq10,  // point analysis prior, design prior equal to it
    ClosedFormEq11,  // local normal analysis/design prior (Lambert W)
    RootSearch,
};

std::string_view to_string(SsdMethod method);

struct SampleSizeResult {
    double n_real = 0.0;
    long long n_integer = 0;  // ceil(n_real)
    SsdMethod method = SsdMethod::RootSearch;
    double target_power = 0.0;
    double achieved_power = 0.0;  // at n_integer
    double limiting_power = 1.0;
    // Extras for the Lambert W formula path.
    std::optional<double> unit_information_n;
    std::optional<double> n_refined;  // root-search refinement of the approximation
};

// Closed-form sample size for the point-analysis-prior BF. The minus_root
// variant returns the smaller root targeting power beta instead of 1 - beta
// (meaningful when the limiting power exceeds one half).
SampleSizeResult n_point_analysis(const TestSpec& test, const PointPrior& prior,
                                  const DesignPrior& design, double target_power,
                                  bool minus_root = false);

// Approximate closed-form sample size for a local normal analysis prior with
// matching design prior, n = (unit_variance / tau^2) * n_{k,beta}. Also
// reports the unit information sample size and an exact-power refinement.
SampleSizeResult n_local_normal(double k, double target_power, double unit_variance,
                                double tau);

// Bracketed search on log n for a monotone-in-n power function.
SampleSizeResult n_search(const std::function<double(double)>& power_fn,
                          double target_power, double n_lo = 1.0, double n_hi = 1e8,
                          std::optional<double> analytic_limit = {});

struct Feasibility {
    bool feasible;
    double limiting_power;
};

// Whether the target power is attainable with a finite sample size.
Feasibility feasibility(const TestSpec& test, const AnalysisPrior& analysis,
                        const DesignPrior& design, double target_power);

struct FreqSampleSize {
    double n_real;
    long long n_integer;
};

// Frequentist per-group baseline 2 sigma^2 (z_{1-alpha/2} + z_{1-beta})^2 /
// effect^2.
FreqSampleSize freq_n(double alpha, double target_power, double effect, double sigma);

// Dispatcher used by the CLI: closed form for point analysis priors, root
// search on the matching power function otherwise.
SampleSizeResult n_for(const TestSpec& test, const AnalysisPrior& analysis,
                       const DesignPrior& design, double target_power);

}  // namespace bfp
