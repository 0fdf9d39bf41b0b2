#include "bfp/ssd.hpp"

#include <cmath>
#include <limits>

#include "bfp/numerics.hpp"
#include "bfp/power.hpp"

namespace bfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvE = 0.367879441171442321595523770161;

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

void check_target(double target) {
    if (!(target > 0.0 && target < 1.0))
        throw std::invalid_argument("target power must lie in (0, 1)");
}

long long ceil_n(double n_real) {
    return static_cast<long long>(std::ceil(n_real));
}

}  // namespace

std::string_view to_string(SsdMethod method) {
    switch (method) {
        case SsdMethod::ClosedFormEq8: return "closed-form (normal design prior)";
        case SsdMethod::ClosedFormEq9: return "closed-form (point design prior)";
        case SsdMethod::ClosedFormEq10: return "closed-form (design prior at alternative)";
        case SsdMethod::ClosedFormEq11: return "closed-form (Lambert W)";
        case SsdMethod::RootSearch: return "root search";
    }
    return "unknown";
}

SampleSizeResult n_point_analysis(const TestSpec& test, const PointPrior& prior,
                                  const DesignPrior& design, double target_power,
                                  bool minus_root) {
    test.validate();
    validate(design);
    check_target(target_power);
    if (prior.mean == test.null_value)
        throw std::invalid_argument("point analysis prior must differ from the null value");

    // Evidence for H0 is the mirrored problem: swap the null with the
    // alternative and invert the threshold.
    if (test.direction == Direction::EvidenceForH0) {
        TestSpec mirrored = test;
        mirrored.null_value = prior.mean;
        mirrored.threshold = 1.0 / test.threshold;
        mirrored.direction = Direction::EvidenceForH1;
        PointPrior swapped{test.null_value};
        return n_point_analysis(mirrored, swapped, design, target_power, minus_root);
    }

    const double limit = power_limit_point_analysis(test, prior, design);
    if (target_power >= limit)
        throw infeasible_error("target power " + fmt(target_power) +
                                   " is not below the limiting power " + fmt(limit),
                               limit);

    const double usd = test.unit_variance;
    const double log_k2 = 2.0 * std::log(test.threshold);
    const double d_mu = prior.mean - test.null_value;
    const double d_design = 2.0 * design.mean - prior.mean - test.null_value;
    const double zb = std_normal_quantile(target_power);
    const double root_sign = minus_root ? -1.0 : 1.0;

    double n_real;
    SsdMethod method;
    if (design.is_point() && design.mean == prior.mean) {
        const double s = std::sqrt(zb * zb - log_k2);
        const double b = zb + root_sign * s;
        n_real = usd * b * b / (d_mu * d_mu);
        method = SsdMethod::ClosedFormEq10;
    } else if (design.is_point()) {
        if (d_design == 0.0) {
            // Design prior at the midpoint: the power rises to one half, so
            // only sub-half targets are solvable (guarded by the limit test).
            const double zq = std_normal_quantile(prior.mean > test.null_value
                                                      ? 1.0 - target_power
                                                      : target_power);
            n_real = usd * log_k2 * log_k2 / (4.0 * zq * zq * d_mu * d_mu);
            method = SsdMethod::ClosedFormEq9;
        } else {
            const double arg = zb * zb - d_design / d_mu * log_k2;
            if (!(arg >= 0.0))
                throw infeasible_error("no real solution for this design prior", limit);
            const double b = zb + root_sign * std::sqrt(arg);
            n_real = usd * b * b / (d_design * d_design);
            method = SsdMethod::ClosedFormEq9;
        }
    } else {
        const double denom = d_design * d_design -
                             4.0 * zb * zb * design.sd * design.sd;
        if (!(denom > 0.0))
            throw infeasible_error("target power " + fmt(target_power) +
                                       " is not attainable under this design prior" +
                                       " (limiting power " + fmt(limit) + ")",
                                   limit);
        const double tl = design.sd * log_k2 / d_mu;
        const double arg = zb * zb - d_design / d_mu * log_k2 + tl * tl;
        if (!(arg >= 0.0))
            throw infeasible_error("no real solution for this design prior", limit);
        const double b = zb + root_sign * std::sqrt(arg);
        n_real = (b * b - tl * tl) * usd / denom;
        method = SsdMethod::ClosedFormEq8;
    }

    if (!(n_real > 0.0) || !std::isfinite(n_real))
        throw numerical_error("sample size formula produced a non-positive n", n_real);

    SampleSizeResult result;
    result.n_real = n_real;
    result.n_integer = ceil_n(n_real);
    result.method = method;
    result.target_power = target_power;
    result.limiting_power = limit;
    result.achieved_power =
        power_point_analysis(
            {test, AnalysisPrior{prior}, design, static_cast<double>(result.n_integer)})
            .probability;
    return result;
}

SampleSizeResult n_local_normal(double k, double target_power, double unit_variance,
                                double tau) {
    check_target(target_power);
    if (!(k > 0.0)) throw std::invalid_argument("threshold k must be positive");
    if (!(unit_variance > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("unit variance and tau must be positive");

    const double zq = std_normal_quantile(0.5 * target_power);
    const double y = -k * k * zq * zq;
    if (y < -kInvE) {
        const double min_target =
            2.0 * std_normal_cdf(-std::exp(-0.5) / k);
        throw infeasible_error(
            "no finite sample size: -k^2 z^2 = " + fmt(y) + " < -1/e = " + fmt(-kInvE) +
                "; the formula needs a target power of at least " + fmt(min_target),
            std::numeric_limits<double>::quiet_NaN());
    }
    const double w = lambert_w(y, Branch::NonPrincipal);
    const double n_unit = k * k * std::exp(-w);
    const double n_real = unit_variance / (tau * tau) * n_unit;

    // Exact power of the matching null-centered configuration, used for the
    // achieved value and the refinement.
    const double tau2 = tau * tau;
    const auto exact_power = [&](double n) {
        const double x = (std::log1p(n * tau2 / unit_variance) - 2.0 * std::log(k)) *
                         unit_variance / (n * tau2);
        return x < 0.0 ? 1.0 : 2.0 * std_normal_cdf(-std::sqrt(x));
    };

    SampleSizeResult result;
    result.n_real = n_real;
    result.n_integer = ceil_n(n_real);
    result.method = SsdMethod::ClosedFormEq11;
    result.target_power = target_power;
    result.limiting_power = 1.0;
    result.unit_information_n = n_unit;
    result.achieved_power = exact_power(static_cast<double>(result.n_integer));
    if (k < 1.0) {
        // One root-search refinement against the exact power.
        double lo = n_real, hi = n_real;
        while (exact_power(lo) > target_power && lo > 1e-9) lo *= 0.5;
        while (exact_power(hi) < target_power && hi < 1e12) hi *= 2.0;
        if (exact_power(lo) <= target_power && exact_power(hi) >= target_power)
            result.n_refined = find_root(
                [&](double n) { return exact_power(n) - target_power; }, lo, hi, 1e-9);
    }
    return result;
}

SampleSizeResult n_search(const std::function<double(double)>& power_fn,
                          double target_power, double n_lo, double n_hi,
                          std::optional<double> analytic_limit) {
    check_target(target_power);
    if (!(n_lo > 0.0) || !(n_hi > n_lo))
        throw std::invalid_argument("n_search: requires 0 < n_lo < n_hi");

    const double p_hi = power_fn(n_hi);
    const double p_lo = power_fn(n_lo);
    if (p_lo > p_hi + 1e-9)
        throw numerical_error(
            "n_search: power decreases in n; check the threshold orientation", n_lo);
    if (p_hi < target_power) {
        const double limit = analytic_limit.value_or(p_hi);
        throw infeasible_error("target power " + fmt(target_power) +
                                   " is not reached at n = " + fmt(n_hi) + " (power " +
                                   fmt(p_hi) + ", limiting power " + fmt(limit) + ")",
                               limit, p_hi);
    }

    SampleSizeResult result;
    result.method = SsdMethod::RootSearch;
    result.target_power = target_power;
    result.limiting_power = analytic_limit.value_or(1.0);

    double n_real;
    if (p_lo >= target_power) {
        n_real = n_lo;
    } else {
        double lo = n_lo, hi = n_hi;
        for (int it = 0; it < 200 && hi - lo > 1e-6; ++it) {
            const double mid = std::exp(0.5 * (std::log(lo) + std::log(hi)));
            if (power_fn(mid) >= target_power)
                hi = mid;
            else
                lo = mid;
        }
        n_real = hi;  // power(hi) >= target by the bracket invariant
    }
    result.n_real = n_real;
    result.n_integer = ceil_n(n_real);
    result.achieved_power = power_fn(static_cast<double>(result.n_integer));
    return result;
}

Feasibility feasibility(const TestSpec& test, const AnalysisPrior& analysis,
                        const DesignPrior& design, double target_power) {
    test.validate();
    validate(analysis);
    validate(design);
    check_target(target_power);
    double limit;
    if (const auto* point = std::get_if<PointPrior>(&analysis)) {
        limit = power_limit_point_analysis(test, *point, design);
    } else {
        const bool point_null = design.is_point() && design.mean == test.null_value;
        const double limit_h1 = point_null ? 0.0 : 1.0;
        limit = test.direction == Direction::EvidenceForH1 ? limit_h1 : 1.0 - limit_h1;
    }
    return {target_power < limit, limit};
}

FreqSampleSize freq_n(double alpha, double target_power, double effect, double sigma) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("freq_n: alpha must lie in (0, 1)");
    check_target(target_power);
    if (effect == 0.0) throw std::invalid_argument("freq_n: effect must be non-zero");
    if (!(sigma > 0.0)) throw std::invalid_argument("freq_n: sigma must be positive");
    const double zsum =
        std_normal_quantile(1.0 - 0.5 * alpha) + std_normal_quantile(target_power);
    const double n_real = 2.0 * sigma * sigma * zsum * zsum / (effect * effect);
    return {n_real, ceil_n(n_real)};
}

SampleSizeResult n_for(const TestSpec& test, const AnalysisPrior& analysis,
                       const DesignPrior& design, double target_power) {
    if (std::holds_alternative<TruncatedTPrior>(analysis))
        throw std::invalid_argument(
            "t-test analysis priors are sized through the power_t search");
    if (const auto* point = std::get_if<PointPrior>(&analysis))
        return n_point_analysis(test, *point, design, target_power);

    const auto feas = feasibility(test, analysis, design, target_power);
    if (!feas.feasible)
        throw infeasible_error("target power " + fmt(target_power) +
                                   " exceeds the limiting power " +
                                   fmt(feas.limiting_power),
                               feas.limiting_power);
    const auto power_fn = [&](double n) {
        return power({test, analysis, design, n}).probability;
    };
    auto result = n_search(power_fn, target_power, 1.0, 1e8, feas.limiting_power);
    return result;
}

}  // namespace bfp
