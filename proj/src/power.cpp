#include "bfp/power.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bfp/bf.hpp"
#include "bfp/numerics.hpp"

namespace bfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double oriented(double p_h1, Direction direction) {
    return direction == Direction::EvidenceForH1 ? p_h1 : 1.0 - p_h1;
}

void check_threshold(double k, Direction direction) {
    if (!(k > 0.0)) throw std::invalid_argument("threshold k must be positive");
    if (direction == Direction::EvidenceForH1 && k >= 1.0)
        throw std::invalid_argument("evidence for H1 requires k < 1");
    if (direction == Direction::EvidenceForH0 && k <= 1.0)
        throw std::invalid_argument("evidence for H0 requires k > 1");
}

}  // namespace

double power_limit_point_analysis(const TestSpec& test, const PointPrior& prior,
                                  const DesignPrior& design) {
    test.validate();
    validate(design);
    const double null = test.null_value, mu = prior.mean;
    if (mu == null)
        throw std::invalid_argument("point analysis prior must differ from the null value");
    double limit_h1;
    const double midpoint = 0.5 * (null + mu);
    if (design.is_point()) {
        if (design.mean == midpoint)
            limit_h1 = 0.5;
        else if (mu > null)
            limit_h1 = design.mean > midpoint ? 1.0 : 0.0;
        else
            limit_h1 = design.mean < midpoint ? 1.0 : 0.0;
    } else {
        const double z_lim = (null + mu - 2.0 * design.mean) / (2.0 * design.sd);
        limit_h1 = mu > null ? 1.0 - std_normal_cdf(z_lim) : std_normal_cdf(z_lim);
    }
    return oriented(limit_h1, test.direction);
}

PowerResult power_point_analysis(const PowerQuery& query) {
    query.test.validate();
    validate(query.design);
    const auto* prior = std::get_if<PointPrior>(&query.analysis);
    if (!prior) throw std::invalid_argument("power_point_analysis needs a point prior");
    const double null = query.test.null_value, mu = prior->mean;
    if (mu == null)
        throw std::invalid_argument("point analysis prior must differ from the null value");
    if (!(query.n > 0.0)) throw std::invalid_argument("n must be positive");

    const double usd = query.test.unit_variance;
    const double s = predictive_sd(query.design, query.n, usd);
    const double z = (usd * std::log(query.test.threshold) / (query.n * (null - mu)) +
                      0.5 * (null + mu) - query.design.mean) /
                     s;
    const double p_h1 = mu > null ? 1.0 - std_normal_cdf(z) : std_normal_cdf(z);

    PowerResult result;
    result.probability = oriented(p_h1, query.test.direction);
    result.limiting_power = power_limit_point_analysis(query.test, *prior, query.design);
    result.z = z;
    return result;
}

namespace {

// Limit shared by the normal and normal-moment analysis priors: one unless
// the design prior is the point null, in which case the BF is consistent for
// H0 and the H1-evidence probability vanishes.
double limit_consistent(const TestSpec& test, const DesignPrior& design) {
    const bool point_null = design.is_point() && design.mean == test.null_value;
    return oriented(point_null ? 0.0 : 1.0, test.direction);
}

}  // namespace

PowerResult power_normal_analysis(const PowerQuery& query) {
    query.test.validate();
    validate(query.design);
    const auto* prior = std::get_if<NormalPrior>(&query.analysis);
    if (!prior) throw std::invalid_argument("power_normal_analysis needs a normal prior");
    if (!(query.n > 0.0)) throw std::invalid_argument("n must be positive");

    const double usd = query.test.unit_variance;
    const double null = query.test.null_value;
    const double n = query.n;
    const double tau2 = prior->sd * prior->sd;
    const double k = query.test.threshold;
    const double dd = null - prior->mean;

    const double m = (query.design.mean - null - usd / (n * tau2) * dd) /
                     predictive_sd(query.design, n, usd);
    const double x = (std::log1p(n * tau2 / usd) + dd * dd / tau2 - 2.0 * std::log(k)) *
                     (1.0 + usd / (n * tau2)) * usd /
                     (n * query.design.sd * query.design.sd + usd);

    // x < 0 means the evidence inequality holds for every estimate.
    const double p_h1 =
        x < 0.0 ? 1.0
                : std_normal_cdf(-std::sqrt(x) - m) + std_normal_cdf(-std::sqrt(x) + m);

    PowerResult result;
    result.probability = oriented(p_h1, query.test.direction);
    result.limiting_power = limit_consistent(query.test, query.design);
    result.m = m;
    result.x = x;
    return result;
}

PowerResult power_nm_analysis(const PowerQuery& query) {
    query.test.validate();
    validate(query.design);
    const auto* prior = std::get_if<NormalMomentPrior>(&query.analysis);
    if (!prior)
        throw std::invalid_argument("power_nm_analysis needs a normal moment prior");
    if (!(query.n > 0.0)) throw std::invalid_argument("n must be positive");

    const double usd = query.test.unit_variance;
    const double n = query.n;
    const double tau2 = prior->spread * prior->spread;
    const double k = query.test.threshold;

    const double w_arg =
        std::exp(1.5 * std::log1p(n * tau2 / usd) + 0.5 - std::log(2.0 * k));
    const double w = lambert_w(w_arg, Branch::Principal);
    const double a = (query.design.mean - query.test.null_value) /
                     predictive_sd(query.design, n, usd);

    PowerResult result;
    result.limiting_power = limit_consistent(query.test, query.design);
    result.a = a;
    if (2.0 * w - 1.0 < 0.0) {
        // The BF cannot exceed (1 + n tau^2 / usd)^{3/2}, so such a large k is
        // met by every estimate and the success region is the whole line.
        result.probability = oriented(1.0, query.test.direction);
        return result;
    }
    const double y = (2.0 * w - 1.0) * (1.0 + usd / (n * tau2)) /
                     (1.0 + n * query.design.sd * query.design.sd / usd);
    result.y = y;
    result.probability = oriented(
        std_normal_cdf(-std::sqrt(y) - a) + std_normal_cdf(-std::sqrt(y) + a),
        query.test.direction);
    return result;
}

PowerResult power(const PowerQuery& query) {
    if (std::holds_alternative<PointPrior>(query.analysis))
        return power_point_analysis(query);
    if (std::holds_alternative<NormalPrior>(query.analysis))
        return power_normal_analysis(query);
    if (std::holds_alternative<NormalMomentPrior>(query.analysis))
        return power_nm_analysis(query);
    throw std::invalid_argument("t-test analysis priors go through power_t");
}

namespace {

struct TLayoutForKind {
    double n1;
    std::optional<double> n2;
    bool paired;
};

TLayoutForKind layout_args(double n_per_group, TTestKind kind) {
    switch (kind) {
        case TTestKind::OneSample:
            return {n_per_group, std::nullopt, false};
        case TTestKind::Paired:
            return {n_per_group, std::nullopt, true};
        case TTestKind::TwoSample:
            return {n_per_group, n_per_group, false};
    }
    throw std::invalid_argument("unknown t-test kind");
}

}  // namespace

TRegion t_success_region(double n_per_group, const TruncatedTPrior& prior, double k,
                         TTestKind kind) {
    if (!(k > 0.0)) throw std::invalid_argument("threshold k must be positive");
    validate(AnalysisPrior{prior});
    const auto args = layout_args(n_per_group, kind);
    const auto layout = t_test_layout(args.n1, args.n2, args.paired);
    const double log_k = std::log(k);

    // Loose quadrature for bracketing, full precision for refinement.
    const auto g_scan = [&](double t) {
        return tbf01(t, args.n1, args.n2, prior, args.paired, 1e-3).log_value - log_k;
    };
    const auto g = [&](double t) {
        return tbf01(t, args.n1, args.n2, prior, args.paired).log_value - log_k;
    };
    const auto refine = [&](double lo, double hi, double step) {
        try {
            return find_root(g, lo, hi, 1e-6);
        } catch (const numerical_error&) {
            // scan-tolerance sign flip right at the bracket edge
            return find_root(g, lo - step, hi + step, 1e-6);
        }
    };

    // Scan half-width: largest plausible non-centrality plus slack.
    const double th_lo = std::max(prior.lower, prior.location - 12.0 * prior.scale);
    const double th_hi = std::min(prior.upper, prior.location + 12.0 * prior.scale);
    const double c =
        std::max(std::fabs(th_lo), std::fabs(th_hi)) * std::sqrt(layout.effective_n) +
        10.0;

    for (int n_grid = 512; n_grid <= 8192; n_grid *= 2) {
        std::vector<double> ts(n_grid + 1), gs(n_grid + 1);
        for (int i = 0; i <= n_grid; ++i) {
            ts[i] = -c + 2.0 * c * i / n_grid;
            gs[i] = g_scan(ts[i]);
            if (std::isnan(gs[i]))
                throw numerical_error("t_success_region: BF evaluation returned NaN", ts[i]);
        }
        struct Crossing {
            double root;
            bool upward;  // g goes from <= 0 to > 0
        };
        std::vector<Crossing> crossings;
        const double step = 2.0 * c / n_grid;
        for (int i = 0; i < n_grid; ++i) {
            const bool neg0 = gs[i] <= 0.0, neg1 = gs[i + 1] <= 0.0;
            if (neg0 == neg1) continue;
            const double root = refine(ts[i], ts[i + 1], step);
            crossings.push_back({root, neg0});
        }
        if (crossings.size() > 2) {
            if (n_grid < 8192) continue;
            throw numerical_error(
                "t_success_region: more than two threshold crossings detected", c);
        }
        if (crossings.empty()) {
            const bool all_inside = std::all_of(gs.begin(), gs.end(),
                                                [](double v) { return v <= 0.0; });
            if (all_inside) return {kInf, kInf};  // whole line satisfies BF <= k
            return {-kInf, kInf};                 // empty region
        }
        if (crossings.size() == 1) {
            if (crossings[0].upward) return {crossings[0].root, kInf};
            return {-kInf, crossings[0].root};
        }
        if (!crossings[0].upward || crossings[1].upward)
            throw numerical_error(
                "t_success_region: region is not of the two-sided exterior form", c);
        return {crossings[0].root, crossings[1].root};
    }
    throw numerical_error("t_success_region: scan failed", c);
}

PowerResult power_t(double n_per_group, const TruncatedTPrior& prior,
                    const DesignPrior& design, double k, TTestKind kind,
                    Direction direction, bool exact_point_design) {
    check_threshold(k, direction);
    validate(design);
    const auto region = t_success_region(n_per_group, prior, k, kind);
    const auto args = layout_args(n_per_group, kind);
    const auto layout = t_test_layout(args.n1, args.n2, args.paired);

    const double root_n = std::sqrt(layout.effective_n);
    const double mean_t = design.mean * root_n;
    const double var_t = 1.0 + layout.effective_n * design.sd * design.sd;

    double p_h1;
    if (exact_point_design) {
        if (!design.is_point())
            throw std::invalid_argument(
                "exact design distribution is available for point design priors only");
        const double ncp = mean_t;
        const auto dens = [&](double t) { return nct_density(t, layout.df, ncp); };
        double lower_mass = 0.0, upper_mass = 0.0;
        if (region.t_crit_lo == kInf && region.t_crit_hi == kInf) {
            lower_mass = 1.0;
        } else {
            if (region.t_crit_lo > -kInf)
                lower_mass = integrate(dens, -kInf, region.t_crit_lo, 1e-9);
            if (region.t_crit_hi < kInf)
                upper_mass = integrate(dens, region.t_crit_hi, kInf, 1e-9);
        }
        p_h1 = std::clamp(lower_mass + upper_mass, 0.0, 1.0);
    } else {
        const double s = std::sqrt(var_t);
        const double lo_z =
            region.t_crit_lo == kInf ? kInf
                                     : (region.t_crit_lo == -kInf
                                            ? -kInf
                                            : (region.t_crit_lo - mean_t) / s);
        const double hi_z =
            region.t_crit_hi == kInf ? -kInf
                                     : (region.t_crit_hi == -kInf
                                            ? kInf
                                            : (mean_t - region.t_crit_hi) / s);
        const auto cdf = [](double v) {
            if (v == kInf) return 1.0;
            if (v == -kInf) return 0.0;
            return std_normal_cdf(v);
        };
        p_h1 = cdf(lo_z) + cdf(hi_z);
    }

    PowerResult result;
    result.probability = oriented(p_h1, direction);
    const bool point_null = design.is_point() && design.mean == 0.0;
    result.limiting_power = oriented(point_null ? 0.0 : 1.0, direction);
    result.t_crit_lo = region.t_crit_lo;
    result.t_crit_hi = region.t_crit_hi;
    return result;
}

}  // namespace bfp
