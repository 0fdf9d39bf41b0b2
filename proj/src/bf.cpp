#include "bfp/bf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bfp/numerics.hpp"

namespace bfp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

EstimateInput EstimateInput::from_se(double estimate, double se) {
    if (!(se > 0.0)) throw std::invalid_argument("EstimateInput: se must be positive");
    return {estimate, se};
}

EstimateInput EstimateInput::from_unit_variance(double estimate, double unit_variance,
                                                double n) {
    if (!(unit_variance > 0.0) || !(n > 0.0))
        throw std::invalid_argument(
            "EstimateInput: unit variance and n must be positive");
    return {estimate, std::sqrt(unit_variance / n)};
}

BayesFactor bf01(const EstimateInput& input, double null_value,
                 const AnalysisPrior& prior) {
    if (!(input.se > 0.0)) throw std::invalid_argument("bf01: se must be positive");
    validate(prior);
    const double se2 = input.se * input.se;
    const double est = input.estimate;

    if (const auto* point = std::get_if<PointPrior>(&prior)) {
        // Likelihood-ratio form of the point-prior BF.
        const double mu = point->mean;
        const double log_bf =
            (est * (null_value - mu) - 0.5 * (null_value * null_value - mu * mu)) / se2;
        return {log_bf};
    }
    if (const auto* normal = std::get_if<NormalPrior>(&prior)) {
        const double mu = normal->mean;
        const double tau2 = normal->sd * normal->sd;
        const double d0 = est - null_value;
        const double d1 = est - mu;
        const double log_bf = 0.5 * std::log1p(tau2 / se2) -
                              0.5 * (d0 * d0 / se2 - d1 * d1 / (tau2 + se2));
        return {log_bf};
    }
    throw std::invalid_argument(
        "bf01: analysis prior must be point or normal (use tbf01/nmbf01 otherwise)");
}

TTestLayout t_test_layout(double n1, std::optional<double> n2, bool paired) {
    if (!(n1 > 0.0)) throw std::invalid_argument("t-test: n1 must be positive");
    if (paired || !n2) {
        if (!(n1 > 1.0))
            throw std::invalid_argument("t-test: one-sample/paired design needs n > 1");
        return {n1 - 1.0, n1};
    }
    if (!(*n2 > 0.0)) throw std::invalid_argument("t-test: n2 must be positive");
    const double df = n1 + *n2 - 2.0;
    if (!(df > 0.0)) throw std::invalid_argument("t-test: degrees of freedom must be positive");
    return {df, 1.0 / (1.0 / n1 + 1.0 / *n2)};
}

namespace {

// Marginal density of the t statistic under the truncated t prior, integrated
// in shifted log space so that regions where both factors underflow still
// contribute correctly. Splits the domain at the likelihood bump (theta near
// t/sqrt(n_eff)) and at the prior core so narrow features are never missed.
double t_marginal_log_density(double t, double df, double n_eff,
                              const TruncatedTPrior& prior, double rel_tol) {
    const double root_n = std::sqrt(n_eff);
    const double tau = prior.scale;
    const double mass = t_cdf((prior.upper - prior.location) / tau, prior.df) -
                        t_cdf((prior.lower - prior.location) / tau, prior.df);
    if (!(mass >= 1e-300))
        throw numerical_error("tbf01: prior truncation interval carries no mass", 0.0);
    const double log_mass = std::log(mass);

    const double prior_norm = std::lgamma(0.5 * (prior.df + 1.0)) -
                              std::lgamma(0.5 * prior.df) -
                              0.5 * std::log(prior.df * M_PI) - std::log(tau) - log_mass;
    const auto prior_log = [&](double theta) {
        if (theta < prior.lower || theta > prior.upper) return -kInf;
        const double z = (theta - prior.location) / tau;
        return prior_norm - 0.5 * (prior.df + 1.0) * std::log1p(z * z / prior.df);
    };
    const double central_log = nct_log_density(t, df, 0.0);
    // the non-central t density never exceeds the central density at zero
    const double nct_cap = nct_log_density(0.0, df, 0.0);

    double l_max = -kInf;
    const auto log_integrand = [&](double theta) {
        const double lp = prior_log(theta);
        if (lp == -kInf) return -kInf;
        if (lp + nct_cap < l_max - 40.0) return -kInf;  // prior tail, negligible
        const double ncp = theta * root_n;
        // opposite-sign bound: NCT(t | ncp) <= central(t) exp(-ncp^2 / 2)
        if (ncp * t < 0.0 && lp + central_log - 0.5 * ncp * ncp < l_max - 40.0)
            return -kInf;
        return nct_log_density(t, df, ncp) + lp;
    };

    // Segment boundaries: likelihood bump and prior core.
    const double bump = t / root_n;
    const double bump_w = 10.0 / root_n;
    std::vector<double> cuts;
    for (double c : {bump - bump_w, bump + bump_w, prior.location - 12.0 * tau,
                     prior.location + 12.0 * tau})
        if (c > prior.lower && c < prior.upper) cuts.push_back(c);
    cuts.push_back(prior.lower);
    cuts.push_back(prior.upper);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) {
                               if (!std::isfinite(a) || !std::isfinite(b)) return a == b;
                               return b - a <= 1e-12 * std::max(1.0, std::fabs(a));
                           }),
               cuts.end());

    // Coarse scan for the shift constant, including the exact candidates.
    std::vector<double> probes;
    for (double c : {bump, prior.location, std::clamp(bump, prior.lower, prior.upper)})
        if (c >= prior.lower && c <= prior.upper && std::isfinite(c)) probes.push_back(c);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        for (int j = 0; j <= 8; ++j) {
            double theta;
            if (a == -kInf && b == kInf)
                theta = std::tan(M_PI * (j / 8.0 - 0.5) * 0.98);
            else if (a == -kInf)
                theta = b - std::exp(1.0 * j) + 1.0;
            else if (b == kInf)
                theta = a + std::exp(1.0 * j) - 1.0;
            else
                theta = a + (b - a) * j / 8.0;
            probes.push_back(theta);
        }
    }
    for (double theta : probes) {
        if (theta < prior.lower || theta > prior.upper || !std::isfinite(theta)) continue;
        const double lp = prior_log(theta);
        if (lp == -kInf) continue;
        l_max = std::max(l_max, nct_log_density(t, df, theta * root_n) + lp);
    }
    if (l_max == -kInf) return -kInf;

    const auto shifted = [&](double theta) {
        const double l = log_integrand(theta);
        return l == -kInf ? 0.0 : std::exp(l - l_max);
    };
    const double total = integrate_piecewise(shifted, cuts, rel_tol);
    if (!(total > 0.0)) return -kInf;
    return l_max + std::log(total);
}

}  // namespace

BayesFactor tbf01(double t, double n1, std::optional<double> n2,
                  const TruncatedTPrior& prior, bool paired, double rel_tol) {
    validate(AnalysisPrior{prior});
    if (!(rel_tol > 0.0)) throw std::invalid_argument("tbf01: rel_tol must be positive");
    const auto layout = t_test_layout(n1, n2, paired);
    const double log_num = nct_log_density(t, layout.df, 0.0);
    const double log_den =
        t_marginal_log_density(t, layout.df, layout.effective_n, prior, rel_tol);
    return {log_num - log_den};
}

BayesFactor nmbf01(const EstimateInput& input, double null_value,
                   const NormalMomentPrior& prior) {
    if (!(input.se > 0.0)) throw std::invalid_argument("nmbf01: se must be positive");
    if (!(prior.spread > 0.0))
        throw std::invalid_argument("nmbf01: prior spread must be positive");
    const double se2 = input.se * input.se;
    const double tau2 = prior.spread * prior.spread;
    const double d = input.estimate - null_value;
    const double g = d * d / (se2 * (1.0 + se2 / tau2));
    const double log_bf = 1.5 * std::log1p(tau2 / se2) - 0.5 * g - std::log1p(g);
    return {log_bf};
}

}  // namespace bfp
