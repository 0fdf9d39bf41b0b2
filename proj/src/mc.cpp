#include "bfp/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bfp/bf.hpp"
#include "bfp/numerics.hpp"
#include "bfp/ssd.hpp"

namespace bfp {

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t replicate,
                                        std::uint64_t draw) {
    constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
    std::uint32_t c0 = static_cast<std::uint32_t>(draw);
    std::uint32_t c1 = static_cast<std::uint32_t>(draw >> 32);
    std::uint32_t c2 = static_cast<std::uint32_t>(replicate);
    std::uint32_t c3 = static_cast<std::uint32_t>(replicate >> 32);
    std::uint32_t k0 = static_cast<std::uint32_t>(seed);
    std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
        const std::uint32_t n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1 ^ k0;
        const std::uint32_t n1 = static_cast<std::uint32_t>(p1);
        const std::uint32_t n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3 ^ k1;
        const std::uint32_t n3 = static_cast<std::uint32_t>(p0);
        c0 = n0;
        c1 = n1;
        c2 = n2;
        c3 = n3;
        k0 += kW0;
        k1 += kW1;
    }
    return {c0, c1, c2, c3};
}

double mc_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t draw) {
    const auto block = philox4x32(seed, replicate, draw);
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
    // 53-bit mantissa centered in its cell: never exactly 0 or 1.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double mc_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t draw) {
    return std_normal_quantile(mc_uniform(seed, replicate, draw));
}

namespace {

struct TSimLayout {
    long long n;
    bool two_sample;
};

TSimLayout t_sim_layout(const McCondition& condition) {
    const double n = condition.n;
    const auto n_int = static_cast<long long>(std::llround(n));
    if (!(n > 1.0) || std::fabs(n - static_cast<double>(n_int)) > 1e-9)
        throw std::invalid_argument(
            "simulate_power: the t-test path needs an integer per-group n > 1");
    return {n_int, condition.t_kind == TTestKind::TwoSample};
}

// t statistic from raw unit-variance normal data.
double simulate_t_statistic(const TSimLayout& layout, double theta,
                            std::uint64_t seed, std::uint64_t rep) {
    const auto n = layout.n;
    std::uint64_t draw = 2;  // draws 0 and 1 are reserved for theta / estimate
    if (layout.two_sample) {
        double sum1 = 0.0, ss1 = 0.0, sum2 = 0.0, ss2 = 0.0;
        for (long long i = 0; i < n; ++i) {
            const double x = mc_normal(seed, rep, draw++);
            sum1 += x;
            ss1 += x * x;
        }
        for (long long i = 0; i < n; ++i) {
            const double x = theta + mc_normal(seed, rep, draw++);
            sum2 += x;
            ss2 += x * x;
        }
        const double m1 = sum1 / n, m2 = sum2 / n;
        const double sp2 =
            (ss1 - n * m1 * m1 + ss2 - n * m2 * m2) / (2.0 * n - 2.0);
        return (m2 - m1) / std::sqrt(sp2 * 2.0 / n);
    }
    double sum = 0.0, ss = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double x = theta + mc_normal(seed, rep, draw++);
        sum += x;
        ss += x * x;
    }
    const double m = sum / n;
    const double s2 = (ss - n * m * m) / (n - 1.0);
    return m / std::sqrt(s2 / n);
}

}  // namespace

McReport simulate_power(const McConfig& config) {
    const auto& cond = config.condition;
    cond.test.validate();
    validate(cond.analysis);
    validate(cond.design);
    if (config.replicates < 100)
        throw std::invalid_argument("simulate_power: needs at least 100 replicates");
    if (!(cond.n > 0.0)) throw std::invalid_argument("simulate_power: n must be positive");

    const double log_k = std::log(cond.test.threshold);
    const bool want_small = cond.test.direction == Direction::EvidenceForH1;
    const auto success = [&](double log_bf) {
        return want_small ? log_bf <= log_k : log_bf >= log_k;
    };

    long long successes = 0;
    double analytic;
    if (const auto* tprior = std::get_if<TruncatedTPrior>(&cond.analysis)) {
        const auto layout = t_sim_layout(cond);
        const bool paired = cond.t_kind == TTestKind::Paired;
        const std::optional<double> n2 =
            layout.two_sample ? std::optional<double>(cond.n) : std::nullopt;
        analytic = power_t(cond.n, *tprior, cond.design, cond.test.threshold,
                           cond.t_kind, cond.test.direction)
                       .probability;
        for (long long rep = 0; rep < config.replicates; ++rep) {
            const double theta =
                cond.design.mean + cond.design.sd * mc_normal(config.seed, rep, 0);
            const double t = simulate_t_statistic(layout, theta, config.seed, rep);
            if (success(tbf01(t, cond.n, n2, *tprior, paired, 1e-6).log_value))
                ++successes;
        }
    } else {
        const double se = std::sqrt(cond.test.unit_variance / cond.n);
        analytic = power({cond.test, cond.analysis, cond.design, cond.n}).probability;
        const bool is_nm = std::holds_alternative<NormalMomentPrior>(cond.analysis);
        const auto* nm = std::get_if<NormalMomentPrior>(&cond.analysis);
        for (long long rep = 0; rep < config.replicates; ++rep) {
            const double theta =
                cond.design.mean + cond.design.sd * mc_normal(config.seed, rep, 0);
            const double estimate = theta + se * mc_normal(config.seed, rep, 1);
            const EstimateInput input{estimate, se};
            const double log_bf =
                is_nm ? nmbf01(input, cond.test.null_value, *nm).log_value
                      : bf01(input, cond.test.null_value, cond.analysis).log_value;
            if (success(log_bf)) ++successes;
        }
    }

    McReport report;
    report.successes = successes;
    report.replicates = config.replicates;
    report.seed = config.seed;
    report.empirical_power =
        static_cast<double>(successes) / static_cast<double>(config.replicates);
    report.mc_se = std::sqrt(report.empirical_power * (1.0 - report.empirical_power) /
                             static_cast<double>(config.replicates));
    report.analytic_power = analytic;
    report.discrepancy = report.empirical_power - analytic;
    return report;
}

McValidateResult mc_validate(std::span<const McCell> grid, double target_power,
                             long long replicates, std::uint64_t seed) {
    if (grid.empty()) throw std::invalid_argument("mc_validate: empty grid");
    McValidateResult result;
    result.cells.reserve(grid.size());
    std::vector<double> abs_disc;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& cell = grid[i];
        McValidateCell out;
        double n = 0.0;
        try {
            n = n_for(cell.test, cell.analysis, cell.design, target_power).n_real;
            out.feasible = true;
        } catch (const infeasible_error&) {
        } catch (const std::invalid_argument&) {
            // degenerate cell, e.g. a point analysis prior at the null
        }
        if (out.feasible) {
            // Per-cell seed derived through the generator itself so cells are
            // independent but reproducible.
            const auto block = philox4x32(seed, 0x6d632d76616c6964ull, i);
            const std::uint64_t cell_seed =
                (static_cast<std::uint64_t>(block[2]) << 32) | block[3];
            McConfig config;
            config.condition = {cell.test, cell.analysis, cell.design, n};
            config.replicates = replicates;
            config.seed = cell_seed;
            out.n = n;
            out.report = simulate_power(config);
            abs_disc.push_back(std::fabs(out.report->discrepancy));
            ++result.feasible_cells;
        } else {
            ++result.skipped_cells;
        }
        result.cells.push_back(std::move(out));
    }

    if (!abs_disc.empty()) {
        std::sort(abs_disc.begin(), abs_disc.end());
        result.max_abs_discrepancy = abs_disc.back();
        const std::size_t m = abs_disc.size();
        result.median_abs_discrepancy = m % 2 == 1
                                            ? abs_disc[m / 2]
                                            : 0.5 * (abs_disc[m / 2 - 1] + abs_disc[m / 2]);
    }
    return result;
}

}  // namespace bfp
