#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bfp/bf.hpp"
#include "bfp/mc.hpp"
#include "bfp/numerics.hpp"
#include "bfp/power.hpp"
#include "bfp/ssd.hpp"

using namespace bfp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

TestSpec smd_spec(double k, Direction dir = Direction::EvidenceForH1) {
    TestSpec spec;
    spec.threshold = k;
    spec.direction = dir;
    spec.unit_variance = 2.0;
    return spec;
}

}  // namespace

TEST_CASE("philox4x32-10 known-answer vectors") {
    const auto zeros = philox4x32(0, 0, 0);
    CHECK(zeros[0] == 0x6627e8d5u);
    CHECK(zeros[1] == 0xe169c58du);
    CHECK(zeros[2] == 0xbc57ac4cu);
    CHECK(zeros[3] == 0x9b00dbd8u);

    const auto ones = philox4x32(0xFFFFFFFFFFFFFFFFull, 0xFFFFFFFFFFFFFFFFull,
                                 0xFFFFFFFFFFFFFFFFull);
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    const auto pi = philox4x32(0x299F31D0A4093822ull, 0x0370734413198A2Eull,
                               0x85A308D3243F6A88ull);
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("uniform draws live strictly inside the unit interval") {
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = mc_uniform(3, i, 0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::isfinite(mc_normal(3, 0, 0)));
}

TEST_CASE("simulation is deterministic for a fixed seed") {
    McConfig config;
    config.condition = {smd_spec(0.1), NormalPrior{0.0, 1.0}, DesignPrior{0.5, 0.1},
                        60.0};
    config.replicates = 20000;
    config.seed = 1234;
    const auto a = simulate_power(config);
    const auto b = simulate_power(config);
    CHECK(a.successes == b.successes);
    CHECK(a.empirical_power == b.empirical_power);
    CHECK(a.mc_se == b.mc_se);

    config.seed = 1235;
    const auto c = simulate_power(config);
    CHECK(c.successes != a.successes);
}

TEST_CASE("parallel partition of replicates reproduces the serial count") {
    // the counter-based addressing makes every replicate independent of the
    // processing order, so counting even and odd replicates separately must
    // give the serial total
    const TestSpec spec = smd_spec(0.1);
    const DesignPrior design{0.4, 0.2};
    const NormalPrior prior{0.0, 1.0};
    const double n = 45.0;
    const std::uint64_t seed = 99;
    const long long reps = 5001;

    McConfig config;
    config.condition = {spec, prior, design, n};
    config.replicates = reps;
    config.seed = seed;
    const auto serial = simulate_power(config);

    const double se = std::sqrt(spec.unit_variance / n);
    long long partitions[2] = {0, 0};
    for (long long rep = 0; rep < reps; ++rep) {
        const double theta = design.mean + design.sd * mc_normal(seed, rep, 0);
        const double est = theta + se * mc_normal(seed, rep, 1);
        const auto bf = bf01(EstimateInput::from_se(est, se), spec.null_value,
                             AnalysisPrior{prior});
        if (bf.log_value <= std::log(spec.threshold)) ++partitions[rep % 2];
    }
    CHECK(partitions[0] + partitions[1] == serial.successes);
}

TEST_CASE("calibration under the point null") {
    TestSpec spec = smd_spec(0.1);
    McConfig config;
    config.condition = {spec, PointPrior{0.5}, DesignPrior{0.0, 0.0}, 100.0};
    config.replicates = 100000;
    config.seed = 5;
    const auto report = simulate_power(config);
    CHECK(report.empirical_power < 0.05);
    CHECK(std::fabs(report.discrepancy) <= 3.0 * std::max(report.mc_se, 1e-4));
}

TEST_CASE("t path simulation is deterministic and close to the analytic value") {
    const TruncatedTPrior one_sided{0.0, 1.0 / std::sqrt(2.0), 1.0, 0.0, kInf};
    McConfig config;
    config.condition = {smd_spec(1.0 / 6.0), one_sided, DesignPrior{0.5, 0.0}, 30.0,
                        TTestKind::TwoSample};
    config.replicates = 2000;
    config.seed = 17;
    const auto a = simulate_power(config);
    const auto b = simulate_power(config);
    CHECK(a.successes == b.successes);
    CHECK(std::fabs(a.discrepancy) <= 4.0 * a.mc_se + 0.01);
    // the t path needs integral per-group sizes
    config.condition.n = 30.5;
    CHECK_THROWS_AS(simulate_power(config), std::invalid_argument);
}

TEST_CASE("coverage across random conditions") {
    std::mt19937_64 rng(314159);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int within = 0, total = 0;
    while (total < 100) {
        TestSpec spec = smd_spec(0.03 + 0.5 * unif(rng));
        if (unif(rng) < 0.25) {
            spec.threshold = 1.0 / spec.threshold;
            spec.direction = Direction::EvidenceForH0;
        }
        const DesignPrior design{-0.2 + unif(rng),
                                 unif(rng) < 0.5 ? 0.0 : 0.4 * unif(rng)};
        const double n = 5.0 + 200.0 * unif(rng);
        AnalysisPrior prior;
        const double pick = unif(rng);
        if (pick < 0.34) {
            const double mu = 0.2 + 0.8 * unif(rng);
            prior = PointPrior{mu};
        } else if (pick < 0.67) {
            prior = NormalPrior{0.5 * unif(rng), 0.15 + 0.8 * unif(rng)};
        } else {
            prior = NormalMomentPrior{0.15 + 0.6 * unif(rng)};
        }
        McConfig config;
        config.condition = {spec, prior, design, n};
        config.replicates = 10000;
        config.seed = 90000 + total;
        const auto report = simulate_power(config);
        // a 3-se band plus slack for powers near the boundary where the
        // binomial se collapses
        if (std::fabs(report.discrepancy) <= 3.0 * std::max(report.mc_se, 2e-4))
            ++within;
        ++total;
    }
    CHECK(within >= 97);
}

TEST_CASE("grid validation marks infeasible cells and aggregates the rest") {
    TestSpec spec = smd_spec(0.1);
    std::vector<McCell> grid;
    grid.push_back({spec, PointPrior{0.5}, DesignPrior{0.5, 0.0}});   // closed form
    grid.push_back({spec, NormalPrior{0.0, 1.0}, DesignPrior{0.5, 0.1}});  // search
    grid.push_back({spec, PointPrior{0.3}, DesignPrior{0.3, 0.2}});   // limit 0.773
    grid.push_back({spec, PointPrior{0.0}, DesignPrior{0.5, 0.0}});   // degenerate

    const auto result = mc_validate(grid, 0.80, 20000, 2026);
    REQUIRE(result.cells.size() == 4);
    CHECK(result.feasible_cells == 2);
    CHECK(result.skipped_cells == 2);
    CHECK(result.cells[0].feasible);
    CHECK(result.cells[1].feasible);
    CHECK(!result.cells[2].feasible);
    CHECK(!result.cells[3].feasible);
    for (int i : {0, 1}) {
        REQUIRE(result.cells[i].report.has_value());
        CHECK(result.cells[i].report->analytic_power ==
              doctest::Approx(0.80).epsilon(1e-6));
        CHECK(std::fabs(result.cells[i].report->discrepancy) <=
              4.0 * result.cells[i].report->mc_se);
    }
    const double d0 = std::fabs(result.cells[0].report->discrepancy);
    const double d1 = std::fabs(result.cells[1].report->discrepancy);
    CHECK(result.max_abs_discrepancy == doctest::Approx(std::max(d0, d1)));
    CHECK(result.median_abs_discrepancy == doctest::Approx(0.5 * (d0 + d1)));

    // a one-cell grid reports that cell's discrepancy as max and median
    const auto single = mc_validate(std::vector<McCell>{grid[0]}, 0.80, 20000, 2026);
    REQUIRE(single.cells[0].report.has_value());
    CHECK(single.max_abs_discrepancy ==
          doctest::Approx(std::fabs(single.cells[0].report->discrepancy)));
    CHECK(single.median_abs_discrepancy == doctest::Approx(single.max_abs_discrepancy));
}

TEST_CASE("two seeds disagree in detail but both stay calibrated") {
    TestSpec spec = smd_spec(0.1);
    std::vector<McCell> grid;
    grid.push_back({spec, NormalPrior{0.0, 1.0}, DesignPrior{0.5, 0.0}});
    grid.push_back({spec, PointPrior{0.6}, DesignPrior{0.6, 0.1}});
    const auto a = mc_validate(grid, 0.80, 30000, 1);
    const auto b = mc_validate(grid, 0.80, 30000, 2);
    CHECK(a.cells[0].report->successes != b.cells[0].report->successes);
    for (const auto& result : {a, b})
        for (const auto& cell : result.cells)
            if (cell.report)
                CHECK(std::fabs(cell.report->discrepancy) <= 3.0 * cell.report->mc_se);
}
