#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bfp/model.hpp"
#include "bfp/power.hpp"

namespace bfp {

// Counter-based generator (Philox4x32-10) so that every replicate draws an
// independent, platform-stable stream addressed by (seed, replicate, draw).
// Replicates can therefore be partitioned arbitrarily without changing the
// aggregate.
inline constexpr const char* mc_generator_id = "philox4x32-10";

std::array<std::uint32_t, 4> philox4x32(std::uint64_t seed, std::uint64_t replicate,
                                        std::uint64_t draw);

// Uniform draw in the open interval (0, 1).
double mc_uniform(std::uint64_t seed, std::uint64_t replicate, std::uint64_t draw);

// Standard normal draw via the inverse distribution function.
double mc_normal(std::uint64_t seed, std::uint64_t replicate, std::uint64_t draw);

// One simulation condition. A truncated-t analysis prior selects the t-test
// path (raw group data of the given integer per-group size); the other priors
// simulate the estimate directly from its sampling distribution.
struct McCondition {
    TestSpec test;
    AnalysisPrior analysis;
    DesignPrior design;
    double n = 1.0;
    TTestKind t_kind = TTestKind::TwoSample;
};

struct McConfig {
    McCondition condition;
    long long replicates = 50000;
    std::uint64_t seed = 0;
};

struct McReport {
    double empirical_power = 0.0;
    double mc_se = 0.0;  // sqrt(p (1-p) / replicates) from the empirical power
    double analytic_power = 0.0;
    double discrepancy = 0.0;  // empirical - analytic
    long long successes = 0;
    long long replicates = 0;
    std::uint64_t seed = 0;
};

// Draws the parameter from the design prior and the data given the parameter,
// evaluates the analysis Bayes factor per draw, and counts compelling
// evidence. Deterministic given the seed.
McReport simulate_power(const McConfig& config);

// One cell of a validation grid: the sample size for the target power is
// computed per cell, infeasible or degenerate cells are marked and skipped.
struct McCell {
    TestSpec test;
    AnalysisPrior analysis;
    DesignPrior design;
};

struct McValidateCell {
    bool feasible = false;
    double n = 0.0;
    std::optional<McReport> report;
};

struct McValidateResult {
    std::vector<McValidateCell> cells;
    double max_abs_discrepancy = 0.0;
    double median_abs_discrepancy = 0.0;
    int feasible_cells = 0;
    int skipped_cells = 0;
};

McValidateResult mc_validate(std::span<const McCell> grid, double target_power,
                             long long replicates, std::uint64_t seed);

}  // namespace bfp
