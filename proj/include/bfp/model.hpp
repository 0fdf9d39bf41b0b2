#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace bfp {

// Priors on the parameter under H1 used inside the Bayes factor. A point
// prior is the sd -> 0 limit of the normal prior; the normal moment prior is
// located at the test's null value by construction.
struct PointPrior {
    double mean = 0.0;
};

struct NormalPrior {
    double mean = 0.0;
    double sd = 1.0;  // > 0
};

struct TruncatedTPrior {
    double location = 0.0;
    double scale = 1.0;  // > 0
    double df = 1.0;     // > 0
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

struct NormalMomentPrior {
    double spread = 1.0;  // > 0; modes sit at null +- spread * sqrt(2)
};

using AnalysisPrior =
    std::variant<PointPrior, NormalPrior, TruncatedTPrior, NormalMomentPrior>;

// Prior used at the design stage. sd == 0 denotes a point design prior
// (conditional power), sd > 0 a normal design prior (predictive power).
struct DesignPrior {
    double mean = 0.0;
    double sd = 0.0;  // >= 0
    bool is_point() const { return sd == 0.0; }
};

enum class Direction { EvidenceForH1, EvidenceForH0 };

// Null value, evidence threshold with orientation, and the variance of one
// effective observation for the planned test.
struct TestSpec {
    double null_value = 0.0;
    double threshold = 0.1;  // k
    Direction direction = Direction::EvidenceForH1;
    double unit_variance = 2.0;
    std::string parameter_kind = "standardized mean difference";

    // Throws std::invalid_argument on an inconsistent spec (k <= 0, unit
    // variance <= 0, or orientation inconsistent with k relative to 1).
    void validate() const;
};

// Rows of the unit-variance preset table for common estimate types.
enum class EstimateKind {
    Mean,
    MeanDifference,
    StandardizedMeanDifference,
    ZTransformedCorrelation,
    ArcsineSquareRootDifference,
    LogOddsRatio,
    LogHazardRatio,
    LogRateRatio,
};

struct UnitVariancePreset {
    EstimateKind kind;
    std::string_view id;  // CLI selector
    std::string_view outcome;
    std::string_view estimate;
    std::string_view n_interpretation;
    std::string_view unit_variance_rule;
    bool needs_sigma;
};

std::span<const UnitVariancePreset> unit_variance_presets();
const UnitVariancePreset& preset_for(EstimateKind kind);
std::optional<EstimateKind> preset_by_id(std::string_view id);

// Unit variance of one effective observation for the given estimate kind.
// sigma is the standard deviation of one continuous observation and is
// required for the mean and mean-difference rows.
double unit_variance_for(EstimateKind kind, std::optional<double> sigma = {});

// Standard deviation of the predictive distribution of the future estimate,
// sqrt(design_sd^2 + unit_variance / n).
double predictive_sd(const DesignPrior& design, double n, double unit_variance);

// Parses a positive decimal or a fraction "p/q" of positive decimals.
double parse_threshold(std::string_view text);

void validate(const AnalysisPrior& prior);
void validate(const DesignPrior& prior);

}  // namespace bfp
