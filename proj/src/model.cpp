#include "bfp/model.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace bfp {

void TestSpec::validate() const {
    if (!(threshold > 0.0))
        throw std::invalid_argument("TestSpec: threshold k must be positive");
    if (!(unit_variance > 0.0))
        throw std::invalid_argument("TestSpec: unit variance must be positive");
    if (!std::isfinite(null_value))
        throw std::invalid_argument("TestSpec: null value must be finite");
    if (direction == Direction::EvidenceForH1 && threshold >= 1.0)
        throw std::invalid_argument(
            "TestSpec: evidence for H1 requires k < 1 (pass direction h0 for k > 1)");
    if (direction == Direction::EvidenceForH0 && threshold <= 1.0)
        throw std::invalid_argument(
            "TestSpec: evidence for H0 requires k > 1 (pass direction h1 for k < 1)");
}

namespace {

constexpr std::array<UnitVariancePreset, 8> kPresets{{
    {EstimateKind::Mean, "mean", "Continuous", "Mean", "Sample size", "sigma^2", true},
    {EstimateKind::MeanDifference, "meandiff", "Continuous", "Mean difference",
     "Sample size per group", "2*sigma^2", true},
    {EstimateKind::StandardizedMeanDifference, "smd", "Continuous",
     "Standardized mean difference", "Sample size per group", "2", false},
    {EstimateKind::ZTransformedCorrelation, "zcorr", "Continuous",
     "z-transformed correlation", "Sample size minus 3", "1", false},
    {EstimateKind::ArcsineSquareRootDifference, "arcsine", "Binary",
     "Arcsine square root difference", "Sample size per group", "1/2", false},
    {EstimateKind::LogOddsRatio, "logor", "Binary", "Log odds ratio",
     "Total number of events", "4", false},
    {EstimateKind::LogHazardRatio, "loghr", "Survival", "Log hazard ratio",
     "Total number of events", "4", false},
    {EstimateKind::LogRateRatio, "logrr", "Count", "Log rate ratio",
     "Total count", "4", false},
}};

}  // namespace

std::span<const UnitVariancePreset> unit_variance_presets() { return kPresets; }

const UnitVariancePreset& preset_for(EstimateKind kind) {
    for (const auto& p : kPresets)
        if (p.kind == kind) return p;
    throw std::invalid_argument("unknown estimate kind");
}

std::optional<EstimateKind> preset_by_id(std::string_view id) {
    for (const auto& p : kPresets)
        if (p.id == id) return p.kind;
    return std::nullopt;
}

double unit_variance_for(EstimateKind kind, std::optional<double> sigma) {
    const auto require_sigma = [&]() {
        if (!sigma || !(*sigma > 0.0))
            throw std::invalid_argument(
                "unit_variance_for: this estimate kind needs a positive sigma");
        return *sigma;
    };
    switch (kind) {
        case EstimateKind::Mean: {
            const double s = require_sigma();
            return s * s;
        }
        case EstimateKind::MeanDifference: {
            const double s = require_sigma();
            return 2.0 * s * s;
        }
        case EstimateKind::StandardizedMeanDifference:
            return 2.0;
        case EstimateKind::ZTransformedCorrelation:
            return 1.0;
        case EstimateKind::ArcsineSquareRootDifference:
            return 0.5;
        case EstimateKind::LogOddsRatio:
        case EstimateKind::LogHazardRatio:
        case EstimateKind::LogRateRatio:
            return 4.0;
    }
    throw std::invalid_argument("unknown estimate kind");
}

double predictive_sd(const DesignPrior& design, double n, double unit_variance) {
    if (!(n > 0.0)) throw std::invalid_argument("predictive_sd: n must be positive");
    if (!(unit_variance > 0.0))
        throw std::invalid_argument("predictive_sd: unit variance must be positive");
    validate(design);
    return std::sqrt(design.sd * design.sd + unit_variance / n);
}

namespace {

double parse_positive_number(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw std::invalid_argument("parse_threshold: malformed " + std::string(what) +
                                    " '" + std::string(text) + "'");
    if (!(value > 0.0))
        throw std::invalid_argument("parse_threshold: " + std::string(what) +
                                    " must be positive, got '" + std::string(text) + "'");
    return value;
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

double parse_threshold(std::string_view text) {
    const std::string_view s = trimmed(text);
    if (s.empty()) throw std::invalid_argument("parse_threshold: empty threshold");
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return parse_positive_number(s, "threshold");
    const double num = parse_positive_number(trimmed(s.substr(0, slash)), "numerator");
    const double den = parse_positive_number(trimmed(s.substr(slash + 1)), "denominator");
    return num / den;
}

void validate(const AnalysisPrior& prior) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointPrior>) {
                if (!std::isfinite(p.mean))
                    throw std::invalid_argument("point prior mean must be finite");
            } else if constexpr (std::is_same_v<T, NormalPrior>) {
                if (!(p.sd > 0.0))
                    throw std::invalid_argument("normal prior sd must be positive");
            } else if constexpr (std::is_same_v<T, TruncatedTPrior>) {
                if (!(p.scale > 0.0) || !(p.df > 0.0))
                    throw std::invalid_argument("t prior scale and df must be positive");
                if (!(p.lower < p.upper))
                    throw std::invalid_argument("t prior requires lower < upper");
            } else {
                if (!(p.spread > 0.0))
                    throw std::invalid_argument("normal moment prior spread must be positive");
            }
        },
        prior);
}

void validate(const DesignPrior& prior) {
    if (!(prior.sd >= 0.0) || !std::isfinite(prior.mean) || !std::isfinite(prior.sd))
        throw std::invalid_argument("design prior requires finite mean and sd >= 0");
}

}  // namespace bfp
