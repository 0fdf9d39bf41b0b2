#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bfp/model.hpp"

using namespace bfp;

TEST_CASE("unit variance presets reproduce the reference table") {
    const auto presets = unit_variance_presets();
    REQUIRE(presets.size() == 8);

    CHECK(unit_variance_for(EstimateKind::Mean, 2.0) == 4.0);
    CHECK(unit_variance_for(EstimateKind::MeanDifference, 15.0) == 450.0);
    CHECK(unit_variance_for(EstimateKind::StandardizedMeanDifference) == 2.0);
    CHECK(unit_variance_for(EstimateKind::ZTransformedCorrelation) == 1.0);
    CHECK(unit_variance_for(EstimateKind::ArcsineSquareRootDifference) == 0.5);
    CHECK(unit_variance_for(EstimateKind::LogOddsRatio) == 4.0);
    CHECK(unit_variance_for(EstimateKind::LogHazardRatio) == 4.0);
    CHECK(unit_variance_for(EstimateKind::LogRateRatio) == 4.0);

    CHECK(preset_for(EstimateKind::ZTransformedCorrelation).n_interpretation ==
          "Sample size minus 3");
    CHECK(preset_for(EstimateKind::LogOddsRatio).n_interpretation ==
          "Total number of events");
    CHECK(preset_for(EstimateKind::MeanDifference).n_interpretation ==
          "Sample size per group");
    CHECK(preset_by_id("smd") == EstimateKind::StandardizedMeanDifference);
    CHECK(!preset_by_id("nope").has_value());

    CHECK_THROWS_AS(unit_variance_for(EstimateKind::Mean), std::invalid_argument);
    CHECK_THROWS_AS(unit_variance_for(EstimateKind::MeanDifference, -1.0),
                    std::invalid_argument);
}

TEST_CASE("predictive sd") {
    CHECK(predictive_sd({0.0, 0.0}, 4.0, 2.0) == doctest::Approx(std::sqrt(0.5)));
    CHECK(predictive_sd({0.0, 2.0}, 1e12, 450.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(predictive_sd({0.0, 0.1}, 100.0, 2.0) == doctest::Approx(std::sqrt(0.03)));
    CHECK_THROWS_AS(predictive_sd({0.0, 0.1}, -3.0, 2.0), std::invalid_argument);

    // nonincreasing in n, approaching the design sd
    double prev = 1e300;
    for (double n = 1.0; n < 1e9; n *= 3.7) {
        const double s = predictive_sd({0.3, 0.25}, n, 2.0);
        CHECK(s <= prev + 1e-15);
        prev = s;
    }
    CHECK(prev == doctest::Approx(0.25).epsilon(1e-4));
}

TEST_CASE("threshold parsing") {
    CHECK(parse_threshold("1/10") == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(parse_threshold("3") == 3.0);
    CHECK(parse_threshold("1/6") == doctest::Approx(0.1666666666667).epsilon(1e-10));
    CHECK(parse_threshold(" 1 / 3 ") == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(parse_threshold("0.25") == 0.25);
    CHECK_THROWS_AS(parse_threshold(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold("1/0x3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold("-1/3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold("1/-3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_threshold("0"), std::invalid_argument);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> digits(1, 9999);
    for (int i = 0; i < 200; ++i) {
        const int p = digits(rng), q = digits(rng);
        const std::string text = std::to_string(p) + "/" + std::to_string(q);
        CHECK(parse_threshold(text) ==
              doctest::Approx(double(p) / double(q)).epsilon(1e-12));
    }
}

TEST_CASE("test spec validation") {
    TestSpec spec;
    spec.threshold = 0.1;
    spec.direction = Direction::EvidenceForH1;
    CHECK_NOTHROW(spec.validate());

    spec.threshold = 3.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.direction = Direction::EvidenceForH0;
    CHECK_NOTHROW(spec.validate());
    spec.threshold = 0.5;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.threshold = -1.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.threshold = 3.0;
    spec.unit_variance = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("prior validation") {
    CHECK_NOTHROW(validate(AnalysisPrior{PointPrior{0.3}}));
    CHECK_THROWS_AS(validate(AnalysisPrior{NormalPrior{0.0, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(validate(AnalysisPrior{TruncatedTPrior{0.0, 1.0, 1.0, 2.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(AnalysisPrior{NormalMomentPrior{-0.1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(DesignPrior{0.0, -0.5}), std::invalid_argument);
    CHECK_NOTHROW(validate(DesignPrior{0.5, 0.0}));
}
