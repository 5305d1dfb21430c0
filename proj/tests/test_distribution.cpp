#include <catch2/catch.hpp>

#include <cmath>

#include "rdcf/distribution.hpp"
#include "rdcf/quadrature.hpp"

using namespace rdcf;

namespace {
const RateSet kRates = RateSet::wifi_80211a();
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("quadrature on smooth integrands") {
  CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) == Approx(1.0 / 3).epsilon(1e-12));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI) == Approx(2.0).epsilon(1e-10));
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0) ==
        Approx(1.0).epsilon(1e-9));
  CHECK(integrate_to_infinity([](double x) { return std::exp(-x); }, 2.0) ==
        Approx(std::exp(-2.0)).epsilon(1e-9));
}

TEST_CASE("stock rate distributions") {
  const auto equal = canonical_distribution(DistributionKind::kEqual, kRates);
  for (double p : equal.probs) CHECK(p == Approx(0.125));

  const auto prop = canonical_distribution(DistributionKind::kProportional, kRates);
  CHECK(prop.probs[7] / prop.probs[0] == Approx(54.0 / 6.0).epsilon(1e-12));

  const auto inv = canonical_distribution(DistributionKind::kInverse, kRates);
  CHECK(inv.probs[0] / inv.probs[7] == Approx(9.0).epsilon(1e-12));

  for (const auto& d : {equal, prop, inv}) {
    double sum = 0.0;
    for (double p : d.probs) sum += p;
    CHECK(sum == Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("distribution validation") {
  CHECK_THROWS_AS(RateDistribution({0.5, 0.6}), std::invalid_argument);
  CHECK_THROWS_AS(RateDistribution({-0.1, 1.1}), std::invalid_argument);
  CHECK_THROWS_AS(RateDistribution(std::vector<double>{}), std::invalid_argument);
  CHECK_NOTHROW(RateDistribution({0.25, 0.75}));
  const auto hot = RateDistribution::one_hot(2, 4);
  CHECK(hot.probs == std::vector<double>{0, 0, 1, 0});
}

TEST_CASE("snr thresholds map to mode probabilities") {
  auto unit_exp = [](double g) { return std::exp(-g); };

  SECTION("single state takes all the mass") {
    const auto d = rate_distribution_from_snr({0.0, kInf}, unit_exp);
    REQUIRE(d.modes() == 1);
    CHECK(d.probs[0] == Approx(1.0).epsilon(1e-9));
  }

  SECTION("exponential pdf split at ln 2") {
    const auto d = rate_distribution_from_snr({0.0, std::log(2.0), kInf}, unit_exp);
    REQUIRE(d.modes() == 2);
    CHECK(d.probs[0] == Approx(0.5).epsilon(1e-9));
    CHECK(d.probs[1] == Approx(0.5).epsilon(1e-9));
  }

  SECTION("all mass below the first threshold") {
    // Density concentrated on (0, 1); thresholds put everything in mode 0.
    auto boxed = [](double g) { return g < 1.0 ? 1.0 : 0.0; };
    const auto d = rate_distribution_from_snr({0.0, 1.0, 2.0, kInf}, boxed);
    CHECK(d.probs[0] == Approx(1.0).epsilon(1e-9));
    CHECK(d.probs[1] == Approx(0.0).margin(1e-9));
    CHECK(d.probs[2] == Approx(0.0).margin(1e-9));
  }

  SECTION("output is a probability vector") {
    auto rayleigh = [](double g) { return g * std::exp(-g * g / 2.0); };
    const auto d = rate_distribution_from_snr({0.0, 0.5, 1.0, 2.0, kInf}, rayleigh);
    double sum = 0.0;
    for (double p : d.probs) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum == Approx(1.0).epsilon(1e-9));
  }

  SECTION("rejects bad inputs") {
    CHECK_THROWS_AS(rate_distribution_from_snr({0.0, 2.0, 1.0, kInf}, unit_exp),
                    std::invalid_argument);
    CHECK_THROWS_AS(rate_distribution_from_snr({0.5, kInf}, unit_exp), std::invalid_argument);
    CHECK_THROWS_AS(rate_distribution_from_snr({0.0, 1.0}, unit_exp), std::invalid_argument);
    auto half = [](double g) { return 0.5 * std::exp(-g); };
    CHECK_THROWS_AS(rate_distribution_from_snr({0.0, kInf}, half), std::invalid_argument);
  }
}
