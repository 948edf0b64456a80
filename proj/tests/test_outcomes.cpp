#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "bsv/outcomes.hpp"

using namespace bsv;

TEST_CASE("enumeration order and counts", "[outcomes]") {
  const auto lam = enumerate(OutcomeSpace::collision_free(4, 2));
  REQUIRE(lam.size() == 6);
  REQUIRE(lam.front().occupations() == std::vector<int>{1, 1, 0, 0});
  REQUIRE(lam.back().occupations() == std::vector<int>{0, 0, 1, 1});

  const auto phi = enumerate(OutcomeSpace::full(2, 2));
  REQUIRE(phi.size() == 3);
  REQUIRE(phi[0].occupations() == std::vector<int>{2, 0});
  REQUIRE(phi[1].occupations() == std::vector<int>{1, 1});
  REQUIRE(phi[2].occupations() == std::vector<int>{0, 2});

  REQUIRE(enumerate(OutcomeSpace::full(20, 3)).size() == 1540);
}

TEST_CASE("closed-form sizes match enumeration exhaustively", "[outcomes]") {
  for (std::size_t m = 1; m <= 12; ++m) {
    for (std::size_t n = 0; n <= 5; ++n) {
      const OutcomeSpace full = OutcomeSpace::full(m, n);
      REQUIRE(enumerate(full).size() == full.size());
      if (n <= m) {
        const OutcomeSpace cf = OutcomeSpace::collision_free(m, n);
        REQUIRE(enumerate(cf).size() == cf.size());
      }
    }
  }
}

TEST_CASE("collision-free fraction bound", "[outcomes]") {
  for (std::size_t m = 7; m <= 200; m += 3) {
    for (std::size_t n = 1; n <= 6; ++n) {
      const double lam =
          static_cast<double>(OutcomeSpace::collision_free(m, n).size());
      const double phi = static_cast<double>(OutcomeSpace::full(m, n).size());
      const double bound =
          1.0 - static_cast<double>(n * n) / static_cast<double>(m);
      REQUIRE(lam / phi >= bound);
    }
  }
}

TEST_CASE("rank and unrank respect enumeration order", "[outcomes]") {
  for (const OutcomeSpace space :
       {OutcomeSpace::collision_free(6, 3), OutcomeSpace::full(5, 4),
        OutcomeSpace::full(4, 1), OutcomeSpace::collision_free(7, 7)}) {
    const auto all = enumerate(space);
    REQUIRE(all.size() == space.size());
    REQUIRE(rank(all.front(), space) == 0);
    REQUIRE(unrank(space.size() - 1, space) == all.back());
    for (std::uint64_t r = 0; r < all.size(); ++r) {
      REQUIRE(rank(all[static_cast<std::size_t>(r)], space) == r);
      REQUIRE(unrank(r, space) == all[static_cast<std::size_t>(r)]);
    }
  }
}

TEST_CASE("rank rejects outcomes outside the space", "[outcomes]") {
  const OutcomeSpace cf = OutcomeSpace::collision_free(4, 2);
  REQUIRE_THROWS_AS(rank(Outcome({2, 0, 0, 0}), cf), std::invalid_argument);
  REQUIRE_THROWS_AS(rank(Outcome({1, 1, 0}), cf), std::invalid_argument);
  REQUIRE_THROWS_AS(rank(Outcome({1, 1, 1, 0}), cf), std::invalid_argument);
  REQUIRE_THROWS_AS(unrank(6, cf), std::invalid_argument);
}

TEST_CASE("collision-free predicate and multiplicity factorial",
          "[outcomes]") {
  REQUIRE(is_collision_free(Outcome({1, 1, 0})));
  REQUIRE_FALSE(is_collision_free(Outcome({2, 0, 0})));
  REQUIRE(is_collision_free(Outcome({0, 0, 0})));  // n = 0, vacuous

  REQUIRE(multiplicity_factorial(Outcome({1, 0, 1, 1})) == 1);
  REQUIRE(multiplicity_factorial(Outcome({3, 1, 0})) == 6);
  REQUIRE(multiplicity_factorial(Outcome({2, 2, 0})) == 4);
}

TEST_CASE("negative occupations are rejected", "[outcomes]") {
  REQUIRE_THROWS_AS(Outcome({1, -1, 0}), std::invalid_argument);
}

TEST_CASE("enumeration guard names the computed size", "[outcomes]") {
  // C(104, 5) = 91'962'520 exceeds the 10^7 guard
  const OutcomeSpace big = OutcomeSpace::full(100, 5);
  try {
    enumerate(big);
    FAIL("expected resource_limit_error");
  } catch (const resource_limit_error& e) {
    REQUIRE(std::string(e.what()).find("91962520") != std::string::npos);
  }
}

TEST_CASE("zero-photon space has the single empty outcome", "[outcomes]") {
  const OutcomeSpace space = OutcomeSpace::full(5, 0);
  REQUIRE(space.size() == 1);
  const auto all = enumerate(space);
  REQUIRE(all.size() == 1);
  REQUIRE(all[0].photons() == 0);
  REQUIRE(all[0].modes() == 5);
  REQUIRE(rank(all[0], space) == 0);
}

TEST_CASE("outcome json round-trip", "[outcomes]") {
  const Outcome s({0, 2, 1, 0});
  const Outcome back = outcome_from_json(outcome_to_json(s));
  REQUIRE(back == s);
  REQUIRE(outcome_to_json(s).dump() == "[0,2,1,0]");
}

TEST_CASE("binomial guards against 64-bit overflow", "[outcomes]") {
  REQUIRE(binomial(6, 3) == 20);
  REQUIRE(binomial(205, 6) == 95746959700ULL);
  REQUIRE_THROWS_AS(binomial(200, 100), resource_limit_error);
}
