#include <doctest.h>

#include "voter/channel.hpp"
#include "voter/errors.hpp"

using namespace voter;

TEST_SUITE("channel") {
  TEST_CASE("error probability and capacity") {
    CHECK(error_probability({0.1, 1}) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(capacity({0.1, 1}) == doctest::Approx(0.5310044064107189).epsilon(1e-13));
    CHECK(error_probability({0.1, 3}) == doctest::Approx(0.244).epsilon(1e-14));
    CHECK(capacity({0.1, 3}) == doctest::Approx(0.19837089841438815).epsilon(1e-12));
    CHECK(capacity({0.01, 10}) == doctest::Approx(0.5586636640434559).epsilon(1e-12));
    CHECK(capacity({0.05, 50}) == doctest::Approx(1.916008404756475e-05).epsilon(1e-9));
  }

  TEST_CASE("limits and monotonicity") {
    CHECK(capacity({0.0, 7}) == 1.0);
    CHECK(capacity({0.5, 1}) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    for (double e : {0.01, 0.05, 0.1}) {
      double prev = 1.0;
      for (std::size_t m = 1; m <= 50; ++m) {
        const double c = capacity({e, m});
        CHECK(c <= prev);
        CHECK(c >= 0.0);
        prev = c;
      }
    }
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(capacity({0.1, 0}), InvalidArgument);
    CHECK_THROWS_AS(capacity({0.7, 2}), DomainError);
    CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
  }
}
