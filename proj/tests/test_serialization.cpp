#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "qapprox/boosting.hpp"
#include "qapprox/errors.hpp"
#include "qapprox/grover_threshold.hpp"
#include "qapprox/serialization.hpp"

using namespace qapprox;

TEST_SUITE("serialization") {
  TEST_CASE("round trip preserves the output distribution") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const auto a = oracle::random_algorithm(rng, 5, 6, 3, 10);
      const auto f = oracle::random_input(rng, 5);
      const std::string doc = algorithm_to_json(a);
      const auto b = algorithm_from_json(doc);
      CHECK(b.num_queries() == a.num_queries());
      CHECK(total_variation(run_algorithm(a, f).distribution, run_algorithm(b, f).distribution) <
            1e-12);
      CHECK(algorithm_to_json(b) == doc);
    }
  }

  TEST_CASE("grover stage round trip") {
    MeasuredAlgorithm a;
    a.stages = {grover_stage(marking_query(3, {0, 1, 2, 3, 4, 5, 6, 7}, 0.5), 2)};
    a.selectors = {MeasuredAlgorithm::constant_start(1)};
    a.output = [](OutcomeSpan xs) { return Element{static_cast<double>(xs[0] >> 1)}; };
    const auto b = algorithm_from_json(algorithm_to_json(a, 2));
    const InputFunction f{{0, 0, 0, 1, 0, 0, 0, 0}, "f"};
    CHECK(run_algorithm(b, f).distribution.probability_of({3.0}) ==
          doctest::Approx(run_algorithm(a, f).distribution.probability_of({3.0})));
  }

  TEST_CASE("custom beta maps are rejected") {
    auto a = failure_mock(0.25);
    a.stages[0].query.beta = BetaMap(BetaCustom{[](double) { return BasisIndex{0}; }});
    CHECK_THROWS_AS(algorithm_to_json(a), StructuralError);
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(algorithm_from_json("{"), StructuralError);
    CHECK_THROWS_AS(algorithm_from_json(R"({"schema":"other"})"), StructuralError);
    CHECK_THROWS_AS(algorithm_from_json(R"({"schema":"qapprox.algorithm","version":99})"),
                    StructuralError);
  }
}
