#include <doctest.h>

#include <cmath>

#include "qapprox/boosting.hpp"
#include "qapprox/errors.hpp"

using namespace qapprox;

namespace {

// Binomial tail by direct summation of n-choose-j terms.
double tail(std::size_t n, double p, std::size_t k) {
  double s = 0.0;
  for (std::size_t j = k; j <= n; ++j) {
    double c = 1.0;
    for (std::size_t i = 0; i < j; ++i) c = c * static_cast<double>(n - i) / (i + 1.0);
    s += c * std::pow(p, j) * std::pow(1.0 - p, n - j);
  }
  return s;
}

double abs_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

TEST_SUITE("boosting") {
  TEST_CASE("median examples") {
    CHECK(median(std::vector<double>{1, 2, 3}) == 2);
    CHECK(median(std::vector<double>{1, 2, 3, 4}) == 3);
    CHECK(median(std::vector<double>{3, 1, 2}) == 2);
    CHECK(median(std::vector<double>{5}) == 5);
    CHECK_THROWS_AS(median(std::vector<double>{}), DomainError);
  }

  TEST_CASE("componentwise median") {
    const std::vector<Element> e{{0, 0}, {1, 2}, {5, -1}};
    CHECK(median_componentwise(e) == Element{1, 0});
  }

  TEST_CASE("rho selector") {
    const std::vector<Element> e{{0}, {10}, {10.1}};
    CHECK(rho_select(e, abs_norm) == Element{10});
    CHECK(rho_select_index(e, abs_norm) == 1);
    const std::vector<Element> one{{4.5}};
    CHECK(rho_select(one, abs_norm) == Element{4.5});
  }

  TEST_CASE("space compatibility") {
    const auto p2 = NormedOutputSpace::lp(4, Exponent::finite(2));
    CHECK_THROWS_AS(check_compatible(Selector::componentwise_median(), p2), StructuralError);
    CHECK_THROWS_AS(check_compatible(Selector::projection(0.1), p2), StructuralError);
    CHECK_NOTHROW(check_compatible(Selector::rho(), p2));
    const auto inf = NormedOutputSpace::lp(4, Exponent::infinity());
    CHECK_NOTHROW(check_compatible(Selector::componentwise_median(), inf));
    CHECK_NOTHROW(check_compatible(Selector::projection(0.1), inf));
    CHECK_THROWS_AS(check_compatible(Selector::projection(0.0), inf), DomainError);
    CHECK(Selector::rho().error_constant() == 3.0);
    CHECK(Selector::componentwise_median().error_constant() == 1.0);
    CHECK(Selector::projection(0.5).error_constant() == 2.5);
  }

  TEST_CASE("norming family of L_1") {
    const auto s = NormedOutputSpace::lp(3, Exponent::finite(1));
    const Element g{0.3, -0.6, 0.9};
    CHECK(s.norming_sup(g) == doctest::Approx(s.norm(g)));
  }

  TEST_CASE("projection prefers listed candidates within the slack") {
    const auto s = NormedOutputSpace::l_infinity(2);
    const Element x{1.0, 2.0};
    CHECK(delta_projection(x, s, 0.1) == x);
    CHECK(psi_delta(std::vector<Element>{{0, 0}, {1, 2}, {5, -1}}, s, 0.1) == Element{1, 0});
  }

  TEST_CASE("boosting with one run is the original distribution") {
    const auto a = failure_mock(0.25);
    const auto b = boost(a, 1, Selector::rho(), NormedOutputSpace::real_line());
    const InputFunction f{{0.0}, "f"};
    CHECK(total_variation(run_algorithm(a, f).distribution, run_algorithm(b, f).distribution) <
          1e-15);
    CHECK(b.num_queries() == 1);
  }

  TEST_CASE("failure decays as the binomial tail") {
    const InputFunction f{{0.0}, "f"};
    for (std::size_t nu = 1; nu <= 9; nu += 2) {
      for (const auto& sel : {Selector::rho(), Selector::componentwise_median()}) {
        const auto b = boost(failure_mock(0.25), nu, sel, NormedOutputSpace::real_line());
        const auto r = run_algorithm(b, f);
        CHECK(r.declared_queries == nu);
        CHECK(r.distribution.probability_of({1.0}) ==
              doctest::Approx(tail(nu, 0.25, (nu + 1) / 2)).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("sums of algorithms") {
    const std::vector<MeasuredAlgorithm> parts{failure_mock(0.25, 1.0), failure_mock(0.25, 2.0)};
    const auto s = sum_algorithms(parts);
    CHECK(s.num_queries() == 2);
    const auto d = run_algorithm(s, InputFunction{{0.0}, "f"}).distribution;
    CHECK(d.probability_of({0.0}) == doctest::Approx(0.5625));
    CHECK(d.probability_of({1.0}) == doctest::Approx(0.1875));
    CHECK(d.probability_of({2.0}) == doctest::Approx(0.1875));
    CHECK(d.probability_of({3.0}) == doctest::Approx(0.0625));
  }

  TEST_CASE("lipschitz helpers") {
    const auto phi = [](const Element& g) { return Element{3.0 * g[0] + 1.0}; };
    const std::vector<Element> pts{{0.0}, {0.5}, {-2.0}};
    CHECK(estimate_lipschitz(phi, pts, abs_norm, abs_norm) == doctest::Approx(3.0));
    CHECK_THROWS_AS(lipschitz_postcompose(failure_mock(0.1), phi, -1.0), DomainError);
    const auto b = lipschitz_postcompose(failure_mock(0.1), phi, 3.0);
    CHECK(b.num_queries() == 1);
    const auto d = run_algorithm(b, InputFunction{{0.0}, "f"}).distribution;
    CHECK(d.probability_of({4.0}) == doctest::Approx(0.1));
  }

  TEST_CASE("tail helpers") {
    CHECK(hoeffding_failure_bound(8) == doctest::Approx(std::exp(-1.0)));
    CHECK(binomial_upper_tail(4, 0.5, 2) == doctest::Approx(11.0 / 16.0));
    CHECK(binomial_upper_tail(10, 0.3, 0) == 1.0);
    CHECK(binomial_upper_tail(10, 0.3, 11) == 0.0);
    for (std::size_t n : {5, 17, 32})
      for (std::size_t k = 0; k <= n; k += 3)
        CHECK(binomial_upper_tail(n, 0.25, k) == doctest::Approx(tail(n, 0.25, k)).epsilon(1e-10));
  }
}
