#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "qapprox/bounds_lab.hpp"
#include "qapprox/errors.hpp"

using namespace qapprox;

namespace {

const Exponent P1 = Exponent::finite(1);
const Exponent P2 = Exponent::finite(2);
const Exponent P4 = Exponent::finite(4);
const Exponent PI = Exponent::infinity();

std::vector<std::uint8_t> bits_of(std::uint64_t u, std::size_t L) {
  std::vector<std::uint8_t> b(L);
  for (std::size_t j = 0; j < L; ++j) b[j] = static_cast<std::uint8_t>((u >> j) & 1U);
  return b;
}

// Worst error of a zero-query algorithm that always outputs g, over the two levels.
double constant_output_error(const AdversarialFamily& fam, const std::vector<double>& g,
                             Exponent q) {
  double worst = 0.0;
  std::vector<double> d(fam.N);
  for (std::uint64_t u = 0; u < (std::uint64_t{1} << fam.L()); ++u) {
    const auto w = static_cast<std::size_t>(std::popcount(u));
    if (w != fam.l && w != fam.l_prime) continue;
    const auto f = fam.f(bits_of(u, fam.L()));
    for (std::size_t t = 0; t < fam.N; ++t) d[t] = f[t] - g[t];
    worst = std::max(worst, lp_norm(d, q));
  }
  return worst;
}

}  // namespace

TEST_SUITE("bounds_lab") {
  TEST_CASE("rho examples") {
    CHECK(rho_lb(4, 0, 1) == doctest::Approx(2.0));
    CHECK(rho_lb(16, 4, 5) == doctest::Approx(4.0 + std::sqrt(48.0)));
    CHECK(rho_lb(16, 5, 4) == rho_lb(16, 4, 5));
    CHECK(rho_lb(100, 10, 30) == doctest::Approx(std::sqrt(5.0) + std::sqrt(900.0) / 20.0));
  }

  TEST_CASE("spike families sit on the unit sphere") {
    for (Exponent p : {P1, P2, P4, PI}) {
      for (std::size_t l : {0, 1, 3}) {
        const auto fam = build_family(8, p, l);
        CHECK(fam.L() == 8);
        std::vector<std::uint8_t> u(8, 0);
        for (std::size_t j = 0; j <= l; ++j) u[j] = 1;
        CHECK(lp_norm(fam.f(u), p) == doctest::Approx(1.0));
      }
    }
    CHECK(build_family(8, P1, 0).psi[3][3] == doctest::Approx(8.0));
    CHECK(build_family(8, P2, 1).psi[0][0] == doctest::Approx(2.0));
    CHECK_THROWS_AS(build_family(8, P1, 0, 1.5), ValidationError);
  }

  TEST_CASE("condition I") {
    const auto spikes = condition_I_check(build_family(8, P2, 1));
    CHECK(spikes.pass);
    CHECK(spikes.exhaustive);
    for (std::size_t t = 0; t < 8; ++t) CHECK(spikes.controlling[t] == t);

    AdversarialFamily overlap;
    overlap.N = 4;
    overlap.psi = {{1, 1, 0, 0}, {0, 1, 0, 0}};
    const auto bad = condition_I_check(overlap);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->t == 1);

    AdversarialFamily single;
    single.N = 4;
    single.psi = {{1, 0, 0, 0}};
    const auto one = condition_I_check(single);
    CHECK(one.pass);
    CHECK(one.controlling[0] == 0);
    CHECK(one.controlling[2] == 1);
  }

  TEST_CASE("separation certificates") {
    const auto c1 = lemma9_certificate(build_family(8, PI, 0), 1, 1.0);
    CHECK(c1.applicable);
    CHECK(c1.method == "enumeration");
    CHECK(c1.rho == doctest::Approx(std::sqrt(8.0)));
    CHECK(c1.value == doctest::Approx(0.5));
    CHECK(lemma9_certificate(build_family(8, P1, 0), 2, 1.0).value == doctest::Approx(4.0));
    const auto closed = lemma9_certificate(build_family(16, P2, 1), 1, 1.0, P2);
    CHECK(closed.method == "closed-form");
    CHECK(closed.value == doctest::Approx(0.5 * std::pow(2.0, -0.5)));
    const auto no = lemma9_certificate(build_family(8, P1, 0), 3, 1.0);
    CHECK_FALSE(no.applicable);
    CHECK(no.value == 0.0);
  }

  TEST_CASE("zero-query algorithms respect the certificate") {
    for (std::size_t N : {2, 4, 8}) {
      for (Exponent p : {P1, P2, PI}) {
        for (Exponent q : {P2, PI}) {
          const auto fam = build_family(N, p, 0);
          const auto cert = lemma9_certificate(fam, 0, 1.0, q);
          REQUIRE(cert.applicable);
          std::vector<std::vector<double>> candidates{std::vector<double>(N, 0.0)};
          for (std::uint64_t u = 0; u < (std::uint64_t{1} << N); u += 3)
            candidates.push_back(fam.f(bits_of(u, N)));
          std::vector<double> half = fam.psi[0];
          for (double& v : half) v *= 0.5;
          candidates.push_back(half);
          for (const auto& g : candidates)
            CHECK(constant_output_error(fam, g, q) >= cert.value - 1e-12);
        }
      }
    }
  }

  TEST_CASE("embedding bounds") {
    const auto r = bound_Jpq({16, 16, P1, PI});
    CHECK(r.upper == doctest::Approx(std::pow(std::log2(6.0), 2.0)));
    CHECK(r.lower == doctest::Approx(1.0));
    CHECK(r.regime == "sqrt(N)<n<=cN");
    const auto small = bound_Jpq({2, 16, P1, P2});
    CHECK(small.regime == "n<=sqrt(N)");
    CHECK(small.upper == doctest::Approx(4.0));
    const auto flat = bound_Jpq({4, 16, P2, P1});
    CHECK(flat.regime == "p>=q");
    CHECK(flat.upper == 1.0);
    CHECK(bound_Jpq({4, 4, P1, PI}).guards.size() == 1);
  }

  TEST_CASE("bounds are ordered and decrease in n") {
    const std::vector<std::size_t> grid{4, 16, 64, 256, 1024};
    for (Exponent p : {P1, P2, P4, PI}) {
      for (Exponent q : {P1, P2, P4, PI}) {
        for (std::size_t N : grid) {
          double prev = std::numeric_limits<double>::infinity();
          for (std::size_t n : grid) {
            if (n > N) continue;
            const auto b = bound_Jpq({n, N, p, q});
            CHECK(b.lower <= b.upper * (1 + 1e-12));
            CHECK(b.upper <= prev * (1 + 1e-12));
            prev = b.upper;
          }
        }
      }
    }
  }

  TEST_CASE("summation bounds") {
    const auto inf = bound_SN({4, 16, PI});
    CHECK(inf.lower == 0.25);
    CHECK(inf.upper == 0.25);
    CHECK(bound_SN({8, 16, P1}).polynomial_rate == doctest::Approx(0.25));
    CHECK(bound_SN({4, 16, P1}).polynomial_rate == doctest::Approx(1.0));
    CHECK(bound_SN({2, 16, P2}).regime == "outside");
    const auto two = bound_SN({64, 1024, P2});
    CHECK(two.upper <= summation_refined_upper(64, 1024));
    CHECK(two.lower <= two.upper);
  }

  TEST_CASE("lambda") {
    CHECK(lambda_nN(1, 1) == doctest::Approx(2.0));
    CHECK(lambda_nN(3, 3) == doctest::Approx(3.0));
    CHECK(lambda_nN(4, 16) == doctest::Approx(2.0 + std::log2(std::log2(5.0)) + 2.0));
    CHECK_THROWS_AS(lambda_nN(8, 4), DomainError);
    CHECK(reduction_lower_bound(2.0, 0.5) == 1.0);
  }

  TEST_CASE("comparison table") {
    const auto rows = comparison_rows();
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].quantum == "N^{1/p-1/q}");
    CHECK(rows[1].quantum == "(N/n)^{2/p-2/q}");
    CHECK(rows[1].randomized == "N^{1/p-1/q}");
    CHECK(rows[2].deterministic == "1");
    CHECK(comparison_table(P1, PI, 4, 16).setting == rows[0].setting);
    CHECK(comparison_table(P1, PI, 5, 16).setting == rows[1].setting);
    CHECK(comparison_table(P2, P2, 5, 16).setting == rows[2].setting);
    const auto r = comparison_rates(P1, PI, 16, 16);
    CHECK(r.quantum == 1.0);
    CHECK(r.deterministic == 16.0);
    CHECK(theorem1_rate(16, 16, P1, PI) == 1.0);
  }

  TEST_CASE("envelope of the upper to lower ratio") {
    const std::vector<std::size_t> grid{4, 8, 16, 32, 64, 128, 256, 512, 1024};
    const auto fit = fit_envelope(P1, P2, grid);
    CHECK(fit.points == 45);
    CHECK(fit.alpha <= 4.0);
    CHECK(fit.C >= 1.0);
    CHECK(fit.max_ratio >= 1.0);
    CHECK(fit_envelope(P1, P2, {}).points == 0);
  }

  TEST_CASE("csv output") {
    CHECK(bounds_csv_header() == "p,q,n,N,regime,upper,lower,det_rate,rand_rate,quantum_rate");
    const auto row = bounds_csv_row({4, 16, P1, PI});
    CHECK(row.rfind("1,inf,4,16,n<=sqrt(N),", 0) == 0);
    CHECK(std::count(row.begin(), row.end(), ',') == 9);
  }

  TEST_CASE("constants") {
    RateQuery rq{4, 16, P1, PI};
    CHECK(rq.constant("nu1") == 24.0);
    CHECK_THROWS(rq.constant("nope"));
    rq.constants["c"] = 2.0;
    CHECK(bound_Jpq(rq).upper == doctest::Approx(2.0 * bound_Jpq({4, 16, P1, PI}).upper));
  }
}
