#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qapprox/boosting.hpp"
#include "qapprox/errors.hpp"
#include "qapprox/grover_threshold.hpp"
#include "qapprox/query_model.hpp"

using namespace qapprox;

namespace {

QuerySpec parity_spec() {
  QuerySpec q;
  q.m = 2;
  q.m_prime = 1;
  q.m_dblprime = 1;
  q.Z = {0, 1};
  q.tau = {0, 1};
  q.beta = BetaMap(BetaModulo{});
  return q;
}

MeasuredAlgorithm constant_algorithm(Element g) {
  NoMeasureAlgorithm s;
  s.query = parity_spec();
  s.unitaries = {StructuredUnitary::hadamard_block(2, 0, 2)};
  MeasuredAlgorithm a;
  a.stages = {s};
  a.selectors = {MeasuredAlgorithm::constant_start(0)};
  a.output = [g](OutcomeSpan) { return g; };
  return a;
}

}  // namespace

TEST_SUITE("query_model") {
  TEST_CASE("query action on basis states") {
    const InputFunction f{{1.0, 0.0}, "f"};
    const auto u = build_query_unitary(parity_spec(), f);
    CHECK(u.map_basis(0b00) == 0b01);  // |0>|0> -> |0>|1>
    CHECK(u.map_basis(0b11) == 0b11);  // |1>|1> -> |1>|1>
    CHECK(u.map_basis(0b10) == 0b10);
  }

  TEST_CASE("constant-zero beta gives the identity") {
    QuerySpec q = parity_spec();
    q.beta = BetaMap(BetaIndicator{10.0});
    const InputFunction f{{1.0, 0.5}, "f"};
    const auto u = build_query_unitary(q, f);
    for (BasisIndex b = 0; b < 4; ++b) CHECK(u.map_basis(b) == b);
  }

  TEST_CASE("2^{m''} applications return to the identity") {
    QuerySpec q;
    q.m = 5;
    q.m_prime = 2;
    q.m_dblprime = 3;
    q.Z = {0, 2, 3};
    q.tau = {0, 1, 2};
    q.beta = BetaMap(BetaEncode{2});
    const InputFunction f{{0.3, -1.2, 0.9}, "f"};
    const auto u = build_query_unitary(q, f);
    for (BasisIndex b = 0; b < 32; ++b) {
      BasisIndex c = b;
      for (int r = 0; r < 8; ++r) c = u.map_basis(c);
      CHECK(c == b);
    }
  }

  TEST_CASE("query unitaries are bijections and match the definition") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
      const int m = 2 + static_cast<int>(rng() % 11);
      QuerySpec q;
      q.m = m;
      q.m_prime = 1 + static_cast<int>(rng() % (m - 1));
      q.m_dblprime = 1 + static_cast<int>(rng() % (m - q.m_prime));
      for (BasisIndex i = 0; i < (BasisIndex{1} << q.m_prime); ++i) {
        if (rng() % 2 || i == 0) {
          q.Z.push_back(i);
          q.tau.push_back(rng() % 8);
        }
      }
      q.beta = oracle::random_beta(q.m_dblprime, rng);
      const auto f = oracle::random_input(rng, 8);
      const auto u = build_query_unitary(q, f);
      std::vector<bool> hit(std::size_t{1} << m, false);
      bool agree = true;
      for (BasisIndex b = 0; b < hit.size(); ++b) {
        const BasisIndex img = u.map_basis(b);
        REQUIRE(img < hit.size());
        CHECK_FALSE(hit[img]);
        hit[img] = true;
        agree = agree && img == oracle::query_image(q, f, b);
      }
      CHECK(agree);
    }
  }

  TEST_CASE("undefined input raises an input error") {
    const InputFunction f{{1.0}, "short"};
    CHECK_THROWS_AS(build_query_unitary(parity_spec(), f), InputError);
  }

  TEST_CASE("spec validation") {
    QuerySpec q = parity_spec();
    q.Z = {};
    q.tau = {};
    CHECK_THROWS_AS(q.validate(), StructuralError);
    q = parity_spec();
    q.m_dblprime = 2;
    CHECK_THROWS_AS(q.validate(), StructuralError);
    q = parity_spec();
    q.Z = {1, 0};
    CHECK_THROWS_AS(q.validate(), StructuralError);
    q = parity_spec();
    q.beta = BetaMap(BetaEncode{4});
    CHECK_THROWS_AS(q.validate(), StructuralError);
  }

  TEST_CASE("run_stage examples") {
    const InputFunction f{{0.0, 0.0}, "zero"};
    NoMeasureAlgorithm s;
    s.query = parity_spec();
    s.unitaries = {StructuredUnitary::identity(2)};
    CHECK(run_stage(s, f, 3).amplitude(3) == Complex(1.0));
    s.unitaries = {StructuredUnitary::hadamard_block(2, 0, 2)};
    const auto u = run_stage(s, f, 0);
    for (BasisIndex i = 0; i < 4; ++i) CHECK(std::abs(u.amplitude(i) - 0.5) < 1e-15);
  }

  TEST_CASE("one Grover iteration matches the dense simulation") {
    const InputFunction f{{0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0}, "one-marked"};
    const auto stage = grover_stage(marking_query(3, {0, 1, 2, 3, 4, 5, 6, 7}, 0.5), 1);
    QueryOracle o(f);
    const auto state = run_stage(stage, o, 1);
    CHECK(o.queries() == 1);
    const auto probs = oracle::stage_probabilities(stage, f, 1);
    for (BasisIndex i = 0; i < probs.size(); ++i)
      CHECK(std::abs(std::norm(state.amplitude(i)) - probs[i]) < 1e-12);
  }

  TEST_CASE("run_algorithm: constant output") {
    const auto r = run_algorithm(constant_algorithm({7.0}), InputFunction{{0.0, 0.0}, "f"});
    CHECK(r.distribution.support_size() == 1);
    CHECK(r.distribution.probability_of({7.0}) == doctest::Approx(1.0));
  }

  TEST_CASE("run_algorithm: adaptive second stage against the path oracle") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 40; ++trial) {
      const auto a = oracle::random_algorithm(rng, 4, 2, 2, 4);
      const auto f = oracle::random_input(rng, 4);
      const auto r = run_algorithm(a, f);
      CHECK(std::abs(r.distribution.total_mass() - 1.0) < 1e-9);
      CHECK(oracle::total_variation(oracle::run(a, f), r.distribution) < 1e-9);
    }
  }

  TEST_CASE("run_algorithm: quarter-failure mock") {
    const auto r = run_algorithm(failure_mock(0.25), InputFunction{{0.0}, "f"});
    CHECK(r.distribution.probability_of({0.0}) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.distribution.probability_of({1.0}) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(r.declared_queries == 1);
    CHECK(r.metered_queries_min == 1);
    CHECK(r.metered_queries_max == 1);
  }

  TEST_CASE("metered queries equal the declared count") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 40; ++trial) {
      const auto a = oracle::random_algorithm(rng, 6);
      const auto r = run_algorithm(a, oracle::random_input(rng, 6));
      CHECK(r.metered_queries_min == a.num_queries());
      CHECK(r.metered_queries_max == a.num_queries());
      CHECK(r.declared_queries == a.num_queries());
    }
  }

  TEST_CASE("path budget") {
    std::mt19937_64 rng(14);
    NoMeasureAlgorithm s;
    s.query = parity_spec();
    s.unitaries = {StructuredUnitary::hadamard_block(2, 0, 2)};
    MeasuredAlgorithm a;
    for (int l = 0; l < 4; ++l) {
      a.stages.push_back(s);
      a.selectors.push_back(MeasuredAlgorithm::constant_start(0));
    }
    a.output = [](OutcomeSpan xs) { return Element{static_cast<double>(xs[0])}; };
    RunOptions opt;
    opt.max_paths = 100;
    CHECK_THROWS_AS(run_algorithm(a, InputFunction{{0.0, 0.0}, "f"}, opt), ResourceError);
    opt.max_paths = 256;
    CHECK(run_algorithm(a, InputFunction{{0.0, 0.0}, "f"}, opt).paths == 256);
  }

  TEST_CASE("sample_algorithm") {
    const InputFunction f{{0.0}, "f"};
    const auto det = sample_algorithm(constant_algorithm({1.0}), InputFunction{{0.0, 0.0}, "f"},
                                      100, 5);
    CHECK(det.counts.size() == 1);
    const auto mock = failure_mock(0.25);
    const auto s1 = sample_algorithm(mock, f, 100000, 42);
    const double correct = static_cast<double>(s1.counts.at({0.0})) / 1e5;
    CHECK(correct >= 0.74);
    CHECK(correct <= 0.76);
    const auto s2 = sample_algorithm(mock, f, 100000, 42);
    CHECK(s1.counts == s2.counts);
    CHECK_THROWS_AS(sample_algorithm(mock, f, 0, 1), DomainError);
  }

  TEST_CASE("beta and gamma examples") {
    CHECK(beta_encode(-3.0, 4) == 0);
    CHECK(beta_encode(2.5, 4) == 15);
    CHECK(beta_encode(0.0, 4) == 8);
    CHECK(gamma_decode(8, 4) == 0.0);
    CHECK(gamma_decode(0, 4) == -2.0);
    CHECK(decode_resolution(4) == 0.25);
    CHECK_THROWS_AS(gamma_decode(16, 4), DomainError);
    CHECK_THROWS_AS(beta_encode(0.0, 3), DomainError);
  }

  TEST_CASE("round-trip sandwich for every even width") {
    std::mt19937_64 rng(15);
    for (int ms = 2; ms <= 20; ms += 2) {
      const double half = std::ldexp(1.0, ms / 2 - 1);
      const double step = decode_resolution(ms);
      std::uniform_real_distribution<double> u(-half, half);
      bool ok = true;
      for (int i = 0; i < 100000; ++i) {
        const double z = u(rng);
        const BasisIndex y = beta_encode(z, ms);
        const double g = gamma_decode(y, ms);
        ok = ok && y == oracle::encode(z, ms) && g <= z && z <= g + step;
      }
      CHECK(ok);
    }
  }

  TEST_CASE("mix_seed separates streams") {
    CHECK(mix_seed(1, 0) != mix_seed(1, 1));
    CHECK(mix_seed(1, 0) != mix_seed(2, 0));
    CHECK(mix_seed(9, 9) == mix_seed(9, 9));
  }
}
