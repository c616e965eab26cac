#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "qapprox/boosting.hpp"
#include "qapprox/bounds_lab.hpp"
#include "qapprox/composition.hpp"
#include "qapprox/errors.hpp"
#include "qapprox/experiments.hpp"
#include "qapprox/grover_threshold.hpp"
#include "qapprox/lp_spaces.hpp"
#include "qapprox/query_model.hpp"

namespace py = pybind11;
using namespace qapprox;

namespace {

// Accepts 2, 2.5, math.inf, "inf" or "2".
Exponent to_exponent(const py::object& o) {
  if (py::isinstance<py::str>(o)) return Exponent::parse(o.cast<std::string>());
  const double v = o.cast<double>();
  return std::isinf(v) ? Exponent::infinity() : Exponent::finite(v);
}

py::object from_exponent(Exponent p) {
  if (p.is_infinite()) return py::float_(INFINITY);
  return py::float_(p.value());
}

py::dict report_dict(const ThresholdRunReport& r) {
  py::dict d;
  py::list found;
  for (const auto& [i, y] : r.found) found.append(py::make_tuple(i, y));
  d["found"] = found;
  d["queries"] = r.queries_used;
  d["rounds"] = r.rounds;
  d["empty_rounds_rule"] = r.empty_rounds_rule;
  d["cardinality_bound"] = r.cardinality_bound;
  d["M"] = r.M;
  d["m_star"] = r.m_star;
  d["completed"] = r.completed;
  d["success"] = r.success ? py::cast(*r.success) : py::none();
  return d;
}

py::dict bound_dict(const BoundReport& b) {
  py::dict d;
  d["upper"] = b.upper;
  d["lower"] = b.lower;
  d["regime"] = b.regime;
  d["polynomial_rate"] = b.polynomial_rate;
  d["formulas"] = b.formulas;
  d["guards"] = b.guards;
  return d;
}

RateQuery rate_query(std::size_t n, std::size_t N, const py::object& p, const py::object& q) {
  RateQuery rq;
  rq.n = n;
  rq.N = N;
  rq.p = to_exponent(p);
  rq.q = to_exponent(q);
  return rq;
}

}  // namespace

PYBIND11_MODULE(_qapprox, m) {
  m.doc() = "Quantum query approximation of L_p embeddings, simulated exactly.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<InputError>(m, "InputError", base.ptr());
  py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  // lp spaces
  m.def("parse_exponent", [](const py::object& p) { return from_exponent(to_exponent(p)); },
        py::arg("p"));
  m.def(
      "lp_norm",
      [](const std::vector<double>& f, const py::object& p) {
        return lp_norm(f, to_exponent(p));
      },
      py::arg("f"), py::arg("p"), "Normalized p-norm ((1/N) sum |f|^p)^(1/p).");
  m.def(
      "threshold",
      [](const std::vector<double>& f, double M) {
        const auto g = threshold(LpVector(f), M);
        return std::vector<double>(g.values().begin(), g.values().end());
      },
      py::arg("f"), py::arg("M"));
  m.def(
      "tail_bound",
      [](const py::object& p, const py::object& q, double M) {
        return tail_bound(to_exponent(p), to_exponent(q), M);
      },
      py::arg("p"), py::arg("q"), py::arg("M"));
  m.def(
      "embedding_norm",
      [](std::size_t N, const py::object& p, const py::object& q) {
        return embedding_norm(N, to_exponent(p), to_exponent(q));
      },
      py::arg("N"), py::arg("p"), py::arg("q"));
  m.def(
      "ball_sample",
      [](std::size_t N, const py::object& p, std::size_t count, std::uint64_t seed) {
        std::vector<std::vector<double>> out;
        for (const auto& v : ball_sample(N, to_exponent(p), count, seed))
          out.emplace_back(v.values().begin(), v.values().end());
        return out;
      },
      py::arg("N"), py::arg("p"), py::arg("count"), py::arg("seed"));

  // query model
  m.def("beta_encode", &beta_encode, py::arg("z"), py::arg("m_star"));
  m.def("gamma_decode", &gamma_decode, py::arg("y"), py::arg("m_star"));

  // grover and threshold search
  m.def("grover_success_closed_form", &grover_success_closed_form, py::arg("N"), py::arg("k"),
        py::arg("iterations"));
  m.def(
      "grover_success_simulated",
      [](const std::vector<double>& f, double M, std::size_t iterations) {
        const int b = index_qubits_for(f.size());
        std::vector<std::size_t> active(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) active[i] = i;
        const auto stage = grover_stage(marking_query(b, active, M), iterations);
        const auto s = run_stage(stage, InputFunction{f, ""}, 1);
        double mass = 0.0;
        for (BasisIndex x = 0; x < (BasisIndex{1} << s.num_qubits()); ++x) {
          const std::size_t i = static_cast<std::size_t>(x >> 1);
          if (i < f.size() && std::abs(f[i]) >= M) mass += std::norm(s.amplitude(x));
        }
        return mass;
      },
      py::arg("f"), py::arg("M"), py::arg("iterations"),
      "Probability that measuring the Grover stage yields an entry with |f(i)| >= M.");
  m.def(
      "find_all_above",
      [](const std::vector<double>& f, double M, double fail_target, std::uint64_t seed,
         std::uint64_t max_queries) {
        QueryOracle oracle(InputFunction{f, ""});
        ThresholdOptions opt;
        opt.max_queries = max_queries;
        auto r = find_all_above(oracle, M, fail_target, seed, opt);
        evaluate_against(r, InputFunction{f, ""}, M);
        return report_dict(r);
      },
      py::arg("f"), py::arg("M"), py::arg("fail_target") = 0.25, py::arg("seed") = 0,
      py::arg("max_queries") = 0);
  m.def("choose_threshold",
        [](std::size_t N, std::size_t n, const py::object& p, double c_alg) {
          return choose_threshold(N, n, to_exponent(p), c_alg);
        },
        py::arg("N"), py::arg("n"), py::arg("p"), py::arg("c_alg") = 1.0);
  m.def(
      "approximate_embedding",
      [](const std::vector<double>& f, const py::object& p, const py::object& q, std::size_t n,
         std::uint64_t seed, double c_alg, double fail_target) {
        QueryOracle oracle(InputFunction{f, ""});
        const auto r =
            approximate_embedding(oracle, to_exponent(p), to_exponent(q), n, seed, c_alg,
                                  fail_target);
        py::dict d;
        d["branch"] = branch_name(r.branch);
        d["g"] = std::vector<double>(r.g.values().begin(), r.g.values().end());
        d["M"] = r.M;
        d["error_bound"] = r.error_bound;
        d["queries"] = oracle.queries();
        d["note"] = r.note;
        d["report"] = r.report ? py::object(report_dict(*r.report)) : py::none();
        return d;
      },
      py::arg("f"), py::arg("p"), py::arg("q"), py::arg("n"), py::arg("seed"),
      py::arg("c_alg") = 1.0, py::arg("fail_target") = 0.25);

  // boosting
  m.def("median", [](const std::vector<double>& v) { return median(v); }, py::arg("values"));
  m.def(
      "rho_select",
      [](const std::vector<std::vector<double>>& elements, const py::object& p) {
        const Exponent e = to_exponent(p);
        return rho_select_index(elements,
                                [e](std::span<const double> v) { return lp_norm(v, e); });
      },
      py::arg("elements"), py::arg("p") = py::float_(INFINITY),
      "Index minimizing the median distance to the others under the normalized p-norm.");
  m.def("binomial_upper_tail", &binomial_upper_tail, py::arg("n"), py::arg("p"), py::arg("k"));
  m.def("hoeffding_failure_bound", &hoeffding_failure_bound, py::arg("nu"));
  m.def(
      "boosted_failure_mock",
      [](double fail_probability, std::size_t nu, const std::string& selector) {
        Selector s;
        if (selector == "rho") s = Selector::rho();
        else if (selector == "median") s = Selector::componentwise_median();
        else throw ConfigError("selector must be rho or median");
        const auto a = boost(failure_mock(fail_probability), nu, s,
                             NormedOutputSpace::real_line());
        const auto dist = run_algorithm(a, InputFunction{{0.0}, ""}).distribution;
        py::dict d;
        for (const auto& [g, w] : dist.atoms()) d[py::float_(g.at(0))] = w;
        return d;
      },
      py::arg("fail_probability"), py::arg("nu"), py::arg("selector") = "rho",
      "Exact output distribution of nu boosted runs of the two-outcome mock.");

  // bounds
  m.def("rho_lb", &rho_lb, py::arg("L"), py::arg("l"), py::arg("l_prime"));
  m.def(
      "bound_Jpq",
      [](std::size_t n, std::size_t N, const py::object& p, const py::object& q) {
        return bound_dict(bound_Jpq(rate_query(n, N, p, q)));
      },
      py::arg("n"), py::arg("N"), py::arg("p"), py::arg("q"));
  m.def(
      "bound_SN",
      [](std::size_t n, std::size_t N, const py::object& p) {
        return bound_dict(bound_SN(rate_query(n, N, p, py::float_(INFINITY))));
      },
      py::arg("n"), py::arg("N"), py::arg("p"));
  m.def("comparison_rows", [] {
    py::list out;
    for (const auto& r : comparison_rows()) {
      py::dict d;
      d["setting"] = r.setting;
      d["deterministic"] = r.deterministic;
      d["randomized"] = r.randomized;
      d["quantum"] = r.quantum;
      out.append(d);
    }
    return out;
  });
  m.def(
      "spike_certificate",
      [](std::size_t N, const py::object& p, std::size_t l, std::size_t n, double c0,
         const py::object& q) {
        const auto fam = build_family(N, to_exponent(p), l);
        const auto cond = condition_I_check(fam);
        const auto c = lemma9_certificate(fam, n, c0, to_exponent(q));
        py::dict d;
        d["condition_I"] = cond.pass;
        d["applicable"] = c.applicable;
        d["value"] = c.value;
        d["rho"] = c.rho;
        d["threshold"] = c.threshold;
        d["method"] = c.method;
        return d;
      },
      py::arg("N"), py::arg("p"), py::arg("l"), py::arg("n"), py::arg("c0") = 1.0,
      py::arg("q") = py::float_(INFINITY),
      "Condition I and the separation certificate for the spike family at levels (l, l+1).");

  // composition
  m.def(
      "verify_toy_chain",
      [](std::uint64_t seed, bool random) {
        const auto in = random ? random_toy_plan_inputs(seed) : toy_plan_inputs();
        const auto r = verify_error_chain(make_plan(in), in.witnesses, in.theta1, 0.25);
        py::dict d;
        d["e_J"] = r.e_J;
        d["e_S"] = r.e_S;
        d["measured"] = r.measured;
        d["bound"] = r.bound;
        d["declared_queries"] = r.declared_queries;
        d["expected_queries"] = r.expected_queries;
        d["queries_ok"] = r.queries_ok;
        d["chain_ok"] = r.chain_ok;
        return d;
      },
      py::arg("seed") = 0, py::arg("random") = false);

  // experiments
  m.def(
      "run_experiment",
      [](const std::string& config_text) {
        const auto out = run_experiment(ExperimentConfig::parse(config_text));
        py::dict d;
        for (const auto& [name, content] : out.files) d[py::str(name)] = content;
        return d;
      },
      py::arg("config_text"), "Runs a key = value experiment config; returns {file: contents}.");
  m.def("experiment_commands", &experiment_commands);
}
