#include "qapprox/serialization.hpp"

#include <algorithm>
#include <memory>
#include <json.hpp>

#include "qapprox/errors.hpp"

namespace qapprox {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kMaxTable = std::uint64_t{1} << 16;

ordered_json complex_list(std::span<const Complex> values) {
  auto out = ordered_json::array();
  for (const auto& z : values) out.push_back({z.real(), z.imag()});
  return out;
}

std::vector<Complex> parse_complex_list(const ordered_json& j) {
  std::vector<Complex> out;
  for (const auto& z : j) out.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return out;
}

ordered_json beta_to_json(const BetaMap& beta) {
  return std::visit(
      [](const auto& k) -> ordered_json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, BetaEncode>) {
          return {{"kind", "encode"}, {"m_star", k.m_star}};
        } else if constexpr (std::is_same_v<T, BetaIndicator>) {
          return {{"kind", "indicator"}, {"threshold", k.threshold}};
        } else if constexpr (std::is_same_v<T, BetaModulo>) {
          return {{"kind", "modulo"}};
        } else if constexpr (std::is_same_v<T, BetaChunk>) {
          return {{"kind", "chunk"}, {"m_star", k.m_star}, {"shift", k.shift}, {"width", k.width}};
        } else {
          throw StructuralError("custom beta maps cannot be serialized");
        }
      },
      beta.kind());
}

BetaMap beta_from_json(const ordered_json& j) {
  const std::string kind = j.at("kind");
  if (kind == "encode") return BetaMap(BetaEncode{j.at("m_star").get<int>()});
  if (kind == "indicator") return BetaMap(BetaIndicator{j.at("threshold").get<double>()});
  if (kind == "modulo") return BetaMap(BetaModulo{});
  if (kind == "chunk") {
    return BetaMap(BetaChunk{j.at("m_star").get<int>(), j.at("shift").get<int>(),
                             j.at("width").get<int>()});
  }
  throw StructuralError("unknown beta kind '" + kind + "'");
}

ordered_json unitary_to_json(const StructuredUnitary& u) {
  const int m = u.num_qubits();
  return std::visit(
      [m, &u](const auto& k) -> ordered_json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseBlock>) {
          return {{"kind", "dense"},
                  {"first_qubit", k.first_qubit},
                  {"width", k.width},
                  {"matrix", complex_list(k.matrix)}};
        } else if constexpr (std::is_same_v<T, SingleQubitGate>) {
          return {{"kind", "single"}, {"qubit", k.qubit}, {"matrix", complex_list(k.matrix)}};
        } else if constexpr (std::is_same_v<T, BasisPermutation>) {
          if ((std::uint64_t{1} << m) > kMaxTable) {
            throw ResourceError("permutation too large to tabulate");
          }
          std::vector<BasisIndex> table(std::size_t{1} << m);
          for (BasisIndex i = 0; i < table.size(); ++i) table[i] = u.map_basis(i);
          return {{"kind", "permutation"}, {"table", table}};
        } else if constexpr (std::is_same_v<T, PhaseOracle>) {
          if ((std::uint64_t{1} << m) > kMaxTable) {
            throw ResourceError("phase predicate too large to tabulate");
          }
          std::vector<BasisIndex> marked;
          for (BasisIndex i = 0; i < (BasisIndex{1} << m); ++i)
            if (k.predicate(i)) marked.push_back(i);
          return {{"kind", "phase"},
                  {"marked", marked},
                  {"phase", {k.phase.real(), k.phase.imag()}}};
        } else {
          auto parts = ordered_json::array();
          for (const auto& p : k.parts) parts.push_back(unitary_to_json(p));
          return {{"kind", "sequence"}, {"parts", parts}};
        }
      },
      u.kind());
}

StructuredUnitary unitary_from_json(int m, const ordered_json& j) {
  const std::string kind = j.at("kind");
  if (kind == "dense") {
    return StructuredUnitary::dense(m, j.at("first_qubit").get<int>(), j.at("width").get<int>(),
                                    parse_complex_list(j.at("matrix")));
  }
  if (kind == "single") {
    const auto v = parse_complex_list(j.at("matrix"));
    if (v.size() != 4) throw StructuralError("single-qubit gate needs 4 entries");
    return StructuredUnitary::single_qubit(m, j.at("qubit").get<int>(), {v[0], v[1], v[2], v[3]});
  }
  if (kind == "permutation") {
    return StructuredUnitary::permutation_table(m, j.at("table").get<std::vector<BasisIndex>>());
  }
  if (kind == "phase") {
    auto marked = std::make_shared<std::vector<BasisIndex>>(
        j.at("marked").get<std::vector<BasisIndex>>());
    std::sort(marked->begin(), marked->end());
    const Complex phase(j.at("phase").at(0).get<double>(), j.at("phase").at(1).get<double>());
    return StructuredUnitary::phase_flip(
        m, [marked](BasisIndex i) { return std::binary_search(marked->begin(), marked->end(), i); },
        phase);
  }
  if (kind == "sequence") {
    std::vector<StructuredUnitary> parts;
    for (const auto& p : j.at("parts")) parts.push_back(unitary_from_json(m, p));
    return StructuredUnitary::sequence(m, std::move(parts));
  }
  throw StructuralError("unknown unitary kind '" + kind + "'");
}

/// Number of outcome tuples over stages [0, l).
std::uint64_t tuple_count(const MeasuredAlgorithm& a, std::size_t l) {
  std::uint64_t count = 1;
  for (std::size_t j = 0; j < l; ++j) {
    count <<= a.stages[j].num_qubits();
    if (count > kMaxTable) throw ResourceError("outcome table exceeds 2^16 entries");
  }
  return count;
}

/// Mixed-radix decoding of a tuple index, x_0 most significant.
std::vector<BasisIndex> tuple_at(const std::vector<int>& widths, std::size_t l,
                                 std::uint64_t index) {
  std::vector<BasisIndex> xs(l);
  for (std::size_t j = l; j-- > 0;) {
    xs[j] = index & ((std::uint64_t{1} << widths[j]) - 1);
    index >>= widths[j];
  }
  return xs;
}

std::uint64_t tuple_index(const std::vector<int>& widths, OutcomeSpan xs) {
  std::uint64_t index = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) index = (index << widths[j]) | xs[j];
  return index;
}

}  // namespace

std::string algorithm_to_json(const MeasuredAlgorithm& a, int indent) {
  a.validate();
  ordered_json doc;
  doc["schema"] = "qapprox.algorithm";
  doc["version"] = kAlgorithmSchemaVersion;
  std::vector<int> widths;
  auto stages = ordered_json::array();
  for (const auto& s : a.stages) {
    widths.push_back(s.num_qubits());
    ordered_json q;
    q["m"] = s.query.m;
    q["m_prime"] = s.query.m_prime;
    q["m_dblprime"] = s.query.m_dblprime;
    q["Z"] = s.query.Z;
    q["tau"] = s.query.tau;
    q["beta"] = beta_to_json(s.query.beta);
    auto us = ordered_json::array();
    for (const auto& u : s.unitaries) us.push_back(unitary_to_json(u));
    stages.push_back({{"query", q}, {"unitaries", us}});
  }
  doc["stages"] = stages;
  auto selectors = ordered_json::array();
  for (std::size_t l = 0; l < a.num_stages(); ++l) {
    const std::uint64_t count = tuple_count(a, l);
    std::vector<BasisIndex> table(count);
    for (std::uint64_t t = 0; t < count; ++t) {
      const auto xs = tuple_at(widths, l, t);
      table[t] = a.selectors[l](OutcomeSpan(xs.data(), xs.size()));
    }
    selectors.push_back(table);
  }
  doc["selectors"] = selectors;
  const std::uint64_t count = tuple_count(a, a.num_stages());
  auto outputs = ordered_json::array();
  for (std::uint64_t t = 0; t < count; ++t) {
    const auto xs = tuple_at(widths, a.num_stages(), t);
    outputs.push_back(a.output(OutcomeSpan(xs.data(), xs.size())));
  }
  doc["output"] = outputs;
  return doc.dump(indent);
}

MeasuredAlgorithm algorithm_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw StructuralError(std::string("malformed algorithm JSON: ") + e.what());
  }
  if (doc.value("schema", "") != "qapprox.algorithm") {
    throw StructuralError("not a qapprox.algorithm document");
  }
  if (doc.value("version", 0) != kAlgorithmSchemaVersion) {
    throw StructuralError("unsupported algorithm schema version");
  }
  MeasuredAlgorithm a;
  auto widths = std::make_shared<std::vector<int>>();
  for (const auto& sj : doc.at("stages")) {
    NoMeasureAlgorithm s;
    const auto& q = sj.at("query");
    s.query.m = q.at("m");
    s.query.m_prime = q.at("m_prime");
    s.query.m_dblprime = q.at("m_dblprime");
    s.query.Z = q.at("Z").get<std::vector<BasisIndex>>();
    s.query.tau = q.at("tau").get<std::vector<std::size_t>>();
    s.query.beta = beta_from_json(q.at("beta"));
    for (const auto& u : sj.at("unitaries")) s.unitaries.push_back(unitary_from_json(s.query.m, u));
    widths->push_back(s.query.m);
    a.stages.push_back(std::move(s));
  }
  const auto& sel = doc.at("selectors");
  if (sel.size() != a.stages.size()) throw StructuralError("one selector table per stage");
  for (std::size_t l = 0; l < sel.size(); ++l) {
    auto table = std::make_shared<std::vector<BasisIndex>>(sel[l].get<std::vector<BasisIndex>>());
    if (table->size() != tuple_count(a, l)) throw StructuralError("selector table size mismatch");
    a.selectors.push_back([table, widths](OutcomeSpan xs) {
      return (*table)[tuple_index(*widths, xs)];
    });
  }
  auto outputs = std::make_shared<std::vector<Element>>(doc.at("output").get<std::vector<Element>>());
  if (outputs->size() != tuple_count(a, a.num_stages())) {
    throw StructuralError("output table size mismatch");
  }
  a.output = [outputs, widths](OutcomeSpan xs) { return (*outputs)[tuple_index(*widths, xs)]; };
  a.validate();
  return a;
}

}  // namespace qapprox
