#include "qapprox/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "qapprox/errors.hpp"

namespace qapprox {

namespace {

constexpr double kPivotEps = 1e-12;

/// Dense tableau simplex for max c.x s.t. A x <= b, x >= 0 with b >= 0.
/// Bland's rule; returns x.
std::vector<double> simplex_max(const std::vector<std::vector<double>>& A,
                                const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t rows = A.size();
  const std::size_t vars = c.size();
  const std::size_t cols = vars + rows;
  std::vector<std::vector<double>> t(rows, std::vector<double>(cols + 1, 0.0));
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < vars; ++j) t[i][j] = A[i][j];
    t[i][vars + i] = 1.0;
    t[i][cols] = b[i];
    basis[i] = vars + i;
  }
  std::vector<double> reduced(cols + 1, 0.0);  // c_j - z_j, last entry -objective
  for (std::size_t j = 0; j < vars; ++j) reduced[j] = c[j];

  const std::size_t max_iter = 50 * (rows + cols) + 1000;
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < cols; ++j) {
      if (reduced[j] > kPivotEps) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = rows;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
      if (t[i][enter] > kPivotEps) {
        const double ratio = t[i][cols] / t[i][enter];
        if (ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && leave < rows && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave == rows) throw ValidationError("projection problem is unbounded");
    const double pivot = t[leave][enter];
    for (auto& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
    }
    const double f = reduced[enter];
    for (std::size_t j = 0; j <= cols; ++j) reduced[j] -= f * t[leave][j];
    basis[leave] = enter;
  }
  std::vector<double> x(vars, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] < vars) x[basis[i]] = t[i][cols];
  return x;
}

double dot(const Element& a, const Element& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sup_deviation(const Element& x, const NormedOutputSpace& space, const Element& g) {
  double worst = 0.0;
  for (std::size_t k = 0; k < space.norming_family.size(); ++k)
    worst = std::max(worst, std::abs(x[k] - dot(space.norming_family[k], g)));
  return worst;
}

Element embed(const NormedOutputSpace& space, const Element& g) {
  Element out(space.norming_family.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = dot(space.norming_family[k], g);
  return out;
}

}  // namespace

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median of an empty sequence");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t rank = (v.size() + 2) / 2;  // ceil((nu+1)/2), 1-based
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

Element median_componentwise(std::span<const Element> elements) {
  if (elements.empty()) throw DomainError("median of an empty family");
  const std::size_t d = elements.front().size();
  for (const auto& g : elements)
    if (g.size() != d) throw StructuralError("mismatched coordinate sets");
  Element out(d);
  std::vector<double> column(elements.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t r = 0; r < elements.size(); ++r) column[r] = elements[r][i];
    out[i] = median(column);
  }
  return out;
}

NormedOutputSpace NormedOutputSpace::real_line() {
  NormedOutputSpace s = l_infinity(1);
  s.name = "R";
  return s;
}

NormedOutputSpace NormedOutputSpace::l_infinity(std::size_t d) {
  NormedOutputSpace s;
  s.name = "l_inf^" + std::to_string(d);
  s.dimension = d;
  s.norm = [](std::span<const double> g) {
    double m = 0.0;
    for (double x : g) m = std::max(m, std::abs(x));
    return m;
  };
  for (std::size_t i = 0; i < d; ++i) {
    Element e(d, 0.0);
    e[i] = 1.0;
    s.norming_family.push_back(std::move(e));
  }
  s.sup_of_coordinates = true;
  return s;
}

NormedOutputSpace NormedOutputSpace::lp(std::size_t N, Exponent p) {
  if (p.is_infinite()) {
    NormedOutputSpace s = l_infinity(N);
    s.name = "L_inf^" + std::to_string(N);
    return s;
  }
  NormedOutputSpace s;
  s.name = "L_" + p.str() + "^" + std::to_string(N);
  s.dimension = N;
  s.norm = [p](std::span<const double> g) { return lp_norm(g, p); };
  if (p.value() == 1.0 && N <= 12) {
    const double w = 1.0 / static_cast<double>(N);
    for (std::size_t mask = 0; mask < (std::size_t{1} << N); ++mask) {
      Element t(N);
      for (std::size_t i = 0; i < N; ++i) t[i] = ((mask >> i) & 1U) ? -w : w;
      s.norming_family.push_back(std::move(t));
    }
  }
  if (N == 1) s.sup_of_coordinates = true;
  return s;
}

double NormedOutputSpace::norming_sup(const Element& g) const {
  if (norming_family.empty()) throw StructuralError(name + " has no finite norming family");
  double m = 0.0;
  for (const auto& t : norming_family) m = std::max(m, std::abs(dot(t, g)));
  return m;
}

std::size_t rho_select_index(std::span<const Element> elements, const NormFn& norm) {
  if (elements.empty()) throw DomainError("rho_select of an empty family");
  const std::size_t nu = elements.size();
  std::vector<double> dist(nu);
  Element diff;
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nu; ++i) {
    for (std::size_t j = 0; j < nu; ++j) {
      diff.resize(elements[j].size());
      for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = elements[j][c] - elements[i][c];
      dist[j] = norm(diff);
    }
    const double mu = median(dist);
    if (mu < best_value) {
      best_value = mu;
      best = i;
    }
  }
  return best;
}

Element rho_select(std::span<const Element> elements, const NormFn& norm) {
  return elements[rho_select_index(elements, norm)];
}

Element delta_projection(const Element& x, const NormedOutputSpace& space, double delta,
                         std::span<const Element> prefer) {
  if (!(delta > 0.0)) throw DomainError("delta-projection needs delta > 0");
  const auto& T = space.norming_family;
  if (T.empty()) throw StructuralError(space.name + " has no finite norming family");
  if (x.size() != T.size()) throw StructuralError("point of l_inf(T) has wrong length");
  const std::size_t d = space.dimension;

  // min_g max_t |x_t - <t,g>| as an LP in (g+, g-, s+, s-), s = s+ - s- + S0.
  double s0 = 0.0;
  for (double v : x) s0 = std::max(s0, std::abs(v));
  const std::size_t vars = 2 * d + 2;
  std::vector<std::vector<double>> A;
  std::vector<double> b;
  A.reserve(2 * T.size());
  for (std::size_t k = 0; k < T.size(); ++k) {
    std::vector<double> up(vars, 0.0), down(vars, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      up[i] = T[k][i];
      up[d + i] = -T[k][i];
      down[i] = -T[k][i];
      down[d + i] = T[k][i];
    }
    up[2 * d] = down[2 * d] = -1.0;
    up[2 * d + 1] = down[2 * d + 1] = 1.0;
    A.push_back(std::move(up));
    b.push_back(x[k] + s0);
    A.push_back(std::move(down));
    b.push_back(s0 - x[k]);
  }
  std::vector<double> c(vars, 0.0);
  c[2 * d] = -1.0;
  c[2 * d + 1] = 1.0;
  const auto sol = simplex_max(A, b, c);
  Element g(d);
  for (std::size_t i = 0; i < d; ++i) g[i] = sol[i] - sol[d + i];
  const double optimum = sup_deviation(x, space, g);
  for (const auto& candidate : prefer) {
    if (sup_deviation(x, space, candidate) <= (1.0 + delta) * optimum + 1e-15) return candidate;
  }
  return g;
}

Element psi_delta(std::span<const Element> elements, const NormedOutputSpace& space,
                  double delta) {
  std::vector<Element> embedded;
  embedded.reserve(elements.size());
  for (const auto& g : elements) embedded.push_back(embed(space, g));
  return delta_projection(median_componentwise(embedded), space, delta, elements);
}

double Selector::error_constant() const {
  switch (kind) {
    case Kind::ComponentwiseMedian:
      return 1.0;
    case Kind::Rho:
      return 3.0;
    case Kind::DeltaProjection:
      return 2.0 + delta;
  }
  return 3.0;
}

std::string Selector::name() const {
  switch (kind) {
    case Kind::ComponentwiseMedian:
      return "median";
    case Kind::Rho:
      return "rho";
    case Kind::DeltaProjection:
      return "psi_delta";
  }
  return "rho";
}

void check_compatible(const Selector& selector, const NormedOutputSpace& space) {
  if (!space.norm) throw StructuralError("output space has no norm");
  if (selector.kind == Selector::Kind::ComponentwiseMedian && !space.sup_of_coordinates) {
    throw StructuralError("componentwise median needs G = l_inf on its coordinates; " +
                          space.name + " is not");
  }
  if (selector.kind == Selector::Kind::DeltaProjection) {
    if (space.norming_family.empty()) {
      throw StructuralError("psi_delta needs a finite norming family; " + space.name +
                            " has none");
    }
    if (!(selector.delta > 0.0)) throw DomainError("psi_delta needs delta > 0");
  }
}

Element combine(const Selector& selector, const NormedOutputSpace& space,
                std::span<const Element> elements) {
  switch (selector.kind) {
    case Selector::Kind::ComponentwiseMedian:
      return median_componentwise(elements);
    case Selector::Kind::Rho:
      return rho_select(elements, space.norm);
    case Selector::Kind::DeltaProjection:
      return psi_delta(elements, space, selector.delta);
  }
  return rho_select(elements, space.norm);
}

MeasuredAlgorithm boost(const MeasuredAlgorithm& a, std::size_t nu, const Selector& selector,
                        const NormedOutputSpace& space) {
  if (nu < 1) throw DomainError("boost needs nu >= 1");
  a.validate();
  check_compatible(selector, space);
  const std::size_t k = a.num_stages();
  auto base = std::make_shared<const MeasuredAlgorithm>(a);
  MeasuredAlgorithm out;
  for (std::size_t r = 0; r < nu; ++r) {
    for (std::size_t l = 0; l < k; ++l) {
      out.stages.push_back(a.stages[l]);
      out.selectors.push_back([base, r, l, k](OutcomeSpan prior) {
        return base->selectors[l](prior.subspan(r * k, l));
      });
    }
  }
  auto sp = std::make_shared<const NormedOutputSpace>(space);
  out.output = [base, sp, selector, nu, k](OutcomeSpan outcomes) {
    std::vector<Element> runs;
    runs.reserve(nu);
    for (std::size_t r = 0; r < nu; ++r) runs.push_back(base->output(outcomes.subspan(r * k, k)));
    if (nu == 1) return runs.front();
    return combine(selector, *sp, runs);
  };
  return out;
}

MeasuredAlgorithm lipschitz_postcompose(const MeasuredAlgorithm& a,
                                        std::function<Element(const Element&)> phi,
                                        double lipschitz_constant) {
  if (!(lipschitz_constant >= 0.0)) throw DomainError("Lipschitz constant must be >= 0");
  MeasuredAlgorithm out = a;
  auto inner = a.output;
  out.output = [inner, phi = std::move(phi)](OutcomeSpan x) { return phi(inner(x)); };
  return out;
}

double estimate_lipschitz(const std::function<Element(const Element&)>& phi,
                          std::span<const Element> points, const NormFn& norm_in,
                          const NormFn& norm_out) {
  double best = 0.0;
  Element din, dout;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Element pi = phi(points[i]);
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      din.resize(points[i].size());
      for (std::size_t c = 0; c < din.size(); ++c) din[c] = points[i][c] - points[j][c];
      const double denom = norm_in(din);
      if (denom == 0.0) continue;
      const Element pj = phi(points[j]);
      dout.resize(pi.size());
      for (std::size_t c = 0; c < dout.size(); ++c) dout[c] = pi[c] - pj[c];
      best = std::max(best, norm_out(dout) / denom);
    }
  }
  return best;
}

MeasuredAlgorithm sum_algorithms(std::span<const MeasuredAlgorithm> parts) {
  if (parts.empty()) throw DomainError("sum_algorithms needs at least one part");
  auto shared = std::make_shared<const std::vector<MeasuredAlgorithm>>(parts.begin(), parts.end());
  MeasuredAlgorithm out;
  std::vector<std::size_t> offsets;
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    parts[p].validate();
    offsets.push_back(offset);
    for (std::size_t l = 0; l < parts[p].num_stages(); ++l) {
      out.stages.push_back(parts[p].stages[l]);
      out.selectors.push_back([shared, p, l, offset](OutcomeSpan prior) {
        return (*shared)[p].selectors[l](prior.subspan(offset, l));
      });
    }
    offset += parts[p].num_stages();
  }
  out.output = [shared, offsets](OutcomeSpan x) {
    Element total;
    for (std::size_t p = 0; p < shared->size(); ++p) {
      const auto& part = (*shared)[p];
      const Element g = part.output(x.subspan(offsets[p], part.num_stages()));
      if (total.empty()) total.assign(g.size(), 0.0);
      if (g.size() != total.size()) throw StructuralError("summands live in different spaces");
      for (std::size_t c = 0; c < g.size(); ++c) total[c] += g[c];
    }
    return total;
  };
  return out;
}

MeasuredAlgorithm failure_mock(double fail_probability, double wrong_value) {
  if (!(fail_probability >= 0.0 && fail_probability <= 1.0)) {
    throw DomainError("failure probability must lie in [0, 1]");
  }
  const double c = std::sqrt(1.0 - fail_probability);
  const double s = std::sqrt(fail_probability);
  NoMeasureAlgorithm stage;
  stage.query.m = 2;
  stage.query.m_prime = 1;
  stage.query.m_dblprime = 1;
  stage.query.Z = {1};
  stage.query.tau = {0};
  stage.unitaries = {StructuredUnitary::single_qubit(2, 0, {c, -s, s, c}),
                     StructuredUnitary::identity(2)};
  MeasuredAlgorithm a;
  a.stages = {std::move(stage)};
  a.selectors = {MeasuredAlgorithm::constant_start(0)};
  a.output = [wrong_value](OutcomeSpan x) {
    return (x[0] >> 1) ? Element{wrong_value} : Element{0.0};
  };
  return a;
}

double hoeffding_failure_bound(std::size_t nu) {
  return std::exp(-static_cast<double>(nu) / 8.0);
}

double binomial_upper_tail(std::size_t n, double p, std::size_t k) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  double total = 0.0;
  for (std::size_t j = k; j <= n; ++j) {
    const double log_term = std::lgamma(static_cast<double>(n) + 1.0) -
                            std::lgamma(static_cast<double>(j) + 1.0) -
                            std::lgamma(static_cast<double>(n - j) + 1.0) +
                            static_cast<double>(j) * std::log(p) +
                            static_cast<double>(n - j) * std::log1p(-p);
    total += std::exp(log_term);
  }
  return std::min(total, 1.0);
}

}  // namespace qapprox
