#include "qapprox/statevector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "qapprox/errors.hpp"

namespace qapprox {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

std::size_t dimension_for(int num_qubits) {
  return std::size_t{1} << static_cast<unsigned>(num_qubits);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_qubit(int num_qubits, int qubit) {
  if (qubit < 0 || qubit >= num_qubits) {
    throw StructuralError("qubit " + std::to_string(qubit) +
                          " outside register of " + std::to_string(num_qubits) +
                          " qubits");
  }
}

void apply_single(const SingleQubitGate& g, int num_qubits,
                  std::vector<Complex>& amps) {
  const std::size_t stride = std::size_t{1} << (num_qubits - 1 - g.qubit);
  const auto& u = g.matrix;
  const std::size_t dim = amps.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t i0 = base + off;
      const std::size_t i1 = i0 + stride;
      const Complex a0 = amps[i0];
      const Complex a1 = amps[i1];
      amps[i0] = u[0] * a0 + u[1] * a1;
      amps[i1] = u[2] * a0 + u[3] * a1;
    }
  }
}

void apply_dense(const DenseBlock& d, int num_qubits,
                 std::vector<Complex>& amps) {
  const int low = num_qubits - d.first_qubit - d.width;
  const std::size_t block = std::size_t{1} << d.width;
  const std::size_t low_size = std::size_t{1} << low;
  const std::size_t high_size = amps.size() / (block * low_size);
  std::vector<Complex> in(block);
  for (std::size_t hi = 0; hi < high_size; ++hi) {
    for (std::size_t lo = 0; lo < low_size; ++lo) {
      const std::size_t base = hi * block * low_size + lo;
      for (std::size_t r = 0; r < block; ++r) in[r] = amps[base + r * low_size];
      for (std::size_t r = 0; r < block; ++r) {
        Complex acc{0.0, 0.0};
        const Complex* row = d.matrix.data() + r * block;
        for (std::size_t c = 0; c < block; ++c) acc += row[c] * in[c];
        amps[base + r * low_size] = acc;
      }
    }
  }
}

void apply_permutation(const BasisPermutation& p, std::vector<Complex>& amps) {
  const std::size_t dim = amps.size();
  std::vector<Complex> out(dim);
  std::vector<bool> hit(dim, false);
  for (std::size_t i = 0; i < dim; ++i) {
    const BasisIndex j = p.map(i);
    if (j >= dim || hit[j]) {
      throw StructuralError("basis permutation is not a bijection (index " +
                            std::to_string(i) + " -> " + std::to_string(j) +
                            ")");
    }
    hit[j] = true;
    out[j] = amps[i];
  }
  amps.swap(out);
}

}  // namespace

// --- QubitState -------------------------------------------------------------

QubitState::QubitState(int num_qubits, BasisIndex basis, int max_qubits)
    : num_qubits_(num_qubits) {
  if (num_qubits < 1) throw StructuralError("a register needs at least one qubit");
  if (num_qubits > max_qubits) {
    throw ResourceError("register of " + std::to_string(num_qubits) +
                        " qubits exceeds the cap of " +
                        std::to_string(max_qubits));
  }
  const std::size_t dim = dimension_for(num_qubits);
  if (basis >= dim) {
    throw StructuralError("basis index " + std::to_string(basis) +
                          " outside [0, 2^" + std::to_string(num_qubits) + ")");
  }
  amplitudes_.assign(dim, Complex{0.0, 0.0});
  amplitudes_[basis] = 1.0;
}

QubitState QubitState::from_amplitudes(std::vector<Complex> amplitudes,
                                       double tolerance) {
  if (!is_power_of_two(amplitudes.size()) || amplitudes.size() < 2) {
    throw StructuralError("amplitude vector length must be 2^m with m >= 1");
  }
  QubitState s;
  s.num_qubits_ = static_cast<int>(std::countr_zero(amplitudes.size()));
  if (s.num_qubits_ > kDefaultMaxQubits) {
    throw ResourceError("amplitude vector exceeds the qubit cap");
  }
  s.amplitudes_ = std::move(amplitudes);
  const double n = s.norm();
  if (std::abs(n - 1.0) > tolerance) {
    throw ValidationError("state norm " + std::to_string(n) + " is not 1");
  }
  return s;
}

QubitState QubitState::uniform(int num_qubits) {
  QubitState s(num_qubits);
  const double a = 1.0 / std::sqrt(static_cast<double>(s.dimension()));
  std::fill(s.amplitudes_.begin(), s.amplitudes_.end(), Complex{a, 0.0});
  return s;
}

double QubitState::norm() const {
  double acc = 0.0;
  for (const auto& a : amplitudes_) acc += std::norm(a);
  return std::sqrt(acc);
}

// --- StructuredUnitary ------------------------------------------------------

StructuredUnitary StructuredUnitary::identity(int num_qubits) {
  return sequence(num_qubits, {});
}

StructuredUnitary StructuredUnitary::dense(int num_qubits, int first_qubit,
                                           int width,
                                           std::vector<Complex> matrix) {
  if (width < 1 || width > kMaxDenseBlockQubits) {
    throw StructuralError("dense blocks span 1.." +
                          std::to_string(kMaxDenseBlockQubits) + " qubits");
  }
  if (first_qubit < 0 || first_qubit + width > num_qubits) {
    throw StructuralError("dense block does not fit in the register");
  }
  const std::size_t dim = dimension_for(width);
  if (matrix.size() != dim * dim) {
    throw StructuralError("dense block matrix has wrong size");
  }
  if (!is_unitary(matrix, dim)) {
    throw ValidationError("dense block is not unitary within 1e-8");
  }
  return {num_qubits, DenseBlock{first_qubit, width, std::move(matrix)}};
}

StructuredUnitary StructuredUnitary::single_qubit(int num_qubits, int qubit,
                                                  std::array<Complex, 4> matrix) {
  check_qubit(num_qubits, qubit);
  if (!is_unitary(matrix, 2)) {
    throw ValidationError("single-qubit gate is not unitary within 1e-8");
  }
  return {num_qubits, SingleQubitGate{qubit, matrix}};
}

StructuredUnitary StructuredUnitary::hadamard(int num_qubits, int qubit) {
  return single_qubit(num_qubits, qubit,
                      {Complex{kInvSqrt2}, Complex{kInvSqrt2}, Complex{kInvSqrt2},
                       Complex{-kInvSqrt2}});
}

StructuredUnitary StructuredUnitary::pauli_x(int num_qubits, int qubit) {
  return single_qubit(num_qubits, qubit,
                      {Complex{0.0}, Complex{1.0}, Complex{1.0}, Complex{0.0}});
}

StructuredUnitary StructuredUnitary::hadamard_block(int num_qubits, int first,
                                                    int count) {
  std::vector<StructuredUnitary> parts;
  parts.reserve(static_cast<std::size_t>(count));
  for (int q = first; q < first + count; ++q) parts.push_back(hadamard(num_qubits, q));
  return sequence(num_qubits, std::move(parts));
}

StructuredUnitary StructuredUnitary::permutation(
    int num_qubits, std::function<BasisIndex(BasisIndex)> map) {
  if (num_qubits < 1) throw StructuralError("permutation needs m >= 1");
  return {num_qubits, BasisPermutation{std::move(map)}};
}

StructuredUnitary StructuredUnitary::permutation_table(int num_qubits,
                                                       std::vector<BasisIndex> table) {
  if (table.size() != dimension_for(num_qubits)) {
    throw StructuralError("permutation table length must be 2^m");
  }
  std::vector<bool> hit(table.size(), false);
  for (BasisIndex j : table) {
    if (j >= table.size() || hit[j]) {
      throw StructuralError("permutation table is not a bijection");
    }
    hit[j] = true;
  }
  auto shared = std::make_shared<const std::vector<BasisIndex>>(std::move(table));
  return permutation(num_qubits, [shared](BasisIndex i) { return (*shared)[i]; });
}

StructuredUnitary StructuredUnitary::phase_flip(
    int num_qubits, std::function<bool(BasisIndex)> predicate, Complex phase) {
  if (std::abs(std::abs(phase) - 1.0) > kUnitarityTolerance) {
    throw ValidationError("phase must have modulus 1");
  }
  return {num_qubits, PhaseOracle{std::move(predicate), phase}};
}

StructuredUnitary StructuredUnitary::sequence(int num_qubits,
                                              std::vector<StructuredUnitary> parts) {
  for (const auto& p : parts) {
    if (p.num_qubits() != num_qubits) {
      throw StructuralError("sequence part acts on " +
                            std::to_string(p.num_qubits()) + " qubits, expected " +
                            std::to_string(num_qubits));
    }
  }
  return {num_qubits, UnitarySequence{std::move(parts)}};
}

StructuredUnitary StructuredUnitary::diffusion(int num_qubits, int first, int count) {
  check_qubit(num_qubits, first);
  check_qubit(num_qubits, first + count - 1);
  const int low = num_qubits - first - count;
  const BasisIndex mask = ((BasisIndex{1} << count) - 1) << low;
  std::vector<StructuredUnitary> parts;
  parts.push_back(hadamard_block(num_qubits, first, count));
  // H (2|0><0| - I) H = 2|s><s| - I
  parts.push_back(phase_flip(num_qubits, [mask](BasisIndex i) { return (i & mask) != 0; }));
  parts.push_back(hadamard_block(num_qubits, first, count));
  return sequence(num_qubits, std::move(parts));
}

StructuredUnitary StructuredUnitary::inverse() const {
  return std::visit(
      [this](const auto& k) -> StructuredUnitary {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseBlock>) {
          const std::size_t dim = dimension_for(k.width);
          std::vector<Complex> adj(dim * dim);
          for (std::size_t r = 0; r < dim; ++r)
            for (std::size_t c = 0; c < dim; ++c)
              adj[c * dim + r] = std::conj(k.matrix[r * dim + c]);
          return {num_qubits_, DenseBlock{k.first_qubit, k.width, std::move(adj)}};
        } else if constexpr (std::is_same_v<T, SingleQubitGate>) {
          const auto& u = k.matrix;
          return {num_qubits_,
                  SingleQubitGate{k.qubit,
                                  {std::conj(u[0]), std::conj(u[2]), std::conj(u[1]),
                                   std::conj(u[3])}}};
        } else if constexpr (std::is_same_v<T, BasisPermutation>) {
          const std::size_t dim = dimension_for(num_qubits_);
          std::vector<BasisIndex> inv(dim);
          for (std::size_t i = 0; i < dim; ++i) {
            const BasisIndex j = k.map(i);
            if (j >= dim) throw StructuralError("permutation image out of range");
            inv[j] = i;
          }
          return permutation_table(num_qubits_, std::move(inv));
        } else if constexpr (std::is_same_v<T, PhaseOracle>) {
          return {num_qubits_, PhaseOracle{k.predicate, std::conj(k.phase)}};
        } else {
          std::vector<StructuredUnitary> parts;
          parts.reserve(k.parts.size());
          for (auto it = k.parts.rbegin(); it != k.parts.rend(); ++it)
            parts.push_back(it->inverse());
          return {num_qubits_, UnitarySequence{std::move(parts)}};
        }
      },
      kind_);
}

StructuredUnitary StructuredUnitary::widened(int extra) const {
  if (extra < 0) throw StructuralError("cannot widen by a negative qubit count");
  if (extra == 0) return *this;
  const int m = num_qubits_ + extra;
  if (m > kDefaultMaxQubits) throw ResourceError("widened unitary exceeds the qubit cap");
  const BasisIndex low_mask = (BasisIndex{1} << extra) - 1;
  return std::visit(
      [&](const auto& k) -> StructuredUnitary {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseBlock> || std::is_same_v<T, SingleQubitGate>) {
          // qubit positions count from the most significant end and do not move
          return {m, k};
        } else if constexpr (std::is_same_v<T, BasisPermutation>) {
          auto map = k.map;
          return {m, BasisPermutation{[map, extra, low_mask](BasisIndex b) {
                    return (map(b >> extra) << extra) | (b & low_mask);
                  }}};
        } else if constexpr (std::is_same_v<T, PhaseOracle>) {
          auto pred = k.predicate;
          return {m, PhaseOracle{[pred, extra](BasisIndex b) { return pred(b >> extra); },
                                 k.phase}};
        } else {
          std::vector<StructuredUnitary> parts;
          parts.reserve(k.parts.size());
          for (const auto& part : k.parts) parts.push_back(part.widened(extra));
          return {m, UnitarySequence{std::move(parts)}};
        }
      },
      kind_);
}

bool StructuredUnitary::is_permutation() const {
  if (std::holds_alternative<BasisPermutation>(kind_)) return true;
  if (const auto* seq = std::get_if<UnitarySequence>(&kind_)) {
    return std::all_of(seq->parts.begin(), seq->parts.end(),
                       [](const auto& p) { return p.is_permutation(); });
  }
  return false;
}

BasisIndex StructuredUnitary::map_basis(BasisIndex i) const {
  if (const auto* p = std::get_if<BasisPermutation>(&kind_)) return p->map(i);
  if (const auto* seq = std::get_if<UnitarySequence>(&kind_)) {
    for (const auto& part : seq->parts) i = part.map_basis(i);
    return i;
  }
  throw StructuralError("map_basis on a non-permutation unitary");
}

void StructuredUnitary::apply_in_place(QubitState& state) const {
  if (state.num_qubits() != num_qubits_) {
    throw StructuralError("unitary on " + std::to_string(num_qubits_) +
                          " qubits applied to a " +
                          std::to_string(state.num_qubits()) + "-qubit state");
  }
  auto& amps = state.amplitudes_;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, DenseBlock>) {
          apply_dense(k, num_qubits_, amps);
        } else if constexpr (std::is_same_v<T, SingleQubitGate>) {
          apply_single(k, num_qubits_, amps);
        } else if constexpr (std::is_same_v<T, BasisPermutation>) {
          apply_permutation(k, amps);
        } else if constexpr (std::is_same_v<T, PhaseOracle>) {
          for (std::size_t i = 0; i < amps.size(); ++i)
            if (k.predicate(i)) amps[i] *= k.phase;
        } else {
          for (const auto& part : k.parts) part.apply_in_place(state);
        }
      },
      kind_);
}

// --- free functions ---------------------------------------------------------

QubitState apply(QubitState state, const StructuredUnitary& u) {
  u.apply_in_place(state);
  return state;
}

std::map<BasisIndex, double> measurement_distribution(const QubitState& state,
                                                      double prune) {
  std::map<BasisIndex, double> out;
  const auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = std::norm(amps[i]);
    if (p >= prune) out.emplace_hint(out.end(), i, p);
  }
  return out;
}

QubitState tensor_with_ancilla(const QubitState& state, int k, BasisIndex init) {
  if (k < 1) throw StructuralError("ancilla register needs k >= 1 qubits");
  if (init >= dimension_for(k)) {
    throw StructuralError("ancilla initial index " + std::to_string(init) +
                          " outside [0, 2^" + std::to_string(k) + ")");
  }
  const int m = state.num_qubits() + k;
  if (m > kDefaultMaxQubits) throw ResourceError("tensor product exceeds the qubit cap");
  std::vector<Complex> amps(dimension_for(m), Complex{0.0, 0.0});
  const auto src = state.amplitudes();
  for (std::size_t i = 0; i < src.size(); ++i) amps[(i << k) | init] = src[i];
  return QubitState::from_amplitudes(std::move(amps), 1e-9);
}

bool is_unitary(std::span<const Complex> matrix, std::size_t dim, double tolerance) {
  if (matrix.size() != dim * dim) return false;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = a; b < dim; ++b) {
      Complex dot{0.0, 0.0};
      for (std::size_t r = 0; r < dim; ++r)
        dot += std::conj(matrix[r * dim + a]) * matrix[r * dim + b];
      const double expected = (a == b) ? 1.0 : 0.0;
      if (std::abs(dot - expected) > tolerance) return false;
    }
  }
  return true;
}

}  // namespace qapprox
