#pragma once

/**
 * @file
 * Dense state vectors over m qubits and the structured unitaries that act on
 * them.
 *
 * Basis ordering follows the tensor convention |i> = e_{j_0} (x) ... (x)
 * e_{j_{m-1}} with i = sum_k j_k 2^{m-1-k}: qubit 0 is the most significant
 * bit of the basis index. Registers laid out left to right therefore occupy
 * the high bits first.
 */

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace qapprox {

using Complex = std::complex<double>;
using BasisIndex = std::uint64_t;

inline constexpr int kDefaultMaxQubits = 22;
inline constexpr int kMaxDenseBlockQubits = 12;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kUnitarityTolerance = 1e-8;
inline constexpr double kProbabilityPruning = 1e-14;

class StructuredUnitary;

class QubitState {
 public:
  /// Basis state |basis> on `num_qubits` qubits.
  explicit QubitState(int num_qubits, BasisIndex basis = 0,
                      int max_qubits = kDefaultMaxQubits);

  /// Takes ownership of an amplitude vector; the length must be a power of
  /// two and the norm must be 1 within `tolerance`.
  static QubitState from_amplitudes(std::vector<Complex> amplitudes,
                                    double tolerance = kNormTolerance);

  /// Equal superposition over all 2^m basis states.
  static QubitState uniform(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  Complex amplitude(BasisIndex i) const { return amplitudes_.at(i); }
  double norm() const;

 private:
  QubitState() = default;

  friend class StructuredUnitary;

  int num_qubits_ = 0;
  std::vector<Complex> amplitudes_;
};

/// Dense unitary on the contiguous qubit block [first_qubit, first_qubit + width).
/// Row-major 2^width x 2^width.
struct DenseBlock {
  int first_qubit = 0;
  int width = 0;
  std::vector<Complex> matrix;
};

struct SingleQubitGate {
  int qubit = 0;
  std::array<Complex, 4> matrix{};  // row-major 2x2
};

/// |i> -> |map(i)>. The map must be a bijection of [0, 2^m).
struct BasisPermutation {
  std::function<BasisIndex(BasisIndex)> map;
};

/// |i> -> phase |i> where predicate(i) holds, identity elsewhere.
struct PhaseOracle {
  std::function<bool(BasisIndex)> predicate;
  Complex phase{-1.0, 0.0};
};

/// Applied first to last.
struct UnitarySequence {
  std::vector<StructuredUnitary> parts;
};

class StructuredUnitary {
 public:
  using Kind = std::variant<DenseBlock, SingleQubitGate, BasisPermutation,
                            PhaseOracle, UnitarySequence>;

  static StructuredUnitary identity(int num_qubits);
  static StructuredUnitary dense(int num_qubits, int first_qubit, int width,
                                 std::vector<Complex> matrix);
  static StructuredUnitary single_qubit(int num_qubits, int qubit,
                                        std::array<Complex, 4> matrix);
  static StructuredUnitary hadamard(int num_qubits, int qubit);
  static StructuredUnitary pauli_x(int num_qubits, int qubit);
  /// Hadamard on every qubit of [first, first + count).
  static StructuredUnitary hadamard_block(int num_qubits, int first, int count);
  static StructuredUnitary permutation(int num_qubits,
                                       std::function<BasisIndex(BasisIndex)> map);
  /// Permutation given as an explicit table of length 2^m.
  static StructuredUnitary permutation_table(int num_qubits,
                                             std::vector<BasisIndex> table);
  static StructuredUnitary phase_flip(int num_qubits,
                                      std::function<bool(BasisIndex)> predicate,
                                      Complex phase = Complex{-1.0, 0.0});
  static StructuredUnitary sequence(int num_qubits,
                                    std::vector<StructuredUnitary> parts);

  /// Reflection 2|s><s| - I about the uniform state of the register
  /// [first, first + count), identity on the remaining qubits.
  static StructuredUnitary diffusion(int num_qubits, int first, int count);

  int num_qubits() const { return num_qubits_; }
  const Kind& kind() const { return kind_; }

  /// U (x) I on `extra` additional low-order qubits appended on the right.
  StructuredUnitary widened(int extra) const;

  /// Inverse unitary. Permutations are inverted by tabulation.
  StructuredUnitary inverse() const;

  /// Permutation kinds (and sequences made only of them) map basis states
  /// to basis states; this returns the image of a single basis index.
  bool is_permutation() const;
  BasisIndex map_basis(BasisIndex i) const;

  void apply_in_place(QubitState& state) const;

 private:
  StructuredUnitary(int num_qubits, Kind kind)
      : num_qubits_(num_qubits), kind_(std::move(kind)) {}

  int num_qubits_ = 0;
  Kind kind_;
};

/// Applies `u` to `state`. The unitary must act on exactly state.num_qubits().
QubitState apply(QubitState state, const StructuredUnitary& u);

/// Outcome probabilities |a_i|^2, dropping entries below `prune`.
std::map<BasisIndex, double> measurement_distribution(
    const QubitState& state, double prune = kProbabilityPruning);

/// state (x) |init> on num_qubits + k qubits. Requires k >= 1 and init < 2^k.
QubitState tensor_with_ancilla(const QubitState& state, int k, BasisIndex init);

/// Checks the columns of a row-major dim x dim matrix for orthonormality.
bool is_unitary(std::span<const Complex> matrix, std::size_t dim,
                double tolerance = kUnitarityTolerance);

}  // namespace qapprox
