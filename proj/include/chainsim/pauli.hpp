#pragma once

#include "chainsim/linalg.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace chainsim {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr int kMaxPauliSites = 64;

/// Tensor product of single-site Pauli matrices stored as two bit masks.
///
/// Site j contributes bit j of each mask: I = (0,0), X = (1,0), Y = (1,1),
/// Z = (0,1) for (x, z). The string itself is the Hermitian product
/// sigma_{p_0} (x) ... (x) sigma_{p_{L-1}}; no phase is stored here.
class PauliString {
 public:
  constexpr PauliString() = default;
  constexpr PauliString(std::uint64_t x, std::uint64_t z) : x_(x), z_(z) {}

  /// Parses "IXYZ..." with site 0 first. Throws on any other character.
  static PauliString parse(std::string_view text);
  static PauliString single(int site, Pauli p);

  constexpr std::uint64_t x_mask() const { return x_; }
  constexpr std::uint64_t z_mask() const { return z_; }
  constexpr std::uint64_t support() const { return x_ | z_; }

  Pauli at(int site) const;
  PauliString with(int site, Pauli p) const;
  /// Number of non-identity sites (Hamming weight).
  int weight() const;
  bool is_identity() const { return (x_ | z_) == 0; }
  std::string to_string(int num_sites) const;

  friend constexpr bool operator==(PauliString a, PauliString b) {
    return a.x_ == b.x_ && a.z_ == b.z_;
  }
  friend constexpr bool operator<(PauliString a, PauliString b) {
    return a.x_ != b.x_ ? a.x_ < b.x_ : a.z_ < b.z_;
  }

 private:
  std::uint64_t x_ = 0;
  std::uint64_t z_ = 0;
};

struct PauliStringHash {
  std::size_t operator()(PauliString p) const noexcept {
    std::uint64_t h = p.x_mask() * 0x9E3779B97F4A7C15ULL;
    h ^= p.z_mask() + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

/// Product of two Pauli strings: a * b = phase * c with |phase| = 1.
std::pair<Complex, PauliString> multiply_strings(PauliString a, PauliString b);
bool strings_commute(PauliString a, PauliString b);

struct PauliTerm {
  int num_sites = 0;
  PauliString string;
  Complex coeff{1.0, 0.0};
};

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b);

/// Sparse weighted sum of Pauli strings in canonical form.
///
/// Terms are kept sorted by string with one entry per distinct string, and
/// coefficients with modulus below kPruneThreshold are dropped after every
/// algebraic operation.
class OperatorSum {
 public:
  using Term = std::pair<PauliString, Complex>;
  static constexpr double kPruneThreshold = 1e-14;

  OperatorSum() = default;
  explicit OperatorSum(int num_sites);
  OperatorSum(int num_sites, std::vector<Term> terms);

  static OperatorSum single(int num_sites, PauliString s, Complex c = 1.0);
  static OperatorSum identity(int num_sites, Complex c = 1.0);

  int num_sites() const { return num_sites_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  Complex coefficient(PauliString s) const;
  /// Coefficient of the identity string, Tr(A) / 2^L.
  Complex trace_coefficient() const { return coefficient(PauliString{}); }

  bool is_hermitian(double tol = 1e-12) const;
  bool is_anti_hermitian(double tol = 1e-12) const;
  OperatorSum adjoint() const;
  /// Sum over terms of |c|^2, which equals Tr(A^dagger A) / 2^L.
  double norm_sq() const;
  double max_abs_coefficient() const;

  /// Keep only terms for which pred(string) is true.
  OperatorSum filtered(const std::function<bool(PauliString)>& pred) const;

  OperatorSum& operator+=(const OperatorSum& o);
  OperatorSum& operator-=(const OperatorSum& o);
  OperatorSum& operator*=(Complex s);

  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
  friend OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a -= b; }
  friend OperatorSum operator*(OperatorSum a, Complex s) { return a *= s; }
  friend OperatorSum operator*(Complex s, OperatorSum a) { return a *= s; }
  friend OperatorSum operator*(OperatorSum a, double s) { return a *= Complex{s}; }
  friend OperatorSum operator*(double s, OperatorSum a) { return a *= Complex{s}; }
  friend OperatorSum operator-(OperatorSum a) { return a *= Complex{-1.0}; }

  friend bool operator==(const OperatorSum& a, const OperatorSum& b) {
    return a.num_sites_ == b.num_sites_ && a.terms_ == b.terms_;
  }

 private:
  void canonicalize();

  int num_sites_ = 0;
  std::vector<Term> terms_;
};

void require_same_length(const OperatorSum& a, const OperatorSum& b, const char* what);

OperatorSum product(const OperatorSum& a, const OperatorSum& b);
OperatorSum commutator(const OperatorSum& a, const OperatorSum& b);
/// Tr(A^dagger B) / 2^L, summed termwise over matching strings.
Complex hs_inner(const OperatorSum& a, const OperatorSum& b);
/// Largest |coefficient| of A - B, zero when they are identical.
double max_coefficient_distance(const OperatorSum& a, const OperatorSum& b);

/// Weight fractions f_k of an operator's Pauli expansion.
struct HammingSpectrum {
  /// f[k] for k = 0..L; f[0] is the identity share (zero for traceless input).
  std::vector<double> f;
  int num_sites() const { return static_cast<int>(f.size()) - 1; }
  double sum() const;
};

HammingSpectrum hamming_decompose(const OperatorSum& a);
/// Same decomposition computed from a dense matrix by an in-place O(L 4^L)
/// Pauli transform, without materializing the term list.
HammingSpectrum hamming_decompose(const DenseOperator& a);
/// Overwrites its argument instead of copying it.
HammingSpectrum hamming_decompose(DenseOperator&& a);

/// Number of weight-k Pauli strings on L sites, 3^k C(L, k).
double weight_configurations(int num_sites, int k);
/// Expected f_k of a uniformly random traceless operator.
HammingSpectrum random_operator_baseline(int num_sites);

DenseOperator to_dense(const OperatorSum& a);
/// Pauli expansion of a dense matrix; coefficients below the prune threshold
/// are dropped.
OperatorSum pauli_decompose(const DenseOperator& a);

/// Coherence-order components O_q, q = -K..K.
class CoherenceComponents {
 public:
  CoherenceComponents() = default;
  CoherenceComponents(int max_order, std::vector<OperatorSum> parts)
      : max_order_(max_order), parts_(std::move(parts)) {}
  int max_order() const { return max_order_; }
  const OperatorSum& at(int q) const { return parts_.at(static_cast<std::size_t>(q + max_order_)); }
  OperatorSum sum() const;

 private:
  int max_order_ = 0;
  std::vector<OperatorSum> parts_;
};

/// Splits O into components with [P, O_q] = q O_q using nested commutators
/// ad_P^n(O) and the inverse of the two Vandermonde systems in
/// O_q +- O_{-q}. P must have integer ad-spectrum within [-L, L].
CoherenceComponents mqc_components_nested(const OperatorSum& o, const OperatorSum& p,
                                          int num_sites, double tol = 1e-9);

/// Dense counterpart via the discrete Fourier transform over the rotation
/// angle; result index q + L for q = -L..L.
std::vector<DenseOperator> mqc_components_dft(const DenseOperator& o, const DenseOperator& p,
                                              int num_sites);

/// Line-oriented text format: `coeff_re coeff_im STRING` per term. Blank
/// lines and lines starting with '#' are ignored when reading.
void write_text(std::ostream& os, const OperatorSum& a);
OperatorSum read_text(std::istream& is);

}  // namespace chainsim
