#include "chainsim/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace chainsim {

namespace {

constexpr Complex kPhases[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

int popcount(std::uint64_t v) { return std::popcount(v); }

std::uint64_t site_bit(int site) { return std::uint64_t{1} << site; }

void check_sites(int num_sites) {
  if (num_sites < 1 || num_sites > kMaxPauliSites) {
    throw std::invalid_argument("number of sites must be in [1, 64], got " +
                                std::to_string(num_sites));
  }
}

}  // namespace

PauliString PauliString::parse(std::string_view text) {
  if (text.size() > static_cast<std::size_t>(kMaxPauliSites)) {
    throw std::invalid_argument("Pauli string longer than 64 sites");
  }
  PauliString p;
  for (std::size_t j = 0; j < text.size(); ++j) {
    switch (text[j]) {
      case 'I': break;
      case 'X': p = p.with(static_cast<int>(j), Pauli::X); break;
      case 'Y': p = p.with(static_cast<int>(j), Pauli::Y); break;
      case 'Z': p = p.with(static_cast<int>(j), Pauli::Z); break;
      default:
        throw std::invalid_argument("invalid Pauli character '" + std::string(1, text[j]) + "'");
    }
  }
  return p;
}

PauliString PauliString::single(int site, Pauli p) { return PauliString{}.with(site, p); }

Pauli PauliString::at(int site) const {
  const bool x = (x_ >> site) & 1U;
  const bool z = (z_ >> site) & 1U;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

PauliString PauliString::with(int site, Pauli p) const {
  const std::uint64_t b = site_bit(site);
  std::uint64_t x = x_ & ~b;
  std::uint64_t z = z_ & ~b;
  if (p == Pauli::X || p == Pauli::Y) x |= b;
  if (p == Pauli::Z || p == Pauli::Y) z |= b;
  return {x, z};
}

int PauliString::weight() const { return popcount(x_ | z_); }

std::string PauliString::to_string(int num_sites) const {
  static constexpr char kChars[4] = {'I', 'X', 'Y', 'Z'};
  std::string s(static_cast<std::size_t>(num_sites), 'I');
  for (int j = 0; j < num_sites; ++j) s[static_cast<std::size_t>(j)] = kChars[static_cast<int>(at(j))];
  return s;
}

std::pair<Complex, PauliString> multiply_strings(PauliString a, PauliString b) {
  // With P = i^{|x&z|} X^x Z^z, the product picks up (-1)^{|z_a & x_b|} from
  // moving Z^{z_a} past X^{x_b}.
  const PauliString c{a.x_mask() ^ b.x_mask(), a.z_mask() ^ b.z_mask()};
  const int exponent = popcount(a.x_mask() & a.z_mask()) + popcount(b.x_mask() & b.z_mask()) +
                       2 * popcount(a.z_mask() & b.x_mask()) -
                       popcount(c.x_mask() & c.z_mask());
  return {kPhases[((exponent % 4) + 4) % 4], c};
}

bool strings_commute(PauliString a, PauliString b) {
  return ((popcount(a.x_mask() & b.z_mask()) + popcount(a.z_mask() & b.x_mask())) & 1) == 0;
}

PauliTerm multiply(const PauliTerm& a, const PauliTerm& b) {
  if (a.num_sites != b.num_sites) {
    throw std::invalid_argument("multiply: length mismatch (" + std::to_string(a.num_sites) +
                                " vs " + std::to_string(b.num_sites) + ")");
  }
  const auto [phase, s] = multiply_strings(a.string, b.string);
  return {a.num_sites, s, phase * a.coeff * b.coeff};
}

// ---------------------------------------------------------------------------
// OperatorSum

OperatorSum::OperatorSum(int num_sites) : num_sites_(num_sites) { check_sites(num_sites); }

OperatorSum::OperatorSum(int num_sites, std::vector<Term> terms)
    : num_sites_(num_sites), terms_(std::move(terms)) {
  check_sites(num_sites);
  const std::uint64_t mask =
      num_sites == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << num_sites) - 1;
  for (const auto& [s, c] : terms_) {
    if ((s.support() & ~mask) != 0) {
      throw std::invalid_argument("Pauli string acts outside the " + std::to_string(num_sites) +
                                  "-site chain");
    }
  }
  canonicalize();
}

OperatorSum OperatorSum::single(int num_sites, PauliString s, Complex c) {
  return OperatorSum(num_sites, {{s, c}});
}

OperatorSum OperatorSum::identity(int num_sites, Complex c) {
  return OperatorSum(num_sites, {{PauliString{}, c}});
}

void OperatorSum::canonicalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.first < b.first; });
  std::vector<Term> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().first == t.first) {
      merged.back().second += t.second;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return std::abs(t.second) < kPruneThreshold; });
  terms_ = std::move(merged);
}

Complex OperatorSum::coefficient(PauliString s) const {
  const auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                                   [](const Term& t, PauliString key) { return t.first < key; });
  if (it != terms_.end() && it->first == s) return it->second;
  return {};
}

bool OperatorSum::is_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const Term& t) { return std::abs(t.second.imag()) <= tol; });
}

bool OperatorSum::is_anti_hermitian(double tol) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [tol](const Term& t) { return std::abs(t.second.real()) <= tol; });
}

OperatorSum OperatorSum::adjoint() const {
  OperatorSum out = *this;
  for (auto& t : out.terms_) t.second = std::conj(t.second);
  return out;
}

double OperatorSum::norm_sq() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::norm(t.second);
  return s;
}

double OperatorSum::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.second));
  return m;
}

OperatorSum OperatorSum::filtered(const std::function<bool(PauliString)>& pred) const {
  OperatorSum out(num_sites_);
  for (const auto& t : terms_) {
    if (pred(t.first)) out.terms_.push_back(t);
  }
  return out;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& o) {
  require_same_length(*this, o, "operator+");
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms_.end() || b->first < a->first) {
      merged.push_back(*b++);
    } else {
      const Complex c = a->second + b->second;
      if (std::abs(c) >= kPruneThreshold) merged.emplace_back(a->first, c);
      ++a;
      ++b;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

OperatorSum& OperatorSum::operator-=(const OperatorSum& o) { return *this += (-1.0 * o); }

OperatorSum& OperatorSum::operator*=(Complex s) {
  for (auto& t : terms_) t.second *= s;
  std::erase_if(terms_, [](const Term& t) { return std::abs(t.second) < kPruneThreshold; });
  return *this;
}

void require_same_length(const OperatorSum& a, const OperatorSum& b, const char* what) {
  if (a.num_sites() != b.num_sites()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" +
                                std::to_string(a.num_sites()) + " vs " +
                                std::to_string(b.num_sites()) + ")");
  }
}

namespace {

template <bool kCommutatorOnly>
OperatorSum accumulate_products(const OperatorSum& a, const OperatorSum& b) {
  std::unordered_map<PauliString, Complex, PauliStringHash> acc;
  acc.reserve(std::min<std::size_t>(a.size() * b.size(), std::size_t{1} << 24));
  for (const auto& [sa, ca] : a.terms()) {
    for (const auto& [sb, cb] : b.terms()) {
      if constexpr (kCommutatorOnly) {
        if (strings_commute(sa, sb)) continue;
      }
      const auto [phase, s] = multiply_strings(sa, sb);
      // Anticommuting strings give [P, Q] = 2 P Q.
      acc[s] += (kCommutatorOnly ? 2.0 : 1.0) * phase * ca * cb;
    }
  }
  std::vector<OperatorSum::Term> terms(acc.begin(), acc.end());
  return OperatorSum(a.num_sites(), std::move(terms));
}

}  // namespace

OperatorSum product(const OperatorSum& a, const OperatorSum& b) {
  require_same_length(a, b, "product");
  return accumulate_products<false>(a, b);
}

OperatorSum commutator(const OperatorSum& a, const OperatorSum& b) {
  require_same_length(a, b, "commutator");
  return accumulate_products<true>(a, b);
}

Complex hs_inner(const OperatorSum& a, const OperatorSum& b) {
  require_same_length(a, b, "hs_inner");
  Complex s{};
  auto ia = a.terms().begin();
  auto ib = b.terms().begin();
  while (ia != a.terms().end() && ib != b.terms().end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      s += std::conj(ia->second) * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

double max_coefficient_distance(const OperatorSum& a, const OperatorSum& b) {
  require_same_length(a, b, "max_coefficient_distance");
  return (a - b).max_abs_coefficient();
}

// ---------------------------------------------------------------------------
// Hamming weight

double HammingSpectrum::sum() const {
  double s = 0.0;
  for (std::size_t k = 1; k < f.size(); ++k) s += f[k];
  return s;
}

namespace {

HammingSpectrum normalize_weights(std::vector<double> w) {
  double total = 0.0;
  for (std::size_t k = 1; k < w.size(); ++k) total += w[k];
  if (!(total > 0.0)) {
    throw std::invalid_argument("hamming_decompose: operator has no traceless part");
  }
  for (double& v : w) v /= total;
  return {std::move(w)};
}

// Replaces each entry with the coefficient of the Pauli string whose site-j
// code is read from (row bit j, column bit j): I (0,0), Z (1,1), X (0,1),
// Y (1,0). Coefficients follow M = sum_P c_P P.
void pauli_transform_in_place(Matrix& m, int num_sites) {
  const Index dim = m.rows();
  for (int j = 0; j < num_sites; ++j) {
    const Index bit = Index{1} << j;
    for (Index c = 0; c < dim; ++c) {
      if (c & bit) continue;
      for (Index r = 0; r < dim; ++r) {
        if (r & bit) continue;
        const Complex m00 = m(r, c);
        const Complex m01 = m(r, c | bit);
        const Complex m10 = m(r | bit, c);
        const Complex m11 = m(r | bit, c | bit);
        m(r, c) = 0.5 * (m00 + m11);
        m(r | bit, c | bit) = 0.5 * (m00 - m11);
        m(r, c | bit) = 0.5 * (m01 + m10);
        m(r | bit, c) = 0.5 * kI * (m01 - m10);
      }
    }
  }
}

}  // namespace

HammingSpectrum hamming_decompose(const OperatorSum& a) {
  std::vector<double> w(static_cast<std::size_t>(a.num_sites()) + 1, 0.0);
  for (const auto& [s, c] : a.terms()) w[static_cast<std::size_t>(s.weight())] += std::norm(c);
  return normalize_weights(std::move(w));
}

HammingSpectrum hamming_decompose(const DenseOperator& a) { return hamming_decompose(DenseOperator(a)); }

HammingSpectrum hamming_decompose(DenseOperator&& a) {
  Matrix& m = a.matrix();
  pauli_transform_in_place(m, a.num_sites());
  std::vector<double> w(static_cast<std::size_t>(a.num_sites()) + 1, 0.0);
  const Index dim = m.rows();
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      w[static_cast<std::size_t>(popcount(static_cast<std::uint64_t>(r | c)))] += std::norm(m(r, c));
    }
  }
  return normalize_weights(std::move(w));
}

double weight_configurations(int num_sites, int k) {
  double binom = 1.0;
  for (int i = 1; i <= k; ++i) binom = binom * (num_sites - k + i) / i;
  return std::pow(3.0, k) * binom;
}

HammingSpectrum random_operator_baseline(int num_sites) {
  std::vector<double> w(static_cast<std::size_t>(num_sites) + 1, 0.0);
  for (int k = 1; k <= num_sites; ++k) w[static_cast<std::size_t>(k)] = weight_configurations(num_sites, k);
  return normalize_weights(std::move(w));
}

// ---------------------------------------------------------------------------
// Dense conversion

DenseOperator to_dense(const OperatorSum& a) {
  if (a.num_sites() > 14) {
    throw ResourceGuardError("to_dense: " + std::to_string(a.num_sites()) +
                             " sites exceeds the dense limit of 14");
  }
  const Index dim = Index{1} << a.num_sites();
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& [s, c] : a.terms()) {
    const Complex base = c * kPhases[popcount(s.x_mask() & s.z_mask()) % 4];
    const auto x = static_cast<Index>(s.x_mask());
    const std::uint64_t z = s.z_mask();
    for (Index b = 0; b < dim; ++b) {
      const bool odd = popcount(z & static_cast<std::uint64_t>(b)) & 1;
      m(b ^ x, b) += odd ? -base : base;
    }
  }
  return DenseOperator(std::move(m));
}

OperatorSum pauli_decompose(const DenseOperator& a) {
  Matrix m = a.matrix();
  pauli_transform_in_place(m, a.num_sites());
  std::vector<OperatorSum::Term> terms;
  const Index dim = m.rows();
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      if (std::abs(m(r, c)) < OperatorSum::kPruneThreshold) continue;
      const auto ru = static_cast<std::uint64_t>(r);
      const auto cu = static_cast<std::uint64_t>(c);
      terms.emplace_back(PauliString{ru ^ cu, ru}, m(r, c));
    }
  }
  return OperatorSum(a.num_sites(), std::move(terms));
}

// ---------------------------------------------------------------------------
// Coherence-order decomposition

OperatorSum CoherenceComponents::sum() const {
  OperatorSum s(parts_.empty() ? 1 : parts_.front().num_sites());
  for (const auto& p : parts_) s += p;
  return s;
}

CoherenceComponents mqc_components_nested(const OperatorSum& o, const OperatorSum& p,
                                          int num_sites, double tol) {
  require_same_length(o, p, "mqc_components_nested");
  if (o.num_sites() != num_sites) {
    throw std::invalid_argument("mqc_components_nested: operator length differs from L");
  }
  const int max_order = num_sites;
  const auto ad = [&p](const OperatorSum& x) { return commutator(p, x); };

  // The two Vandermonde systems
  //   ad^{2i}(O)   = sum_k (k^2)^i O^+_k,      O^+_k = O_k + O_{-k}
  //   ad^{2i-1}(O) = sum_k k (k^2)^{i-1} O^-_k, O^-_k = O_k - O_{-k}
  // share nodes k^2, so row k of the inverse is the Lagrange polynomial
  // l_k(x) = prod_{m != k} (x - m^2) / (k^2 - m^2). It is applied to O as a
  // product of nested ad^2 steps; the m = 0 factor removes the q = 0 part.
  std::vector<OperatorSum> parts(static_cast<std::size_t>(2 * max_order + 1),
                                 OperatorSum(num_sites));
  OperatorSum nonzero_total(num_sites);
  for (int k = 1; k <= max_order; ++k) {
    OperatorSum x = o;
    for (int m = 0; m <= max_order && !x.empty(); ++m) {
      if (m == k) continue;
      const OperatorSum ad2 = ad(ad(x));
      x = (ad2 - static_cast<double>(m * m) * x) * (1.0 / static_cast<double>(k * k - m * m));
    }
    const OperatorSum plus = x;
    const OperatorSum minus = ad(x) * (1.0 / k);
    parts[static_cast<std::size_t>(max_order + k)] = 0.5 * (plus + minus);
    parts[static_cast<std::size_t>(max_order - k)] = 0.5 * (plus - minus);
    nonzero_total += plus;
  }
  parts[static_cast<std::size_t>(max_order)] = o - nonzero_total;

  const double scale = std::max(1.0, std::sqrt(o.norm_sq()));
  for (int q = -max_order; q <= max_order; ++q) {
    const OperatorSum& oq = parts[static_cast<std::size_t>(q + max_order)];
    if (oq.empty()) continue;
    const double residual = std::sqrt((ad(oq) - static_cast<double>(q) * oq).norm_sq());
    if (residual > tol * scale) {
      throw std::invalid_argument(
          "mqc_components_nested: generator lacks an integer ladder spectrum (residual " +
          std::to_string(residual) + " at q=" + std::to_string(q) + ")");
    }
  }
  return CoherenceComponents(max_order, std::move(parts));
}

std::vector<DenseOperator> mqc_components_dft(const DenseOperator& o, const DenseOperator& p,
                                              int num_sites) {
  require_same_dim(o, p, "mqc_components_dft");
  if (o.num_sites() != num_sites) {
    throw std::invalid_argument("mqc_components_dft: operator dimension differs from 2^L");
  }
  const HermitianEigen eig = hermitian_eigen(0.5 * (p.matrix() + p.matrix().adjoint()));
  const Vector& lam = eig.values;
  for (Index a = 0; a < lam.size(); ++a) {
    const double d = lam(a) - lam(0);
    if (std::abs(d - std::round(d)) > 1e-9) {
      throw std::invalid_argument("mqc_components_dft: generator lacks an integer ladder spectrum");
    }
  }
  const Matrix rotated = eig.vectors.adjoint() * o.matrix() * eig.vectors;
  // N >= 2L + 1 angles keep q = +L and q = -L in separate bins.
  const int samples = 2 * num_sites + 1;
  const Index dim = o.dim();
  std::vector<DenseOperator> out;
  out.reserve(static_cast<std::size_t>(2 * num_sites + 1));
  for (int q = -num_sites; q <= num_sites; ++q) {
    Matrix comp(dim, dim);
    for (Index b = 0; b < dim; ++b) {
      for (Index a = 0; a < dim; ++a) {
        // (1/N) sum_m e^{i q theta_m} e^{-i theta_m (lam_a - lam_b)}
        Complex w{};
        const double diff = lam(a) - lam(b);
        for (int m = 0; m < samples; ++m) {
          const double theta = 2.0 * M_PI * m / samples;
          w += std::exp(kI * theta * (static_cast<double>(q) - diff));
        }
        comp(a, b) = rotated(a, b) * w / static_cast<double>(samples);
      }
    }
    out.emplace_back(eig.vectors * comp * eig.vectors.adjoint());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text format

void write_text(std::ostream& os, const OperatorSum& a) {
  os << "# sites " << a.num_sites() << '\n';
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(17);
  for (const auto& [s, c] : a.terms()) {
    os << c.real() << ' ' << c.imag() << ' ' << s.to_string(a.num_sites()) << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

OperatorSum read_text(std::istream& is) {
  int num_sites = -1;
  std::vector<OperatorSum::Term> terms;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      int n = 0;
      if (hs >> key >> n && key == "sites") num_sites = n;
      continue;
    }
    std::istringstream ls(line);
    double re = 0.0;
    double im = 0.0;
    std::string str;
    if (!(ls >> re >> im >> str)) {
      throw std::invalid_argument("read_text: malformed line " + std::to_string(line_no));
    }
    const int len = static_cast<int>(str.size());
    if (num_sites < 0) num_sites = len;
    if (len != num_sites) {
      throw std::invalid_argument("read_text: line " + std::to_string(line_no) +
                                  " has a string of length " + std::to_string(len) +
                                  ", expected " + std::to_string(num_sites));
    }
    terms.emplace_back(PauliString::parse(str), Complex{re, im});
  }
  if (num_sites < 0) throw std::invalid_argument("read_text: no sites header and no terms");
  return OperatorSum(num_sites, std::move(terms));
}

}  // namespace chainsim
