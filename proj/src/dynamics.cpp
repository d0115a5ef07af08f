#include "chainsim/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace chainsim {

void check_dense_sites(int num_sites) {
  if (num_sites > kMaxDenseSites) {
    throw ResourceGuardError("dense exact diagonalization limited to L <= " +
                             std::to_string(kMaxDenseSites) + ", got L=" +
                             std::to_string(num_sites));
  }
  if (num_sites < 1) throw std::invalid_argument("need at least one site");
}

namespace {

struct DisjointSets {
  explicit DisjointSets(Index n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), Index{0});
  }
  Index find(Index a) {
    while (parent[static_cast<std::size_t>(a)] != a) {
      auto& p = parent[static_cast<std::size_t>(a)];
      p = parent[static_cast<std::size_t>(p)];
      a = p;
    }
    return a;
  }
  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<Index> parent;
};

std::vector<std::vector<Index>> collect_blocks(DisjointSets& sets, Index dim) {
  std::vector<Index> slot(static_cast<std::size_t>(dim), -1);
  std::vector<std::vector<Index>> blocks;
  for (Index b = 0; b < dim; ++b) {
    const Index root = sets.find(b);
    auto& s = slot[static_cast<std::size_t>(root)];
    if (s < 0) {
      s = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[static_cast<std::size_t>(s)].push_back(b);
  }
  return blocks;
}

constexpr Complex kPhase[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

Matrix block_from_sum(const OperatorSum& h, const std::vector<Index>& states,
                      std::vector<Index>& position) {
  const auto n = static_cast<Index>(states.size());
  for (Index i = 0; i < n; ++i) position[static_cast<std::size_t>(states[static_cast<std::size_t>(i)])] = i;
  Matrix m = Matrix::Zero(n, n);
  for (const auto& [s, c] : h.terms()) {
    const Complex base = c * kPhase[std::popcount(s.x_mask() & s.z_mask()) % 4];
    const auto x = static_cast<Index>(s.x_mask());
    const std::uint64_t z = s.z_mask();
    for (Index i = 0; i < n; ++i) {
      const Index b = states[static_cast<std::size_t>(i)];
      const bool odd = std::popcount(z & static_cast<std::uint64_t>(b)) & 1;
      m(position[static_cast<std::size_t>(b ^ x)], i) += odd ? -base : base;
    }
  }
  return m;
}

bool is_real(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return m.imag().cwiseAbs().maxCoeff() <= 1e-15 * scale;
}

void solve_block(EigenSystem::Block& blk, const Matrix& m) {
  if (is_real(m)) {
    RealSymmetricEigen e = symmetric_eigen(m.real());
    blk.real = true;
    blk.energies = std::move(e.values);
    blk.real_vectors = std::move(e.vectors);
  } else {
    HermitianEigen e = hermitian_eigen(m);
    blk.real = false;
    blk.energies = std::move(e.values);
    blk.complex_vectors = std::move(e.vectors);
  }
}

// forward: Va^dagger M Vb, otherwise Va M Vb^dagger
Matrix transform_block(const EigenSystem::Block& a, const Matrix& m, const EigenSystem::Block& b,
                       bool forward) {
  if (a.real && b.real) {
    const RealMatrix re = m.real();
    const RealMatrix im = m.imag();
    const bool has_re = !re.isZero(0.0);
    const bool has_im = !im.isZero(0.0);
    Matrix out = Matrix::Zero(m.rows(), m.cols());
    const auto apply = [&](const RealMatrix& part) -> RealMatrix {
      if (forward) {
        RealMatrix tmp = a.real_vectors.transpose() * part;
        return tmp * b.real_vectors;
      }
      RealMatrix tmp = a.real_vectors * part;
      return tmp * b.real_vectors.transpose();
    };
    if (has_re) out.real() = apply(re);
    if (has_im) out.imag() = apply(im);
    return out;
  }
  const Matrix va = a.real ? Matrix(a.real_vectors.cast<Complex>()) : a.complex_vectors;
  const Matrix vb = b.real ? Matrix(b.real_vectors.cast<Complex>()) : b.complex_vectors;
  if (forward) {
    Matrix tmp = va.adjoint() * m;
    return tmp * vb;
  }
  Matrix tmp = va * m;
  return tmp * vb.adjoint();
}

}  // namespace

Matrix restrict_to_states(const OperatorSum& h, const std::vector<Index>& states) {
  check_dense_sites(h.num_sites());
  std::vector<Index> position(std::size_t{1} << h.num_sites(), 0);
  return block_from_sum(h, states, position);
}

std::vector<std::vector<Index>> invariant_blocks(const Matrix& h) {
  const Index dim = h.rows();
  DisjointSets sets(dim);
  for (Index c = 0; c < dim; ++c) {
    for (Index r = 0; r < dim; ++r) {
      if (r != c && h(r, c) != Complex{}) sets.unite(r, c);
    }
  }
  return collect_blocks(sets, dim);
}

std::vector<std::vector<Index>> invariant_blocks(const OperatorSum& h) {
  check_dense_sites(h.num_sites());
  const Index dim = Index{1} << h.num_sites();
  DisjointSets sets(dim);
  for (const auto& [s, c] : h.terms()) {
    const auto x = static_cast<Index>(s.x_mask());
    if (x == 0) continue;
    for (Index b = 0; b < dim; ++b) sets.unite(b, b ^ x);
  }
  return collect_blocks(sets, dim);
}

EigenSystem EigenSystem::diagonalize(const DenseOperator& h, double hermitian_tol) {
  check_dense_sites(h.num_sites());
  const double scale = std::max(1.0, h.matrix().cwiseAbs().maxCoeff());
  if (!h.is_hermitian(hermitian_tol * scale)) {
    throw std::invalid_argument("diagonalize: input is not Hermitian");
  }
  EigenSystem out;
  out.num_sites_ = h.num_sites();
  out.dim_ = h.dim();
  for (auto& states : invariant_blocks(h.matrix())) {
    Block blk;
    blk.states = std::move(states);
    const Matrix m = h.matrix()(blk.states, blk.states);
    solve_block(blk, 0.5 * (m + m.adjoint()));
    out.blocks_.push_back(std::move(blk));
  }
  out.finalize();
  return out;
}

EigenSystem EigenSystem::diagonalize(const OperatorSum& h) {
  check_dense_sites(h.num_sites());
  if (!h.is_hermitian(1e-12)) throw std::invalid_argument("diagonalize: input is not Hermitian");
  EigenSystem out;
  out.num_sites_ = h.num_sites();
  out.dim_ = Index{1} << h.num_sites();
  std::vector<Index> position(static_cast<std::size_t>(out.dim_));
  for (auto& states : invariant_blocks(h)) {
    Block blk;
    blk.states = std::move(states);
    solve_block(blk, block_from_sum(h, blk.states, position));
    out.blocks_.push_back(std::move(blk));
  }
  out.finalize();
  return out;
}

void EigenSystem::finalize() {
  energies_.resize(dim_);
  Index offset = 0;
  for (auto& b : blocks_) {
    b.offset = offset;
    energies_.segment(offset, b.size()) = b.energies;
    offset += b.size();
  }
  sorted_ = energies_;
  std::sort(sorted_.data(), sorted_.data() + sorted_.size());
}

double EigenSystem::max_abs_energy() const {
  return energies_.size() == 0 ? 0.0 : energies_.cwiseAbs().maxCoeff();
}

Matrix EigenSystem::eigenvectors() const {
  std::vector<Index> order(static_cast<std::size_t>(dim_));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [this](Index a, Index b) { return energies_(a) < energies_(b); });
  std::vector<Index> column(static_cast<std::size_t>(dim_));
  for (Index k = 0; k < dim_; ++k) column[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
  Matrix w = Matrix::Zero(dim_, dim_);
  for (const auto& b : blocks_) {
    for (Index j = 0; j < b.size(); ++j) {
      const Index col = column[static_cast<std::size_t>(b.offset + j)];
      for (Index i = 0; i < b.size(); ++i) {
        w(b.states[static_cast<std::size_t>(i)], col) =
            b.real ? Complex(b.real_vectors(i, j)) : b.complex_vectors(i, j);
      }
    }
  }
  return w;
}

Matrix EigenSystem::to_eigenbasis(const Matrix& o) const {
  if (o.rows() != dim_ || o.cols() != dim_) {
    throw std::invalid_argument("to_eigenbasis: dimension mismatch");
  }
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& a : blocks_) {
    for (const auto& b : blocks_) {
      const Matrix sub = o(a.states, b.states);
      if (sub.isZero(0.0)) continue;
      out.block(a.offset, b.offset, a.size(), b.size()) = transform_block(a, sub, b, true);
    }
  }
  return out;
}

Matrix EigenSystem::from_eigenbasis(const Matrix& o) const {
  if (o.rows() != dim_ || o.cols() != dim_) {
    throw std::invalid_argument("from_eigenbasis: dimension mismatch");
  }
  Matrix out = Matrix::Zero(dim_, dim_);
  for (const auto& a : blocks_) {
    for (const auto& b : blocks_) {
      const Matrix sub = o.block(a.offset, b.offset, a.size(), b.size());
      if (sub.isZero(0.0)) continue;
      out(a.states, b.states) = transform_block(a, sub, b, false);
    }
  }
  return out;
}

Matrix EigenSystem::evolve_in_eigenbasis(Matrix o_eig, double t) const {
  ComplexVector p(dim_);
  for (Index a = 0; a < dim_; ++a) p(a) = std::exp(-kI * energies_(a) * t);
  for (Index c = 0; c < o_eig.cols(); ++c) {
    const Complex pc = std::conj(p(c));
    for (Index r = 0; r < o_eig.rows(); ++r) o_eig(r, c) *= p(r) * pc;
  }
  return o_eig;
}

Vector spectrum(const DenseOperator& h) {
  check_dense_sites(h.num_sites());
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(h.dim()));
  for (const auto& states : invariant_blocks(h.matrix())) {
    const Matrix m = h.matrix()(states, states);
    const Matrix herm = 0.5 * (m + m.adjoint());
    const Vector e = is_real(herm) ? symmetric_eigenvalues(herm.real()) : hermitian_eigenvalues(herm);
    all.insert(all.end(), e.data(), e.data() + e.size());
  }
  std::sort(all.begin(), all.end());
  return Eigen::Map<Vector>(all.data(), static_cast<Index>(all.size()));
}

Vector spectrum(const OperatorSum& h) {
  check_dense_sites(h.num_sites());
  const Index dim = Index{1} << h.num_sites();
  std::vector<Index> position(static_cast<std::size_t>(dim));
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(dim));
  for (const auto& states : invariant_blocks(h)) {
    const Matrix m = block_from_sum(h, states, position);
    const Vector e = is_real(m) ? symmetric_eigenvalues(m.real()) : hermitian_eigenvalues(m);
    all.insert(all.end(), e.data(), e.data() + e.size());
  }
  std::sort(all.begin(), all.end());
  return Eigen::Map<Vector>(all.data(), static_cast<Index>(all.size()));
}

namespace {

void require_match(const DenseOperator& o, const EigenSystem& eig, const char* what) {
  if (o.dim() != eig.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(o.dim()) + " vs " + std::to_string(eig.dim()) +
                                ")");
  }
}

}  // namespace

DenseOperator evolve_operator(const DenseOperator& o, const EigenSystem& eig, double t) {
  require_match(o, eig, "evolve_operator");
  if (t == 0.0) return o;
  Matrix m = eig.evolve_in_eigenbasis(eig.to_eigenbasis(o.matrix()), t);
  return DenseOperator(eig.from_eigenbasis(m));
}

Matrix propagator(const EigenSystem& eig, double t) {
  ComplexVector p(eig.dim());
  for (Index a = 0; a < eig.dim(); ++a) p(a) = std::exp(-kI * eig.basis_energies()(a) * t);
  return eig.from_eigenbasis(Matrix(p.asDiagonal()));
}

double two_point_correlator(const DenseOperator& a, const DenseOperator& b,
                            const EigenSystem& eig, double t) {
  return two_point_series(a, b, eig, {t}).front();
}

std::vector<double> two_point_series(const DenseOperator& a, const DenseOperator& b,
                                     const EigenSystem& eig, const std::vector<double>& times) {
  require_match(a, eig, "two_point_correlator");
  require_match(b, eig, "two_point_correlator");
  const Index dim = eig.dim();
  const Vector& e = eig.basis_energies();
  // Tr(A(t) B) = sum_a e^{-i E_a t} sum_b W_ab e^{i E_b t}, W_ab = A_ab B_ba
  const Matrix w = eig.to_eigenbasis(a.matrix()).cwiseProduct(eig.to_eigenbasis(b.matrix()).transpose());
  const auto n = static_cast<Index>(times.size());
  Matrix right(dim, n);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < dim; ++j) right(j, k) = std::exp(kI * e(j) * times[static_cast<std::size_t>(k)]);
  }
  const Matrix rows = w * right;
  std::vector<double> out(static_cast<std::size_t>(n));
  const double norm = 4.0 / (static_cast<double>(dim) * eig.num_sites());
  for (Index k = 0; k < n; ++k) {
    Complex tr{};
    for (Index j = 0; j < dim; ++j) tr += std::conj(right(j, k)) * rows(j, k);
    out[static_cast<std::size_t>(k)] = norm * tr.real();
  }
  return out;
}

DenseOperator diagonal_ensemble(const DenseOperator& o, const EigenSystem& eig) {
  require_match(o, eig, "diagonal_ensemble");
  Matrix m = eig.to_eigenbasis(o.matrix());
  const Vector& e = eig.basis_energies();
  const double tol = 1e-9 * std::max(1.0, eig.max_abs_energy());
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      if (std::abs(e(r) - e(c)) >= tol) m(r, c) = 0.0;
    }
  }
  return DenseOperator(eig.from_eigenbasis(m));
}

DenseOperator time_average_operator(const DenseOperator& o, const EigenSystem& eig,
                                    const std::vector<double>& times) {
  require_match(o, eig, "time_average_operator");
  if (times.empty()) throw std::invalid_argument("time_average_operator: empty time grid");
  const Index dim = eig.dim();
  const auto n = static_cast<Index>(times.size());
  Matrix phases(dim, n);
  for (Index k = 0; k < n; ++k) {
    for (Index j = 0; j < dim; ++j) {
      phases(j, k) = std::exp(-kI * eig.basis_energies()(j) * times[static_cast<std::size_t>(k)]);
    }
  }
  // mean_n e^{-i (E_a - E_b) t_n} as a rank-n product
  const Matrix factor = (phases * phases.adjoint()) / static_cast<double>(n);
  const Matrix m = eig.to_eigenbasis(o.matrix()).cwiseProduct(factor);
  DenseOperator out(eig.from_eigenbasis(m));
  out.matrix() = 0.5 * (out.matrix() + out.matrix().adjoint()).eval();
  return out;
}

DenseOperator window_average_operator(const DenseOperator& o, const EigenSystem& eig,
                                      double window) {
  require_match(o, eig, "window_average_operator");
  if (!(window > 0.0)) throw std::invalid_argument("window_average_operator: window must be > 0");
  Matrix m = eig.to_eigenbasis(o.matrix());
  const Vector& e = eig.basis_energies();
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) {
      const double x = (e(r) - e(c)) * window;
      if (std::abs(x) > 1e-12) m(r, c) *= (std::exp(-kI * x) - 1.0) / (-kI * x);
    }
  }
  return DenseOperator(eig.from_eigenbasis(m));
}

double trace_ratio(const DenseOperator& a, const DenseOperator& b) {
  require_same_dim(a, b, "trace_ratio");
  return a.matrix().squaredNorm() / b.matrix().squaredNorm();
}

}  // namespace chainsim
