#include "chainsim/prethermal.hpp"

#include "chainsim/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>

namespace chainsim {

PrethermalSplit split_h0_v(const OperatorSum& h_tdip, double g, double j_scale) {
  if (g == 0.0) {
    throw std::invalid_argument(
        "split_h0_v: g = 0 admits no field-aligned split; a thermal-regime generator is required");
  }
  if (j_scale == 0.0) throw std::invalid_argument("split_h0_v: coupling scale must be nonzero");
  const int n = h_tdip.num_sites();
  PrethermalSplit out;
  out.h0 = build_collective(n, Axis::Z);
  out.v = (h_tdip - g * out.h0) * (1.0 / j_scale);
  out.epsilon = j_scale / g;
  out.scale = g;
  return out;
}

PrethermalSplit alternative_split(const OperatorSum& h_tdip) {
  const int n = h_tdip.num_sites();
  if (n < 2) throw std::invalid_argument("alternative_split: need at least two sites");
  OperatorSum h0(n);
  for (int j = 0; j + 1 < n; ++j) {
    h0 += OperatorSum::single(n, PauliString::single(j, Pauli::Y).with(j + 1, Pauli::Y), 0.5);
  }
  const Complex yy = h_tdip.coefficient(PauliString::single(0, Pauli::Y).with(1, Pauli::Y));
  if (std::abs(yy) == 0.0) {
    throw std::invalid_argument("alternative_split: Hamiltonian has no nearest-neighbour yy term");
  }
  PrethermalSplit out;
  out.scale = yy.real() / 0.5;
  out.h0 = std::move(h0);
  out.v = h_tdip * (1.0 / out.scale) - out.h0;
  out.epsilon = 1.0;
  return out;
}

OperatorSum rotate_cyclic(const OperatorSum& a) {
  std::vector<OperatorSum::Term> terms;
  terms.reserve(a.size());
  for (const auto& [s, c] : a.terms()) {
    PauliString r;
    for (int j = 0; j < a.num_sites(); ++j) {
      switch (s.at(j)) {
        case Pauli::I: break;
        case Pauli::X: r = r.with(j, Pauli::Y); break;
        case Pauli::Y: r = r.with(j, Pauli::Z); break;
        case Pauli::Z: r = r.with(j, Pauli::X); break;
      }
    }
    terms.emplace_back(r, c);
  }
  return OperatorSum(a.num_sites(), std::move(terms));
}

namespace {

// e^{ad_S}(H0 + eps V) collected by powers of eps. A[m][p] is the eps^p part
// of ad_S^m(H) / m!, so A[m][p] = (1/m) sum_j [S_j, A[m-1][p-j]]. At order p
// every contribution except [S_p, H0] is known; its coherence components give
// D_p (q = 0) and S_p, chosen so that [S_p, H0] cancels the rest.
template <class Algebra>
struct Collector {
  using Op = typename Algebra::Op;

  struct Order {
    Op s;
    Op d;
    Op rhs;
    double residual = 0.0;
  };

  Algebra& alg;
  std::vector<Order> orders;
  bool diverged = false;
  std::string diagnostic;

  void run(const Op& h0, const Op& v, int max_order, double residual_tol) {
    const auto n = static_cast<std::size_t>(max_order);
    std::vector<std::vector<std::optional<Op>>> a(n + 1, std::vector<std::optional<Op>>(n + 1));
    a[0][0] = h0;
    a[0][1] = v;
    std::vector<Op> s(n + 1);
    for (std::size_t p = 1; p <= n; ++p) {
      Op rest = p == 1 ? v : alg.zero();
      for (std::size_t m = 1; m <= p; ++m) {
        Op acc = alg.zero();
        bool any = false;
        for (std::size_t j = 1; j <= p; ++j) {
          const std::size_t r = p - j;
          if (m == 1 && r == 0) continue;
          if (!a[m - 1][r]) continue;
          alg.add(acc, alg.comm(s[j], *a[m - 1][r]), 1.0);
          any = true;
        }
        if (!any) continue;
        alg.scale(acc, 1.0 / static_cast<double>(m));
        if (alg.too_large(acc)) {
          diverged = true;
          diagnostic = "term cap exceeded at order " + std::to_string(p);
          return;
        }
        alg.add(rest, acc, 1.0);
        a[m][p] = std::move(acc);
      }
      auto [d, sp] = alg.split(rest);
      Op c = alg.comm_h0(sp);
      Op rhs = rest;
      alg.add(rhs, c, 1.0);
      Op leftover = rhs;
      alg.add(leftover, d, -1.0);
      const double res = alg.norm(leftover) / std::max(1.0, alg.norm(rest));
      if (a[1][p]) {
        alg.add(*a[1][p], c, 1.0);
      } else {
        a[1][p] = c;
      }
      s[p] = sp;
      orders.push_back({std::move(sp), std::move(d), std::move(rhs), res});
      if (res > residual_tol) {
        diverged = true;
        diagnostic = "nonzero residual " + std::to_string(res) + " at order " + std::to_string(p);
        return;
      }
      if (alg.too_large(orders.back().s) || alg.too_large(*a[1][p])) {
        diverged = true;
        diagnostic = "term cap exceeded at order " + std::to_string(p);
        return;
      }
    }
  }
};

struct SymbolicAlgebra {
  using Op = OperatorSum;
  int num_sites;
  OperatorSum h0;
  std::size_t cap;

  Op zero() const { return OperatorSum(num_sites); }
  Op comm(const Op& a, const Op& b) const {
    if (a.empty() || b.empty()) return zero();
    return commutator(a, b);
  }
  Op comm_h0(const Op& s) const { return commutator(s, h0); }
  void add(Op& into, const Op& x, double f) const { into += f * x; }
  void scale(Op& x, double f) const { x *= Complex{f}; }
  double norm(const Op& x) const { return std::sqrt(x.norm_sq()); }
  bool too_large(const Op& x) const { return x.size() > cap; }
  std::pair<Op, Op> split(const Op& rest) const {
    const CoherenceComponents parts = mqc_components_nested(rest, h0, num_sites);
    Op s = zero();
    for (int q = 1; q <= parts.max_order(); ++q) {
      s += (1.0 / q) * (parts.at(q) - parts.at(-q));
    }
    return {parts.at(0), std::move(s)};
  }
};

struct DenseAlgebra {
  using Op = std::vector<RealMatrix>;
  const std::vector<Vector>* levels;
  double dim;

  Op zero() const {
    Op z;
    for (const auto& l : *levels) z.push_back(RealMatrix::Zero(l.size(), l.size()));
    return z;
  }
  Op comm(const Op& a, const Op& b) const {
    Op out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      out[k].noalias() = a[k] * b[k];
      out[k].noalias() -= b[k] * a[k];
    }
    return out;
  }
  Op comm_h0(const Op& s) const {
    Op out = s;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Vector& l = (*levels)[k];
      for (Index c = 0; c < l.size(); ++c) {
        for (Index r = 0; r < l.size(); ++r) out[k](r, c) *= l(c) - l(r);
      }
    }
    return out;
  }
  void add(Op& into, const Op& x, double f) const {
    for (std::size_t k = 0; k < into.size(); ++k) into[k] += f * x[k];
  }
  void scale(Op& x, double f) const {
    for (auto& m : x) m *= f;
  }
  double norm(const Op& x) const {
    double s = 0.0;
    for (const auto& m : x) s += m.squaredNorm();
    return std::sqrt(s / dim);
  }
  bool too_large(const Op&) const { return false; }
  std::pair<Op, Op> split(const Op& rest) const {
    Op d = rest;
    Op s = rest;
    for (std::size_t k = 0; k < rest.size(); ++k) {
      const Vector& l = (*levels)[k];
      for (Index c = 0; c < l.size(); ++c) {
        for (Index r = 0; r < l.size(); ++r) {
          const double q = l(r) - l(c);
          if (std::abs(q) < 0.5) {
            s[k](r, c) = 0.0;
          } else {
            d[k](r, c) = 0.0;
            s[k](r, c) /= q;
          }
        }
      }
    }
    return {std::move(d), std::move(s)};
  }
};

}  // namespace

OperatorSum PrethermalSeries::h_pre(int n) const {
  if (n < 0 || n > completed_orders()) throw std::out_of_range("h_pre: order not computed");
  OperatorSum h = split.h0;
  double eps = 1.0;
  for (int j = 1; j <= n; ++j) {
    eps *= split.epsilon;
    h += eps * d[static_cast<std::size_t>(j - 1)];
  }
  return split.scale * h;
}

OperatorSum PrethermalSeries::generator(int n) const {
  if (n < 0 || n > completed_orders()) throw std::out_of_range("generator: order not computed");
  OperatorSum out(split.h0.num_sites());
  double eps = 1.0;
  for (int j = 1; j <= n; ++j) {
    eps *= split.epsilon;
    out += eps * s[static_cast<std::size_t>(j - 1)];
  }
  return out;
}

PrethermalSeries construct_series(const PrethermalSplit& split, const SeriesOptions& options) {
  if (options.max_order < 1) throw std::invalid_argument("construct_series: max order must be >= 1");
  require_same_length(split.h0, split.v, "construct_series");
  SymbolicAlgebra alg{split.h0.num_sites(), split.h0, options.term_cap};
  Collector<SymbolicAlgebra> col{alg, {}, false, {}};
  col.run(split.h0, split.v, options.max_order, options.residual_tol);
  PrethermalSeries out;
  out.split = split;
  for (auto& o : col.orders) {
    out.s.push_back(std::move(o.s));
    out.d.push_back(std::move(o.d));
    out.rhs.push_back(std::move(o.rhs));
    out.residual.push_back(o.residual);
  }
  out.diverged = col.diverged;
  out.diagnostic = col.diagnostic;
  return out;
}

DenseSeries construct_series_dense(const PrethermalSplit& split, const SeriesOptions& options) {
  if (options.max_order < 1) throw std::invalid_argument("construct_series: max order must be >= 1");
  require_same_length(split.h0, split.v, "construct_series_dense");
  const int n = split.h0.num_sites();
  check_dense_sites(n);
  for (const auto& [s, c] : split.h0.terms()) {
    if (s.x_mask() != 0) {
      throw std::invalid_argument("construct_series_dense: H0 must be diagonal in the computational basis");
    }
  }
  DenseSeries out;
  out.num_sites_ = n;
  out.split_ = split;
  out.states_ = invariant_blocks(split.h0 + split.v);

  double base = 0.0;
  bool first = true;
  DenseAlgebra::Op v_blocks;
  for (const auto& states : out.states_) {
    const Matrix h0 = restrict_to_states(split.h0, states);
    const Matrix v = restrict_to_states(split.v, states);
    if (h0.imag().cwiseAbs().maxCoeff() > 0.0 || v.imag().cwiseAbs().maxCoeff() > 1e-15) {
      throw std::invalid_argument("construct_series_dense: operators must be real");
    }
    Vector l = h0.diagonal().real();
    for (Index i = 0; i < l.size(); ++i) {
      if (first || l(i) < base) base = l(i);
      first = false;
    }
    out.levels_.push_back(l);
    out.h0_.push_back(l.asDiagonal().toDenseMatrix());
    v_blocks.push_back(v.real());
  }
  for (const auto& l : out.levels_) {
    for (Index i = 0; i < l.size(); ++i) {
      const double d = l(i) - base;
      if (std::abs(d - std::round(d)) > 1e-9) {
        throw std::invalid_argument("construct_series_dense: H0 lacks an integer ladder spectrum");
      }
    }
  }

  DenseAlgebra alg{&out.levels_, static_cast<double>(Index{1} << n)};
  Collector<DenseAlgebra> col{alg, {}, false, {}};
  col.run(out.h0_, v_blocks, options.max_order, options.residual_tol);
  for (auto& o : col.orders) {
    out.s_.push_back(std::move(o.s));
    out.d_.push_back(std::move(o.d));
    out.residual_.push_back(o.residual);
  }
  out.diverged_ = col.diverged;
  out.diagnostic_ = col.diagnostic;
  return out;
}

DenseOperator DenseSeries::assemble(const Blocks& b) const {
  const Index dim = Index{1} << num_sites_;
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t k = 0; k < b.size(); ++k) m(states_[k], states_[k]) = b[k].cast<Complex>();
  return DenseOperator(std::move(m));
}

namespace {

DenseSeries::Blocks weighted_sum(const std::vector<DenseSeries::Blocks>& terms, double eps, int n,
                                 DenseSeries::Blocks start) {
  double f = 1.0;
  for (int j = 1; j <= n; ++j) {
    f *= eps;
    const auto& t = terms.at(static_cast<std::size_t>(j - 1));
    for (std::size_t k = 0; k < start.size(); ++k) start[k] += f * t[k];
  }
  return start;
}

}  // namespace

Vector DenseSeries::h_pre_spectrum(int n) const {
  if (n < 0 || n > completed_orders()) throw std::out_of_range("h_pre_spectrum: order not computed");
  const Blocks h = weighted_sum(d_, split_.epsilon, n, h0_);
  std::vector<double> all;
  for (const auto& b : h) {
    const Vector e = symmetric_eigenvalues(split_.scale * b);
    all.insert(all.end(), e.data(), e.data() + e.size());
  }
  std::sort(all.begin(), all.end());
  return Eigen::Map<Vector>(all.data(), static_cast<Index>(all.size()));
}

DenseOperator DenseSeries::h_pre(int n) const {
  if (n < 0 || n > completed_orders()) throw std::out_of_range("h_pre: order not computed");
  DenseOperator h = assemble(weighted_sum(d_, split_.epsilon, n, h0_));
  h *= Complex{split_.scale};
  return h;
}

DenseOperator DenseSeries::generator(int n) const {
  if (n < 0 || n > completed_orders()) throw std::out_of_range("generator: order not computed");
  Blocks zero;
  for (const auto& b : h0_) zero.push_back(RealMatrix::Zero(b.rows(), b.cols()));
  return assemble(weighted_sum(s_, split_.epsilon, n, zero));
}

DenseSeries alternative_generator_series(const OperatorSum& h_tdip, const SeriesOptions& options) {
  PrethermalSplit split = alternative_split(h_tdip);
  split.h0 = rotate_cyclic(split.h0);
  split.v = rotate_cyclic(split.v);
  return construct_series_dense(split, options);
}

double eigenvalue_gap(const Vector& e, const Vector& e_pre, int num_sites) {
  if (e.size() != e_pre.size()) throw std::invalid_argument("eigenvalue_gap: dimension mismatch");
  Vector a = e;
  Vector b = e_pre;
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return (a - b).mean() / num_sites;
}

double eigenvalue_gap_abs(const Vector& e, const Vector& e_pre, int num_sites) {
  if (e.size() != e_pre.size()) throw std::invalid_argument("eigenvalue_gap_abs: dimension mismatch");
  Vector a = e;
  Vector b = e_pre;
  std::sort(a.data(), a.data() + a.size());
  std::sort(b.data(), b.data() + b.size());
  return (a - b).cwiseAbs().mean() / num_sites;
}

double eigenvalue_gap(const DenseOperator& h, const DenseOperator& h_pre, int num_sites) {
  require_same_dim(h, h_pre, "eigenvalue_gap");
  if (!h.is_hermitian() || !h_pre.is_hermitian()) {
    throw std::invalid_argument("eigenvalue_gap: inputs must be Hermitian");
  }
  return eigenvalue_gap(spectrum(h), spectrum(h_pre), num_sites);
}

int optimal_order(const std::vector<double>& r_by_order) {
  if (r_by_order.empty()) throw std::invalid_argument("optimal_order: no orders");
  const auto it = std::min_element(r_by_order.begin(), r_by_order.end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  return static_cast<int>(it - r_by_order.begin()) + 1;
}

std::vector<double> locality_profile(const OperatorSum& s) {
  if (s.empty()) throw std::invalid_argument("locality_profile: empty operator");
  std::vector<double> w(static_cast<std::size_t>(s.num_sites()), 0.0);
  double total = 0.0;
  for (const auto& [p, c] : s.terms()) {
    const std::uint64_t sup = p.support();
    if (sup == 0) continue;
    const int d = (63 - std::countl_zero(sup)) - std::countr_zero(sup);
    w[static_cast<std::size_t>(d)] += std::norm(c);
    total += std::norm(c);
  }
  if (!(total > 0.0)) throw std::invalid_argument("locality_profile: operator has no traceless part");
  for (double& x : w) x /= total;
  return w;
}

}  // namespace chainsim
