#include "chainsim/otoc.hpp"

#include <cmath>

namespace chainsim {

double MqcSpectrum::total() const {
  double s = 0.0;
  for (double v : intensity) s += v;
  return s;
}

double oto_commutator_direct(const DenseOperator& a, const DenseOperator& b,
                             const EigenSystem& eig, double t) {
  require_same_dim(a, b, "oto_commutator_direct");
  const DenseOperator c = commutator(evolve_operator(a, eig, t), b);
  return 4.0 / a.num_sites() * c.matrix().squaredNorm() / static_cast<double>(a.dim());
}

Complex oto_correlator(const DenseOperator& a, const DenseOperator& b, const EigenSystem& eig,
                       double t) {
  require_same_dim(a, b, "oto_correlator");
  const DenseOperator at = evolve_operator(a, eig, t);
  const Matrix left = at.matrix().adjoint() * b.matrix().adjoint();
  const Matrix right = at.matrix() * b.matrix();
  // Tr(L R) = sum_ij L_ij R_ji
  return left.cwiseProduct(right.transpose()).sum() / static_cast<double>(a.dim());
}

namespace {

// Eigenbasis of the encoding generator with integer level offsets n_a such
// that lambda_a - lambda_b = n_a - n_b.
struct Encoding {
  bool diagonal = true;
  Matrix vectors;
  std::vector<int> level;
  int spread = 0;

  Matrix rotate(const Matrix& m) const {
    if (diagonal) return m;
    Matrix tmp = vectors.adjoint() * m;
    return tmp * vectors;
  }
};

Encoding make_encoding(const DenseOperator& p) {
  Encoding enc;
  Vector lam;
  if (p.is_diagonal()) {
    lam = p.matrix().diagonal().real();
  } else {
    HermitianEigen e = hermitian_eigen(0.5 * (p.matrix() + p.matrix().adjoint()));
    enc.diagonal = false;
    enc.vectors = std::move(e.vectors);
    lam = std::move(e.values);
  }
  const double base = lam.minCoeff();
  enc.level.resize(static_cast<std::size_t>(lam.size()));
  for (Index a = 0; a < lam.size(); ++a) {
    const double d = lam(a) - base;
    const double r = std::round(d);
    if (std::abs(d - r) > 1e-9) {
      throw std::invalid_argument("MQC encoding generator lacks integer eigenvalue differences");
    }
    enc.level[static_cast<std::size_t>(a)] = static_cast<int>(r);
    enc.spread = std::max(enc.spread, static_cast<int>(r));
  }
  return enc;
}

// G_d = sum over (a, b) with n_a - n_b = d of X_ab Y_ba, d = -spread..spread.
void accumulate_orders(const Encoding& enc, const Matrix& x, const Matrix& y,
                       std::vector<Complex>& g) {
  const Index dim = x.rows();
  for (Index b = 0; b < dim; ++b) {
    const int nb = enc.level[static_cast<std::size_t>(b)];
    for (Index a = 0; a < dim; ++a) {
      g[static_cast<std::size_t>(enc.level[static_cast<std::size_t>(a)] - nb + enc.spread)] +=
          x(a, b) * y(b, a);
    }
  }
}

std::vector<double> signal_from_orders(const std::vector<Complex>& g, int spread, int num_sites,
                                       double scale) {
  const int samples = 2 * num_sites;
  std::vector<double> s(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) {
    const double phi = M_PI * m / num_sites;
    Complex acc{};
    for (int d = -spread; d <= spread; ++d) {
      acc += g[static_cast<std::size_t>(d + spread)] * std::exp(-kI * phi * static_cast<double>(d));
    }
    s[static_cast<std::size_t>(m)] = acc.real() * scale;
  }
  return s;
}

void check_normalized(const DenseOperator& rho0) {
  const double n = hs_norm_sq(rho0);
  if (std::abs(n - 1.0) > 1e-8) {
    throw std::invalid_argument("initial deviation must satisfy Tr(rho^2)/2^L = 1, got " +
                                std::to_string(n));
  }
}

}  // namespace

std::vector<double> mqc_signal(const DenseOperator& rho0, const EigenSystem& eig_fwd,
                               const EigenSystem& eig_bwd, double t1, double t2,
                               const DenseOperator& p, int num_sites) {
  require_same_dim(rho0, p, "mqc_signal");
  if (rho0.dim() != eig_fwd.dim() || rho0.dim() != eig_bwd.dim() ||
      rho0.num_sites() != num_sites) {
    throw std::invalid_argument("mqc_signal: dimension mismatch");
  }
  check_normalized(rho0);
  const Encoding enc = make_encoding(p);
  const Matrix x = enc.rotate(evolve_operator(rho0, eig_fwd, t1).matrix());
  const Matrix y = enc.rotate(evolve_operator(rho0, eig_bwd, t2).matrix());
  std::vector<Complex> g(static_cast<std::size_t>(2 * enc.spread + 1));
  accumulate_orders(enc, x, y, g);
  return signal_from_orders(g, enc.spread, num_sites, 1.0 / static_cast<double>(rho0.dim()));
}

MqcSpectrum mqc_intensities(const std::vector<double>& signal, int num_sites) {
  const int samples = 2 * num_sites;
  if (num_sites < 1 || static_cast<int>(signal.size()) != samples) {
    throw std::invalid_argument("mqc_intensities: signal must have 2L = " +
                                std::to_string(samples) + " samples, got " +
                                std::to_string(signal.size()));
  }
  MqcSpectrum out;
  out.max_order = num_sites;
  out.intensity.assign(static_cast<std::size_t>(2 * num_sites + 1), 0.0);
  for (int q = -num_sites + 1; q <= num_sites; ++q) {
    Complex acc{};
    for (int m = 0; m < samples; ++m) {
      acc += std::exp(kI * (M_PI * q * m / num_sites)) * signal[static_cast<std::size_t>(m)];
    }
    acc /= static_cast<double>(samples);
    out.imaginary_residue = std::max(out.imaginary_residue, std::abs(acc.imag()));
    if (q == num_sites) {
      out.intensity.front() = 0.5 * acc.real();
      out.intensity.back() = 0.5 * acc.real();
    } else {
      out.intensity[static_cast<std::size_t>(q + num_sites)] = acc.real();
    }
  }
  return out;
}

double oto_from_second_moment(const MqcSpectrum& spectrum) {
  double c = 0.0;
  for (int q = -spectrum.max_order; q <= spectrum.max_order; ++q) {
    c += static_cast<double>(q) * q * spectrum.at(q);
  }
  return c;
}

double oto_time_averaged(const DenseOperator& rho0, const EigenSystem& eig,
                         const DenseOperator& p, const std::vector<double>& times,
                         int num_sites) {
  if (times.empty()) throw std::invalid_argument("oto_time_averaged: empty time grid");
  require_same_dim(rho0, p, "oto_time_averaged");
  if (rho0.dim() != eig.dim() || rho0.num_sites() != num_sites) {
    throw std::invalid_argument("oto_time_averaged: dimension mismatch");
  }
  check_normalized(rho0);
  const double dim = static_cast<double>(rho0.dim());
  if (static_cast<double>(times.size()) * dim * dim > kMaxCachedEntries) {
    throw ResourceGuardError("oto_time_averaged: caching " + std::to_string(times.size()) +
                             " evolved operators exceeds the memory cap");
  }
  const Encoding enc = make_encoding(p);
  const Matrix rho_eig = eig.to_eigenbasis(rho0.matrix());
  std::vector<Matrix> cache;
  cache.reserve(times.size());
  for (double t : times) {
    cache.push_back(enc.rotate(eig.from_eigenbasis(eig.evolve_in_eigenbasis(rho_eig, t))));
  }
  std::vector<Complex> g(static_cast<std::size_t>(2 * enc.spread + 1));
  for (const Matrix& x : cache) {
    for (const Matrix& y : cache) accumulate_orders(enc, x, y, g);
  }
  const double m = static_cast<double>(times.size());
  const auto signal = signal_from_orders(g, enc.spread, num_sites, 1.0 / (dim * m * m));
  return oto_from_second_moment(mqc_intensities(signal, num_sites));
}

}  // namespace chainsim
