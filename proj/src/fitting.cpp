#include "chainsim/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chainsim {

namespace {

void require_pairs(const std::vector<double>& x, const std::vector<double>& y, std::size_t min,
                   const char* what) {
  if (x.size() != y.size()) throw std::invalid_argument(std::string(what) + ": length mismatch");
  if (x.size() < min) {
    throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(min) +
                                " points");
  }
}

}  // namespace

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  require_pairs(x, y, 2, "fit_linear");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2) throw std::invalid_argument("fit_linear: degenerate abscissae");
  const Eigen::Vector2d c = qr.solve(b);
  LinearFit f;
  f.intercept = c(0);
  f.slope = c(1);
  f.residual = (a * c - b).squaredNorm();
  return f;
}

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                               double period) {
  require_pairs(t, y, 2, "fit_exponential");
  ExponentialFit out;
  if (period > 0.0) {
    const double dt = t[1] - t[0];
    if (!(dt > 0.0)) throw std::invalid_argument("fit_exponential: times must increase");
    const auto w = static_cast<std::size_t>(std::max(1L, std::lround(period / dt)));
    for (std::size_t i = 0; i + w <= t.size(); ++i) {
      double s = 0.0;
      for (std::size_t k = i; k < i + w; ++k) s += y[k];
      out.t.push_back(0.5 * (t[i] + t[i + w - 1]));
      out.y.push_back(s / static_cast<double>(w));
    }
  } else {
    out.t = t;
    out.y = y;
  }
  if (out.t.size() < 4) throw std::invalid_argument("fit_exponential: need at least 4 envelope points");
  std::vector<double> logy(out.y.size());
  for (std::size_t i = 0; i < out.y.size(); ++i) {
    if (!(out.y[i] > 0.0)) throw std::invalid_argument("fit_exponential: non-positive envelope value");
    logy[i] = std::log(out.y[i]);
  }
  const LinearFit lf = fit_linear(out.t, logy);
  out.amplitude = std::exp(lf.intercept);
  out.gamma = -lf.slope;
  out.residual = lf.residual;
  return out;
}

DecayTrendFit fit_exponential_trend(const std::vector<double>& x, const std::vector<double>& y,
                                    double b_max) {
  require_pairs(x, y, 4, "fit_exponential_trend");
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) rhs(i) = y[static_cast<std::size_t>(i)];
  const auto solve = [&](double b) {
    Eigen::MatrixXd a(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, 0) = std::exp(-b * x[static_cast<std::size_t>(i)]);
      a(i, 1) = 1.0;
    }
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(rhs);
    return DecayTrendFit{c(0), b, c(1), (a * c - rhs).squaredNorm()};
  };
  constexpr int kScan = 400;
  DecayTrendFit best = solve(b_max / kScan);
  int at = 1;
  for (int k = 2; k <= kScan; ++k) {
    const DecayTrendFit f = solve(b_max * k / kScan);
    if (f.residual < best.residual) {
      best = f;
      at = k;
    }
  }
  double lo = b_max * (at - 1) / kScan;
  double hi = b_max * std::min(at + 1, kScan) / kScan;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    const double m1 = hi - phi * (hi - lo);
    const double m2 = lo + phi * (hi - lo);
    if (solve(m1).residual < solve(m2).residual) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  const DecayTrendFit refined = solve(0.5 * (lo + hi));
  return refined.residual < best.residual ? refined : best;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require_pairs(x, y, 2, "log_log_slope");
  std::vector<double> lx(x.size());
  std::vector<double> ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log_log_slope: non-positive value");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return fit_linear(lx, ly).slope;
}

}  // namespace chainsim
