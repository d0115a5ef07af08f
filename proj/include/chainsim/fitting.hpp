#pragma once

#include <vector>

namespace chainsim {

struct ExponentialFit {
  double amplitude = 0.0;
  double gamma = 0.0;
  /// Sum of squared residuals of log y.
  double residual = 0.0;
  /// Envelope points actually fitted.
  std::vector<double> t;
  std::vector<double> y;
};

/// Fits y = A e^{-gamma t}. With period > 0 the samples (uniform spacing) are
/// first replaced by their running mean over one period, centred in time.
/// Throws for fewer than 4 envelope points, non-positive values or a
/// degenerate time grid.
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y,
                               double period = 0.0);

/// Straight-line least squares y = a + b x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double residual = 0.0;
};
LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

/// y = a e^{-b x} + c by least squares in y. For fixed b the model is linear
/// in (a, c); b is found by a bracketed scan followed by golden-section
/// refinement over [0, b_max]. The residual is comparable with fit_linear's.
struct DecayTrendFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double offset = 0.0;
  double residual = 0.0;
};
DecayTrendFit fit_exponential_trend(const std::vector<double>& x, const std::vector<double>& y,
                                    double b_max = 50.0);

/// Slope of log y against log x.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace chainsim
