#pragma once

#include <cmath>

// Closed-form truncated Gaussian used as an independent reference.
namespace oracle {

inline double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double Phi(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

struct TruncatedGaussian {
  double mean;
  double variance;
  double lo;
  double hi;

  double sd() const { return std::sqrt(variance); }
  double alpha() const { return (lo - mean) / sd(); }
  double beta() const { return (hi - mean) / sd(); }
  double mass() const { return Phi(beta()) - Phi(alpha()); }

  double cdf(double x) const {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    return (Phi((x - mean) / sd()) - Phi(alpha())) / mass();
  }

  double expectation() const { return mean + sd() * (phi(alpha()) - phi(beta())) / mass(); }

  // Plain bisection on the cdf, 200 halvings.
  double quantile(double q) const {
    double a = lo;
    double b = hi;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      if (cdf(m) < q) a = m; else b = m;
    }
    return b;
  }
};

inline TruncatedGaussian moderate() { return {6.0, 16.0, 0.0, 30.0}; }

}  // namespace oracle
