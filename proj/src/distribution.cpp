#include "ecodrive/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr double kQuantileTolerance = 1e-9;

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master + 0x9E3779B97F4A7C15ULL * (index + 1));
}

DelayDistribution DelayDistribution::truncated_gaussian(double mean, double variance, double lo,
                                                        double hi) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ConfigError("truncated gaussian: variance must be positive");
  }
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ConfigError("truncated gaussian: support upper bound must exceed lower bound");
  }
  if (lo < 0.0) throw ConfigError("truncated gaussian: support must start at or above 0");
  DelayDistribution d;
  d.family_ = Family::truncated_gaussian;
  d.mu_ = mean;
  d.sigma_ = std::sqrt(variance);
  d.lo_ = lo;
  d.hi_ = hi;
  d.phi_lo_ = normal_cdf((lo - mean) / d.sigma_);
  d.mass_ = normal_cdf((hi - mean) / d.sigma_) - d.phi_lo_;
  if (!(d.mass_ > 0.0)) throw ConfigError("truncated gaussian: support carries no probability mass");
  return d;
}

DelayDistribution DelayDistribution::tabulated(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw ConfigError("tabulated delay: need at least two (delay, F) points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [x, f] = points[i];
    if (!std::isfinite(x) || !std::isfinite(f) || f < 0.0 || f > 1.0) {
      throw ConfigError("tabulated delay: point " + std::to_string(i) + " out of range");
    }
    if (i > 0 && !(x > points[i - 1].first)) {
      throw ConfigError("tabulated delay: delays must increase strictly (point " + std::to_string(i) + ")");
    }
    if (i > 0 && f < points[i - 1].second) {
      throw ConfigError("tabulated delay: CDF must be non-decreasing (point " + std::to_string(i) + ")");
    }
  }
  if (points.front().second != 0.0 || points.back().second != 1.0) {
    throw ConfigError("tabulated delay: CDF must run from 0 to 1");
  }
  if (points.front().first < 0.0) throw ConfigError("tabulated delay: delays must be non-negative");
  DelayDistribution d;
  d.family_ = Family::tabulated;
  d.lo_ = points.front().first;
  d.hi_ = points.back().first;
  d.mu_ = 0.0;
  d.sigma_ = 0.0;
  d.points_ = std::move(points);
  return d;
}

DelayDistribution DelayDistribution::load_tabulated_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("tabulated delay: cannot open " + path.string());
  std::vector<std::pair<double, double>> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string a;
    std::string f;
    if (!std::getline(ss, a, ',') || !std::getline(ss, f, ',')) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected two columns");
    }
    try {
      points.emplace_back(std::stod(a), std::stod(f));
    } catch (const std::exception&) {
      if (points.empty() && line_no == 1) continue;  // header row
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": not a number");
    }
  }
  return tabulated(std::move(points));
}

DelayDistribution DelayDistribution::light_traffic() { return truncated_gaussian(3.0, 4.0, 0.0, 30.0); }
DelayDistribution DelayDistribution::moderate_traffic() { return truncated_gaussian(6.0, 16.0, 0.0, 30.0); }
DelayDistribution DelayDistribution::heavy_traffic() { return truncated_gaussian(15.0, 25.0, 0.0, 30.0); }

double DelayDistribution::pdf(double x) const {
  if (x < lo_ || x > hi_) return 0.0;
  if (family_ == Family::truncated_gaussian) {
    return normal_pdf((x - mu_) / sigma_) / (sigma_ * mass_);
  }
  const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const auto& p) { return v < p.first; });
  const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - points_.begin(), 1),
                                              points_.size() - 1);
  return (points_[i].second - points_[i - 1].second) / (points_[i].first - points_[i - 1].first);
}

double DelayDistribution::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  if (family_ == Family::truncated_gaussian) {
    return std::clamp((normal_cdf((x - mu_) / sigma_) - phi_lo_) / mass_, 0.0, 1.0);
  }
  const auto it = std::upper_bound(points_.begin(), points_.end(), x,
                                   [](double v, const auto& p) { return v < p.first; });
  const std::size_t i = static_cast<std::size_t>(it - points_.begin());
  const auto [x0, f0] = points_[i - 1];
  const auto [x1, f1] = points_[i];
  return f0 + (f1 - f0) * (x - x0) / (x1 - x0);
}

double DelayDistribution::inv_cdf(double eta) const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("reliability must lie in [0, 1]");
  if (eta == 0.0) return lo_;
  if (eta == 1.0) return hi_;
  if (family_ == Family::tabulated) {
    const auto it = std::lower_bound(points_.begin(), points_.end(), eta,
                                     [](const auto& p, double v) { return p.second < v; });
    const std::size_t i = static_cast<std::size_t>(it - points_.begin());
    if (i == 0) return points_.front().first;
    const auto [x0, f0] = points_[i - 1];
    const auto [x1, f1] = points_[i];
    return x0 + (eta - f0) / (f1 - f0) * (x1 - x0);
  }
  double a = lo_;
  double b = hi_;
  while (b - a > kQuantileTolerance) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (cdf(mid) >= eta) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return b;
}

double DelayDistribution::sample(Rng& rng) const { return inv_cdf(uniform01(rng)); }

double DelayDistribution::sample(std::uint64_t seed) const {
  Rng rng(seed);
  return sample(rng);
}

double DelayDistribution::mean() const {
  if (family_ == Family::truncated_gaussian) {
    const double a = (lo_ - mu_) / sigma_;
    const double b = (hi_ - mu_) / sigma_;
    return mu_ + sigma_ * (normal_pdf(a) - normal_pdf(b)) / mass_;
  }
  double m = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    m += (points_[i].second - points_[i - 1].second) * 0.5 * (points_[i].first + points_[i - 1].first);
  }
  return m;
}

}  // namespace ecodrive
