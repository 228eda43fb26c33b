#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <utility>
#include <vector>

namespace ecodrive {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) with 53 random bits; portable across standard
// library implementations, unlike std::uniform_real_distribution.
double uniform01(Rng& rng);

// Seed for replicate `index` derived from a master seed (SplitMix64 finaliser
// over master + golden-ratio stride * (index + 1)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Law of the random red-phase extension (the delay between the scheduled
// green onset and the moment passing is actually possible).
class DelayDistribution {
 public:
  enum class Family { truncated_gaussian, tabulated };

  static DelayDistribution truncated_gaussian(double mean, double variance, double lo, double hi);
  // Points are (delay, cumulative probability) pairs, delay strictly
  // increasing, probability non-decreasing from 0 to 1.
  static DelayDistribution tabulated(std::vector<std::pair<double, double>> points);
  static DelayDistribution load_tabulated_csv(const std::filesystem::path& path);

  // Traffic presets on the [0, 30] s support.
  static DelayDistribution light_traffic();
  static DelayDistribution moderate_traffic();
  static DelayDistribution heavy_traffic();

  Family family() const { return family_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mean_parameter() const { return mu_; }
  double variance_parameter() const { return sigma_ * sigma_; }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  double pdf(double delay) const;
  // Clamps outside the support: 0 below lo, 1 above hi.
  double cdf(double delay) const;
  // Smallest delay x in [lo, hi] with cdf(x) >= eta (bisection to 1e-9 s for
  // the Gaussian family).
  double inv_cdf(double eta) const;
  // Inverse-transform sample.
  double sample(Rng& rng) const;
  double sample(std::uint64_t seed) const;
  // Mean of the (truncated) law, closed form.
  double mean() const;

  bool operator==(const DelayDistribution&) const = default;

 private:
  DelayDistribution() = default;

  Family family_ = Family::truncated_gaussian;
  double mu_ = 0.0;
  double sigma_ = 1.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double phi_lo_ = 0.0;
  double mass_ = 1.0;
  std::vector<std::pair<double, double>> points_;
};

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace ecodrive
