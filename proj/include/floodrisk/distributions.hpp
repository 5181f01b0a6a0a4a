#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace floodrisk {

// Candidate flood-frequency families. Declaration order is the tie-break
// order used when ranking fits.
enum class Family { LN2, LP3, GEV, TCEV, MixedLP3, MixedGEV };

inline constexpr std::array<Family, 6> kAllFamilies = {
    Family::LN2, Family::LP3, Family::GEV, Family::TCEV, Family::MixedLP3, Family::MixedGEV};

std::string_view family_name(Family family);
Family parse_family(std::string_view name);
std::size_t parameter_count(Family family);

// Whether the Pearson III kernel is applied to log10(discharge) (standard
// LP3) or directly to discharge.
enum class Lp3Space { Log10, Raw };

std::string_view lp3_space_name(Lp3Space space);
Lp3Space parse_lp3_space(std::string_view name);

// A fully specified flood-frequency distribution.
//
// Parameter layout:
//   LN2       (mu, sigma)                      log-space mean and sd (natural log)
//   LP3       (tau, shape, scale)              Pearson III location, shape alpha, scale beta
//   GEV       (mu, sigma, xi)                  location, scale, shape
//   TCEV      (lambda1, theta1, lambda2, theta2)
//   MixedLP3  (tau1, shape1, scale1, tau2, shape2, scale2, weight)
//   MixedGEV  (mu1, sigma1, xi1, mu2, sigma2, xi2, weight)
//
// Mixture components are stored with non-decreasing location; construction
// swaps components (and replaces weight w by 1 - w) when needed.
class DistributionModel {
 public:
  static constexpr std::size_t kMaxParams = 7;

  // Throws DomainError when the parameters violate the family constraints.
  DistributionModel(Family family, std::span<const double> params,
                    Lp3Space lp3_space = Lp3Space::Log10);

  // Non-throwing validity check used by the optimizer.
  static bool valid(Family family, std::span<const double> params);

  Family family() const { return family_; }
  Lp3Space lp3_space() const { return lp3_space_; }
  std::span<const double> params() const { return {params_.data(), count_}; }
  double param(std::size_t i) const { return params_[i]; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  // 1 - cdf(x), computed without cancellation in the upper tail.
  double sf(double x) const;
  // Inverse cdf for p in (0, 1). Throws DomainError outside that range and
  // NumericError when a bracket cannot be established.
  double quantile(double p) const;

  // Deterministic draws for a given seed. Throws DomainError if count == 0.
  std::vector<double> sample(std::size_t count, std::uint64_t seed) const;

  // Lower and upper end of the support (may be infinite).
  double support_lower() const;
  double support_upper() const;

  friend bool operator==(const DistributionModel& a, const DistributionModel& b) {
    return a.family_ == b.family_ && a.lp3_space_ == b.lp3_space_ && a.count_ == b.count_ &&
           a.params_ == b.params_;
  }

 private:
  Family family_;
  Lp3Space lp3_space_;
  std::size_t count_;
  std::array<double, kMaxParams> params_{};
};

}  // namespace floodrisk
