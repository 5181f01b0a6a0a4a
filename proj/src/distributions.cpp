#include "floodrisk/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "floodrisk/errors.hpp"
#include "floodrisk/numeric.hpp"

namespace floodrisk {

namespace {

namespace bm = boost::math;
using MathPolicy = bm::policies::policy<
    bm::policies::domain_error<bm::policies::errno_on_error>,
    bm::policies::pole_error<bm::policies::errno_on_error>,
    bm::policies::overflow_error<bm::policies::errno_on_error>,
    bm::policies::evaluation_error<bm::policies::errno_on_error>,
    bm::policies::promote_double<false>>;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kLn10 = 2.302585092994045684;
constexpr double kLogSqrt2Pi = 0.918938533204672742;
// Below this |xi| the Gumbel limit is used exactly.
constexpr double kGumbelShapeCutoff = 1e-12;

// ---------------------------------------------------------------- GEV

struct Gev {
  double mu, sigma, xi;

  // Returns log t(x), or +/-inf outside the support (+inf below the lower
  // end, -inf above the upper end).
  double log_t(double x) const {
    const double z = (x - mu) / sigma;
    if (std::abs(xi) < kGumbelShapeCutoff) return -z;
    const double a = xi * z;
    if (a <= -1.0) return xi > 0 ? kInf : kNegInf;
    return -std::log1p(a) / xi;
  }

  double log_pdf(double x) const {
    const double lt = log_t(x);
    if (std::isinf(lt)) return kNegInf;
    const double t = std::exp(lt);
    return -std::log(sigma) + (xi + 1.0) * lt - t;
  }

  double cdf(double x) const {
    const double lt = log_t(x);
    if (lt == kInf) return 0.0;
    if (lt == kNegInf) return 1.0;
    return std::exp(-std::exp(lt));
  }

  double sf(double x) const {
    const double lt = log_t(x);
    if (lt == kInf) return 1.0;
    if (lt == kNegInf) return 0.0;
    return -std::expm1(-std::exp(lt));
  }

  double quantile(double p) const {
    const double y = -std::log(p);
    if (std::abs(xi) < kGumbelShapeCutoff) return mu - sigma * std::log(y);
    return mu + sigma * std::expm1(-xi * std::log(y)) / xi;
  }

  double lower() const { return xi > 0 ? mu - sigma / xi : kNegInf; }
  double upper() const { return xi < 0 ? mu - sigma / xi : kInf; }
};

// ---------------------------------------------------------------- LN2

struct Ln2 {
  double mu, sigma;

  double log_pdf(double x) const {
    if (!(x > 0)) return kNegInf;
    const double lx = std::log(x);
    const double z = (lx - mu) / sigma;
    return -lx - std::log(sigma) - kLogSqrt2Pi - 0.5 * z * z;
  }
  double cdf(double x) const {
    if (!(x > 0)) return 0.0;
    return 0.5 * std::erfc(-(std::log(x) - mu) / (sigma * std::sqrt(2.0)));
  }
  double sf(double x) const {
    if (!(x > 0)) return 1.0;
    return 0.5 * std::erfc((std::log(x) - mu) / (sigma * std::sqrt(2.0)));
  }
  double quantile(double p) const {
    return std::exp(mu - sigma * std::sqrt(2.0) * bm::erfc_inv(2.0 * p, MathPolicy()));
  }
};

// ---------------------------------------------------------------- LP3

struct Lp3 {
  double tau, shape, scale;
  Lp3Space space;

  // Transformed variable y (log10 x or x); NaN when x is outside the
  // transform's domain.
  double transform(double x) const {
    if (space == Lp3Space::Raw) return x;
    return x > 0 ? std::log10(x) : std::numeric_limits<double>::quiet_NaN();
  }

  double log_pdf(double x) const {
    const double y = transform(x);
    if (std::isnan(y)) return kNegInf;
    const double w = (y - tau) / scale;
    if (!(w > 0)) return kNegInf;
    double lp = (shape - 1.0) * std::log(w) - w - std::log(std::abs(scale)) - std::lgamma(shape);
    if (space == Lp3Space::Log10) lp -= std::log(x) + std::log(kLn10);
    return lp;
  }

  // Lower-tail probability in w, i.e. P(W <= w).
  double cdf(double x) const {
    const double y = transform(x);
    if (std::isnan(y)) return 0.0;
    const double w = (y - tau) / scale;
    if (!(w > 0)) return scale > 0 ? 0.0 : 1.0;
    return scale > 0 ? bm::gamma_p(shape, w, MathPolicy()) : bm::gamma_q(shape, w, MathPolicy());
  }

  double sf(double x) const {
    const double y = transform(x);
    if (std::isnan(y)) return 1.0;
    const double w = (y - tau) / scale;
    if (!(w > 0)) return scale > 0 ? 1.0 : 0.0;
    return scale > 0 ? bm::gamma_q(shape, w, MathPolicy()) : bm::gamma_p(shape, w, MathPolicy());
  }

  double quantile(double p) const {
    const double w = scale > 0 ? bm::gamma_p_inv(shape, p, MathPolicy())
                               : bm::gamma_q_inv(shape, p, MathPolicy());
    const double y = tau + scale * w;
    return space == Lp3Space::Log10 ? std::pow(10.0, y) : y;
  }

  double lower() const {
    if (scale > 0) return space == Lp3Space::Log10 ? std::pow(10.0, tau) : tau;
    return space == Lp3Space::Log10 ? 0.0 : kNegInf;
  }
  double upper() const {
    if (scale < 0) return space == Lp3Space::Log10 ? std::pow(10.0, tau) : tau;
    return kInf;
  }
};

// ---------------------------------------------------------------- TCEV

struct Tcev {
  double lambda1, theta1, lambda2, theta2;

  // lambda1 * exp(-x/theta1) + lambda2 * exp(-x/theta2), in log space.
  double log_hazard_sum(double x) const {
    const double a = lambda1 > 0 ? std::log(lambda1) - x / theta1 : kNegInf;
    const double b = lambda2 > 0 ? std::log(lambda2) - x / theta2 : kNegInf;
    return log_sum_exp(a, b);
  }

  double log_pdf(double x) const {
    const double s = std::exp(log_hazard_sum(x));
    const double a = lambda1 > 0 ? std::log(lambda1 / theta1) - x / theta1 : kNegInf;
    const double b = lambda2 > 0 ? std::log(lambda2 / theta2) - x / theta2 : kNegInf;
    return -s + log_sum_exp(a, b);
  }
  double cdf(double x) const { return std::exp(-std::exp(log_hazard_sum(x))); }
  double sf(double x) const { return -std::expm1(-std::exp(log_hazard_sum(x))); }

  // Gumbel quantile of a single component, -inf if the component is absent.
  static double component_quantile(double lambda, double theta, double p) {
    if (!(lambda > 0)) return kNegInf;
    return theta * std::log(lambda) - theta * std::log(-std::log(p));
  }
};

// ---------------------------------------------------------------- helpers

double bisect_quantile(const DistributionModel& m, double p, double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || lo > hi) {
    std::ostringstream msg;
    msg << "quantile: invalid bracket [" << lo << ", " << hi << "] for p=" << p << " ("
        << family_name(m.family()) << ")";
    throw NumericError(msg.str());
  }
  // Widen the bracket if component bounds were not tight enough.
  double width = std::max(hi - lo, 1e-8 * std::max(1.0, std::abs(lo)));
  for (int i = 0; i < 200 && m.cdf(lo) > p; ++i) {
    lo -= width;
    width *= 2;
  }
  width = std::max(hi - lo, 1e-8 * std::max(1.0, std::abs(hi)));
  for (int i = 0; i < 200 && m.cdf(hi) < p; ++i) {
    hi += width;
    width *= 2;
  }
  const double flo = m.cdf(lo);
  const double fhi = m.cdf(hi);
  if (!(flo <= p && fhi >= p)) {
    std::ostringstream msg;
    msg << "quantile: could not bracket p=" << p << " for " << family_name(m.family())
        << "; cdf(" << lo << ")=" << flo << ", cdf(" << hi << ")=" << fhi;
    throw NumericError(msg.str());
  }
  return bisect_root([&](double x) { return m.cdf(x) - p; }, lo, hi);
}

Gev gev_at(std::span<const double> p, std::size_t offset) {
  return {p[offset], p[offset + 1], p[offset + 2]};
}

Lp3 lp3_at(std::span<const double> p, std::size_t offset, Lp3Space space) {
  return {p[offset], p[offset + 1], p[offset + 2], space};
}

bool finite_all(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

bool gev_ok(std::span<const double> p, std::size_t o) { return p[o + 1] > 0; }
bool lp3_ok(std::span<const double> p, std::size_t o) { return p[o + 1] > 0 && p[o + 2] != 0; }

// Mixture log density from component log densities.
double mix_log(double weight, double l1, double l2) {
  const double a = weight > 0 ? std::log(weight) + l1 : kNegInf;
  const double b = weight < 1 ? std::log1p(-weight) + l2 : kNegInf;
  return log_sum_exp(a, b);
}

double unit_uniform(std::mt19937_64& rng) {
  // 53 random bits mapped to the open interval (0, 1).
  const std::uint64_t bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------- family metadata

std::string_view family_name(Family family) {
  switch (family) {
    case Family::LN2: return "LN2";
    case Family::LP3: return "LP3";
    case Family::GEV: return "GEV";
    case Family::TCEV: return "TCEV";
    case Family::MixedLP3: return "MixedLP3";
    case Family::MixedGEV: return "MixedGEV";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  for (Family f : kAllFamilies) {
    if (family_name(f) == name) return f;
  }
  throw ConfigError("unknown distribution family '" + std::string(name) +
                    "' (expected LN2, LP3, GEV, TCEV, MixedLP3 or MixedGEV)");
}

std::size_t parameter_count(Family family) {
  switch (family) {
    case Family::LN2: return 2;
    case Family::LP3: return 3;
    case Family::GEV: return 3;
    case Family::TCEV: return 4;
    case Family::MixedLP3: return 7;
    case Family::MixedGEV: return 7;
  }
  return 0;
}

std::string_view lp3_space_name(Lp3Space space) {
  return space == Lp3Space::Log10 ? "log10" : "raw";
}

Lp3Space parse_lp3_space(std::string_view name) {
  if (name == "log10") return Lp3Space::Log10;
  if (name == "raw") return Lp3Space::Raw;
  throw ConfigError("unknown lp3_space '" + std::string(name) + "' (expected log10 or raw)");
}

// ---------------------------------------------------------------- model

bool DistributionModel::valid(Family family, std::span<const double> p) {
  if (p.size() != parameter_count(family) || !finite_all(p)) return false;
  switch (family) {
    case Family::LN2: return p[1] > 0;
    case Family::LP3: return lp3_ok(p, 0);
    case Family::GEV: return gev_ok(p, 0);
    case Family::TCEV:
      return p[0] >= 0 && p[2] >= 0 && p[0] + p[2] > 0 && p[1] > 0 && p[3] > 0;
    case Family::MixedLP3: return lp3_ok(p, 0) && lp3_ok(p, 3) && p[6] >= 0 && p[6] <= 1;
    case Family::MixedGEV: return gev_ok(p, 0) && gev_ok(p, 3) && p[6] >= 0 && p[6] <= 1;
  }
  return false;
}

DistributionModel::DistributionModel(Family family, std::span<const double> params,
                                     Lp3Space lp3_space)
    : family_(family), lp3_space_(lp3_space), count_(parameter_count(family)) {
  if (!valid(family, params)) {
    std::ostringstream msg;
    msg << "invalid " << family_name(family) << " parameters [";
    for (std::size_t i = 0; i < params.size(); ++i) msg << (i ? ", " : "") << params[i];
    msg << "]";
    throw DomainError(msg.str());
  }
  std::copy(params.begin(), params.end(), params_.begin());
  if ((family == Family::MixedGEV || family == Family::MixedLP3) && params_[0] > params_[3]) {
    std::swap_ranges(params_.begin(), params_.begin() + 3, params_.begin() + 3);
    params_[6] = 1.0 - params_[6];
  }
}

double DistributionModel::log_pdf(double x) const {
  const std::span<const double> p = params();
  switch (family_) {
    case Family::LN2: return Ln2{p[0], p[1]}.log_pdf(x);
    case Family::LP3: return lp3_at(p, 0, lp3_space_).log_pdf(x);
    case Family::GEV: return gev_at(p, 0).log_pdf(x);
    case Family::TCEV: return Tcev{p[0], p[1], p[2], p[3]}.log_pdf(x);
    case Family::MixedLP3:
      return mix_log(p[6], lp3_at(p, 0, lp3_space_).log_pdf(x), lp3_at(p, 3, lp3_space_).log_pdf(x));
    case Family::MixedGEV:
      return mix_log(p[6], gev_at(p, 0).log_pdf(x), gev_at(p, 3).log_pdf(x));
  }
  return kNegInf;
}

double DistributionModel::pdf(double x) const { return std::exp(log_pdf(x)); }

double DistributionModel::cdf(double x) const {
  const std::span<const double> p = params();
  switch (family_) {
    case Family::LN2: return Ln2{p[0], p[1]}.cdf(x);
    case Family::LP3: return lp3_at(p, 0, lp3_space_).cdf(x);
    case Family::GEV: return gev_at(p, 0).cdf(x);
    case Family::TCEV: return Tcev{p[0], p[1], p[2], p[3]}.cdf(x);
    case Family::MixedLP3:
      return p[6] * lp3_at(p, 0, lp3_space_).cdf(x) + (1 - p[6]) * lp3_at(p, 3, lp3_space_).cdf(x);
    case Family::MixedGEV:
      return p[6] * gev_at(p, 0).cdf(x) + (1 - p[6]) * gev_at(p, 3).cdf(x);
  }
  return 0.0;
}

double DistributionModel::sf(double x) const {
  const std::span<const double> p = params();
  switch (family_) {
    case Family::LN2: return Ln2{p[0], p[1]}.sf(x);
    case Family::LP3: return lp3_at(p, 0, lp3_space_).sf(x);
    case Family::GEV: return gev_at(p, 0).sf(x);
    case Family::TCEV: return Tcev{p[0], p[1], p[2], p[3]}.sf(x);
    case Family::MixedLP3:
      return p[6] * lp3_at(p, 0, lp3_space_).sf(x) + (1 - p[6]) * lp3_at(p, 3, lp3_space_).sf(x);
    case Family::MixedGEV:
      return p[6] * gev_at(p, 0).sf(x) + (1 - p[6]) * gev_at(p, 3).sf(x);
  }
  return 1.0;
}

double DistributionModel::quantile(double prob) const {
  if (!(prob > 0 && prob < 1)) {
    std::ostringstream msg;
    msg << "quantile: probability " << prob << " outside (0, 1)";
    throw DomainError(msg.str());
  }
  const std::span<const double> p = params();
  switch (family_) {
    case Family::LN2: return Ln2{p[0], p[1]}.quantile(prob);
    case Family::LP3: return lp3_at(p, 0, lp3_space_).quantile(prob);
    case Family::GEV: return gev_at(p, 0).quantile(prob);
    case Family::TCEV: {
      const double lo = std::max(Tcev::component_quantile(p[0], p[1], prob),
                                 Tcev::component_quantile(p[2], p[3], prob));
      if (p[0] == 0 || p[2] == 0) return lo;
      const double root = std::sqrt(prob);
      const double hi = std::max(Tcev::component_quantile(p[0], p[1], root),
                                 Tcev::component_quantile(p[2], p[3], root));
      return bisect_quantile(*this, prob, lo, hi);
    }
    case Family::MixedLP3: {
      const double a = lp3_at(p, 0, lp3_space_).quantile(prob);
      const double b = lp3_at(p, 3, lp3_space_).quantile(prob);
      if (p[6] == 1) return a;
      if (p[6] == 0) return b;
      return bisect_quantile(*this, prob, std::min(a, b), std::max(a, b));
    }
    case Family::MixedGEV: {
      const double a = gev_at(p, 0).quantile(prob);
      const double b = gev_at(p, 3).quantile(prob);
      if (p[6] == 1) return a;
      if (p[6] == 0) return b;
      return bisect_quantile(*this, prob, std::min(a, b), std::max(a, b));
    }
  }
  return 0.0;
}

std::vector<double> DistributionModel::sample(std::size_t count, std::uint64_t seed) const {
  if (count == 0) throw DomainError("sample: count must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<double> out;
  out.reserve(count);
  const std::span<const double> p = params();
  for (std::size_t i = 0; i < count; ++i) {
    switch (family_) {
      case Family::MixedGEV: {
        const bool first = unit_uniform(rng) < p[6];
        out.push_back(gev_at(p, first ? 0 : 3).quantile(unit_uniform(rng)));
        break;
      }
      case Family::MixedLP3: {
        const bool first = unit_uniform(rng) < p[6];
        out.push_back(lp3_at(p, first ? 0 : 3, lp3_space_).quantile(unit_uniform(rng)));
        break;
      }
      default:
        out.push_back(quantile(unit_uniform(rng)));
    }
  }
  return out;
}

double DistributionModel::support_lower() const {
  const std::span<const double> p = params();
  switch (family_) {
    case Family::LN2: return 0.0;
    case Family::LP3: return lp3_at(p, 0, lp3_space_).lower();
    case Family::GEV: return gev_at(p, 0).lower();
    case Family::TCEV: return kNegInf;
    case Family::MixedLP3:
      return std::min(lp3_at(p, 0, lp3_space_).lower(), lp3_at(p, 3, lp3_space_).lower());
    case Family::MixedGEV: return std::min(gev_at(p, 0).lower(), gev_at(p, 3).lower());
  }
  return kNegInf;
}

double DistributionModel::support_upper() const {
  const std::span<const double> p = params();
  switch (family_) {
    case Family::LN2: return kInf;
    case Family::LP3: return lp3_at(p, 0, lp3_space_).upper();
    case Family::GEV: return gev_at(p, 0).upper();
    case Family::TCEV: return kInf;
    case Family::MixedLP3:
      return std::max(lp3_at(p, 0, lp3_space_).upper(), lp3_at(p, 3, lp3_space_).upper());
    case Family::MixedGEV: return std::max(gev_at(p, 0).upper(), gev_at(p, 3).upper());
  }
  return kInf;
}

}  // namespace floodrisk
