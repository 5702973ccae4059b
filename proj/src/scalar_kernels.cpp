#include "erfmin/scalar_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace erfmin {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);  // sqrt(2/pi)
constexpr double kSigmaFloor = 1e-12;

double sign(double t) { return (t > 0.0) - (t < 0.0); }

void check_sigma_t(double t, double sigma, const char* who) {
  if (!(sigma >= kSigmaFloor)) {
    throw std::domain_error(std::string(who) + ": sigma must be >= 1e-12, got " +
                            std::to_string(sigma));
  }
  if (!std::isfinite(t)) {
    throw std::domain_error(std::string(who) + ": t must be finite");
  }
}

}  // namespace

const char* to_string(SmoothingKind k) {
  switch (k) {
    case SmoothingKind::ConvPhi: return "ConvPhi";
    case SmoothingKind::ConvPhiShifted: return "ConvPhiShifted";
    case SmoothingKind::ConvPhiHat: return "ConvPhiHat";
    case SmoothingKind::ConvPhiGaussShift: return "ConvPhiGaussShift";
    case SmoothingKind::SqrtEps: return "SqrtEps";
    case SmoothingKind::Huber: return "Huber";
  }
  return "?";
}

double erf(double t) { return std::erf(t); }

double gauss_kernel(double t, double sigma) {
  if (!(sigma > 0.0)) {
    throw std::domain_error("gauss_kernel: sigma must be positive");
  }
  double z = t / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

ScalarJet smooth_abs(SmoothingKind kind, double t, double sigma) {
  check_sigma_t(t, sigma, "smooth_abs");
  const double a = std::abs(t);

  switch (kind) {
    case SmoothingKind::SqrtEps: {
      double r = std::hypot(t, sigma);
      return {r, t / r, sigma * sigma / (r * r * r)};
    }
    case SmoothingKind::Huber: {
      ScalarJet j;
      if (a <= sigma) {
        j.value = t * t / (2.0 * sigma);
        j.d1 = t / sigma;
      } else {
        j.value = a - 0.5 * sigma;
        j.d1 = sign(t);
      }
      return j;  // d2 intentionally absent
    }
    default:
      break;
  }

  // erf-based kinds; |t|/sigma > 8 branch avoids exp underflow noise.
  const bool far = (a / sigma > 8.0);
  double e, gexp;  // erf(t/(sqrt2 sigma)), exp(-t^2/(2 sigma^2))
  if (far) {
    e = sign(t);
    gexp = 0.0;
  } else {
    e = std::erf(t / (kSqrt2 * sigma));
    double z = t / sigma;
    gexp = std::exp(-0.5 * z * z);
  }
  const double gauss_d2 = (kSqrt2OverPi / sigma) * gexp;  // (sqrt2/(sigma sqrt(pi))) e^{-t^2/2s^2}
  // phi >= |t| holds exactly; the max() only strips the ~1-ulp rounding noise
  // of the two-term sum, which would otherwise dip below |t| near a/sigma ~ 8.
  const double phi_value =
      far ? a : std::max(a, t * e + kSqrt2OverPi * sigma * gexp);

  switch (kind) {
    case SmoothingKind::ConvPhi:
      return {phi_value, e, gauss_d2};
    case SmoothingKind::ConvPhiShifted:
      return {phi_value - kSqrt2OverPi * sigma, e, gauss_d2};
    case SmoothingKind::ConvPhiHat: {
      double v = far ? a : t * e;
      double d1 = e + t * gauss_d2;
      double d2 = gauss_d2 * (2.0 - (t / sigma) * (t / sigma));
      return {v, d1, d2};
    }
    case SmoothingKind::ConvPhiGaussShift: {
      // Subtracted bump sqrt(2/pi) sigma e^{-t^2} decays in t (not t/sigma),
      // so it stays representable where the phi-side Gaussian underflows.
      double bump = kSqrt2OverPi * sigma * std::exp(-t * t);
      double v = phi_value - bump;
      double d1 = e + 2.0 * t * bump;
      double d2 = gauss_d2 + (2.0 - 4.0 * t * t) * bump;
      return {v, d1, d2};
    }
    default:
      throw std::logic_error("smooth_abs: unhandled kind");
  }
}

double l1_distance_quadrature(SmoothingKind kind, double sigma, double halfwidth, long nodes) {
  // Let smooth_abs validate sigma first so sigma <= 0 is a domain error.
  (void)smooth_abs(kind, 0.0, sigma);
  if (!(halfwidth >= 10.0 * sigma)) {
    throw std::invalid_argument("l1_distance_quadrature: halfwidth must be >= 10*sigma");
  }
  if (nodes < 1000) {
    throw std::invalid_argument("l1_distance_quadrature: resolution too low, need nodes >= 1000");
  }
  long n = nodes % 2 == 0 ? nodes : nodes + 1;  // Simpson needs an even count
  const double h = 2.0 * halfwidth / static_cast<double>(n);
  auto f = [&](double t) {
    return std::abs(smooth_abs(kind, t, sigma).value - std::abs(t));
  };
  double acc = f(-halfwidth) + f(halfwidth);
  for (long i = 1; i < n; ++i) {
    double t = -halfwidth + h * static_cast<double>(i);
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(t);
  }
  return acc * h / 3.0;
}

}  // namespace erfmin
