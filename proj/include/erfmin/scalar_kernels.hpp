#pragma once

#include <optional>

namespace erfmin {

// The six pointwise smooth approximations to |t|.
//
//  ConvPhi          phi_sigma(t)  = t*erf(t/(sqrt(2)sigma)) + sqrt(2/pi)*sigma*exp(-t^2/(2sigma^2))
//                   (Gaussian convolution of |.|; strictly above |t|)
//  ConvPhiShifted   phi_sigma(t) - phi_sigma(0)                  (zero at zero, under-approximates near 0)
//  ConvPhiHat       t*erf(t/(sqrt(2)sigma))                      (Gaussian term dropped; zero at zero)
//  ConvPhiGaussShift phi_sigma(t) - sqrt(2/pi)*sigma*exp(-t^2)   (shift decays away from zero)
//  SqrtEps          sqrt(t^2 + sigma^2)
//  Huber            t^2/(2sigma) for |t| <= sigma, |t| - sigma/2 otherwise
enum class SmoothingKind {
  ConvPhi,
  ConvPhiShifted,
  ConvPhiHat,
  ConvPhiGaussShift,
  SqrtEps,
  Huber
};

const char* to_string(SmoothingKind k);

// Value plus first and (when the kind is twice differentiable) second
// derivative at a point.  d2 is absent exactly for Huber.
struct ScalarJet {
  double value = 0.0;
  double d1 = 0.0;
  std::optional<double> d2;
};

// Error function.  Thin wrapper so the whole library shares one
// implementation point.
double erf(double t);

// Normalized Gaussian kernel (1/sqrt(2 pi sigma^2)) * exp(-t^2/(2 sigma^2)).
// Throws std::domain_error for sigma <= 0.
double gauss_kernel(double t, double sigma);

// Evaluate the selected approximation with derivatives.
// Throws std::domain_error for sigma < 1e-12 (callers anneal sigma and must
// control the floor explicitly) or non-finite t.
ScalarJet smooth_abs(SmoothingKind kind, double t, double sigma);

// Composite-Simpson estimate of the L1 distance
//     integral over [-halfwidth, halfwidth] of |approx(t) - |t|| dt.
// Requires halfwidth >= 10*sigma and nodes >= 1000 (resolution error
// otherwise).
double l1_distance_quadrature(SmoothingKind kind, double sigma, double halfwidth, long nodes);

}  // namespace erfmin
