#pragma once

namespace nsvh {

inline constexpr double kSqrtTwoPi = 2.506628274631000502;
inline constexpr double kInvSqrtTwoPi = 0.3989422804014326779;

// (e^{k*s} - 1) / k, with the removable singularity at k = 0 handled by a
// short series so the result stays accurate for |k*s| below the switch point.
// Requires s >= 0.
double stable_exp_ratio(double k, double s);

// phi(z, d) = e^{z/2} * sqrt(2 cosh d - 2 cosh z) for d >= |z|.
// The radicand is evaluated as 4 sinh((d+z)/2) sinh((d-z)/2), which does not
// cancel when d is close to |z|. Tiny negative radicands from roundoff are
// clamped to zero; d < |z| beyond 1e-12 throws std::domain_error.
double phi_radius(double z, double d);

// Standard normal density, CDF and inverse CDF.
double norm_pdf(double x);
double norm_cdf(double x);

// Inverse CDF via Acklam's rational approximation followed by one Halley
// polish step against the erfc-based CDF. Throws std::domain_error unless
// 0 < p < 1.
double norm_quantile(double p);

}  // namespace nsvh
