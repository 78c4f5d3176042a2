#pragma once

namespace wbft {

// Standard normal CDF Phi(x), accurate to well below 1e-10 everywhere.
// Built on the Cody rational-Chebyshev erf/erfc approximations; the unit
// tests validate it against an independent Taylor-series / continued-fraction
// oracle and against the C library erfc.
double normal_cdf(double x);

// Q(x) = 1 - Phi(x), evaluated without cancellation for large x.
double q_function(double x);

// Standard normal density.
double normal_pdf(double x);

// erf/erfc used by the CDF; exposed for tests.
double erf_rational(double x);
double erfc_rational(double x);

} // namespace wbft
