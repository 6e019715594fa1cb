#pragma once

// Standard normal density, CDF and log-CDF. log_norm_cdf stays accurate far
// into the lower tail (argument -8 and below), where the plain CDF underflows
// long before the log does.

namespace feasimap {

double norm_pdf(double x);
double norm_cdf(double x);

/// ln Phi(x), accurate over the whole real line.
double log_norm_cdf(double x);

/// Differential entropy of a normal truncated to [lo, hi] (nats).
/// Either bound may be infinite. Mass below ~1e-300 raises NumericalError.
double truncated_normal_entropy(double mu, double sigma, double lo, double hi);

}  // namespace feasimap
