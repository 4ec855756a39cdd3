#pragma once

#include <cstdint>
#include <vector>

namespace reinforce {

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs);  // unbiased
double quantile(std::vector<double> xs, double q);  // nearest-rank interpolation
inline double median(std::vector<double> xs) { return quantile(std::move(xs), 0.5); }

// One-sample Kolmogorov-Smirnov distance against Uniform[0,1].
double ks_distance_uniform(std::vector<double> samples);

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
struct KsTest {
  double statistic = 0.0;
  double p_value = 0.0;
};
KsTest ks_two_sample(std::vector<double> xs, std::vector<double> ys);

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};
LinearFit least_squares(const std::vector<double>& x,
                        const std::vector<double>& y);

}  // namespace reinforce
