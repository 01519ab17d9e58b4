#pragma once

#include <vector>

namespace steinlab {

// Least-squares fit of y = c * (log lambda)^q / lambda^p with q restricted to
// {0, 1}; the model with the smaller residual wins.
struct RateFit {
    double c = 0.0;
    double p = 0.0;
    int q = 0;
    double rms = 0.0;      // root mean square residual on log y, chosen model
    double rms_alt = 0.0;  // residual of the rejected q
};

// Needs at least 4 distinct lambdas, all > 1, and positive y.
RateFit fit_rate(const std::vector<double>& lambda, const std::vector<double>& y);

}  // namespace steinlab
