#include "rate_fit.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace steinlab {

namespace {

// Simple regression of z on x; returns {intercept, slope, rms residual}.
struct Line {
    double intercept, slope, rms;
};

Line regress(const std::vector<double>& x, const std::vector<double>& z) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sz = 0.0, sxx = 0.0, sxz = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sz += z[i];
        sxx += x[i] * x[i];
        sxz += x[i] * z[i];
    }
    const double det = n * sxx - sx * sx;
    if (!(det > 0.0)) fail(ErrorCode::invalid_argument, "degenerate grid for the rate fit");
    const double slope = (n * sxz - sx * sz) / det;
    const double intercept = (sz - slope * sx) / n;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = z[i] - intercept - slope * x[i];
        sse += r * r;
    }
    return {intercept, slope, std::sqrt(sse / n)};
}

}  // namespace

RateFit fit_rate(const std::vector<double>& lambda, const std::vector<double>& y) {
    if (lambda.size() != y.size()) fail(ErrorCode::invalid_argument, "grid and value sizes differ");
    std::vector<double> distinct = lambda;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4)
        fail(ErrorCode::invalid_argument, "rate fit needs at least 4 distinct grid points");
    std::vector<double> x, z0, z1;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (!(lambda[i] > 1.0))
            fail(ErrorCode::invalid_argument, "rate fit needs lambda > 1 for the log-log model");
        if (!(y[i] > 0.0)) fail(ErrorCode::invalid_argument, "rate fit needs positive values");
        x.push_back(std::log(lambda[i]));
        z0.push_back(std::log(y[i]));
        z1.push_back(std::log(y[i]) - std::log(std::log(lambda[i])));
    }
    const Line l0 = regress(x, z0);
    const Line l1 = regress(x, z1);
    RateFit fit;
    if (l1.rms < l0.rms) {
        fit.q = 1;
        fit.c = std::exp(l1.intercept);
        fit.p = -l1.slope;
        fit.rms = l1.rms;
        fit.rms_alt = l0.rms;
    } else {
        fit.q = 0;
        fit.c = std::exp(l0.intercept);
        fit.p = -l0.slope;
        fit.rms = l0.rms;
        fit.rms_alt = l1.rms;
    }
    return fit;
}

}  // namespace steinlab
