#include "frogld/core/stats.hpp"

#include <cmath>

#include "frogld/core/error.hpp"

namespace frogld {

Interval95 wilson_interval(std::int64_t hits, std::int64_t trials) {
    require(trials > 0, "wilson_interval: trials must be positive");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    Interval95 ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // rounding can push an endpoint past p when p is 0 or 1
    if (ci.low > p) ci.low = p;
    if (ci.high < p) ci.high = p;
    return ci;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "least_squares: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    require(sxx > 0, "least_squares: degenerate abscissae");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

void CompensatedSum::add(double v) {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v))
        comp_ += (sum_ - t) + v;
    else
        comp_ += (v - t) + sum_;
    sum_ = t;
}

double Moments::stderr_of_mean() const {
    if (n < 2) return 0.0;
    const double m = sum / n;
    const double var = std::max(0.0, (sum_sq - n * m * m) / (n - 1.0));
    return std::sqrt(var / n);
}

}  // namespace frogld
