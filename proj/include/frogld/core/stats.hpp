#pragma once

#include <cstdint>
#include <vector>

namespace frogld {

struct Interval95 {
    double low;
    double high;
};

Interval95 wilson_interval(std::int64_t hits, std::int64_t trials);

struct LinearFit {
    double slope;
    double intercept;
    double r2;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// Neumaier summation
class CompensatedSum {
public:
    void add(double v);
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Running mean/variance for weights or indicators.
struct Moments {
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    void add(double v) {
        n += 1.0;
        sum += v;
        sum_sq += v * v;
    }
    void merge(const Moments& o) {
        n += o.n;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
    double mean() const { return n > 0 ? sum / n : 0.0; }
    double stderr_of_mean() const;
};

}  // namespace frogld
