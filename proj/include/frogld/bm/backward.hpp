#pragma once

#include <cstddef>
#include <vector>

namespace frogld {

// Piecewise Chebyshev-Lobatto interpolant on (lo, hi), zero outside.  The
// constant-one function has no support bounds.
class PanelFunction {
public:
    static PanelFunction one();
    PanelFunction(std::vector<double> breaks, int q, std::vector<double> values);

    double operator()(double x) const;
    bool is_one() const { return one_; }
    double lo() const { return breaks_.front(); }
    double hi() const { return breaks_.back(); }
    const std::vector<double>& breaks() const { return breaks_; }
    int order() const { return q_; }
    std::size_t nodes() const { return values_.size(); }

    // Chebyshev-Lobatto nodes on [-1,1], descending.
    static const std::vector<double>& cheb_nodes(int q);

private:
    PanelFunction() = default;
    bool one_ = false;
    std::vector<double> breaks_;
    int q_ = 0;
    std::vector<double> values_;
};

struct BackwardSlab {
    double duration;
    double lower;  // finite after closure
    double upper;
    bool lower_real;  // false for an artificial closing barrier
    bool upper_real;
};

struct BackwardOptions {
    int q = 12;         // nodes per panel
    int refine = 1;     // panel subdivision factor
    double ratio = 2.0; // geometric grading ratio toward barriers
};

// Survival functions at the start of each slab: result[j](x) is the
// probability of respecting slabs j, j+1, ... starting from x at the start
// of slab j.
std::vector<PanelFunction> solve_backward(const std::vector<BackwardSlab>& slabs, const BackwardOptions& opt);

// Closes infinite sides with artificial barriers placed 10*sqrt(total time)
// beyond every finite barrier and every point in [roi_lo, roi_hi].
std::vector<BackwardSlab> close_corridors(const std::vector<double>& durations, const std::vector<double>& lowers,
                                          const std::vector<double>& uppers, double roi_lo, double roi_hi);

}  // namespace frogld
