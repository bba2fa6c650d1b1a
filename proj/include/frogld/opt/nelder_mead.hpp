#pragma once

#include <functional>
#include <vector>

namespace frogld {

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

// Reflection 1, expansion 2, contraction 1/2, shrink 1/2.  Stops when every
// vertex lies within tol (max norm) of the best one, or after max_iter.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             double step, double tol, int max_iter);

}  // namespace frogld
