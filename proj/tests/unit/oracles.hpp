#pragma once

// Independent reference computations used only by tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Exact law of T(0,target) restricted to {1..k_max} by enumerating every
// joint move of the active frogs (probabilities are dyadic, hence exact).
inline std::vector<double> passage_law(int target, int k_max) {
    std::vector<double> law(k_max + 1, 0.0);
    std::function<void(std::vector<int>, int, int, int, double)> rec = [&](std::vector<int> frogs, int lo, int hi,
                                                                           int t, double prob) {
        if (t == k_max) return;
        const int m = static_cast<int>(frogs.size());
        for (int mask = 0; mask < (1 << m); ++mask) {
            std::vector<int> next = frogs;
            int nlo = lo, nhi = hi;
            for (int i = 0; i < m; ++i) {
                next[i] += (mask >> i & 1) ? 1 : -1;
                nlo = std::min(nlo, next[i]);
                nhi = std::max(nhi, next[i]);
            }
            const double p = prob / static_cast<double>(1 << m);
            if (nhi >= target) {
                law[t + 1] += p;
                continue;
            }
            for (int s = nlo; s < lo; ++s) next.push_back(s);
            for (int s = hi + 1; s <= nhi; ++s) next.push_back(s);
            rec(next, nlo, nhi, t + 1, p);
        }
    };
    rec({0}, 0, 0, 0, 1.0);
    return law;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace oracle
