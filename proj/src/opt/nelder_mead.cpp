#include "frogld/opt/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "frogld/core/error.hpp"

namespace frogld {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
                             double step, double tol, int max_iter) {
    require(!x0.empty(), "nelder_mead: empty start");
    const std::size_t d = x0.size();
    NelderMeadResult out;
    auto eval = [&](const std::vector<double>& x) {
        ++out.evaluations;
        const double v = f(x);
        return std::isnan(v) ? INFINITY : v;
    };
    std::vector<std::vector<double>> p(d + 1, x0);
    for (std::size_t i = 0; i < d; ++i) p[i + 1][i] += step;
    std::vector<double> fv(d + 1);
    for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(p[i]);
    std::vector<std::size_t> idx(d + 1);
    std::vector<double> c(d), xr(d), xe(d), xc(d);
    auto point = [&](double t, const std::vector<double>& from, std::vector<double>& to) {
        // c + t (c - from)
        for (std::size_t k = 0; k < d; ++k) to[k] = c[k] + t * (c[k] - from[k]);
    };
    for (;;) {
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = idx.front(), worst = idx.back(), second = idx[d - 1];
        double diam = 0;
        for (std::size_t i = 0; i <= d; ++i)
            for (std::size_t k = 0; k < d; ++k) diam = std::max(diam, std::fabs(p[i][k] - p[best][k]));
        if (diam < tol) {
            out.converged = true;
            break;
        }
        if (out.iterations >= max_iter) break;
        ++out.iterations;
        std::fill(c.begin(), c.end(), 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t k = 0; k < d; ++k) c[k] += p[i][k] / static_cast<double>(d);
        point(1.0, p[worst], xr);
        const double fr = eval(xr);
        if (fr < fv[best]) {
            point(2.0, p[worst], xe);
            const double fe = eval(xe);
            if (fe < fr) {
                p[worst] = xe;
                fv[worst] = fe;
            } else {
                p[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            p[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        const bool outside = fr < fv[worst];
        point(outside ? 0.5 : -0.5, p[worst], xc);
        const double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            p[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= d; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < d; ++k) p[i][k] = p[best][k] + 0.5 * (p[i][k] - p[best][k]);
            fv[i] = eval(p[i]);
        }
    }
    const auto b = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    out.x = p[b];
    out.value = fv[b];
    return out;
}

}  // namespace frogld
