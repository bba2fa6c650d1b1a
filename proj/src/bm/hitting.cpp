#include "frogld/bm/hitting.hpp"

#include <cmath>
#include <limits>

#include "frogld/core/error.hpp"

namespace frogld {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double gauss_mass(double a, double b) {
    if (!(b > a)) return 0.0;
    if (a >= 0) return normal_sf(a) - normal_sf(b);
    if (b <= 0) return normal_sf(-b) - normal_sf(-a);
    return 1.0 - normal_sf(-a) - normal_sf(b);
}

double prob_tau_geq(double u, double t) {
    require(std::isfinite(u) && std::isfinite(t), "prob_tau_geq: arguments must be finite");
    require(u > 0 && t > 0, "prob_tau_geq: u and t must be positive");
    return std::erf(u / std::sqrt(2.0 * t));
}

SeriesResult two_barrier_series(double a, double b, double x, double t, int max_terms) {
    require(std::isfinite(a) && std::isfinite(b), "two_barrier_series: barriers must be finite");
    require(a < x && x < b, "two_barrier_series: start outside corridor");
    require(t > 0, "two_barrier_series: t must be positive");
    const double L = b - a;
    const double c = M_PI * M_PI * t / (2.0 * L * L);
    const double th = M_PI * (x - a) / L;
    double sum = 0.0;
    int k = 1;
    for (; k <= max_terms; k += 2) {
        const double bound = 4.0 / (k * M_PI) * std::exp(-c * k * k);
        sum += bound * std::sin(k * th);
        if (bound < 1e-14) return {sum, (k + 1) / 2, false};
    }
    return {sum, (k + 1) / 2, true};
}

double two_barrier_images(double a, double b, double x, double t) {
    require(a < x && x < b, "two_barrier_images: start outside corridor");
    require(t > 0, "two_barrier_images: t must be positive");
    // reflect so that b is the nearer barrier
    if (x - a < b - x) {
        const double na = -b, nb = -a;
        a = na;
        b = nb;
        x = -x;
    }
    const double s = std::sqrt(t);
    const double L = b - a;
    const double db = b - x, da = x - a;
    // n = 0 terms, grouped so the leading erf carries the near-barrier behaviour
    double p = std::erf(db / (kSqrt2 * s)) - normal_sf(da / s) + normal_sf((da + 2.0 * db) / s);
    for (int n = 1; n < 1000; ++n) {
        double term = 0.0;
        for (int sg : {-1, 1}) {
            const double sh = 2.0 * n * L * sg;
            term += gauss_mass((a - x - sh) / s, (b - x - sh) / s);
            term -= gauss_mass((a - (2.0 * b - x) - sh) / s, (b - (2.0 * b - x) - sh) / s);
        }
        p += term;
        if (2.0 * n * L - L > 40.0 * s) break;
    }
    return std::max(0.0, p);
}

double two_barrier_survival(double a, double b, double x, double t) {
    require(!std::isnan(a) && !std::isnan(b) && std::isfinite(x), "two_barrier_survival: bad arguments");
    require(a < x && x < b, "two_barrier_survival: start outside corridor");
    require(t > 0 && std::isfinite(t), "two_barrier_survival: t must be positive");
    const bool fa = std::isfinite(a), fb = std::isfinite(b);
    if (!fa && !fb) return 1.0;
    if (!fa) return prob_tau_geq(b - x, t);
    if (!fb) return prob_tau_geq(x - a, t);
    if (std::sqrt(t) < (b - a) / 8.0) return two_barrier_images(a, b, x, t);
    const auto r = two_barrier_series(a, b, x, t);
    if (r.cap_hit) return two_barrier_images(a, b, x, t);
    return std::min(1.0, std::max(0.0, r.value));
}

double joint_density_bm_max(double t, double alpha, double beta) {
    require(t > 0 && std::isfinite(t), "joint_density_bm_max: t must be positive");
    if (beta < 0 || beta < alpha) return 0.0;
    const double m = 2.0 * beta - alpha;
    return 2.0 * m / std::sqrt(2.0 * M_PI * t * t * t) * std::exp(-m * m / (2.0 * t));
}

}  // namespace frogld
