#pragma once

namespace frogld {

// P(tau_u >= t) for standard BM from 0, u > 0.
double prob_tau_geq(double u, double t);

struct SeriesResult {
    double value;
    int terms;
    bool cap_hit;
};

// Sine-eigenfunction series for survival in (a,b), finite a < x < b.
SeriesResult two_barrier_series(double a, double b, double x, double t, int max_terms = 10000);

// Image sum for survival in (a,b), accurate near either barrier.
double two_barrier_images(double a, double b, double x, double t);

// P_x(B stays in (a,b) on [0,t]); a may be -inf, b may be +inf.
double two_barrier_survival(double a, double b, double x, double t);

// Density of (B_t, max_{s<=t} B_s) at (alpha, beta).
double joint_density_bm_max(double t, double alpha, double beta);

// P(a < Z < b) for standard normal Z, accurate in both tails.
double gauss_mass(double a, double b);
// P(Z > x)
double normal_sf(double x);

}  // namespace frogld
