// Invariant suites behind the "verify" subcommand.  Sizes are reduced from
// the unit tests so a full run takes about a minute on one core.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#include "frogld/bm/corridor.hpp"
#include "frogld/bm/hitting.hpp"
#include "frogld/bm/monte_carlo.hpp"
#include "frogld/cli/cli.hpp"
#include "frogld/core/error.hpp"
#include "frogld/core/io.hpp"
#include "frogld/cover/cover.hpp"
#include "frogld/cover/group.hpp"
#include "frogld/cover/oracle.hpp"
#include "frogld/energy/energy.hpp"
#include "frogld/frog/simulation.hpp"
#include "frogld/opt/optimizer.hpp"
#include "frogld/profile/deform.hpp"
#include "frogld/profile/profile.hpp"

namespace frogld::cli {

namespace {

using Rng = std::mt19937_64;

// Empty string means pass.
struct Check {
    const char* suite;
    const char* name;
    std::function<std::string()> run;
};

std::string fmt(const char* what, double a, double b) {
    std::ostringstream os;
    os << what << ": " << std::setprecision(10) << a << " vs " << b;
    return os.str();
}

// Dyadic locations and levels keep profile algebra exact.
StepProfile random_profile(Rng& g, int max_pos = 4, int max_neg = 3) {
    std::uniform_int_distribution<int> npos(1, max_pos), nneg(0, max_neg), loc(1, 32), inc(1, 8);
    const int kp = npos(g), kn = nneg(g);
    std::set<int> lp, ln;
    while (static_cast<int>(lp.size()) < kp) lp.insert(loc(g));
    while (static_cast<int>(ln.size()) < kn) ln.insert(loc(g));
    std::vector<Jump> pos, neg;
    int acc = 0;
    for (int l : lp) pos.push_back({l / 8.0, (acc += inc(g)) / 16.0});
    std::set<int> lv;
    std::uniform_int_distribution<int> lev(1, acc);
    while (static_cast<int>(lv.size()) < std::min(kn, acc)) lv.insert(lev(g));
    auto it = lv.begin();
    for (int l : ln) {
        if (it == lv.end()) break;
        neg.push_back({-l / 8.0, *it++ / 16.0});
    }
    return StepProfile(acc / 16.0, pos, neg);
}

std::vector<ClosedInterval> random_family(Rng& g) {
    std::uniform_int_distribution<int> cnt(1, 3), pt(-40, 40);
    std::set<int> ends;
    const int m = cnt(g);
    while (static_cast<int>(ends.size()) < 2 * m) ends.insert(pt(g));
    std::vector<ClosedInterval> J;
    for (auto it = ends.begin(); it != ends.end();) {
        const int a = *it++, b = *it++;
        if (a < b) J.push_back({a / 8.0, b / 8.0});
    }
    return J;
}

CorridorSchedule random_schedule(Rng& g, double& x) {
    std::uniform_real_distribution<double> U(0, 1);
    const double inf = INFINITY;
    const int n = 1 + static_cast<int>(g() % 3);
    double t = 0, lo = -(0.2 + 1.5 * U(g)), hi = 0.2 + 1.5 * U(g);
    if (U(g) < 0.3) lo = -inf;
    const double base = std::isfinite(lo) ? lo : hi - 2.0;
    x = base + (hi - base) * (0.1 + 0.8 * U(g));
    CorridorSchedule s;
    for (int i = 0; i < n; ++i) {
        const double len = 0.1 + 0.5 * U(g);
        s.slabs.push_back({t, t + len, lo, hi});
        t += len;
        if (U(g) < 0.5) hi += 0.8 * U(g);
        if (std::isfinite(lo) && U(g) < 0.5) lo -= 0.8 * U(g);
    }
    s.horizon = t;
    return s;
}

bool valid_profile(const StepProfile& f) {
    try {
        StepProfile copy(f.xi(), f.pos(), f.neg());
        return true;
    } catch (const PreconditionError&) {
        return false;
    }
}

// ---- frog_sim ----

std::string frog_front_interval() {
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto r = simulate_run(200, 2000, StepSource::seeded(s));  // asserts the front property per step
        bool seen = false, gap = false;
        for (std::int64_t x = r.x_lo; x <= r.x_hi; ++x) {
            const bool v = r.first_visit_at(x).has_value();
            if (v && gap) return "visited set not an interval, seed " + std::to_string(s);
            if (seen && !v) gap = true;
            seen = seen || v;
        }
        if (!r.first_visit_at(0)) return "origin not visited";
    }
    return {};
}

std::string frog_restricted() {
    Rng g(3);
    for (std::uint64_t s = 0; s < 60; ++s) {
        const std::int64_t lo = -static_cast<std::int64_t>(g() % 20), hi = 30 + static_cast<std::int64_t>(g() % 10);
        const auto full = restricted_run(30, 0, std::nullopt, 600, StepSource::seeded(s));
        const auto res = restricted_run(30, 0, SiteRange{lo, hi}, 600, StepSource::seeded(s));
        if (res.passage_time && (!full.passage_time || *res.passage_time < *full.passage_time))
            return "restricted passage time below unrestricted, seed " + std::to_string(s);
    }
    return {};
}

std::string frog_censoring() {
    for (std::uint64_t s = 0; s < 60; ++s) {
        MaybeTime prev;
        for (std::int64_t b : {20, 40, 80, 160, 320}) {
            const auto t = seeded_passage_time(40, b, s);
            if (prev && t != prev) return "uncensored time changed with budget, seed " + std::to_string(s);
            if (t && *t > b) return "passage time above budget";
            if (t) prev = t;
        }
    }
    return {};
}

std::string frog_distribution() {
    const std::int64_t reps = 200000;
    const auto h = passage_time_histogram(1, 3, reps, 11);
    const double exact[] = {0.5, 0.0, 7.0 / 32.0};
    for (int t = 1; t <= 3; ++t) {
        const double p = exact[t - 1], se = std::sqrt(std::max(p * (1 - p), 1e-12) / reps);
        if (std::fabs(h[static_cast<std::size_t>(t)] - p) > 3 * se)
            return fmt(("P(T(0,1) = " + std::to_string(t) + ")").c_str(), h[static_cast<std::size_t>(t)], p);
    }
    return {};
}

std::string frog_truncation() {
    for (std::uint64_t s = 0; s < 100; ++s) {
        SimOptions a, b;
        b.margin_factor = 2.0;
        a.record = b.record = false;
        const auto r1 = simulate_run(50, 400, StepSource::seeded(s), a);
        const auto r2 = simulate_run(50, 400, StepSource::seeded(s), b);
        if (r1.passage_time != r2.passage_time) return "margin changed the passage time, seed " + std::to_string(s);
    }
    return {};
}

// ---- bm_hitting ----

std::string bm_monotone() {
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            const double u = 0.3 * i, t = 0.3 * j, p = prob_tau_geq(u, t);
            if (prob_tau_geq(u, t + 0.3) > p || prob_tau_geq(u + 0.3, t) < p)
                return fmt("prob_tau_geq not monotone at (u,t)", u, t);
        }
    return {};
}

std::string bm_corridor_range() {
    Rng g(5);
    for (int i = 0; i < 60; ++i) {
        double x;
        const auto s = random_schedule(g, x);
        const double v = corridor_survival(s, x).value;
        if (!(v > 0 && v <= 1)) return fmt("survival out of (0,1]", v, 1);
        if (v == 1.0 && s.any_finite_barrier()) return "survival 1 with a finite barrier";
    }
    CorridorSchedule open;
    open.horizon = 1;
    open.slabs.push_back({0, 1, -INFINITY, INFINITY});
    if (corridor_survival(open, 0.3).value != 1.0) return "open corridor not 1";
    return {};
}

std::string bm_widening() {
    Rng g(6);
    std::uniform_real_distribution<double> U(0, 0.5);
    for (int i = 0; i < 60; ++i) {
        double x;
        auto s = random_schedule(g, x);
        auto w = s;
        const std::size_t k = g() % w.slabs.size();
        // widen slab k and keep the later ones at least as wide
        const double dl = U(g), du = U(g);
        for (std::size_t j = k; j < w.slabs.size(); ++j) {
            w.slabs[j].lower = std::min(w.slabs[j].lower, s.slabs[k].lower - dl);
            w.slabs[j].upper = std::max(w.slabs[j].upper, s.slabs[k].upper + du);
        }
        const auto a = corridor_survival(s, x), b = corridor_survival(w, x);
        if (b.value < a.value - 1e-9) return fmt("widening decreased survival", b.value, a.value);
    }
    return {};
}

std::string bm_spectral_vs_mc() {
    Rng g(7);
    for (int i = 0; i < 4; ++i) {
        double x;
        const auto s = random_schedule(g, x);
        const double v = corridor_survival(s, x).value;
        const auto mc = mc_corridor_oracle(s, x, 40000, 1e-3, 100 + static_cast<std::uint64_t>(i));
        if (std::fabs(v - mc.estimate) > 3 * mc.stderr_ + 1e-3) return fmt("spectral vs MC", v, mc.estimate);
    }
    return {};
}

std::string bm_reflection() {
    for (double b : {0.5, 1.0, 2.0})
        for (double t : {0.5, 1.0, 2.0})
            if (!(two_barrier_survival(-b, b, 0, t) < prob_tau_geq(b, t))) return fmt("reflection at (b,t)", b, t);
    return {};
}

// ---- profiles ----

std::string profiles_soft() {
    Rng g(8);
    std::uniform_int_distribution<int> pt(-320, 320);
    int done = 0;
    for (int it = 0; it < 4000; ++it) {
        const auto f = random_profile(g);
        const auto J = random_family(g);
        StepProfile sd = f;
        try {
            sd = soft_deform(f, J);
        } catch (const DomainError&) {
            continue;  // the deformation flattened the whole profile
        }
        ++done;
        if (!valid_profile(sd)) return "soft deformation left the class";
        double total = 0;
        for (const auto& I : J) total += delta_height(f, I).delta;
        for (const auto& I : J) {
            const double v = sd(I.lo);
            for (int k = 0; k <= 8; ++k)
                if (sd(I.lo + (I.hi - I.lo) * k / 8.0) != v) return "not constant on a deformed interval";
        }
        for (int k = 0; k < 20; ++k) {
            const double x = pt(g) / 64.0, y = pt(g) / 64.0;
            if (std::max(0.0, sd(x) - sd(y)) > std::max(0.0, f(x) - f(y))) return "two-point contraction fails";
            if (sd(x) < f(x) - total) return "floor inequality fails";
        }
    }
    if (done < 1000) return "too few non-degenerate instances";
    return {};
}

std::string profiles_hard_valid() {
    Rng g(9);
    for (int it = 0; it < 2000; ++it) {
        const auto f = random_profile(g);
        const auto J = random_family(g);
        try {
            const auto h = hard_deform(f, J);
            if (!valid_profile(h)) return "hard deformation left the class";
        } catch (const DomainError&) {
        }
    }
    return {};
}

std::string profiles_perturb() {
    Rng g(10);
    std::uniform_int_distribution<int> pt(-320, 320);
    for (int it = 0; it < 300; ++it) {
        const auto f = random_profile(g);
        const auto p1 = perturb(f, 1 / 16.0, PerturbSign::plus), p2 = perturb(f, 1 / 8.0, PerturbSign::plus);
        const auto m1 = perturb(f, 1 / 16.0, PerturbSign::minus), m2 = perturb(f, 1 / 8.0, PerturbSign::minus);
        for (int k = 0; k < 50; ++k) {
            const double x = pt(g) / 64.0;
            if (p2(x) < p1(x)) return "perturb plus not monotone in eps";
            if (m2(x) > m1(x)) return "perturb minus not antitone in eps";
        }
        if (!valid_profile(perturb_minus(f, 0.25))) return "perturb_minus left the class";
    }
    return {};
}

// ---- energy ----

std::string energy_scaling() {
    Rng g(12);
    for (int i = 0; i < 4; ++i) {
        const auto f1 = rescale(random_profile(g, 2, 1));
        for (double xi : {0.25, 4.0}) {
            const auto f = unrescale(f1, xi);
            const double e = energy_total(f).value, e1 = energy_total(f1).value;
            if (std::fabs(e - std::sqrt(xi) * e1) > 1e-3 * std::max(1.0, e)) return fmt("scaling", e, std::sqrt(xi) * e1);
        }
    }
    return {};
}

std::string energy_soft_monotone() {
    Rng g(13);
    int done = 0;
    for (int it = 0; it < 40 && done < 4; ++it) {
        const auto f = random_profile(g, 2, 1);
        StepProfile sd = f;
        try {
            sd = soft_deform(f, random_family(g));
        } catch (const DomainError&) {
            continue;
        }
        ++done;
        const auto a = energy_total(f), b = energy_total(sd);
        if (b.value > a.value + a.abs_error + b.abs_error + 1e-6) return fmt("E(soft) > E(f)", b.value, a.value);
    }
    return {};
}

std::string energy_theta_range() {
    Rng g(14);
    std::uniform_int_distribution<int> pt(-320, 320);
    for (int i = 0; i < 10; ++i) {
        const auto f = random_profile(g, 2, 2);
        for (int k = 0; k < 8; ++k) {
            const double x = pt(g) / 64.0 + 1 / 128.0;
            const double t = theta(f, x);
            if (f(x) == f.xi() ? t != 1.0 : !(t > 0 && t <= 1)) return fmt("theta range", t, f(x));
        }
    }
    return {};
}

std::string energy_theta_bound() {
    Rng g(15);
    std::uniform_real_distribution<double> U(0, 1);
    const double C = std::sqrt(2 / M_PI);
    for (int i = 0; i < 40; ++i) {
        const auto f = random_profile(g, 3, 2);
        const double x = -4 + 8 * U(g), y = x + (U(g) < 0.5 ? -1 : 1) * (0.01 + 2 * U(g));
        if (!(f(y) > f(x))) continue;
        const double t = theta(f, x);
        if (t > C * std::fabs(x - y) / std::sqrt(f(y) - f(x)) + 1e-9) return fmt("theta bound", t, x);
    }
    return {};
}

// ---- covering ----

std::string covering_simulated() {
    for (std::uint64_t s = 0; s < 4; ++s) {
        const std::int64_t n = 1024;
        const FrontOracle o(front_run(n + 512, 500 + s));
        const auto c = dyadic_cover(o, n);
        const auto r = validate_cover(c, o);
        if (!r.ok) return r.failures.front();
        const auto segs = piece_segments(c);
        if (!segs.empty()) {
            const auto grp = group_intervals(segs, 8.0);
            const auto v = validate_grouping(segs, grp);
            if (!v.ok) return v.failures.front();
        }
    }
    return {};
}

std::string covering_adversarial() {
    Rng g(16);
    for (int it = 0; it < 40; ++it) {
        const std::int64_t n = 512;
        std::vector<std::int64_t> w(static_cast<std::size_t>(n + 256), 1);
        for (auto& x : w)
            if (g() % 40 == 0) x = 1 + static_cast<std::int64_t>(g() % 2000);
        const AdditiveOracle o(w);
        CoverOptions co;
        co.min_scale = 2;
        const auto c = dyadic_cover(o, n, co);
        const auto r = validate_cover(c, o);
        if (!r.ok) return r.failures.front();
    }
    return {};
}

std::string covering_clusters() {
    Rng g(17);
    for (int it = 0; it < 200; ++it) {
        std::set<std::int64_t> pos, neg;
        const int m = 1 + static_cast<int>(g() % 8);
        // moderate intervals stay away from 0, farther than any F can reach (K n_i <= 21 * 8)
        while (static_cast<int>(pos.size()) < m) pos.insert(200 + static_cast<std::int64_t>(g() % 400));
        while (static_cast<int>(neg.size()) < m) neg.insert(-201 - static_cast<std::int64_t>(g() % 400));
        const auto cs = cluster_moderate_all({pos.begin(), pos.end()}, {neg.rbegin(), neg.rend()},
                                            2 + static_cast<std::int64_t>(g() % 20), 100);
        const auto v = validate_clusters(cs);
        if (!v.ok) return v.failures.front();
    }
    return {};
}

std::string covering_SM() {
    // R = M^3 sqrt n, pieces of total length <= M^5 sqrt n
    const double M = 3;
    const std::int64_t n = 100000000;
    const double sn = 1e4;
    Rng g(18);
    for (int it = 0; it < 100; ++it) {
        std::vector<Segment> segs;
        double budget = std::pow(M, 5) * sn;
        const int m = 1 + static_cast<int>(g() % 3);
        for (int i = 0; i < m; ++i) {
            const double len = std::floor(budget / m * (0.2 + 0.8 * (g() % 1000) / 1000.0));
            const double s = std::floor(static_cast<double>(g() % static_cast<std::uint64_t>(n - len - 1)));
            segs.push_back({s, s + std::max(1.0, len)});
        }
        const auto grp = group_intervals(segs, std::pow(M, 3) * sn);
        const auto v = validate_SM(grp, M, n);
        if (!v.ok) return v.failures.front();
    }
    return {};
}

// ---- optimizer ----

std::string optimizer_feasible() {
    Rng g(19);
    std::uniform_real_distribution<double> U(-30, 30);
    for (int it = 0; it < 2000; ++it) {
        const ProfileParams pp{0.25 * (1 + static_cast<double>(g() % 16)), 1 + static_cast<int>(g() % 4),
                               static_cast<int>(g() % 4)};
        std::vector<double> p(pp.dim());
        for (auto& v : p) v = U(g);
        try {
            const auto f = pp.decode(p);
            if (f.xi() != pp.xi) return "decoded profile has the wrong sup";
        } catch (const std::exception& e) {
            return std::string("decode produced an invalid profile: ") + e.what();
        }
    }
    return {};
}

std::string optimizer_determinism() {
    OptimizerOptions o;
    o.restarts = 2;
    o.max_iter = 25;
    o.seed = 21;
    const auto a = minimize_energy(1.0, 2, 0, o), b = minimize_energy(1.0, 2, 0, o);
    if (a.trace != b.trace || a.r_hat != b.r_hat) return "trace differs between identical calls";
    const double re = energy_total(*a.best_profile, o.energy).value;
    if (re != a.r_hat) return fmt("r_hat is not the energy of the returned profile", a.r_hat, re);
    return {};
}

// ---- cli ----

std::string cli_round_trips() {
    Rng g(22);
    const auto f = random_profile(g);
    if (profile_from_json(nlohmann::json::parse(to_json(f).dump())) != f) return "profile JSON";
    double x;
    const auto s = random_schedule(g, x);
    const auto s2 = schedule_from_json(nlohmann::json::parse(to_json(s).dump()));
    if (to_json(s2) != to_json(s)) return "schedule JSON";
    const auto run = simulate_run(30, 200, StepSource::seeded(4));
    if (to_json(run_from_json(nlohmann::json::parse(to_json(run).dump()))) != to_json(run)) return "run JSON";
    const auto t = estimate_tail_local(16, 4, 1, 1000, 3);
    if (tail_csv_row(parse_tail_csv(tail_csv_header() + "\n" + tail_csv_row(t) + "\n").at(0)) != tail_csv_row(t))
        return "tail CSV";
    const auto e = energy_total(StepProfile::unit_jump(1.0));
    if (to_json(energy_from_json(nlohmann::json::parse(to_json(e).dump()))) != to_json(e)) return "energy JSON";
    const FrontOracle o(front_run(400, 1));
    const auto c = dyadic_cover(o, 256);
    if (to_json(cover_from_json(nlohmann::json::parse(to_json(c).dump()))) != to_json(c)) return "cover JSON";
    Report rep;
    rep.rows.push_back({t, 0.9, 0.8, 1.5});
    if (report_csv(parse_report_csv(report_csv(rep))) != report_csv(rep)) return "report CSV";
    return {};
}

std::string cli_atomic_write() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("frogld_verify_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const auto target = (dir / "out.csv").string();
    write_file_atomic(target, "a,b\n1,2\n");
    if (read_file(target) != "a,b\n1,2\n") return "atomic write content";
    bool threw = false;
    try {
        write_file_atomic((dir / "missing" / "x.csv").string(), "x");
    } catch (const DomainError&) {
        threw = true;
    }
    std::size_t files = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
    fs::remove_all(dir);
    if (!threw) return "write into a missing directory did not fail";
    if (files != 1) return "temporary file left behind";
    return {};
}

const std::vector<Check>& checks() {
    static const std::vector<Check> all{
        {"frog_sim", "front interval", frog_front_interval},
        {"frog_sim", "restricted >= unrestricted", frog_restricted},
        {"frog_sim", "monotone censoring", frog_censoring},
        {"frog_sim", "small-case distribution", frog_distribution},
        {"frog_sim", "truncation safety", frog_truncation},
        {"bm_hitting", "prob_tau_geq monotone", bm_monotone},
        {"bm_hitting", "corridor survival range", bm_corridor_range},
        {"bm_hitting", "widening monotone", bm_widening},
        {"bm_hitting", "spectral vs MC", bm_spectral_vs_mc},
        {"bm_hitting", "reflection consistency", bm_reflection},
        {"profiles", "soft deformation", profiles_soft},
        {"profiles", "hard deformation validity", profiles_hard_valid},
        {"profiles", "perturb monotone in eps", profiles_perturb},
        {"energy", "scaling", energy_scaling},
        {"energy", "soft deformation lowers energy", energy_soft_monotone},
        {"energy", "theta range", energy_theta_range},
        {"energy", "theta upper bound", energy_theta_bound},
        {"covering", "simulated environments", covering_simulated},
        {"covering", "adversarial oracles", covering_adversarial},
        {"covering", "cluster disjointness", covering_clusters},
        {"covering", "S_M constraints", covering_SM},
        {"optimizer", "feasible parametrization", optimizer_feasible},
        {"optimizer", "restart determinism", optimizer_determinism},
        {"cli", "round trips", cli_round_trips},
        {"cli", "atomic writes", cli_atomic_write},
    };
    return all;
}

}  // namespace

std::vector<std::string> verify_suites() {
    return {"frog_sim", "bm_hitting", "profiles", "energy", "covering", "optimizer", "cli"};
}

bool verify(std::ostream& out, const std::string& suite) {
    bool all_ok = true;
    int ran = 0;
    for (const auto& c : checks()) {
        if (!suite.empty() && suite != c.suite) continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        std::string msg;
        try {
            msg = c.run();
        } catch (const std::exception& e) {
            msg = std::string("exception: ") + e.what();
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << (msg.empty() ? "PASS " : "FAIL ") << c.suite << ": " << c.name;
        if (!msg.empty()) out << " -- " << msg;
        out << " (" << std::fixed << std::setprecision(2) << sec << " s)\n" << std::defaultfloat;
        all_ok = all_ok && msg.empty();
    }
    out << (all_ok ? "all " : "some ") << ran << " checks " << (all_ok ? "passed" : "FAILED") << '\n';
    return all_ok && ran > 0;
}

}  // namespace frogld::cli
