#include <doctest.h>

#include <cmath>
#include <random>

#include "frogld/core/error.hpp"
#include "frogld/frog/simulation.hpp"
#include "frogld/profile/deform.hpp"
#include "frogld/profile/profile.hpp"
#include "random_profiles.hpp"

using namespace frogld;

namespace {
// grid of step 1/64 over [-6, 6]; contains every breakpoint the generators make
std::vector<double> grid() {
    std::vector<double> v;
    for (int i = -384; i <= 384; ++i) v.push_back(i / 64.0);
    return v;
}

std::vector<ClosedInterval> random_J(std::mt19937_64& g) {
    std::uniform_int_distribution<int> cnt(0, 3), pt(-40, 40);
    std::set<int> ends;
    const int k = cnt(g);
    while (static_cast<int>(ends.size()) < 2 * k) ends.insert(pt(g));
    std::vector<int> e(ends.begin(), ends.end());
    std::vector<ClosedInterval> J;
    for (int i = 0; i < k; ++i) J.push_back({e[2 * i] / 16.0, e[2 * i + 1] / 16.0});
    std::shuffle(J.begin(), J.end(), g);
    return J;
}

double brute_sup(const StepProfile& f, double a, double b) {
    double v = -1;
    for (double x : grid())
        if (x >= a && x <= b) v = std::max(v, f(x));
    return v;
}
double brute_inf(const StepProfile& f, double a, double b) {
    double v = 1e300;
    for (double x : grid())
        if (x >= a && x <= b) v = std::min(v, f(x));
    return v;
}
}  // namespace

TEST_SUITE("profiles") {
    TEST_CASE("evaluate follows the continuity convention") {
        auto f = StepProfile::unit_jump(1.0);
        CHECK(f(0.5) == 0);
        CHECK(f(1.0) == 1);
        CHECK(f(2.0) == 1);
        CHECK(f(0.0) == 0);
        StepProfile g(1.0, {{0.5, 0.25}, {2.0, 1.0}}, {{-1.0, 0.5}, {-3.0, 0.75}});
        CHECK(g(0.5) == 0.25);
        CHECK(g(0.49) == 0);
        CHECK(g(-0.99) == 0);
        CHECK(g(-1.0) == 0.5);
        CHECK(g(-2.0) == 0.5);
        CHECK(g(-3.0) == 0.75);
        CHECK(g(-1e9) == 0.75);
        CHECK(g(1e9) == 1.0);
        CHECK(g.levels() == std::vector<double>{0, 0.25, 0.5, 0.75, 1.0});
        CHECK(g.jump_locations() == std::vector<double>{-3, -1, 0.5, 2});
    }

    TEST_CASE("constructor rejects invalid profiles") {
        CHECK_THROWS_AS(StepProfile(1.0, {}, {}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(1.0, {{1, 0.5}}, {}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(1.0, {{2, 0.5}, {1, 1}}, {}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(1.0, {{1, 0.5}, {2, 0.5}, {3, 1}}, {}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(1.0, {{0, 1}}, {}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(1.0, {{1, 1}}, {{-1, 2}}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(1.0, {{1, 1}}, {{-2, 0.5}, {-1, 0.7}}), PreconditionError);
        CHECK_THROWS_AS(StepProfile(-1.0, {{1, -1}}, {}), PreconditionError);
    }

    TEST_CASE("rescale examples") {
        auto f = StepProfile::unit_jump(2.0, 4.0);
        CHECK(rescale(f) == StepProfile::unit_jump(1.0));
        StepProfile g(1.0, {{0.5, 0.25}, {2.0, 1.0}}, {{-1.0, 0.5}});
        CHECK(rescale(g) == g);
        std::mt19937_64 rng(11);
        for (int i = 0; i < 200; ++i) {
            auto h = testgen::random_profile(rng);
            const double xi = std::ldexp(1.0, 2 * (static_cast<int>(rng() % 7) - 3));
            auto hx = unrescale(h, xi);
            CHECK(hx.xi() == xi);
            CHECK(unrescale(rescale(hx), xi) == hx);
        }
    }

    TEST_CASE("perturb examples") {
        auto f = StepProfile::unit_jump(1.0);
        auto plus = to_step_profile(perturb(f, 0.1, PerturbSign::plus), true);
        REQUIRE(plus.has_value());
        CHECK(plus->pos() == std::vector<Jump>{{1.0 - 0.1, 1.0}});
        CHECK(perturb_minus(f, 0.1) == StepProfile::unit_jump(1.0 + 0.1));
        // a jump crossing 0 leaves the class
        auto p = perturb(StepProfile::unit_jump(0.05), 0.1, PerturbSign::plus);
        CHECK(p(0.0) == 1.0);
        CHECK_FALSE(to_step_profile(p, true).has_value());
    }

    TEST_CASE("perturb matches brute-force sup/inf and orders correctly") {
        std::mt19937_64 rng(5);
        const auto G = grid();
        for (int it = 0; it < 300; ++it) {
            auto f = testgen::random_profile(rng);
            const double e1 = (1 + rng() % 4) / 16.0, e2 = e1 + (1 + rng() % 4) / 16.0;
            auto p1 = perturb(f, e1, PerturbSign::plus), p2 = perturb(f, e2, PerturbSign::plus);
            auto m1 = perturb(f, e1, PerturbSign::minus), m2 = perturb(f, e2, PerturbSign::minus);
            auto mm = perturb_minus(f, e1);
            for (std::size_t k = 128; k + 128 < G.size(); k += 3) {
                const double x = G[k];
                REQUIRE(p1(x) == brute_sup(f, x - e1, x + e1));
                REQUIRE(m1(x) == brute_inf(f, x - e1, x + e1));
                REQUIRE(mm(x) == m1(x));
                REQUIRE(m2(x) <= m1(x));
                REQUIRE(m1(x) <= f(x));
                REQUIRE(f(x) <= p1(x));
                REQUIRE(p1(x) <= p2(x));
            }
        }
    }

    TEST_CASE("delta_height") {
        auto f = StepProfile::unit_jump(1.0);
        auto h = delta_height(f, {0.5, 1.5});
        CHECK(h.m == 0);
        CHECK(h.M == 1);
        CHECK(h.delta == 1);
        CHECK(delta_height(f, {1.5, 3}).delta == 0);
        CHECK(delta_height(f, {1.0, 1.0}).M == 1);
        CHECK(delta_height(f, {0.5, 1.0}).M == 1);
        std::mt19937_64 rng(9);
        for (int it = 0; it < 2000; ++it) {
            auto g = testgen::random_profile(rng);
            int a = static_cast<int>(rng() % 40), b = a + static_cast<int>(rng() % 20), c = b + static_cast<int>(rng() % 20);
            const double s = (rng() & 1) ? 1.0 : -1.0;
            ClosedInterval I{a / 8.0, b / 8.0}, I2{b / 8.0, c / 8.0}, U{a / 8.0, c / 8.0};
            if (s < 0) {
                I = {-b / 8.0, -a / 8.0};
                I2 = {-c / 8.0, -b / 8.0};
                U = {-c / 8.0, -a / 8.0};
            }
            REQUIRE(delta_height(g, U).delta <= delta_height(g, I).delta + delta_height(g, I2).delta);
            REQUIRE(delta_height(g, I).m == brute_inf(g, I.lo, I.hi));
            REQUIRE(delta_height(g, I).M == brute_sup(g, I.lo, I.hi));
        }
    }

    TEST_CASE("soft_deform examples") {
        StepProfile f(1.0, {{1, 0.3}, {2, 1.0}}, {});
        // dyadic variant of the same shape for an exact comparison
        StepProfile fd(1.0, {{1, 0.25}, {2, 1.0}}, {});
        auto g = soft_deform(fd, {{0.5, 1.5}});
        CHECK(g == StepProfile(0.75, {{2, 0.75}}, {}));
        auto g2 = soft_deform(f, {{0.5, 1.5}});
        REQUIRE(g2.pos().size() == 1);
        CHECK(g2.pos()[0].loc == 2);
        CHECK(g2.pos()[0].level == doctest::Approx(0.7).epsilon(1e-15));
        CHECK(soft_deform(f, {}) == f);
        CHECK(soft_deform(f, {{1.2, 1.8}, {3, 4}}) == f);
        CHECK_THROWS_AS(soft_deform(f, {{0, 1}, {0.5, 2}}), PreconditionError);
        CHECK_THROWS_AS(soft_deform(f, {{-1, 5}}), DomainError);
    }

    TEST_CASE("hard_deform examples") {
        auto f = StepProfile::unit_jump(1.0);
        auto p = hard_deform_pointwise(f, {{0.5, 1.5}});
        CHECK(p(1.5) == 0);
        CHECK(p(1.5000001) == 1);
        CHECK(p(1.0) == 0);
        // read back under right-continuity: 1{x >= 1.5}, differing at the single point 1.5
        CHECK(hard_deform(f, {{0.5, 1.5}}) == StepProfile::unit_jump(1.5));
        CHECK(hard_deform(f, {}) == f);
        CHECK_THROWS_AS(hard_deform(f, {{0, 1}, {1, 2}}), PreconditionError);
    }

    TEST_CASE("soft deformation properties on 1e4 random instances") {
        std::mt19937_64 rng(2024);
        const auto G = grid();
        int done = 0, collapsed = 0;
        std::uniform_int_distribution<std::size_t> pick(0, G.size() - 1);
        for (int it = 0; it < 10000; ++it) {
            auto f = testgen::random_profile(rng);
            auto J = random_J(rng);
            double sum_delta = 0;
            for (const auto& I : J) sum_delta += delta_height(f, I).delta;
            std::optional<StepProfile> g;
            try {
                g = soft_deform(f, J);
            } catch (const DomainError&) {
                ++collapsed;
                continue;
            }
            ++done;
            for (int s = 0; s < 20; ++s) {
                const double x = G[pick(rng)], y = G[pick(rng)];
                const double dg = std::max(0.0, (*g)(x) - (*g)(y)), df = std::max(0.0, f(x) - f(y));
                REQUIRE(dg <= df);
                REQUIRE((*g)(x) >= f(x) - sum_delta);
                REQUIRE((*g)(x) <= f(x));
            }
            for (const auto& I : J) REQUIRE(delta_height(*g, I).delta == 0);
            auto h = hard_deform(f, J);
            auto hp = hard_deform_pointwise(f, J);
            for (std::size_t k = 0; k < G.size(); k += 5) {
                const double x = G[k];
                REQUIRE(hp(x) <= f(x));
                bool inJ = false;
                for (const auto& I : J) inJ = inJ || (x >= I.lo && x <= I.hi);
                if (!inJ) REQUIRE(hp(x) == f(x));
                const double xo = x + 1.0 / 128;  // off every breakpoint
                REQUIRE(h(xo) == hp(xo));
            }
        }
        CHECK(done > 9000);
        MESSAGE("collapsed instances skipped: " << collapsed);
    }

    TEST_CASE("from_empirical") {
        PassageProfile p;
        p.n = 100;
        p.k_lo = 0;
        for (int k = 0; k <= 10; ++k) {
            p.u.push_back(k / 10.0);
            p.f.push_back(k / 100.0);
        }
        auto f = from_empirical(p);
        REQUIRE(f.pos().size() == 10);
        for (int k = 1; k <= 10; ++k) {
            CHECK(f.pos()[k - 1].loc == k / 10.0);
            CHECK(f.pos()[k - 1].level == k / 100.0);
        }
        PassageProfile one;
        one.n = 4;
        one.u = {0.0, 0.5};
        one.f = {0.0, 0.25};
        CHECK(from_empirical(one) == StepProfile::unit_jump(0.5, 0.25));
        PassageProfile bad = p;
        bad.f[5] = 0.01;
        CHECK_THROWS_AS(from_empirical(bad), DomainError);

        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const std::int64_t n = 400;
            auto run = simulate_run(20, 8 * n, StepSource::seeded(seed));
            auto pe = extract_profile(run, static_cast<double>(n));
            auto fe = from_empirical(pe);
            for (std::size_t k = 0; k < pe.u.size(); ++k) REQUIRE(fe(pe.u[k]) == pe.f[k]);
        }
    }

    TEST_CASE("JSON round trip") {
        std::mt19937_64 rng(3);
        for (int i = 0; i < 50; ++i) {
            auto f = testgen::random_profile(rng);
            CHECK(profile_from_json(nlohmann::json::parse(to_json(f).dump())) == f);
        }
        CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse(R"({"xi":1,"pos_jumps":[[1,1]],"extra":0})")),
                        DomainError);
        CHECK_THROWS_AS(profile_from_json(nlohmann::json::parse(R"({"xi":1,"pos_jumps":[[1,0.5]]})")),
                        PreconditionError);
    }
}
