#include <doctest.h>

#include <cmath>

#include "frogld/core/error.hpp"
#include "frogld/core/rng.hpp"
#include "frogld/frog/estimators.hpp"
#include "frogld/frog/simulation.hpp"
#include "oracles.hpp"

using namespace frogld;

namespace {
StepSource script(std::map<std::int64_t, std::vector<int>> s) { return StepSource::scripted(std::move(s)); }

// Every frog always steps right.
StepSource ballistic(std::int64_t lo, std::int64_t hi, std::size_t len) {
    std::map<std::int64_t, std::vector<int>> s;
    for (std::int64_t x = lo; x <= hi; ++x) s[x] = std::vector<int>(len, 1);
    return StepSource::scripted(s);
}
}  // namespace

TEST_SUITE("frog_sim") {
    TEST_CASE("scripted examples") {
        CHECK(simulate_run(1, 5, script({{0, {1}}})).passage_time == 1);
        auto r2 = simulate_run(1, 5, script({{0, {-1, 1, 1}}, {-1, {-1, -1}}}));
        CHECK(r2.passage_time == 3);
        CHECK(r2.first_visit_at(-1) == 1);
        CHECK(r2.activation_at(-1) == 1);
        auto r3 = simulate_run(1, 5, script({{0, {-1, -1, -1}}, {-1, {1, 1}}}));
        CHECK(r3.passage_time == 3);
        CHECK(r3.first_visit_at(-2) == 2);
    }

    TEST_CASE("script underrun is an error") {
        CHECK_THROWS_AS(simulate_run(3, 10, script({{0, {1}}})), ScriptUnderrunError);
        CHECK_THROWS_AS(StepSource::scripted({{0, {2}}}), PreconditionError);
    }

    TEST_CASE("restricted runs") {
        // A = {0}
        CHECK(restricted_run(1, 0, SiteRange{0, 0}, 5, script({{0, {1}}})).passage_time == 1);
        CHECK(restricted_run(2, 0, SiteRange{0, 0}, 6, script({{0, {-1, 1, 1, 1}}})).passage_time == 4);
        // the unrestricted run also wakes frogs -1 and 1; neither arrives before 4
        auto src = script({{0, {-1, 1, 1, 1}}, {-1, {1, 1, 1}}, {1, {1, 1}}});
        CHECK(restricted_run(2, 0, std::nullopt, 6, src).passage_time == 4);
        // frog 1 woken at 1 reaches 2 at 2 unless it is excluded
        auto src2 = script({{0, {1, -1, 1, 1}}, {1, {1}}});
        CHECK(restricted_run(2, 0, std::nullopt, 6, src2).passage_time == 2);
        auto rr = restricted_run(2, 0, SiteRange{-5, 0}, 6, src2);
        CHECK(rr.passage_time == 4);
        CHECK(rr.first_visit_at(1) == 1);
        CHECK_FALSE(rr.activation_at(1).has_value());
        CHECK_THROWS_AS(restricted_run(2, 0, SiteRange{1, 3}, 6, src2), PreconditionError);
    }

    TEST_CASE("restricted to whole domain equals simulate_run") {
        for (std::uint64_t s = 0; s < 50; ++s) {
            auto a = simulate_run(20, 200, StepSource::seeded(s));
            auto b = restricted_run(20, 0, SiteRange{-1000, 1000}, 200, StepSource::seeded(s));
            CHECK(a.passage_time == b.passage_time);
            CHECK(a.first_visit == b.first_visit);
        }
    }

    TEST_CASE("run invariants on seeded runs") {
        for (std::uint64_t s = 0; s < 200; ++s) {
            const std::int64_t target = 1 + static_cast<std::int64_t>(s % 37);
            const std::int64_t budget = 1 + static_cast<std::int64_t>(mix64(s) % 400);
            auto r = simulate_run(target, budget, StepSource::seeded(s));
            CHECK(r.first_visit_at(0) == 0);
            CHECK(r.x_lo <= -((budget - target + 1) / 2));
            CHECK(r.x_hi == target);
            MaybeTime prev = 0;
            for (std::int64_t y = 0; y <= target; ++y) {
                const auto t = r.first_visit_at(y);
                if (!t) {
                    prev.reset();
                    continue;
                }
                REQUIRE(prev.has_value());
                CHECK(*t >= *prev);
                CHECK(*t <= budget);
                prev = t;
            }
            for (std::int64_t x = r.x_lo; x <= r.x_hi; ++x) CHECK(r.activation_at(x) == r.first_visit_at(x));
            CHECK(r.passage_time == r.first_visit_at(target));
        }
    }

    TEST_CASE("T_A >= T on identical sources") {
        for (std::uint64_t s = 0; s < 200; ++s) {
            const std::int64_t lo = -static_cast<std::int64_t>(mix64(s) % 8);
            const std::int64_t hi = static_cast<std::int64_t>(mix64(s + 7) % 12);
            auto full = restricted_run(12, 0, std::nullopt, 300, StepSource::seeded(s));
            auto part = restricted_run(12, 0, SiteRange{lo, hi}, 300, StepSource::seeded(s));
            if (!part.passage_time) continue;
            REQUIRE(full.passage_time.has_value());
            CHECK(*part.passage_time >= *full.passage_time);
        }
    }

    TEST_CASE("monotone censoring") {
        for (std::uint64_t s = 0; s < 100; ++s) {
            MaybeTime first;
            for (std::int64_t b = 1; b <= 120; b += 7) {
                auto t = simulate_run(10, b, StepSource::seeded(s)).passage_time;
                if (first) {
                    CHECK(t == first);
                } else if (t) {
                    first = t;
                }
            }
        }
    }

    TEST_CASE("truncation safety") {
        for (std::uint64_t s = 0; s < 100; ++s) {
            const std::int64_t target = 5 + static_cast<std::int64_t>(s % 20);
            const std::int64_t budget = target + static_cast<std::int64_t>(mix64(s) % 200);
            auto a = simulate_run(target, budget, StepSource::seeded(1000 + s));
            SimOptions wide;
            wide.margin_factor = 2.0;
            auto b = simulate_run(target, budget, StepSource::seeded(1000 + s), wide);
            CHECK(a.passage_time == b.passage_time);
        }
    }

    TEST_CASE("exhaustive enumeration oracle") {
        const auto law = oracle::passage_law(1, 3);
        CHECK(law[1] == 0.5);
        CHECK(law[2] == 0.0);
        CHECK(law[3] == 7.0 / 32.0);
        // tails via the estimator conventions
        CHECK(estimate_tail(1, 1, 1000, 3).p_hat == 1.0);
        const auto t2 = estimate_tail(1, 2, 200000, 4);
        CHECK(std::fabs(t2.p_hat - 0.5) < 4 * std::sqrt(0.25 / 200000));
        const auto t4 = estimate_tail(1, 4, 200000, 5);
        CHECK(std::fabs(t4.p_hat - 9.0 / 32.0) < 4 * std::sqrt(0.21 / 200000));
    }

    TEST_CASE("MC histogram matches enumeration") {
        const auto law = oracle::passage_law(2, 6);
        const std::int64_t reps = 200000;
        const auto h = passage_time_histogram(2, 6, reps, 11);
        for (int k = 1; k <= 6; ++k) {
            const double se = std::sqrt(law[k] * (1 - law[k]) / reps) + 1e-12;
            CHECK(std::fabs(h[k] - law[k]) <= 4 * se);
        }
    }

    TEST_CASE("estimate_mu") {
        CHECK_THROWS_AS(estimate_mu(32, 0, 1), PreconditionError);
        CHECK_THROWS_AS(estimate_mu(8, 100, 1), PreconditionError);
        const auto m = estimate_mu(64, 400, 9);
        CHECK(m.mu_hat >= 1.0 - 3 * m.stderr_);
        CHECK(m.ci_low <= m.mu_hat);
        CHECK(m.mu_hat <= m.ci_high);
        McOptions one, four;
        one.threads = 1;
        four.threads = 4;
        const auto a = estimate_mu(64, 400, 9, one), b = estimate_mu(64, 400, 9, four);
        CHECK(a.mu_hat == b.mu_hat);
        CHECK(a.stderr_ == b.stderr_);
    }

    TEST_CASE("tail estimates") {
        const auto t = estimate_tail_local(16, 4, 1.0, 20000, 3);
        CHECK(t.p_hat >= 0.0);
        CHECK(t.p_hat <= 1.0);
        CHECK(t.ci_low <= t.p_hat);
        CHECK(t.p_hat <= t.ci_high);
        CHECK(local_target(25, 4) == 20);
        CHECK(local_target(16, 1.5) == 6);
        const auto same = estimate_tail_local(16, 4, 1.0, 20000, 3);
        CHECK(same.hits == t.hits);
        const auto z = estimate_tail_local(100, 1, 0.01, 50, 1);
        CHECK(z.p_hat == 1.0);  // budget 1
        const auto zero = estimate_tail(64, 2000, 30, 2);
        CHECK(zero.zero_hits);
        CHECK_FALSE(zero.rate.has_value());
        const auto g = estimate_tail_global(64, 0.0, 1.3, 2000, 8);
        CHECK(g.p_hat > 0.0);
        CHECK(g.p_hat < 1.0);
    }

    TEST_CASE("tail CSV round trip") {
        auto t = estimate_tail_local(16, 4, 1.0, 1000, 3);
        auto g = estimate_tail_global(16, 0.5, 1.2, 1000, 4);
        const std::string csv = tail_csv_header() + "\n" + tail_csv_row(t) + "\n" + tail_csv_row(g) + "\n";
        const auto back = parse_tail_csv(csv);
        REQUIRE(back.size() == 2);
        CHECK(back[0].hits == t.hits);
        CHECK(back[0].p_hat == t.p_hat);
        CHECK(back[0].M == t.M);
        CHECK_FALSE(back[1].M.has_value());
        CHECK(back[1].rate == g.rate);
    }

    TEST_CASE("profiles from runs") {
        auto r = simulate_run(10, 10, ballistic(-20, 10, 12));
        REQUIRE(r.passage_time == 10);
        auto p = extract_profile(r, 100, 0, 10);
        for (std::size_t k = 0; k < p.f.size(); ++k) {
            CHECK(p.u[k] == doctest::Approx(k / 10.0));
            CHECK(p.f[k] == doctest::Approx(k / 100.0));
        }
        auto c = simulate_run(30, 10, StepSource::seeded(1));
        CHECK_THROWS_AS(extract_profile(c, 100, 0, 30), DomainError);
        for (std::uint64_t s = 0; s < 1000; ++s) {
            auto q = extract_profile(simulate_run(15, 400, StepSource::seeded(s)), 16);
            for (std::size_t k = 1; k < q.f.size(); ++k) {
                if (q.u[k] > 0) CHECK(q.f[k] >= q.f[k - 1]);
                if (q.u[k] <= 0) CHECK(q.f[k] <= q.f[k - 1]);
            }
        }
    }

    TEST_CASE("run JSON round trip") {
        auto r = simulate_run(9, 60, StepSource::seeded(5));
        auto back = run_from_json(to_json(r));
        CHECK(back.first_visit == r.first_visit);
        CHECK(back.activation == r.activation);
        CHECK(back.passage_time == r.passage_time);
        CHECK(back.x_lo == r.x_lo);
    }
}
