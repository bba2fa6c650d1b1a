#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "frogld/energy/energy.hpp"
#include "frogld/frog/estimators.hpp"
#include "frogld/frog/simulation.hpp"
#include "frogld/simd/kernels.hpp"

using namespace frogld;

namespace {
struct Forced {
    explicit Forced(simd::Level l) { simd::force_level(l); }
    ~Forced() { simd::force_level(std::nullopt); }
};
}  // namespace

TEST_SUITE("simd") {
    TEST_CASE("frog_step: AVX2 is bit-identical to scalar") {
        if (!simd::cpu_has_avx2()) return;
        std::mt19937_64 g(1);
        for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 64u, 1001u}) {
            std::vector<std::int64_t> p1(n), p2;
            std::vector<std::uint64_t> w1(n), w2, l1(n), l2;
            for (std::size_t i = 0; i < n; ++i) {
                p1[i] = static_cast<std::int64_t>(g() % 2001) - 1000;
                w1[i] = g();
                l1[i] = 1 + g() % 64;
            }
            p2 = p1;
            w2 = w1;
            l2 = l1;
            std::vector<std::uint32_t> r1(n + 1), r2(n + 1);
            for (int step = 0; step < 70; ++step) {
                const auto a = simd::scalar::frog_step(p1.data(), w1.data(), l1.data(), n, 5, 7, r1.data());
                const auto b = simd::avx2::frog_step(p2.data(), w2.data(), l2.data(), n, 5, 7, r2.data());
                REQUIRE(a.lo == b.lo);
                REQUIRE(a.hi == b.hi);
                REQUIRE(a.refills == b.refills);
                for (std::size_t i = 0; i < a.refills; ++i) {
                    REQUIRE(r1[i] == r2[i]);
                    l1[r1[i]] = l2[r2[i]] = 64;  // refill as the simulator would
                    w1[r1[i]] = w2[r2[i]] = g();
                }
                REQUIRE(p1 == p2);
                REQUIRE(w1 == w2);
            }
        }
    }

    TEST_CASE("image_sum and exp: AVX2 within tolerance of scalar") {
        if (!simd::cpu_has_avx2()) return;
        std::mt19937_64 g(2);
        std::uniform_real_distribution<double> U(0, 1);
        for (int it = 0; it < 300; ++it) {
            const std::size_t n = g() % 200;
            const double L = 0.5 + 3 * U(g), sigma = 0.01 + 0.5 * U(g), p = L * 0.5 * U(g);
            std::vector<double> q(n), v(n);
            for (std::size_t i = 0; i < n; ++i) {
                q[i] = L * U(g);
                v[i] = U(g);
            }
            const double a = simd::scalar::image_sum(q.data(), v.data(), n, p, L, sigma);
            const double b = simd::avx2::image_sum(q.data(), v.data(), n, p, L, sigma);
            CHECK(std::fabs(a - b) <= 1e-13 * std::max(1.0, std::fabs(a)));
        }
        std::vector<double> x(1000), e1(1000), e2(1000);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = -700 + 1400 * U(g);
        x[0] = 0;
        x[1] = -745;
        x[2] = 709;
        simd::scalar::exp_array(x.data(), e1.data(), x.size());
        simd::avx2::exp_array(x.data(), e2.data(), x.size());
        for (std::size_t i = 0; i < x.size(); ++i) REQUIRE(std::fabs(e1[i] - e2[i]) <= 4e-16 * e1[i] + 1e-320);
    }

    TEST_CASE("full pipeline: scalar and AVX2 runs agree") {
        if (!simd::cpu_has_avx2()) return;
        nlohmann::json r1, r2;
        TailEstimate t1, t2;
        double en1, en2;
        const StepProfile f(2.0, {{0.5, 0.75}, {1.25, 2.0}}, {{-0.5, 1.5}});
        {
            Forced s(simd::Level::scalar);
            r1 = to_json(simulate_run(500, 3000, StepSource::seeded(9)));
            t1 = estimate_tail_local(49, 4, 1, 20000, 5);
            en1 = energy_total(f).value;
        }
        {
            Forced s(simd::Level::avx2);
            r2 = to_json(simulate_run(500, 3000, StepSource::seeded(9)));
            t2 = estimate_tail_local(49, 4, 1, 20000, 5);
            en2 = energy_total(f).value;
        }
        CHECK(r1 == r2);
        CHECK(t1.hits == t2.hits);
        CHECK(std::fabs(en1 - en2) < 1e-10);
    }

    TEST_CASE("dispatch") {
        CHECK(std::string(simd::level_name(simd::Level::scalar)) == "scalar");
        {
            Forced s(simd::Level::scalar);
            CHECK(simd::active_level() == simd::Level::scalar);
        }
        if (!std::getenv("FROGLD_SIMD"))
            CHECK(simd::active_level() == (simd::cpu_has_avx2() ? simd::Level::avx2 : simd::Level::scalar));
    }
}
