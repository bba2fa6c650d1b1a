#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "frogld/core/error.hpp"
#include "frogld/cover/cover.hpp"
#include "frogld/cover/group.hpp"
#include "frogld/cover/oracle.hpp"

using namespace frogld;

namespace {
// Heavy edges scattered over a ballistic background.
AdditiveOracle random_additive(std::mt19937_64& g, std::int64_t W, int heavy, std::int64_t max_w) {
    std::vector<std::int64_t> w(static_cast<std::size_t>(W), 1);
    std::uniform_int_distribution<std::int64_t> pos(0, W - 1), wt(2, max_w);
    for (int i = 0; i < heavy; ++i) w[static_cast<std::size_t>(pos(g))] = wt(g);
    return AdditiveOracle(w);
}

// brute force: is x bad at scale k and not covered by the open radii of the pieces
bool uncovered_bad_exists(const IntervalCover& c, const PassageOracle& o) {
    for (int k = c.k_min; k <= c.k_max; ++k) {
        const std::int64_t L = std::int64_t{1} << k;
        for (std::int64_t x = 0; x <= c.n; ++x) {
            if (o.passage(x, L) < L * L) continue;
            bool cov = false;
            for (const auto& p : c.pieces) cov = cov || (x > p.x - p.scale && x < p.x + p.scale);
            if (!cov) return true;
        }
    }
    return false;
}
}  // namespace

TEST_SUITE("covering") {
    TEST_CASE("block exponent") {
        CHECK(block_exponent(65536) == 7);
        CHECK(block_exponent(65536, LogBase::base2) == 8);
        CHECK(block_exponent(16384) == 7);
        CHECK_THROWS_AS(block_exponent(15), PreconditionError);
    }

    TEST_CASE("classify_blocks examples") {
        TableOracle ball(70000);
        auto c = classify_blocks(ball, 65536);
        CHECK(c.N == 7);
        CHECK(c.red.empty());
        CHECK(c.blue.size() == 512);
        TableOracle one(70000);
        one.set(128 * 3, 128, (1 << 14) + 1);
        auto c2 = classify_blocks(one, 65536);
        REQUIRE(c2.red.size() == 1);
        CHECK(c2.red[0] / 128 == 3);
        one.set(128 * 5, 128, 1 << 14);  // equality is not red
        CHECK(classify_blocks(one, 65536).red.size() == 1);
        CHECK_THROWS_AS(classify_blocks(TableOracle(100), 65536), DomainError);
    }

    TEST_CASE("dyadic_cover examples") {
        TableOracle ball(200);
        auto c0 = dyadic_cover(ball, 128);
        CHECK(c0.ell() == 0);
        CoverOptions o;
        o.min_scale = 2;
        TableOracle one(200);
        one.set(16, 4, 16);
        auto c1 = dyadic_cover(one, 128, o);
        REQUIRE(c1.ell() == 1);
        CHECK(c1.pieces[0].x == 16);
        CHECK(c1.pieces[0].scale == 4);
        CHECK(c1.pieces[0].S == 12);
        CHECK(c1.pieces[0].T == 20);
        CHECK(validate_cover(c1, one).ok);

        TableOracle two(8192 + 4096);
        two.set(16, 4, 16);
        two.set(4096, 8, 64);
        auto c2 = dyadic_cover(two, 8192, o);
        REQUIRE(c2.ell() == 2);
        CHECK(c2.pieces[0].x == 4096);
        CHECK(c2.pieces[0].scale == 8);
        CHECK(c2.pieces[1].x == 16);
        CHECK(validate_cover(c2, two).ok);

        // piece clipped at 0, and a second piece trimmed by the first
        TableOracle three(300);
        three.set(2, 8, 64);
        three.set(12, 4, 16);
        auto c3 = dyadic_cover(three, 128, o);
        REQUIRE(c3.ell() == 2);
        CHECK(c3.pieces[0].S == 0);
        CHECK(c3.pieces[0].T == 10);
        CHECK(c3.pieces[1].S == 10);
        CHECK(c3.pieces[1].T == 16);
        CHECK(validate_cover(c3, three).ok);
        CHECK_THROWS_AS(dyadic_cover(TableOracle(130), 128), DomainError);
    }

    TEST_CASE("cover properties on adversarial additive oracles") {
        std::mt19937_64 rng(99);
        int multi = 0;
        for (int it = 0; it < 150; ++it) {
            const std::int64_t n = 1024;
            auto o = random_additive(rng, n + 512, 1 + static_cast<int>(rng() % 40), 1 + static_cast<std::int64_t>(rng() % 3000));
            CoverOptions opt;
            if (it % 2) opt.min_scale = 1 + static_cast<int>(rng() % 4);
            auto c = dyadic_cover(o, n, opt);
            auto r = validate_cover(c, o);
            for (const auto& f : r.failures) MESSAGE(f);
            REQUIRE(r.ok);
            CHECK_FALSE(uncovered_bad_exists(c, o));
            multi += c.ell() >= 2;
            const auto segs = piece_segments(c);
            if (!segs.empty()) {
                const auto g = group_intervals(segs, 40.0);
                CHECK(validate_grouping(segs, g).ok);
            }
        }
        CHECK(multi > 30);
    }

    TEST_CASE("cover properties on simulated environments") {
        const std::int64_t n = 1024;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const int kmax = static_cast<int>(std::log2(n)) - 1;
            FrontOracle o(front_run(n + (std::int64_t{1} << kmax), seed));
            CHECK(o.passage(5, 10) >= 10);
            auto c = dyadic_cover(o, n);
            auto r = validate_cover(c, o);
            for (const auto& f : r.failures) MESSAGE(f);
            CHECK(r.ok);
            CHECK_FALSE(uncovered_bad_exists(c, o));
            CHECK_THROWS_AS(o.passage(0, o.window_hi() + 1), DomainError);
        }
    }

    TEST_CASE("cover JSON and CSV") {
        TableOracle two(8192 + 4096);
        two.set(16, 4, 16);
        two.set(4096, 8, 64);
        two.set(128 * 2, 128, 20000);
        CoverOptions o;
        o.min_scale = 2;
        auto c = dyadic_cover(two, 8192, o);
        auto back = cover_from_json(nlohmann::json::parse(to_json(c).dump()));
        CHECK(to_json(back) == to_json(c));
        const auto csv = cover_csv(c);
        CHECK(csv.rfind("kind,index,start,end,x,scale\n", 0) == 0);
        CHECK(csv.find("red,0,256,384,,128") != std::string::npos);
        CHECK(csv.find("piece,0,") != std::string::npos);
    }

    TEST_CASE("group_intervals") {
        auto g = group_intervals({{0, 1}, {1.5, 2.5}, {10, 11}}, 1.0);
        CHECK(g.intervals == std::vector<Segment>{{0, 2.5}, {10, 11}});
        CHECK(group_intervals({{3, 4}}, 2.0).intervals == std::vector<Segment>{{3, 4}});
        CHECK(group_intervals({}, 1.0).m() == 0);
        CHECK_THROWS_AS(group_intervals({{0, 1}}, 0.0), PreconditionError);
        // chaining through a middle interval
        auto c = group_intervals({{10, 11}, {0, 1}, {5, 6}}, 4.0);
        CHECK(c.intervals == std::vector<Segment>{{0, 11}});
        std::mt19937_64 rng(6);
        for (int it = 0; it < 2000; ++it) {
            std::vector<Segment> in;
            const int m = 1 + static_cast<int>(rng() % 12);
            for (int i = 0; i < m; ++i) {
                const double s = static_cast<double>(rng() % 1000), l = static_cast<double>(rng() % 50);
                in.push_back({s, s + l});
            }
            const double R = 1.0 + static_cast<double>(rng() % 100);
            auto gg = group_intervals(in, R);
            auto r = validate_grouping(in, gg);
            REQUIRE(r.ok);
            for (std::size_t i = 0; i < gg.m(); ++i)
                for (std::size_t j = i + 1; j < gg.m(); ++j) REQUIRE(segment_distance(gg.intervals[i], gg.intervals[j]) > R);
        }
    }

    TEST_CASE("grouped covers land in S_M") {
        std::mt19937_64 rng(15);
        const std::int64_t n = 100000000;  // sqrt(n) = 1e4
        const double M = 3, sn = 1e4;
        for (int it = 0; it < 500; ++it) {
            std::vector<Segment> in;
            const int m = 1 + static_cast<int>(rng() % static_cast<int>(M));
            double total = 0;
            for (int i = 0; i < m; ++i) {
                const double l = 1 + static_cast<double>(rng() % 50000);
                const double s = static_cast<double>(rng() % static_cast<std::uint64_t>(n - 60000));
                in.push_back({s, s + l});
                total += l;
            }
            REQUIRE(total <= std::pow(M, 5) * sn);
            auto g = group_intervals(in, M * M * M * sn);
            auto r = validate_SM(g, M, n);
            for (const auto& f : r.failures) MESSAGE(f);
            REQUIRE(r.ok);
        }
        GroupedCover bad;
        bad.R = 1;
        bad.intervals = {{0, 5}, {6, 7}};
        CHECK_FALSE(validate_SM(bad, 2, 100).ok);
    }

    TEST_CASE("cluster_moderate") {
        auto one = cluster_moderate({5}, 2, 100);
        REQUIRE(one.size() == 1);
        CHECK(one[0].n_i == 1);
        CHECK(one[0].F_hi_grid - one[0].F_lo_grid == 2);
        CHECK(one[0].t == 0.06);
        auto adj = cluster_moderate({5, 6}, 2, 100);
        REQUIRE(adj.size() == 1);
        CHECK(adj[0].n_i == 2);
        CHECK(adj[0].members == std::vector<std::int64_t>{6, 5});
        auto sep = cluster_moderate({2, 6}, 2, 100);  // gap of 3/n > K/n
        CHECK(sep.size() == 2);
        auto neg = cluster_moderate({-6, -5}, 2, 100);
        REQUIRE(neg.size() == 1);
        CHECK(neg[0].index == -1);
        CHECK(neg[0].t_grid == -6);
        CHECK(cluster_moderate({-7, -2}, 2, 100).size() == 2);
        CHECK_THROWS_AS(cluster_moderate({-1, 1}, 2, 100), PreconditionError);
        CHECK_THROWS_AS(cluster_moderate({1}, 1, 100), PreconditionError);
        CHECK(cluster_moderate({}, 2, 100).empty());
        std::mt19937_64 rng(8);
        for (int it = 0; it < 1000; ++it) {
            std::set<std::int64_t> p, q;
            const int np = static_cast<int>(rng() % 30), nq = static_cast<int>(rng() % 30);
            while (static_cast<int>(p.size()) < np) p.insert(static_cast<std::int64_t>(rng() % 400) + 50);
            while (static_cast<int>(q.size()) < nq) q.insert(-static_cast<std::int64_t>(rng() % 400) - 51);
            const std::int64_t K = 2 + static_cast<std::int64_t>(rng() % 6);
            auto cs = cluster_moderate_all({p.begin(), p.end()}, {q.begin(), q.end()}, K, 1000);
            std::int64_t total = 0;
            for (const auto& c : cs) total += c.n_i;
            REQUIRE(total == np + nq);
            REQUIRE(validate_clusters(cs).ok);
        }
    }
}
