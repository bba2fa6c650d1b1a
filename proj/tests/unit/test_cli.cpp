#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "frogld/cli/cli.hpp"
#include "frogld/core/io.hpp"
#include "frogld/cover/cover.hpp"
#include "frogld/energy/energy.hpp"
#include "frogld/frog/simulation.hpp"
#include "frogld/opt/optimizer.hpp"

using namespace frogld;
namespace fs = std::filesystem;

namespace {

struct Out {
    int code;
    std::string out, err;
};

Out run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int c = cli::run(args, o, e);
    return {c, o.str(), e.str()};
}

struct TempDir {
    fs::path p;
    TempDir() : p(fs::temp_directory_path() / ("frogld_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(p);
        fs::create_directories(p);
    }
    ~TempDir() { fs::remove_all(p); }
    std::string file(const std::string& name) const { return (p / name).string(); }
    std::size_t count() const {
        std::size_t n = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(p)) ++n;
        return n;
    }
};

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("usage errors exit 2 with a synopsis") {
        auto r = run({});
        CHECK(r.code == 2);
        CHECK(run({"frobnicate"}).code == 2);
        r = run({"tail", "--n", "25", "--M", "4", "--replicas", "100"});
        CHECK(r.code == 2);
        CHECK(r.err.find("--seed is required") != std::string::npos);
        CHECK(r.err.find("Usage:") != std::string::npos);
        CHECK(run({"tail", "--n", "25", "--replicas", "100", "--seed", "1"}).code == 2);  // neither --M nor --global
        CHECK(run({"report"}).code == 2);
        CHECK(run({"verify", "--suite", "nope"}).code == 2);
        CHECK(run({"cover", "--n", "1024", "--seed", "1", "--log-base", "10"}).code == 2);
        CHECK(run({"--help"}).code == 0);
    }

    TEST_CASE("domain errors exit 1 and leave no output file") {
        TempDir d;
        write_file_atomic(d.file("bad.json"), R"({"xi": -1, "pos_jumps": [[1, -1]], "neg_jumps": []})");
        auto r = run({"energy", "--profile", d.file("bad.json"), "--out", d.file("e.json")});
        CHECK(r.code == 1);
        CHECK_FALSE(fs::exists(d.file("e.json")));
        CHECK(run({"energy", "--profile", d.file("missing.json")}).code == 1);
        CHECK(run({"mu", "--n", "4", "--replicas", "1000", "--seed", "1"}).code == 1);  // n too small
        CHECK(d.count() == 1);
    }

    TEST_CASE("energy of the unit one-jump profile") {
        TempDir d;
        write_file_atomic(d.file("f.json"), R"({"xi": 1, "pos_jumps": [[1, 1]], "neg_jumps": []})");
        auto r = run({"energy", "--profile", d.file("f.json")});
        REQUIRE(r.code == 0);
        const auto rep = energy_from_json(nlohmann::json::parse(r.out));
        CHECK(std::fabs(rep.value - 1.4628845) < 1e-6);
        CHECK(rep.abs_error < 1e-5);
        CHECK(run({"energy", "--profile", d.file("f.json"), "--M", "3"}).code == 0);
        CHECK(run({"energy", "--profile", d.file("f.json"), "--delta", "0.01"}).code == 2);
    }

    TEST_CASE("tail output is byte-identical across runs and thread counts") {
        const std::vector<std::string> base{"tail", "--n", "25", "--M", "4", "--xi", "1", "--replicas", "1000000",
                                            "--seed", "7"};
        auto a = run(base);
        REQUIRE(a.code == 0);
        for (const char* t : {"1", "4", "8"}) {
            auto args = base;
            args.insert(args.end(), {"--threads", t});
            CHECK(run(args).out == a.out);
        }
        const auto rows = parse_tail_csv(a.out);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].replicas == 1000000);
        auto sc = base;
        sc.insert(sc.end(), {"--simd", "scalar"});
        CHECK(run(sc).out == a.out);
    }

    TEST_CASE("config file mirrors flags; flags win; unknown keys rejected") {
        TempDir d;
        write_file_atomic(d.file("c.json"), R"({"seed": 7, "n": [16, 25], "M": 4, "replicas": 1000})");
        auto a = run({"tail", "--config", d.file("c.json"), "--replicas", "2000"});
        REQUIRE(a.code == 0);
        auto b = run({"tail", "--n", "16,25", "--M", "4", "--replicas", "2000", "--seed", "7"});
        CHECK(a.out == b.out);
        const auto rows = parse_tail_csv(a.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].replicas == 2000);
        write_file_atomic(d.file("u.json"), R"({"seed": 7, "bogus": 1})");
        auto u = run({"tail", "--config", d.file("u.json"), "--n", "16", "--M", "4", "--replicas", "10"});
        CHECK(u.code == 2);
        CHECK(u.err.find("bogus") != std::string::npos);
        write_file_atomic(d.file("k.json"), R"({"k_neg": 0, "k": 1, "restarts": 1, "max_iter": 10})");
        CHECK(run({"optimize", "--config", d.file("k.json"), "--seed", "1"}).code == 0);
    }

    TEST_CASE("emitted files round-trip through the parsers") {
        TempDir d;
        REQUIRE(run({"simulate", "--target", "40", "--seed", "3", "--out", d.file("run.json"), "--profile-out",
                     d.file("p.json")})
                    .code == 0);
        const auto runj = nlohmann::json::parse(read_file(d.file("run.json")));
        CHECK(to_json(run_from_json(runj)) == runj);
        CHECK(to_json(run_from_json(runj)) == to_json(simulate_run(40, 4 * 40 + 64, StepSource::seeded(3))));
        const auto pj = nlohmann::json::parse(read_file(d.file("p.json")));
        CHECK(to_json(profile_from_json(pj)) == pj);
        CHECK(run({"energy", "--profile", d.file("p.json"), "--no-error-check"}).code == 0);

        REQUIRE(run({"cover", "--n", "1024", "--seed", "5", "--out", d.file("c.csv"), "--json", d.file("c.json")})
                    .code == 0);
        const auto cj = nlohmann::json::parse(read_file(d.file("c.json")));
        const auto cover = cover_from_json(cj);
        CHECK(cover_csv(cover) == read_file(d.file("c.csv")));

        REQUIRE(run({"optimize", "--xi", "1", "--k", "1", "--k-neg", "0", "--restarts", "2", "--seed", "3", "--out",
                     d.file("r.json"), "--csv", d.file("r.csv")})
                    .code == 0);
        const auto est = rate_from_json(nlohmann::json::parse(read_file(d.file("r.json"))));
        CHECK(std::fabs(est.r_hat - 1.4628845) < 1e-6);
        CHECK(read_file(d.file("r.csv")).rfind("xi,r_hat,r_hat_over_sqrt_xi\n1,", 0) == 0);

        auto mu = run({"mu", "--n", "64", "--replicas", "500", "--seed", "2"});
        REQUIRE(mu.code == 0);
        const auto rows = parse_csv(mu.out);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].size() == 7);
        CHECK(std::stod(rows[1][3]) > 1.0);
    }

    TEST_CASE("report: pass-through, R^2 columns, schema mismatch") {
        TempDir d;
        REQUIRE(run({"tail", "--n", "16,25,36,49,64", "--M", "4", "--replicas", "20000", "--seed", "1", "--out",
                     d.file("t.csv")})
                    .code == 0);
        auto one = run({"report", d.file("t.csv")});
        CHECK(one.code == 0);
        CHECK(one.out == read_file(d.file("t.csv")));

        // split the grid over two files
        const auto tails = parse_tail_csv(read_file(d.file("t.csv")));
        std::string a = tail_csv_header() + "\n", b = a;
        for (std::size_t i = 0; i < tails.size(); ++i) (i < 2 ? a : b) += tail_csv_row(tails[i]) + "\n";
        write_file_atomic(d.file("a.csv"), a);
        write_file_atomic(d.file("b.csv"), b);
        auto m = run({"report", d.file("a.csv"), d.file("b.csv")});
        REQUIRE(m.code == 0);
        const auto rep = cli::parse_report_csv(m.out);
        REQUIRE(rep.rows.size() == 5);
        CHECK(cli::report_csv(rep) == m.out);
        // independent R^2: squared correlation
        auto r2 = [&](bool sq) {
            std::vector<double> x, y;
            for (const auto& t : tails)
                if (t.hits > 0) {
                    x.push_back(sq ? std::sqrt(double(t.n)) : double(t.n));
                    y.push_back(-std::log(t.p_hat));
                }
            double mx = 0, my = 0;
            for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / x.size(), my += y[i] / y.size();
            double c = 0, vx = 0, vy = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                c += (x[i] - mx) * (y[i] - my);
                vx += (x[i] - mx) * (x[i] - mx);
                vy += (y[i] - my) * (y[i] - my);
            }
            return c * c / (vx * vy);
        };
        CHECK(std::fabs(rep.rows[0].r2_sqrt_n - r2(true)) < 1e-12);
        CHECK(std::fabs(rep.rows[0].r2_n - r2(false)) < 1e-12);
        CHECK_FALSE(rep.rows[0].predicted_rate.has_value());

        RateEstimate est;
        est.xi = 4;
        est.r_hat = 3.0;
        est.best_profile = StepProfile::unit_jump(1.0, 4.0);
        write_file_atomic(d.file("r.json"), to_json(est).dump());
        auto w = run({"report", d.file("a.csv"), d.file("b.csv"), d.file("r.json")});
        REQUIRE(w.code == 0);
        const auto rw = cli::parse_report_csv(w.out);
        REQUIRE(rw.rows[0].predicted_rate.has_value());
        CHECK(*rw.rows[0].predicted_rate == doctest::Approx(1.5));  // r(1) * sqrt(1)

        write_file_atomic(d.file("x.csv"), "foo,bar\n1,2\n");
        CHECK(run({"report", d.file("a.csv"), d.file("x.csv")}).code == 1);
    }

    TEST_CASE("verify runs the invariant suites") {
        auto r = run({"verify", "--suite", "profiles"});
        CHECK(r.code == 0);
        CHECK(r.out.find("FAIL") == std::string::npos);
        CHECK(r.out.find("PASS profiles: soft deformation") != std::string::npos);
        auto all = run({"verify"});
        INFO(all.out);
        CHECK(all.code == 0);
        for (const auto& s : cli::verify_suites()) CHECK(all.out.find("PASS " + s + ":") != std::string::npos);
    }
}
