#include "frogld/frog/estimators.hpp"

#include <cmath>
#include <sstream>

#include "frogld/core/error.hpp"
#include "frogld/core/io.hpp"
#include "frogld/core/parallel.hpp"
#include "frogld/core/rng.hpp"
#include "frogld/core/stats.hpp"
#include "frogld/frog/simulation.hpp"

namespace frogld {

namespace {
constexpr std::int64_t kChunk = 256;

int threads_of(const McOptions& o) { return o.threads > 0 ? o.threads : default_threads(); }

struct TimeSums {
    double sum = 0, sum_sq = 0;
    std::int64_t done = 0, censored = 0;
};
}  // namespace

std::uint64_t replica_seed(std::uint64_t master, std::int64_t replica) {
    return stream_key(master, 0x7265706cULL, static_cast<std::uint64_t>(replica));
}

std::int64_t local_target(std::int64_t n, double M) {
    const double sn = std::sqrt(static_cast<double>(n));
    const double r = std::nearbyint(sn);
    // exact for perfect squares and integer M
    if (r * r == static_cast<double>(n) && M == std::floor(M)) return static_cast<std::int64_t>(M * r);
    return static_cast<std::int64_t>(std::floor(M * sn));
}

std::int64_t ceil_budget(double x) { return static_cast<std::int64_t>(std::ceil(x)); }

MuEstimate estimate_mu(std::int64_t n, std::int64_t replicas, std::uint64_t seed, const McOptions& opt) {
    require(n >= 16, "estimate_mu: n must be >= 16");
    require(replicas >= 100, "estimate_mu: replicas must be >= 100");
    const std::int64_t budget = 8 * n;
    const auto s = chunked_reduce(
        replicas, kChunk, threads_of(opt), TimeSums{},
        [&](std::int64_t, std::int64_t b, std::int64_t e) {
            TimeSums acc;
            for (std::int64_t r = b; r < e; ++r) {
                const auto t = seeded_passage_time(n, budget, replica_seed(seed, r));
                if (!t) {
                    ++acc.censored;
                    continue;
                }
                const double v = static_cast<double>(*t) / static_cast<double>(n);
                acc.sum += v;
                acc.sum_sq += v * v;
                ++acc.done;
            }
            return acc;
        },
        [](TimeSums a, const TimeSums& b) {
            a.sum += b.sum;
            a.sum_sq += b.sum_sq;
            a.done += b.done;
            a.censored += b.censored;
            return a;
        });
    if (s.done == 0) throw EstimationFailedError("estimate_mu: every run censored", s.censored);
    Moments m;
    m.n = static_cast<double>(s.done);
    m.sum = s.sum;
    m.sum_sq = s.sum_sq;
    MuEstimate out;
    out.mu_hat = m.mean();
    out.stderr_ = m.stderr_of_mean();
    out.ci_low = out.mu_hat - 1.959963984540054 * out.stderr_;
    out.ci_high = out.mu_hat + 1.959963984540054 * out.stderr_;
    out.replicas = replicas;
    out.censored = s.censored;
    return out;
}

TailEstimate estimate_tail(std::int64_t target, std::int64_t b, std::int64_t replicas, std::uint64_t seed,
                           const McOptions& opt) {
    require(target >= 1, "tail: target must be >= 1");
    require(b >= 1, "tail: budget must be >= 1");
    require(replicas >= 1, "tail: replicas must be >= 1");
    std::int64_t hits = replicas;
    if (b > 1) {
        // T >= b  iff  target not reached within b-1 steps
        hits = chunked_reduce(
            replicas, kChunk, threads_of(opt), std::int64_t{0},
            [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
                std::int64_t h = 0;
                for (std::int64_t r = lo; r < hi; ++r)
                    if (!seeded_passage_time(target, b - 1, replica_seed(seed, r))) ++h;
                return h;
            },
            [](std::int64_t a, std::int64_t c) { return a + c; });
    }
    TailEstimate t;
    t.replicas = replicas;
    t.hits = hits;
    t.p_hat = static_cast<double>(hits) / static_cast<double>(replicas);
    const auto ci = wilson_interval(hits, replicas);
    t.ci_low = ci.low;
    t.ci_high = ci.high;
    t.zero_hits = hits == 0;
    return t;
}

TailEstimate estimate_tail_local(std::int64_t n, double M, double xi, std::int64_t replicas, std::uint64_t seed,
                                 const McOptions& opt) {
    require(n >= 1, "tail_local: n must be >= 1");
    require(M >= 1, "tail_local: M must be >= 1");
    require(xi > 0, "tail_local: xi must be positive");
    auto t = estimate_tail(local_target(n, M), ceil_budget(xi * static_cast<double>(n)), replicas, seed, opt);
    t.n = n;
    t.M = M;
    t.xi = xi;
    if (!t.zero_hits) t.rate = std::max(0.0, -std::log(t.p_hat)) / std::sqrt(static_cast<double>(n));
    return t;
}

TailEstimate estimate_tail_global(std::int64_t n, double xi, double mu_hat, std::int64_t replicas, std::uint64_t seed,
                                  const McOptions& opt) {
    require(n >= 1, "tail_global: n must be >= 1");
    require(xi >= 0, "tail_global: xi must be >= 0");
    require(mu_hat > 0, "tail_global: mu_hat must be positive");
    auto t = estimate_tail(n, ceil_budget((mu_hat + xi) * static_cast<double>(n)), replicas, seed, opt);
    t.n = n;
    t.xi = xi;
    if (!t.zero_hits) t.rate = std::max(0.0, -std::log(t.p_hat)) / std::sqrt(static_cast<double>(n));
    return t;
}

std::vector<double> passage_time_histogram(std::int64_t target, std::int64_t k_max, std::int64_t replicas,
                                           std::uint64_t seed, const McOptions& opt) {
    require(k_max >= 0 && replicas >= 1, "histogram: bad arguments");
    using Counts = std::vector<std::int64_t>;
    const auto counts = chunked_reduce(
        replicas, kChunk, threads_of(opt), Counts(static_cast<std::size_t>(k_max + 2), 0),
        [&](std::int64_t, std::int64_t lo, std::int64_t hi) {
            Counts c(static_cast<std::size_t>(k_max + 2), 0);
            for (std::int64_t r = lo; r < hi; ++r) {
                const auto t = k_max >= 1 ? seeded_passage_time(target, k_max, replica_seed(seed, r)) : MaybeTime{};
                ++c[t ? static_cast<std::size_t>(*t) : static_cast<std::size_t>(k_max + 1)];
            }
            return c;
        },
        [](Counts a, const Counts& b) {
            for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
            return a;
        });
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts[i]) / static_cast<double>(replicas);
    return p;
}

std::string tail_csv_header() { return "n,M,xi,replicas,hits,p_hat,ci_low,ci_high,rate"; }

std::string tail_csv_row(const TailEstimate& t) {
    std::ostringstream o;
    o << t.n << ',' << (t.M ? format_double(*t.M) : "") << ',' << format_double(t.xi) << ',' << t.replicas << ','
      << t.hits << ',' << format_double(t.p_hat) << ',' << format_double(t.ci_low) << ','
      << format_double(t.ci_high) << ',' << (t.rate ? format_double(*t.rate) : "");
    return o.str();
}

std::vector<TailEstimate> parse_tail_csv(const std::string& text) {
    const auto rows = parse_csv(text);
    if (rows.empty()) throw DomainError("tail CSV: empty");
    std::ostringstream h;
    for (std::size_t i = 0; i < rows[0].size(); ++i) h << (i ? "," : "") << rows[0][i];
    if (h.str() != tail_csv_header()) throw DomainError("tail CSV: unexpected header");
    std::vector<TailEstimate> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& c = rows[r];
        if (c.size() != 9) throw DomainError("tail CSV: row " + std::to_string(r) + " has wrong column count");
        TailEstimate t;
        try {
            t.n = std::stoll(c[0]);
            if (!c[1].empty()) t.M = std::stod(c[1]);
            t.xi = std::stod(c[2]);
            t.replicas = std::stoll(c[3]);
            t.hits = std::stoll(c[4]);
            t.p_hat = std::stod(c[5]);
            t.ci_low = std::stod(c[6]);
            t.ci_high = std::stod(c[7]);
            if (!c[8].empty()) t.rate = std::stod(c[8]);
        } catch (const std::exception&) {
            throw DomainError("tail CSV: malformed number in row " + std::to_string(r));
        }
        t.zero_hits = t.hits == 0;
        out.push_back(t);
    }
    return out;
}

}  // namespace frogld
