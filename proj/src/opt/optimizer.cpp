#include "frogld/opt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "frogld/core/error.hpp"
#include "frogld/core/io.hpp"
#include "frogld/core/parallel.hpp"
#include "frogld/core/rng.hpp"
#include "frogld/opt/nelder_mead.hpp"

namespace frogld {

namespace {
double ex(double v) { return std::exp(std::clamp(v, kParamLo, kParamHi)); }
double lg(double v) { return std::clamp(std::log(v), kParamLo, kParamHi); }
}  // namespace

std::size_t ProfileParams::dim() const {
    return static_cast<std::size_t>(2 * k_pos - 1 + (k_neg > 0 ? 2 * k_neg + 1 : 0));
}

StepProfile ProfileParams::decode(const std::vector<double>& p) const {
    check_invariant(p.size() == dim(), "profile parameters: wrong dimension");
    std::size_t i = 0;
    std::vector<Jump> pos(static_cast<std::size_t>(k_pos)), neg(static_cast<std::size_t>(k_neg));
    double u = 0;
    for (auto& j : pos) j.loc = u += ex(p[i++]);
    double c = 0;
    for (int m = 0; m + 1 < k_pos; ++m) pos[static_cast<std::size_t>(m)].level = c += ex(p[i++]);
    const double total = c + 1.0;
    for (int m = 0; m + 1 < k_pos; ++m) pos[static_cast<std::size_t>(m)].level = xi * pos[static_cast<std::size_t>(m)].level / total;
    pos.back().level = xi;
    if (k_neg > 0) {
        double v = 0;
        for (auto& j : neg) j.loc = v -= ex(p[i++]);
        double d = 0;
        for (auto& j : neg) j.level = d += ex(p[i++]);
        const double denom = d + ex(p[i++]);
        for (auto& j : neg) j.level = xi * j.level / denom;
    }
    // the constructor re-checks ordering, so every candidate is a valid profile
    return StepProfile(xi, std::move(pos), std::move(neg));
}

std::vector<double> ProfileParams::encode(const StepProfile& f) const {
    require(static_cast<int>(f.pos().size()) == k_pos && static_cast<int>(f.neg().size()) == k_neg,
            "encode: jump counts do not match");
    std::vector<double> p;
    double prev = 0;
    for (const auto& j : f.pos()) {
        p.push_back(lg(j.loc - prev));
        prev = j.loc;
    }
    const auto& ps = f.pos();
    const double last = ps.back().level - (k_pos > 1 ? ps[ps.size() - 2].level : 0.0);
    prev = 0;
    for (int m = 0; m + 1 < k_pos; ++m) {
        p.push_back(lg((ps[static_cast<std::size_t>(m)].level - prev) / last));
        prev = ps[static_cast<std::size_t>(m)].level;
    }
    if (k_neg > 0) {
        prev = 0;
        for (const auto& j : f.neg()) {
            p.push_back(lg(prev - j.loc));
            prev = j.loc;
        }
        prev = 0;
        for (const auto& j : f.neg()) {
            p.push_back(lg(j.level - prev));
            prev = j.level;
        }
        p.push_back(lg(std::max(xi - f.neg().back().level, 1e-300)));
    }
    return p;
}

StepProfile split_for_warm_start(const StepProfile& f, int k_pos, int k_neg) {
    std::vector<Jump> pos = f.pos(), neg = f.neg();
    require(static_cast<int>(pos.size()) == k_pos || static_cast<int>(pos.size()) + 1 == k_pos, "warm start: k_pos");
    require(static_cast<int>(neg.size()) == k_neg || static_cast<int>(neg.size()) + 1 == k_neg, "warm start: k_neg");
    if (static_cast<int>(pos.size()) + 1 == k_pos) {
        // split the jump with the largest level increment
        std::size_t best = 0;
        double inc = -1;
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const double d = pos[i].level - (i ? pos[i - 1].level : 0.0);
            if (d > inc) {
                inc = d;
                best = i;
            }
        }
        const double left = best ? pos[best - 1].loc : 0.0, lev_left = best ? pos[best - 1].level : 0.0;
        const double gap = pos[best].loc - left;
        pos.insert(pos.begin() + static_cast<std::ptrdiff_t>(best),
                   Jump{pos[best].loc - 1e-3 * gap, 0.5 * (lev_left + pos[best].level)});
    }
    if (static_cast<int>(neg.size()) + 1 == k_neg) {
        const double out_loc = neg.empty() ? 0.0 : neg.back().loc, out_lev = neg.empty() ? 0.0 : neg.back().level;
        neg.push_back({out_loc - std::exp(3.0) * std::sqrt(f.xi()), out_lev + 1e-6 * (f.xi() - out_lev)});
    }
    return StepProfile(f.xi(), std::move(pos), std::move(neg));
}

RateEstimate minimize_energy(double xi, int k_pos, int k_neg, const OptimizerOptions& opt,
                             const std::optional<StepProfile>& warm) {
    require(std::isfinite(xi) && xi > 0, "minimize_energy: xi must be positive");
    require(k_pos >= 1 && k_neg >= 0, "minimize_energy: need k_pos >= 1, k_neg >= 0");
    require(opt.restarts >= 1 && opt.max_iter >= 0 && opt.tol > 0, "minimize_energy: bad options");
    const ProfileParams pp{xi, k_pos, k_neg};
    EnergyOptions inner = opt.energy;
    inner.error_check = false;
    auto objective = [&](const std::vector<double>& p) {
        try {
            return energy_total(pp.decode(p), inner).value;
        } catch (const DomainError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    std::vector<NelderMeadResult> res(static_cast<std::size_t>(opt.restarts));
    const int threads = opt.threads > 0 ? opt.threads : default_threads();
    for_each_chunk(opt.restarts, 1, threads, [&](std::int64_t r, std::int64_t, std::int64_t) {
        std::vector<double> x0;
        if (r == 0 && warm) {
            x0 = pp.encode(split_for_warm_start(*warm, k_pos, k_neg));
        } else {
            std::mt19937_64 g(stream_key(opt.seed, static_cast<std::uint64_t>(k_pos) << 16 | static_cast<std::uint64_t>(k_neg),
                                         static_cast<std::uint64_t>(r)));
            std::uniform_real_distribution<double> loc(-1.5, 0.5), lev(-1.0, 1.0);
            const double shift = 0.5 * std::log(xi);  // locations scale like sqrt(xi)
            for (int m = 0; m < k_pos; ++m) x0.push_back(loc(g) + shift);
            for (int m = 0; m + 1 < k_pos; ++m) x0.push_back(lev(g));
            if (k_neg > 0) {
                for (int m = 0; m < k_neg; ++m) x0.push_back(loc(g) + shift);
                for (int m = 0; m <= k_neg; ++m) x0.push_back(lev(g));
            }
        }
        res[static_cast<std::size_t>(r)] = nelder_mead(objective, x0, opt.step, opt.tol, opt.max_iter);
    });
    RateEstimate out;
    out.xi = xi;
    out.k_pos = k_pos;
    out.k_neg = k_neg;
    out.restarts = opt.restarts;
    std::size_t best = 0;
    for (std::size_t r = 0; r < res.size(); ++r) {
        out.trace.push_back(res[r].value);
        out.evaluations += res[r].evaluations;
        if (res[r].value < res[best].value) best = r;
    }
    if (!std::isfinite(res[best].value)) throw EstimationFailedError("minimize_energy: no restart produced a finite energy", 0);
    const auto f = pp.decode(res[best].x);
    const auto rep = energy_total(f, opt.energy);
    out.r_hat = rep.value;
    out.r_hat_error = rep.abs_error;
    out.best_profile = f;
    return out;
}

std::vector<RateEstimate> minimize_energy_chain(double xi, int k, int k_neg, const OptimizerOptions& opt) {
    require(k >= 1, "minimize_energy_chain: k must be >= 1");
    std::vector<RateEstimate> out;
    std::optional<StepProfile> warm;
    for (int kp = 1; kp <= k; ++kp) {
        out.push_back(minimize_energy(xi, kp, k_neg, opt, warm));
        warm = out.back().best_profile;
    }
    return out;
}

std::vector<RateRow> rate_curve(const std::vector<double>& xis, int k, const OptimizerOptions& opt,
                                std::vector<RateEstimate>* details) {
    std::vector<RateRow> rows;
    for (double xi : xis) {
        auto est = minimize_energy(xi, k, k, opt);
        rows.push_back({xi, est.r_hat, est.r_hat / std::sqrt(xi)});
        if (details) details->push_back(std::move(est));
    }
    return rows;
}

std::string rate_curve_csv(const std::vector<RateRow>& rows) {
    std::ostringstream os;
    os << "xi,r_hat,r_hat_over_sqrt_xi\n";
    for (const auto& r : rows) os << format_double(r.xi) << ',' << format_double(r.r_hat) << ',' << format_double(r.r_over_sqrt_xi) << '\n';
    return os.str();
}

ComparisonReport compare_with_simulation(double r_hat, const std::vector<std::int64_t>& ns, double M, double xi,
                                         std::int64_t replicas, std::uint64_t seed, const McOptions& mc) {
    require(r_hat > 0, "compare_with_simulation: r_hat must be positive");
    ComparisonReport rep;
    std::vector<double> rates, gaps;
    for (auto n : ns) {
        ComparisonRow row{estimate_tail_local(n, M, xi, replicas, seed, mc), std::nullopt, r_hat * std::sqrt(xi)};
        row.empirical_rate = row.tail.rate;
        if (row.tail.zero_hits) rep.zero_hits = true;
        if (row.empirical_rate) {
            rates.push_back(*row.empirical_rate);
            gaps.push_back(std::fabs(*row.empirical_rate - row.predicted_rate));
        }
        rep.rows.push_back(std::move(row));
    }
    bool up = true, down = true;
    for (std::size_t i = 1; i < rates.size(); ++i) {
        up = up && rates[i] >= rates[i - 1];
        down = down && rates[i] <= rates[i - 1];
        rep.approaching = rep.approaching && gaps[i] <= gaps[i - 1];
    }
    rep.monotone = up || down;
    return rep;
}

std::string comparison_csv(const ComparisonReport& r) {
    std::ostringstream os;
    os << "n,M,xi,replicas,hits,p_hat,ci_low,ci_high,empirical_rate,predicted_rate\n";
    for (const auto& row : r.rows) {
        const auto& t = row.tail;
        os << t.n << ',' << format_double(t.M.value_or(NAN)) << ',' << format_double(t.xi) << ',' << t.replicas << ','
           << t.hits << ',' << format_double(t.p_hat) << ',' << format_double(t.ci_low) << ','
           << format_double(t.ci_high) << ',' << format_double(row.empirical_rate.value_or(NAN)) << ','
           << format_double(row.predicted_rate) << '\n';
    }
    return os.str();
}

nlohmann::json to_json(const RateEstimate& r) {
    nlohmann::json j{{"xi", r.xi},           {"k_pos", r.k_pos},     {"k_neg", r.k_neg},
                     {"r_hat", r.r_hat},     {"r_hat_error", r.r_hat_error},
                     {"restarts", r.restarts}, {"trace", r.trace},   {"evaluations", r.evaluations}};
    j["best_profile"] = r.best_profile ? to_json(*r.best_profile) : nlohmann::json(nullptr);
    return j;
}

RateEstimate rate_from_json(const nlohmann::json& j) {
    RateEstimate r;
    try {
        r.xi = j.at("xi").get<double>();
        r.k_pos = j.at("k_pos").get<int>();
        r.k_neg = j.at("k_neg").get<int>();
        r.r_hat = j.at("r_hat").get<double>();
        r.r_hat_error = j.at("r_hat_error").get<double>();
        r.restarts = j.at("restarts").get<int>();
        r.trace = j.at("trace").get<std::vector<double>>();
        r.evaluations = j.at("evaluations").get<std::int64_t>();
        if (!j.at("best_profile").is_null()) r.best_profile = profile_from_json(j.at("best_profile"));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed rate estimate JSON: ") + e.what());
    }
    return r;
}

}  // namespace frogld
