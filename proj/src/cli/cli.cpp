#include "frogld/cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

#include "frogld/core/error.hpp"
#include "frogld/core/io.hpp"
#include "frogld/cover/cover.hpp"
#include "frogld/cover/oracle.hpp"
#include "frogld/energy/energy.hpp"
#include "frogld/frog/simulation.hpp"
#include "frogld/opt/optimizer.hpp"
#include "frogld/profile/profile.hpp"
#include "frogld/simd/kernels.hpp"

namespace frogld::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    std::string config;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
    std::string simd = "auto";

    // simulate
    std::int64_t target = 0;
    std::int64_t budget = -1;
    double margin = 1.0;
    std::string profile_out;
    double scale = 0;
    // mu / tail / cover
    std::vector<std::int64_t> n;
    std::int64_t replicas = 0;
    double M = NAN;
    double xi = 1.0;
    bool global = false;
    double mu_hat = NAN;
    // energy
    std::string profile;
    double delta = NAN;
    int q = 12;
    double piece_tol = 1e-9;
    bool no_error_check = false;
    // optimize
    std::vector<double> xis{1.0};
    int k = 2;
    int k_neg = -1;
    int restarts = 4;
    double tol = 1e-4;
    int max_iter = 500;
    std::string csv;
    // cover
    std::string log_base = "natural";
    int k_max = -1;
    int min_scale = -1;
    std::string json;
    // verify
    std::string suite;
    // report
    std::vector<std::string> inputs;
};

const char* kTailColumns =
    "CSV columns: n,M,xi,replicas,hits,p_hat,ci_low,ci_high,rate\n"
    "  rate = -log(p_hat)/sqrt(n), empty when hits = 0; M empty for the global tail.";

struct Cli {
    CLI::App app{"frogld: frog-model passage times, Brownian energies and rate estimates", "frogld"};
    CLI::Option* seed = nullptr;
    std::map<std::string, CLI::App*> subs;
};

void build(Cli& c, Config& k) {
    auto& app = c.app;
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.add_option("--config", k.config, "JSON file whose keys mirror the long flags; flags win");
    c.seed = app.add_option("--seed", k.seed, "Master seed (required by stochastic subcommands)");
    app.add_option("--threads", k.threads, "Worker threads (0: hardware default); results do not depend on it");
    app.add_option("--out", k.out, "Output path (default: stdout); written atomically");
    app.add_option("--simd", k.simd, "Kernel level")->check(CLI::IsMember({"auto", "scalar", "avx2"}));

    auto* sim = app.add_subcommand("simulate", "One seeded run from 0 to --target; emits the run JSON");
    sim->add_option("--target", k.target, "Target site (>= 1)")->required();
    sim->add_option("--budget", k.budget, "Time budget (default 4*target + 64)");
    sim->add_option("--margin", k.margin, "Left truncation margin factor");
    sim->add_option("--profile-out", k.profile_out, "Also write the empirical step profile JSON here");
    sim->add_option("--scale", k.scale, "Scale n for the empirical profile (default: target)");
    sim->footer("Run JSON: target, start, budget, x_lo, x_hi, first_visit, activation, passage_time (null = censored).");

    auto* mu = app.add_subcommand("mu", "Estimate the time constant from T(0,n)/n");
    mu->add_option("--n", k.n, "Target site")->required()->expected(1);
    mu->add_option("--replicas", k.replicas, "Replica count")->required();
    mu->footer("CSV columns: n,replicas,censored,mu_hat,stderr,ci_low,ci_high");

    auto* tail = app.add_subcommand("tail", "Tail probability of T(0, target) by plain Monte Carlo");
    tail->add_option("--n", k.n, "Scale n (repeat or comma-separate for a grid)")->required()->delimiter(',');
    tail->add_option("--M", k.M, "Local tail P(T(0, floor(M sqrt n)) >= xi n)");
    tail->add_option("--xi", k.xi, "Excess xi");
    tail->add_option("--replicas", k.replicas, "Replica count")->required();
    tail->add_flag("--global", k.global, "Global tail P(T(0,n) >= (mu + xi) n)");
    tail->add_option("--mu-hat", k.mu_hat, "Time constant used by --global");
    tail->footer(kTailColumns);

    auto* en = app.add_subcommand("energy", "Energy of a step profile; emits {value, abs_error, nodes, singular_points}");
    en->add_option("--profile", k.profile, "Profile JSON {xi, pos_jumps, neg_jumps}")->required();
    en->add_option("--M", k.M, "Window: integrate over [-M, M] only");
    en->add_option("--delta", k.delta, "Perturbed energy E^{+,delta}_M (needs --M)");
    en->add_option("--q", k.q, "Chebyshev nodes per panel");
    en->add_option("--piece-tol", k.piece_tol, "Absolute quadrature target per constancy piece");
    en->add_flag("--no-error-check", k.no_error_check, "Skip the second (coarse) solve");

    auto* op = app.add_subcommand("optimize", "Minimize the energy over step profiles; emits RateEstimate JSON");
    op->add_option("--xi", k.xis, "Excess values (repeat or comma-separate)")->delimiter(',');
    op->add_option("--k", k.k, "Jumps per side");
    op->add_option("--k-neg", k.k_neg, "Negative-side jumps (default: --k)");
    op->add_option("--restarts", k.restarts, "Random restarts");
    op->add_option("--tol", k.tol, "Simplex diameter tolerance");
    op->add_option("--max-iter", k.max_iter, "Iteration cap per restart");
    op->add_option("--q", k.q, "Chebyshev nodes per panel");
    op->add_option("--piece-tol", k.piece_tol, "Absolute quadrature target per constancy piece");
    op->add_option("--csv", k.csv, "Also write the rate curve CSV here");
    op->footer("Rate curve CSV columns: xi,r_hat,r_hat_over_sqrt_xi. One xi emits an object, several an array.");

    auto* cv = app.add_subcommand("cover", "Block classification and dyadic cover of a simulated environment");
    cv->add_option("--n", k.n, "Window size")->required()->expected(1);
    cv->add_option("--log-base", k.log_base, "Inner logarithm of N = ceil(2 log2 log n)")
        ->check(CLI::IsMember({"natural", "2"}));
    cv->add_option("--k-max", k.k_max, "Largest scale exponent (default floor(log2 n) - 1)");
    cv->add_option("--min-scale", k.min_scale, "Smallest scale exponent (default N)");
    cv->add_option("--json", k.json, "Also write the cover JSON here");
    cv->footer("CSV columns: kind,index,start,end,x,scale  (kind = red | blue | piece)");

    auto* ve = app.add_subcommand("verify", "Run the invariant suites; exit 0 iff all pass");
    ve->add_option("--suite", k.suite, "Only this suite")->check(CLI::IsMember(verify_suites()));

    auto* re = app.add_subcommand("report", "Merge artifact outputs into one table");
    re->add_option("inputs", k.inputs, "Input files");
    re->footer("One input passes through. Several: tail CSVs (+ optional RateEstimate JSON / rate curve CSV) ->\n"
               "  tail columns + r2_sqrt_n,r2_n,predicted_rate (R^2 of -log p_hat fitted against sqrt(n) and n).");

    for (auto* s : {sim, mu, tail, en, op, cv, ve, re}) {
        s->fallthrough();
        c.subs[s->get_name()] = s;
    }
}

std::string flag_name(std::string key) {
    for (auto& ch : key)
        if (ch == '_') ch = '-';
    return "--" + key;
}

bool given(const std::vector<std::string>& args, const std::string& name) {
    for (const auto& a : args)
        if (a == name || a.rfind(name + "=", 0) == 0) return true;
    return false;
}

// Tokens for config keys not already given on the command line.
std::vector<std::string> config_tokens(Cli& c, CLI::App* sub, const std::vector<std::string>& args,
                                       const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    std::vector<std::string> out;
    for (const auto& [key, v] : j.items()) {
        const std::string name = flag_name(key);
        if (name == "--config" || name == "--help") throw UsageError("config: key not allowed: " + key);
        CLI::Option* opt = sub->get_option_no_throw(name);
        if (!opt) opt = c.app.get_option_no_throw(name);
        if (!opt) throw UsageError("config: unknown key '" + key + "' for " + sub->get_name());
        if (given(args, name)) continue;  // flag wins
        auto scalar = [&](const nlohmann::json& x) -> std::string {
            if (x.is_string()) return x.get<std::string>();
            if (x.is_number_integer() || x.is_number_unsigned()) return x.dump();
            if (x.is_number_float()) return format_double(x.get<double>());
            throw UsageError("config: bad value for '" + key + "'");
        };
        if (v.is_boolean()) {
            if (v.get<bool>()) out.push_back(name);
        } else if (v.is_array()) {
            for (const auto& e : v) {
                out.push_back(name);
                out.push_back(scalar(e));
            }
        } else {
            out.push_back(name);
            out.push_back(scalar(v));
        }
    }
    return out;
}

// --config value and subcommand name, found before CLI11 sees the arguments
// so that config keys can satisfy required flags.
std::pair<std::string, std::string> prescan(const Cli& c, const std::vector<std::string>& args) {
    std::string config, sub;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        if (a == "--config" && i + 1 < args.size()) config = args[i + 1];
        if (a.rfind("--config=", 0) == 0) config = a.substr(9);
        if (sub.empty() && c.subs.count(a)) sub = a;
    }
    return {config, sub};
}

void emit(const Config& k, const std::string& payload, std::ostream& out) {
    if (k.out.empty())
        out << payload;
    else
        write_file_atomic(k.out, payload);
}

std::string with_newline(std::string s) {
    if (s.empty() || s.back() != '\n') s.push_back('\n');
    return s;
}

McOptions mc(const Config& k) { return McOptions{k.threads}; }

EnergyOptions energy_opts(const Config& k) {
    EnergyOptions e;
    e.q = k.q;
    e.piece_tol = k.piece_tol;
    e.error_check = !k.no_error_check;
    return e;
}

int cmd_simulate(const Config& k, std::ostream& out) {
    const std::int64_t budget = k.budget >= 0 ? k.budget : 4 * k.target + 64;
    SimOptions so;
    so.margin_factor = k.margin;
    const auto run = simulate_run(k.target, budget, StepSource::seeded(k.seed), so);
    std::string profile;
    if (!k.profile_out.empty()) {
        require(run.passage_time.has_value(), "simulate: run censored, no profile to extract");
        const double n = k.scale > 0 ? k.scale : static_cast<double>(k.target);
        profile = with_newline(to_json(from_empirical(extract_profile(run, n))).dump(2));
    }
    emit(k, with_newline(to_json(run).dump()), out);
    if (!profile.empty()) write_file_atomic(k.profile_out, profile);
    return kOk;
}

int cmd_mu(const Config& k, std::ostream& out) {
    const auto m = estimate_mu(k.n.at(0), k.replicas, k.seed, mc(k));
    std::ostringstream os;
    os << "n,replicas,censored,mu_hat,stderr,ci_low,ci_high\n"
       << k.n[0] << ',' << m.replicas << ',' << m.censored << ',' << format_double(m.mu_hat) << ','
       << format_double(m.stderr_) << ',' << format_double(m.ci_low) << ',' << format_double(m.ci_high) << '\n';
    emit(k, os.str(), out);
    return kOk;
}

int cmd_tail(const Config& k, std::ostream& out) {
    if (k.global) {
        if (std::isnan(k.mu_hat)) throw UsageError("tail --global needs --mu-hat");
    } else if (std::isnan(k.M)) {
        throw UsageError("tail needs --M (local tail) or --global");
    }
    std::ostringstream os;
    os << tail_csv_header() << '\n';
    for (auto n : k.n) {
        const auto t = k.global ? estimate_tail_global(n, k.xi, k.mu_hat, k.replicas, k.seed, mc(k))
                                : estimate_tail_local(n, k.M, k.xi, k.replicas, k.seed, mc(k));
        os << tail_csv_row(t) << '\n';
    }
    emit(k, os.str(), out);
    return kOk;
}

int cmd_energy(const Config& k, std::ostream& out) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(k.profile));
    } catch (const nlohmann::json::exception& e) {
        throw DomainError("profile " + k.profile + ": " + e.what());
    }
    const auto f = profile_from_json(j);
    const auto eo = energy_opts(k);
    EnergyReport r;
    if (!std::isnan(k.delta)) {
        if (std::isnan(k.M)) throw UsageError("energy --delta needs --M");
        r = energy_perturbed(f, k.delta, k.M, eo);
    } else if (!std::isnan(k.M)) {
        r = energy_windowed(f, k.M, eo);
    } else {
        r = energy_total(f, eo);
    }
    emit(k, with_newline(to_json(r).dump(2)), out);
    return kOk;
}

int cmd_optimize(const Config& k, std::ostream& out) {
    OptimizerOptions o;
    o.restarts = k.restarts;
    o.seed = k.seed;
    o.tol = k.tol;
    o.max_iter = k.max_iter;
    o.threads = k.threads;
    o.energy = energy_opts(k);
    const int kn = k.k_neg >= 0 ? k.k_neg : k.k;
    require(!k.xis.empty(), "optimize: empty xi list");
    std::vector<RateEstimate> est;
    std::vector<RateRow> rows;
    for (double xi : k.xis) {
        est.push_back(minimize_energy(xi, k.k, kn, o));
        rows.push_back({xi, est.back().r_hat, est.back().r_hat / std::sqrt(xi)});
    }
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : est) j.push_back(to_json(e));
    const std::string payload = with_newline((est.size() == 1 ? j[0] : j).dump(2));
    const std::string curve = rate_curve_csv(rows);
    emit(k, payload, out);
    if (!k.csv.empty()) write_file_atomic(k.csv, curve);
    return kOk;
}

int cmd_cover(const Config& k, std::ostream& out, std::ostream& err) {
    const std::int64_t n = k.n.at(0);
    require(n >= 4, "cover: n must be at least 4");
    CoverOptions co;
    co.base = k.log_base == "2" ? LogBase::base2 : LogBase::natural;
    co.k_max = k.k_max;
    co.min_scale = k.min_scale;
    const int kmax = k.k_max >= 0 ? k.k_max : static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - 1;
    const FrontOracle oracle(front_run(n + (std::int64_t{1} << std::max(kmax, 0)), k.seed));
    const auto c = dyadic_cover(oracle, n, co);
    const auto check = validate_cover(c, oracle);
    if (!check.ok) {
        for (const auto& f : check.failures) err << "cover check failed: " << f << '\n';
        return kDomainError;
    }
    emit(k, cover_csv(c), out);
    if (!k.json.empty()) write_file_atomic(k.json, with_newline(to_json(c).dump()));
    return kOk;
}

struct LevelGuard {
    ~LevelGuard() { simd::force_level(std::nullopt); }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config k;
    auto cli = std::make_unique<Cli>();
    build(*cli, k);
    auto parse = [](Cli& c, std::vector<std::string> a) {
        std::reverse(a.begin(), a.end());
        c.app.parse(a);
    };
    CLI::App* sub = nullptr;
    try {
        std::vector<std::string> all = args;
        const auto [config, sub_name] = prescan(*cli, args);
        if (!config.empty() && !sub_name.empty()) {
            const auto extra = config_tokens(*cli, cli->subs.at(sub_name), args, config);
            all.insert(all.end(), extra.begin(), extra.end());
        }
        parse(*cli, all);
        sub = cli->app.get_subcommands().at(0);
        const std::string name = sub->get_name();
        const bool stochastic = name == "simulate" || name == "mu" || name == "tail" || name == "optimize" ||
                                name == "cover";
        if (stochastic && cli->seed->count() == 0) throw UsageError(name + ": --seed is required");
        if (name == "report" && k.inputs.empty()) throw UsageError("report: no input files");
    } catch (const CLI::CallForHelp& e) {
        return cli->app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return cli->app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << (sub ? sub->help() : cli->app.help());
        return kUsageError;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << (sub ? sub->help() : cli->app.help());
        return kUsageError;
    }

    LevelGuard guard;
    const std::string name = sub->get_name();
    try {
        if (k.simd == "scalar") simd::force_level(simd::Level::scalar);
        if (k.simd == "avx2") {
            require(simd::cpu_has_avx2(), "--simd avx2: CPU lacks AVX2");
            simd::force_level(simd::Level::avx2);
        }
        if (name == "simulate") return cmd_simulate(k, out);
        if (name == "mu") return cmd_mu(k, out);
        if (name == "tail") return cmd_tail(k, out);
        if (name == "energy") return cmd_energy(k, out);
        if (name == "optimize") return cmd_optimize(k, out);
        if (name == "cover") return cmd_cover(k, out, err);
        if (name == "verify") {
            std::ostringstream os;
            const bool ok = verify(os, k.suite);
            emit(k, os.str(), out);
            return ok ? kOk : kDomainError;
        }
        if (name == "report") {
            emit(k, report(k.inputs), out);
            return kOk;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n" << sub->help();
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kDomainError;
    }
    return kUsageError;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace frogld::cli
