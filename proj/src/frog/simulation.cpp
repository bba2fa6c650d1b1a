#include "frogld/frog/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frogld/core/error.hpp"
#include "frogld/core/rng.hpp"
#include "frogld/simd/kernels.hpp"

namespace frogld {

StepSource StepSource::seeded(std::uint64_t seed) {
    StepSource s;
    s.mode = Mode::seeded;
    s.seed = seed;
    return s;
}

StepSource StepSource::scripted(std::map<std::int64_t, std::vector<int>> scripts) {
    for (const auto& [site, steps] : scripts)
        for (int v : steps) require(v == 1 || v == -1, "scripted steps must be +1 or -1 (site " + std::to_string(site) + ")");
    StepSource s;
    s.mode = Mode::scripted;
    s.scripts = std::move(scripts);
    return s;
}

MaybeTime SimulationRun::first_visit_at(std::int64_t x) const {
    require(in_domain(x), "site " + std::to_string(x) + " outside run domain");
    return first_visit[static_cast<std::size_t>(x - x_lo)];
}

MaybeTime SimulationRun::activation_at(std::int64_t x) const {
    require(in_domain(x), "site " + std::to_string(x) + " outside run domain");
    return activation[static_cast<std::size_t>(x - x_lo)];
}

namespace {

struct Layout {
    std::int64_t start, target, budget;
    std::int64_t sim_lo;  // leftmost site whose frog is simulated
    std::int64_t x_lo;
    std::optional<SiteRange> allowed;
};

Layout make_layout(std::int64_t target, std::int64_t start, std::optional<SiteRange> allowed, std::int64_t budget,
                   double margin_factor) {
    require(budget >= 1, "budget must be >= 1");
    require(target > start, "target must lie right of the start site");
    require(margin_factor >= 1.0, "margin factor must be >= 1");
    if (allowed) {
        require(allowed->lo <= allowed->hi, "allowed set is empty");
        require(allowed->contains(start), "start site not in allowed set");
    }
    Layout lay{start, target, budget, start, start, allowed};
    const double slack = margin_factor * static_cast<double>(budget) - static_cast<double>(target - start);
    if (slack > 0) {
        lay.sim_lo = start - static_cast<std::int64_t>(std::floor(slack / 2.0));
        const std::int64_t dom = static_cast<std::int64_t>(budget) - (target - start);
        lay.x_lo = start - std::max<std::int64_t>(0, (dom + 1) / 2);
        lay.x_lo = std::min(lay.x_lo, lay.sim_lo);
    }
    return lay;
}

class Engine {
public:
    explicit Engine(bool record) : record_(record) {}

    MaybeTime run(const Layout& lay, const StepSource& src, SimulationRun* out) {
        lay_ = &lay;
        out_ = out;
        reset();
        if (out_) {
            const auto size = static_cast<std::size_t>(lay.target - lay.x_lo + 1);
            out_->first_visit.assign(size, std::nullopt);
            out_->activation.assign(size, std::nullopt);
        }
        lo_ = hi_ = lay.start;
        mark(lay.start, 0, true);
        if (src.mode == StepSource::Mode::seeded) {
            seed_ = src.seed;
            wake_seeded(lay.start);
            return loop_seeded();
        }
        scripts_ = &src.scripts;
        wake_scripted(lay.start);
        return loop_scripted();
    }

private:
    void reset() {
        pos_.clear();
        word_.clear();
        left_.clear();
        key_.clear();
        block_.clear();
        origin_.clear();
        used_.clear();
    }

    bool eligible(std::int64_t x) const {
        if (x < lay_->sim_lo) return false;
        if (lay_->allowed && !lay_->allowed->contains(x)) return x == lay_->start;
        return true;
    }

    void mark(std::int64_t x, std::int64_t t, bool wakes) {
        if (!out_ || x < lay_->x_lo || x > lay_->target) return;
        const auto i = static_cast<std::size_t>(x - lay_->x_lo);
        out_->first_visit[i] = t;
        const bool activated = !lay_->allowed || lay_->allowed->contains(x) || x == lay_->start;
        if (activated && wakes) out_->activation[i] = t;
    }

    void wake_seeded(std::int64_t x) {
        const std::uint64_t k = stream_key(seed_, static_cast<std::uint64_t>(x));
        pos_.push_back(x);
        key_.push_back(k);
        block_.push_back(0);
        word_.push_back(stream_word(k, 0));
        left_.push_back(64);
    }

    void wake_scripted(std::int64_t x) {
        pos_.push_back(x);
        origin_.push_back(x);
        used_.push_back(0);
    }

    void visit(std::int64_t x, std::int64_t t, bool seeded) {
        // every visited frog is woken; frogs beyond the truncation are not stepped
        mark(x, t, true);
        if (!eligible(x)) return;
        if (seeded)
            wake_seeded(x);
        else
            wake_scripted(x);
    }

    void advance_front(std::int64_t new_lo, std::int64_t new_hi, std::int64_t t, bool seeded) {
        check_invariant(new_lo >= lo_ - 1 && new_hi <= hi_ + 1, "front moved by more than one site");
        if (new_lo < lo_) {
            lo_ = new_lo;
            visit(lo_, t, seeded);
        }
        if (new_hi > hi_) {
            hi_ = new_hi;
            visit(hi_, t, seeded);
        }
    }

    MaybeTime finish(std::int64_t t) {
        mark(lay_->target, t, true);
        return t;
    }

    MaybeTime loop_seeded() {
        const auto step = simd::frog_step_fn(simd::active_level());
        for (std::int64_t t = 0; t < lay_->budget; ++t) {
            const std::size_t n = pos_.size();
            refill_.resize(n);
            const auto r = step(pos_.data(), word_.data(), left_.data(), n, lo_, hi_, refill_.data());
            for (std::size_t j = 0; j < r.refills; ++j) {
                const auto i = refill_[j];
                word_[i] = stream_word(key_[i], ++block_[i]);
                left_[i] = 64;
            }
            if (r.hi >= lay_->target) return finish(t + 1);
            advance_front(r.lo, r.hi, t + 1, true);
        }
        return std::nullopt;
    }

    int next_scripted(std::size_t i) {
        const auto it = scripts_->find(origin_[i]);
        if (it == scripts_->end() || used_[i] >= it->second.size()) throw ScriptUnderrunError(origin_[i], used_[i]);
        return it->second[used_[i]++];
    }

    MaybeTime loop_scripted() {
        std::vector<char> moved;
        for (std::int64_t t = 0; t < lay_->budget; ++t) {
            const std::size_t n = pos_.size();
            moved.assign(n, 0);
            // frogs next to the target move first; the run stops as soon as one arrives
            if (hi_ == lay_->target - 1) {
                bool hit = false;
                for (std::size_t i = 0; i < n; ++i) {
                    if (pos_[i] != lay_->target - 1) continue;
                    pos_[i] += next_scripted(i);
                    moved[i] = 1;
                    if (pos_[i] == lay_->target) {
                        hit = true;
                        break;
                    }
                }
                if (hit) return finish(t + 1);
            }
            std::int64_t lo = lo_, hi = hi_;
            for (std::size_t i = 0; i < n; ++i) {
                if (!moved[i]) pos_[i] += next_scripted(i);
                lo = std::min(lo, pos_[i]);
                hi = std::max(hi, pos_[i]);
            }
            advance_front(lo, hi, t + 1, false);
        }
        return std::nullopt;
    }

    bool record_;
    const Layout* lay_ = nullptr;
    SimulationRun* out_ = nullptr;
    std::uint64_t seed_ = 0;
    const std::map<std::int64_t, std::vector<int>>* scripts_ = nullptr;
    std::int64_t lo_ = 0, hi_ = 0;
    std::vector<std::int64_t> pos_;
    std::vector<std::uint64_t> word_, left_, key_, block_;
    std::vector<std::uint32_t> refill_;
    std::vector<std::int64_t> origin_;
    std::vector<std::size_t> used_;
};

}  // namespace

SimulationRun restricted_run(std::int64_t target, std::int64_t start, std::optional<SiteRange> allowed,
                             std::int64_t budget, const StepSource& source, const SimOptions& opt) {
    const Layout lay = make_layout(target, start, allowed, budget, opt.margin_factor);
    SimulationRun run;
    run.target = target;
    run.start = start;
    run.budget = budget;
    run.x_lo = lay.x_lo;
    run.x_hi = target;
    Engine eng(true);
    run.passage_time = eng.run(lay, source, &run);
    return run;
}

SimulationRun simulate_run(std::int64_t target, std::int64_t budget, const StepSource& source, const SimOptions& opt) {
    require(target >= 1, "target must be >= 1");
    return restricted_run(target, 0, std::nullopt, budget, source, opt);
}

MaybeTime seeded_passage_time(std::int64_t target, std::int64_t budget, std::uint64_t seed) {
    require(target >= 1, "target must be >= 1");
    thread_local Engine eng(false);
    const Layout lay = make_layout(target, 0, std::nullopt, budget, 1.0);
    return eng.run(lay, StepSource::seeded(seed), nullptr);
}

PassageProfile extract_profile(const SimulationRun& run, double n, std::int64_t k_lo, std::int64_t k_hi) {
    require(n > 0, "scale n must be positive");
    require(k_lo <= 0 && 0 <= k_hi, "window must contain 0");
    require(run.in_domain(k_lo) && run.in_domain(k_hi), "window outside run domain");
    PassageProfile p;
    p.n = n;
    p.k_lo = k_lo;
    const double sn = std::sqrt(n);
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const auto t = run.first_visit_at(k);
        if (!t) throw DomainError("site " + std::to_string(k) + " censored inside profile window");
        p.u.push_back(static_cast<double>(k) / sn);
        p.f.push_back(static_cast<double>(*t) / n);
    }
    return p;
}

PassageProfile extract_profile(const SimulationRun& run, double n) {
    std::int64_t lo = 0, hi = 0;
    while (run.in_domain(lo - 1) && run.first_visit_at(lo - 1)) --lo;
    while (run.in_domain(hi + 1) && run.first_visit_at(hi + 1)) ++hi;
    return extract_profile(run, n, lo, hi);
}

namespace {
nlohmann::json times_to_json(const std::vector<MaybeTime>& v) {
    auto a = nlohmann::json::array();
    for (const auto& t : v) a.push_back(t ? nlohmann::json(*t) : nlohmann::json(nullptr));
    return a;
}
std::vector<MaybeTime> times_from_json(const nlohmann::json& a) {
    std::vector<MaybeTime> v;
    for (const auto& e : a) v.push_back(e.is_null() ? MaybeTime{} : MaybeTime{e.get<std::int64_t>()});
    return v;
}
}  // namespace

nlohmann::json to_json(const SimulationRun& run) {
    return {{"target", run.target},
            {"start", run.start},
            {"budget", run.budget},
            {"domain", {run.x_lo, run.x_hi}},
            {"first_visit", times_to_json(run.first_visit)},
            {"activation", times_to_json(run.activation)},
            {"passage_time", run.passage_time ? nlohmann::json(*run.passage_time) : nlohmann::json(nullptr)}};
}

SimulationRun run_from_json(const nlohmann::json& j) {
    SimulationRun r;
    try {
        r.target = j.at("target").get<std::int64_t>();
        r.start = j.value("start", std::int64_t{0});
        r.budget = j.at("budget").get<std::int64_t>();
        r.x_lo = j.at("domain").at(0).get<std::int64_t>();
        r.x_hi = j.at("domain").at(1).get<std::int64_t>();
        r.first_visit = times_from_json(j.at("first_visit"));
        r.activation = times_from_json(j.at("activation"));
        const auto& pt = j.at("passage_time");
        if (!pt.is_null()) r.passage_time = pt.get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed run JSON: ") + e.what());
    }
    const auto size = static_cast<std::size_t>(r.x_hi - r.x_lo + 1);
    if (r.first_visit.size() != size || r.activation.size() != size) throw DomainError("run JSON arrays do not match domain");
    return r;
}

}  // namespace frogld
