#include "frogld/profile/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frogld/core/error.hpp"

namespace frogld {

StepProfile::StepProfile(double xi, std::vector<Jump> pos, std::vector<Jump> neg)
    : xi_(xi), pos_(std::move(pos)), neg_(std::move(neg)) {
    require(std::isfinite(xi_) && xi_ > 0, "profile: xi must be finite and positive");
    require(!pos_.empty(), "profile: needs at least one positive jump");
    for (std::size_t i = 0; i < pos_.size(); ++i) {
        const auto& j = pos_[i];
        require(std::isfinite(j.loc) && j.loc > 0, "profile: positive jump locations must be > 0");
        require(std::isfinite(j.level) && j.level > 0, "profile: positive levels must be > 0");
        if (i > 0) {
            require(j.loc > pos_[i - 1].loc, "profile: positive locations must increase");
            require(j.level > pos_[i - 1].level, "profile: positive levels must increase");
        }
    }
    require(pos_.back().level == xi_, "profile: last positive level must equal xi");
    for (std::size_t i = 0; i < neg_.size(); ++i) {
        const auto& j = neg_[i];
        require(std::isfinite(j.loc) && j.loc < 0, "profile: negative jump locations must be < 0");
        require(std::isfinite(j.level) && j.level > 0 && j.level <= xi_, "profile: negative levels must lie in (0, xi]");
        if (i > 0) {
            require(j.loc < neg_[i - 1].loc, "profile: negative locations must decrease");
            require(j.level > neg_[i - 1].level, "profile: negative levels must increase outward");
        }
    }
}

StepProfile StepProfile::unit_jump(double at, double xi) { return StepProfile(xi, {{at, xi}}, {}); }

double StepProfile::operator()(double x) const {
    if (x > 0) {
        auto it = std::upper_bound(pos_.begin(), pos_.end(), x, [](double v, const Jump& j) { return v < j.loc; });
        return it == pos_.begin() ? 0.0 : std::prev(it)->level;
    }
    if (x < 0) {
        // neg_ locations decrease; count jumps with loc >= x
        auto it = std::upper_bound(neg_.begin(), neg_.end(), x, [](double v, const Jump& j) { return v > j.loc; });
        return it == neg_.begin() ? 0.0 : std::prev(it)->level;
    }
    return 0.0;
}

std::vector<double> StepProfile::levels() const {
    std::vector<double> v{0.0};
    for (const auto& j : pos_) v.push_back(j.level);
    for (const auto& j : neg_) v.push_back(j.level);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

std::vector<double> StepProfile::jump_locations() const {
    std::vector<double> v;
    for (auto it = neg_.rbegin(); it != neg_.rend(); ++it) v.push_back(it->loc);
    for (const auto& j : pos_) v.push_back(j.loc);
    return v;
}

double Staircase::operator()(double x) const {
    auto it = std::lower_bound(breaks.begin(), breaks.end(), x);
    const auto i = static_cast<std::size_t>(it - breaks.begin());
    if (it != breaks.end() && *it == x) return points[i];
    return cells[i];
}

double Staircase::sup_on(double l, double r) const {
    require(l <= r, "sup_on: empty interval");
    double v = std::max((*this)(l), (*this)(r));
    if (l == r) return v;
    const auto lo = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), l) - breaks.begin());
    const auto hi = static_cast<std::size_t>(std::lower_bound(breaks.begin(), breaks.end(), r) - breaks.begin());
    for (std::size_t c = lo; c <= hi; ++c) v = std::max(v, cells[c]);
    for (std::size_t b = lo; b < hi; ++b) v = std::max(v, points[b]);
    return v;
}

double Staircase::inf_on(double l, double r) const {
    require(l <= r, "inf_on: empty interval");
    double v = std::min((*this)(l), (*this)(r));
    if (l == r) return v;
    const auto lo = static_cast<std::size_t>(std::upper_bound(breaks.begin(), breaks.end(), l) - breaks.begin());
    const auto hi = static_cast<std::size_t>(std::lower_bound(breaks.begin(), breaks.end(), r) - breaks.begin());
    for (std::size_t c = lo; c <= hi; ++c) v = std::min(v, cells[c]);
    for (std::size_t b = lo; b < hi; ++b) v = std::min(v, points[b]);
    return v;
}

Staircase Staircase::simplified() const {
    Staircase s;
    s.cells.push_back(cells[0]);
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        if (points[i] == s.cells.back() && cells[i + 1] == s.cells.back()) continue;
        s.breaks.push_back(breaks[i]);
        s.points.push_back(points[i]);
        s.cells.push_back(cells[i + 1]);
    }
    return s;
}

Staircase to_staircase(const StepProfile& f) {
    Staircase s;
    s.breaks = f.jump_locations();
    const std::size_t n = s.breaks.size();
    s.cells.resize(n + 1);
    s.points.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.points[i] = f(s.breaks[i]);
    s.cells[0] = s.breaks[0] < 0 ? f(s.breaks[0]) : 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double a = s.breaks[k - 1], b = s.breaks[k];
        s.cells[k] = a > 0 ? f(a) : (b < 0 ? f(b) : 0.0);
    }
    s.cells[n] = f(s.breaks[n - 1]);
    return s;
}

std::optional<StepProfile> to_step_profile(const Staircase& s0, bool strict) {
    const Staircase s = s0.simplified();
    if (s(0.0) != 0.0) return std::nullopt;
    const auto zero_cell = static_cast<std::size_t>(std::upper_bound(s.breaks.begin(), s.breaks.end(), 0.0) - s.breaks.begin());
    const auto zero_cell_left = static_cast<std::size_t>(std::lower_bound(s.breaks.begin(), s.breaks.end(), 0.0) - s.breaks.begin());
    if (s.cells[zero_cell] != 0.0 || s.cells[zero_cell_left] != 0.0) return std::nullopt;
    std::vector<Jump> pos, neg;
    double prev = 0.0;
    for (std::size_t i = 0; i < s.breaks.size(); ++i) {
        if (s.breaks[i] <= 0) continue;
        const double right = s.cells[i + 1];
        if (right < prev) return std::nullopt;
        if (strict && s.points[i] != right) return std::nullopt;
        if (right > prev) pos.push_back({s.breaks[i], right});
        prev = right;
    }
    prev = 0.0;
    for (std::size_t i = s.breaks.size(); i-- > 0;) {
        if (s.breaks[i] >= 0) continue;
        const double left = s.cells[i];
        if (left < prev) return std::nullopt;
        if (strict && s.points[i] != left) return std::nullopt;
        if (left > prev) neg.push_back({s.breaks[i], left});
        prev = left;
    }
    if (pos.empty()) return std::nullopt;
    const double xi = pos.back().level;
    for (const auto& j : neg)
        if (j.level > xi) return std::nullopt;
    return StepProfile(xi, std::move(pos), std::move(neg));
}

StepProfile rescale(const StepProfile& f) {
    const double xi = f.xi(), s = std::sqrt(xi);
    std::vector<Jump> pos, neg;
    for (const auto& j : f.pos()) pos.push_back({j.loc / s, j.level / xi});
    for (const auto& j : f.neg()) neg.push_back({j.loc / s, j.level / xi});
    pos.back().level = 1.0;
    return StepProfile(1.0, std::move(pos), std::move(neg));
}

StepProfile unrescale(const StepProfile& f, double xi) {
    require(xi > 0 && std::isfinite(xi), "unrescale: xi must be positive");
    const double s = std::sqrt(xi), scale = xi / f.xi();
    std::vector<Jump> pos, neg;
    for (const auto& j : f.pos()) pos.push_back({j.loc * s, j.level * scale});
    for (const auto& j : f.neg()) neg.push_back({j.loc * s, j.level * scale});
    pos.back().level = xi;
    return StepProfile(xi, std::move(pos), std::move(neg));
}

Staircase perturb(const StepProfile& f, double eps, PerturbSign sign) {
    require(eps > 0 && std::isfinite(eps), "perturb: eps must be positive");
    const Staircase st = to_staircase(f);
    const auto& b = st.breaks;
    const std::size_t n = b.size();
    std::vector<double> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = b[i] - eps;
        hi[i] = b[i] + eps;
    }
    Staircase out;
    out.breaks = lo;
    out.breaks.insert(out.breaks.end(), hi.begin(), hi.end());
    std::sort(out.breaks.begin(), out.breaks.end());
    out.breaks.erase(std::unique(out.breaks.begin(), out.breaks.end()), out.breaks.end());
    const bool plus = sign == PerturbSign::plus;
    auto fold = [plus](double acc, double v) { return plus ? std::max(acc, v) : std::min(acc, v); };
    const double init = plus ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    const double ninf = -std::numeric_limits<double>::infinity(), pinf = std::numeric_limits<double>::infinity();
    // cell j of f is (b[j-1], b[j]); its eps-window set is the open interval (b[j-1]-eps, b[j]+eps)
    auto cell_lo = [&](std::size_t j) { return j == 0 ? ninf : lo[j - 1]; };
    auto cell_hi = [&](std::size_t j) { return j == n ? pinf : hi[j]; };
    const std::size_t m = out.breaks.size();
    out.cells.resize(m + 1);
    out.points.resize(m);
    for (std::size_t k = 0; k <= m; ++k) {
        const double cl = k == 0 ? ninf : out.breaks[k - 1], ch = k == m ? pinf : out.breaks[k];
        double v = init;
        for (std::size_t j = 0; j <= n; ++j)
            if (cell_lo(j) <= cl && ch <= cell_hi(j)) v = fold(v, st.cells[j]);
        for (std::size_t i = 0; i < n; ++i)
            if (lo[i] <= cl && ch <= hi[i]) v = fold(v, st.points[i]);
        out.cells[k] = v;
    }
    for (std::size_t k = 0; k < m; ++k) {
        const double c = out.breaks[k];
        double v = init;
        for (std::size_t j = 0; j <= n; ++j)
            if (cell_lo(j) < c && c < cell_hi(j)) v = fold(v, st.cells[j]);
        for (std::size_t i = 0; i < n; ++i)
            if (lo[i] <= c && c <= hi[i]) v = fold(v, st.points[i]);
        out.points[k] = v;
    }
    return out.simplified();
}

StepProfile perturb_minus(const StepProfile& f, double eps) {
    auto g = to_step_profile(perturb(f, eps, PerturbSign::minus), true);
    check_invariant(g.has_value(), "f^{-,eps} left the step-profile class");
    return *g;
}

StepProfile from_empirical(const PassageProfile& p) {
    require(p.u.size() == p.f.size() && !p.u.empty(), "from_empirical: empty or ragged profile");
    std::vector<std::size_t> order(p.u.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p.u[a] < p.u[b]; });
    std::vector<Jump> pos, neg;
    double prev = 0.0, last_u = 0.0;
    for (std::size_t i : order) {
        const double u = p.u[i], v = p.f[i];
        require(std::isfinite(u) && std::isfinite(v) && v >= 0, "from_empirical: bad sample");
        if (u == 0) require(v == 0, "from_empirical: profile must vanish at 0");
        if (u <= 0) continue;
        if (v < prev) throw DomainError("from_empirical: profile decreases on the positive side");
        if (v > prev) pos.push_back({u, v});
        prev = v;
        last_u = u;
    }
    prev = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const double u = p.u[*it], v = p.f[*it];
        if (u >= 0) continue;
        if (v < prev) throw DomainError("from_empirical: profile increases toward 0 on the negative side");
        if (v > prev) neg.push_back({u, v});
        prev = v;
    }
    if (pos.empty() && neg.empty()) throw DomainError("from_empirical: profile is identically zero");
    const double neg_max = neg.empty() ? 0.0 : neg.back().level;
    const double pos_max = pos.empty() ? 0.0 : pos.back().level;
    if (neg_max > pos_max) {
        // the sup must be reached on the right: one more grid step past the window
        const double step = p.n > 0 ? 1.0 / std::sqrt(p.n) : 1.0;
        pos.push_back({std::max(last_u, 0.0) + step, neg_max});
    }
    const double xi = std::max(neg_max, pos_max);
    return StepProfile(xi, std::move(pos), std::move(neg));
}

nlohmann::json to_json(const StepProfile& f) {
    auto pj = nlohmann::json::array(), nj = nlohmann::json::array();
    for (const auto& j : f.pos()) pj.push_back({j.loc, j.level});
    for (const auto& j : f.neg()) nj.push_back({j.loc, j.level});
    return {{"xi", f.xi()}, {"pos_jumps", pj}, {"neg_jumps", nj}};
}

StepProfile profile_from_json(const nlohmann::json& j) {
    std::vector<Jump> pos, neg;
    double xi = 0;
    try {
        for (const auto& [k, v] : j.items())
            if (k != "xi" && k != "pos_jumps" && k != "neg_jumps") throw DomainError("profile JSON: unknown key " + k);
        xi = j.at("xi").get<double>();
        for (const auto& e : j.at("pos_jumps")) pos.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
        if (j.contains("neg_jumps"))
            for (const auto& e : j.at("neg_jumps")) neg.push_back({e.at(0).get<double>(), e.at(1).get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed profile JSON: ") + e.what());
    }
    return StepProfile(xi, std::move(pos), std::move(neg));
}

}  // namespace frogld
