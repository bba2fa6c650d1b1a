#include "frogld/cover/cover.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frogld/core/error.hpp"

namespace frogld {

int block_exponent(std::int64_t n, LogBase base) {
    require(n >= 16, "block exponent needs n >= 16");
    const double inner = base == LogBase::natural ? std::log(static_cast<double>(n)) : std::log2(static_cast<double>(n));
    return static_cast<int>(std::ceil(2.0 * std::log2(inner)));
}

BlockClassification classify_blocks(const PassageOracle& oracle, std::int64_t n, LogBase base) {
    BlockClassification out;
    out.N = block_exponent(n, base);
    const std::int64_t B = std::int64_t{1} << out.N;
    if (oracle.window_hi() < n) throw DomainError("classify_blocks: oracle window too small");
    for (std::int64_t i = 0; i + B <= n; i += B) (oracle.passage(i, B) > B * B ? out.red : out.blue).push_back(i);
    return out;
}

namespace {
struct Closed {
    std::int64_t a, b;
};

bool in_open(std::int64_t x, const CoverPiece& p) { return x > p.x - p.scale && x < p.x + p.scale; }

std::vector<Closed> merged(std::vector<Closed> v) {
    std::sort(v.begin(), v.end(), [](const Closed& l, const Closed& r) { return l.a < r.a; });
    std::vector<Closed> out;
    for (const auto& c : v) {
        if (!out.empty() && c.a <= out.back().b)
            out.back().b = std::max(out.back().b, c.b);
        else
            out.push_back(c);
    }
    return out;
}
}  // namespace

IntervalCover dyadic_cover(const PassageOracle& oracle, std::int64_t n, const CoverOptions& opt) {
    IntervalCover c;
    c.n = n;
    auto blocks = classify_blocks(oracle, n, opt.base);
    c.N = blocks.N;
    c.red_blocks = std::move(blocks.red);
    c.blue_blocks = std::move(blocks.blue);
    c.k_max = opt.k_max >= 0 ? opt.k_max : static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - 1;
    c.k_min = opt.min_scale >= 0 ? opt.min_scale : c.N;
    require(c.k_max < 62, "dyadic_cover: k_max too large");
    if (c.k_min > c.k_max) return c;
    if (oracle.window_hi() < n + (std::int64_t{1} << c.k_max))
        throw DomainError("dyadic_cover: oracle window must reach n + 2^k_max");

    // bad[k - k_min]: every x in [0, n] with T(x, x + 2^k) >= 4^k, increasing
    std::vector<std::vector<std::int64_t>> bad(static_cast<std::size_t>(c.k_max - c.k_min + 1));
    for (int k = c.k_min; k <= c.k_max; ++k) {
        const std::int64_t L = std::int64_t{1} << k;
        for (std::int64_t x = 0; x <= n; ++x)
            if (oracle.passage(x, L) >= L * L) bad[static_cast<std::size_t>(k - c.k_min)].push_back(x);
    }
    for (;;) {
        bool found = false;
        CoverPiece p{};
        for (int k = c.k_max; k >= c.k_min && !found; --k) {
            for (std::int64_t x : bad[static_cast<std::size_t>(k - c.k_min)]) {
                bool covered = false;
                for (const auto& q : c.pieces) covered = covered || in_open(x, q);
                if (covered) continue;
                p.x = x;
                p.k = k;
                p.scale = std::int64_t{1} << k;
                found = true;
                break;
            }
        }
        if (!found) break;
        std::vector<Closed> parts{{p.x - p.scale, p.x + p.scale}};
        for (const auto& q : c.pieces) {
            const std::int64_t a = q.x - q.scale, b = q.x + q.scale;
            std::vector<Closed> next;
            for (const auto& r : parts) {
                if (r.a <= std::min(r.b, a)) next.push_back({r.a, std::min(r.b, a)});
                if (std::max(r.a, b) <= r.b) next.push_back({std::max(r.a, b), r.b});
            }
            parts = std::move(next);
        }
        std::sort(parts.begin(), parts.end(), [](const Closed& l, const Closed& r) { return l.a < r.a; });
        check_invariant(merged(parts).size() == 1, "dyadic_cover: new piece is not an interval");
        p.S = std::max<std::int64_t>(parts.front().a, 0);
        p.T = parts.back().b;
        check_invariant(p.S <= p.x && p.x <= p.T, "dyadic_cover: focal point outside its piece");
        c.pieces.push_back(p);
    }
    return c;
}

CheckResult validate_cover(const IntervalCover& c, const PassageOracle& oracle) {
    CheckResult r;
    const std::int64_t B = std::int64_t{1} << c.N;
    if (c.k_min <= c.N && c.N <= c.k_max) {
        std::vector<Closed> u;
        for (const auto& p : c.pieces) u.push_back({p.S, p.T + p.scale});
        const auto m = merged(u);
        for (std::int64_t i : c.red_blocks) {
            bool in = false;
            for (const auto& s : m) in = in || (s.a <= i && i + B <= s.b);
            if (!in) r.fail("red block " + std::to_string(i) + " not covered");
        }
    }
    for (std::size_t j = 0; j < c.pieces.size(); ++j) {
        const auto& p = c.pieces[j];
        if (j > 0 && p.scale > c.pieces[j - 1].scale) r.fail("radii increase at piece " + std::to_string(j));
        if (!(0 <= p.S && p.S <= p.x && p.x <= p.T && p.x <= c.n)) r.fail("bad piece bounds at " + std::to_string(j));
        if (p.T - p.S > 2 * p.scale) r.fail("piece wider than 2L at " + std::to_string(j));
        if (p.k + 2 <= c.k_max) {
            const std::int64_t t = oracle.passage(p.S, p.T + p.scale - p.S);
            if (t > 16 * p.scale * p.scale) r.fail("T(S,T+L) > 16 L^2 at piece " + std::to_string(j));
        }
        for (std::size_t i = 0; i < j; ++i) {
            const auto& q = c.pieces[i];
            if (3 * std::llabs(p.x - q.x) < p.scale + q.scale)
                r.fail("thirds overlap: pieces " + std::to_string(i) + "," + std::to_string(j));
        }
    }
    return r;
}

nlohmann::json to_json(const IntervalCover& c) {
    auto pieces = nlohmann::json::array();
    for (const auto& p : c.pieces) pieces.push_back({{"x", p.x}, {"k", p.k}, {"L", p.scale}, {"S", p.S}, {"T", p.T}});
    return {{"n", c.n},         {"N", c.N},
            {"k_min", c.k_min}, {"k_max", c.k_max},
            {"red_blocks", c.red_blocks}, {"blue_blocks", c.blue_blocks},
            {"pieces", pieces}, {"ell", c.ell()}};
}

IntervalCover cover_from_json(const nlohmann::json& j) {
    IntervalCover c;
    try {
        c.n = j.at("n").get<std::int64_t>();
        c.N = j.at("N").get<int>();
        c.k_min = j.at("k_min").get<int>();
        c.k_max = j.at("k_max").get<int>();
        c.red_blocks = j.at("red_blocks").get<std::vector<std::int64_t>>();
        c.blue_blocks = j.at("blue_blocks").get<std::vector<std::int64_t>>();
        for (const auto& p : j.at("pieces"))
            c.pieces.push_back({p.at("x").get<std::int64_t>(), p.at("k").get<int>(), p.at("L").get<std::int64_t>(),
                                p.at("S").get<std::int64_t>(), p.at("T").get<std::int64_t>()});
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed cover JSON: ") + e.what());
    }
    return c;
}

std::string cover_csv(const IntervalCover& c) {
    std::ostringstream os;
    os << "kind,index,start,end,x,scale\n";
    const std::int64_t B = std::int64_t{1} << c.N;
    std::size_t i = 0;
    for (auto b : c.red_blocks) os << "red," << i++ << ',' << b << ',' << b + B << ",," << B << '\n';
    i = 0;
    for (auto b : c.blue_blocks) os << "blue," << i++ << ',' << b << ',' << b + B << ",," << B << '\n';
    i = 0;
    for (const auto& p : c.pieces) os << "piece," << i++ << ',' << p.S << ',' << p.T << ',' << p.x << ',' << p.scale << '\n';
    return os.str();
}

}  // namespace frogld
