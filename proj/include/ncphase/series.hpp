#pragma once

#include "ncphase/context.hpp"
#include "ncphase/gauss.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ncphase {

inline constexpr int kMaxVars = 32;
inline constexpr int kMaxBanks = 4;
inline constexpr int kNoCap = 255;

using Exponents = std::array<std::uint8_t, kMaxVars>;

/// Raised when a formal operation leaves its domain (nonzero constant term
/// under composition, non-invertible linear part, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Truncation caps. Every cap describes an ideal that is closed under the
/// commutative product, so truncated arithmetic is exact modulo that ideal.
/// `xdeg` is not a truncation: exceeding it raises.
struct Truncation {
    int par = kNoCap;                        // total degree in parameters
    int mom = kNoCap;                        // total degree over all momentum banks
    std::array<int, kMaxBanks> bank{kNoCap, kNoCap, kNoCap, kNoCap};
    int xdeg = kNoCap;

    static Truncation momentum(int order, int par_cap) { return Truncation{par_cap, order, {kNoCap, kNoCap, kNoCap, kNoCap}, kNoCap}; }
    static Truncation parameters(int par_cap, int x_cap) { return Truncation{par_cap, kNoCap, {kNoCap, kNoCap, kNoCap, kNoCap}, x_cap}; }

    friend Truncation min(const Truncation& a, const Truncation& b)
    {
        Truncation t;
        t.par = std::min(a.par, b.par);
        t.mom = std::min(a.mom, b.mom);
        for (int i = 0; i < kMaxBanks; ++i) t.bank[static_cast<std::size_t>(i)] = std::min(a.bank[static_cast<std::size_t>(i)], b.bank[static_cast<std::size_t>(i)]);
        t.xdeg = std::min(a.xdeg, b.xdeg);
        return t;
    }
    friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// Variable layout: parameters, then `banks` momentum banks of `dim`
/// variables each, then `xbanks` coordinate banks.
struct Layout {
    int banks = 1;
    int xbanks = 0;
    friend bool operator==(const Layout&, const Layout&) = default;
};

/// Exact truncated multivariate power series with Gaussian-rational
/// coefficients. Parameters and momenta share one flat monomial; the
/// parameter part plays the role of a ParamPoly coefficient.
class Series {
public:
    using Terms = std::map<Exponents, Gauss>;

    Series() = default;
    Series(ContextPtr ctx, Layout layout, Truncation trunc) : ctx_(std::move(ctx)), layout_(layout), trunc_(trunc)
    {
        if (!ctx_) throw std::invalid_argument("series without context");
        if (layout_.banks < 0 || layout_.banks > kMaxBanks || layout_.xbanks < 0 || layout_.xbanks > kMaxBanks)
            throw std::invalid_argument("unsupported bank count");
        if (num_vars() > kMaxVars) throw std::invalid_argument("too many variables for monomial storage");
    }

    static Series zero(ContextPtr ctx, Layout layout, Truncation trunc) { return Series(std::move(ctx), layout, trunc); }
    static Series constant(ContextPtr ctx, Layout layout, Truncation trunc, const Gauss& c)
    {
        Series s(std::move(ctx), layout, trunc);
        s.add_term(Exponents{}, c);
        return s;
    }
    /// Same context, layout and truncation as `like`.
    static Series zero_like(const Series& like) { return Series(like.ctx_, like.layout_, like.trunc_); }
    static Series constant_like(const Series& like, const Gauss& c)
    {
        Series s = zero_like(like);
        s.add_term(Exponents{}, c);
        return s;
    }
    Series param(int idx) const { return monomial_like(param_var(idx)); }
    Series param(const std::string& name) const { return param(ctx_->param(name)); }
    Series mom(int bank, int mu) const { return monomial_like(mom_var(bank, mu)); }
    Series coord(int xbank, int mu) const { return monomial_like(x_var(xbank, mu)); }
    Series one() const { return constant_like(*this, Gauss(1)); }
    Series zero() const { return zero_like(*this); }
    Series scalar(const Gauss& c) const { return constant_like(*this, c); }

    // --- layout -----------------------------------------------------------
    const ContextPtr& context() const { return ctx_; }
    const Context& ctx() const { return *ctx_; }
    int dim() const { return ctx_->dim(); }
    const Layout& layout() const { return layout_; }
    const Truncation& trunc() const { return trunc_; }
    const Terms& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    int num_params() const { return ctx_->num_params(); }
    int num_vars() const { return num_params() + (layout_.banks + layout_.xbanks) * ctx_->dim(); }
    int param_var(int i) const { return i; }
    int mom_var(int bank, int mu) const { return num_params() + bank * dim() + mu; }
    int x_var(int xbank, int mu) const { return num_params() + (layout_.banks + xbank) * dim() + mu; }

    Series monomial_like(int var, int power = 1) const
    {
        Exponents e{};
        e[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(power);
        Series s = zero_like(*this);
        s.add_term(e, Gauss(1));
        return s;
    }

    // --- degrees ----------------------------------------------------------
    int par_degree(const Exponents& e) const
    {
        int d = 0;
        for (int i = 0; i < num_params(); ++i) d += e[static_cast<std::size_t>(i)];
        return d;
    }
    int bank_degree(const Exponents& e, int bank) const
    {
        int d = 0;
        const int base = mom_var(bank, 0);
        for (int i = 0; i < dim(); ++i) d += e[static_cast<std::size_t>(base + i)];
        return d;
    }
    int mom_degree(const Exponents& e) const
    {
        int d = 0;
        for (int b = 0; b < layout_.banks; ++b) d += bank_degree(e, b);
        return d;
    }
    int x_degree(const Exponents& e) const
    {
        int d = 0;
        for (int s = 0; s < layout_.xbanks; ++s) {
            const int base = x_var(s, 0);
            for (int i = 0; i < dim(); ++i) d += e[static_cast<std::size_t>(base + i)];
        }
        return d;
    }
    int xbank_degree(const Exponents& e, int xbank) const
    {
        int d = 0;
        const int base = x_var(xbank, 0);
        for (int i = 0; i < dim(); ++i) d += e[static_cast<std::size_t>(base + i)];
        return d;
    }
    bool within_caps(const Exponents& e) const
    {
        if (trunc_.par < kNoCap && par_degree(e) > trunc_.par) return false;
        if (trunc_.mom < kNoCap && mom_degree(e) > trunc_.mom) return false;
        for (int b = 0; b < layout_.banks; ++b)
            if (trunc_.bank[static_cast<std::size_t>(b)] < kNoCap && bank_degree(e, b) > trunc_.bank[static_cast<std::size_t>(b)]) return false;
        return true;
    }

    // --- mutation ---------------------------------------------------------
    /// Adds c * monomial, dropping it if beyond the caps and applying the
    /// null-vector rewrite when the context carries one.
    void add_term(const Exponents& e, const Gauss& c)
    {
        if (c.is_zero()) return;
        if (!within_caps(e)) return;
        if (trunc_.xdeg < kNoCap && layout_.xbanks > 0 && x_degree(e) > trunc_.xdeg)
            throw DomainError("coordinate degree cap exceeded (" + std::to_string(trunc_.xdeg) + ")");
        const auto& nc = ctx_->null_constraint();
        if (nc && e[static_cast<std::size_t>(nc->pivot)] >= 2) {
            for (const auto& [j, coeff] : nc->rest) {
                Exponents r = e;
                r[static_cast<std::size_t>(nc->pivot)] = static_cast<std::uint8_t>(r[static_cast<std::size_t>(nc->pivot)] - 2);
                r[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(r[static_cast<std::size_t>(j)] + 2);
                add_term(r, c * Gauss(coeff));
            }
            return;
        }
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Gauss coeff(const Exponents& e) const
    {
        auto it = terms_.find(e);
        return it == terms_.end() ? Gauss(0) : it->second;
    }

    /// Re-truncate to tighter (or looser, if the caller vouches for it) caps.
    Series with_trunc(const Truncation& t) const
    {
        Series s(ctx_, layout_, t);
        for (const auto& [e, c] : terms_) s.add_term(e, c);
        return s;
    }

    // --- arithmetic -------------------------------------------------------
    void check_compatible(const Series& o) const
    {
        if (!ctx_ || !o.ctx_) throw IncompatibleSeries("uninitialised series");
        if (!(layout_ == o.layout_)) throw IncompatibleSeries("series live in different bank layouts");
        if (!ctx_->same_as(*o.ctx_)) throw IncompatibleSeries("series use different parameter tables");
    }

    Series& operator+=(const Series& o)
    {
        check_compatible(o);
        tighten(o.trunc_);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Series& operator-=(const Series& o)
    {
        check_compatible(o);
        tighten(o.trunc_);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Series& operator*=(const Gauss& c)
    {
        if (c.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [e, v] : terms_) v *= c;
        return *this;
    }
    Series operator-() const
    {
        Series s = *this;
        for (auto& [e, v] : s.terms_) v = -v;
        return s;
    }
    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, const Gauss& c) { return a *= c; }
    friend Series operator*(const Gauss& c, Series a) { return a *= c; }
    friend Series operator*(const Series& a, const Series& b) { return mul(a, b); }
    Series& operator*=(const Series& o) { return *this = mul(*this, o); }

    /// Commutative truncated product.
    friend Series mul(const Series& a, const Series& b)
    {
        a.check_compatible(b);
        Series r(a.ctx_, a.layout_, min(a.trunc_, b.trunc_));
        if (a.is_zero() || b.is_zero()) return r;
        struct Entry {
            const Exponents* e;
            const Gauss* c;
            int pdeg;
            int mdeg;
        };
        auto index = [&](const Series& s) {
            std::vector<Entry> v;
            v.reserve(s.terms_.size());
            for (const auto& [e, c] : s.terms_) v.push_back({&e, &c, r.par_degree(e), r.mom_degree(e)});
            std::stable_sort(v.begin(), v.end(), [](const Entry& x, const Entry& y) { return x.mdeg + x.pdeg < y.mdeg + y.pdeg; });
            return v;
        };
        const auto va = index(a);
        const auto vb = index(b);
        const int pcap = r.trunc_.par;
        const int mcap = r.trunc_.mom;
        const int n = r.num_vars();
        for (const auto& x : va) {
            for (const auto& y : vb) {
                if (pcap < kNoCap && mcap < kNoCap && x.pdeg + x.mdeg + y.pdeg + y.mdeg > pcap + mcap) break;
                if (pcap < kNoCap && x.pdeg + y.pdeg > pcap) continue;
                if (mcap < kNoCap && x.mdeg + y.mdeg > mcap) continue;
                Exponents e;
                for (int i = 0; i < n; ++i) {
                    const int s = (*x.e)[static_cast<std::size_t>(i)] + (*y.e)[static_cast<std::size_t>(i)];
                    if (s > 255) throw DomainError("exponent overflow");
                    e[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(s);
                }
                for (int i = n; i < kMaxVars; ++i) e[static_cast<std::size_t>(i)] = 0;
                r.add_term(e, *x.c * *y.c);
            }
        }
        return r;
    }

    Series pow(unsigned e) const
    {
        Series r = one();
        for (unsigned k = 0; k < e; ++k) r = r * *this;
        return r;
    }

    /// Multiply by a single monomial (exponent shift).
    Series shifted(const Exponents& m, const Gauss& c = Gauss(1)) const
    {
        Series r = zero_like(*this);
        for (const auto& [e, v] : terms_) {
            Exponents s;
            for (int i = 0; i < kMaxVars; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(e[static_cast<std::size_t>(i)] + m[static_cast<std::size_t>(i)]);
            r.add_term(s, v * c);
        }
        return r;
    }

    // --- calculus and selection --------------------------------------------
    Series derivative(int var) const
    {
        Series r = zero_like(*this);
        for (const auto& [e, c] : terms_) {
            const int k = e[static_cast<std::size_t>(var)];
            if (k == 0) continue;
            Exponents d = e;
            d[static_cast<std::size_t>(var)] = static_cast<std::uint8_t>(k - 1);
            r.add_term(d, c * Gauss(k));
        }
        return r;
    }

    /// Terms whose degree in momentum bank `bank` equals `deg`.
    Series bank_part(int bank, int deg) const
    {
        Series r = zero_like(*this);
        for (const auto& [e, c] : terms_)
            if (bank_degree(e, bank) == deg) r.add_term(e, c);
        return r;
    }
    Series filter(const std::function<bool(const Exponents&)>& keep) const
    {
        Series r = zero_like(*this);
        for (const auto& [e, c] : terms_)
            if (keep(e)) r.add_term(e, c);
        return r;
    }
    /// Set every variable of momentum bank `bank` to zero.
    Series bank_to_zero(int bank) const
    {
        return filter([&](const Exponents& e) { return bank_degree(e, bank) == 0; });
    }
    /// Set every coordinate of x-bank `xbank` to zero.
    Series xbank_to_zero(int xbank) const
    {
        return filter([&](const Exponents& e) { return xbank_degree(e, xbank) == 0; });
    }
    /// Part with zero degree in all momenta and coordinates (a ParamPoly).
    Series param_part() const
    {
        return filter([&](const Exponents& e) { return mom_degree(e) == 0 && x_degree(e) == 0; });
    }
    bool is_param_only() const
    {
        for (const auto& [e, c] : terms_)
            if (mom_degree(e) != 0 || x_degree(e) != 0) return false;
        return true;
    }
    Gauss constant_term() const { return coeff(Exponents{}); }

    /// Move into another layout. `bank_map[b]` is the target bank of source
    /// bank b (or -1 to require it to be absent); same for `xbank_map`.
    Series embed(Layout target, const std::vector<int>& bank_map, const std::vector<int>& xbank_map = {},
                 std::optional<Truncation> trunc = std::nullopt) const
    {
        Series r(ctx_, target, trunc.value_or(trunc_));
        const int np = num_params();
        const int d = dim();
        for (const auto& [e, c] : terms_) {
            Exponents t{};
            for (int i = 0; i < np; ++i) t[static_cast<std::size_t>(i)] = e[static_cast<std::size_t>(i)];
            for (int b = 0; b < layout_.banks; ++b) {
                const int tb = b < static_cast<int>(bank_map.size()) ? bank_map[static_cast<std::size_t>(b)] : -1;
                for (int mu = 0; mu < d; ++mu) {
                    const auto v = e[static_cast<std::size_t>(mom_var(b, mu))];
                    if (v == 0) continue;
                    if (tb < 0) throw IncompatibleSeries("embedding drops a populated momentum bank");
                    auto& slot = t[static_cast<std::size_t>(r.mom_var(tb, mu))];
                    slot = static_cast<std::uint8_t>(slot + v);
                }
            }
            for (int s = 0; s < layout_.xbanks; ++s) {
                const int ts = s < static_cast<int>(xbank_map.size()) ? xbank_map[static_cast<std::size_t>(s)] : -1;
                for (int mu = 0; mu < d; ++mu) {
                    const auto v = e[static_cast<std::size_t>(x_var(s, mu))];
                    if (v == 0) continue;
                    if (ts < 0) throw IncompatibleSeries("embedding drops a populated coordinate bank");
                    auto& slot = t[static_cast<std::size_t>(r.x_var(ts, mu))];
                    slot = static_cast<std::uint8_t>(slot + v);
                }
            }
            r.add_term(t, c);
        }
        return r;
    }

    friend bool operator==(const Series& a, const Series& b) { return a.layout_ == b.layout_ && a.terms_ == b.terms_; }
    friend bool operator!=(const Series& a, const Series& b) { return !(a == b); }

    // --- printing ---------------------------------------------------------
    /// Canonical order: total momentum degree, then bank exponents
    /// (graded-lex over banks), then coordinates, then parameters.
    bool canonical_less(const Exponents& a, const Exponents& b) const
    {
        const int ma = mom_degree(a), mb = mom_degree(b);
        if (ma != mb) return ma < mb;
        for (int b2 = 0; b2 < layout_.banks; ++b2) {
            const int da = bank_degree(a, b2), db = bank_degree(b, b2);
            if (da != db) return da > db;
        }
        for (int v = mom_var(0, 0); v < mom_var(0, 0) + layout_.banks * dim(); ++v)
            if (a[static_cast<std::size_t>(v)] != b[static_cast<std::size_t>(v)]) return a[static_cast<std::size_t>(v)] > b[static_cast<std::size_t>(v)];
        const int xa = x_degree(a), xb = x_degree(b);
        if (xa != xb) return xa < xb;
        for (int v = x_var(0, 0); v < num_vars() && layout_.xbanks > 0; ++v)
            if (a[static_cast<std::size_t>(v)] != b[static_cast<std::size_t>(v)]) return a[static_cast<std::size_t>(v)] > b[static_cast<std::size_t>(v)];
        const int pa = par_degree(a), pb = par_degree(b);
        if (pa != pb) return pa < pb;
        for (int v = 0; v < num_params(); ++v)
            if (a[static_cast<std::size_t>(v)] != b[static_cast<std::size_t>(v)]) return a[static_cast<std::size_t>(v)] > b[static_cast<std::size_t>(v)];
        return false;
    }

    std::vector<std::pair<Exponents, Gauss>> canonical_terms() const
    {
        std::vector<std::pair<Exponents, Gauss>> v(terms_.begin(), terms_.end());
        std::sort(v.begin(), v.end(), [this](const auto& x, const auto& y) { return canonical_less(x.first, y.first); });
        return v;
    }

    std::vector<std::string> default_bank_names() const
    {
        switch (layout_.banks) {
        case 0: return {};
        case 1: return {"p"};
        case 2: return layout_.xbanks == 2 ? std::vector<std::string>{"p1", "p2"} : std::vector<std::string>{"k", "q"};
        case 3: return {"k1", "k2", "k3"};
        default: return {"k1", "k2", "k3", "k4"};
        }
    }
    std::vector<std::string> default_xbank_names() const
    {
        if (layout_.xbanks == 1) return {"x"};
        std::vector<std::string> v;
        for (int s = 0; s < layout_.xbanks; ++s) v.push_back("x" + std::to_string(s + 1));
        return v;
    }

    std::string monomial_str(const Exponents& e, const std::vector<std::string>& banks = {}, const std::vector<std::string>& xbanks = {}) const
    {
        const auto bn = banks.empty() ? default_bank_names() : banks;
        const auto xn = xbanks.empty() ? default_xbank_names() : xbanks;
        std::string out;
        auto emit = [&](const std::string& name, int p) {
            if (p == 0) return;
            if (!out.empty()) out += "*";
            out += name;
            if (p > 1) out += "^" + std::to_string(p);
        };
        for (int i = 0; i < num_params(); ++i) emit(ctx_->param_name(i), e[static_cast<std::size_t>(i)]);
        for (int s = 0; s < layout_.xbanks; ++s)
            for (int mu = 0; mu < dim(); ++mu) emit(xn[static_cast<std::size_t>(s)] + "_" + std::to_string(mu), e[static_cast<std::size_t>(x_var(s, mu))]);
        for (int b = 0; b < layout_.banks; ++b)
            for (int mu = 0; mu < dim(); ++mu) emit(bn[static_cast<std::size_t>(b)] + "_" + std::to_string(mu), e[static_cast<std::size_t>(mom_var(b, mu))]);
        return out.empty() ? "1" : out;
    }

    std::string str(const std::vector<std::string>& banks = {}, const std::vector<std::string>& xbanks = {}) const
    {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [e, c] : canonical_terms()) {
            const std::string mono = monomial_str(e, banks, xbanks);
            const bool unit = mono == "1";
            std::string piece;
            bool negative = false;
            if (c.is_real()) {
                Rational v = c.re();
                if (sgn(v) < 0) {
                    negative = true;
                    v = -v;
                }
                if (unit)
                    piece = v.get_str();
                else
                    piece = v == 1 ? mono : v.get_str() + "*" + mono;
            } else {
                const std::string cs = c.str();
                piece = unit ? cs : (cs == "i" ? "i*" + mono : cs == "-i" ? "-i*" + mono : cs + "*" + mono);
            }
            if (first)
                out += negative ? "-" + piece : piece;
            else
                out += negative ? " - " + piece : " + " + piece;
            first = false;
        }
        return out;
    }

private:
    void tighten(const Truncation& other)
    {
        const Truncation t = min(trunc_, other);
        if (t == trunc_) return;
        trunc_ = t;
        prune();
    }
    void prune()
    {
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (!within_caps(it->first))
                it = terms_.erase(it);
            else
                ++it;
        }
    }

    ContextPtr ctx_;
    Layout layout_;
    Truncation trunc_;
    Terms terms_;
};

using ParamPoly = Series;
using SeriesVec = std::vector<Series>;

/// First differing term of a - b in canonical order.
struct Discrepancy {
    Exponents monomial{};
    Gauss coeff;
    std::string monomial_text;
};

inline std::optional<Discrepancy> first_difference(const Series& a, const Series& b)
{
    const Series d = a - b;
    if (d.is_zero()) return std::nullopt;
    const auto t = d.canonical_terms();
    return Discrepancy{t.front().first, t.front().second, d.monomial_str(t.front().first)};
}

// --- composition --------------------------------------------------------

/// Substitution of the variables of one momentum bank by series g[mu]
/// sharing a layout. Each g[mu] must have positive momentum degree in every
/// term so the substitution stays exact under truncation. Powers of g are
/// memoized across calls.
class Substitution {
public:
    Substitution(int bank, SeriesVec g) : bank_(bank), g_(std::move(g))
    {
        if (g_.empty() || g_.size() > 8) throw std::invalid_argument("substitution supports 1 to 8 variables per bank");
        t_ = g_[0].trunc();
        for (const auto& gi : g_) {
            g_[0].check_compatible(gi);
            t_ = min(t_, gi.trunc());
            for (const auto& [e, c] : gi.terms())
                if (gi.mom_degree(e) == 0) throw DomainError("composition-domain error: substituted series has a term of zero momentum degree");
        }
        powers_.emplace(Key{}, Series::constant(g_[0].context(), g_[0].layout(), t_, Gauss(1)));
    }

    Series operator()(const Series& f)
    {
        const int n = f.dim();
        if (static_cast<int>(g_.size()) != n) throw std::invalid_argument("composition needs one series per bank variable");
        if (f.trunc().bank[static_cast<std::size_t>(bank_)] < kNoCap) throw DomainError("composition into a bank with a per-bank cap is not exact");
        f.check_compatible(g_[0]);
        Series r(f.context(), f.layout(), min(f.trunc(), t_));
        const int base = f.mom_var(bank_, 0);
        for (const auto& [e, c] : f.terms()) {
            Key k{};
            Exponents rest = e;
            for (int mu = 0; mu < n; ++mu) {
                k[static_cast<std::size_t>(mu)] = e[static_cast<std::size_t>(base + mu)];
                rest[static_cast<std::size_t>(base + mu)] = 0;
            }
            const Series& p = power(k);
            for (const auto& [pe, pc] : p.terms()) {
                Exponents s;
                for (int i = 0; i < kMaxVars; ++i) s[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(pe[static_cast<std::size_t>(i)] + rest[static_cast<std::size_t>(i)]);
                if (r.within_caps(s)) r.add_term(s, pc * c);
            }
        }
        return r;
    }

    SeriesVec operator()(const SeriesVec& f)
    {
        SeriesVec out;
        out.reserve(f.size());
        for (const auto& fi : f) out.push_back((*this)(fi));
        return out;
    }

private:
    using Key = std::array<std::uint8_t, 8>;

    const Series& power(const Key& k)
    {
        auto it = powers_.find(k);
        if (it != powers_.end()) return it->second;
        int j = 0;
        while (k[static_cast<std::size_t>(j)] == 0) ++j;
        Key prev = k;
        prev[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(prev[static_cast<std::size_t>(j)] - 1);
        Series v = mul(power(prev), g_[static_cast<std::size_t>(j)]);
        return powers_.emplace(k, std::move(v)).first->second;
    }

    int bank_;
    SeriesVec g_;
    Truncation t_;
    std::map<Key, Series> powers_;
};

/// f with the variables of momentum bank `bank` replaced by g.
inline Series compose(const Series& f, int bank, const SeriesVec& g) { return Substitution(bank, g)(f); }
inline SeriesVec compose(const SeriesVec& f, int bank, const SeriesVec& g) { return Substitution(bank, g)(f); }

/// Identity map k_mu on bank `bank`, in the layout of `like`.
inline SeriesVec identity_map(const Series& like, int bank = 0)
{
    SeriesVec v;
    for (int mu = 0; mu < like.dim(); ++mu) v.push_back(like.mom(bank, mu));
    return v;
}

// --- analytic functions --------------------------------------------------

enum class Fn { exp, log1p, sqrt1p, inv1p, expm1_over, log1p_over };

inline const char* fn_name(Fn f)
{
    switch (f) {
    case Fn::exp: return "exp";
    case Fn::log1p: return "log1p";
    case Fn::sqrt1p: return "sqrt1p";
    case Fn::inv1p: return "inv1p";
    case Fn::expm1_over: return "expm1_over";
    case Fn::log1p_over: return "log1p_over";
    }
    return "?";
}

/// Maclaurin coefficient of u^k.
inline Rational fn_coefficient(Fn f, unsigned k)
{
    switch (f) {
    case Fn::exp: return Rational(1) / factorial(k);
    case Fn::log1p:
        if (k == 0) return Rational(0);
        return Rational((k % 2 == 1) ? 1 : -1) / Rational(static_cast<long>(k));
    case Fn::sqrt1p: {
        // binom(1/2, k)
        Rational c(1);
        for (unsigned j = 0; j < k; ++j) c *= (Rational(1, 2) - Rational(static_cast<long>(j))) / Rational(static_cast<long>(j + 1));
        return c;
    }
    case Fn::inv1p: return Rational((k % 2 == 0) ? 1 : -1);
    case Fn::expm1_over: return Rational(1) / factorial(k + 1);
    case Fn::log1p_over: return Rational((k % 2 == 0) ? 1 : -1) / Rational(static_cast<long>(k + 1));
    }
    return Rational(0);
}

/// f(u) for u with zero constant term, expanded to the caps of u.
inline Series expand_fn(Fn f, const Series& u, int max_terms = 256)
{
    if (!u.constant_term().is_zero()) throw DomainError(std::string(fn_name(f)) + ": argument has a nonzero constant term");
    Series r = Series::constant_like(u, Gauss(fn_coefficient(f, 0)));
    Series p = u.one();
    for (unsigned k = 1;; ++k) {
        if (static_cast<int>(k) > max_terms) throw DomainError("series expansion does not terminate under the truncation caps");
        p = p * u;
        if (p.is_zero()) break;
        const Rational c = fn_coefficient(f, k);
        if (sgn(c) != 0) r += p * Gauss(c);
    }
    return r;
}

/// Gauss-Jordan inverse over Q[i]; nullopt when singular.
inline std::optional<std::vector<std::vector<Gauss>>> invert_matrix(std::vector<std::vector<Gauss>> m)
{
    const std::size_t n = m.size();
    std::vector<std::vector<Gauss>> inv(n, std::vector<Gauss>(n, Gauss(0)));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = Gauss(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col].is_zero()) ++piv;
        if (piv == n) return std::nullopt;
        std::swap(m[piv], m[col]);
        std::swap(inv[piv], inv[col]);
        const Gauss s = Gauss(1) / m[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            m[col][j] *= s;
            inv[col][j] *= s;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || m[r][col].is_zero()) continue;
            const Gauss f = m[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                m[r][j] -= f * m[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

/// Compositional inverse of a map on bank 0: revert(K)(K(k)) = k.
inline SeriesVec revert(const SeriesVec& K, int bank = 0)
{
    if (K.empty()) throw std::invalid_argument("revert of an empty map");
    const Series& like = K.front();
    const int n = like.dim();
    if (static_cast<int>(K.size()) != n) throw std::invalid_argument("revert needs a square map");
    for (const auto& ki : K)
        for (const auto& [e, c] : ki.terms())
            if (ki.mom_degree(e) == 0) throw DomainError("reversion error: map has a term of zero momentum degree");
    // linear part free of parameters
    std::vector<std::vector<Gauss>> lin(static_cast<std::size_t>(n), std::vector<Gauss>(static_cast<std::size_t>(n), Gauss(0)));
    for (int mu = 0; mu < n; ++mu)
        for (int nu = 0; nu < n; ++nu) {
            Exponents e{};
            e[static_cast<std::size_t>(like.mom_var(bank, nu))] = 1;
            lin[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)] = K[static_cast<std::size_t>(mu)].coeff(e);
        }
    auto inv = invert_matrix(lin);
    if (!inv) throw DomainError("reversion error: linear part is not invertible");
    auto apply_inv = [&](const SeriesVec& v) {
        SeriesVec out;
        for (int mu = 0; mu < n; ++mu) {
            Series s = Series::zero_like(like);
            for (int nu = 0; nu < n; ++nu) s += v[static_cast<std::size_t>(nu)] * (*inv)[static_cast<std::size_t>(mu)][static_cast<std::size_t>(nu)];
            out.push_back(std::move(s));
        }
        return out;
    };
    const SeriesVec L = apply_inv(K);  // L(k) = k + N(k)
    const SeriesVec id = identity_map(like, bank);
    SeriesVec nonlinear;
    for (int mu = 0; mu < n; ++mu) nonlinear.push_back(L[static_cast<std::size_t>(mu)] - id[static_cast<std::size_t>(mu)]);
    SeriesVec S = id;
    const int limit = (like.trunc().mom < kNoCap ? like.trunc().mom : 64) + (like.trunc().par < kNoCap ? like.trunc().par : 64) + 4;
    for (int it = 0;; ++it) {
        if (it > limit) throw DomainError("reversion did not converge under truncation");
        SeriesVec next;
        const SeriesVec NS = compose(nonlinear, bank, S);
        for (int mu = 0; mu < n; ++mu) next.push_back(id[static_cast<std::size_t>(mu)] - NS[static_cast<std::size_t>(mu)]);
        if (next == S) break;
        S = std::move(next);
    }
    // Kinv(k) = S(M^{-1} k)
    return compose(S, bank, apply_inv(id));
}

}  // namespace ncphase
