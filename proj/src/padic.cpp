#include "iwa/padic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

namespace iwa {

// ---------------------------------------------------------------- utilities

std::vector<int64_t> prime_factors(int64_t n) {
    std::vector<int64_t> ps;
    for (int64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) {
            ps.push_back(q);
            while (n % q == 0) n /= q;
        }
    if (n > 1) ps.push_back(n);
    return ps;
}

int64_t euler_phi(int64_t n) {
    int64_t r = n;
    for (int64_t q : prime_factors(n)) r = r / q * (q - 1);
    return r;
}

int64_t mul_order(int64_t a, int64_t n) {
    a %= n;
    if (a < 0) a += n;
    if (std::gcd(a, n) != 1) throw std::invalid_argument("mul_order: gcd(a,n) != 1");
    int64_t phi = euler_phi(n), ord = phi;
    for (int64_t q : prime_factors(phi))
        while (ord % q == 0 && powmod(a, ord / q, n) == 1) ord /= q;
    return ord;
}

static bool is_prime_i64(int64_t n) {
    if (n < 2) return false;
    for (int64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

// ------------------------------------------------------------- PadicScalar

static void check_compat(const PadicScalar& a, const PadicScalar& b) {
    if (a.prime != b.prime) throw std::invalid_argument("PadicScalar: prime mismatch");
}

PadicScalar pa_add(const PadicScalar& a, const PadicScalar& b) {
    check_compat(a, b);
    int m = std::min(a.precision, b.precision);
    return {a.value + b.value, a.prime, m};
}
PadicScalar pa_sub(const PadicScalar& a, const PadicScalar& b) {
    check_compat(a, b);
    int m = std::min(a.precision, b.precision);
    return {a.value - b.value, a.prime, m};
}
PadicScalar pa_mul(const PadicScalar& a, const PadicScalar& b) {
    check_compat(a, b);
    int m = std::min(a.precision, b.precision);
    return {a.value * b.value, a.prime, m};
}
PadicScalar pa_neg(const PadicScalar& a) { return {-a.value, a.prime, a.precision}; }

std::optional<int> pa_valuation(const PadicScalar& a) {
    if (a.value == 0) return std::nullopt;
    int v = valp(a.value, a.prime);
    return v >= a.precision ? std::nullopt : std::optional<int>(v);
}

PadicScalar pa_inverse(const PadicScalar& a) {
    if (a.value % a.prime == 0) throw NonUnitInverse("pa_inverse: p divides value");
    Int pm = ipow(a.prime, a.precision);
    // p^m and value are coprime; extended Euclid on integers.
    Int r0 = pm, r1 = a.value, s0 = 0, s1 = 1;
    while (r1 != 0) {
        Int q = r0 / r1;
        std::swap(r0 -= q * r1, r1);
        std::swap(s0 -= q * s1, s1);
    }
    assert(r0 == 1);
    return {s0, a.prime, a.precision};
}

PadicScalar pa_div_pow_p(const PadicScalar& a, int k) {
    if (k >= a.precision) throw PrecisionExhausted("pa_div_pow_p: ledger would empty");
    Int pk = ipow(a.prime, k);
    if (a.value % pk != 0) throw std::domain_error("pa_div_pow_p: value not divisible");
    return {a.value / pk, a.prime, a.precision - k};
}

PadicScalar teichmuller(const PadicScalar& a) {
    Int pm = ipow(a.prime, a.precision);
    Int x = umod(a.value, pm);
    for (int i = 0; i <= a.precision + 2; ++i) {
        Int nx = powmod(x, a.prime, pm);
        if (nx == x) break;
        x = nx;
    }
    assert(powmod(x, a.prime, pm) == x);
    return {x, a.prime, a.precision};
}

// ------------------------------------------------------- polynomial helpers

namespace poly {

void trim(IPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

IPoly mul(const IPoly& a, const IPoly& b) {
    if (a.empty() || b.empty()) return {};
    IPoly r(a.size() + b.size() - 1, Int(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

std::pair<IPoly, IPoly> divmod(IPoly a, const IPoly& b, const Int& pk) {
    assert(!b.empty() && b.back() == 1); // monic divisors only
    for (auto& x : a) x = umod(x, pk);
    if (a.size() < b.size()) return {{}, a};
    IPoly q(a.size() - b.size() + 1, Int(0));
    for (size_t i = a.size(); i-- >= b.size();) {
        Int c = umod(a[i], pk);
        if (c == 0) { a[i] = 0; if (i + 1 == b.size()) break; continue; }
        q[i - (b.size() - 1)] = c;
        for (size_t j = 0; j < b.size(); ++j)
            a[i - (b.size() - 1) + j] = umod(a[i - (b.size() - 1) + j] - c * b[j], pk);
        if (i + 1 == b.size()) break;
    }
    trim(a);
    trim(q);
    return {q, a};
}

IPoly rem(IPoly a, const IPoly& mod, const Int& pk) { return divmod(std::move(a), mod, pk).second; }

IPoly mulmod(const IPoly& a, const IPoly& b, const IPoly& mod, const Int& pk) {
    return rem(mul(a, b), mod, pk);
}

IPoly powmod(IPoly base, Int e, const IPoly& mod, const Int& pk) {
    IPoly r{Int(1)};
    base = rem(std::move(base), mod, pk);
    while (e > 0) {
        if ((e & 1) != 0) r = mulmod(r, base, mod, pk);
        base = mulmod(base, base, mod, pk);
        e >>= 1;
    }
    return r;
}

IPoly exact_div(const IPoly& a, const IPoly& b) {
    // over Z, assuming b | a and b has unit leading coefficient up to sign
    IPoly r = a, q;
    trim(r);
    IPoly bb = b;
    trim(bb);
    assert(!bb.empty());
    Int lead = bb.back();
    assert(lead == 1 || lead == -1);
    if (r.empty()) return {};
    assert(r.size() >= bb.size());
    q.assign(r.size() - bb.size() + 1, Int(0));
    for (size_t i = r.size(); i-- >= bb.size();) {
        Int c = r[i] / lead;
        q[i - (bb.size() - 1)] = c;
        for (size_t j = 0; j < bb.size(); ++j) r[i - (bb.size() - 1) + j] -= c * bb[j];
        if (i + 1 == bb.size()) break;
    }
    for (const Int& x : r) assert(x == 0);
    return q;
}

IPoly cyclotomic(int64_t n) {
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d
    IPoly num(n + 1, Int(0));
    num[0] = -1;
    num[n] = 1;
    for (int64_t d = 1; d < n; ++d)
        if (n % d == 0) num = exact_div(num, cyclotomic(d));
    return num;
}

} // namespace poly

// ------------------------------------------------- F_p polynomial machinery

namespace {

using FpP = std::vector<int64_t>; // coefficients in [0,p), low-first

void fp_trim(FpP& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

FpP fp_mul(const FpP& a, const FpP& b, int64_t p) {
    if (a.empty() || b.empty()) return {};
    FpP r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = (int64_t)(((__int128)a[i] * b[j] + r[i + j]) % p);
    }
    return r;
}

int64_t fp_inv(int64_t a, int64_t p) {
    int64_t t = 0, nt = 1, r = p, nr = a % p;
    while (nr) {
        int64_t q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    assert(r == 1);
    return t < 0 ? t + p : t;
}

// remainder by arbitrary nonzero divisor
FpP fp_rem(FpP a, const FpP& b, int64_t p) {
    FpP bb = b;
    fp_trim(bb);
    assert(!bb.empty());
    int64_t li = fp_inv(bb.back(), p);
    fp_trim(a);
    while (a.size() >= bb.size()) {
        int64_t c = (int64_t)((__int128)a.back() * li % p);
        size_t off = a.size() - bb.size();
        for (size_t j = 0; j < bb.size(); ++j)
            a[off + j] = (int64_t)(((__int128)(p - c) * bb[j] + a[off + j]) % p);
        fp_trim(a);
    }
    return a;
}

FpP fp_gcd(FpP a, FpP b, int64_t p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        a = fp_rem(std::move(a), b, p);
        std::swap(a, b);
    }
    if (!a.empty()) { // monic-normalize
        int64_t li = fp_inv(a.back(), p);
        for (auto& c : a) c = (int64_t)((__int128)c * li % p);
    }
    return a;
}

FpP fp_mulmod(const FpP& a, const FpP& b, const FpP& mod, int64_t p) {
    return fp_rem(fp_mul(a, b, p), mod, p);
}

FpP fp_powmod(FpP base, Int e, const FpP& mod, int64_t p) {
    FpP r{1};
    base = fp_rem(std::move(base), mod, p);
    while (e > 0) {
        if ((e & 1) != 0) r = fp_mulmod(r, base, mod, p);
        base = fp_mulmod(base, base, mod, p);
        e >>= 1;
    }
    return r;
}

// a*s + b*t = g (monic gcd); returns (g, s, t)
std::tuple<FpP, FpP, FpP> fp_extgcd(FpP a, FpP b, int64_t p) {
    FpP s0{1}, s1{}, t0{}, t1{1};
    fp_trim(a);
    fp_trim(b);
    auto fp_sub = [p](FpP x, const FpP& y) {
        if (x.size() < y.size()) x.resize(y.size(), 0);
        for (size_t i = 0; i < y.size(); ++i) x[i] = (x[i] - y[i] % p + p) % p;
        fp_trim(x);
        return x;
    };
    while (!b.empty()) {
        // divide a by b: quotient q
        FpP q;
        {
            FpP r = a, bb = b;
            int64_t li = fp_inv(bb.back(), p);
            if (r.size() >= bb.size()) q.assign(r.size() - bb.size() + 1, 0);
            while (r.size() >= bb.size() && !r.empty()) {
                int64_t c = (int64_t)((__int128)r.back() * li % p);
                size_t off = r.size() - bb.size();
                q[off] = c;
                for (size_t j = 0; j < bb.size(); ++j)
                    r[off + j] = (int64_t)(((__int128)(p - c) * bb[j] + r[off + j]) % p);
                fp_trim(r);
            }
            a = r;
        }
        std::swap(a, b);
        FpP qs = fp_mul(q, s1, p), qt = fp_mul(q, t1, p);
        FpP ns = fp_sub(s0, qs), nt = fp_sub(t0, qt);
        s0 = s1; s1 = ns;
        t0 = t1; t1 = nt;
    }
    // normalize monic
    if (!a.empty()) {
        int64_t li = fp_inv(a.back(), p);
        for (auto& c : a) c = (int64_t)((__int128)c * li % p);
        for (auto& c : s0) c = (int64_t)((__int128)c * li % p);
        for (auto& c : t0) c = (int64_t)((__int128)c * li % p);
    }
    return {a, s0, t0};
}

bool fp_irreducible(const FpP& h, int64_t p) {
    // h irreducible over F_p iff x^{p^f} = x mod h and gcd(x^{p^{f/q}} - x, h) = 1
    int f = (int)h.size() - 1;
    FpP x{0, 1};
    FpP xq = fp_powmod(x, ipow(Int(p), f), h, p);
    FpP diff = xq;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = (diff[1] - 1 + p) % p;
    fp_trim(diff);
    if (!diff.empty()) return false;
    for (int64_t q : prime_factors(f)) {
        FpP xe = fp_powmod(x, ipow(Int(p), (unsigned)(f / q)), h, p);
        if (xe.size() < 2) xe.resize(2, 0);
        xe[1] = (xe[1] - 1 + p) % p;
        fp_trim(xe);
        FpP g = fp_gcd(xe, h, p);
        if (!(g.size() == 1)) return false;
    }
    return true;
}

// deterministic: first irreducible monic polynomial of degree f in the
// enumeration x^f + c_{f-1} x^{f-1} + ... + c_0, counting (c_0,...,c_{f-1})
// in base p
FpP fp_find_irreducible(int f, int64_t p) {
    if (f == 1) return FpP{0, 1}; // x
    std::vector<int64_t> cs(f, 0);
    for (;;) {
        FpP h(cs.begin(), cs.end());
        h.push_back(1);
        if (fp_irreducible(h, p)) return h;
        int i = 0;
        while (i < f && ++cs[i] == p) cs[i++] = 0;
        if (i == f) throw std::logic_error("no irreducible polynomial found"); // unreachable
    }
}

} // namespace

// --------------------------------------------------------- ring construction

namespace {

// Hensel lift g (monic factor of F mod p) to a monic factor mod p^m.
// Quadratic iteration; self-verifying at every doubling.
poly::IPoly hensel_lift_factor(const poly::IPoly& F, const FpP& g1, int64_t p, int m) {
    using poly::IPoly;
    const Int P = p;
    auto to_ipoly = [](const FpP& a) {
        IPoly r(a.size());
        for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
        return r;
    };
    // initial cofactor and Bezout data mod p
    IPoly g = to_ipoly(g1);
    FpP Fbar(F.size());
    {
        std::vector<int64_t> fb(F.size());
        for (size_t i = 0; i < F.size(); ++i) fb[i] = (int64_t)umod(F[i], P);
        Fbar.assign(fb.begin(), fb.end());
        fp_trim(Fbar);
    }
    FpP h1;
    {
        // h1 = Fbar / g1 over F_p (exact)
        FpP r = Fbar;
        h1.assign(r.size() - g1.size() + 1, 0);
        int64_t li = fp_inv(g1.back(), p);
        while (r.size() >= g1.size() && !r.empty()) {
            int64_t c = (int64_t)((__int128)r.back() * li % p);
            size_t off = r.size() - g1.size();
            h1[off] = c;
            for (size_t j = 0; j < g1.size(); ++j)
                r[off + j] = (int64_t)(((__int128)(p - c) * g1[j] + r[off + j]) % p);
            fp_trim(r);
        }
        assert(r.empty());
    }
    auto [gc, s, t] = fp_extgcd(g1, h1, p);
    assert(gc.size() == 1); // coprime factor/cofactor (g1 separable factor)
    IPoly h = to_ipoly(h1), a = to_ipoly(s), b = to_ipoly(t);

    int k = 1;
    while (k < m) {
        int k2 = std::min(2 * k, m);
        Int pk2 = ipow(P, (unsigned)k2);
        auto modp = [&](IPoly v) {
            for (auto& c : v) c = umod(c, pk2);
            poly::trim(v);
            return v;
        };
        // e = F - g h
        IPoly e = modp(F);
        {
            IPoly gh = poly::mul(g, h);
            if (e.size() < gh.size()) e.resize(gh.size(), Int(0));
            for (size_t i = 0; i < gh.size(); ++i) e[i] = umod(e[i] - gh[i], pk2);
            poly::trim(e);
        }
        // g' = g + (b e rem g)
        IPoly dg = poly::rem(poly::mul(b, e), g, pk2);
        IPoly g2 = g;
        if (g2.size() < dg.size()) g2.resize(dg.size(), Int(0));
        for (size_t i = 0; i < dg.size(); ++i) g2[i] = umod(g2[i] + dg[i], pk2);
        // h' = F div g'  (remainder must vanish mod p^k2)
        auto [h2, r2] = poly::divmod(modp(F), g2, pk2);
        assert(r2.empty() && "Hensel: division remainder nonzero");
        g = g2;
        h = h2;
        // lift Bezout: e2 = 1 - a g - b h
        IPoly e2{Int(1)};
        {
            IPoly ag = poly::mul(a, g), bh = poly::mul(b, h);
            size_t n = std::max({e2.size(), ag.size(), bh.size()});
            e2.resize(n, Int(0));
            for (size_t i = 0; i < n; ++i) {
                Int v = e2[i];
                if (i < ag.size()) v -= ag[i];
                if (i < bh.size()) v -= bh[i];
                e2[i] = umod(v, pk2);
            }
            poly::trim(e2);
        }
        IPoly da = poly::rem(poly::mul(a, e2), h, pk2);
        IPoly num = poly::mul(da, g);
        {
            size_t n = std::max(num.size(), e2.size());
            num.resize(n, Int(0));
            for (size_t i = 0; i < n; ++i) {
                Int v = (i < e2.size() ? e2[i] : Int(0)) - num[i];
                num[i] = umod(v, pk2);
            }
            poly::trim(num);
        }
        auto [db, rb] = poly::divmod(num, h, pk2);
        assert(rb.empty() && "Hensel: Bezout lift remainder nonzero");
        IPoly a2 = a, b2 = b;
        if (a2.size() < da.size()) a2.resize(da.size(), Int(0));
        for (size_t i = 0; i < da.size(); ++i) a2[i] = umod(a2[i] + da[i], pk2);
        if (b2.size() < db.size()) b2.resize(db.size(), Int(0));
        for (size_t i = 0; i < db.size(); ++i) b2[i] = umod(b2[i] + db[i], pk2);
        a = a2;
        b = b2;
        k = k2;
    }
    return g;
}

std::vector<Int> frobenius_matrix(const poly::IPoly& g, int64_t p, int m) {
    // column j = x^{p j} mod (g, p^m), i.e. frob applied to basis vector x^j
    int deg = (int)g.size() - 1;
    Int pm = ipow(Int(p), (unsigned)m);
    std::vector<Int> M((size_t)deg * deg, Int(0));
    poly::IPoly fx = poly::powmod({Int(0), Int(1)}, p, g, pm);
    poly::IPoly col{Int(1)};
    for (int j = 0; j < deg; ++j) {
        for (size_t i = 0; i < col.size(); ++i) M[(size_t)j * deg + i] = col[i];
        if (j + 1 < deg) col = poly::mulmod(col, fx, g, pm);
    }
    return M;
}

} // namespace

Ring make_unramified_ring(int64_t p, int64_t d, int m_max) {
    if (!is_prime_i64(p) || p < 3) throw std::invalid_argument("make_unramified_ring: p must be an odd prime");
    if (d < 1 || std::gcd((int64_t)d, p) != 1) throw std::invalid_argument("make_unramified_ring: need gcd(p,d)=1");
    if (m_max < 1) throw std::invalid_argument("make_unramified_ring: m_max >= 1");
    auto R = std::make_shared<RingDesc>();
    R->kind = RingKind::Unramified;
    R->p = p;
    R->d = d;
    R->m_max = m_max;
    Int pm = ipow(Int(p), (unsigned)m_max);
    if (d == 1) {
        R->deg = 1;
        R->modulus = {umod(Int(-1), pm), Int(1)}; // x - 1: x-class = zeta_1 = 1
    } else {
        int f = (int)mul_order(p, d);
        R->deg = f;
        poly::IPoly Phi = poly::cyclotomic(d);
        if (f == (int)euler_phi(d)) {
            R->modulus = Phi;
            for (auto& c : R->modulus) c = umod(c, pm);
        } else {
            // find one monic irreducible factor of Phi_d mod p: the minimal
            // polynomial of an order-d element of F_{p^f}, then Hensel-lift
            FpP h = fp_find_irreducible(f, p);
            Int q1 = ipow(Int(p), (unsigned)f) - 1;
            assert(q1 % d == 0);
            FpP beta;
            {
                bool found = false;
                // enumerate alpha over F_{p^f} in lex coefficient order; the
                // first alpha whose (q-1)/d power has exact order d wins
                // (deterministic, and total: the unit group is cyclic)
                std::vector<int64_t> co(f, 0);
                while (!found) {
                    int i = 0;
                    while (i < f && ++co[i] == p) co[i++] = 0;
                    if (i == f) break; // wrapped: exhausted F_{p^f}
                    FpP alpha(co.begin(), co.end());
                    fp_trim(alpha);
                    FpP cand = fp_powmod(alpha, q1 / d, h, p);
                    if (cand.empty()) continue;
                    bool ord_d = true;
                    for (int64_t qq : prime_factors(d)) {
                        FpP t = fp_powmod(cand, Int(d / qq), h, p);
                        if (t.size() == 1 && t[0] == 1) { ord_d = false; break; }
                    }
                    FpP full = fp_powmod(cand, Int(d), h, p);
                    if (ord_d && full.size() == 1 && full[0] == 1) {
                        beta = cand;
                        found = true;
                    }
                }
                if (!found) throw std::logic_error("order-d element not found"); // unit group is cyclic: unreachable
            }
            // min poly of beta: prod_{i<f} (x - beta^{p^i}), coefficients in F_{p^f}
            std::vector<FpP> mp{FpP{1}}; // poly in x with F_{p^f} coefficients
            FpP bi = beta;
            for (int i = 0; i < f; ++i) {
                std::vector<FpP> next(mp.size() + 1, FpP{});
                for (size_t j = 0; j < mp.size(); ++j) {
                    // next += mp[j] * (x^{j+1} - bi x^j)
                    auto add_to = [&](size_t idx, const FpP& v) {
                        FpP s = next[idx];
                        if (s.size() < v.size()) s.resize(v.size(), 0);
                        for (size_t t2 = 0; t2 < v.size(); ++t2) s[t2] = (s[t2] + v[t2]) % p;
                        fp_trim(s);
                        next[idx] = s;
                    };
                    add_to(j + 1, mp[j]);
                    FpP neg = fp_mulmod(mp[j], bi, h, p);
                    for (auto& cc : neg) cc = (p - cc) % p;
                    add_to(j, neg);
                }
                mp = next;
                bi = fp_powmod(bi, Int(p), h, p);
            }
            FpP g1(mp.size());
            for (size_t j = 0; j < mp.size(); ++j) {
                assert(mp[j].size() <= 1 && "min poly coefficient not in F_p");
                g1[j] = mp[j].empty() ? 0 : mp[j][0];
            }
            assert((int)g1.size() == f + 1 && g1.back() == 1);
            R->modulus = hensel_lift_factor(Phi, g1, p, m_max);
        }
    }
    R->frob_mat = frobenius_matrix(R->modulus, p, m_max);
    {
        std::ostringstream os;
        os << "Zp" << p;
        if (d > 1) os << "[zeta" << d << "]f" << R->deg;
        R->name = os.str();
    }
    // sanity: modulus divides Phi_d mod p^m_max (for d = 1: x - 1 | x - 1)
    {
        poly::IPoly Phi = d == 1 ? poly::IPoly{Int(-1), Int(1)} : poly::cyclotomic(d);
        poly::IPoly r = poly::rem(Phi, R->modulus, pm);
        assert(r.empty() && "modulus does not divide Phi_d");
    }
    return R;
}

Ring make_ramified_ring(int64_t p, int m_max) {
    if (!is_prime_i64(p) || p < 3) throw std::invalid_argument("make_ramified_ring: p must be an odd prime");
    auto R = std::make_shared<RingDesc>();
    R->kind = RingKind::RamifiedP;
    R->p = p;
    R->d = p;
    R->deg = (int)p - 1;
    R->m_max = m_max;
    Int pm = ipow(Int(p), (unsigned)m_max);
    // E(pi) = ((1+pi)^p - 1)/pi = sum_k binom(p,k+1) pi^k, Eisenstein at p
    R->modulus.assign(p, Int(0));
    Int binom = p; // binom(p,1)
    for (int64_t k = 0; k <= p - 1; ++k) {
        R->modulus[k] = umod(binom, pm);
        binom = binom * (p - k - 1) / (k + 2);
    }
    assert(R->modulus[p - 1] == 1);
    R->frob_mat.assign((size_t)R->deg * R->deg, Int(0));
    for (int j = 0; j < R->deg; ++j) R->frob_mat[(size_t)j * R->deg + j] = 1;
    std::ostringstream os;
    os << "Zp" << p << "[zeta" << p << "]e" << R->deg;
    R->name = os.str();
    return R;
}

// ------------------------------------------------------- ExtScalar arithmetic

ExtScalar::ExtScalar(Ring R, int prec) : ring(std::move(R)), m(prec), c(ring->deg, Int(0)) {
    if (m < 1 || m > ring->m_max) throw std::invalid_argument("ExtScalar: precision out of range");
}
ExtScalar::ExtScalar(Ring R, int prec, const Int& c0) : ExtScalar(std::move(R), prec) {
    c[0] = umod(c0, ipow(ring->p, (unsigned)m));
}

ExtScalar ex_zero(const Ring& R, int m) { return ExtScalar(R, m); }
ExtScalar ex_one(const Ring& R, int m) { return ExtScalar(R, m, 1); }
ExtScalar ex_from_int(const Ring& R, int m, const Int& a) { return ExtScalar(R, m, a); }

ExtScalar ex_gen(const Ring& R, int m) {
    ExtScalar x(R, m);
    if (R->deg == 1) {
        // x-class of the degree-1 modulus x - c0 is the constant root c0
        Int pm = ipow(R->p, (unsigned)m);
        x.c[0] = umod(-R->modulus[0], pm);
    } else {
        x.c[1] = 1;
    }
    return x;
}

static void check_ring(const ExtScalar& a, const ExtScalar& b) {
    if (a.ring != b.ring) throw std::invalid_argument("ExtScalar: ring mismatch");
}

ExtScalar ex_reduce_prec(const ExtScalar& a, int m) {
    if (m > a.m) throw std::invalid_argument("ex_reduce_prec: cannot gain precision");
    ExtScalar r(a.ring, m);
    Int pm = ipow(a.ring->p, (unsigned)m);
    for (int i = 0; i < a.ring->deg; ++i) r.c[i] = umod(a.c[i], pm);
    return r;
}

ExtScalar ex_add(const ExtScalar& a, const ExtScalar& b) {
    check_ring(a, b);
    int m = std::min(a.m, b.m);
    ExtScalar r(a.ring, m);
    Int pm = ipow(a.ring->p, (unsigned)m);
    for (int i = 0; i < a.ring->deg; ++i) r.c[i] = umod(a.c[i] + b.c[i], pm);
    return r;
}
ExtScalar ex_sub(const ExtScalar& a, const ExtScalar& b) {
    check_ring(a, b);
    int m = std::min(a.m, b.m);
    ExtScalar r(a.ring, m);
    Int pm = ipow(a.ring->p, (unsigned)m);
    for (int i = 0; i < a.ring->deg; ++i) r.c[i] = umod(a.c[i] - b.c[i], pm);
    return r;
}
ExtScalar ex_neg(const ExtScalar& a) {
    ExtScalar r(a.ring, a.m);
    Int pm = ipow(a.ring->p, (unsigned)a.m);
    for (int i = 0; i < a.ring->deg; ++i) r.c[i] = umod(-a.c[i], pm);
    return r;
}

ExtScalar ex_mul(const ExtScalar& a, const ExtScalar& b) {
    check_ring(a, b);
    int m = std::min(a.m, b.m);
    Int pm = ipow(a.ring->p, (unsigned)m);
    poly::IPoly pa(a.c.begin(), a.c.end()), pb(b.c.begin(), b.c.end());
    poly::trim(pa);
    poly::trim(pb);
    poly::IPoly pr = poly::rem(poly::mul(pa, pb), a.ring->modulus, pm);
    ExtScalar r(a.ring, m);
    for (size_t i = 0; i < pr.size(); ++i) r.c[i] = pr[i];
    return r;
}

ExtScalar ex_mul_int(const ExtScalar& a, const Int& k) {
    ExtScalar r(a.ring, a.m);
    Int pm = ipow(a.ring->p, (unsigned)a.m);
    for (int i = 0; i < a.ring->deg; ++i) r.c[i] = umod(a.c[i] * k, pm);
    return r;
}

ExtScalar ex_pow(const ExtScalar& a, Int e) {
    if (e < 0) return ex_pow(ex_inverse(a), -e);
    ExtScalar r = ex_one(a.ring, a.m), base = a;
    while (e > 0) {
        if ((e & 1) != 0) r = ex_mul(r, base);
        base = ex_mul(base, base);
        e >>= 1;
    }
    return r;
}

bool ex_is_zero(const ExtScalar& a) {
    for (const Int& x : a.c)
        if (x != 0) return false;
    return true;
}

bool ex_eq(const ExtScalar& a, const ExtScalar& b) {
    check_ring(a, b);
    int m = std::min(a.m, b.m);
    Int pm = ipow(a.ring->p, (unsigned)m);
    for (int i = 0; i < a.ring->deg; ++i)
        if (umod(a.c[i] - b.c[i], pm) != 0) return false;
    return true;
}

std::optional<int> ex_valuation(const ExtScalar& a) {
    const int e = a.ring->ram_e();
    int best = a.m * e; // certified-zero sentinel
    for (int i = 0; i < a.ring->deg; ++i) {
        if (a.c[i] == 0) continue;
        int v = valp(a.c[i], a.ring->p);
        if (v >= a.m) continue;
        int cand = a.ring->kind == RingKind::RamifiedP ? e * v + i : v;
        best = std::min(best, cand);
    }
    if (best >= a.m * e) return std::nullopt;
    return best;
}

bool ex_is_unit(const ExtScalar& a) {
    auto v = ex_valuation(a);
    return v && *v == 0;
}

ExtScalar ex_inverse(const ExtScalar& a) {
    if (!ex_is_unit(a)) throw NonUnitInverse("ex_inverse: not a unit at working precision");
    // Newton: r <- r(2 - a r); initial r correct mod p (unram) / mod pi (ram)
    ExtScalar r(a.ring, a.m);
    if (a.ring->kind == RingKind::Unramified) {
        int64_t p = a.ring->p;
        FpP ab(a.ring->deg), gb(a.ring->deg + 1);
        for (int i = 0; i < a.ring->deg; ++i) ab[i] = (int64_t)umod(a.c[i], Int(p));
        for (int i = 0; i <= a.ring->deg; ++i) gb[i] = (int64_t)umod(a.ring->modulus[i], Int(p));
        fp_trim(ab);
        auto [g, s, t] = fp_extgcd(ab, gb, p);
        assert(g.size() == 1 && g[0] == 1);
        (void)t;
        for (size_t i = 0; i < s.size(); ++i) r.c[i] = s[i];
    } else {
        Int c0inv = pa_inverse({a.c[0], a.ring->p, a.m}).value;
        r.c[0] = c0inv;
    }
    ExtScalar two = ex_from_int(a.ring, a.m, 2);
    // doubling valuation of 1 - a r; e*m steps of headroom => ceil(log2(e*m)) + 1 iterations
    int need = a.m * a.ring->ram_e(), it = 1;
    while ((1 << it) < need + 1) ++it;
    for (int i = 0; i <= it; ++i) r = ex_mul(r, ex_sub(two, ex_mul(a, r)));
    assert(ex_eq(ex_mul(a, r), ex_one(a.ring, a.m)));
    return r;
}

ExtScalar ex_div(const ExtScalar& a, const ExtScalar& b) { return ex_mul(a, ex_inverse(b)); }

ExtScalar ex_div_pow_p(const ExtScalar& a, int k) {
    if (k == 0) return a;
    if (k >= a.m) throw PrecisionExhausted("ex_div_pow_p: ledger would empty");
    Int pk = ipow(a.ring->p, (unsigned)k);
    ExtScalar r(a.ring, a.m - k);
    for (int i = 0; i < a.ring->deg; ++i) {
        if (a.c[i] % pk != 0) throw std::domain_error("ex_div_pow_p: coefficient not divisible");
        r.c[i] = a.c[i] / pk;
    }
    return r;
}

ExtScalar frobenius(const ExtScalar& a, int r) {
    if (a.ring->kind == RingKind::RamifiedP) return a; // unramified part is Z_p
    const int f = a.ring->deg;
    int rr = ((r % f) + f) % f;
    ExtScalar cur = a;
    Int pm = ipow(a.ring->p, (unsigned)a.m);
    for (int step = 0; step < rr; ++step) {
        ExtScalar nxt(a.ring, cur.m);
        for (int j = 0; j < f; ++j) {
            if (cur.c[j] == 0) continue;
            for (int i = 0; i < f; ++i)
                nxt.c[i] = umod(nxt.c[i] + cur.c[j] * a.ring->frob_mat[(size_t)j * f + i], pm);
        }
        cur = nxt;
    }
    return cur;
}

ExtScalar ex_teichmuller(const ExtScalar& a) {
    if (a.ring->kind == RingKind::RamifiedP)
        throw std::invalid_argument("ex_teichmuller: unramified rings only");
    Int q = ipow(Int(a.ring->p), (unsigned)a.ring->deg);
    ExtScalar x = a;
    for (int i = 0; i <= a.m + 2; ++i) {
        ExtScalar nx = ex_pow(x, q);
        if (ex_eq(nx, x)) break;
        x = nx;
    }
    assert(ex_eq(ex_pow(x, q), x));
    return x;
}

// ------------------------------------------------------------- log and exp
//
// Both are computed with guard digits: the argument is lifted (arbitrarily)
// to precision m + g where g covers every division performed; the result is
// then exact mod p^m because d log(1+z) = dz/(1+z) and d exp(z) = exp(z) dz
// have integral cofactors on the stated domains.  If the ring was built with
// insufficient headroom the uncovered charge is deducted from the ledger.

namespace {

int log_tail_terms(int64_t p, int vnum, int e, int m) {
    // smallest K with k*vnum/e - log_p(k) >= m for all k >= K
    int K = 1;
    for (;;) {
        double lhs = (double)K * vnum / e;
        double logp = std::log((double)std::max(K, 2)) / std::log((double)p);
        if (lhs - logp - 1.0 >= m) return K;
        ++K;
        if (K > 1000000) throw ConvergenceDomain("padic_log: tail will not close");
    }
}

} // namespace

ExtScalar padic_log(const ExtScalar& a) {
    const Ring& R = a.ring;
    ExtScalar z = ex_sub(a, ex_one(R, a.m));
    auto v = ex_valuation(z);
    if (ex_is_zero(z)) return ex_zero(R, a.m);
    if (!v || *v <= 0) throw ConvergenceDomain("padic_log: need v(a-1) > 0");
    const int e = R->ram_e();
    const int m = a.m;
    const int K = log_tail_terms(R->p, *v, e, m);
    int gneed = 0;
    for (int k = (int)R->p; k <= K; k += (int)R->p) gneed = std::max(gneed, valp(Int(k), R->p));
    int g = std::min(gneed, R->m_max - m);
    int charge = gneed - g; // headroom shortfall hits the ledger
    if (m - charge <= 0) throw PrecisionExhausted("padic_log: no certified digits left");
    int mw = m + g;
    ExtScalar zl(R, mw);
    for (int i = 0; i < R->deg; ++i) zl.c[i] = z.c[i]; // arbitrary lift
    ExtScalar acc = ex_zero(R, mw), pw = zl;
    for (int k = 1; k <= K; ++k) {
        int vk = valp(Int(k), R->p);
        ExtScalar term = pw;
        if (vk > 0) term = ex_div_pow_p(term, vk);
        // divide by the unit part of k
        Int ku = Int(k) / ipow(R->p, (unsigned)vk);
        term = ex_mul(term, ExtScalar(R, term.m, pa_inverse({ku, R->p, term.m}).value));
        if (k % 2 == 0) term = ex_neg(term);
        acc = ex_add(acc, term);
        if (k < K) pw = ex_mul(pw, zl);
    }
    return ex_reduce_prec(acc, m - charge);
}

ExtScalar padic_exp(const ExtScalar& a) {
    const Ring& R = a.ring;
    const int e = R->ram_e();
    auto v = ex_valuation(a);
    if (ex_is_zero(a)) return ex_one(R, a.m);
    // convergence: v(a) > 1/(p-1), i.e. v_units*(p-1) > e
    if (!v || (Int(*v) * (R->p - 1)) <= e) throw ConvergenceDomain("padic_exp: need v(a) > 1/(p-1)");
    const int m = a.m;
    // tail: k*v/e - v_p(k!) >= k*v/e - (k-1)/(p-1) grows; stop when >= m
    int K = 1;
    {
        double slope = (double)*v / e - 1.0 / (double)(R->p - 1);
        K = std::max(2, (int)std::ceil(m / slope) + 2);
    }
    int gneed = 0; // v_p(K!) bound
    {
        Int kf = 0;
        for (Int pk = R->p; pk <= K; pk *= R->p) kf += Int(K) / pk;
        gneed = (int)kf;
    }
    int g = std::min(gneed, R->m_max - m);
    int charge = gneed - g;
    if (m - charge <= 0) throw PrecisionExhausted("padic_exp: no certified digits left");
    int mw = m + g;
    ExtScalar al(R, mw);
    for (int i = 0; i < R->deg; ++i) al.c[i] = a.c[i];
    ExtScalar acc = ex_one(R, mw), term = ex_one(R, mw);
    for (int k = 1; k <= K; ++k) {
        term = ex_mul(term, al);
        int vk = valp(Int(k), R->p);
        if (vk > 0) term = ex_div_pow_p(term, vk);
        Int ku = Int(k) / ipow(R->p, (unsigned)vk);
        term = ex_mul(term, ExtScalar(R, term.m, pa_inverse({ku, R->p, term.m}).value));
        acc = ex_add(acc, term);
    }
    return ex_reduce_prec(acc, m - charge);
}

// ------------------------------------------------------------------- JSON

nlohmann::json ex_to_json(const ExtScalar& a) {
    nlohmann::json j;
    j["prime"] = a.ring->p;
    j["precision"] = a.m;
    std::vector<std::string> cs;
    cs.reserve(a.c.size());
    for (const Int& x : a.c) cs.push_back(dec(x));
    j["coeffs"] = cs;
    return j;
}

ExtScalar ex_from_json(const Ring& R, const nlohmann::json& j) {
    if ((int64_t)j.at("prime") != R->p) throw std::invalid_argument("ex_from_json: prime mismatch");
    int m = j.at("precision");
    ExtScalar a(R, m);
    const auto& cs = j.at("coeffs");
    if ((int)cs.size() != R->deg) throw std::invalid_argument("ex_from_json: coefficient count mismatch");
    Int pm = ipow(R->p, (unsigned)m);
    for (int i = 0; i < R->deg; ++i) a.c[i] = umod(Int(cs[i].get<std::string>()), pm);
    return a;
}

} // namespace iwa
