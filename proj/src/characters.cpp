#include "iwa/characters.hpp"
#include "iwa/errors.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace iwa {

namespace {

int64_t lcm64(int64_t a, int64_t b) { return a / std::gcd(a, b) * b; }

int64_t powmod64(int64_t b, int64_t e, int64_t m) {
    int64_t r = 1 % m;
    b %= m;
    while (e > 0) {
        if (e & 1) r = r * b % m;
        b = b * b % m;
        e >>= 1;
    }
    return r;
}

// prime-power components q = ell^k of n, ascending by ell
std::vector<int64_t> prime_power_components(int64_t n) {
    std::vector<int64_t> out;
    for (int64_t ell : prime_factors(n)) {
        int64_t q = 1;
        while (n % (q * ell) == 0) q *= ell;
        out.push_back(q);
    }
    return out;
}

int64_t smallest_primitive_root(int64_t q) {
    // q an odd prime power; the group (Z/q)^x is cyclic of order phi(q)
    int64_t ph = euler_phi(q);
    auto ells = prime_factors(ph);
    for (int64_t g = 2; g < q; ++g) {
        if (std::gcd(g, q) != 1) continue;
        bool ok = true;
        for (int64_t ell : ells)
            if (powmod64(g, ph / ell, q) == 1) { ok = false; break; }
        if (ok) return g;
    }
    assert(false && "no primitive root (q not an odd prime power?)");
    return 0;
}

// x = g mod q, x = 1 mod M/q
int64_t crt_lift_gen(int64_t g, int64_t q, int64_t M) {
    int64_t co = M / q;
    if (co == 1) return g % M;
    int64_t inv = powmod64(co % q, euler_phi(q) - 1, q); // co^{-1} mod q
    int64_t x = (1 + co % M * ((inv * ((g - 1 + q) % q)) % q)) % M;
    assert(x % q == g % q && x % co == 1 % co);
    return x;
}

// consecutive generators sharing a prime-power component
struct CompView {
    int64_t q = 1;
    int first = 0;
    int count = 0;
};

std::vector<CompView> component_views(const std::vector<DirichletCharacter::Gen>& gens) {
    std::vector<CompView> out;
    for (int i = 0; i < (int)gens.size(); ++i) {
        if (out.empty() || out.back().q != gens[i].q) out.push_back({gens[i].q, i, 1});
        else out.back().count++;
    }
    return out;
}

// joint discrete log of x within one component: exponents on the component's
// generators (brute force; component groups are small)
std::vector<int64_t> comp_dlog(const CompView& cv,
                               const std::vector<DirichletCharacter::Gen>& gens,
                               int64_t x) {
    int64_t q = cv.q;
    int64_t xr = x % q;
    std::vector<int64_t> ks(cv.count, 0);
    if (cv.count == 0) return ks;
    if (cv.count == 1) {
        int64_t g = gens[cv.first].g % q, o = gens[cv.first].order;
        int64_t cur = 1 % q;
        for (int64_t k = 0; k < o; ++k) {
            if (cur == xr) { ks[0] = k; return ks; }
            cur = cur * g % q;
        }
    } else {
        assert(cv.count == 2); // the 2-part <-1> x <5>
        int64_t g0 = gens[cv.first].g % q, o0 = gens[cv.first].order;
        int64_t g1 = gens[cv.first + 1].g % q, o1 = gens[cv.first + 1].order;
        int64_t c0 = 1 % q;
        for (int64_t k0 = 0; k0 < o0; ++k0) {
            int64_t cur = c0;
            for (int64_t k1 = 0; k1 < o1; ++k1) {
                if (cur == xr) { ks[0] = k0; ks[1] = k1; return ks; }
                cur = cur * g1 % q;
            }
            c0 = c0 * g0 % q;
        }
    }
    assert(false && "discrete log of a non-unit");
    return ks;
}

// conductor of one component character given its local exponents
int64_t component_conductor(const CompView& cv,
                            const std::vector<DirichletCharacter::Gen>& gens,
                            const std::vector<int64_t>& exps) {
    if (cv.count == 0) return 1;
    int64_t ell = prime_factors(cv.q)[0];
    if (ell != 2) {
        int64_t a = exps[cv.first], o = gens[cv.first].order;
        if (a % o == 0) return 1;
        int64_t vo = o / std::gcd(a, o);
        int64_t c = ell;
        while (euler_phi(c) % vo != 0) c *= ell;
        return c;
    }
    if (cv.count == 1) return exps[cv.first] % 2 ? 4 : 1; // q = 4
    int64_t am1 = exps[cv.first], a5 = exps[cv.first + 1];
    int64_t o5 = gens[cv.first + 1].order;
    int64_t v5 = a5 % o5 ? o5 / std::gcd(a5, o5) : 1;
    if (v5 > 1) return 4 * v5;
    return am1 % 2 ? 4 : 1;
}

// exponent of zeta_{chi.order} at a unit x (caller guarantees coprimality)
int64_t texp_of(const DirichletCharacter& chi, int64_t x) {
    if (chi.modulus == 1) return 0;
    int64_t e = chi.order, t = 0;
    auto cvs = component_views(chi.gens);
    for (const auto& cv : cvs) {
        auto ks = comp_dlog(cv, chi.gens, x);
        for (int i = 0; i < cv.count; ++i) {
            int64_t a = chi.exps[cv.first + i], o = chi.gens[cv.first + i].order;
            if (a == 0) continue;
            assert((a * e) % o == 0);
            t = (t + (a * e / o) % e * (ks[i] % e)) % e;
        }
    }
    return t;
}

Int binom(int n, int k) {
    Int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::map<int, Rat>& bernoulli_memo() {
    static std::map<int, Rat> memo{{0, Rat(1)}, {1, Rat(-1, 2)}};
    return memo;
}

std::mutex& bernoulli_mutex() {
    static std::mutex mu;
    return mu;
}

constexpr int kBernoulliBound = 200;

} // namespace

// ---------------------------------------------------------------- structure

std::vector<DirichletCharacter::Gen> unit_group_generators(int64_t modulus) {
    assert(modulus >= 1);
    std::vector<DirichletCharacter::Gen> out;
    for (int64_t q : prime_power_components(modulus)) {
        if (q % 2 == 0) {
            if (q == 2) continue; // trivial component
            if (q == 4) {
                out.push_back({q, crt_lift_gen(3, q, modulus), 2});
            } else {
                out.push_back({q, crt_lift_gen(q - 1, q, modulus), 2});
                out.push_back({q, crt_lift_gen(5, q, modulus), q / 4});
            }
        } else {
            out.push_back({q, crt_lift_gen(smallest_primitive_root(q), q, modulus),
                           euler_phi(q)});
        }
    }
    return out;
}

DirichletCharacter make_character(int64_t modulus, const std::vector<int64_t>& exps) {
    DirichletCharacter chi;
    chi.modulus = modulus;
    chi.gens = unit_group_generators(modulus);
    if (exps.size() != chi.gens.size())
        throw std::invalid_argument("character exponent count does not match the "
                                    "generator count of (Z/" + std::to_string(modulus) + ")^x");
    chi.exps.resize(chi.gens.size());
    chi.order = 1;
    for (size_t i = 0; i < chi.gens.size(); ++i) {
        int64_t o = chi.gens[i].order;
        chi.exps[i] = ((exps[i] % o) + o) % o;
        if (chi.exps[i]) chi.order = lcm64(chi.order, o / std::gcd(chi.exps[i], o));
    }
    chi.conductor = 1;
    for (const auto& cv : component_views(chi.gens))
        chi.conductor = lcm64(chi.conductor, component_conductor(cv, chi.gens, chi.exps));
    if (modulus == 1) {
        chi.parity = +1;
    } else {
        int64_t t = texp_of(chi, modulus - 1);
        assert(t == 0 || 2 * t == chi.order);
        chi.parity = t == 0 ? +1 : -1;
    }
    return chi;
}

DirichletCharacter trivial_character(int64_t modulus) {
    return make_character(modulus,
                          std::vector<int64_t>(unit_group_generators(modulus).size(), 0));
}

DirichletCharacter teichmuller_character(int64_t p) {
    assert(p >= 3);
    return make_character(p, {1});
}

std::optional<int64_t> char_exp(const DirichletCharacter& chi, int64_t x) {
    if (chi.modulus == 1) return 0;
    int64_t xr = ((x % chi.modulus) + chi.modulus) % chi.modulus;
    if (std::gcd(xr, chi.modulus) != 1) return std::nullopt;
    return texp_of(chi, xr);
}

// ------------------------------------------------------------------ algebra

DirichletCharacter char_mul(const DirichletCharacter& a, const DirichletCharacter& b) {
    int64_t L = lcm64(a.modulus, b.modulus);
    auto gens = unit_group_generators(L);
    std::vector<int64_t> exps(gens.size());
    for (size_t i = 0; i < gens.size(); ++i) {
        int64_t o = gens[i].order;
        int64_t ta = *char_exp(a, gens[i].g);
        int64_t tb = *char_exp(b, gens[i].g);
        assert((ta * o) % a.order == 0 && (tb * o) % b.order == 0);
        exps[i] = (ta * o / a.order + tb * o / b.order) % o;
    }
    return make_character(L, exps);
}

DirichletCharacter char_pow(const DirichletCharacter& a, long k) {
    std::vector<int64_t> exps(a.exps.size());
    for (size_t i = 0; i < a.exps.size(); ++i) {
        int64_t o = a.gens[i].order;
        exps[i] = ((a.exps[i] * (k % o)) % o + o) % o;
    }
    return make_character(a.modulus, exps);
}

DirichletCharacter char_inverse(const DirichletCharacter& a) { return char_pow(a, -1); }

DirichletCharacter char_primitive(const DirichletCharacter& a) {
    if (a.conductor == a.modulus) return a;
    int64_t f = a.conductor;
    auto gens = unit_group_generators(f);
    std::vector<int64_t> exps(gens.size());
    for (size_t i = 0; i < gens.size(); ++i) {
        // lift the generator to a unit mod a.modulus congruent to it mod f
        int64_t x = gens[i].g;
        while (std::gcd(x, a.modulus) != 1) x += f;
        int64_t t = *char_exp(a, x);
        int64_t o = gens[i].order;
        assert((t * o) % a.order == 0);
        exps[i] = (t * o / a.order) % o;
    }
    auto prim = make_character(f, exps);
    assert(prim.conductor == f && prim.order == a.order);
    return prim;
}

DirichletCharacter char_induce(const DirichletCharacter& a, int64_t modulus) {
    if (modulus % a.conductor != 0)
        throw std::invalid_argument("cannot induce: conductor does not divide the modulus");
    auto prim = char_primitive(a);
    auto gens = unit_group_generators(modulus);
    std::vector<int64_t> exps(gens.size());
    for (size_t i = 0; i < gens.size(); ++i) {
        int64_t t = *char_exp(prim, gens[i].g);
        int64_t o = gens[i].order;
        assert((t * o) % prim.order == 0);
        exps[i] = (t * o / prim.order) % o;
    }
    return make_character(modulus, exps);
}

bool char_eq(const DirichletCharacter& a, const DirichletCharacter& b) {
    auto pa = char_primitive(a), pb = char_primitive(b);
    return pa.conductor == pb.conductor && pa.exps == pb.exps;
}

// ------------------------------------------------------------ p-adic values

int64_t char_field_order(const DirichletCharacter& chi, int64_t p) {
    int64_t e = 1;
    for (size_t i = 0; i < chi.gens.size(); ++i) {
        if (chi.gens[i].q % p == 0) {
            assert(chi.gens[i].q == p && "p^2 | modulus is outside this setup");
            continue;
        }
        if (chi.exps[i])
            e = lcm64(e, chi.gens[i].order / std::gcd(chi.exps[i], chi.gens[i].order));
    }
    return e;
}

ExtScalar char_value_in(const DirichletCharacter& chi, int64_t x, const Ring& R, int m) {
    assert(R->kind == RingKind::Unramified);
    int64_t p = R->p;
    if (chi.modulus == 1) return ex_one(R, m);
    int64_t xr = ((x % chi.modulus) + chi.modulus) % chi.modulus;
    if (std::gcd(xr, chi.modulus) != 1) return ex_zero(R, m);

    int64_t eN = char_field_order(chi, p);
    int64_t tN = 0; // exponent of zeta_eN over the prime-to-p components
    int64_t j = 0;  // omega-power of the p-component
    auto cvs = component_views(chi.gens);
    for (const auto& cv : cvs) {
        if (cv.q % p == 0) {
            assert(cv.q == p && cv.count == 1);
            int64_t a = chi.exps[cv.first], o = chi.gens[cv.first].order;
            j = (j + a * ((p - 1) / o)) % (p - 1);
            continue;
        }
        auto ks = comp_dlog(cv, chi.gens, xr);
        for (int i = 0; i < cv.count; ++i) {
            int64_t a = chi.exps[cv.first + i], o = chi.gens[cv.first + i].order;
            if (a == 0) continue;
            assert((a * eN) % o == 0);
            tN = (tN + (a * eN / o) % eN * (ks[i] % eN)) % eN;
        }
    }

    ExtScalar val = ex_one(R, m);
    if (j != 0) {
        // x is a unit mod the p-part, so a p-adic unit: tau(x) is defined
        ExtScalar tau = ex_teichmuller(ex_from_int(R, m, Int(xr)));
        val = ex_mul(val, ex_pow(tau, Int(j)));
    }
    if (eN == 2) {
        if (tN % 2) val = ex_neg(val);
    } else if (eN > 2) {
        if (R->d % eN != 0)
            throw std::invalid_argument("ring has no root of unity of order " +
                                        std::to_string(eN));
        ExtScalar zeta = ex_pow(ex_gen(R, m), Int(R->d / eN));
        val = ex_mul(val, ex_pow(zeta, Int(tN)));
    }
    return val;
}

// -------------------------------------------------------------- text format

DirichletCharacter parse_character(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("character spec must be \"modulus:e1,e2,...\"");
    int64_t modulus = std::stoll(spec.substr(0, colon));
    std::vector<int64_t> exps;
    std::string rest = spec.substr(colon + 1);
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) exps.push_back(std::stoll(tok));
    return make_character(modulus, exps);
}

std::string format_character(const DirichletCharacter& chi) {
    std::string out = std::to_string(chi.modulus) + ":";
    for (size_t i = 0; i < chi.exps.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(chi.exps[i]);
    }
    return out;
}

// ---------------------------------------------------------------- Bernoulli

Rat bernoulli_number(int k) {
    if (k < 0) throw std::invalid_argument("Bernoulli index must be nonnegative");
    if (k > kBernoulliBound)
        throw BoundExceeded("Bernoulli index " + std::to_string(k) + " exceeds the bound " +
                            std::to_string(kBernoulliBound));
    if (k > 1 && k % 2 == 1) return Rat(0);
    std::lock_guard<std::mutex> lock(bernoulli_mutex());
    auto& memo = bernoulli_memo();
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;
    // B_n = -1/(n+1) * sum_{j<n} C(n+1,j) B_j, filling upward
    for (int n = 2; n <= k; n += 2) {
        if (memo.count(n)) continue;
        Rat s = 0;
        for (int j = 0; j < n; ++j) {
            if (j > 1 && j % 2 == 1) continue;
            s += Rat(binom(n + 1, j)) * memo.at(j);
        }
        memo[n] = -s / (n + 1);
    }
    return memo.at(k);
}

Rat bernoulli_poly(int k, const Rat& x) {
    Rat s = 0;
    for (int j = 0; j <= k; ++j) {
        if (j > 1 && j % 2 == 1) continue;
        Rat term = Rat(binom(k, j)) * bernoulli_number(j);
        for (int i = 0; i < k - j; ++i) term *= x;
        s += term;
    }
    return s;
}

void bernoulli_preload(const std::vector<std::pair<int, Rat>>& values) {
    std::lock_guard<std::mutex> lock(bernoulli_mutex());
    auto& memo = bernoulli_memo();
    for (const auto& [k, v] : values) {
        if (k < 0 || k > kBernoulliBound) continue;
        auto it = memo.find(k);
        if (it != memo.end()) {
            assert(it->second == v && "cache disagrees with computed value");
        } else {
            memo[k] = v;
        }
    }
}

std::vector<std::pair<int, Rat>> bernoulli_known() {
    std::lock_guard<std::mutex> lock(bernoulli_mutex());
    return {bernoulli_memo().begin(), bernoulli_memo().end()};
}

// ---------------------------------------------------- generalized Bernoulli

ExtScalar generalized_bernoulli(int n, const DirichletCharacter& chi, const Ring& R, int m) {
    if (n < 1) throw std::invalid_argument("generalized Bernoulli index must be >= 1");
    assert(m >= 1 && m <= R->m_max);
    int64_t p = R->p;
    int64_t f = chi.modulus;

    // B_{n,chi} = (1/f) sum_j [C(n,j) B_j f^j] S_{n-j},  S_k = sum_a chi(a) a^k.
    // Clear denominators: with L = lcm_j denom(C(n,j) B_j f^j),
    //   B_{n,chi} = (1/(f L)) sum_a chi(a) W(a),  W(a) = sum_j (T_j L) a^{n-j} in Z.
    std::vector<Rat> T(n + 1);
    Int L = 1;
    for (int j = 0; j <= n; ++j) {
        T[j] = Rat(binom(n, j)) * bernoulli_number(j) * Rat(ipow(Int(f), j));
        Int den = denominator(T[j]);
        L = L / gcd(L, den) * den;
    }
    std::vector<Int> coef(n + 1);
    for (int j = 0; j <= n; ++j) {
        Rat t = T[j] * Rat(L);
        assert(denominator(t) == 1);
        coef[j] = numerator(t);
    }
    Int den = Int(f) * L;
    int v = valp(den, Int(p));
    int mw = std::min(m + v, R->m_max);
    if (mw - v <= 0)
        throw PrecisionExhausted("generalized Bernoulli denominator eats all digits");

    ExtScalar A = ex_zero(R, mw);
    for (int64_t a = 1; a <= f; ++a) {
        if (std::gcd(a, f) != 1) continue;
        ExtScalar cv = char_value_in(chi, a, R, mw);
        if (ex_is_zero(cv)) continue;
        Int W = 0, apow = 1;
        for (int j = n; j >= 0; --j) { // a^{n-j}: j descending pairs with apow ascending
            W += coef[j] * apow;
            apow *= a;
        }
        A = ex_add(A, ex_mul_int(cv, W));
    }

    auto vA = ex_valuation(A);
    if (vA.has_value() && *vA < v)
        throw std::domain_error("generalized Bernoulli number B_{" + std::to_string(n) +
                                ",chi} is not p-integral at p = " + std::to_string(p));
    Int u = den / ipow(Int(p), (unsigned)v);
    ExtScalar B = ex_mul(A, ex_inverse(ex_from_int(R, mw, u)));
    return ex_div_pow_p(B, v);
}

// ----------------------------------------------------------- interpolation

ExtScalar lp_value(const DirichletCharacter& chi, int n, const Ring& R, int m) {
    if (chi.parity != +1)
        throw OddCharacter("L_p interpolation requested for an odd character");
    if (n < 1) throw std::invalid_argument("lp_value needs n >= 1");
    int64_t p = R->p;
    auto psi = char_primitive(char_mul(chi, char_pow(teichmuller_character(p), -(long)n)));

    ExtScalar B = generalized_bernoulli(n, psi, R, m);
    int mB = B.m;
    ExtScalar psip = char_value_in(psi, p, R, mB); // 0 when p | cond(psi)
    ExtScalar euler = ex_sub(ex_one(R, mB), ex_mul_int(psip, ipow(Int(p), (unsigned)(n - 1))));
    ExtScalar num = ex_neg(ex_mul(euler, B));

    // division by n: the interpolation formula's honest cost is exactly v_p(n)
    int vn = valp(Int(n), Int(p));
    auto vnum = ex_valuation(num);
    if (vnum.has_value() && *vnum < vn)
        throw std::domain_error("L_p value is not p-integral (v_p(n) exceeds the "
                                "numerator valuation)");
    Int un = Int(n) / ipow(Int(p), (unsigned)vn);
    ExtScalar val = ex_mul(num, ex_inverse(ex_from_int(R, mB, un)));
    return ex_div_pow_p(val, vn);
}

// ----------------------------------------------------------------- the scan

namespace {

// precomputed evaluation tables for one modulus M = Np
struct ScanTables {
    int64_t M = 0, p = 0;
    std::vector<DirichletCharacter::Gen> gens;
    std::vector<CompView> cvs;
    int pgen = -1;                         // index of the p-component generator
    std::vector<std::vector<int64_t>> dv;  // dv[x]: dlog vector of unit x mod M
    std::vector<int64_t> dv_p;             // dlogs of p at the prime-to-p generators
};

ScanTables build_tables(int64_t p, int64_t N) {
    ScanTables T;
    T.M = N * p;
    T.p = p;
    T.gens = unit_group_generators(T.M);
    T.cvs = component_views(T.gens);
    T.dv.assign(T.M, {});
    for (int64_t x = 1; x < T.M; ++x) {
        if (std::gcd(x, T.M) != 1) continue;
        std::vector<int64_t> row(T.gens.size());
        for (const auto& cv : T.cvs) {
            auto ks = comp_dlog(cv, T.gens, x);
            for (int i = 0; i < cv.count; ++i) row[cv.first + i] = ks[i];
        }
        T.dv[x] = std::move(row);
    }
    T.dv_p.assign(T.gens.size(), 0);
    for (const auto& cv : T.cvs) {
        if (cv.q % p == 0) {
            assert(cv.q == p && cv.count == 1);
            T.pgen = cv.first;
            continue;
        }
        auto ks = comp_dlog(cv, T.gens, p % cv.q);
        for (int i = 0; i < cv.count; ++i) T.dv_p[cv.first + i] = ks[i];
    }
    assert(T.pgen >= 0);
    return T;
}

// cached ring + root/teichmuller power tables for one value order eN
struct RingCtx {
    Ring R;
    std::vector<ExtScalar> zpow; // zeta_eN^t, t in [0, eN)
    std::vector<ExtScalar> tpow; // tau(g_p)^u, u in [0, p-1)
};

const RingCtx& ring_ctx(std::map<int64_t, RingCtx>& cache, int64_t eN,
                        const ScanTables& T, int mscan) {
    auto it = cache.find(eN);
    if (it != cache.end()) return it->second;
    RingCtx ctx;
    ctx.R = make_unramified_ring(T.p, eN, mscan);
    ExtScalar zeta = eN == 1 ? ex_one(ctx.R, mscan) : ex_gen(ctx.R, mscan);
    ctx.zpow.resize(eN);
    ctx.zpow[0] = ex_one(ctx.R, mscan);
    for (int64_t t = 1; t < eN; ++t) ctx.zpow[t] = ex_mul(ctx.zpow[t - 1], zeta);
    int64_t gp = T.gens[T.pgen].g;
    ExtScalar tau = ex_teichmuller(ex_from_int(ctx.R, mscan, Int(gp)));
    ctx.tpow.resize(T.p - 1);
    ctx.tpow[0] = ex_one(ctx.R, mscan);
    for (int64_t u = 1; u < T.p - 1; ++u) ctx.tpow[u] = ex_mul(ctx.tpow[u - 1], tau);
    return cache.emplace(eN, std::move(ctx)).first->second;
}

} // namespace

std::vector<EisensteinFixture> find_eisenstein_pairs(int64_t p_min, int64_t p_max,
                                                     int64_t N_max) {
    constexpr int mscan = 4;
    std::vector<EisensteinFixture> out;
    for (int64_t p = std::max<int64_t>(3, p_min); p <= p_max; ++p) {
        bool prime = p >= 2;
        for (int64_t d = 2; d * d <= p; ++d)
            if (p % d == 0) { prime = false; break; }
        if (!prime) continue;
        for (int64_t N = 2; N <= N_max; ++N) {
            if (N % p == 0 || euler_phi(N) % p == 0) continue; // need p coprime to N phi(N)
            ScanTables T = build_tables(p, N);
            int64_t M = T.M;
            int G = (int)T.gens.size();
            std::vector<int64_t> orders(G);
            for (int i = 0; i < G; ++i) orders[i] = T.gens[i].order;
            std::map<int64_t, RingCtx> rcache;
            // CRT lift tables: unit a mod f -> unit x mod M, for f = N and f = M
            std::vector<int64_t> liftN(N, 0);
            for (int64_t a = 1; a < N; ++a) {
                if (std::gcd(a, N) != 1) continue;
                int64_t x = a;
                while (x % p == 0) x += N;
                liftN[a] = x;
            }

            std::vector<int64_t> exps(G, 0);
            while (true) {
                // odometer step at the end of the loop body
                bool nonzero = std::any_of(exps.begin(), exps.end(),
                                           [](int64_t a) { return a != 0; });
                if (nonzero) {
                    int64_t e = 1;
                    for (int i = 0; i < G; ++i)
                        if (exps[i]) e = lcm64(e, orders[i] / std::gcd(exps[i], orders[i]));
                    // parity: exponent at -1 must vanish
                    int64_t tm1 = 0;
                    for (int i = 0; i < G; ++i)
                        if (exps[i])
                            tm1 = (tm1 + (exps[i] * e / orders[i]) % e * T.dv[M - 1][i]) % e;
                    int64_t f = 0, j = 0, tNp = 0, eN = 1;
                    if (tm1 == 0) {
                        // conductor, omega-part, theta_N(p), value order of the N-part
                        f = 1;
                        for (const auto& cv : T.cvs)
                            f = lcm64(f, component_conductor(cv, T.gens, exps));
                        j = exps[T.pgen] * ((p - 1) / orders[T.pgen]) % (p - 1);
                        for (int i = 0; i < G; ++i) {
                            if (i == T.pgen || exps[i] == 0) continue;
                            eN = lcm64(eN, orders[i] / std::gcd(exps[i], orders[i]));
                        }
                        for (int i = 0; i < G; ++i) {
                            if (i == T.pgen || exps[i] == 0) continue;
                            tNp = (tNp + (exps[i] * eN / orders[i]) % eN * T.dv_p[i]) % eN;
                        }
                    }
                    bool candidate = tm1 == 0 && (f == N || f == M) && !(j == 1 && tNp == 0);
                    if (candidate) {
                        // Q_p-Galois orbit (theta ~ theta^p): keep the lex-min rep
                        std::vector<int64_t> cur = exps;
                        bool minimal = true;
                        while (true) {
                            for (int i = 0; i < G; ++i) cur[i] = cur[i] * p % orders[i];
                            if (cur == exps) break;
                            if (cur < exps) { minimal = false; break; }
                        }
                        if (minimal) {
                            // v_p(B_{2,theta^{-1}}) via exponent-bucketed sums
                            const RingCtx& ctx = ring_ctx(rcache, eN, T, mscan);
                            int vpf = f % p == 0 ? 1 : 0;
                            std::vector<Int> bucket(eN * (p - 1), Int(0));
                            for (int64_t a = 1; a <= f; ++a) {
                                if (std::gcd(a, f) != 1) continue;
                                int64_t x = f == M ? a : liftN[a];
                                const auto& row = T.dv[x];
                                int64_t tN = 0;
                                for (int i = 0; i < G; ++i) {
                                    if (i == T.pgen || exps[i] == 0) continue;
                                    tN = (tN + (exps[i] * eN / orders[i]) % eN * row[i]) % eN;
                                }
                                int64_t kp = row[T.pgen];
                                int64_t uu = (p - 1 - j * kp % (p - 1)) % (p - 1);
                                int64_t tt = (eN - tN) % eN;
                                bucket[tt * (p - 1) + uu] += a * a;
                            }
                            ExtScalar A = ex_zero(ctx.R, mscan);
                            for (int64_t t = 0; t < eN; ++t)
                                for (int64_t u = 0; u < p - 1; ++u) {
                                    const Int& b = bucket[t * (p - 1) + u];
                                    if (b == 0) continue;
                                    A = ex_add(A, ex_mul_int(ex_mul(ctx.zpow[t], ctx.tpow[u]), b));
                                }
                            auto vAq = ex_valuation(A);
                            int vA = vAq.value_or(mscan);
                            if (vA >= 1 + vpf) {
                                EisensteinFixture fx;
                                fx.p = p;
                                fx.N = N;
                                fx.theta = make_character(M, exps);
                                fx.p_split = (f == N) && j == 0 && tNp == 0;
                                // report the valuation from the general-path value,
                                // cross-checking the bucketed fast path
                                auto Rbig = make_unramified_ring(p, eN, 6);
                                auto Bg = generalized_bernoulli(
                                    2, char_primitive(char_inverse(fx.theta)), Rbig, 5);
                                auto vB = ex_valuation(Bg);
                                if (vAq.has_value()) {
                                    assert(vB.has_value() && *vB == *vAq - vpf);
                                    fx.b2_valuation = *vB;
                                } else {
                                    assert(!vB.has_value() || *vB >= mscan - vpf);
                                    fx.b2_valuation = vB.value_or(Bg.m);
                                }
                                out.push_back(std::move(fx));
                            }
                        }
                    }
                }
                // odometer
                int i = 0;
                while (i < G && ++exps[i] == orders[i]) exps[i++] = 0;
                if (i == G) break;
            }
        }
    }
    return out;
}

SylowDatum sylow_datum(int64_t p, int64_t N) {
    if (N < 1 || p < 2 || (N > 1 && std::gcd(p, N) != 1))
        throw std::invalid_argument("sylow_datum: need N >= 1 coprime to p");
    SylowDatum S;
    S.p = p;
    S.N = N;
    S.dlog.assign(std::max<int64_t>(N, 1), -1);
    int64_t ph = euler_phi(N);
    int64_t d = 1;
    while (ph % (d * p) == 0) d *= p;
    S.d = d;
    if (d == 1) {
        S.g = 1;
        S.sigma_pow = 0;
        for (int64_t a = 0; a < N; ++a)
            if (std::gcd(a, N) == 1) S.dlog[a] = 0;
        if (N == 1) S.dlog.assign(1, 0); // the unit group is trivial
        return S;
    }
    // Sylow projection a -> a^e: e = 0 mod (phi/d), e = 1 mod d.
    int64_t q = ph / d;
    int64_t e = q;
    while (e % d != 1) e += q;
    // An element of maximal order in the Sylow subgroup; the subgroup is
    // cyclic iff that order reaches d.
    int64_t g = 1, gord = 1;
    for (int64_t a = 2; a < N; ++a) {
        if (std::gcd(a, N) != 1) continue;
        int64_t y = powmod64(a, e, N);
        int64_t o = 1, z = y;
        while (z != 1) { z = z * y % N; ++o; }
        if (o > gord) { gord = o; g = y; }
        if (gord == d) break;
    }
    if (gord != d)
        throw std::domain_error("sylow_datum: p-Sylow subgroup of (Z/N)^x is not cyclic");
    S.g = g;
    std::vector<int64_t> where(N, -1);
    int64_t pw = 1;
    for (int64_t k = 0; k < d; ++k) { where[pw] = k; pw = pw * g % N; }
    assert(pw == 1);
    for (int64_t a = 1; a < N; ++a) {
        if (std::gcd(a, N) != 1) continue;
        int64_t k = where[powmod64(a, e, N)];
        assert(k >= 0 && "Sylow projection landed off the cycle");
        S.dlog[a] = k;
    }
    S.sigma_pow = S.dlog[p % N];
    return S;
}

} // namespace iwa
