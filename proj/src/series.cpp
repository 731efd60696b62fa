// Truncated power-series layer: Lambda-arithmetic mod (p^m, X^n), Weierstrass
// preparation by one-p-digit-at-a-time Hensel lifting, the bivariate box ring
// with the diagonalization map X |-> X + V + XV, difference quotients, and
// Newton interpolation with exact division ledgering.

#include "iwa/series.hpp"
#include "iwa/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cassert>
#include <climits>
#include <cmath>

namespace iwa {

namespace {

void check_same_ring(const Ring& a, const Ring& b)
{
    assert(a && b);
    assert(a->name == b->name && a->p == b->p && a->deg == b->deg);
}

// Dense polynomial product of coefficient vectors, truncated at `cap` terms.
std::vector<ExtScalar> sp_mul(const Ring& R, int m,
                              const std::vector<ExtScalar>& a,
                              const std::vector<ExtScalar>& b, size_t cap)
{
    std::vector<ExtScalar> out(std::min(cap, a.empty() || b.empty() ? size_t{0} : a.size() + b.size() - 1),
                               ex_zero(R, m));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size() && i + j < out.size(); ++j)
            out[i + j] = ex_add(out[i + j], ex_mul(a[i], b[j]));
    return out;
}

Int factorial(int k)
{
    Int f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

} // namespace

// ------------------------------------------------------------- constructors

PowerSeries ps_zero(const Ring& R, int m, int n)
{
    PowerSeries f;
    f.ring = R; f.m = m; f.n = n; f.pole = 0;
    f.c.assign((size_t)n, ex_zero(R, m));
    return f;
}

PowerSeries ps_one(const Ring& R, int m, int n)
{
    PowerSeries f = ps_zero(R, m, n);
    assert(n >= 1);
    f.c[0] = ex_one(R, m);
    return f;
}

PowerSeries ps_x(const Ring& R, int m, int n)
{
    PowerSeries f = ps_zero(R, m, n);
    assert(n >= 2);
    f.c[1] = ex_one(R, m);
    return f;
}

PowerSeries ps_from_coeffs(std::vector<ExtScalar> cs, int n)
{
    assert(!cs.empty());
    PowerSeries f;
    f.ring = cs[0].ring;
    f.m = cs[0].m;
    for (const auto& x : cs) { check_same_ring(f.ring, x.ring); f.m = std::min(f.m, x.m); }
    f.n = n; f.pole = 0;
    cs.resize((size_t)n, ex_zero(f.ring, f.m));
    for (auto& x : cs) x = ex_reduce_prec(x, f.m);
    f.c = std::move(cs);
    return f;
}

PowerSeries ps_reduce(const PowerSeries& a, int m, int n)
{
    assert(m <= a.m && n <= a.n);
    PowerSeries f;
    f.ring = a.ring; f.m = m; f.n = n; f.pole = a.pole;
    f.c.reserve((size_t)(n + a.pole));
    for (int k = -a.pole; k < n; ++k) f.c.push_back(ex_reduce_prec(a.coeff(k), m));
    return f;
}

// --------------------------------------------------------------- arithmetic

PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b)
{
    check_same_ring(a.ring, b.ring);
    PowerSeries f;
    f.ring = a.ring;
    f.m = std::min(a.m, b.m);
    f.n = std::min(a.n, b.n);
    f.pole = std::max(a.pole, b.pole);
    f.c.assign((size_t)(f.n + f.pole), ex_zero(f.ring, f.m));
    for (int k = -f.pole; k < f.n; ++k) {
        ExtScalar s = ex_zero(f.ring, f.m);
        if (k >= -a.pole) s = ex_add(s, ex_reduce_prec(a.coeff(k), f.m));
        if (k >= -b.pole) s = ex_add(s, ex_reduce_prec(b.coeff(k), f.m));
        f.coeff(k) = s;
    }
    return f;
}

PowerSeries ps_neg(const PowerSeries& a)
{
    PowerSeries f = a;
    for (auto& x : f.c) x = ex_neg(x);
    return f;
}

PowerSeries ps_sub(const PowerSeries& a, const PowerSeries& b) { return ps_add(a, ps_neg(b)); }

PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b)
{
    check_same_ring(a.ring, b.ring);
    if (a.pole + b.pole > 1)
        throw std::domain_error("ps_mul: pole order of a product exceeds 1");
    const int m = std::min(a.m, b.m);
    // Shifted views: a = X^{-pa} A with A regular of length n_a + p_a.
    const int cap = std::min(a.n + a.pole, b.n + b.pole);
    std::vector<ExtScalar> A(a.c), B(b.c);
    for (auto& x : A) x = ex_reduce_prec(x, m);
    for (auto& x : B) x = ex_reduce_prec(x, m);
    std::vector<ExtScalar> C = sp_mul(a.ring, m, A, B, (size_t)cap);
    C.resize((size_t)cap, ex_zero(a.ring, m));
    PowerSeries f;
    f.ring = a.ring; f.m = m; f.pole = a.pole + b.pole;
    f.n = cap - f.pole;
    f.c = std::move(C);
    return f;
}

PowerSeries ps_mul_scalar(const PowerSeries& a, const ExtScalar& s)
{
    check_same_ring(a.ring, s.ring);
    PowerSeries f = a;
    f.m = std::min(a.m, s.m);
    for (auto& x : f.c) x = ex_mul(ex_reduce_prec(x, f.m), ex_reduce_prec(s, f.m));
    return f;
}

bool ps_eq(const PowerSeries& a, const PowerSeries& b)
{
    check_same_ring(a.ring, b.ring);
    const int m = std::min(a.m, b.m);
    const int n = std::min(a.n, b.n);
    for (int k = -std::max(a.pole, b.pole); k < n; ++k) {
        ExtScalar x = (k >= -a.pole) ? ex_reduce_prec(a.coeff(k), m) : ex_zero(a.ring, m);
        ExtScalar y = (k >= -b.pole) ? ex_reduce_prec(b.coeff(k), m) : ex_zero(b.ring, m);
        if (!ex_eq(x, y)) return false;
    }
    return true;
}

PowerSeries ps_derivative(const PowerSeries& a)
{
    assert(a.pole == 0);
    assert(a.n >= 1);
    PowerSeries f = ps_zero(a.ring, a.m, a.n - 1);
    for (int k = 1; k < a.n; ++k)
        f.c[(size_t)(k - 1)] = ex_mul_int(a.c[(size_t)k], k);
    return f;
}

PowerSeries ps_inverse(const PowerSeries& a)
{
    assert(a.pole == 0 && a.n >= 1);
    if (!ex_is_unit(a.c[0]))
        throw NonUnitInverse("ps_inverse: constant term is not a unit");
    PowerSeries r = ps_zero(a.ring, a.m, a.n);
    r.c[0] = ex_inverse(a.c[0]);
    // Newton: r <- r(2 - a r); X-adic accuracy doubles per step.
    int steps = 1;
    while ((1 << steps) < a.n) ++steps;
    PowerSeries two = ps_mul_scalar(ps_one(a.ring, a.m, a.n), ex_from_int(a.ring, a.m, 2));
    for (int s = 0; s < steps; ++s)
        r = ps_mul(r, ps_sub(two, ps_mul(a, r)));
    assert(ps_eq(ps_mul(a, r), ps_one(a.ring, r.m, a.n)));
    return r;
}

PowerSeries ps_substitute(const PowerSeries& f, const PowerSeries& g)
{
    check_same_ring(f.ring, g.ring);
    assert(f.pole == 0 && g.pole == 0);
    assert(f.n >= 1 && g.n >= 1);
    const int m = std::min(f.m, g.m);
    const int e = g.ring->ram_e();
    // Tail terms a_i g^i for i >= n_f leak into LOW coefficients when
    // g(0) != 0: the Y^l coefficient of g^i picks up at least i - l factors
    // of g(0), so coefficient l is only correct mod p^{(n_f - l) v(g0)}.
    // Keep the largest single precision and shrink the truncation to match.
    auto v0 = ex_valuation(g.c[0]);
    int vge = v0 ? *v0 : e * g.c[0].m;
    if (vge < e)
        throw ConvergenceDomain("ps_substitute: constant term of inner series is not in the maximal ideal");
    int m_out = std::min(m, (int)(((long)f.n * vge) / e));
    int n_out = f.n - (int)(((long)m_out * e + vge - 1) / vge) + 1;
    assert(m_out >= 1 && n_out >= 1);
    PowerSeries acc = ps_zero(f.ring, m, g.n);
    acc.c[0] = ex_reduce_prec(f.c[(size_t)(f.n - 1)], m);
    for (int i = f.n - 2; i >= 0; --i) {
        acc = ps_mul(acc, g);
        acc.c[0] = ex_add(acc.c[0], ex_reduce_prec(f.c[(size_t)i], acc.m));
    }
    return ps_reduce(acc, std::min(m_out, acc.m), std::min(n_out, acc.n));
}

ExtScalar ps_eval(const PowerSeries& f, const ExtScalar& x)
{
    check_same_ring(f.ring, x.ring);
    assert(f.n >= 1);
    const int m = std::min(f.m, x.m);
    const int e = f.ring->ram_e();
    auto vx = ex_valuation(x);
    int vxe = vx ? *vx : e * x.m;
    if (vxe < 1)
        throw ConvergenceDomain("ps_eval: point is not in the maximal ideal");
    ExtScalar acc = ex_reduce_prec(f.coeff(f.n - 1), m);
    for (int k = f.n - 2; k >= 0; --k)
        acc = ex_add(ex_mul(acc, x), ex_reduce_prec(f.coeff(k), m));
    if (f.pole == 1)
        acc = ex_add(acc, ex_div_val(ex_reduce_prec(f.coeff(-1), m), x));
    int tail = (int)(((long)f.n * vxe) / e);
    return ex_reduce_prec(acc, std::min(acc.m, std::min(m, tail)));
}

nlohmann::json ps_to_json(const PowerSeries& a)
{
    nlohmann::json j;
    j["ring"] = a.ring->name;
    j["precision"] = a.m;
    j["trunc"] = a.n;
    j["pole"] = a.pole;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& x : a.c) arr.push_back(ex_to_json(x));
    j["coeffs"] = arr;
    return j;
}

PowerSeries ps_from_json(const Ring& R, const nlohmann::json& j)
{
    PowerSeries f;
    f.ring = R;
    assert(j.at("ring").get<std::string>() == R->name);
    f.m = j.at("precision").get<int>();
    f.n = j.at("trunc").get<int>();
    f.pole = j.at("pole").get<int>();
    for (const auto& cj : j.at("coeffs")) f.c.push_back(ex_from_json(R, cj));
    assert((int)f.c.size() == f.n + f.pole);
    return f;
}

// ---------------------------------------------------------------- generator

Generator make_generator(GeneratorKind kind, int64_t p, int m)
{
    assert(p >= 3);
    Generator g;
    g.kind = kind;
    g.p = p;
    Ring Zp = make_zp_ring(p, m);
    if (kind == GeneratorKind::Simple) {
        g.t = ex_add(ex_one(Zp, m), ex_from_int(Zp, m, p));
    } else {
        // chi(t) = 1 for chi = (1 - 1/p) log  <=>  log t = p/(p-1).
        ExtScalar a = ex_mul(ex_from_int(Zp, m, p),
                             ex_inverse(ex_from_int(Zp, m, p - 1)));
        g.t = padic_exp(a);
    }
    g.log_t = padic_log(g.t);
    return g;
}

ExtScalar ts_node(const Generator& g, const Ring& R, int m, long s)
{
    // t is a rational integer unit; embed as a constant of R.
    assert(R->p == g.p);
    int mm = std::min(m, g.t.m);
    ExtScalar t = ex_from_int(R, mm, g.t.c[0]);
    ExtScalar ts = (s >= 0) ? ex_pow(t, (uint64_t)s)
                            : ex_inverse(ex_pow(t, (uint64_t)(-s)));
    return ex_sub(ts, ex_one(R, mm));
}

ExtScalar ps_eval_ts(const PowerSeries& f, const Generator& g, long s)
{
    return ps_eval(f, ts_node(g, f.ring, f.m, s));
}

// ------------------------------------------------------------- Weierstrass

WeierstrassData weierstrass_data(const PowerSeries& f)
{
    assert(f.pole == 0);
    assert(f.ring->kind == RingKind::Unramified);
    const int n = f.n, m = f.m;
    assert(n >= 1);

    int mu = INT_MAX;
    for (const auto& x : f.c) {
        auto v = ex_valuation(x);
        if (v) mu = std::min(mu, *v);
    }
    if (mu == INT_MAX)
        throw Indeterminate("weierstrass_data: series vanishes at working precision");
    const int mm = m - mu;
    if (mm <= 0)
        throw Indeterminate("weierstrass_data: p-power content exhausts the precision");

    std::vector<ExtScalar> g((size_t)n, ex_zero(f.ring, mm));
    for (int i = 0; i < n; ++i) g[(size_t)i] = ex_div_pow_p(f.c[(size_t)i], mu);

    int lambda = -1;
    for (int i = 0; i < n; ++i)
        if (ex_is_unit(g[(size_t)i])) { lambda = i; break; }
    if (lambda < 0)
        throw Indeterminate("weierstrass_data: no unit coefficient below the truncation");

    // Hensel digits for g = P * U with P = X^lambda + (lower, p-divisible),
    // U a unit of length n - lambda.  Mod p the factorization is
    // g == X^lambda * Ubar, so each digit solves  dP*Ubar + X^lambda*dU == E
    // by splitting A = E * Ubar^{-1} at degree lambda.
    const int nu = n - lambda;
    std::vector<ExtScalar> P((size_t)lambda + 1, ex_zero(f.ring, mm));
    P[(size_t)lambda] = ex_one(f.ring, mm);
    std::vector<ExtScalar> U((size_t)nu, ex_zero(f.ring, mm));
    for (int j = 0; j < nu; ++j) U[(size_t)j] = g[(size_t)(lambda + j)];

    // Ubar^{-1} mod (p, X^n): constant term of U is a unit.
    std::vector<ExtScalar> Ubar((size_t)n, ex_zero(f.ring, 1));
    for (int j = 0; j < nu; ++j) Ubar[(size_t)j] = ex_reduce_prec(U[(size_t)j], 1);
    std::vector<ExtScalar> Uinv((size_t)n, ex_zero(f.ring, 1));
    Uinv[0] = ex_inverse(Ubar[0]);
    for (int i = 1; i < n; ++i) {
        ExtScalar s = ex_zero(f.ring, 1);
        for (int j = 1; j <= i; ++j)
            s = ex_add(s, ex_mul(Ubar[(size_t)j], Uinv[(size_t)(i - j)]));
        Uinv[(size_t)i] = ex_neg(ex_mul(s, Uinv[0]));
    }

    for (int k = 1; k < mm; ++k) {
        // E = (g - P U) / p^k, exact by the loop invariant.
        std::vector<ExtScalar> PU = sp_mul(f.ring, mm, P, U, (size_t)n);
        std::vector<ExtScalar> E((size_t)n, ex_zero(f.ring, mm - k));
        bool clean = true;
        for (int i = 0; i < n; ++i) {
            ExtScalar d = ex_sub(g[(size_t)i], i < (int)PU.size() ? PU[(size_t)i] : ex_zero(f.ring, mm));
            auto v = ex_valuation(d);
            if (v && *v < k) { clean = false; break; }
            E[(size_t)i] = ex_is_zero(d) ? ex_zero(f.ring, mm - k) : ex_div_pow_p(d, k);
        }
        assert(clean && "weierstrass_data: digit invariant violated");
        std::vector<ExtScalar> Ebar((size_t)n, ex_zero(f.ring, 1));
        for (int i = 0; i < n; ++i) Ebar[(size_t)i] = ex_reduce_prec(E[(size_t)i], 1);
        std::vector<ExtScalar> A = sp_mul(f.ring, 1, Ebar, Uinv, (size_t)n);
        A.resize((size_t)n, ex_zero(f.ring, 1));
        // dP = A_low, dU = Ubar * A_high (truncated at nu).
        std::vector<ExtScalar> Alow(A.begin(), A.begin() + lambda);
        std::vector<ExtScalar> Ahigh(A.begin() + lambda, A.end());
        std::vector<ExtScalar> dU = sp_mul(f.ring, 1, Ubar, Ahigh, (size_t)nu);
        dU.resize((size_t)nu, ex_zero(f.ring, 1));
        Int pk = ipow(Int(f.ring->p), (unsigned)k);
        // Lift the mod-p corrections to precision mm and add p^k * correction.
        auto lift_add = [&](ExtScalar& dst, const ExtScalar& digit) {
            ExtScalar wide = ex_zero(f.ring, mm);
            wide.c = digit.c; // residues 0..p-1 lift verbatim
            dst = ex_add(dst, ex_mul_int(wide, pk));
        };
        for (int i = 0; i < lambda; ++i) lift_add(P[(size_t)i], Alow[(size_t)i]);
        for (int j = 0; j < nu; ++j) lift_add(U[(size_t)j], dU[(size_t)j]);
    }

    // Certify: g == P * U mod (p^mm, X^n), P monic distinguished.
    {
        std::vector<ExtScalar> PU = sp_mul(f.ring, mm, P, U, (size_t)n);
        PU.resize((size_t)n, ex_zero(f.ring, mm));
        for (int i = 0; i < n; ++i)
            assert(ex_eq(PU[(size_t)i], g[(size_t)i]) && "weierstrass_data: re-multiplication failed");
        assert(ex_eq(P[(size_t)lambda], ex_one(f.ring, mm)));
        for (int i = 0; i < lambda; ++i) {
            auto v = ex_valuation(P[(size_t)i]);
            assert((!v || *v >= 1) && "weierstrass_data: factor is not distinguished");
        }
    }

    WeierstrassData w;
    w.mu = mu;
    w.lambda = lambda;
    w.P = std::move(P);
    w.U = ps_from_coeffs(U, nu);
    w.precision = mm;
    return w;
}

// ------------------------------------------------------------ bivariate box

BiSeries bs_zero(const Ring& R, int m, int nx, int nv)
{
    BiSeries b;
    b.ring = R; b.m = m; b.nx = nx; b.nv = nv;
    b.c.assign((size_t)nx * nv, ex_zero(R, m));
    return b;
}

BiSeries bs_add(const BiSeries& a, const BiSeries& b)
{
    check_same_ring(a.ring, b.ring);
    BiSeries f = bs_zero(a.ring, std::min(a.m, b.m), std::min(a.nx, b.nx), std::min(a.nv, b.nv));
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.nv; ++j)
            f.at(i, j) = ex_add(ex_reduce_prec(a.at(i, j), f.m), ex_reduce_prec(b.at(i, j), f.m));
    return f;
}

BiSeries bs_sub(const BiSeries& a, const BiSeries& b)
{
    check_same_ring(a.ring, b.ring);
    BiSeries f = bs_zero(a.ring, std::min(a.m, b.m), std::min(a.nx, b.nx), std::min(a.nv, b.nv));
    for (int i = 0; i < f.nx; ++i)
        for (int j = 0; j < f.nv; ++j)
            f.at(i, j) = ex_sub(ex_reduce_prec(a.at(i, j), f.m), ex_reduce_prec(b.at(i, j), f.m));
    return f;
}

BiSeries bs_mul(const BiSeries& a, const BiSeries& b)
{
    check_same_ring(a.ring, b.ring);
    BiSeries f = bs_zero(a.ring, std::min(a.m, b.m), std::min(a.nx, b.nx), std::min(a.nv, b.nv));
    for (int i = 0; i < a.nx && i < f.nx; ++i)
        for (int j = 0; j < a.nv && j < f.nv; ++j) {
            if (ex_is_zero(a.at(i, j))) continue;
            for (int k = 0; i + k < f.nx && k < b.nx; ++k)
                for (int l = 0; j + l < f.nv && l < b.nv; ++l)
                    f.at(i + k, j + l) = ex_add(f.at(i + k, j + l),
                                                ex_mul(ex_reduce_prec(a.at(i, j), f.m),
                                                       ex_reduce_prec(b.at(k, l), f.m)));
        }
    return f;
}

bool bs_eq(const BiSeries& a, const BiSeries& b)
{
    check_same_ring(a.ring, b.ring);
    const int m = std::min(a.m, b.m);
    const int nx = std::min(a.nx, b.nx), nv = std::min(a.nv, b.nv);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < nv; ++j)
            if (!ex_eq(ex_reduce_prec(a.at(i, j), m), ex_reduce_prec(b.at(i, j), m)))
                return false;
    return true;
}

BiSeries bs_from_x(const PowerSeries& f, int nv)
{
    assert(f.pole == 0);
    BiSeries b = bs_zero(f.ring, f.m, f.n, nv);
    for (int i = 0; i < f.n; ++i) b.at(i, 0) = f.c[(size_t)i];
    return b;
}

BiSeries bs_from_v(const PowerSeries& f, int nx)
{
    assert(f.pole == 0);
    BiSeries b = bs_zero(f.ring, f.m, nx, f.n);
    for (int j = 0; j < f.n; ++j) b.at(0, j) = f.c[(size_t)j];
    return b;
}

PowerSeries bs_restrict_x0(const BiSeries& a)
{
    PowerSeries f = ps_zero(a.ring, a.m, a.nv);
    for (int j = 0; j < a.nv; ++j) f.c[(size_t)j] = a.at(0, j);
    return f;
}

BiSeries bs_inverse(const BiSeries& a)
{
    if (!ex_is_unit(a.at(0, 0)))
        throw NonUnitInverse("bs_inverse: constant term is not a unit");
    BiSeries r = bs_zero(a.ring, a.m, a.nx, a.nv);
    r.at(0, 0) = ex_inverse(a.at(0, 0));
    BiSeries two = bs_zero(a.ring, a.m, a.nx, a.nv);
    two.at(0, 0) = ex_from_int(a.ring, a.m, 2);
    int steps = 1;
    while ((1 << steps) < (a.nx + a.nv) * a.m) ++steps;
    for (int s = 0; s <= steps; ++s)
        r = bs_mul(r, bs_sub(two, bs_mul(a, r)));
    BiSeries check = bs_mul(a, r);
    BiSeries one = bs_zero(a.ring, check.m, a.nx, a.nv);
    one.at(0, 0) = ex_one(a.ring, check.m);
    assert(bs_eq(check, one) && "bs_inverse: verification failed");
    return r;
}

BiSeries diagonalize(const PowerSeries& f, int nv)
{
    assert(f.pole == 0 && f.n >= 1);
    // S = X + V + XV; Horner from the top coefficient.
    BiSeries S = bs_zero(f.ring, f.m, f.n, nv);
    if (f.n >= 2) S.at(1, 0) = ex_one(f.ring, f.m);
    if (nv >= 2) S.at(0, 1) = ex_one(f.ring, f.m);
    if (f.n >= 2 && nv >= 2) S.at(1, 1) = ex_one(f.ring, f.m);
    BiSeries acc = bs_zero(f.ring, f.m, f.n, nv);
    acc.at(0, 0) = f.c[(size_t)(f.n - 1)];
    for (int i = f.n - 2; i >= 0; --i) {
        acc = bs_mul(acc, S);
        acc.at(0, 0) = ex_add(acc.at(0, 0), ex_reduce_prec(f.c[(size_t)i], acc.m));
    }
    return acc;
}

PowerSeries xi_n(const PowerSeries& f, int k)
{
    assert(f.pole == 0);
    assert(k >= 0 && k < f.n);
    if (k == 0) return f;
    PowerSeries d = f;
    for (int i = 0; i < k; ++i) d = ps_derivative(d);
    // Divide by k!: each coefficient a_{i+k} (i+k)!/i! is k! * binom(i+k,k),
    // so the p-power division is exact; the ledger still pays v_p(k!).
    Int kf = factorial(k);
    int vk = (int)valp(kf, f.ring->p);
    Int unit = kf / ipow(Int(f.ring->p), (unsigned)vk);
    ExtScalar uinv = ex_inverse(ex_from_int(f.ring, d.m - vk > 0 ? d.m - vk : 1, unit));
    PowerSeries q = ps_zero(f.ring, d.m - vk, d.n);
    if (d.m - vk <= 0)
        throw PrecisionExhausted("xi_n: factorial division exhausts the precision");
    for (int i = 0; i < d.n; ++i)
        q.c[(size_t)i] = ex_mul(ex_div_pow_p(d.c[(size_t)i], vk), uinv);
    // Multiply by (X+1)^k (a no-op mod X when the truncation is one term).
    if (q.n < 2) return q;
    PowerSeries xp1 = ps_add(ps_x(f.ring, q.m, q.n), ps_one(f.ring, q.m, q.n));
    PowerSeries out = q;
    for (int i = 0; i < k; ++i) out = ps_mul(out, xp1);
    return out;
}

BiSeries tilde_xi_1(const PowerSeries& f)
{
    assert(f.pole == 0 && f.n >= 2);
    BiSeries d = diagonalize(f, f.n);
    BiSeries num = bs_sub(d, bs_from_v(f, f.n));
    // X^0 slice of the numerator is f(V) - f(V) = 0.
    for (int j = 0; j < num.nv; ++j)
        assert(ex_is_zero(num.at(0, j)) && "tilde_xi_1: X^0 slice does not vanish");
    BiSeries out = bs_zero(f.ring, num.m, num.nx - 1, num.nv);
    for (int i = 0; i + 1 < num.nx; ++i)
        for (int j = 0; j < num.nv; ++j)
            out.at(i, j) = num.at(i + 1, j);
    return out;
}

// ------------------------------------------------------------ interpolation

ExtScalar ex_div_val(const ExtScalar& a, const ExtScalar& b)
{
    check_same_ring(a.ring, b.ring);
    auto v = ex_valuation(b);
    if (!v)
        throw NonUnitInverse("ex_div_val: divisor vanishes at working precision");
    const int e = b.ring->ram_e();
    assert(*v % e == 0 && "ex_div_val: fractional valuation divisor");
    const int vp = *v / e;
    if (vp == 0) return ex_mul(a, ex_inverse(b));
    // a/b = (a/p^v) * (b/p^v)^{-1}: one ledger charge of v, and the
    // division of the numerator is the honest divisibility check.
    ExtScalar apart = ex_div_pow_p(a, vp);
    ExtScalar u = ex_div_pow_p(b, vp);
    return ex_mul(apart, ex_inverse(u));
}

PowerSeries newton_interpolate(const std::vector<ExtScalar>& nodes,
                               const std::vector<ExtScalar>& values)
{
    assert(!nodes.empty() && nodes.size() == values.size());
    const Ring R = nodes[0].ring;
    const int N = (int)nodes.size();
    // In-place divided differences, sweeping downward so dd[i] ends as the
    // Newton coefficient f[x_0, ..., x_i].
    std::vector<ExtScalar> dd(values);
    for (int lvl = 1; lvl < N; ++lvl)
        for (int i = N - 1; i >= lvl; --i)
            dd[(size_t)i] = ex_div_val(ex_sub(dd[(size_t)i], dd[(size_t)(i - 1)]),
                                       ex_sub(nodes[(size_t)i], nodes[(size_t)(i - lvl)]));
    int m_out = dd[0].m;
    for (const auto& d : dd) m_out = std::min(m_out, d.m);
    // Horner assembly: F = dd[0] + (X - x_0)(dd[1] + (X - x_1)(...)).
    PowerSeries F = ps_zero(R, m_out, N);
    F.c[0] = ex_reduce_prec(dd[(size_t)(N - 1)], m_out);
    for (int i = N - 2; i >= 0; --i) {
        PowerSeries lin = ps_zero(R, m_out, N);
        lin.c[0] = ex_neg(ex_reduce_prec(nodes[(size_t)i], m_out));
        lin.c[1] = ex_one(R, m_out);
        F = ps_mul(F, lin);
        F.c[0] = ex_add(F.c[0], ex_reduce_prec(dd[(size_t)i], F.m));
    }
    return F;
}

} // namespace iwa
