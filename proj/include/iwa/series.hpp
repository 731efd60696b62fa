#pragma once

// Truncated power series over the scalar layer: Lambda = O[[X]] mod (p^m, X^n),
// plus the two-variable box O[[X,V]] mod (p^m, X^nx, V^nv) used by the
// diagonalization identities, and Newton interpolation through
// (t^{s}-1)-nodes, which is how every L-series here gets built.

#include "iwa/padic.hpp"

#include <nlohmann/json_fwd.hpp>

namespace iwa {

struct PowerSeries {
    Ring ring;
    int m = 0;    // shared coefficient precision
    int n = 0;    // X-truncation: coefficients X^0 .. X^{n-1}
    int pole = 0; // 0 or 1; if 1 there is an extra leading X^{-1} coefficient
    std::vector<ExtScalar> c; // size n + pole, lowest degree first

    const ExtScalar& coeff(int k) const { return c[(size_t)(k + pole)]; } // k >= -pole
    ExtScalar& coeff(int k) { return c[(size_t)(k + pole)]; }
};

PowerSeries ps_zero(const Ring& R, int m, int n);
PowerSeries ps_one(const Ring& R, int m, int n);
PowerSeries ps_x(const Ring& R, int m, int n);
PowerSeries ps_from_coeffs(std::vector<ExtScalar> cs, int n); // pads/truncates to n
PowerSeries ps_add(const PowerSeries& a, const PowerSeries& b);
PowerSeries ps_sub(const PowerSeries& a, const PowerSeries& b);
PowerSeries ps_neg(const PowerSeries& a);
PowerSeries ps_mul(const PowerSeries& a, const PowerSeries& b); // pole(a)+pole(b) <= 1
PowerSeries ps_mul_scalar(const PowerSeries& a, const ExtScalar& s);
bool ps_eq(const PowerSeries& a, const PowerSeries& b); // at min precision/truncation
PowerSeries ps_reduce(const PowerSeries& a, int m, int n);
PowerSeries ps_derivative(const PowerSeries& a); // d/dX, truncation drops by 1
// Inverse of a series with unit constant term (pole = 0).
PowerSeries ps_inverse(const PowerSeries& a);
// f(g) for pole-free f; requires v(g(0)) >= 1 or g(0) = 0.  The truncated
// tail of f leaks into coefficient l at order (n_f - l) v(g(0)), so the
// result keeps precision min(m, n_f v0) and shrinks its truncation to the
// coefficients certified at that precision.
PowerSeries ps_substitute(const PowerSeries& f, const PowerSeries& g);
// f(x) for v(x) >= 1; reported precision discounts the tail bound p^{n*v(x)}.
// A pole coefficient must be divisible by p^{v(x)} (exact division, ledgered).
ExtScalar ps_eval(const PowerSeries& f, const ExtScalar& x);

nlohmann::json ps_to_json(const PowerSeries& a);
PowerSeries ps_from_json(const Ring& R, const nlohmann::json& j);

// ---------------------------------------------------------------- generator

enum class GeneratorKind { Simple, Normalized };

// Topological generator t of 1 + pZ_p.  Simple: t = 1 + p.
// Normalized: chi(t) = 1 for chi = (1 - 1/p) log, i.e. t = exp(p/(p-1)).
struct Generator {
    GeneratorKind kind = GeneratorKind::Simple;
    int64_t p = 0;
    ExtScalar t;     // in the Z_p ring at construction precision
    ExtScalar log_t; // cached padic_log(t)
};

Generator make_generator(GeneratorKind kind, int64_t p, int m);
// t^s - 1 for integer s (exact power; negative s allowed).
ExtScalar ts_node(const Generator& g, const Ring& R, int m, long s);
// f(t^s - 1)
ExtScalar ps_eval_ts(const PowerSeries& f, const Generator& g, long s);

// ------------------------------------------------------------- Weierstrass

struct WeierstrassData {
    int mu = 0;                  // p-power content
    int lambda = 0;              // degree of the distinguished polynomial
    std::vector<ExtScalar> P;    // monic distinguished polynomial, length lambda+1
    PowerSeries U;               // unit cofactor: f = p^mu * P * U
    int precision = 0;           // certified coefficient precision of P and U
};

// Indeterminate if every coefficient is 0 mod p^m or no unit coefficient
// appears below the truncation.  Verifies f = p^mu P U before returning.
WeierstrassData weierstrass_data(const PowerSeries& f);

// ---------------------------------------------------------- bivariate box

struct BiSeries {
    Ring ring;
    int m = 0;
    int nx = 0, nv = 0;
    std::vector<ExtScalar> c; // c[i*nv + j] = coefficient of X^i V^j

    const ExtScalar& at(int i, int j) const { return c[(size_t)i * nv + j]; }
    ExtScalar& at(int i, int j) { return c[(size_t)i * nv + j]; }
};

BiSeries bs_zero(const Ring& R, int m, int nx, int nv);
BiSeries bs_add(const BiSeries& a, const BiSeries& b);
BiSeries bs_sub(const BiSeries& a, const BiSeries& b);
BiSeries bs_mul(const BiSeries& a, const BiSeries& b);
bool bs_eq(const BiSeries& a, const BiSeries& b);
// f placed along the X-axis (V-degree 0) / along the V-axis (X-degree 0).
BiSeries bs_from_x(const PowerSeries& f, int nv);
BiSeries bs_from_v(const PowerSeries& f, int nx);
PowerSeries bs_restrict_x0(const BiSeries& a); // row i = 0, as a series in V
// Two-sided inverse in the box ring (unit constant term required).
BiSeries bs_inverse(const BiSeries& a);

// f(X + V + XV) -- i.e. f((1+X)(1+V) - 1): the image of f under the
// comultiplication sending the group variable to its product.
BiSeries diagonalize(const PowerSeries& f, int nv);

// Difference quotient of order k: (X+1)^k (d^k f / dX^k) / k!.
// Truncation drops to n - k; the ledger is charged v_p(k!).
PowerSeries xi_n(const PowerSeries& f, int k);

// (diagonalize(f) - 1 (x) f) / X. The X^0 slice of the numerator must vanish
// identically (it equals f(V) - f(V)); asserted, then rows shift down.
BiSeries tilde_xi_1(const PowerSeries& f);

// --------------------------------------------------------------- interpolation

// Newton interpolation through (nodes[i], values[i]).  Divided differences
// divide by node differences: each level charges the minimal valuation of the
// differences it divides by (tracked exactly via unit-part inversion and
// p-power division).  Returns a series of truncation = #nodes.
PowerSeries newton_interpolate(const std::vector<ExtScalar>& nodes,
                               const std::vector<ExtScalar>& values);

// a / b where b = p^v * unit: exact ledgered division (domain_error if the
// numerator does not cooperate).
ExtScalar ex_div_val(const ExtScalar& a, const ExtScalar& b);

} // namespace iwa
