#pragma once

// Precision-tracked p-adic arithmetic.
//
// Two scalar layers:
//   PadicScalar       -- an element of Z/p^m viewed as a Z_p approximation;
//                        m is the absolute precision ledger.
//   ExtScalar         -- an element of O/p^m where O is one of
//                          (i)  Z_p[zeta_d], p coprime to d, presented as
//                               Z_p[x]/(g) for a monic factor g | Phi_d
//                               (unramified; x-class = zeta_d), or
//                          (ii) Z_p[zeta_p], presented as Z_p[pi]/(E) with
//                               E(pi) = Phi_p(1+pi) Eisenstein
//                               (pi-class = zeta_p - 1).
//                        All coefficients share one precision m.
//
// Every operation states its precision effect; anything that divides by p
// charges the ledger and refuses to drop to zero certified digits.

#include "iwa/bigint.hpp"
#include "iwa/errors.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace iwa {

struct PadicScalar {
    Int value;      // representative in [0, p^m)
    int64_t prime = 0;
    int precision = 0;

    PadicScalar() = default;
    PadicScalar(Int v, int64_t p, int m) : value(umod(v, ipow(p, m))), prime(p), precision(m) {}
};

PadicScalar pa_add(const PadicScalar& a, const PadicScalar& b);
PadicScalar pa_sub(const PadicScalar& a, const PadicScalar& b);
PadicScalar pa_mul(const PadicScalar& a, const PadicScalar& b);
PadicScalar pa_neg(const PadicScalar& a);
PadicScalar pa_inverse(const PadicScalar& a); // NonUnitInverse if p | value
// v_p of the representative; nullopt when 0 at working precision (v >= m).
std::optional<int> pa_valuation(const PadicScalar& a);
// Exact division by p^k; drops precision by k. PrecisionExhausted if the
// ledger would empty, std::domain_error if the value is not divisible.
PadicScalar pa_div_pow_p(const PadicScalar& a, int k);
// Teichmuller representative omega(a): the (p-1)-st root of unity with
// omega(a) = a mod p (0 for p | a). Fixed point of x -> x^p.
PadicScalar teichmuller(const PadicScalar& a);

// ----------------------------------------------------------------------------

enum class RingKind { Unramified, RamifiedP };

// Immutable descriptor of the coefficient ring, shared by its elements.
// Constructed once at a maximal precision m_max; elements carry m <= m_max.
struct RingDesc {
    RingKind kind = RingKind::Unramified;
    int64_t p = 0;
    int64_t d = 1;       // root-of-unity order: zeta_d (unramified) / p (ramified)
    int deg = 1;         // residue degree f (unramified) / p-1 (ramified)
    int m_max = 0;
    std::vector<Int> modulus;   // monic, length deg+1, coefficients mod p^m_max
    std::vector<Int> frob_mat;  // deg x deg, column-major: j-th column = frob(x^j);
                                // identity for ramified (unramified part is Z_p)
    std::string name;           // e.g. "Zp5[zeta13]f4"
    // ramification index: 1 (unramified) or p-1 (ramified)
    int ram_e() const { return kind == RingKind::RamifiedP ? deg : 1; }
};

using Ring = std::shared_ptr<const RingDesc>;

// Deterministic construction (no randomness: candidate enumeration is by
// lexicographic order, so equal (p,d,m) always yields the identical modulus).
Ring make_unramified_ring(int64_t p, int64_t d, int m_max);
Ring make_ramified_ring(int64_t p, int m_max);
inline Ring make_zp_ring(int64_t p, int m_max) { return make_unramified_ring(p, 1, m_max); }

struct ExtScalar {
    Ring ring;
    int m = 0;           // shared absolute precision of all coefficients
    std::vector<Int> c;  // length ring->deg, entries in [0, p^m)

    ExtScalar() = default;
    ExtScalar(Ring R, int prec);                 // zero
    ExtScalar(Ring R, int prec, const Int& c0);  // constant c0
};

ExtScalar ex_zero(const Ring& R, int m);
ExtScalar ex_one(const Ring& R, int m);
ExtScalar ex_from_int(const Ring& R, int m, const Int& a);
// x-class: zeta_d for unramified rings, pi = zeta_p - 1 for the ramified one.
ExtScalar ex_gen(const Ring& R, int m);
ExtScalar ex_add(const ExtScalar& a, const ExtScalar& b);
ExtScalar ex_sub(const ExtScalar& a, const ExtScalar& b);
ExtScalar ex_neg(const ExtScalar& a);
ExtScalar ex_mul(const ExtScalar& a, const ExtScalar& b);
ExtScalar ex_mul_int(const ExtScalar& a, const Int& k);
ExtScalar ex_pow(const ExtScalar& a, Int e);
bool ex_is_zero(const ExtScalar& a);
bool ex_eq(const ExtScalar& a, const ExtScalar& b); // at min precision
ExtScalar ex_reduce_prec(const ExtScalar& a, int m);

// Valuation in units of 1/ram_e (so: ordinary v_p for unramified rings,
// multiples of 1/(p-1) for Z_p[zeta_p]).  nullopt = zero at working precision.
std::optional<int> ex_valuation(const ExtScalar& a);
// Unit test at working precision (valuation zero).
bool ex_is_unit(const ExtScalar& a);
ExtScalar ex_inverse(const ExtScalar& a); // NonUnitInverse on non-units
// Exact division by p^k with ledger charge k.
ExtScalar ex_div_pow_p(const ExtScalar& a, int k);
// Division by a unit.
ExtScalar ex_div(const ExtScalar& a, const ExtScalar& b);

// Arithmetic Frobenius x -> x^p on the unramified part, iterated r times
// (identity on Z_p[zeta_p]). r may be negative (inverse Frobenius).
ExtScalar frobenius(const ExtScalar& a, int r = 1);
// Teichmuller lift in an unramified ring: the (p^f - 1)-st root of unity
// congruent to a mod p (0 if a is not a unit... that case returns 0 only for
// a = 0 mod p on all coordinates).
ExtScalar ex_teichmuller(const ExtScalar& a);

// log(a) for v(a - 1) > 0; ConvergenceDomain otherwise.  Result precision is
// m minus the accumulated division charge (documented in padic.cpp).
ExtScalar padic_log(const ExtScalar& a);
// exp(a) for v(a) > 1/(p-1); ConvergenceDomain otherwise.
ExtScalar padic_exp(const ExtScalar& a);

// Serialization: {"prime": p, "precision": m, "coeffs": ["dec", ...]}.
// Round-trips bit-exactly at equal precision (ring passed out of band).
nlohmann::json ex_to_json(const ExtScalar& a);
ExtScalar ex_from_json(const Ring& R, const nlohmann::json& j);

// --- integer polynomial helpers (used by ring construction, series code and
//     the cyclotomic-rational layer; coefficients low-degree-first) ---
namespace poly {

using IPoly = std::vector<Int>;

void trim(IPoly& a);
IPoly mul(const IPoly& a, const IPoly& b);
IPoly mulmod(const IPoly& a, const IPoly& b, const IPoly& mod, const Int& pk);
// Remainder of a by monic mod, coefficients reduced mod pk.
IPoly rem(IPoly a, const IPoly& mod, const Int& pk);
// Quotient/remainder by monic divisor over Z/pk.
std::pair<IPoly, IPoly> divmod(IPoly a, const IPoly& b, const Int& pk);
IPoly powmod(IPoly base, Int e, const IPoly& mod, const Int& pk);
// Exact division of integer polynomials (asserts exactness).
IPoly exact_div(const IPoly& a, const IPoly& b);
// Cyclotomic polynomial Phi_n as an exact integer polynomial.
IPoly cyclotomic(int64_t n);

} // namespace poly

} // namespace iwa
