#pragma once

// Kubota-Leopoldt L-series as elements of R[[X]]: Newton interpolation
// through consecutive (t^s - 1)-nodes with a held-out audit, the
// exponent-convention substitution, and mu = 0 certificates.

#include "iwa/characters.hpp"
#include "iwa/series.hpp"

#include <array>

namespace iwa {

// Ties the series variable to the interpolation exponents:
//   OnTheta:  xi(t^k - 1) = Lp(theta, 1 - k),               k = 1, 2, ...
//   OnTwist:  xi(t^s - 1) = Lp(omega^2 theta^{-1}, s - 1),  s = 1, 0, -1, ...
// OnTwist is the convention of record for Eisenstein fixtures: at X = 0 it
// gives xi(0) = -(1 - theta^{-1}(p) p) B_{2,theta^{-1}} / 2.
enum class XiConvention { OnTheta, OnTwist };

struct XiBuild {
    PowerSeries xi;                      // truncation n, coefficients mod p^m
    std::array<long, 2> audit_exponents; // the held-out node exponents
    int audit_precision = 0;             // digits at which the held-outs matched
};

// Working precision the build requests from lp_value: the node count K =
// max(n+2, m+n-1) makes the interpolant agree with the series coefficient-
// by-coefficient mod p^m below X^n (truncation-tail valuation K - deg), and
// the divided-difference ledger charges (K-1) + v_p((K-1)!).  Callers must
// construct rings with m_max at least this.
int xi_build_precision(int64_t p, int m, int n);

// Ring precision cap that comfortably hosts the build: the lp_value calls
// need headroom beyond xi_build_precision for v_p(node index) (<= 2),
// v_p(conductor) (<= 1) and the Bernoulli-denominator lcm (squarefree by
// von Staudt-Clausen, so <= 1).
int xi_ring_cap(int64_t p, int m, int n);

// Interpolate, reduce to (p^m, X^n), then certify against lp_value at two
// further held-out nodes (logic_error if they disagree -- that would mean
// the interpolant is not the L-series).  R must host theta's values.
XiBuild xi_interpolate(const DirichletCharacter& theta, XiConvention conv,
                       const Generator& gen, const Ring& R, int m, int n);

// Rewrite an OnTwist series for theta as the OnTheta series of
// omega^2 theta^{-1}: with Y = t^k - 1 and s = 2 - k,
//   t^s - 1 = (t^2 - 1 - Y) / (1 + Y).
PowerSeries xi_twist_to_theta(const PowerSeries& xi_twist, const Generator& gen);

// Certificate that f has no p-power content: the index of the first unit
// coefficient (= the lambda invariant when combined with the Weierstrass
// factorization).  Indeterminate when no coefficient below the truncation
// is a unit -- at this precision mu = 0 cannot be certified.
int mu_zero_lambda(const PowerSeries& f);

} // namespace iwa
