#pragma once

// Dirichlet characters with p-adic values, exact Bernoulli numbers,
// generalized Bernoulli numbers reduced into the coefficient ring R,
// Kubota-Leopoldt interpolation values, and the search for
// Eisenstein-irregular (p, N, theta) triples.
//
// A character is stored by its images on the canonical generators of
// (Z/M)^x (odd prime-power components: smallest primitive root; 2^b with
// b >= 3: the pair (-1, 5); modulus 4: the residue 3), each image recorded
// as an exponent of a root of unity of the generator's order.  p-adic
// values split canonically: the p-component of a character mod Np is a
// power of the Teichmueller character and is evaluated through teichmuller
// lifts; the prime-to-p part is evaluated through the distinguished root
// of unity of the unramified coefficient ring.

#include "iwa/bigint.hpp"
#include "iwa/padic.hpp"

#include <optional>
#include <string>
#include <vector>

namespace iwa {

struct DirichletCharacter {
    struct Gen {
        int64_t q = 1;     // prime-power component modulus
        int64_t g = 1;     // generator residue mod `modulus` (CRT-lifted)
        int64_t order = 1; // multiplicative order of g
    };
    int64_t modulus = 1;
    std::vector<Gen> gens;     // canonical generator set of (Z/modulus)^x
    std::vector<int64_t> exps; // chi(g_i) = zeta_{order_i}^{exps_i}
    // Derived on construction (never trusted from input):
    int64_t order = 1;     // order of chi
    int64_t conductor = 1; // conductor of chi
    int parity = +1;       // chi(-1)
};

std::vector<DirichletCharacter::Gen> unit_group_generators(int64_t modulus);
DirichletCharacter make_character(int64_t modulus, const std::vector<int64_t>& exps);
DirichletCharacter trivial_character(int64_t modulus);
// omega mod p: the character with omega(a) = teichmuller(a) mod p.
DirichletCharacter teichmuller_character(int64_t p);

// chi(x) as an exponent of zeta_{chi.order}; nullopt when gcd(x, modulus) > 1.
std::optional<int64_t> char_exp(const DirichletCharacter& chi, int64_t x);

DirichletCharacter char_mul(const DirichletCharacter& a, const DirichletCharacter& b);
DirichletCharacter char_pow(const DirichletCharacter& a, long k);
DirichletCharacter char_inverse(const DirichletCharacter& a);
DirichletCharacter char_primitive(const DirichletCharacter& a); // mod conductor
DirichletCharacter char_induce(const DirichletCharacter& a, int64_t modulus);
bool char_eq(const DirichletCharacter& a, const DirichletCharacter& b); // as primitive

// Order of the prime-to-p part of the value group: the ring hosting chi's
// values must be built with a distinguished root of unity of this order
// (or a multiple); the p-part is served by teichmuller lifts.
int64_t char_field_order(const DirichletCharacter& chi, int64_t p);

// chi(x) in R (0 when gcd(x, modulus) > 1).  Requires the p-part of the
// modulus to be exactly p, and char_field_order | R's root order.
ExtScalar char_value_in(const DirichletCharacter& chi, int64_t x, const Ring& R, int m);

// "M:a1,a2,..." -- exponent list on the canonical generators of (Z/M)^x.
DirichletCharacter parse_character(const std::string& spec);
std::string format_character(const DirichletCharacter& chi);

// --------------------------------------------------------- p-Sylow datum

// The p-Sylow subgroup of (Z/N)^x (p coprime to N), required cyclic: a
// generator g of order d, the discrete log table of the Sylow projection
// a |-> a^e (e = 1 mod d, 0 mod |group|/d), and the position of Frobenius,
// i.e. of the projection of p itself.
struct SylowDatum {
    int64_t p = 0, N = 0;
    int64_t d = 1;         // p-part of phi(N)
    int64_t g = 1;         // generator of the Sylow subgroup (1 when d = 1)
    int64_t sigma_pow = 0; // projection of p is g^sigma_pow
    std::vector<int64_t> dlog; // indexed by residues mod N; -1 off the units
};

// Throws domain_error when the Sylow subgroup is not cyclic.
SylowDatum sylow_datum(int64_t p, int64_t N);

// ------------------------------------------------------------ Bernoulli

// Exact B_k, B_1 = -1/2 convention; memoized; k <= 200 (BoundExceeded above).
Rat bernoulli_number(int k);
Rat bernoulli_poly(int k, const Rat& x);
// Preload/extract the memo (cache file plumbing lives with the callers).
void bernoulli_preload(const std::vector<std::pair<int, Rat>>& values);
std::vector<std::pair<int, Rat>> bernoulli_known();

// B_{n,chi} for chi as given (imprimitive moduli yield the Euler-factor-
// adjusted value).  Exact rational/character arithmetic, reduced into R;
// the division by the p-part of f * (Bernoulli denominators) is checked
// exactly and charged to the ledger.
ExtScalar generalized_bernoulli(int n, const DirichletCharacter& chi, const Ring& R, int m);

// L_p(chi, 1-n) = -(1 - chi omega^{-n}(p) p^{n-1}) B_{n, chi omega^{-n}} / n
// with chi omega^{-n} primitive.  chi must be even; ledger charges v_p(n).
ExtScalar lp_value(const DirichletCharacter& chi, int n, const Ring& R, int m);

// ------------------------------------------------------------ the search

struct EisensteinFixture {
    int64_t p = 0;
    int64_t N = 0;
    DirichletCharacter theta; // mod Np, canonical Galois-orbit representative
    int64_t b2_valuation = 0; // v_p(B_{2,theta^{-1}}), capped at the scan precision
    bool p_split = false;        // conductor N, theta(p) = 1 (decomposition-trivial)
};

// All even nontrivial theta mod Np (up to Q_p-Galois conjugacy) with
// conductor N or Np, theta != omega^2, the omega^{-1}-twist condition, p
// not dividing N phi(N), and p | B_{2,theta^{-1}} in R.
std::vector<EisensteinFixture> find_eisenstein_pairs(int64_t p_min, int64_t p_max, int64_t N_max);

} // namespace iwa
