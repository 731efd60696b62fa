#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "iwa/characters.hpp"
#include "iwa/errors.hpp"

#include <stdexcept>

using namespace iwa;

namespace {

ExtScalar lint(const Ring& R, int m, long v) { return ex_from_int(R, m, Int(v)); }

} // namespace

TEST_CASE("exact Bernoulli numbers and polynomials") {
    CHECK(bernoulli_number(0) == Rat(1));
    CHECK(bernoulli_number(1) == Rat(-1, 2));
    CHECK(bernoulli_number(2) == Rat(1, 6));
    CHECK(bernoulli_number(3) == Rat(0));
    CHECK(bernoulli_number(4) == Rat(-1, 30));
    CHECK(bernoulli_number(12) == Rat(-691, 2730));
    CHECK_THROWS_AS((void)bernoulli_number(201), BoundExceeded);

    // B_2(x) = x^2 - x + 1/6
    CHECK(bernoulli_poly(2, Rat(1, 3)) == Rat(-1, 18));
    // B_k(0) = B_k; B_k(1) = B_k for k >= 2, and B_1(1) = +1/2
    CHECK(bernoulli_poly(4, Rat(0)) == bernoulli_number(4));
    CHECK(bernoulli_poly(3, Rat(1)) == Rat(0));
    CHECK(bernoulli_poly(1, Rat(1)) == Rat(1, 2));
}

TEST_CASE("canonical unit-group generators") {
    // (Z/56)^x: 8-part is <-1> x <5> (orders 2, 2), 7-part is <3> (order 6),
    // all CRT-lifted to residues mod 56 congruent to 1 at the other component.
    auto g = unit_group_generators(56);
    REQUIRE(g.size() == 3);
    CHECK(g[0].q == 8);
    CHECK(g[0].g == 15);
    CHECK(g[0].order == 2);
    CHECK(g[1].q == 8);
    CHECK(g[1].g == 29);
    CHECK(g[1].order == 2);
    CHECK(g[2].q == 7);
    CHECK(g[2].g == 17);
    CHECK(g[2].order == 6);

    auto g5 = unit_group_generators(5);
    REQUIRE(g5.size() == 1);
    CHECK(g5[0].g == 2);
    CHECK(g5[0].order == 4);

    CHECK(unit_group_generators(1).empty());
    CHECK(unit_group_generators(2).empty());
}

TEST_CASE("character structure: order, conductor, parity") {
    // The quadratic character mod 56 attached to Q(sqrt(14)).
    auto theta = make_character(56, {1, 1, 3});
    CHECK(theta.order == 2);
    CHECK(theta.conductor == 56);
    CHECK(theta.parity == +1);
    CHECK(*char_exp(theta, 5) == 0);  // theta(5) = 1
    CHECK(*char_exp(theta, 3) == 1);  // theta(3) = -1
    CHECK(!char_exp(theta, 14).has_value());

    auto omega = teichmuller_character(5);
    CHECK(omega.modulus == 5);
    CHECK(omega.order == 4);
    CHECK(omega.conductor == 5);
    CHECK(omega.parity == -1);
    CHECK(char_pow(omega, 2).parity == +1);

    // mod 16: exps (a_{-1}, a_5) on generators of orders (2, 4)
    CHECK(make_character(16, {0, 1}).conductor == 16);
    CHECK(make_character(16, {0, 2}).conductor == 8);
    CHECK(make_character(16, {1, 0}).conductor == 4);
    CHECK(make_character(16, {0, 0}).conductor == 1);

    auto triv = trivial_character(12);
    CHECK(triv.order == 1);
    CHECK(triv.conductor == 1);
    CHECK(triv.parity == +1);
}

TEST_CASE("character algebra and conductor round trip") {
    auto omega = teichmuller_character(5);
    CHECK(char_eq(char_pow(omega, 4), trivial_character(5)));
    CHECK(char_eq(char_mul(omega, char_inverse(omega)), trivial_character(1)));

    // induce to a larger modulus, re-extract the primitive character
    auto ind = char_induce(omega, 35);
    CHECK(ind.modulus == 35);
    CHECK(ind.conductor == 5);
    CHECK(char_eq(char_primitive(ind), omega));
    CHECK(*char_exp(ind, 2) == *char_exp(omega, 2));
    CHECK(!char_exp(ind, 7).has_value()); // 7 | 35 kills the value

    // product across moduli
    auto theta = make_character(56, {1, 1, 3});
    auto prod = char_mul(theta, omega);
    CHECK(prod.modulus == 280);
    CHECK(prod.order == 4);
    CHECK(prod.conductor == 280);
    CHECK(prod.parity == -1);

    // parsing round trip
    auto back = parse_character(format_character(theta));
    CHECK(char_eq(back, theta));
    CHECK(back.modulus == theta.modulus);
}

TEST_CASE("p-adic character values") {
    auto R = make_zp_ring(5, 6);
    auto omega = teichmuller_character(5);
    // omega(2) = teichmuller(2): 7 mod 25, 182 mod 625
    auto w2 = char_value_in(omega, 2, R, 2);
    CHECK(ex_eq(w2, lint(R, 2, 7)));
    auto w2big = char_value_in(omega, 2, R, 4);
    CHECK(ex_eq(w2big, lint(R, 4, 182)));
    CHECK(ex_is_zero(char_value_in(omega, 10, R, 3)));

    auto theta = make_character(56, {1, 1, 3});
    CHECK(ex_eq(char_value_in(theta, 5, R, 3), ex_one(R, 3)));
    CHECK(ex_eq(char_value_in(theta, 3, R, 3), ex_neg(ex_one(R, 3))));

    // quartic mod 16 takes values in mu_4: hosted by the zeta_4 ring
    auto R4 = make_unramified_ring(5, 4, 6);
    auto chi = make_character(16, {0, 1});
    CHECK(char_field_order(chi, 5) == 4);
    auto v = char_value_in(chi, 5, R4, 3);
    CHECK(ex_eq(ex_mul(v, v), ex_neg(ex_one(R4, 3)))); // chi(5)^2 = chi(25) = -1
}

TEST_CASE("generalized Bernoulli numbers against hand values") {
    auto R = make_zp_ring(5, 6);

    // B_{2,triv mod 1} = B_2 = 1/6 -> 21 mod 125;  B_{1,triv mod 1} = B_1(1) = 1/2
    CHECK(ex_eq(generalized_bernoulli(2, trivial_character(1), R, 3), lint(R, 3, 21)));
    CHECK(ex_eq(generalized_bernoulli(1, trivial_character(1), R, 3), lint(R, 3, 63)));

    // parity vanishing (omega odd, n even) -- computed, not special-cased
    auto omega = teichmuller_character(5);
    CHECK(ex_is_zero(generalized_bernoulli(2, omega, R, 3)));

    // B_{1,omega} = (1/5) sum tau(a) a = 88 mod 125, with no precision loss
    auto b1w = generalized_bernoulli(1, omega, R, 3);
    CHECK(ex_eq(b1w, lint(R, 3, 88)));
    CHECK(b1w.m == 3);

    // imprimitive two-way check: B_{1,omega mod 35} = B_{1,omega}(1 - omega(7))
    auto ind = char_induce(omega, 35);
    auto lhs = generalized_bernoulli(1, ind, R, 3);
    CHECK(ex_eq(lhs, lint(R, 3, 72)));
    auto euler = ex_sub(ex_one(R, 3), char_value_in(omega, 7, R, 3));
    CHECK(ex_eq(lhs, ex_mul(b1w, euler)));

    // trivial character mod 5: Euler factor kills B_1
    CHECK(ex_is_zero(generalized_bernoulli(1, trivial_character(5), R, 3)));
}

TEST_CASE("generalized Bernoulli: quadratic mod 29 at p = 3") {
    auto R = make_zp_ring(3, 6);
    auto theta = make_character(29, {14}); // Legendre symbol mod 29
    CHECK(theta.order == 2);
    CHECK(theta.parity == +1);
    auto b = generalized_bernoulli(2, theta, R, 3);
    CHECK(ex_eq(b, lint(R, 3, 12)));
    CHECK(b.m == 3);

    // two-way imprimitivity at 87 = 3 * 29: factor (1 - theta(3) * 3) = 4
    auto lhs = generalized_bernoulli(2, char_induce(theta, 87), R, 3);
    CHECK(ex_eq(lhs, lint(R, 3, 48)));
    auto tval = char_value_in(theta, 3, R, 3);
    auto euler = ex_sub(ex_one(R, 3), ex_mul_int(tval, Int(3)));
    CHECK(ex_eq(lhs, ex_mul(b, euler)));
}

TEST_CASE("generalized Bernoulli: conductor-Np character mixing tau") {
    // chi = chi_4 * omega mod 20 (p = 5): B_{2,chi} = 8 + 4*tau(2), and the
    // conjugate chi^3 gets 8 - 4*tau(2); only the latter is divisible by 5.
    auto R = make_zp_ring(5, 6);
    auto chi = make_character(20, {1, 1});
    CHECK(chi.conductor == 20);
    CHECK(chi.parity == +1);
    CHECK(chi.order == 4);

    auto tau2 = ex_teichmuller(lint(R, 3, 2));
    auto b = generalized_bernoulli(2, chi, R, 3);
    CHECK(ex_eq(b, ex_add(lint(R, 3, 8), ex_mul_int(tau2, Int(4)))));
    CHECK(ex_eq(b, lint(R, 3, 111)));

    auto b3 = generalized_bernoulli(2, char_pow(chi, 3), R, 3);
    CHECK(ex_eq(b3, lint(R, 3, 30)));
    CHECK(*ex_valuation(b) == 0);
    CHECK(*ex_valuation(b3) == 1);
}

TEST_CASE("generalized Bernoulli: capstone quadratic mod 56") {
    auto R = make_zp_ring(5, 6);
    auto theta = make_character(56, {1, 1, 3});
    auto b = generalized_bernoulli(2, theta, R, 3);
    CHECK(ex_eq(b, lint(R, 3, 40)));
    CHECK(*ex_valuation(b) == 1);
}

TEST_CASE("generalized Bernoulli: quartic mod 16, one conjugate divisible") {
    auto R4 = make_unramified_ring(5, 4, 6);
    auto chi = make_character(16, {0, 1});
    auto b1 = generalized_bernoulli(2, chi, R4, 2);
    auto b3 = generalized_bernoulli(2, char_pow(chi, 3), R4, 2);
    // B = 6 - 2*chi(5) for both conjugates
    CHECK(ex_eq(b1, ex_sub(lint(R4, 2, 6), ex_mul_int(char_value_in(chi, 5, R4, 2), Int(2)))));
    int div1 = (*ex_valuation(b1) >= 1) ? 1 : 0;
    int div3 = (*ex_valuation(b3) >= 1) ? 1 : 0;
    CHECK(div1 + div3 == 1);
}

TEST_CASE("Kubota-Leopoldt interpolation values") {
    auto R = make_zp_ring(5, 6);
    auto omega = teichmuller_character(5);

    // L_5(omega^2, 0) = -B_{1,omega} = -88 = 37 mod 125 (and 2 mod 5)
    auto l0 = lp_value(char_pow(omega, 2), 1, R, 3);
    CHECK(ex_eq(l0, lint(R, 3, 37)));
    CHECK(ex_eq(ex_reduce_prec(l0, 1), lint(R, 1, 2)));

    // capstone: L_5(omega^2 theta^{-1}, -1) = -(1 - theta^{-1}(5) 5) B_{2,theta^{-1}} / 2
    //         = -(1-5) * 40 / 2 = 80
    auto theta = make_character(56, {1, 1, 3});
    auto chi = char_mul(char_pow(omega, 2), char_inverse(theta));
    auto xi0 = lp_value(chi, 2, R, 3);
    CHECK(ex_eq(xi0, lint(R, 3, 80)));
    CHECK(xi0.m == 3);

    // odd characters are rejected
    CHECK_THROWS_AS((void)lp_value(omega, 1, R, 3), OddCharacter);

    // ledger: division by n costs exactly v_p(n) digits
    auto l5 = lp_value(char_pow(omega, 2), 5, R, 3);
    CHECK(l5.m == 2);
    auto l3 = lp_value(char_pow(omega, 2), 3, R, 3);
    CHECK(l3.m == 3);

    // zeta_5(-1) = -B_{2,omega^2}/2 = -2/5 is not 5-integral: honest refusal
    CHECK_THROWS_AS((void)lp_value(trivial_character(1), 2, R, 3), std::domain_error);
}

TEST_CASE("Eisenstein pair search: frozen small windows") {
    // p = 3, N <= 29: exactly the Legendre character mod 29
    auto h3 = find_eisenstein_pairs(3, 3, 29);
    REQUIRE(h3.size() == 1);
    CHECK(h3[0].p == 3);
    CHECK(h3[0].N == 29);
    CHECK(h3[0].theta.order == 2);
    CHECK(h3[0].theta.conductor == 29);
    CHECK(h3[0].b2_valuation == 1);
    CHECK(!h3[0].p_split); // theta(3) = -1

    // p = 5, N <= 15: empty (the naive mod-p test would claim N = 3, 4, ...)
    CHECK(find_eisenstein_pairs(5, 5, 15).empty());

    // p = 5, N = 16: exactly one of the two quartic conjugates
    auto h5 = find_eisenstein_pairs(5, 5, 16);
    REQUIRE(h5.size() == 1);
    CHECK(h5[0].N == 16);
    CHECK(h5[0].theta.conductor == 16);
    CHECK(h5[0].theta.order == 4);
    CHECK(h5[0].b2_valuation == 1);
    CHECK(!h5[0].p_split); // theta(5) = +-i != 1
}

TEST_CASE("Eisenstein pair search: capstone window") {
    auto hits = find_eisenstein_pairs(5, 5, 56);
    int n_p_split = 0;
    const EisensteinFixture* cap = nullptr;
    for (const auto& h : hits) {
        if (h.p_split) {
            ++n_p_split;
            cap = &h;
        }
    }
    REQUIRE(n_p_split == 1);
    CHECK(cap->N == 56);
    CHECK(cap->theta.conductor == 56);
    CHECK(cap->theta.order == 2);
    CHECK(cap->b2_valuation == 1);
    // theta is stored mod Np where p is not a unit; theta(p) means the
    // primitive (conductor-N) character's value
    CHECK(!char_exp(cap->theta, 5).has_value());
    CHECK(*char_exp(char_primitive(cap->theta), 5) == 0);
    CHECK(char_eq(cap->theta, make_character(56, {1, 1, 3})));
}
