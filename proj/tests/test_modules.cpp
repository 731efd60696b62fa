#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iwa/errors.hpp"
#include "iwa/lfun.hpp"
#include "iwa/modules.hpp"

using namespace iwa;

namespace {

ExtScalar lint(const Ring& R, int m, long v) { return ex_from_int(R, m, Int(v)); }

PresRing pring(int64_t p, int m, int n, int64_t d) {
    return PresRing{make_zp_ring(p, m), m, n, d};
}

// alpha = c0 + X, the distinguished-shaped relation the fixtures share
BElt alpha_lin(const PresRing& B, long c0) {
    return b_add(B, b_from_int(B, Int(c0)), b_x(B));
}

} // namespace

TEST_CASE("group algebra arithmetic: units, inverses, augmentation") {
    PresRing B = pring(3, 4, 5, 3);
    const Ring& R = B.ring;

    BElt g = b_gen(B, 1);
    BElt x = b_add(B, b_add(B, b_one(B), b_x(B)), b_monomial(B, 0, 1, lint(R, 4, 3)));
    CHECK(b_is_unit(B, x)); // aug of X^0 slice = 1 + 3, a unit
    BElt xinv = b_inverse(B, x);
    CHECK(b_eq(B, b_mul(B, x, xinv), b_one(B)));
    CHECK(b_eq(B, b_mul(B, xinv, x), b_one(B)));

    // g - 1 has augmentation 0: not a unit, inversion refuses
    BElt gm1 = b_sub(B, g, b_one(B));
    CHECK(!b_is_unit(B, gm1));
    CHECK_THROWS_AS(b_inverse(B, gm1), NonUnitInverse);
    // ... but 1 + (g - 1) = g is a unit with inverse g^2
    CHECK(b_eq(B, b_inverse(B, g), b_gen(B, 2)));

    // norm elements: nu(g) = 1 + g + g^2 multiplies (g - 1) to zero
    BElt nu = b_norm_of(B, 1);
    CHECK(b_is_zero(B, b_mul(B, nu, gm1)));
    CHECK(b_eq(B, b_norm_of(B, 0), b_one(B)));

    // augmentation is a ring map onto the scalar series
    PowerSeries ax = b_aug(B, x);
    CHECK(ex_eq(ax.coeff(0), lint(R, 4, 4)));
    CHECK(ex_eq(ax.coeff(1), lint(R, 4, 1)));
    PowerSeries prod = b_aug(B, b_mul(B, x, x));
    PowerSeries sq = ps_mul(ax, ax);
    CHECK(ps_eq(prod, sq));

    // X nilpotence is baked into the truncation
    BElt xn = b_x(B);
    BElt acc = b_one(B);
    for (int i = 0; i < B.n; ++i) acc = b_mul(B, acc, xn);
    CHECK(b_is_zero(B, acc));
}

TEST_CASE("additive lattices: orders, membership, elementary divisors") {
    PresRing B = pring(3, 4, 5, 3);

    // the free module of rank 1 has order p^{m n d}
    ModulePresentation free1 = pres_make(B, 1, {});
    CHECK(module_log_order(free1) == 4 * 5 * 3);
    auto diag = fitting_diagonal(free1);
    CHECK(diag.size() == 15);
    CHECK(diag.front() == 4);
    CHECK(diag.back() == 4);

    // B/(p^2, X) = (Z/9)[G]: order p^{2d}, diagonal (2,2,2)
    ModulePresentation q = pres_make(B, 1, {{b_from_int(B, 9)}, {b_x(B)}});
    CHECK(module_log_order(q) == 6);
    auto dq = fitting_diagonal(q);
    REQUIRE(dq.size() == 3);
    CHECK(dq[0] == 2);
    CHECK(dq[2] == 2);

    // membership: 9 (g - 1) X^4 is in the span of (p^2, X); g - 1 is not
    BElt gm1 = b_sub(B, b_gen(B, 1), b_one(B));
    CHECK(pres_is_zero(q, {b_mul(B, b_mul_int(B, gm1, 9), b_monomial(B, 4, 0, lint(B.ring, 4, 1)))}));
    CHECK(!pres_is_zero(q, {gm1}));

    // unit-pivot reduction: <a, b | a - g b> is free of rank 1
    ModulePresentation two = pres_make(B, 2, {{b_one(B), b_neg(B, b_gen(B, 1))}});
    CHECK(module_log_order(two) == 4 * 5 * 3);
    CHECK(fitting_diagonal(two).size() == 15);
}

// ---------------------------------------------------------------------------
// Intermediate quotient tower: frozen orders from the independent
// Smith-normal-form realization of the same presentations.
// ---------------------------------------------------------------------------

namespace {

void check_tower_certs(const IntermediateModules& t) {
    CHECK(t.j1_well_defined);
    CHECK(t.j2_well_defined);
    CHECK(t.psi_well_defined);
    CHECK(t.psi_after_j1_zero);
    CHECK(t.psi_surjective);
    CHECK(t.exact_at_star);
    CHECK(t.pushout_identity);
}

} // namespace

TEST_CASE("tower: trivial Frobenius, alpha = 1") {
    PresRing B = pring(3, 3, 3, 1);
    FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 3), 0);
    auto t = intermediate_modules(fr, b_one(B));
    CHECK(t.log_F == 9);
    CHECK(t.log_Fdag == 3);
    CHECK(t.log_Fstar == 6);
    CHECK(t.log_Abar == 3);
    CHECK(t.log_Adag == 3);
    CHECK(t.log_D == 3);
    CHECK(t.log_im_j1 == 3);
    CHECK(t.log_im_psi == 3);
    CHECK(t.orders_multiply);
    CHECK(t.j1_injective);
    check_tower_certs(t);
    REQUIRE(t.split_multx_iso.has_value());
    CHECK(*t.split_multx_iso);
    CHECK(!t.simple_embed_well_defined.has_value());
}

TEST_CASE("tower: trivial Frobenius, distinguished alpha") {
    PresRing B = pring(3, 3, 3, 1);
    FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 3), 0);
    auto t = intermediate_modules(fr, alpha_lin(B, 3));
    CHECK(t.log_F == 9);
    CHECK(t.log_Fdag == 5);
    CHECK(t.log_Fstar == 8);
    CHECK(t.log_Abar == 3);
    CHECK(t.log_Adag == 5);
    CHECK(t.log_D == 3);
    CHECK(t.log_im_j1 == 5);
    CHECK(t.log_im_psi == 3);
    CHECK(t.orders_multiply);
    CHECK(t.j1_injective);
    check_tower_certs(t);
    REQUIRE(t.split_multx_iso.has_value());
    CHECK(*t.split_multx_iso);
}

TEST_CASE("tower: Frobenius generating a cyclic 3-group") {
    PresRing B = pring(3, 3, 3, 3);
    FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 3), 1);
    auto t = intermediate_modules(fr, alpha_lin(B, 3));
    CHECK(t.log_F == 27);
    CHECK(t.log_Fdag == 15);
    CHECK(t.log_Fstar == 18);
    CHECK(t.log_Abar == 3);
    CHECK(t.log_Adag == 15);
    CHECK(t.log_D == 9);
    CHECK(t.log_im_j1 == 15);
    CHECK(t.log_im_psi == 3);
    CHECK(t.orders_multiply);
    CHECK(t.j1_injective);
    check_tower_certs(t);
    CHECK(!t.split_multx_iso.has_value()); // Fr is not trivial here
}

TEST_CASE("tower: fixed-part-free Frobenius embeds into Adag") {
    PresRing B = pring(3, 3, 3, 1);
    FrobeniusAction fr = make_frobenius(B, lint(B.ring, 3, 4), 0);
    auto t = intermediate_modules(fr, alpha_lin(B, 3));
    CHECK(t.log_F == 9);
    CHECK(t.log_Fdag == 5);
    CHECK(t.log_Fstar == 6);
    CHECK(t.log_Abar == 1);
    CHECK(t.log_Adag == 5);
    CHECK(t.log_D == 3);
    CHECK(t.log_im_j1 == 5);
    CHECK(t.log_im_psi == 1);
    CHECK(t.orders_multiply);
    CHECK(t.j1_injective); // at m >= n the comparison is clean
    check_tower_certs(t);
    REQUIRE(t.simple_embed_well_defined.has_value());
    CHECK(*t.simple_embed_well_defined);
    CHECK(*t.simple_embed_image_log == 4);
}

TEST_CASE("tower at criterion size (p^4, X^5): split and nontrivial Sylow") {
    {
        PresRing B = pring(3, 4, 5, 1);
        FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 4), 0);
        auto t = intermediate_modules(fr, alpha_lin(B, 3));
        CHECK(t.log_F == 20);
        CHECK(t.log_Fdag == 8);
        CHECK(t.log_Fstar == 12);
        CHECK(t.log_Abar == 4);
        CHECK(t.log_Adag == 8);
        CHECK(t.log_D == 4);
        CHECK(t.log_im_j1 == 8);
        CHECK(t.log_im_psi == 4);
        CHECK(t.orders_multiply);
        CHECK(t.j1_injective);
        check_tower_certs(t);
        REQUIRE(t.split_multx_iso.has_value());
        CHECK(*t.split_multx_iso);
    }
    {
        PresRing B = pring(3, 4, 5, 3);
        FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 4), 1);
        auto t = intermediate_modules(fr, alpha_lin(B, 3));
        CHECK(t.log_F == 60);
        CHECK(t.log_Fdag == 24);
        CHECK(t.log_Fstar == 28);
        CHECK(t.log_Abar == 4);
        CHECK(t.log_Adag == 24);
        CHECK(t.log_D == 12);
        CHECK(t.log_im_j1 == 24);
        CHECK(t.log_im_psi == 4);
        CHECK(t.orders_multiply);
        CHECK(t.j1_injective);
        check_tower_certs(t);
    }
}

TEST_CASE("tower: truncation kernel when X-depth exceeds the p-precision") {
    // With A^{Fr=1} = 0 and n > m, the comparison map acquires an honest
    // kernel of order p: p^{m-1} alpha maps to (1-s) p^{m-1} w = 0 in Fstar
    // but p^{m-1} alpha is not in X alpha B.  Orders no longer multiply;
    // exactness at Fstar survives.
    PresRing B = pring(3, 4, 5, 1);
    FrobeniusAction fr = make_frobenius(B, lint(B.ring, 4, 4), 0);
    BElt alpha = alpha_lin(B, 3);
    auto t = intermediate_modules(fr, alpha);
    CHECK(t.log_F == 20);
    CHECK(t.log_Fdag == 8);
    CHECK(t.log_Fstar == 8);
    CHECK(t.log_Abar == 1);
    CHECK(t.log_Adag == 8);
    CHECK(t.log_D == 4);
    CHECK(t.log_im_j1 == 7);
    CHECK(t.log_im_psi == 1);
    CHECK(!t.orders_multiply);
    CHECK(!t.j1_injective);
    CHECK(t.exact_at_star); // |im j1| still matches |Fstar| / |im psi|
    CHECK(t.psi_surjective);
    CHECK(t.pushout_identity);
    REQUIRE(t.simple_embed_well_defined.has_value());
    CHECK(*t.simple_embed_well_defined);
    CHECK(*t.simple_embed_image_log == 7);

    // the explicit witness: 27 alpha e_0 dies in Fstar (27 alpha = 27(1-s)w
    // and 3 | (1-s) here), yet 27 alpha is nonzero in Fdag = B/(X alpha)
    BElt w27 = b_mul_int(B, alpha, 27);
    CHECK(!pres_is_zero(t.Fdag, {w27}));
    CHECK(pres_is_zero(t.Fstar, {w27, b_zero(B)}));
}

// ---------------------------------------------------------------------------
// Four-term boundary sequence, frozen against the same oracle.
// ---------------------------------------------------------------------------

namespace {

void check_ft_exact(const FourTermData& f) {
    CHECK(f.delta_well_defined);
    CHECK(f.incl_well_defined);
    CHECK(f.proj_well_defined);
    CHECK(f.comp_incl_delta_zero);
    CHECK(f.comp_proj_incl_zero);
    CHECK(f.delta_injective);
    CHECK(f.exact_at_S_quo);
    CHECK(f.exact_at_F_quo);
    CHECK(f.proj_surjective);
    CHECK(f.all_exact);
}

} // namespace

TEST_CASE("four-term boundary: generating Frobenius, alpha = 3g + X") {
    PresRing B = pring(3, 4, 5, 3);
    FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 4), 1);
    BElt alpha = b_add(B, b_monomial(B, 0, 1, lint(B.ring, 4, 3)), b_x(B));
    auto f = four_term_sequence(fr, alpha);
    CHECK(f.v == 1);
    CHECK(f.log_S_quo == 12);
    CHECK(f.log_F_quo == 12);
    CHECK(f.log_K_quo == 1);
    CHECK(f.log_K_tors == 1);
    CHECK(f.log_im_delta == 1);
    CHECK(f.log_im_incl == 11);
    CHECK(f.log_im_proj == 1);
    check_ft_exact(f);
}

TEST_CASE("four-term boundary: trivial group, Eisenstein-shaped alpha") {
    PresRing B = pring(3, 4, 5, 1);
    FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 4), 0);
    auto f = four_term_sequence(fr, alpha_lin(B, -3));
    CHECK(f.v == 1);
    CHECK(f.log_S_quo == 4);
    CHECK(f.log_F_quo == 4);
    CHECK(f.log_K_quo == 1);
    CHECK(f.log_K_tors == 1);
    CHECK(f.log_im_delta == 1);
    CHECK(f.log_im_incl == 3);
    CHECK(f.log_im_proj == 1);
    check_ft_exact(f);
}

TEST_CASE("four-term boundary: unit alpha degenerates to zero modules") {
    PresRing B = pring(3, 4, 5, 1);
    FrobeniusAction fr = make_frobenius(B, ex_one(B.ring, 4), 0);
    auto f = four_term_sequence(fr, alpha_lin(B, 1));
    CHECK(f.v == 0);
    CHECK(f.log_S_quo == 0);
    CHECK(f.log_F_quo == 0);
    CHECK(f.log_K_quo == 0);
    CHECK(f.log_K_tors == 0);
    check_ft_exact(f);
}

TEST_CASE("four-term boundary: refused inputs") {
    PresRing B = pring(3, 4, 5, 3);
    // Frobenius with nontrivial unit part: no fixed line to bound
    FrobeniusAction simple = make_frobenius(B, lint(B.ring, 4, 4), 1);
    CHECK_THROWS_AS(four_term_sequence(simple, alpha_lin(B, 3)), std::invalid_argument);
    // Frobenius not generating the group component
    FrobeniusAction stuck = make_frobenius(B, ex_one(B.ring, 4), 0);
    CHECK_THROWS_AS(four_term_sequence(stuck, alpha_lin(B, 3)), std::invalid_argument);
    // aug alpha(0) = 0 at working precision: the index is indeterminate
    PresRing B1 = pring(3, 4, 5, 1);
    FrobeniusAction fr = make_frobenius(B1, ex_one(B1.ring, 4), 0);
    CHECK_THROWS_AS(four_term_sequence(fr, b_x(B1)), Indeterminate);
}

// ---------------------------------------------------------------------------
// Sylow data and the group-ring-valued interpolation.
// ---------------------------------------------------------------------------

TEST_CASE("Sylow datum of the prime-to-p level") {
    // p = 3, N = 13: Sylow subgroup <3> of order 3, p projects to g itself
    SylowDatum s = sylow_datum(3, 13);
    CHECK(s.d == 3);
    CHECK(s.g == 3);
    CHECK(s.sigma_pow == 1);
    CHECK(s.dlog[1] == 0);
    CHECK(s.dlog[3] == 1);
    CHECK(s.dlog[9] == 2);
    CHECK(s.dlog[2] == 1);  // 2^4 = 16 = 3
    CHECK(s.dlog[4] == 2);  // 4^4 = 256 = 9
    CHECK(s.dlog[12] == 0); // (-1)^4 = 1
    CHECK(s.dlog[0] == -1);

    // p = 5, N = 56: trivial Sylow part
    SylowDatum t = sylow_datum(5, 56);
    CHECK(t.d == 1);
    CHECK(t.g == 1);
    CHECK(t.sigma_pow == 0);
    CHECK(t.dlog[1] == 0);
    CHECK(t.dlog[3] == 0);
    CHECK(t.dlog[2] == -1);
    CHECK(t.dlog[7] == -1);

    // (Z/91)^x = C6 x C12 has 3-Sylow C3 x C3: not cyclic
    CHECK_THROWS_AS(sylow_datum(3, 91), std::domain_error);
    // p must be coprime to N
    CHECK_THROWS_AS(sylow_datum(3, 12), std::invalid_argument);
}

TEST_CASE("group-ring interpolation packet at p = 3, N = 13") {
    const int cap = xi_ring_cap(3, 4, 5);
    Ring R = make_zp_ring(3, cap);
    Generator gen = make_generator(GeneratorKind::Simple, 3, cap);
    SylowDatum syl = sylow_datum(3, 13);
    PresRing B{R, 4, 5, 3};
    auto theta = make_character(13, {6}); // the even quadratic character mod 13

    XiPacket pk = equivariant_xi(theta, gen, syl, B);
    CHECK(pk.audit_exponents[0] == 9);
    CHECK(pk.audit_exponents[1] == 10);
    CHECK(pk.v0 == 0);

    // frozen coordinates mod 3^4, (g^0, g^1, g^2) per X-power
    const long want[5][3] = {
        {38, 71, 39}, {15, 34, 59}, {21, 17, 21}, {50, 36, 66}, {68, 9, 52}};
    for (int a = 0; a < 5; ++a)
        for (int j = 0; j < 3; ++j)
            CHECK(ex_eq(pk.xi.c[(size_t)a][(size_t)j], lint(R, 4, want[a][j])));

    // augmentation: aug xi(0) = 67, and the whole series matches the scalar
    PowerSeries aug = b_aug(B, pk.xi);
    CHECK(ex_eq(aug.coeff(0), lint(R, 4, 67)));
    XiBuild scalar = xi_interpolate(theta, XiConvention::OnTheta, gen, R, 4, 5);
    CHECK(ps_eq(aug, scalar.xi));
    CHECK(mu_zero_lambda(aug) == 0);

    // held-out node values, frozen from the exact-rational realization
    const long audit9[3] = {38, 17, 12};
    const long audit10[3] = {2, 29, 54};
    for (int j = 0; j < 3; ++j) {
        std::vector<ExtScalar> cs;
        for (int a = 0; a < 5; ++a) cs.push_back(pk.xi.c[(size_t)a][(size_t)j]);
        PowerSeries coord = ps_from_coeffs(cs, 5);
        CHECK(ex_eq(ps_eval_ts(coord, gen, 9), lint(R, 4, audit9[j])));
        CHECK(ex_eq(ps_eval_ts(coord, gen, 10), lint(R, 4, audit10[j])));
    }
}

TEST_CASE("cyclotomic sequence run: p = 3, N = 13 at (p^4, X^5)") {
    const int cap = xi_ring_cap(3, 4, 5);
    Generator gen = make_generator(GeneratorKind::Simple, 3, cap);
    auto theta = make_character(13, {6});

    SequenceReport rep = testcase_sequences(theta, gen, 4, 5);
    CHECK(rep.p == 3);
    CHECK(rep.N == 13);
    CHECK(rep.d == 3);
    CHECK(rep.v0 == 0);
    CHECK(rep.packet_matches_scalar_xi);
    CHECK(rep.section_identity);
    CHECK(rep.xi_image_vanishes_high);

    // tower orders with alpha = the actual interpolation packet (frozen)
    const IntermediateModules& t = rep.tower;
    CHECK(t.log_F == 60);
    CHECK(t.log_Fdag == 12);
    CHECK(t.log_Fstar == 16);
    CHECK(t.log_Abar == 4);
    CHECK(t.log_Adag == 12);
    CHECK(t.log_D == 12);
    CHECK(t.log_im_j1 == 12);
    CHECK(t.log_im_psi == 4);
    CHECK(t.orders_multiply);
    CHECK(t.j1_injective);
    check_tower_certs(t);

    // aug xi(0) is a unit: the boundary sequence exists and is all zeros
    REQUIRE(rep.four_term_ran);
    CHECK(rep.four_term.v == 0);
    CHECK(rep.four_term.log_S_quo == 0);
    CHECK(rep.four_term.log_F_quo == 0);
    CHECK(rep.four_term.log_K_quo == 0);
    CHECK(rep.four_term.log_K_tors == 0);
    check_ft_exact(rep.four_term);
}

TEST_CASE("cyclotomic sequence run: p = 5, N = 56 at (p^3, X^4)") {
    const int cap = xi_ring_cap(5, 3, 4);
    Generator gen = make_generator(GeneratorKind::Simple, 5, cap);
    auto theta = make_character(56, {1, 1, 3});

    // node anchor: xi(t - 1) = -B_{1,psi} = 17 mod 125 with psi the primitive
    // character of theta*omega^{-1} (its conductor kills the Euler factor),
    // frozen from the exact rational Bernoulli sum.  Since the node t - 1 has
    // positive valuation, xi(0) = xi(t-1) mod 5, so xi(0) is a unit too.
    {
        Ring R = make_zp_ring(5, cap);
        SylowDatum syl = sylow_datum(5, 56);
        PresRing B{R, 3, 4, 1};
        XiPacket pk = equivariant_xi(theta, gen, syl, B);
        CHECK(ex_eq(ps_eval_ts(b_aug(B, pk.xi), gen, 1), lint(R, 3, 17)));
        CHECK(pk.v0 == 0);
    }

    SequenceReport rep = testcase_sequences(theta, gen, 3, 4);
    CHECK(rep.p == 5);
    CHECK(rep.N == 56);
    CHECK(rep.d == 1);
    CHECK(rep.v0 == 0);
    CHECK(rep.packet_matches_scalar_xi);
    CHECK(rep.section_identity);
    CHECK(rep.xi_image_vanishes_high);

    const IntermediateModules& t = rep.tower;
    CHECK(t.orders_multiply);
    CHECK(t.j1_injective);
    check_tower_certs(t);
    REQUIRE(t.split_multx_iso.has_value()); // trivial Sylow: Fr acts trivially
    CHECK(*t.split_multx_iso);

    REQUIRE(rep.four_term_ran);
    CHECK(rep.four_term.v == 0);
    check_ft_exact(rep.four_term);
}
