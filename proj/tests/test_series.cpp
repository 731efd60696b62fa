#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iwa/errors.hpp"
#include "iwa/series.hpp"

#include <nlohmann/json.hpp>

using namespace iwa;

namespace {

PowerSeries mk(const Ring& R, int m, std::vector<long> coeffs, int n)
{
    std::vector<ExtScalar> cs;
    for (long v : coeffs) cs.push_back(ex_from_int(R, m, v));
    while ((int)cs.size() < n) cs.push_back(ex_zero(R, m));
    return ps_from_coeffs(cs, n);
}

long lc(const ExtScalar& x) // constant coordinate as long, for frozen comparisons
{
    REQUIRE(x.ring->deg == 1);
    return (long)x.c[0];
}

} // namespace

TEST_CASE("series arithmetic: products, inverse, equality")
{
    Ring R = make_zp_ring(5, 4);
    PowerSeries a = mk(R, 4, {1, 1}, 4);  // 1 + X
    PowerSeries b = mk(R, 4, {1, -1 + 625}, 4); // 1 - X
    PowerSeries prod = ps_mul(a, b);
    CHECK(ps_eq(prod, mk(R, 4, {1, 0, -1 + 625}, 4))); // 1 - X^2

    PowerSeries inv = ps_inverse(b); // 1/(1-X) = sum X^i
    CHECK(lc(inv.c[0]) == 1);
    CHECK(lc(inv.c[1]) == 1);
    CHECK(lc(inv.c[2]) == 1);
    CHECK(lc(inv.c[3]) == 1);

    CHECK_THROWS_AS((void)ps_inverse(ps_x(R, 4, 4)), NonUnitInverse);
}

TEST_CASE("difference quotients xi_n: frozen small cases and factorial ledger")
{
    Ring R = make_zp_ring(5, 4);
    PowerSeries f = mk(R, 4, {1, 2, 3, 4}, 4);

    // xi_1 = (X+1) f' = (X+1)(2 + 6X + 12X^2), truncated at X^3.
    PowerSeries x1 = xi_n(f, 1);
    REQUIRE(x1.n == 3);
    CHECK(lc(x1.c[0]) == 2);
    CHECK(lc(x1.c[1]) == 8);
    CHECK(lc(x1.c[2]) == 18);

    // xi_2 = (X+1)^2 f''/2 = (X+1)^2 (3 + 12X), truncated at X^2.
    PowerSeries x2 = xi_n(f, 2);
    REQUIRE(x2.n == 2);
    CHECK(lc(x2.c[0]) == 3);
    CHECK(lc(x2.c[1]) == 18);
    CHECK(x2.m == 4); // v_5(2!) = 0: no ledger charge

    // p = 3, k = 3: v_3(3!) = 1 is charged.
    Ring R3 = make_zp_ring(3, 4);
    PowerSeries g = mk(R3, 4, {0, 0, 0, 0, 1}, 5); // X^4
    PowerSeries x3 = xi_n(g, 3);                    // (X+1)^3 * 4X
    CHECK(x3.m == 3);
    REQUIRE(x3.n == 2);
    CHECK(lc(x3.c[0]) == 0);
    CHECK(lc(x3.c[1]) == 4);
}

TEST_CASE("Weierstrass preparation: frozen factorization and content")
{
    Ring R = make_zp_ring(5, 4);
    // f = (X^2 + 5X + 5)(1 + X) = 5 + 10X + 6X^2 + X^3.
    PowerSeries f = mk(R, 4, {5, 10, 6, 1}, 6);
    WeierstrassData w = weierstrass_data(f);
    CHECK(w.mu == 0);
    CHECK(w.lambda == 2);
    CHECK(w.precision == 4);
    REQUIRE(w.P.size() == 3);
    CHECK(lc(w.P[0]) == 5);
    CHECK(lc(w.P[1]) == 5);
    CHECK(lc(w.P[2]) == 1);
    REQUIRE(w.U.n == 4);
    CHECK(lc(w.U.c[0]) == 1);
    CHECK(lc(w.U.c[1]) == 1);
    CHECK(lc(w.U.c[2]) == 0);
    CHECK(lc(w.U.c[3]) == 0);

    // Content: 25 f has mu = 2 and two fewer certified digits.
    PowerSeries f25 = ps_mul_scalar(f, ex_from_int(R, 4, 25));
    WeierstrassData w2 = weierstrass_data(f25);
    CHECK(w2.mu == 2);
    CHECK(w2.lambda == 2);
    CHECK(w2.precision == 2);
    CHECK(lc(w2.P[0]) % 25 == 5);
    CHECK(lc(w2.P[1]) % 25 == 5);

    // Unit series: lambda = 0, P = 1.
    WeierstrassData wu = weierstrass_data(mk(R, 4, {2, 5, 1}, 4));
    CHECK(wu.mu == 0);
    CHECK(wu.lambda == 0);

    CHECK_THROWS_AS((void)weierstrass_data(ps_zero(R, 4, 4)), Indeterminate);
    // A series indistinguishable from 0 at working precision: 125 == 0 mod 25.
    PowerSeries tiny = ps_reduce(mk(R, 4, {125, 0, 0, 0}, 4), 2, 4);
    CHECK_THROWS_AS((void)weierstrass_data(tiny), Indeterminate);
}

TEST_CASE("diagonalize: frozen box for f = X^2 and exactness for polynomial data")
{
    Ring R = make_zp_ring(5, 3);
    PowerSeries f = mk(R, 3, {0, 0, 1}, 3); // X^2
    BiSeries d = diagonalize(f, 3);
    long want[3][3] = {{0, 0, 1}, {0, 2, 2}, {1, 2, 1}}; // (X+V+XV)^2
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(lc(d.at(i, j)) == want[i][j]);

    // For polynomial data the diagonalization equals sum_k X^k (x) xi_k(f)
    // on the whole box.  xi_k of a degree-3 polynomial has degree up to 3,
    // so compute it through a wide truncation to cover the box columns.
    Ring R4 = make_zp_ring(5, 6);
    PowerSeries g = mk(R4, 6, {1, 2, 3, 4}, 4);
    PowerSeries gw = mk(R4, 6, {1, 2, 3, 4}, 8);
    BiSeries dg = diagonalize(g, 4);
    for (int k = 0; k < 4; ++k) {
        PowerSeries xk = xi_n(gw, k);
        REQUIRE(xk.n >= 4);
        for (int j = 0; j < 4; ++j)
            CHECK(ex_eq(ex_reduce_prec(dg.at(k, j), xk.m), xk.c[(size_t)j]));
    }
}

TEST_CASE("tilde_xi_1: X^0 slice vanishes and the restriction is xi_1")
{
    Ring R = make_zp_ring(7, 5);
    PowerSeries f = mk(R, 5, {3, 1, 4, 1, 5}, 5);
    BiSeries t1 = tilde_xi_1(f);
    PowerSeries x1 = xi_n(f, 1);
    REQUIRE(t1.nx == 4);
    for (int j = 0; j < x1.n && j < t1.nv; ++j)
        CHECK(ex_eq(t1.at(0, j), x1.c[(size_t)j]));
}

TEST_CASE("box inverse certifies unit diagonalizations")
{
    Ring R = make_zp_ring(5, 3);
    PowerSeries f = mk(R, 3, {1, 1, 0, 5}, 4); // unit constant term
    BiSeries d = diagonalize(f, 4);
    BiSeries inv = bs_inverse(d); // internal assert checks d * inv == 1
    BiSeries prod = bs_mul(d, inv);
    CHECK(ex_eq(prod.at(0, 0), ex_one(R, prod.m)));
    CHECK(ex_is_zero(prod.at(1, 1)));

    PowerSeries g = mk(R, 3, {5, 1}, 4); // non-unit constant term
    CHECK_THROWS_AS((void)bs_inverse(diagonalize(g, 4)), NonUnitInverse);
}

TEST_CASE("substitution: geometric identity, tail discount, domain check")
{
    Ring R = make_zp_ring(5, 4);
    PowerSeries f = mk(R, 4, {1, 1, 1, 1}, 4); // sum X^i
    PowerSeries g = mk(R, 4, {0, 5}, 4);       // 5X
    PowerSeries h = ps_substitute(f, g);       // 1/(1 - 5X) truncated
    CHECK(h.m == 4);                            // g(0) = 0: no discount
    CHECK(lc(h.c[0]) == 1);
    CHECK(lc(h.c[1]) == 5);
    CHECK(lc(h.c[2]) == 25);
    CHECK(lc(h.c[3]) == 125);

    PowerSeries g2 = mk(R, 4, {5, 1}, 4); // v(g2(0)) = 1
    PowerSeries f3 = mk(R, 4, {1, 1, 1}, 3);
    CHECK(ps_substitute(f3, g2).m == 3); // tail bound 3 * 1

    CHECK_THROWS_AS((void)ps_substitute(f, mk(R, 4, {1, 1}, 4)), ConvergenceDomain);
}

TEST_CASE("evaluation: frozen value, tail discount, pole handling")
{
    Ring R = make_zp_ring(5, 6);
    PowerSeries f = mk(R, 6, {1, 1, 1, 1}, 4);
    ExtScalar v = ps_eval(f, ex_from_int(R, 6, 5));
    CHECK(v.m == 4); // min(6, 4 * v(5))
    CHECK(lc(v) == 156); // 1 + 5 + 25 + 125

    CHECK_THROWS_AS((void)ps_eval(f, ex_from_int(R, 6, 2)), ConvergenceDomain);

    PowerSeries pole = ps_zero(R, 6, 2);
    pole.pole = 1;
    pole.c.insert(pole.c.begin(), ex_from_int(R, 6, 5)); // 5/X + 0 + 0X
    ExtScalar pv = ps_eval(pole, ex_from_int(R, 6, 5));
    CHECK(lc(pv) % 25 == 1); // 5/5 = 1

    pole.c[0] = ex_from_int(R, 6, 1); // 1/X at X=5 is not integral
    CHECK_THROWS_AS((void)ps_eval(pole, ex_from_int(R, 6, 5)), std::domain_error);
}

TEST_CASE("generators: simple and normalized, frozen logs")
{
    Generator gs = make_generator(GeneratorKind::Simple, 5, 8);
    CHECK(lc(gs.t) == 6);
    CHECK(lc(ex_reduce_prec(gs.log_t, 3)) == 55); // log 6 mod 125

    Generator gn = make_generator(GeneratorKind::Normalized, 5, 8);
    // chi(t) = 1 <=> log t = p/(p-1) = 5/4.
    Ring Zp = gn.t.ring;
    ExtScalar want = ex_mul(ex_from_int(Zp, gn.log_t.m, 5),
                            ex_inverse(ex_from_int(Zp, gn.log_t.m, 4)));
    CHECK(ex_eq(gn.log_t, want));

    Ring R = make_zp_ring(5, 8);
    ExtScalar n2 = ts_node(gs, R, 8, 2);
    CHECK(lc(n2) == 35); // 6^2 - 1
    ExtScalar nm1 = ts_node(gs, R, 8, -1);
    ExtScalar back = ex_mul(ex_add(nm1, ex_one(R, nm1.m)), ex_from_int(R, nm1.m, 6));
    CHECK(ex_eq(back, ex_one(R, back.m)));
}

TEST_CASE("evaluation at t^s - 1 nodes")
{
    Generator gs = make_generator(GeneratorKind::Simple, 5, 8);
    Ring R = make_zp_ring(5, 8);
    PowerSeries f = mk(R, 8, {7, 3, 1}, 3);
    ExtScalar v = ps_eval_ts(f, gs, 2); // 7 + 3*35 + 35^2 = 1337
    CHECK(v.m == 3);
    CHECK(lc(v) == 1337 % 125);
}

TEST_CASE("Newton interpolation recovers polynomials with the expected ledger")
{
    Generator gs = make_generator(GeneratorKind::Simple, 5, 8);
    Ring R = make_zp_ring(5, 8);
    // Evaluate the polynomial through a wide truncation so node values carry
    // full precision; the divided differences are then the only ledger.
    PowerSeries Fwide = mk(R, 8, {7, 3, 1}, 10); // 7 + 3X + X^2
    std::vector<ExtScalar> nodes, values;
    for (long s = 0; s < 4; ++s) {
        nodes.push_back(ts_node(gs, R, 8, s));
        values.push_back(ps_eval(Fwide, nodes.back()));
    }
    PowerSeries G = newton_interpolate(nodes, values);
    // Three divided-difference levels, each dividing by a valuation-1
    // difference (p = 5 exceeds the node count): exactly one digit per level.
    CHECK(G.m == 5);
    CHECK(ps_eq(G, ps_reduce(mk(R, 8, {7, 3, 1}, 4), 5, 4)));
}

TEST_CASE("series JSON round trip is bit-exact")
{
    Ring R = make_unramified_ring(5, 3, 4); // Z_5[zeta_3]? deg = ord_3(5)... d=3 => f=2
    PowerSeries f = ps_zero(R, 4, 3);
    f.c[0] = ex_gen(R, 4);
    f.c[1] = ex_from_int(R, 4, 7);
    f.c[2] = ex_mul(ex_gen(R, 4), ex_gen(R, 4));
    nlohmann::json j = ps_to_json(f);
    PowerSeries g = ps_from_json(R, j);
    CHECK(ps_eq(f, g));
    CHECK(g.m == f.m);
    CHECK(g.n == f.n);
}
