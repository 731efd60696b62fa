#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iwa/errors.hpp"
#include "iwa/lfun.hpp"

using namespace iwa;

namespace {
ExtScalar lint(const Ring& R, int m, long v) { return ex_from_int(R, m, Int(v)); }
} // namespace

TEST_CASE("xi build precision budget") {
    // K = max(n+2, m+n-1) nodes; charge (K-1) + v_p((K-1)!)
    CHECK(xi_build_precision(5, 3, 6) == 3 + 7 + 1); // K = 8
    CHECK(xi_build_precision(3, 3, 5) == 3 + 6 + 2); // K = 7, v_3(6!) = 2
    CHECK(xi_build_precision(5, 4, 5) == 4 + 7 + 1); // K = m+n-1 = 8 branch
}

TEST_CASE("omega^2 series on the theta convention: nodes and audit") {
    auto R = make_zp_ring(5, xi_ring_cap(5, 3, 6));
    auto g = make_generator(GeneratorKind::Simple, 5, xi_ring_cap(5, 3, 6));
    auto omega2 = char_pow(teichmuller_character(5), 2);

    auto built = xi_interpolate(omega2, XiConvention::OnTheta, g, R, 3, 6);
    CHECK(built.xi.m == 3);
    CHECK(built.xi.n == 6);
    CHECK(built.audit_precision >= 3);

    // node k = 1: L_5(omega^2, 0) = 37 mod 125 (frozen in the character tests)
    CHECK(ex_eq(ps_eval_ts(built.xi, g, 1), lint(R, 3, 37)));

    // fresh exponents, beyond both the build and the audit windows
    for (long k : {11L, 13L}) {
        auto lhs = ps_eval_ts(built.xi, g, k);
        auto rhs = lp_value(omega2, (int)k, R, 3);
        CHECK(ex_eq(lhs, rhs));
    }

    // OnTheta series of an odd character is refused
    CHECK_THROWS_AS(
        xi_interpolate(teichmuller_character(5), XiConvention::OnTheta, g, R, 2, 3),
        OddCharacter);
}

TEST_CASE("Eisenstein constant term at X = 0: capstone") {
    auto R = make_zp_ring(5, xi_ring_cap(5, 3, 6));
    auto g = make_generator(GeneratorKind::Simple, 5, xi_ring_cap(5, 3, 6));
    auto theta = make_character(56, {1, 1, 3});

    auto built = xi_interpolate(theta, XiConvention::OnTwist, g, R, 3, 6);
    // xi(0) = -(1 - theta^{-1}(5) 5) B_{2,theta^{-1}} / 2 = -(1-5)*40/2 = 80
    CHECK(ex_eq(built.xi.coeff(0), lint(R, 3, 80)));
    CHECK(ex_eq(ps_eval(built.xi, ex_zero(R, 3)), lint(R, 3, 80)));

    // mu = 0 certificate and the Weierstrass factorization agree
    int lam = mu_zero_lambda(built.xi);
    CHECK(lam >= 1); // xi(0) = 80 is divisible by 5
    auto wd = weierstrass_data(built.xi);
    CHECK(wd.mu == 0);
    CHECK(wd.lambda == lam);
}

TEST_CASE("Eisenstein constant term at X = 0: p = 3, N = 29") {
    auto R = make_zp_ring(3, xi_ring_cap(3, 3, 5));
    auto g = make_generator(GeneratorKind::Simple, 3, xi_ring_cap(3, 3, 5));
    auto theta = [&] {
        auto hits = find_eisenstein_pairs(3, 3, 29);
        REQUIRE(hits.size() == 1);
        return hits[0].theta;
    }();

    auto built = xi_interpolate(theta, XiConvention::OnTwist, g, R, 3, 5);
    // theta quadratic, theta(3) = -1, B_{2,theta} = 12 mod 27:
    // xi(0) = -(1+3)*12/2 = -24 = 3 mod 27
    CHECK(ex_eq(built.xi.coeff(0), lint(R, 3, 3)));
    CHECK(mu_zero_lambda(built.xi) >= 1);
    CHECK(weierstrass_data(built.xi).mu == 0);
}

TEST_CASE("convention translation: OnTwist for theta = OnTheta for the twist") {
    auto R = make_zp_ring(5, xi_ring_cap(5, 3, 6));
    auto g = make_generator(GeneratorKind::Simple, 5, xi_ring_cap(5, 3, 6));
    auto theta = make_character(56, {1, 1, 3});
    auto chi = char_mul(char_pow(teichmuller_character(5), 2), char_inverse(theta));

    auto on_twist = xi_interpolate(theta, XiConvention::OnTwist, g, R, 3, 6);
    auto on_theta = xi_interpolate(chi, XiConvention::OnTheta, g, R, 3, 6);

    // substitute Y -> (t^2 - 1 - Y)/(1 + Y) into the OnTwist series
    auto translated = xi_twist_to_theta(on_twist.xi, g);
    CHECK(translated.m >= 3);
    CHECK(ps_eq(translated, on_theta.xi));

    // and the translated series still interpolates at a fresh node
    CHECK(ex_eq(ps_eval_ts(translated, g, 12), lp_value(chi, 12, R, 3)));
}

TEST_CASE("generator choice: same L-values through either coordinate") {
    auto R = make_zp_ring(5, xi_ring_cap(5, 3, 6));
    auto gs = make_generator(GeneratorKind::Simple, 5, xi_ring_cap(5, 3, 6));
    auto gn = make_generator(GeneratorKind::Normalized, 5, xi_ring_cap(5, 3, 6));
    auto omega2 = char_pow(teichmuller_character(5), 2);

    auto bs = xi_interpolate(omega2, XiConvention::OnTheta, gs, R, 3, 6);
    auto bn = xi_interpolate(omega2, XiConvention::OnTheta, gn, R, 3, 6);

    // the two series are different coordinates of one function: they agree
    // at every t^k - 1 (with the matching generator), not coefficientwise
    auto rhs = lp_value(omega2, 11, R, 3);
    CHECK(ex_eq(ps_eval_ts(bs.xi, gs, 11), rhs));
    CHECK(ex_eq(ps_eval_ts(bn.xi, gn, 11), rhs));
    CHECK(!ps_eq(bs.xi, bn.xi)); // but the coordinates do differ
}

TEST_CASE("mu certificate is honest about p-power content") {
    auto R = make_zp_ring(5, 6);
    // f = 5 * (1 + X): no unit coefficient at any truncation
    auto f = ps_mul_scalar(ps_add(ps_one(R, 4, 4), ps_x(R, 4, 4)), lint(R, 4, 5));
    CHECK_THROWS_AS(mu_zero_lambda(f), Indeterminate);
    auto wd = weierstrass_data(f);
    CHECK(wd.mu == 1);
    CHECK(wd.lambda == 0);
}
