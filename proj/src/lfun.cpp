#include "iwa/lfun.hpp"
#include "iwa/errors.hpp"

#include <algorithm>
#include <cassert>
#include <climits>

namespace iwa {

int xi_build_precision(int64_t p, int m, int n) {
    int K = std::max(n + 2, m + n - 1);
    int charge = K - 1;
    for (int j = 2; j <= K - 1; ++j) charge += valp(Int(j), Int(p));
    return m + charge;
}

int xi_ring_cap(int64_t p, int m, int n) { return xi_build_precision(p, m, n) + 4; }

XiBuild xi_interpolate(const DirichletCharacter& theta, XiConvention conv,
                       const Generator& gen, const Ring& R, int m, int n) {
    if (theta.parity != +1)
        throw OddCharacter("xi is built from even characters only");
    assert(m >= 1 && n >= 1);
    int64_t p = R->p;
    assert(gen.p == p);

    int K = std::max(n + 2, m + n - 1);
    int m_req = xi_build_precision(p, m, n);
    if (m_req > R->m_max)
        throw std::invalid_argument("xi build needs ring precision cap >= " +
                                    std::to_string(m_req));

    DirichletCharacter chi =
        conv == XiConvention::OnTheta
            ? theta
            : char_mul(char_pow(teichmuller_character(p), 2), char_inverse(theta));
    auto node_exp = [&](int i) -> long {
        return conv == XiConvention::OnTheta ? (long)(i + 1) : (long)(1 - i);
    };
    auto lp_n = [&](long s) -> int {
        return conv == XiConvention::OnTheta ? (int)s : (int)(2 - s);
    };

    std::vector<ExtScalar> nodes, values;
    nodes.reserve(K);
    values.reserve(K);
    for (int i = 0; i < K; ++i) {
        long s = node_exp(i);
        int nn = lp_n(s);
        nodes.push_back(ts_node(gen, R, m_req, s));
        values.push_back(lp_value(chi, nn, R, m_req + valp(Int(nn), Int(p))));
        if (values.back().m < m_req)
            throw std::invalid_argument(
                "lp_value degraded below the build precision: construct the "
                "ring with m_max >= xi_ring_cap(p, m, n) = " +
                std::to_string(xi_ring_cap(p, m, n)));
    }

    PowerSeries f = newton_interpolate(nodes, values);
    assert(f.m >= m && f.n >= n); // consecutive nodes: the charge is exactly the predicted one

    XiBuild out;
    out.xi = ps_reduce(f, m, n);
    int ap = INT_MAX;
    for (int a = 0; a < 2; ++a) {
        long s = node_exp(K + a);
        out.audit_exponents[(size_t)a] = s;
        int nn = lp_n(s);
        ExtScalar lhs = ps_eval_ts(out.xi, gen, s);
        ExtScalar rhs = lp_value(chi, nn, R, m + valp(Int(nn), Int(p)));
        if (!ex_eq(lhs, rhs))
            throw std::logic_error("xi audit failed at held-out node s = " +
                                   std::to_string(s));
        ap = std::min(ap, std::min(lhs.m, rhs.m));
    }
    out.audit_precision = ap;
    return out;
}

PowerSeries xi_twist_to_theta(const PowerSeries& xi_twist, const Generator& gen) {
    assert(xi_twist.pole == 0);
    const Ring& R = xi_twist.ring;
    int m = xi_twist.m, n = xi_twist.n;
    ExtScalar c = ts_node(gen, R, m, 2); // t^2 - 1, valuation 1
    PowerSeries inner =
        ps_sub(ps_mul_scalar(ps_one(R, m, n), c), ps_x(R, m, n));
    inner = ps_mul(inner, ps_inverse(ps_add(ps_one(R, m, n), ps_x(R, m, n))));
    return ps_substitute(xi_twist, inner);
}

int mu_zero_lambda(const PowerSeries& f) {
    assert(f.pole == 0);
    for (int k = 0; k < f.n; ++k)
        if (ex_is_unit(f.coeff(k))) return k;
    throw Indeterminate("no unit coefficient below the truncation: mu = 0 "
                        "is not certifiable at this precision");
}

} // namespace iwa
