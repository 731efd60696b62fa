#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace iwa {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int ipow(Int base, unsigned e) {
    Int r = 1;
    while (e) {
        if (e & 1) r *= base;
        base *= base;
        e >>= 1;
    }
    return r;
}

// Representative in [0, M).
inline Int umod(const Int& a, const Int& M) {
    Int r = a % M;
    if (r < 0) r += M;
    return r;
}

inline Int mulmod(const Int& a, const Int& b, const Int& M) { return umod(a * b, M); }

inline Int powmod(Int base, Int e, const Int& M) {
    Int r = 1;
    base = umod(base, M);
    while (e > 0) {
        if ((e & 1) != 0) r = r * base % M;
        base = base * base % M;
        e >>= 1;
    }
    return r;
}

// v_p(a) for a != 0; -1 encodes v_p(0) = +infinity.
inline int valp(Int a, const Int& p) {
    if (a == 0) return -1;
    int v = 0;
    while (a % p == 0) {
        a /= p;
        ++v;
    }
    return v;
}

inline std::string dec(const Int& a) { return a.str(); }

std::vector<int64_t> prime_factors(int64_t n); // distinct primes, ascending
int64_t euler_phi(int64_t n);
int64_t mul_order(int64_t a, int64_t n); // order of a in (Z/n)^*, gcd(a,n)=1

} // namespace iwa
