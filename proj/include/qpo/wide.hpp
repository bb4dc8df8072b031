#pragma once

// Elementary functions over double, long double and, when the toolchain has
// libquadmath (define QPO_HAVE_QUADMATH), IEEE binary128. `wide_t` is the
// widest of these.

#include <cmath>
#include <numbers>

#ifdef QPO_HAVE_QUADMATH
extern "C" {
#include <quadmath.h>
}
#endif

namespace qpo::xm {

template <class T> T sqrt(T x) { return std::sqrt(x); }
template <class T> T sin(T x) { return std::sin(x); }
template <class T> T cos(T x) { return std::cos(x); }
template <class T> T atan2(T y, T x) { return std::atan2(y, x); }
template <class T> T copysign(T x, T s) { return std::copysign(x, s); }
template <class T> T abs(T x) { return std::abs(x); }
template <class T> T pi() { return std::numbers::pi_v<T>; }

#ifdef QPO_HAVE_QUADMATH
using wide_t = __float128;
template <> inline __float128 sqrt(__float128 x) { return sqrtq(x); }
template <> inline __float128 sin(__float128 x) { return sinq(x); }
template <> inline __float128 cos(__float128 x) { return cosq(x); }
template <> inline __float128 atan2(__float128 y, __float128 x) { return atan2q(y, x); }
template <> inline __float128 copysign(__float128 x, __float128 s) { return copysignq(x, s); }
template <> inline __float128 abs(__float128 x) { return fabsq(x); }
template <> inline __float128 pi() { return acosq(-1); }
#else
using wide_t = long double;
#endif

}  // namespace qpo::xm
