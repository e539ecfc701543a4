#pragma once

// Scalar types used by the precision-generic parts of the library.
//
// The frontier, the policy engine and the HJB verifier are templates over
// the working scalar. `double` is the production type; `Quad` (IEEE binary128)
// is used where finite-difference checks need a noise floor far below the
// stencil truncation error.

#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <limits>

namespace divopt {

using Quad = boost::multiprecision::float128;

template <class Real>
[[nodiscard]] inline double to_double(const Real& v) {
    return static_cast<double>(v);
}

template <class Real>
[[nodiscard]] inline bool is_finite(const Real& v) {
    using std::isfinite;
    using boost::multiprecision::isfinite;
    return isfinite(v);
}

template <class Real>
[[nodiscard]] constexpr Real machine_eps() {
    return std::numeric_limits<Real>::epsilon();
}

}  // namespace divopt
