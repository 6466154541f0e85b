#pragma once

// Extended-precision helpers shared by the closed-form moment and asymptotic
// variance code. The closed forms are alternating sums of Gamma values whose
// result is O(gamma^4) smaller than the individual terms, so they are
// evaluated with 50 significant digits and rounded once at the end.

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace blockmax::detail {

using Wide = boost::multiprecision::cpp_bin_float_50;

inline Wide wide_tgamma(const Wide& x) { return boost::math::tgamma(x); }

/// g_j = Gamma(1 - j * gamma).
inline Wide gamma_g(int j, const Wide& gamma) { return wide_tgamma(Wide(1) - j * gamma); }

inline Wide wide_pi() { return boost::math::constants::pi<Wide>(); }
inline Wide wide_euler() { return boost::math::constants::euler<Wide>(); }
inline Wide wide_zeta3() { return boost::math::constants::zeta_three<Wide>(); }
inline Wide wide_ln2() { return boost::math::constants::ln_two<Wide>(); }

}  // namespace blockmax::detail
