// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <string>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "cogisac/detector.hpp"

namespace cogisac {

// Q_1(a, b) is the survival function at b^2 of a noncentral chi-square with two
// degrees of freedom and noncentrality a^2.
double marcum_q1(double a, double b) {
    if (std::isnan(a) || std::isnan(b) || a < 0.0 || b < 0.0) {
        throw ConfigError("detector", "marcum_q1 needs a, b >= 0");
    }
    if (b == 0.0) return 1.0;
    if (a == 0.0) return std::exp(-0.5 * b * b);
    if (std::isinf(a)) return 1.0;
    if (std::isinf(b)) return 0.0;
    // Far tails: 1 - Q_1 and Q_1 are bounded by exp(-(a - b)^2 / 2) there.
    if (a - b > 40.0) return 1.0;
    if (b - a > 40.0) return 0.0;
    try {
        const boost::math::non_central_chi_squared dist(2.0, a * a);
        return boost::math::cdf(boost::math::complement(dist, b * b));
    } catch (const std::exception& e) {
        throw NumericalError("detector", std::string("marcum_q1 evaluation failed: ") + e.what());
    }
}

}  // namespace cogisac
