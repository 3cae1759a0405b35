#ifndef DITCACHE_RESCALER_HPP_
#define DITCACHE_RESCALER_HPP_

#include <cstddef>
#include <vector>

namespace ditcache {

// Polynomial a_0 + a_1 x + ... + a_n x^n mapping raw indicator differences
// to estimated output differences.
struct PolyRescaler {
    std::vector<double> coefficients;  // a_0 .. a_n, never empty

    std::size_t order() const { return coefficients.size() - 1; }

    static PolyRescaler identity() { return PolyRescaler{{0.0, 1.0}}; }
};

// Horner evaluation.
inline double evaluate(const PolyRescaler& rescaler, double x) {
    double acc = 0.0;
    for (std::size_t i = rescaler.coefficients.size(); i-- > 0;) {
        acc = acc * x + rescaler.coefficients[i];
    }
    return acc;
}

}  // namespace ditcache

#endif  // DITCACHE_RESCALER_HPP_
