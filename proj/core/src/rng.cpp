#include "cohertherm/rng.hpp"

#include <cmath>

namespace cohertherm {

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal()
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(kTwoPi * u2);
}

Complex Rng::complex_normal()
{
    const double re = normal();
    const double im = normal();
    return {re, im};
}

}  // namespace cohertherm
