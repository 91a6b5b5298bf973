#pragma once

#include <cstdint>
#include <random>

#include "cohertherm/common.hpp"

namespace cohertherm {

/// Reproducible random stream.
///
/// Engine: MT19937-64 (Matsumoto & Nishimura 64-bit Mersenne Twister, the
/// standard `std::mt19937_64` parameter set) seeded with the 64-bit config
/// seed. Derived variates use fixed formulas instead of `<random>`
/// distributions, whose algorithms are implementation-defined:
///   uniform()  = (x >> 11) * 2^-53            with x the next engine output
///   normal()   = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), two fresh uniforms per call
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    Complex complex_normal();

private:
    std::mt19937_64 engine_;
};

}  // namespace cohertherm
