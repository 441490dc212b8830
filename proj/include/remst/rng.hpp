#ifndef REMST_RNG_HPP
#define REMST_RNG_HPP

#include <cstdint>
#include <random>

namespace remst {

// Deterministic RNG for scenario generation. mt19937_64 output is fixed by
// the standard; the double conversion is done by hand because the stdlib
// distributions are implementation-defined and would break cross-platform
// reproducibility of generated graphs.
class Rng {
 public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound) via rejection sampling (no modulo bias).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % bound;
    }

 private:
    std::mt19937_64 gen_;
};

}  // namespace remst

#endif  // REMST_RNG_HPP
