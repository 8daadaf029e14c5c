#pragma once

#include <cmath>
#include <cstdint>

namespace qtk {

// splitmix64 stream. The integer stream is bit-stable everywhere; derived
// draws avoid std::uniform_real_distribution and friends so seeded runs do
// not depend on the standard library's distribution internals.
class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (s_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // k in [0, bound)
    uint64_t below(uint64_t bound) {
        return static_cast<uint64_t>(uniform() * static_cast<double>(bound)) % bound;
    }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t s_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Stable seed derivation for independent streams (shots, inputs, commands).
inline uint64_t mix_seed(uint64_t base, uint64_t stream) {
    Rng r(base ^ (0x9e3779b97f4a7c15ull + stream * 0xbf58476d1ce4e5b9ull));
    r.next_u64();
    return r.next_u64();
}

inline uint64_t mix_seed(uint64_t base, uint64_t stream, uint64_t idx) {
    return mix_seed(mix_seed(base, stream), idx);
}

}  // namespace qtk
