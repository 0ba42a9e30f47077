#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace aefuse {

// mt19937_64 with hand-rolled mappers. std::uniform_* distributions are
// implementation-defined, so every draw here is pinned to the raw stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t raw() { return gen_(); }

    // [0,1), 53-bit resolution
    double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

    // [0,n); modulo bias is irrelevant at the sizes used here
    uint64_t below(uint64_t n) { return n <= 1 ? 0 : gen_() % n; }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = u01();
        double u2 = u01();
        while (u1 <= 0.0) u1 = u01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return mean + stddev * r * std::cos(t);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace aefuse
