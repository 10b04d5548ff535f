#pragma once

#include <cstdint>
#include <string_view>

namespace qpar {

// Counter-based splittable generator. Every consumer derives its own stream
// from the run seed by a chain of labels, so adding a consumer never perturbs
// the values another one sees. Output is platform-independent.
class SplitRng {
  public:
    explicit SplitRng(uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ull)) {}

    // independent child stream; does not advance this stream
    SplitRng child(std::string_view label) const {
        return SplitRng(mix(key_ ^ fnv1a(label)), 0);
    }
    SplitRng child(uint64_t index) const {
        return SplitRng(mix(key_ ^ mix(index ^ 0x9e3779b97f4a7c15ull)), 0);
    }

    uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    // uniform in [0, n) by rejection
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = next();
        } while (v >= lim);
        return v % n;
    }

    int pm1() { return (next() >> 63) ? -1 : 1; }
    bool coin() { return (next() >> 63) != 0; }

    // uniform in [0,1) with 53 random bits
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    SplitRng(uint64_t key, uint64_t ctr) : key_(key), counter_(ctr) {}

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }
    static uint64_t fnv1a(std::string_view s) {
        uint64_t h = 0xcbf29ce484222325ull;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ull;
        }
        return h;
    }

    uint64_t key_;
    uint64_t counter_ = 0;
};

}  // namespace qpar
