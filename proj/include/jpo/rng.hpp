// Seeding and Gaussian draws for the simulators. Sweep members derive
// provably distinct streams from one base seed via splitmix64.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace jpo {

// splitmix64 step; also used to hash (seed, index) pairs into member seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(splitmix64(base) ^ splitmix64(index + 1));
}

// mt19937_64 + Box-Muller. One pair of uniforms yields two normals; the
// spare is cached so sequential draws stay cheap in the SDE loop.
class NormalRng {
  public:
    explicit NormalRng(std::uint64_t seed) : engine_(seed) {}

    double uniform() {
        // 53-bit uniform in (0, 1]
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // Exponential with mean 1/rate.
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace jpo
