#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace renyi_bvn {

// Reproducible random stream addressed by (base_seed, stream_index).
// xoshiro256++ core seeded via a splitmix64 chain over the pair, so streams
// are independent and draws are bit-identical regardless of platform, thread
// count, or evaluation order. Normal variates use explicit Box-Muller (the
// standard library's normal_distribution is implementation-defined).
class RngStream {
  public:
    RngStream(std::uint64_t base_seed, std::uint64_t stream_index)
        : base_seed_(base_seed), stream_index_(stream_index) {
        std::uint64_t sm = base_seed ^ (0x9E3779B97F4A7C15ULL * (stream_index + 1));
        bool nonzero = false;
        for (auto& word : s_) {
            word = splitmix64(sm);
            nonzero = nonzero || word != 0;
        }
        if (!nonzero) s_[0] = 0x1ULL;
    }

    std::uint64_t base_seed() const { return base_seed_; }
    std::uint64_t stream_index() const { return stream_index_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0,1]: never returns 0, safe under log().
    double uniform_pos() { return ((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // Uniform on [0,1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double t = 2.0 * pi() * uniform();
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    // Marsaglia-Tsang; shape < 1 handled via the boost u^(1/a) factor.
    double gamma(double shape) {
        if (shape <= 0.0) throw std::invalid_argument("RngStream::gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform_pos();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double chi_square(double df) { return 2.0 * gamma(df / 2.0); }

  private:
    static constexpr double pi() { return 3.14159265358979323846; }
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    static std::uint64_t splitmix64(std::uint64_t& state) {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t base_seed_;
    std::uint64_t stream_index_;
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace renyi_bvn
