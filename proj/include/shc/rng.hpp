#pragma once

#include <cmath>
#include <cstdint>

namespace shc {

// Small counter-seeded generator. Each logical stream (one Monte Carlo
// sample, typically) derives its state from (master seed, stream id), so
// results do not depend on how samples are distributed over workers.
// Core step is splitmix64.
class RngStream {
public:
    RngStream() = default;

    static RngStream from(std::uint64_t master_seed, std::uint64_t stream_id)
    {
        RngStream r;
        r.state_ = mix(master_seed ^ mix(stream_id + 0x9e3779b97f4a7c15ULL));
        return r;
    }

    std::uint64_t next_u64()
    {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform in (0,1); never returns 0 or 1
    double uniform()
    {
        const std::uint64_t bits = next_u64() >> 11; // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    // standard normal, Marsaglia polar with one cached spare
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

private:
    static std::uint64_t mix(std::uint64_t z)
    {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace shc
