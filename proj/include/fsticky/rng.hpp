#ifndef FSTICKY_RNG_HPP
#define FSTICKY_RNG_HPP

#include <cstdint>
#include <random>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace fsticky {

// One reproducible random stream. Same (seed, stream_id) gives the same
// sequence on every platform; boost distributions are used because the
// std ones are implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32), 0x5eed5eedu};
        eng_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    // Uniform on the open interval (0,1).
    double uniform() {
        double u;
        do u = unif_(eng_);
        while (u <= 0.0);
        return u;
    }
    double normal() { return norm_(eng_); }
    double exponential() { return expo_(eng_); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 eng_;
    boost::random::uniform_01<double> unif_;
    boost::random::normal_distribution<double> norm_;
    boost::random::exponential_distribution<double> expo_;
};

// Stream id for sub-stream `sub` of path `path` inside experiment `tag`.
inline std::uint64_t stream_id(std::uint32_t tag, std::uint64_t path, std::uint32_t sub = 0) {
    return (static_cast<std::uint64_t>(tag) << 44) ^ (path << 4) ^ sub;
}

} // namespace fsticky

#endif
