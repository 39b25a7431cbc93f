#ifndef CROWD_COMMON_HPP
#define CROWD_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace crowd {

// Exit-code categories shared with the C API and CLI.
enum class ErrorCode : int {
    Usage = 1,
    Data = 2,
    Numeric = 3,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline Error usage_error(const std::string& msg) { return Error(ErrorCode::Usage, msg); }
inline Error data_error(const std::string& msg) { return Error(ErrorCode::Data, msg); }
inline Error numeric_error(const std::string& msg) { return Error(ErrorCode::Numeric, msg); }

// Deterministic RNG. Distributions are hand-rolled so streams do not depend
// on the standard library's implementation-defined distribution algorithms.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // uniform in [0,1)
    double uniform() {
        return (gen_() >> 11) * (1.0 / 9007199254740992.0);
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    uint64_t uniform_index(uint64_t n) {
        return static_cast<uint64_t>(uniform() * static_cast<double>(n)) % n;
    }

    // standard normal via Box-Muller
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double gauss(double mean, double std) { return mean + std * gauss(); }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline constexpr const char* kToolName = "canomaly";
inline constexpr const char* kToolVersion = "0.1.0";

// 64-bit FNV-1a, used for config hashes in output metadata.
inline uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace crowd

#endif
