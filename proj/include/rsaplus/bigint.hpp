#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace rsaplus {

using BigInt = mpz_class;

// Domain failures raised by the arithmetic and scheme layers.
// CLI maps these to exit code 1; usage errors map to 2.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotAResidue : DomainError {
    explicit NotAResidue(const std::string& what) : DomainError(what) {}
};
struct WrongResidueClass : DomainError {
    explicit WrongResidueClass(const std::string& what) : DomainError(what) {}
};
struct InvalidModulus : DomainError {
    explicit InvalidModulus(const std::string& what) : DomainError(what) {}
};
struct NotCoprime : DomainError {
    explicit NotCoprime(const std::string& what) : DomainError(what) {}
};
struct NoInvertibleRoot : DomainError {
    explicit NoInvertibleRoot(const std::string& what) : DomainError(what) {}
};
struct WrongKeyShape : DomainError {
    explicit WrongKeyShape(const std::string& what) : DomainError(what) {}
};
struct Exhausted : DomainError {
    explicit Exhausted(const std::string& what) : DomainError(what) {}
};
struct RangeEmpty : DomainError {
    explicit RangeEmpty(const std::string& what) : DomainError(what) {}
};
struct TrivialPair : DomainError {
    explicit TrivialPair(const std::string& what) : DomainError(what) {}
};
struct BudgetExceeded : DomainError {
    explicit BudgetExceeded(const std::string& what) : DomainError(what) {}
};
struct BadWitness : DomainError {
    explicit BadWitness(const std::string& what) : DomainError(what) {}
};
struct DuplicatePrime : DomainError {
    explicit DuplicatePrime(const std::string& what) : DomainError(what) {}
};
struct OracleFailure : DomainError {
    explicit OracleFailure(const std::string& what) : DomainError(what) {}
};
struct ParseError : DomainError {
    explicit ParseError(const std::string& what) : DomainError(what) {}
};

inline std::size_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return mpz_sizeinbase(v.get_mpz_t(), 2);
}

inline BigInt pow2(unsigned long bits) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), 2, bits);
    return r;
}

// Seedable random source shared by key generation, exponent sampling and
// the Monte Carlo loops. One instance per caller; never shared across
// threads without coordination.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(gmp_randinit_mt) {
        state_.seed(static_cast<unsigned long>(seed));
    }

    // Uniform in [0, bound).
    BigInt below(const BigInt& bound) {
        return state_.get_z_range(bound);
    }

    // Uniform in [lo, hi] inclusive.
    BigInt in_range(const BigInt& lo, const BigInt& hi) {
        if (lo > hi) throw RangeEmpty("in_range: lo > hi");
        return lo + below(hi - lo + 1);
    }

    std::uint64_t next_u64() {
        BigInt v = state_.get_z_bits(64);
        std::uint64_t out = 0;
        mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
        return out;
    }

private:
    gmp_randclass state_;
};

}  // namespace rsaplus
