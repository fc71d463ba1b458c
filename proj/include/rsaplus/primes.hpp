#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rsaplus/bigint.hpp"
#include "rsaplus/modarith.hpp"

namespace rsaplus::primes {

struct PrimalityConfig {
    unsigned rounds = 40;                 // strong-pseudoprime rounds
    std::uint64_t attempt_budget = 1'000'000;  // candidate draws before Exhausted
};

namespace detail {

// Odd primes below 10^4 for trial division; numbers below 10^8 are decided
// exactly by this table.
inline const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> table = [] {
        constexpr std::uint32_t bound = 10'000;
        std::vector<bool> sieve(bound, true);
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 2; i < bound; ++i) {
            if (!sieve[i]) continue;
            out.push_back(i);
            for (std::uint32_t j = 2 * i; j < bound; j += i) sieve[j] = false;
        }
        return out;
    }();
    return table;
}

// One strong-pseudoprime round for base a; n - 1 = 2^s * d with d odd.
inline bool strong_round(const BigInt& n, const BigInt& a, const BigInt& d, unsigned long s) {
    BigInt x = modarith::mod_pow(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = (x * x) % n;
        if (x == n - 1) return true;
        if (x == 1) return false;
    }
    return false;
}

}  // namespace detail

// Trial division by the small-prime table, then `rounds` strong rounds with
// independent random bases.
inline bool is_probable_prime(const BigInt& n, const PrimalityConfig& cfg, Rng& rng) {
    if (n < 2) return false;
    const std::uint64_t table_limit = 100'000'000;  // 10^4 squared
    for (std::uint32_t p : detail::small_primes()) {
        if (n == p) return true;
        if (mpz_fdiv_ui(n.get_mpz_t(), p) == 0) return false;
    }
    if (n < table_limit) return true;

    BigInt d = n - 1;
    unsigned long s = 0;
    while (mpz_even_p(d.get_mpz_t())) {
        d >>= 1;
        ++s;
    }
    for (unsigned r = 0; r < cfg.rounds; ++r) {
        BigInt a = 2 + rng.below(n - 3);  // base in [2, n-2]
        if (!detail::strong_round(n, a, d, s)) return false;
    }
    return true;
}

using ResidueFilter = std::function<bool(const BigInt&)>;

// Uniformly sampled probable prime in [lo, hi] passing the filter.
// Candidates are redrawn rather than incremented, keeping the draw uniform
// over admissible primes.
inline BigInt random_prime_in(const BigInt& lo, const BigInt& hi,
                              const ResidueFilter& filter,
                              const PrimalityConfig& cfg, Rng& rng) {
    if (lo > hi) throw RangeEmpty("random_prime_in: empty interval");
    for (std::uint64_t attempt = 0; attempt < cfg.attempt_budget; ++attempt) {
        BigInt candidate = rng.in_range(lo, hi);
        if (filter && !filter(candidate)) continue;
        if (is_probable_prime(candidate, cfg, rng)) return candidate;
    }
    throw Exhausted("random_prime_in: attempt budget exceeded");
}

inline bool not_1_mod_8(const BigInt& v) {
    return mpz_fdiv_ui(v.get_mpz_t(), 8) != 1;
}

// Key primes: p in [2^b, 2^(b+1)], q in [2^(b+2), 2^(b+3)], both != 1 (mod 8)
// and 4p <= q <= 8p. Sampling q from [4p, 2^(b+3)] meets all three q bounds
// at once since 4p >= 2^(b+2) and 8p >= 2^(b+3).
inline std::pair<BigInt, BigInt> gen_prime_pair(unsigned b, const PrimalityConfig& cfg, Rng& rng) {
    if (b < 3) throw DomainError("gen_prime_pair: b must be >= 3");
    BigInt p = random_prime_in(pow2(b), pow2(b + 1), not_1_mod_8, cfg, rng);
    BigInt q = random_prime_in(4 * p, pow2(b + 3), not_1_mod_8, cfg, rng);
    return {p, q};
}

// Random odd prime <= 100 dividing neither p-1 nor q-1, so coprime with
// phi(n).
inline BigInt pick_ell1(const BigInt& p, const BigInt& q, Rng& rng) {
    static const std::array<unsigned, 24> candidates = {
        3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41,
        43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
    std::vector<unsigned> admissible;
    for (unsigned ell : candidates) {
        if (mpz_fdiv_ui(BigInt(p - 1).get_mpz_t(), ell) != 0 &&
            mpz_fdiv_ui(BigInt(q - 1).get_mpz_t(), ell) != 0)
            admissible.push_back(ell);
    }
    if (admissible.empty()) throw Exhausted("pick_ell1: no prime <= 100 coprime with phi(n)");
    BigInt idx = rng.below(BigInt(static_cast<unsigned long>(admissible.size())));
    return BigInt(admissible[idx.get_ui()]);
}

}  // namespace rsaplus::primes
