#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rsaplus/bigint.hpp"
#include "rsaplus/keys.hpp"
#include "rsaplus/modarith.hpp"
#include "rsaplus/schemes.hpp"

namespace rsaplus::analysis {

using keys::RsaPlusCiphertext;
using keys::RsaPlusPrivateKey;

// Heuristic probability that RSA+ decryption yields a single candidate:
// 1 - prod over odd primes ell | phi(n) of (1 - 1/ell), exact as a rational.
inline mpq_class unique_decryption_probability(const std::vector<BigInt>& odd_prime_divisors) {
    std::set<BigInt> seen;
    mpq_class product(1);
    for (const BigInt& ell : odd_prime_divisors) {
        if (!seen.insert(ell).second)
            throw DuplicatePrime("unique_decryption_probability: duplicate prime");
        mpq_class factor(ell - 1, ell);
        factor.canonicalize();
        product *= factor;
    }
    mpq_class result = mpq_class(1) - product;
    result.canonicalize();
    return result;
}

struct PhiFactorization {
    std::vector<BigInt> odd_primes;  // distinct, ascending
    bool complete;                   // false when an unfactored cofactor remains
};

// Trial division up to `bound`; a remaining probable-prime cofactor is kept,
// anything else is reported as incomplete (the heuristic prediction then is
// a lower bound).
inline PhiFactorization factor_odd_primes(const BigInt& phi, std::uint64_t bound = 1'000'000) {
    PhiFactorization out{{}, true};
    BigInt rest = phi;
    while (mpz_even_p(rest.get_mpz_t()) && rest > 0) rest >>= 1;
    for (std::uint64_t d = 3; d <= bound && rest > 1; d += 2) {
        if (BigInt(d) * d > rest) break;  // remaining cofactor is prime
        if (mpz_fdiv_ui(rest.get_mpz_t(), static_cast<unsigned long>(d)) == 0) {
            out.odd_primes.emplace_back(d);
            while (mpz_fdiv_ui(rest.get_mpz_t(), static_cast<unsigned long>(d)) == 0)
                rest /= static_cast<unsigned long>(d);
        }
    }
    if (rest > 1) {
        Rng probe(0x70b3u);
        if (rest <= BigInt(bound) * BigInt(bound) ||
            primes::is_probable_prime(rest, primes::PrimalityConfig{}, probe)) {
            out.odd_primes.push_back(rest);
        } else {
            out.complete = false;
        }
    }
    std::sort(out.odd_primes.begin(), out.odd_primes.end());
    return out;
}

struct MultiplicityReport {
    mpq_class predicted;          // product-formula heuristic from the odd primes of phi
    double observed = 0.0;        // empirical single-candidate frequency
    std::uint64_t trials = 0;
    std::vector<BigInt> primes_used;
    bool factoring_complete = true;
};

// Encrypts `trials` random messages with fresh naive exponents and counts
// how often decryption returns a single candidate.
inline MultiplicityReport measure_decryption_multiplicity(const RsaPlusPrivateKey& priv,
                                                          std::uint64_t trials,
                                                          const primes::PrimalityConfig& cfg,
                                                          Rng& rng,
                                                          std::uint64_t factor_bound = 1'000'000) {
    if (trials < 1) throw DomainError("measure_decryption_multiplicity: trials must be >= 1");
    const BigInt n = priv.n();
    const auto pub = priv.public_key();
    std::uint64_t singles = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        BigInt m;
        BigInt g;
        do {
            m = rng.in_range(BigInt(1), n - 1);
            mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), n.get_mpz_t());
        } while (g != 1);
        try {
            auto ct = schemes::rsaplus_encrypt(m, pub, schemes::ExponentMode::naive,
                                               schemes::ExponentProfile::toy(), cfg, rng);
            auto candidates = schemes::rsaplus_decrypt(ct, priv);
            if (candidates.size() == 1) ++singles;
        } catch (const NoInvertibleRoot&) {
            --t;  // improperly chosen x; resample the trial
        }
    }
    PhiFactorization fac = factor_odd_primes(priv.phi, factor_bound);
    MultiplicityReport report;
    report.predicted = unique_decryption_probability(fac.odd_primes);
    report.observed = static_cast<double>(singles) / static_cast<double>(trials);
    report.trials = trials;
    report.primes_used = fac.odd_primes;
    report.factoring_complete = fac.complete;
    return report;
}

// Fraction of ciphertexts decrypting to two candidates (the `a` of the
// counting argument); complement of the single-candidate frequency.
inline double estimate_two_preimage_rate(const RsaPlusPrivateKey& priv, std::uint64_t trials,
                                         const primes::PrimalityConfig& cfg, Rng& rng) {
    MultiplicityReport r = measure_decryption_multiplicity(priv, trials, cfg, rng);
    return 1.0 - r.observed;
}

// Single-line record; field names are part of the interface.
inline std::string multiplicity_report_json(const MultiplicityReport& r) {
    std::ostringstream out;
    out << "{\"predicted_num\": " << r.predicted.get_num().get_str()
        << ", \"predicted_den\": " << r.predicted.get_den().get_str()
        << ", \"observed\": " << r.observed << ", \"trials\": " << r.trials << ", \"primes\": [";
    for (std::size_t i = 0; i < r.primes_used.size(); ++i) {
        if (i) out << ", ";
        out << r.primes_used[i].get_str();
    }
    out << "]}";
    return out.str();
}

inline std::string multiplicity_report_table(const MultiplicityReport& r) {
    std::ostringstream out;
    out << "trials              " << r.trials << "\n";
    out << "predicted           " << r.predicted.get_num().get_str() << "/"
        << r.predicted.get_den().get_str() << " = " << r.predicted.get_d()
        << (r.factoring_complete ? "" : " (lower bound: phi not fully factored)") << "\n";
    out << "observed            " << r.observed << "\n";
    out << "odd primes of phi  ";
    for (const BigInt& p : r.primes_used) out << " " << p.get_str();
    out << "\n";
    return out.str();
}

// Two essentially different roots of the same square factor n:
// gcd(x1 + x3, n) is a nontrivial factor.
inline std::pair<BigInt, BigInt> factor_from_two_roots(const BigInt& x1, const BigInt& x3,
                                                       const BigInt& n) {
    BigInt diff = (x1 - x3) % n;
    BigInt sum = (x1 + x3) % n;
    if (diff < 0) diff += n;
    if (diff == 0 || sum == 0)
        throw TrivialPair("factor_from_two_roots: x1 = +/-x3 (mod n)");
    if ((x1 * x1 - x3 * x3) % n != 0)
        throw DomainError("factor_from_two_roots: inputs are not roots of a common square");
    BigInt g;
    mpz_gcd(g.get_mpz_t(), sum.get_mpz_t(), n.get_mpz_t());
    BigInt p = g;
    BigInt q = n / g;
    if (p > q) std::swap(p, q);
    return {p, q};
}

struct ExponentFactorConfig {
    unsigned base_budget = 64;
};

// Universal-exponent factoring: M = y * y_inv - 1 is a multiple of phi(n);
// stripping powers of two from M and squaring a^t back up locates a
// nontrivial square root of 1 mod n.
inline std::pair<BigInt, BigInt> factor_from_exponent_multiple(const BigInt& y, const BigInt& y_inv,
                                                               const BigInt& n,
                                                               const ExponentFactorConfig& cfg,
                                                               Rng& rng) {
    BigInt multiple = y * y_inv - 1;
    if (multiple <= 0) throw BadWitness("factor_from_exponent_multiple: y*y_inv - 1 is not positive");
    if (mpz_odd_p(multiple.get_mpz_t()))
        throw BadWitness("factor_from_exponent_multiple: y*y_inv - 1 is odd, phi(n) is even");

    BigInt t = multiple;
    unsigned long s = 0;
    while (mpz_even_p(t.get_mpz_t())) {
        t >>= 1;
        ++s;
    }

    unsigned not_annihilated = 0;  // bases a with a^multiple != 1, evidence against the witness
    for (unsigned attempt = 0; attempt < cfg.base_budget; ++attempt) {
        BigInt a = rng.in_range(BigInt(2), n - 2);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), n.get_mpz_t());
        if (g != 1) {
            BigInt p = g, q = n / g;
            if (p > q) std::swap(p, q);
            return {p, q};
        }
        BigInt prev = modarith::mod_pow(a, t, n);
        if (prev == 1 || prev == n - 1) continue;
        bool reached_one = false;
        for (unsigned long i = 0; i < s; ++i) {
            BigInt cur = (prev * prev) % n;
            if (cur == 1) {
                reached_one = true;
                // prev is a square root of 1 other than +/-1
                if (prev != n - 1) {
                    BigInt h;
                    BigInt pm1 = prev - 1;
                    mpz_gcd(h.get_mpz_t(), pm1.get_mpz_t(), n.get_mpz_t());
                    if (h != 1 && h != n) {
                        BigInt p = h, q = n / h;
                        if (p > q) std::swap(p, q);
                        return {p, q};
                    }
                }
                break;
            }
            if (cur == n - 1) {
                reached_one = true;  // collapses through -1, no information
                break;
            }
            prev = cur;
        }
        if (!reached_one) ++not_annihilated;
    }
    if (not_annihilated * 2 > cfg.base_budget)
        throw BadWitness("factor_from_exponent_multiple: y*y_inv - 1 does not behave like a multiple of phi(n)");
    throw BudgetExceeded("factor_from_exponent_multiple: base budget exceeded, retry with new bases");
}

// Black-box RSA+ decryptor: maps (c, y) to one or two plaintext candidates.
using OracleHandle = std::function<std::vector<BigInt>(const BigInt& c, const BigInt& y)>;

// An RSA+ decryption box breaks RSA: feed it (c, e^2) and keep the candidate
// that re-encrypts to c.
inline BigInt rsa_break_via_rsaplus_oracle(const BigInt& c, const BigInt& e, const BigInt& n,
                                           const OracleHandle& oracle) {
    std::vector<BigInt> candidates = oracle(c, (e * e) % n);
    for (const BigInt& m : candidates)
        if (modarith::mod_pow(m, e, n) == c) return m;
    throw OracleFailure("rsa_break_via_rsaplus_oracle: no candidate verifies m^e = c");
}

inline bool jacobi_leak_check(const BigInt& m, const RsaPlusCiphertext& ct, const BigInt& n) {
    return modarith::jacobi(m, n) == modarith::jacobi(ct.c, n);
}

}  // namespace rsaplus::analysis
