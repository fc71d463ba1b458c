#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rsaplus/bigint.hpp"
#include "rsaplus/modarith.hpp"
#include "rsaplus/primes.hpp"

namespace rsaplus::keys {

enum class Scheme { rsa, rabin, rsaplus };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::rsa: return "rsa";
        case Scheme::rabin: return "rabin";
        case Scheme::rsaplus: return "rsaplus";
    }
    return "?";
}

struct RsaPublicKey {
    BigInt n;
    BigInt e;
};

struct RsaKeyPair {
    BigInt n, e, d, p, q;
    RsaPublicKey public_key() const { return {n, e}; }
};

struct RabinPublicKey {
    BigInt n;
};

struct RabinKeyPair {
    BigInt n, p, q;
    RabinPublicKey public_key() const { return {n}; }
};

struct RsaPlusPublicKey {
    BigInt n;
    BigInt ell1;
};

struct RsaPlusPrivateKey {
    BigInt p, q;
    BigInt phi;           // (p-1)(q-1)
    BigInt q_inv_mod_p;   // CRT precomputation
    BigInt p_inv_mod_q;
    BigInt ell1;
    BigInt n() const { return p * q; }
    RsaPlusPublicKey public_key() const { return {p * q, ell1}; }
};

// RSA+ ciphertexts are pairs; RSA and Rabin ciphertexts reuse this with y
// absent at the codec level.
struct RsaPlusCiphertext {
    BigInt c;
    BigInt y;
};

struct CiphertextFile {
    Scheme scheme;
    BigInt c;
    std::optional<BigInt> y;  // present only for rsaplus
};

inline RsaPlusPrivateKey make_rsaplus_private(const BigInt& p, const BigInt& q, const BigInt& ell1) {
    RsaPlusPrivateKey priv;
    priv.p = p;
    priv.q = q;
    priv.phi = (p - 1) * (q - 1);
    priv.q_inv_mod_p = modarith::mod_inv(q, p).value;
    priv.p_inv_mod_q = modarith::mod_inv(p, q).value;
    priv.ell1 = ell1;
    return priv;
}

inline std::pair<RsaPlusPublicKey, RsaPlusPrivateKey>
keygen_rsaplus(unsigned b, const primes::PrimalityConfig& cfg, Rng& rng) {
    auto [p, q] = primes::gen_prime_pair(b, cfg, rng);
    BigInt ell1 = primes::pick_ell1(p, q, rng);
    RsaPlusPrivateKey priv = make_rsaplus_private(p, q, ell1);
    return {priv.public_key(), priv};
}

// e is fixed to 65537; prime pairs are redrawn until e divides neither
// p-1 nor q-1.
inline RsaKeyPair keygen_rsa(unsigned b, const primes::PrimalityConfig& cfg, Rng& rng) {
    if (b < 10) throw DomainError("keygen_rsa: b must be >= 10");
    const BigInt e(65537);
    for (std::uint64_t attempt = 0; attempt < cfg.attempt_budget; ++attempt) {
        auto [p, q] = primes::gen_prime_pair(b, cfg, rng);
        if ((p - 1) % e == 0 || (q - 1) % e == 0) continue;
        BigInt phi = (p - 1) * (q - 1);
        auto inv = modarith::mod_inv(e, phi);
        if (!inv.ok) continue;
        return {p * q, e, inv.value, p, q};
    }
    throw Exhausted("keygen_rsa: attempt budget exceeded");
}

inline RabinKeyPair keygen_rabin(unsigned b, const primes::PrimalityConfig& cfg, Rng& rng) {
    auto [p, q] = primes::gen_prime_pair(b, cfg, rng);
    return {p * q, p, q};
}

// ---------------------------------------------------------------------------
// Codec: line-oriented `field = value` text, lowercase hex big integers.
// ---------------------------------------------------------------------------

using KeyValue = std::variant<RsaPublicKey, RsaKeyPair, RabinPublicKey, RabinKeyPair,
                              RsaPlusPublicKey, RsaPlusPrivateKey, CiphertextFile>;

namespace codec_detail {

inline std::string hex(const BigInt& v) {
    if (v < 0) throw ParseError("codec: negative integer");
    return v.get_str(16);
}

inline void emit(std::ostringstream& out, const std::string& field, const BigInt& v) {
    out << field << " = " << hex(v) << "\n";
}

inline BigInt parse_hex(const std::string& text, std::size_t line_no, const std::string& field) {
    if (text.empty())
        throw ParseError("line " + std::to_string(line_no) + ": empty value for '" + field + "'");
    for (char ch : text) {
        bool ok = (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'f');
        if (!ok)
            throw ParseError("line " + std::to_string(line_no) + ": field '" + field +
                             "' is not lowercase hex");
    }
    BigInt v;
    v.set_str(text, 16);
    return v;
}

struct ParsedDoc {
    std::string scheme, kind;
    std::vector<std::pair<std::string, BigInt>> fields;

    BigInt take(const std::string& name) {
        for (auto it = fields.begin(); it != fields.end(); ++it) {
            if (it->first == name) {
                BigInt v = it->second;
                fields.erase(it);
                return v;
            }
        }
        throw ParseError("missing field '" + name + "'");
    }

    void reject_leftovers() const {
        if (!fields.empty())
            throw ParseError("unknown field '" + fields.front().first + "'");
    }
};

inline ParsedDoc parse_lines(const std::string& text) {
    if (text.empty() || text.back() != '\n')
        throw ParseError("missing trailing newline");
    ParsedDoc doc;
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto sep = line.find(" = ");
        if (sep == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'field = value'");
        std::string field = line.substr(0, sep);
        std::string value = line.substr(sep + 3);
        if (field == "scheme") {
            doc.scheme = value;
        } else if (field == "kind") {
            doc.kind = value;
        } else {
            doc.fields.emplace_back(field, parse_hex(value, line_no, field));
        }
    }
    if (doc.scheme.empty()) throw ParseError("missing 'scheme' field");
    if (doc.kind.empty()) throw ParseError("missing 'kind' field");
    return doc;
}

inline Scheme parse_scheme(const std::string& name) {
    if (name == "rsa") return Scheme::rsa;
    if (name == "rabin") return Scheme::rabin;
    if (name == "rsaplus") return Scheme::rsaplus;
    throw ParseError("unknown scheme '" + name + "'");
}

inline void check_modulus(const BigInt& n) {
    if (n < 15 || mpz_even_p(n.get_mpz_t()))
        throw ParseError("invalid modulus: n must be odd and composite");
}

// Deliberately does not enforce the generation-time bound 4p <= q <= 8p:
// externally supplied toy keys (e.g. 7*19) are legitimate decryption keys.
inline void check_key_primes(const BigInt& n, const BigInt& p, const BigInt& q) {
    if (p * q != n) throw ParseError("invalid key: p*q != n");
    if (p == q) throw ParseError("invalid key: p == q");
    if (mpz_even_p(p.get_mpz_t()) || mpz_even_p(q.get_mpz_t()))
        throw ParseError("invalid key: even prime factor");
    if (mpz_fdiv_ui(p.get_mpz_t(), 8) == 1 || mpz_fdiv_ui(q.get_mpz_t(), 8) == 1)
        throw ParseError("invalid key: prime congruent to 1 mod 8");
}

inline void check_ell1(const BigInt& ell1, const BigInt* phi) {
    bool small_prime = false;
    for (unsigned ell : {3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u, 41u, 43u, 47u,
                         53u, 59u, 61u, 67u, 71u, 73u, 79u, 83u, 89u, 97u})
        if (ell1 == ell) small_prime = true;
    if (!small_prime) throw ParseError("invalid key: ell1 not an odd prime <= 100");
    if (phi && *phi % ell1 == 0) throw ParseError("invalid key: ell1 divides phi(n)");
}

}  // namespace codec_detail

inline std::string encode(const KeyValue& value) {
    using namespace codec_detail;
    std::ostringstream out;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RsaPublicKey>) {
                out << "scheme = rsa\nkind = public\n";
                emit(out, "n", v.n);
                emit(out, "e", v.e);
            } else if constexpr (std::is_same_v<T, RsaKeyPair>) {
                out << "scheme = rsa\nkind = private\n";
                emit(out, "n", v.n);
                emit(out, "e", v.e);
                emit(out, "d", v.d);
                emit(out, "p", v.p);
                emit(out, "q", v.q);
            } else if constexpr (std::is_same_v<T, RabinPublicKey>) {
                out << "scheme = rabin\nkind = public\n";
                emit(out, "n", v.n);
            } else if constexpr (std::is_same_v<T, RabinKeyPair>) {
                out << "scheme = rabin\nkind = private\n";
                emit(out, "n", v.n);
                emit(out, "p", v.p);
                emit(out, "q", v.q);
            } else if constexpr (std::is_same_v<T, RsaPlusPublicKey>) {
                out << "scheme = rsaplus\nkind = public\n";
                emit(out, "n", v.n);
                emit(out, "ell1", v.ell1);
            } else if constexpr (std::is_same_v<T, RsaPlusPrivateKey>) {
                out << "scheme = rsaplus\nkind = private\n";
                emit(out, "n", v.n());
                emit(out, "ell1", v.ell1);
                emit(out, "p", v.p);
                emit(out, "q", v.q);
            } else if constexpr (std::is_same_v<T, CiphertextFile>) {
                out << "scheme = " << scheme_name(v.scheme) << "\nkind = ciphertext\n";
                emit(out, "c", v.c);
                if (v.scheme == Scheme::rsaplus) {
                    if (!v.y) throw ParseError("rsaplus ciphertext requires y");
                    emit(out, "y", *v.y);
                } else if (v.y) {
                    throw ParseError("y only valid for rsaplus ciphertexts");
                }
            }
        },
        value);
    return out.str();
}

inline KeyValue decode(const std::string& text) {
    using namespace codec_detail;
    ParsedDoc doc = parse_lines(text);
    Scheme scheme = parse_scheme(doc.scheme);

    if (doc.kind == "ciphertext") {
        CiphertextFile ct;
        ct.scheme = scheme;
        ct.c = doc.take("c");
        if (scheme == Scheme::rsaplus) ct.y = doc.take("y");
        doc.reject_leftovers();
        return ct;
    }

    if (doc.kind == "public") {
        BigInt n = doc.take("n");
        check_modulus(n);
        if (scheme == Scheme::rsa) {
            RsaPublicKey k{n, doc.take("e")};
            doc.reject_leftovers();
            if (k.e < 3 || mpz_even_p(k.e.get_mpz_t()))
                throw ParseError("invalid key: e must be odd and >= 3");
            return k;
        }
        if (scheme == Scheme::rabin) {
            doc.reject_leftovers();
            return RabinPublicKey{n};
        }
        RsaPlusPublicKey k{n, doc.take("ell1")};
        doc.reject_leftovers();
        check_ell1(k.ell1, nullptr);
        return k;
    }

    if (doc.kind == "private") {
        BigInt n = doc.take("n");
        check_modulus(n);
        if (scheme == Scheme::rsa) {
            RsaKeyPair k{n, doc.take("e"), doc.take("d"), doc.take("p"), doc.take("q")};
            doc.reject_leftovers();
            if (k.p * k.q != n) throw ParseError("invalid key: p*q != n");
            BigInt phi = (k.p - 1) * (k.q - 1);
            if ((k.e * k.d) % phi != 1) throw ParseError("invalid key: e*d != 1 mod phi");
            return k;
        }
        if (scheme == Scheme::rabin) {
            RabinKeyPair k{n, doc.take("p"), doc.take("q")};
            doc.reject_leftovers();
            check_key_primes(n, k.p, k.q);
            return k;
        }
        BigInt ell1 = doc.take("ell1");
        BigInt p = doc.take("p");
        BigInt q = doc.take("q");
        doc.reject_leftovers();
        check_key_primes(n, p, q);
        RsaPlusPrivateKey priv = make_rsaplus_private(p, q, ell1);
        check_ell1(ell1, &priv.phi);
        return priv;
    }

    throw ParseError("unknown kind '" + doc.kind + "'");
}

}  // namespace rsaplus::keys
