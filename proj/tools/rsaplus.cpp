// rsaplus: key management, encryption/decryption, security-reduction demos
// and benchmarks for the RSA, Rabin and RSA+ schemes.

#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsaplus/analysis.hpp"
#include "rsaplus/bench.hpp"
#include "rsaplus/bigint.hpp"
#include "rsaplus/keys.hpp"
#include "rsaplus/modarith.hpp"
#include "rsaplus/schemes.hpp"

namespace {

using namespace rsaplus;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out << content;
}

BigInt parse_message(std::string text) {
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' '))
        text.pop_back();
    if (text.empty()) throw DomainError("empty message");
    BigInt m;
    int rc;
    if (text.rfind("0x", 0) == 0)
        rc = m.set_str(text.substr(2), 16);
    else
        rc = m.set_str(text, 10);
    if (rc != 0) throw DomainError("message must be a decimal or 0x-hex integer");
    return m;
}

std::uint64_t seed_or_random(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

keys::Scheme parse_scheme_flag(const std::string& s) {
    if (s == "rsa") return keys::Scheme::rsa;
    if (s == "rabin") return keys::Scheme::rabin;
    if (s == "rsaplus") return keys::Scheme::rsaplus;
    throw CLI::ValidationError("--scheme", "must be rsa, rabin or rsaplus");
}

schemes::ExponentProfile profile_for(const std::string& name) {
    return name == "toy" ? schemes::ExponentProfile::toy() : schemes::ExponentProfile::production();
}

struct CommonOpts {
    std::optional<std::uint64_t> seed;
    std::string profile = "production";
};

int cmd_keygen(const std::string& scheme_str, unsigned bits, const CommonOpts& common,
               const std::string& out_path) {
    Rng rng(seed_or_random(common.seed));
    primes::PrimalityConfig cfg;
    keys::Scheme scheme = parse_scheme_flag(scheme_str);
    std::string pub_text, priv_text;
    if (scheme == keys::Scheme::rsa) {
        auto key = keys::keygen_rsa(bits, cfg, rng);
        pub_text = keys::encode(key.public_key());
        priv_text = keys::encode(key);
    } else if (scheme == keys::Scheme::rabin) {
        auto key = keys::keygen_rabin(bits, cfg, rng);
        pub_text = keys::encode(key.public_key());
        priv_text = keys::encode(key);
    } else {
        auto [pub, priv] = keys::keygen_rsaplus(bits, cfg, rng);
        pub_text = keys::encode(pub);
        priv_text = keys::encode(priv);
    }
    write_file(out_path + ".pub", pub_text);
    write_file(out_path + ".priv", priv_text);
    std::cout << "wrote " << out_path << ".pub and " << out_path << ".priv\n";
    return 0;
}

int cmd_encrypt(const std::string& key_path, const std::string& in_path,
                const std::string& out_path, const std::string& mode_str,
                const CommonOpts& common) {
    Rng rng(seed_or_random(common.seed));
    primes::PrimalityConfig cfg;
    BigInt m = parse_message(read_file(in_path));
    keys::KeyValue key = keys::decode(read_file(key_path));

    keys::CiphertextFile ct;
    if (auto* rsa = std::get_if<keys::RsaPublicKey>(&key)) {
        ct = {keys::Scheme::rsa, schemes::rsa_encrypt(m, *rsa), std::nullopt};
    } else if (auto* rsa_pair = std::get_if<keys::RsaKeyPair>(&key)) {
        ct = {keys::Scheme::rsa, schemes::rsa_encrypt(m, rsa_pair->public_key()), std::nullopt};
    } else if (auto* rabin = std::get_if<keys::RabinPublicKey>(&key)) {
        ct = {keys::Scheme::rabin, schemes::rabin_encrypt(m, rabin->n), std::nullopt};
    } else if (auto* rabin_pair = std::get_if<keys::RabinKeyPair>(&key)) {
        ct = {keys::Scheme::rabin, schemes::rabin_encrypt(m, rabin_pair->n), std::nullopt};
    } else {
        keys::RsaPlusPublicKey pub;
        if (auto* p = std::get_if<keys::RsaPlusPublicKey>(&key))
            pub = *p;
        else if (auto* priv = std::get_if<keys::RsaPlusPrivateKey>(&key))
            pub = priv->public_key();
        else
            throw DomainError("encrypt: key file is not a key");
        schemes::ExponentMode mode = schemes::ExponentMode::fast;
        if (mode_str == "naive") mode = schemes::ExponentMode::naive;
        if (mode_str == "williams") mode = schemes::ExponentMode::williams;
        auto pair = schemes::rsaplus_encrypt(m, pub, mode, profile_for(common.profile), cfg, rng);
        ct = {keys::Scheme::rsaplus, pair.c, pair.y};
    }
    write_file(out_path, keys::encode(ct));
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_decrypt(const std::string& key_path, const std::string& in_path,
                const std::string& mode_str) {
    keys::KeyValue key = keys::decode(read_file(key_path));
    keys::KeyValue ct_value = keys::decode(read_file(in_path));
    auto* ct = std::get_if<keys::CiphertextFile>(&ct_value);
    if (!ct) throw DomainError("decrypt: --in is not a ciphertext file");

    std::vector<BigInt> candidates;
    if (auto* rsa = std::get_if<keys::RsaKeyPair>(&key)) {
        if (ct->scheme != keys::Scheme::rsa) throw DomainError("decrypt: scheme mismatch");
        candidates.push_back(schemes::rsa_decrypt(ct->c, *rsa));
    } else if (auto* rabin = std::get_if<keys::RabinKeyPair>(&key)) {
        if (ct->scheme != keys::Scheme::rabin) throw DomainError("decrypt: scheme mismatch");
        candidates = schemes::rabin_decrypt(ct->c, *rabin);
    } else if (auto* plus = std::get_if<keys::RsaPlusPrivateKey>(&key)) {
        if (ct->scheme != keys::Scheme::rsaplus || !ct->y)
            throw DomainError("decrypt: scheme mismatch");
        keys::RsaPlusCiphertext pair{ct->c, *ct->y};
        if (mode_str == "williams") {
            auto cand = schemes::rsaplus_decrypt_qr(pair, *plus);
            candidates.push_back(cand.m);
        } else {
            for (const auto& cand : schemes::rsaplus_decrypt(pair, *plus))
                candidates.push_back(cand.m);
        }
    } else {
        throw DomainError("decrypt: --key is not a private key");
    }
    for (std::size_t i = 0; i < candidates.size(); ++i)
        std::cout << "candidate " << (i + 1) << "/" << candidates.size() << ": "
                  << candidates[i].get_str() << "\n";
    return 0;
}

int cmd_bench(const std::vector<unsigned>& bits, unsigned key_count, unsigned msgs,
              const std::string& scheme_str, const std::string& format,
              const CommonOpts& common) {
    bench::BenchConfig cfg;
    cfg.keys = key_count;
    cfg.msgs_per_key = msgs;
    cfg.seed = seed_or_random(common.seed);
    cfg.profile = profile_for(common.profile);
    std::set<keys::Scheme> which;
    if (scheme_str.empty()) {
        which = {keys::Scheme::rsa, keys::Scheme::rabin, keys::Scheme::rsaplus};
    } else {
        which = {parse_scheme_flag(scheme_str)};
    }
    auto reports = bench::run_benchmark(bits, which, cfg);
    auto fmt = format == "csv" ? bench::ReportFormat::csv : bench::ReportFormat::table;
    std::cout << bench::emit_report(reports, fmt);
    for (const auto& r : reports) {
        if (r.ratio_rsaplus_rsa)
            std::cout << "# b=" << r.bit_length << " RSA+/RSA = " << *r.ratio_rsaplus_rsa << "\n";
        if (r.ratio_rsaplus_rabin)
            std::cout << "# b=" << r.bit_length << " RSA+/Rabin = " << *r.ratio_rsaplus_rabin
                      << "\n";
    }
    return 0;
}

int cmd_analyze_multiplicity(const std::string& key_path, std::uint64_t trials,
                             const CommonOpts& common) {
    auto key = keys::decode(read_file(key_path));
    auto* priv = std::get_if<keys::RsaPlusPrivateKey>(&key);
    if (!priv) throw DomainError("analyze multiplicity: --key must be an rsaplus private key");
    Rng rng(seed_or_random(common.seed));
    primes::PrimalityConfig cfg;
    auto report = analysis::measure_decryption_multiplicity(*priv, trials, cfg, rng);
    std::cout << analysis::multiplicity_report_json(report) << "\n";
    std::cout << analysis::multiplicity_report_table(report);
    return 0;
}

int cmd_analyze_jacobi(const std::string& key_path, std::uint64_t trials,
                       const CommonOpts& common) {
    auto key = keys::decode(read_file(key_path));
    keys::RsaPlusPublicKey pub;
    if (auto* p = std::get_if<keys::RsaPlusPublicKey>(&key))
        pub = *p;
    else if (auto* priv = std::get_if<keys::RsaPlusPrivateKey>(&key))
        pub = priv->public_key();
    else
        throw DomainError("analyze jacobi: --key must be an rsaplus key");
    Rng rng(seed_or_random(common.seed));
    primes::PrimalityConfig cfg;
    std::uint64_t agree = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        BigInt m, g;
        do {
            m = rng.in_range(BigInt(1), pub.n - 1);
            mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), pub.n.get_mpz_t());
        } while (g != 1);
        auto ct = schemes::rsaplus_encrypt(m, pub, schemes::ExponentMode::naive,
                                           profile_for(common.profile), cfg, rng);
        if (analysis::jacobi_leak_check(m, ct, pub.n)) ++agree;
    }
    std::cout << "trials = " << trials << "\n"
              << "jacobi(m,n) == jacobi(c,n) in " << agree << " of " << trials << " encryptions\n";
    return agree == trials ? 0 : 1;
}

int cmd_analyze_reductions(std::uint64_t trials, const CommonOpts& common) {
    Rng rng(seed_or_random(common.seed));
    primes::PrimalityConfig cfg;

    // 1. Rabin-style factoring from two essentially different roots.
    std::uint64_t two_roots_ok = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto [pub, priv] = keys::keygen_rsaplus(4, cfg, rng);
        BigInt m = 2 + rng.below(pub.n - 3);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), pub.n.get_mpz_t());
        if (g != 1) {
            --t;
            continue;
        }
        auto roots = modarith::sqrt_mod_n((m * m) % pub.n, priv.p, priv.q);
        auto [p, q] = analysis::factor_from_two_roots(roots.roots[0], roots.roots[1], pub.n);
        if (p == std::min(priv.p, priv.q) && q == std::max(priv.p, priv.q)) ++two_roots_ok;
    }
    std::cout << "factor_from_two_roots: " << two_roots_ok << "/" << trials << " toy keys factored\n";

    // 2. Universal-exponent factoring from y and its inverse mod phi(n).
    std::uint64_t exponent_ok = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto [pub, priv] = keys::keygen_rsaplus(4, cfg, rng);
        auto sample = schemes::sample_exponent_naive(pub.n, cfg, rng);
        BigInt y = sample.x % priv.phi;
        auto inv = modarith::mod_inv(y, priv.phi);
        if (!inv.ok) {
            --t;
            continue;
        }
        try {
            auto [p, q] = analysis::factor_from_exponent_multiple(y, inv.value, pub.n, {}, rng);
            if (p * q == pub.n) ++exponent_ok;
        } catch (const DomainError&) {
        }
    }
    std::cout << "factor_from_exponent_multiple: " << exponent_ok << "/" << trials
              << " toy keys factored\n";

    // 3. Breaking RSA with an RSA+ decryption oracle.
    std::uint64_t oracle_ok = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        auto key = keys::keygen_rsa(10, cfg, rng);
        auto priv = keys::make_rsaplus_private(key.p, key.q, 5);
        analysis::OracleHandle oracle = [&priv](const BigInt& c, const BigInt& y) {
            std::vector<BigInt> out;
            for (const auto& cand : schemes::rsaplus_decrypt({c, y}, priv)) out.push_back(cand.m);
            return out;
        };
        BigInt m = 2 + rng.below(key.n - 3);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), key.n.get_mpz_t());
        if (g != 1) {
            --t;
            continue;
        }
        BigInt c = schemes::rsa_encrypt(m, key.public_key());
        if (analysis::rsa_break_via_rsaplus_oracle(c, key.e, key.n, oracle) == m) ++oracle_ok;
    }
    std::cout << "rsa_break_via_rsaplus_oracle: " << oracle_ok << "/" << trials
              << " messages recovered\n";
    return (two_roots_ok == trials && oracle_ok == trials) ? 0 : 1;
}

int cmd_selftest() {
    Rng rng(42);
    primes::PrimalityConfig cfg;
    // sqrt oracle over small primes
    for (unsigned p : {7u, 11u, 13u, 19u, 23u, 29u, 37u}) {
        for (unsigned y = 1; y < p; ++y) {
            if (modarith::jacobi(y, p) != 1) continue;
            auto roots = modarith::sqrt_mod_p_general(y, p);
            for (const BigInt& r : roots.roots)
                if ((r * r) % p != y) throw DomainError("selftest: sqrt failure");
        }
    }
    // round trips at b = 16
    for (int i = 0; i < 10; ++i) {
        auto [pub, priv] = keys::keygen_rsaplus(16, cfg, rng);
        BigInt m = 2 + rng.below(pub.n - 3);
        BigInt g;
        mpz_gcd(g.get_mpz_t(), m.get_mpz_t(), pub.n.get_mpz_t());
        if (g != 1) continue;
        auto sample = schemes::sample_exponent(pub, schemes::ExponentMode::fast,
                                               schemes::ExponentProfile::toy(), cfg, rng);
        mpz_gcd(g.get_mpz_t(), sample.x.get_mpz_t(), priv.phi.get_mpz_t());
        if (g != 1) continue;  // toy-scale exponent collided with a factor of phi(n)
        auto ct = schemes::rsaplus_encrypt_with(m, pub.n, sample.x);
        auto cands = schemes::rsaplus_decrypt(ct, priv);
        bool found = false;
        for (const auto& cand : cands) found = found || cand.m == m;
        if (!found) throw DomainError("selftest: rsaplus round trip failed");
    }
    std::cout << "selftest ok\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RSA / Rabin / RSA+ toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    std::string scheme, mode = "fast", key_path, in_path, out_path, format = "table";
    unsigned bits = 64;
    std::vector<unsigned> bench_bits;
    unsigned key_count = 20, msgs = 10;
    std::uint64_t trials = 1000;

    auto add_common = [&common](CLI::App* cmd) {
        cmd->add_option("--seed", common.seed, "deterministic RNG seed");
        cmd->add_option("--profile", common.profile, "exponent profile")
            ->check(CLI::IsMember({"production", "toy"}));
    };

    auto* keygen = app.add_subcommand("keygen", "generate a key pair");
    keygen->add_option("--scheme", scheme)->required()->check(CLI::IsMember({"rsa", "rabin", "rsaplus"}));
    keygen->add_option("--bits", bits, "bit length b of p");
    keygen->add_option("--out", out_path, "output path stem")->required();
    add_common(keygen);

    auto* encrypt = app.add_subcommand("encrypt", "encrypt an integer message");
    encrypt->add_option("--key", key_path)->required();
    encrypt->add_option("--in", in_path, "message file (decimal or 0x-hex)")->required();
    encrypt->add_option("--out", out_path)->required();
    encrypt->add_option("--mode", mode)->check(CLI::IsMember({"naive", "fast", "williams"}));
    add_common(encrypt);

    auto* decrypt = app.add_subcommand("decrypt", "decrypt a ciphertext, printing all candidates");
    decrypt->add_option("--key", key_path)->required();
    decrypt->add_option("--in", in_path)->required();
    decrypt->add_option("--mode", mode)->check(CLI::IsMember({"naive", "fast", "williams"}));
    add_common(decrypt);

    auto* bench_cmd = app.add_subcommand("bench", "runtime comparison of the three schemes");
    bench_cmd->add_option("--bits", bench_bits, "bit lengths")->required();
    bench_cmd->add_option("--keys", key_count);
    bench_cmd->add_option("--msgs", msgs);
    bench_cmd->add_option("--scheme", scheme)->check(CLI::IsMember({"rsa", "rabin", "rsaplus"}));
    bench_cmd->add_option("--format", format)->check(CLI::IsMember({"table", "csv"}));
    add_common(bench_cmd);

    auto* analyze = app.add_subcommand("analyze", "security and statistics demos");
    analyze->require_subcommand(1);
    auto* mult = analyze->add_subcommand("multiplicity", "decryption-multiplicity statistics");
    mult->add_option("--key", key_path)->required();
    mult->add_option("--trials", trials);
    add_common(mult);
    auto* jac = analyze->add_subcommand("jacobi", "Jacobi-symbol leak check");
    jac->add_option("--key", key_path)->required();
    jac->add_option("--trials", trials);
    add_common(jac);
    auto* red = analyze->add_subcommand("reductions", "factoring-reduction demonstrations");
    red->add_option("--trials", trials);
    add_common(red);

    auto* selftest = app.add_subcommand("selftest", "quick internal consistency checks");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage errors exit 2; --help exits 0
    }

    try {
        if (keygen->parsed()) return cmd_keygen(scheme, bits, common, out_path);
        if (encrypt->parsed()) return cmd_encrypt(key_path, in_path, out_path, mode, common);
        if (decrypt->parsed()) return cmd_decrypt(key_path, in_path, mode);
        if (bench_cmd->parsed())
            return cmd_bench(bench_bits, key_count, msgs, scheme, format, common);
        if (analyze->parsed()) {
            if (mult->parsed()) return cmd_analyze_multiplicity(key_path, trials, common);
            if (jac->parsed()) return cmd_analyze_jacobi(key_path, trials, common);
            if (red->parsed()) return cmd_analyze_reductions(trials, common);
        }
        if (selftest->parsed()) return cmd_selftest();
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
