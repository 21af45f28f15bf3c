#include "coutile/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace coutile::crypto {

namespace {

void ensure_sodium()
{
    static const int status = sodium_init();
    if (status < 0)
        throw std::runtime_error("libsodium failed to initialise");
}

using Mac = std::array<std::uint8_t, 32>;

// Keyed BLAKE2b; key is hashed down when longer than the primitive allows.
Mac keyed_hash(ByteView key, ByteView a, ByteView b = {})
{
    crypto_generichash_blake2b_state st;
    crypto_generichash_blake2b_init(&st, key.data(), std::min<std::size_t>(key.size(), crypto_generichash_blake2b_KEYBYTES_MAX), 32);
    crypto_generichash_blake2b_update(&st, a.data(), a.size());
    if (!b.empty())
        crypto_generichash_blake2b_update(&st, b.data(), b.size());
    Mac out;
    crypto_generichash_blake2b_final(&st, out.data(), out.size());
    return out;
}

constexpr std::size_t kNonce = crypto_stream_xchacha20_NONCEBYTES;
constexpr std::size_t kTag = 32;

const Bytes kPkLabel = bytes_of("coutile.sim.pk");
const Bytes kKeysLabel = bytes_of("coutile.sim.keys");
const Bytes kSigLabel = bytes_of("coutile.sim.sig");
const Bytes kSivLabel = bytes_of("coutile.sim.siv");

struct SubKeys {
    std::array<std::uint8_t, 64> bytes;
    ByteView enc() const { return ByteView(bytes).first(32); }
    ByteView mac() const { return ByteView(bytes).last(32); }
};

SubKeys derive(ByteView key)
{
    SubKeys k;
    crypto_generichash_blake2b(k.bytes.data(), k.bytes.size(), kKeysLabel.data(), kKeysLabel.size(),
                               key.data(), std::min<std::size_t>(key.size(), crypto_generichash_blake2b_KEYBYTES_MAX));
    return k;
}

// nonce || body ^ keystream(enc_key, nonce) || MAC(mac_key, nonce || body)
Bytes seal(const SubKeys& keys, const std::uint8_t* nonce, ByteView body)
{
    Bytes out(kNonce + body.size() + kTag);
    std::memcpy(out.data(), nonce, kNonce);
    crypto_stream_xchacha20_xor(out.data() + kNonce, body.data(), body.size(), nonce,
                                keys.enc().data());
    auto tag = keyed_hash(keys.mac(), ByteView(out).first(kNonce + body.size()));
    std::memcpy(out.data() + kNonce + body.size(), tag.data(), kTag);
    return out;
}

std::optional<Bytes> open(const SubKeys& keys, ByteView c)
{
    if (c.size() < kNonce + kTag)
        return std::nullopt;
    const auto body_len = c.size() - kNonce - kTag;
    auto tag = keyed_hash(keys.mac(), c.first(kNonce + body_len));
    if (crypto_verify_32(tag.data(), c.data() + kNonce + body_len) != 0)
        return std::nullopt;
    Bytes body(body_len);
    crypto_stream_xchacha20_xor(body.data(), c.data() + kNonce, body_len, c.data(),
                                keys.enc().data());
    return body;
}

class SimulationSuite final : public CipherSuite {
public:
    explicit SimulationSuite(std::size_t max_plaintext) : CipherSuite(max_plaintext)
    {
        ensure_sodium();
    }

    std::string_view name() const override { return "sim"; }

    KeyPair generate_keypair(ByteView seed) const override
    {
        auto sk = sha256(seed);
        KeyPair kp;
        kp.secret_key.assign(sk.begin(), sk.end());
        kp.public_key = public_of(kp.secret_key);
        return kp;
    }

    Ciphertext pke_encrypt(ByteView public_key, ByteView plaintext,
                           ByteView randomness) const override
    {
        if (plaintext.size() > max_plaintext())
            throw PlaintextTooLarge("plaintext exceeds the fixed encryption block");
        auto nonce = keyed_hash(public_key, randomness);
        return Ciphertext{seal(derive(public_key), nonce.data(), pad(plaintext))};
    }

    std::optional<Bytes> pke_decrypt(ByteView secret_key, const Ciphertext& c) const override
    {
        if (c.payload.size() != ciphertext_size() || secret_key.size() != 32)
            return std::nullopt;
        auto block = open(derive(public_of(secret_key)), c.payload);
        if (!block)
            return std::nullopt;
        return unpad(*block);
    }

    Bytes sym_encrypt(const SymKey& k, ByteView plaintext) const override
    {
        // Synthetic nonce: deterministic, distinct for distinct plaintexts.
        auto nonce = keyed_hash(k.key, kSivLabel, plaintext);
        return seal(derive(k.key), nonce.data(), plaintext);
    }

    std::optional<Bytes> sym_decrypt(const SymKey& k, ByteView c) const override
    {
        return open(derive(k.key), c);
    }

    Bytes sign_bytes(ByteView secret_key, ByteView message) const override
    {
        auto key = keyed_hash(public_of(secret_key), kSigLabel);
        auto tag = keyed_hash(key, message);
        return Bytes(tag.begin(), tag.end());
    }

    bool verify_bytes(ByteView public_key, ByteView message, ByteView sig) const override
    {
        if (sig.size() != kTag)
            return false;
        auto key = keyed_hash(public_key, kSigLabel);
        auto tag = keyed_hash(key, message);
        return crypto_verify_32(tag.data(), sig.data()) == 0;
    }

    std::size_t ciphertext_size() const override { return kNonce + padded_size() + kTag; }

private:
    static Bytes public_of(ByteView secret_key)
    {
        auto d = sha256(kPkLabel, secret_key);
        return Bytes(d.begin(), d.end());
    }
};

} // namespace

Digest sha256(ByteView data)
{
    ensure_sodium();
    Digest out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

Digest sha256(ByteView a, ByteView b)
{
    ensure_sodium();
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, a.data(), a.size());
    crypto_hash_sha256_update(&st, b.data(), b.size());
    Digest out;
    crypto_hash_sha256_final(&st, out.data());
    return out;
}

SymKey CipherSuite::generate_sym_key(ByteView seed) const
{
    auto d = sha256(bytes_of("coutile.symkey"), seed);
    return SymKey{Bytes(d.begin(), d.end())};
}

Bytes CipherSuite::pad(ByteView plaintext) const
{
    Bytes block(padded_size(), 0);
    block[0] = static_cast<std::uint8_t>(plaintext.size() >> 8);
    block[1] = static_cast<std::uint8_t>(plaintext.size());
    std::memcpy(block.data() + 2, plaintext.data(), plaintext.size());
    return block;
}

std::optional<Bytes> CipherSuite::unpad(ByteView block) const
{
    if (block.size() != padded_size())
        return std::nullopt;
    std::size_t len = (std::size_t{block[0]} << 8) | block[1];
    if (len > max_plaintext())
        return std::nullopt;
    return Bytes(block.begin() + 2, block.begin() + 2 + static_cast<std::ptrdiff_t>(len));
}

std::unique_ptr<CipherSuite> make_simulation_suite(std::size_t max_plaintext)
{
    return std::make_unique<SimulationSuite>(max_plaintext);
}

std::unique_ptr<CipherSuite> make_suite(std::string_view name, std::size_t max_plaintext)
{
    if (name == "sim")
        return make_simulation_suite(max_plaintext);
    if (name == "sodium")
        return make_sodium_suite(max_plaintext);
    throw std::invalid_argument("unknown crypto backend: " + std::string(name));
}

} // namespace coutile::crypto
