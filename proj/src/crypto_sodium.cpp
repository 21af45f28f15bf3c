#include "coutile/crypto.hpp"

#include <sodium.h>

#include <cstring>

namespace coutile::crypto {

namespace {

constexpr std::size_t kBoxNonce = crypto_box_NONCEBYTES;
constexpr std::size_t kCurveKey = crypto_box_PUBLICKEYBYTES;

class SodiumSuite final : public CipherSuite {
public:
    explicit SodiumSuite(std::size_t max_plaintext) : CipherSuite(max_plaintext)
    {
        if (sodium_init() < 0)
            throw std::runtime_error("libsodium failed to initialise");
    }

    std::string_view name() const override { return "sodium"; }

    KeyPair generate_keypair(ByteView seed) const override
    {
        auto s = sha256(seed);
        KeyPair kp;
        kp.public_key.resize(crypto_sign_PUBLICKEYBYTES);
        kp.secret_key.resize(crypto_sign_SECRETKEYBYTES);
        crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), s.data());
        return kp;
    }

    // Sealed box with the ephemeral key derived from `randomness`, so the
    // caller controls replay. Layout: ephemeral_pk || box(padded).
    Ciphertext pke_encrypt(ByteView public_key, ByteView plaintext,
                           ByteView randomness) const override
    {
        if (plaintext.size() > max_plaintext())
            throw PlaintextTooLarge("plaintext exceeds the fixed encryption block");
        if (public_key.size() != crypto_sign_PUBLICKEYBYTES)
            throw std::invalid_argument("malformed public key");

        std::array<std::uint8_t, kCurveKey> rpk{};
        if (crypto_sign_ed25519_pk_to_curve25519(rpk.data(), public_key.data()) != 0)
            throw std::invalid_argument("public key is not a valid curve point");

        auto eseed = sha256(randomness);
        std::array<std::uint8_t, kCurveKey> epk{};
        std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> esk{};
        crypto_box_seed_keypair(epk.data(), esk.data(), eseed.data());
        auto nonce = box_nonce(epk, rpk);

        auto block = pad(plaintext);
        Bytes out(kCurveKey + block.size() + crypto_box_MACBYTES);
        std::memcpy(out.data(), epk.data(), kCurveKey);
        const int rc = crypto_box_easy(out.data() + kCurveKey, block.data(), block.size(),
                                       nonce.data(), rpk.data(), esk.data());
        sodium_memzero(esk.data(), esk.size());
        if (rc != 0)
            throw std::invalid_argument("public key rejected");
        return Ciphertext{std::move(out)};
    }

    std::optional<Bytes> pke_decrypt(ByteView secret_key, const Ciphertext& c) const override
    {
        if (c.payload.size() != ciphertext_size() ||
            secret_key.size() != crypto_sign_SECRETKEYBYTES)
            return std::nullopt;
        std::array<std::uint8_t, kCurveKey> rsk{};
        std::array<std::uint8_t, kCurveKey> rpk{};
        if (crypto_sign_ed25519_sk_to_curve25519(rsk.data(), secret_key.data()) != 0)
            return std::nullopt;
        // Ed25519 secret keys carry the public key in their upper half.
        if (crypto_sign_ed25519_pk_to_curve25519(rpk.data(), secret_key.data() + 32) != 0)
            return std::nullopt;

        std::array<std::uint8_t, kCurveKey> epk{};
        std::memcpy(epk.data(), c.payload.data(), kCurveKey);
        auto nonce = box_nonce(epk, rpk);
        Bytes block(padded_size());
        const int rc = crypto_box_open_easy(block.data(), c.payload.data() + kCurveKey,
                                            c.payload.size() - kCurveKey, nonce.data(),
                                            epk.data(), rsk.data());
        sodium_memzero(rsk.data(), rsk.size());
        if (rc != 0)
            return std::nullopt;
        return unpad(block);
    }

    Bytes sym_encrypt(const SymKey& k, ByteView plaintext) const override
    {
        check_sym(k);
        std::array<std::uint8_t, crypto_secretbox_NONCEBYTES> nonce{};
        crypto_generichash(nonce.data(), nonce.size(), plaintext.data(), plaintext.size(),
                           k.key.data(), k.key.size());
        Bytes out(nonce.size() + plaintext.size() + crypto_secretbox_MACBYTES);
        std::memcpy(out.data(), nonce.data(), nonce.size());
        crypto_secretbox_easy(out.data() + nonce.size(), plaintext.data(), plaintext.size(),
                              nonce.data(), k.key.data());
        return out;
    }

    std::optional<Bytes> sym_decrypt(const SymKey& k, ByteView c) const override
    {
        check_sym(k);
        constexpr auto overhead = crypto_secretbox_NONCEBYTES + crypto_secretbox_MACBYTES;
        if (c.size() < overhead)
            return std::nullopt;
        Bytes out(c.size() - overhead);
        if (crypto_secretbox_open_easy(out.data(), c.data() + crypto_secretbox_NONCEBYTES,
                                       c.size() - crypto_secretbox_NONCEBYTES, c.data(),
                                       k.key.data()) != 0)
            return std::nullopt;
        return out;
    }

    Bytes sign_bytes(ByteView secret_key, ByteView message) const override
    {
        if (secret_key.size() != crypto_sign_SECRETKEYBYTES)
            throw std::invalid_argument("malformed signing key");
        Bytes sig(crypto_sign_BYTES);
        crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                             secret_key.data());
        return sig;
    }

    bool verify_bytes(ByteView public_key, ByteView message, ByteView sig) const override
    {
        if (public_key.size() != crypto_sign_PUBLICKEYBYTES || sig.size() != crypto_sign_BYTES)
            return false;
        return crypto_sign_verify_detached(sig.data(), message.data(), message.size(),
                                           public_key.data()) == 0;
    }

    std::size_t ciphertext_size() const override
    {
        return kCurveKey + padded_size() + crypto_box_MACBYTES;
    }

private:
    static std::array<std::uint8_t, kBoxNonce> box_nonce(const std::array<std::uint8_t, kCurveKey>& epk,
                                                          const std::array<std::uint8_t, kCurveKey>& rpk)
    {
        std::array<std::uint8_t, kBoxNonce> nonce{};
        crypto_generichash_state st;
        crypto_generichash_init(&st, nullptr, 0, nonce.size());
        crypto_generichash_update(&st, epk.data(), epk.size());
        crypto_generichash_update(&st, rpk.data(), rpk.size());
        crypto_generichash_final(&st, nonce.data(), nonce.size());
        return nonce;
    }

    static void check_sym(const SymKey& k)
    {
        if (k.key.size() != crypto_secretbox_KEYBYTES)
            throw std::invalid_argument("symmetric key must be 32 bytes");
    }
};

} // namespace

std::unique_ptr<CipherSuite> make_sodium_suite(std::size_t max_plaintext)
{
    return std::make_unique<SodiumSuite>(max_plaintext);
}

} // namespace coutile::crypto
