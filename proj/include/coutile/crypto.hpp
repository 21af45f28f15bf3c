#pragma once

#include "coutile/bytes.hpp"
#include "coutile/identity.hpp"

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace coutile::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(ByteView data);
Digest sha256(ByteView a, ByteView b);

struct KeyPair {
    Bytes public_key;
    Bytes secret_key;
};

/// Every ciphertext produced by one suite has the same length, whatever the
/// plaintext length.
struct Ciphertext {
    Bytes payload;

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

struct Signature {
    Pseudonym signer;
    Bytes sig;
};

struct SymKey {
    Bytes key;
};

class PlaintextTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Cryptographic contracts the protocols rely on. Decryption and verification
/// never throw on bad input; they report failure instead.
class CipherSuite {
public:
    explicit CipherSuite(std::size_t max_plaintext) : max_plaintext_(max_plaintext) {}
    virtual ~CipherSuite() = default;

    virtual std::string_view name() const = 0;

    // Deterministic in `seed` so that whole simulations replay from one seed.
    virtual KeyPair generate_keypair(ByteView seed) const = 0;
    virtual SymKey generate_sym_key(ByteView seed) const;

    /// Probabilistic public-key encryption. Plaintexts are padded to
    /// max_plaintext() so that ciphertext_size() is constant.
    virtual Ciphertext pke_encrypt(ByteView public_key, ByteView plaintext,
                                   ByteView randomness) const = 0;
    virtual std::optional<Bytes> pke_decrypt(ByteView secret_key,
                                             const Ciphertext& c) const = 0;

    // Authenticated symmetric encryption.
    virtual Bytes sym_encrypt(const SymKey& k, ByteView plaintext) const = 0;
    virtual std::optional<Bytes> sym_decrypt(const SymKey& k, ByteView c) const = 0;

    virtual Bytes sign_bytes(ByteView secret_key, ByteView message) const = 0;
    virtual bool verify_bytes(ByteView public_key, ByteView message,
                              ByteView sig) const = 0;

    Signature sign(const Pseudonym& signer, ByteView secret_key, ByteView message) const
    {
        return Signature{signer, sign_bytes(secret_key, message)};
    }
    bool verify(ByteView public_key, ByteView message, const Signature& s) const
    {
        return verify_bytes(public_key, message, s.sig);
    }

    std::size_t max_plaintext() const { return max_plaintext_; }
    virtual std::size_t ciphertext_size() const = 0;

protected:
    // u16 length prefix, payload, zero fill up to max_plaintext.
    Bytes pad(ByteView plaintext) const;
    std::optional<Bytes> unpad(ByteView block) const;
    std::size_t padded_size() const { return max_plaintext_ + 2; }

private:
    std::size_t max_plaintext_;
};

inline constexpr std::size_t kDefaultPlaintextBlock = 256;

/// Keyed-digest construction (keyed BLAKE2b + XChaCha20 keystream) that honours
/// every contract above and is cheap enough for 10^6-message simulations.
/// Simulation grade: the public key is enough to decrypt and to sign, so it
/// offers no secrecy against a peer that deviates from the protocol.
std::unique_ptr<CipherSuite> make_simulation_suite(std::size_t max_plaintext = kDefaultPlaintextBlock);

/// libsodium backend: Ed25519 signatures, X25519 sealed boxes with
/// caller-supplied ephemeral randomness, XSalsa20-Poly1305 secretbox.
std::unique_ptr<CipherSuite> make_sodium_suite(std::size_t max_plaintext = kDefaultPlaintextBlock);

std::unique_ptr<CipherSuite> make_suite(std::string_view name,
                                        std::size_t max_plaintext = kDefaultPlaintextBlock);

} // namespace coutile::crypto
