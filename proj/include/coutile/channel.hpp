#pragma once

#include "coutile/accountability.hpp"
#include "coutile/computations.hpp"
#include "coutile/crypto.hpp"
#include "coutile/identity.hpp"
#include "coutile/types.hpp"

#include <array>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coutile {

/// Stands in for the ciphertext bytes every carrier sees: two carriers
/// holding the same id hold the same (msg, Ecomp) pair.
using MessageId = std::uint64_t;
using Nonce = std::array<std::uint8_t, 16>;

/// The envelope that hops between peers. There is deliberately no
/// originator field: a carrier learns only who handed it the message.
struct ChannelMessage {
    MessageId id = 0;
    crypto::Ciphertext msg;   // PK_d(I || nonce) or PK_d(K)
    crypto::Ciphertext ecomp; // PK_d(nil), PK_d(C_i) or PK_d("refuse")
    PeerIndex dest = 0;
    PeerIndex carrier = 0;
};

/// Simulator-private record of a message's route, originator first. Used to
/// audit anonymity and to measure hop statistics; never handed to peer logic.
struct HopPath {
    std::vector<PeerIndex> peers;

    PeerIndex originator() const { return peers.front(); }
};

/// Public directory every peer can read: pseudonyms and their public keys.
struct PublicDirectory {
    std::vector<Pseudonym> pseudonyms;
    std::vector<Bytes> public_keys;

    std::size_t size() const { return pseudonyms.size(); }
};

// ---------------------------------------------------------------------------
// Payload plaintexts

Bytes encode_input_payload(const InputValue& value, const Nonce& nonce);
std::optional<std::pair<InputValue, Nonce>> decode_input_payload(ByteView data);

enum class CompTag : std::uint8_t { Nil = 0, Refuse = 1, Spec = 2 };

Bytes encode_nil_comp();
Bytes encode_refuse_comp();
Bytes encode_comp(const ComputationSpec& spec);

struct DecodedComp {
    CompTag tag = CompTag::Nil;
    std::optional<ComputationSpec> spec;
};
std::optional<DecodedComp> decode_comp(ByteView data);

// ---------------------------------------------------------------------------
// Worker-side input list

/// The worker's Ilist. Holds at most `capacity` inputs with pairwise distinct
/// nonces; resending a known nonce is a no-op.
class InputBuffer {
public:
    explicit InputBuffer(std::size_t capacity = 0) : capacity_(capacity) {}

    /// False when the nonce is a duplicate or the buffer is already full.
    bool add(const InputValue& value, const Nonce& nonce);

    std::size_t size() const { return values_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool full() const { return values_.size() >= capacity_; }
    JointInput snapshot() const { return JointInput{values_}; }
    void clear();

private:
    struct NonceHash {
        std::size_t operator()(const Nonce& n) const noexcept;
    };

    std::size_t capacity_;
    std::vector<InputValue> values_;
    std::unordered_set<Nonce, NonceHash> nonces_;
};

// ---------------------------------------------------------------------------
// Forwarding decisions (pure; they see only what the holder sees)

enum class ForwardKind { Hop, Submit };

struct ForwardAction {
    ForwardKind kind;
    PeerIndex target;
};

/// Honest-but-curious hop: the originator always hops, anyone else hops with
/// probability p. Hop targets are uniform over peers other than the holder
/// and the destination (handing the message to the destination is a submission).
ForwardAction hbc_fwd_step(PeerIndex holder, PeerIndex dest, bool is_originator, double p,
                           std::size_t peers, Rng& rng);

/// Rational choice of the next forwardee.
///  * g_s >= g_d - delta: uniform over peers with reputation in
///    [g_d - delta, g_s + delta], none of whom will be refused by the worker.
///  * otherwise: the peer of highest reputation not above g_s + delta (lowest
///    roster index on ties), the best peer that will not discard.
/// The holder and the destination are never candidates. nullopt when no
/// candidate exists.
std::optional<PeerIndex> select_forwardee(PeerIndex holder, PeerIndex dest, double g_s,
                                          double g_d, double delta,
                                          std::span<const double> reputations, Rng& rng);

/// A forwardee deals with a sender whose reputation is at least its own minus delta.
bool accepts_from(double sender_rep, double receiver_rep, double delta);

/// A worker refuses a computation submitted by a peer below its own reputation minus delta.
bool refuses_computation(double submitter_rep, double worker_rep, double delta);

enum class CoutileForwardKind { HopTo, SubmitTo, Discard, NoForwardee };

struct CoutileForwardAction {
    CoutileForwardKind kind;
    PeerIndex target; // forwardee for HopTo/Discard, destination for SubmitTo
};

/// One step of the co-utile forward channel: hop decision (originator: always),
/// Select, and the chosen forwardee's accept/discard decision. An originator
/// whose Select band is empty takes the highest peer not above g_s + delta;
/// NoForwardee only when even that does not exist.
CoutileForwardAction c_fwd_step(PeerIndex holder, PeerIndex dest, bool is_originator, double p,
                                double delta, std::span<const double> reputations, Rng& rng);

// ---------------------------------------------------------------------------
// Worker state machine

/// What a worker hands back into the reverse channel after a computation
/// (or refusal, or deadline expiry).
struct WorkerEmission {
    MessageId message = 0;
    Bytes encrypted_output; // E_K(out)
    crypto::Ciphertext ecomp;
    PeerIndex prev = 0; // the peer that submitted the computation
    MaybeOutput output; // plaintext kept for publish mode and metrics
    Bytes spec_key;     // serialized C_i, keys the public bulletin
    bool refused = false;
    bool timed_out = false;
};

// Receives the id of the message that carried the computation.
using ComputeFn = std::function<MaybeOutput(MessageId, const ComputationSpec&, const JointInput&)>;

struct WorkerContext {
    const crypto::CipherSuite* suite = nullptr;
    ByteView secret_key;
    ByteView public_key;
    ComputeFn compute;
    // Co-utile mode only: refuse computations from submitters below own rep - delta.
    bool rational = false;
    double delta = 0.0;
    std::span<const double> reputations;
    PeerIndex self = 0;
    Rng* rng = nullptr;
};

/// Per-session worker. Inputs (nil computations) fill the buffer; a
/// computation waits until the buffer holds all m inputs. The buffer is kept
/// until the session closes so every computation submitted to this worker in
/// the session runs on the same m inputs.
class WorkerState {
public:
    explicit WorkerState(std::size_t m_clients = 0) : buffer_(m_clients) {}

    std::vector<WorkerEmission> receive(const ChannelMessage& m, PeerIndex submitter,
                                        const WorkerContext& ctx);
    /// Session deadline: every computation still waiting returns nil.
    std::vector<WorkerEmission> expire(const WorkerContext& ctx);

    const InputBuffer& buffer() const { return buffer_; }
    std::size_t pending() const { return pending_.size(); }
    void reset(std::size_t m_clients);

private:
    struct Pending {
        MessageId message;
        ComputationSpec spec;
        crypto::SymKey key;
        crypto::Ciphertext ecomp;
        PeerIndex prev;
    };

    WorkerEmission finish(const Pending& p, MaybeOutput out, const WorkerContext& ctx,
                          bool refused, bool timed_out) const;
    std::vector<WorkerEmission> drain(const WorkerContext& ctx);

    InputBuffer buffer_;
    std::deque<Pending> pending_;
};

std::vector<WorkerEmission> hbc_worker_receive(WorkerState& worker, const ChannelMessage& m,
                                               PeerIndex submitter, const WorkerContext& ctx);
std::vector<WorkerEmission> c_worker_receive(WorkerState& worker, const ChannelMessage& m,
                                             PeerIndex submitter, const WorkerContext& ctx);

// ---------------------------------------------------------------------------
// Reverse channel

/// A peer's own memory of who handed it each forward message. A peer can
/// see the same message more than once, so predecessors are stacked.
class ReverseLinks {
public:
    void remember(MessageId id, PeerIndex from) { links_[id].push_back(from); }
    std::optional<PeerIndex> backtrack(MessageId id);
    void clear() { links_.clear(); }

private:
    std::unordered_map<MessageId, std::vector<PeerIndex>> links_;
};

enum class ReverseKind { Deliver, Backtrack, Broken };

struct ReverseAction {
    ReverseKind kind;
    PeerIndex next = 0;
};

/// The holder that knows K keeps the output; everyone else passes it to the
/// peer it received the forward message from.
ReverseAction rev_step(bool holder_knows_key, ReverseLinks& holder_links, MessageId id);

// ---------------------------------------------------------------------------
// First-forwardee reward handshake

/// Commitment "client has set l_{client,forwardee}=1" signed by the client and
/// the forwardee's acknowledgment of it, bound to one dispatch via `context`.
struct RewardReceipt {
    PeerIndex client = 0;
    PeerIndex forwardee = 0;
    Bytes context;
    crypto::Signature commitment;
    crypto::Signature acknowledgment;
};

Bytes commitment_message(const Pseudonym& client, const Pseudonym& forwardee, ByteView context);
Bytes acknowledgment_message(const Pseudonym& client, const Pseudonym& forwardee, ByteView context);

bool verify_commitment(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                       PeerIndex client, PeerIndex forwardee, ByteView context,
                       const crypto::Signature& commitment);
bool verify_receipt(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                    PeerIndex client, const RewardReceipt& receipt);

struct HandshakeResult {
    std::optional<RewardReceipt> receipt;
    std::size_t managers_recorded = 0;
};

/// The client, holding its output, rewards the peer that handed it back:
/// it signs a commitment, the forwardee relays it to the client's managers
/// (each verifies it before recording l_{client,forwardee}+1 in its copy),
/// then the forwardee returns a signed receipt. A client that skips the
/// commitment ends with no receipt.
HandshakeResult c_rev_step(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                           PeerIndex client, ByteView client_secret, PeerIndex forwardee,
                           ByteView forwardee_secret, ByteView context,
                           AccountabilityRegistry& registry, bool client_commits);

/// Manager-side handling of a relayed commitment. Records the reward in this
/// manager's copy only when the commitment verifies.
bool am_record_commitment(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                          PeerIndex am, PeerIndex client, PeerIndex forwardee, ByteView context,
                          const crypto::Signature& commitment, AccountabilityRegistry& registry);

} // namespace coutile
