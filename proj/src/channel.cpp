#include "coutile/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace coutile {

namespace {

// Reputation comparisons tolerate float noise from the power iteration.
constexpr double kRepTol = 1e-12;

Bytes random_bytes(Rng& rng, std::size_t n)
{
    Bytes out(n);
    for (std::size_t i = 0; i < n; i += 8) {
        auto w = rng();
        for (std::size_t k = 0; k < 8 && i + k < n; ++k)
            out[i + k] = static_cast<std::uint8_t>(w >> (8 * k));
    }
    return out;
}

constexpr std::uint8_t kPayloadVersion = 1;

} // namespace

Bytes encode_input_payload(const InputValue& value, const Nonce& nonce)
{
    ByteWriter w;
    w.u8(kPayloadVersion).raw(encode_input(value)).raw(nonce);
    return std::move(w).bytes();
}

std::optional<std::pair<InputValue, Nonce>> decode_input_payload(ByteView data)
{
    try {
        ByteReader r(data);
        if (r.u8() != kPayloadVersion)
            return std::nullopt;
        auto value = decode_input(r);
        auto raw = r.raw(16);
        if (!r.done())
            return std::nullopt;
        Nonce nonce{};
        std::copy(raw.begin(), raw.end(), nonce.begin());
        return std::make_pair(std::move(value), nonce);
    } catch (const DecodeError&) {
        return std::nullopt;
    }
}

Bytes encode_nil_comp() { return {static_cast<std::uint8_t>(CompTag::Nil)}; }
Bytes encode_refuse_comp() { return {static_cast<std::uint8_t>(CompTag::Refuse)}; }

Bytes encode_comp(const ComputationSpec& spec)
{
    Bytes out{static_cast<std::uint8_t>(CompTag::Spec)};
    auto body = serialize(spec);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::optional<DecodedComp> decode_comp(ByteView data)
{
    if (data.empty())
        return std::nullopt;
    switch (static_cast<CompTag>(data[0])) {
    case CompTag::Nil:
        if (data.size() != 1)
            return std::nullopt;
        return DecodedComp{CompTag::Nil, std::nullopt};
    case CompTag::Refuse:
        if (data.size() != 1)
            return std::nullopt;
        return DecodedComp{CompTag::Refuse, std::nullopt};
    case CompTag::Spec:
        try {
            return DecodedComp{CompTag::Spec, deserialize_spec(data.subspan(1))};
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

std::size_t InputBuffer::NonceHash::operator()(const Nonce& n) const noexcept
{
    std::uint64_t a = 0, b = 0;
    std::memcpy(&a, n.data(), 8);
    std::memcpy(&b, n.data() + 8, 8);
    return static_cast<std::size_t>(a ^ (b * 0x9e3779b97f4a7c15ULL));
}

bool InputBuffer::add(const InputValue& value, const Nonce& nonce)
{
    if (full() || nonces_.contains(nonce))
        return false;
    nonces_.insert(nonce);
    values_.push_back(value);
    return true;
}

void InputBuffer::clear()
{
    values_.clear();
    nonces_.clear();
}

// ---------------------------------------------------------------------------

namespace {

PeerIndex uniform_peer_except(PeerIndex a, PeerIndex b, std::size_t peers, Rng& rng)
{
    const std::size_t excluded = (a == b) ? 1 : 2;
    std::uniform_int_distribution<std::size_t> pick(0, peers - excluded - 1);
    auto lo = std::min(a, b), hi = std::max(a, b);
    std::size_t t = pick(rng);
    if (t >= lo)
        ++t;
    if (excluded == 2 && t >= hi)
        ++t;
    return t;
}

} // namespace

ForwardAction hbc_fwd_step(PeerIndex holder, PeerIndex dest, bool is_originator, double p,
                           std::size_t peers, Rng& rng)
{
    bool hop = is_originator || std::bernoulli_distribution(p)(rng);
    const std::size_t excluded = (holder == dest) ? 1 : 2;
    if (hop && peers > excluded)
        return {ForwardKind::Hop, uniform_peer_except(holder, dest, peers, rng)};
    return {ForwardKind::Submit, dest};
}

namespace {

// Highest reputation not above `cap`; lowest roster index on ties.
std::optional<PeerIndex> best_not_above(PeerIndex holder, PeerIndex dest, double cap,
                                        std::span<const double> reputations)
{
    std::optional<PeerIndex> best;
    for (PeerIndex t = 0; t < reputations.size(); ++t) {
        if (t == holder || t == dest || reputations[t] > cap)
            continue;
        if (!best || reputations[t] > reputations[*best] + kRepTol)
            best = t;
    }
    return best;
}

} // namespace

std::optional<PeerIndex> select_forwardee(PeerIndex holder, PeerIndex dest, double g_s,
                                          double g_d, double delta,
                                          std::span<const double> reputations, Rng& rng)
{
    const double top = g_s + delta + kRepTol;
    if (g_s >= g_d - delta - kRepTol) {
        const double bottom = g_d - delta - kRepTol;
        std::vector<PeerIndex> band;
        for (PeerIndex t = 0; t < reputations.size(); ++t) {
            if (t == holder || t == dest)
                continue;
            if (reputations[t] >= bottom && reputations[t] <= top)
                band.push_back(t);
        }
        if (band.empty())
            return std::nullopt;
        std::uniform_int_distribution<std::size_t> pick(0, band.size() - 1);
        return band[pick(rng)];
    }
    return best_not_above(holder, dest, top, reputations);
}

bool accepts_from(double sender_rep, double receiver_rep, double delta)
{
    return sender_rep >= receiver_rep - delta - kRepTol;
}

bool refuses_computation(double submitter_rep, double worker_rep, double delta)
{
    return submitter_rep < worker_rep - delta - kRepTol;
}

CoutileForwardAction c_fwd_step(PeerIndex holder, PeerIndex dest, bool is_originator, double p,
                                double delta, std::span<const double> reputations, Rng& rng)
{
    bool hop = is_originator || std::bernoulli_distribution(p)(rng);
    if (!hop)
        return {CoutileForwardKind::SubmitTo, dest};
    auto t = select_forwardee(holder, dest, reputations[holder], reputations[dest], delta,
                              reputations, rng);
    // The originator must not reach the worker first-hand: with an empty band
    // it falls back to the best peer that will still accept from it.
    if (!t && is_originator)
        t = best_not_above(holder, dest, reputations[holder] + delta + kRepTol, reputations);
    if (!t)
        return {CoutileForwardKind::NoForwardee, dest};
    if (!accepts_from(reputations[holder], reputations[*t], delta))
        return {CoutileForwardKind::Discard, *t};
    return {CoutileForwardKind::HopTo, *t};
}

// ---------------------------------------------------------------------------

void WorkerState::reset(std::size_t m_clients)
{
    buffer_ = InputBuffer(m_clients);
    pending_.clear();
}

WorkerEmission WorkerState::finish(const Pending& p, MaybeOutput out, const WorkerContext& ctx,
                                   bool refused, bool timed_out) const
{
    WorkerEmission e;
    e.message = p.message;
    e.encrypted_output = ctx.suite->sym_encrypt(p.key, encode_maybe_output(out));
    e.ecomp = p.ecomp;
    e.prev = p.prev;
    e.output = std::move(out);
    e.spec_key = serialize(p.spec);
    e.refused = refused;
    e.timed_out = timed_out;
    return e;
}

std::vector<WorkerEmission> WorkerState::drain(const WorkerContext& ctx)
{
    std::vector<WorkerEmission> out;
    if (!buffer_.full())
        return out;
    const auto inputs = buffer_.snapshot();
    while (!pending_.empty()) {
        auto p = std::move(pending_.front());
        pending_.pop_front();
        out.push_back(finish(p, ctx.compute(p.message, p.spec, inputs), ctx, false, false));
    }
    return out;
}

std::vector<WorkerEmission> WorkerState::receive(const ChannelMessage& m, PeerIndex submitter,
                                                 const WorkerContext& ctx)
{
    auto comp_plain = ctx.suite->pke_decrypt(ctx.secret_key, m.ecomp);
    if (!comp_plain)
        return {};
    auto comp = decode_comp(*comp_plain);
    if (!comp)
        return {};

    auto msg_plain = ctx.suite->pke_decrypt(ctx.secret_key, m.msg);
    if (!msg_plain)
        return {};

    if (comp->tag == CompTag::Nil) {
        auto input = decode_input_payload(*msg_plain);
        if (input)
            buffer_.add(input->first, input->second);
        return drain(ctx);
    }

    Pending p{m.id, comp->spec.value_or(ComputationSpec{}), crypto::SymKey{*msg_plain}, m.ecomp,
              submitter};
    bool refuse = comp->tag == CompTag::Refuse;
    if (!refuse && ctx.rational) {
        refuse = refuses_computation(ctx.reputations[submitter], ctx.reputations[ctx.self],
                                     ctx.delta);
        if (refuse) {
            auto randomness = random_bytes(*ctx.rng, 32);
            p.ecomp = ctx.suite->pke_encrypt(ctx.public_key, encode_refuse_comp(), randomness);
        }
    }
    if (refuse)
        return {finish(p, std::nullopt, ctx, true, false)};

    pending_.push_back(std::move(p));
    return drain(ctx);
}

std::vector<WorkerEmission> WorkerState::expire(const WorkerContext& ctx)
{
    std::vector<WorkerEmission> out;
    while (!pending_.empty()) {
        out.push_back(finish(pending_.front(), std::nullopt, ctx, false, true));
        pending_.pop_front();
    }
    return out;
}

std::vector<WorkerEmission> hbc_worker_receive(WorkerState& worker, const ChannelMessage& m,
                                               PeerIndex submitter, const WorkerContext& ctx)
{
    WorkerContext plain = ctx;
    plain.rational = false;
    return worker.receive(m, submitter, plain);
}

std::vector<WorkerEmission> c_worker_receive(WorkerState& worker, const ChannelMessage& m,
                                             PeerIndex submitter, const WorkerContext& ctx)
{
    WorkerContext gated = ctx;
    gated.rational = true;
    return worker.receive(m, submitter, gated);
}

// ---------------------------------------------------------------------------

std::optional<PeerIndex> ReverseLinks::backtrack(MessageId id)
{
    auto it = links_.find(id);
    if (it == links_.end() || it->second.empty())
        return std::nullopt;
    PeerIndex prev = it->second.back();
    it->second.pop_back();
    if (it->second.empty())
        links_.erase(it);
    return prev;
}

ReverseAction rev_step(bool holder_knows_key, ReverseLinks& holder_links, MessageId id)
{
    if (holder_knows_key)
        return {ReverseKind::Deliver, 0};
    auto prev = holder_links.backtrack(id);
    if (!prev)
        return {ReverseKind::Broken, 0};
    return {ReverseKind::Backtrack, *prev};
}

// ---------------------------------------------------------------------------

namespace {

Bytes statement(std::string_view tag, const Pseudonym& client, const Pseudonym& forwardee,
                ByteView context)
{
    ByteWriter w;
    w.str(tag).raw(client.digest).raw(forwardee.digest).u32(static_cast<std::uint32_t>(context.size()))
        .raw(context);
    return std::move(w).bytes();
}

} // namespace

Bytes commitment_message(const Pseudonym& client, const Pseudonym& forwardee, ByteView context)
{
    return statement("has set l=1 for first forwardee", client, forwardee, context);
}

Bytes acknowledgment_message(const Pseudonym& client, const Pseudonym& forwardee, ByteView context)
{
    return statement("acknowledges l=1 from client", client, forwardee, context);
}

bool verify_commitment(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                       PeerIndex client, PeerIndex forwardee, ByteView context,
                       const crypto::Signature& commitment)
{
    if (client >= dir.size() || forwardee >= dir.size())
        return false;
    if (commitment.signer != dir.pseudonyms[client])
        return false;
    auto msg = commitment_message(dir.pseudonyms[client], dir.pseudonyms[forwardee], context);
    return suite.verify(dir.public_keys[client], msg, commitment);
}

bool verify_receipt(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                    PeerIndex client, const RewardReceipt& receipt)
{
    if (receipt.client != client || receipt.forwardee >= dir.size() || receipt.forwardee == client)
        return false;
    if (!verify_commitment(suite, dir, client, receipt.forwardee, receipt.context,
                           receipt.commitment))
        return false;
    if (receipt.acknowledgment.signer != dir.pseudonyms[receipt.forwardee])
        return false;
    auto ack = acknowledgment_message(dir.pseudonyms[client], dir.pseudonyms[receipt.forwardee],
                                      receipt.context);
    return suite.verify(dir.public_keys[receipt.forwardee], ack, receipt.acknowledgment);
}

bool am_record_commitment(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                          PeerIndex am, PeerIndex client, PeerIndex forwardee, ByteView context,
                          const crypto::Signature& commitment, AccountabilityRegistry& registry)
{
    if (!registry.is_manager_of(am, client))
        return false;
    if (!verify_commitment(suite, dir, client, forwardee, context, commitment))
        return false;
    registry.reward_held_by(am, client, forwardee);
    return true;
}

HandshakeResult c_rev_step(const crypto::CipherSuite& suite, const PublicDirectory& dir,
                           PeerIndex client, ByteView client_secret, PeerIndex forwardee,
                           ByteView forwardee_secret, ByteView context,
                           AccountabilityRegistry& registry, bool client_commits)
{
    HandshakeResult result;
    if (!client_commits || forwardee == client)
        return result;
    auto commitment = suite.sign(
        dir.pseudonyms[client], client_secret,
        commitment_message(dir.pseudonyms[client], dir.pseudonyms[forwardee], context));

    const auto& ams = registry.managers_of(client);
    if (ams.empty()) {
        // Self custody: the client's own row is the only copy.
        if (verify_commitment(suite, dir, client, forwardee, context, commitment)) {
            registry.reward(client, forwardee);
            result.managers_recorded = 1;
        }
    } else {
        for (auto am : ams)
            if (am_record_commitment(suite, dir, am, client, forwardee, context, commitment,
                                     registry))
                ++result.managers_recorded;
    }
    if (result.managers_recorded == 0)
        return result;

    RewardReceipt receipt;
    receipt.client = client;
    receipt.forwardee = forwardee;
    receipt.context.assign(context.begin(), context.end());
    receipt.commitment = std::move(commitment);
    receipt.acknowledgment = suite.sign(
        dir.pseudonyms[forwardee], forwardee_secret,
        acknowledgment_message(dir.pseudonyms[client], dir.pseudonyms[forwardee], context));
    result.receipt = std::move(receipt);
    return result;
}

} // namespace coutile
