#include "coutile/mpc.hpp"

#include <deque>
#include <limits>
#include <variant>

namespace coutile {

namespace {

constexpr std::size_t kInputCall = std::numeric_limits<std::size_t>::max();

struct Flight {
    ChannelMessage m;
    PeerIndex originator = 0;
    std::size_t slot = 0;
    std::size_t k = kInputCall;
    HopPath path;
    std::uint32_t hops = 0;
    std::uint32_t reverse_hops = 0;

    bool computation() const { return k != kInputCall; }
};

struct ForwardAt {
    MessageId id;
    PeerIndex holder;
};

struct WorkerArrive {
    MessageId id;
    PeerIndex submitter;
};

struct ReverseAt {
    MessageId id;
    PeerIndex holder;
    PeerIndex from;
    Bytes payload;
};

using Event = std::variant<ForwardAt, WorkerArrive, ReverseAt>;

Bytes draw_bytes(Rng& rng, std::size_t n)
{
    Bytes out(n);
    for (auto& b : out)
        b = static_cast<std::uint8_t>(rng() >> 56);
    return out;
}

Nonce draw_nonce(Rng& rng)
{
    Nonce n{};
    for (auto& b : n)
        b = static_cast<std::uint8_t>(rng() >> 56);
    return n;
}

std::vector<PeerIndex> uniform_workers(PeerIndex self, std::size_t r, std::size_t n, Rng& rng)
{
    std::vector<PeerIndex> pool;
    pool.reserve(n - 1);
    for (PeerIndex t = 0; t < n; ++t)
        if (t != self)
            pool.push_back(t);
    if (pool.size() < r)
        throw ConfigError("roster too small for r workers");
    for (std::size_t k = 0; k < r; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
        std::swap(pool[k], pool[pick(rng)]);
    }
    pool.resize(r);
    return pool;
}

class Engine {
public:
    Engine(World& world, const Session& session, const SessionOptions& options)
        : w_(world), s_(session), opt_(options), cfg_(world.config), n_(world.size()),
          rational_(cfg_.mode == Mode::Rational), publish_(cfg_.publish_output),
          workers_(n_, WorkerState(session.clients.size())), links_(n_)
    {
        contexts_.resize(n_);
        for (PeerIndex p = 0; p < n_; ++p) {
            auto& ctx = contexts_[p];
            ctx.suite = w_.suite.get();
            ctx.secret_key = w_.peers[p].keys.secret_key;
            ctx.public_key = w_.peers[p].keys.public_key;
            ctx.rational = rational_;
            ctx.delta = cfg_.delta;
            ctx.reputations = w_.reputation;
            ctx.self = p;
            ctx.rng = &w_.rng;
            ctx.compute = [this, p](MessageId id, const ComputationSpec& spec,
                                    const JointInput& inputs) { return compute(p, id, spec, inputs); };
        }
    }

    SessionOutcome run();

private:
    Flight& flight(MessageId id) { return flights_[id - first_id_]; }

    void trace(TraceKind kind, PeerIndex carrier, PeerIndex dest, std::uint32_t hop, MessageId id)
    {
        if (opt_.trace)
            opt_.trace->record({w_.iteration, kind, carrier, dest, hop, id});
    }

    MessageId launch(PeerIndex origin, PeerIndex dest, std::size_t slot, std::size_t k,
                     ByteView msg_plain, ByteView comp_plain);
    void forward(const ForwardAt& e);
    void hop_to(Flight& f, MessageId id, PeerIndex from, PeerIndex to);
    void submit(Flight& f, MessageId id, PeerIndex submitter);
    void arrive(const WorkerArrive& e);
    void emit(PeerIndex worker, WorkerEmission e);
    void reverse(ReverseAt e);
    MaybeOutput compute(PeerIndex self, MessageId id, const ComputationSpec& spec,
                        const JointInput& inputs);
    void finish_path(Flight& f, MessageId id);

    World& w_;
    const Session& s_;
    const SessionOptions& opt_;
    const SimConfig& cfg_;
    std::size_t n_;
    bool rational_;
    bool publish_;

    std::vector<WorkerState> workers_;
    std::vector<ReverseLinks> links_;
    std::vector<WorkerContext> contexts_;
    std::vector<Flight> flights_;
    MessageId first_id_ = 0;
    std::deque<Event> queue_;

    std::vector<std::vector<PeerIndex>> chosen_;
    std::vector<std::vector<MaybeOutput>> returned_;
    std::vector<std::vector<MessageId>> dispatch_ids_;
    std::vector<std::vector<RewardReceipt>> receipts_;
    std::vector<std::size_t> expected_;
    SessionOutcome out_;
};

MessageId Engine::launch(PeerIndex origin, PeerIndex dest, std::size_t slot, std::size_t k,
                         ByteView msg_plain, ByteView comp_plain)
{
    const auto& pk = w_.peers[dest].keys.public_key;
    Flight f;
    f.originator = origin;
    f.slot = slot;
    f.k = k;
    const MessageId id = w_.next_message++;
    f.m.id = id;
    f.m.msg = w_.suite->pke_encrypt(pk, msg_plain, draw_bytes(w_.rng, 32));
    f.m.ecomp = w_.suite->pke_encrypt(pk, comp_plain, draw_bytes(w_.rng, 32));
    f.m.dest = dest;
    f.m.carrier = origin;
    f.path.peers.push_back(origin);
    flights_.push_back(std::move(f));
    out_.originators.emplace(id, origin);
    ++out_.stats.forward_messages;
    queue_.push_back(ForwardAt{id, origin});
    return id;
}

void Engine::hop_to(Flight& f, MessageId id, PeerIndex from, PeerIndex to)
{
    links_[to].remember(id, from);
    ++f.hops;
    f.m.carrier = to;
    f.path.peers.push_back(to);
    ++out_.stats.hops;
    trace(TraceKind::Hop, to, f.m.dest, f.hops, id);
    queue_.push_back(ForwardAt{id, to});
}

void Engine::submit(Flight& f, MessageId id, PeerIndex submitter)
{
    trace(TraceKind::Submit, submitter, f.m.dest, f.hops, id);
    if (submitter == f.originator && f.hops == 0)
        ++out_.stats.degraded_submissions;
    f.path.peers.push_back(f.m.dest);
    finish_path(f, id);
    queue_.push_back(WorkerArrive{id, submitter});
}

void Engine::finish_path(Flight& f, MessageId id)
{
    if (opt_.record_paths)
        out_.paths.push_back({id, f.computation(), f.path});
}

void Engine::forward(const ForwardAt& e)
{
    Flight& f = flight(e.id);
    const PeerIndex holder = e.holder;
    const PeerIndex dest = f.m.dest;
    const bool is_originator = holder == f.originator && f.hops == 0;

    if (cfg_.max_hops > 0 && f.hops >= cfg_.max_hops) {
        ++out_.stats.hop_caps;
        trace(TraceKind::HopCap, holder, dest, f.hops, e.id);
        submit(f, e.id, holder);
        return;
    }

    if (!rational_) {
        auto a = hbc_fwd_step(holder, dest, is_originator, cfg_.p_forward, n_, w_.rng);
        if (a.kind == ForwardKind::Hop)
            hop_to(f, e.id, holder, a.target);
        else
            submit(f, e.id, holder);
        return;
    }

    auto a = c_fwd_step(holder, dest, is_originator, cfg_.p_forward, cfg_.delta, w_.reputation,
                        w_.rng);
    switch (a.kind) {
    case CoutileForwardKind::HopTo:
        hop_to(f, e.id, holder, a.target);
        break;
    case CoutileForwardKind::SubmitTo:
        submit(f, e.id, holder);
        break;
    case CoutileForwardKind::NoForwardee:
        ++out_.stats.no_forwardee;
        trace(TraceKind::NoForwardee, holder, dest, f.hops, e.id);
        submit(f, e.id, holder);
        break;
    case CoutileForwardKind::Discard:
        ++out_.stats.discards;
        trace(TraceKind::Discard, a.target, dest, f.hops + 1, e.id);
        break;
    }
}

MaybeOutput Engine::compute(PeerIndex self, MessageId id, const ComputationSpec& spec,
                            const JointInput& inputs)
{
    const Flight& f = flight(id);
    bool honest;
    if (opt_.honest)
        honest = opt_.honest(f.slot, f.k, self);
    else
        honest = std::bernoulli_distribution(w_.peers[self].goodness)(w_.rng);
    try {
        if (honest)
            return evaluate(spec, inputs);
        return malicious_worker_output(spec, inputs, w_.rng);
    } catch (const EvaluationError&) {
        return std::nullopt;
    }
}

void Engine::arrive(const WorkerArrive& e)
{
    Flight& f = flight(e.id);
    const PeerIndex worker = f.m.dest;
    auto emissions = rational_ ? c_worker_receive(workers_[worker], f.m, e.submitter, contexts_[worker])
                               : hbc_worker_receive(workers_[worker], f.m, e.submitter, contexts_[worker]);
    for (auto& em : emissions)
        emit(worker, std::move(em));
}

void Engine::emit(PeerIndex worker, WorkerEmission e)
{
    Flight& f = flight(e.message);
    if (e.refused) {
        ++out_.stats.refusals;
        trace(TraceKind::Refuse, worker, worker, f.hops, e.message);
    }
    if (e.timed_out) {
        ++out_.stats.timeouts;
        trace(TraceKind::Timeout, worker, worker, f.hops, e.message);
    }
    if (publish_) {
        trace(TraceKind::Publish, worker, worker, 0, e.message);
        out_.bulletin[e.spec_key].push_back(e.output);
        if (f.computation())
            returned_[f.slot][f.k] = e.output;
        return;
    }
    if (e.prev != f.originator)
        trace(TraceKind::Reverse, worker, e.prev, ++f.reverse_hops, e.message);
    queue_.push_back(ReverseAt{e.message, e.prev, worker, std::move(e.encrypted_output)});
}

void Engine::reverse(ReverseAt e)
{
    Flight& f = flight(e.id);
    const bool knows_key = e.holder == f.originator;
    auto a = rev_step(knows_key, links_[e.holder], e.id);
    if (a.kind == ReverseKind::Broken) {
        ++out_.stats.broken_paths;
        trace(TraceKind::Broken, e.holder, e.holder, f.reverse_hops, e.id);
        return;
    }
    if (a.kind == ReverseKind::Backtrack) {
        if (a.next != f.originator)
            trace(TraceKind::Reverse, e.holder, a.next, ++f.reverse_hops, e.id);
        queue_.push_back(ReverseAt{e.id, a.next, e.holder, std::move(e.payload)});
        return;
    }

    // The client decrypts its output.
    MaybeOutput output;
    if (auto plain = w_.suite->sym_decrypt(s_.keys[f.slot], e.payload)) {
        if (auto decoded = decode_maybe_output(*plain))
            output = std::move(*decoded);
        else
            ++out_.stats.decrypt_failures;
    } else {
        ++out_.stats.decrypt_failures;
    }
    returned_[f.slot][f.k] = std::move(output);

    // A message the worker received straight from the client had no forwardee to reward.
    if (!rational_ || e.from == f.m.dest)
        return;
    ++expected_[f.slot];
    ByteWriter context;
    context.u64(w_.iteration).u64(e.id);
    const PeerIndex client = e.holder;
    auto hs = c_rev_step(*w_.suite, w_.directory, client, w_.peers[client].keys.secret_key, e.from,
                         w_.peers[e.from].keys.secret_key, context.bytes(), w_.registry,
                         w_.peers[client].rewards_first_forwardee);
    if (hs.receipt) {
        ++out_.stats.receipts;
        receipts_[f.slot].push_back(std::move(*hs.receipt));
    }
}

SessionOutcome Engine::run()
{
    const std::size_t m = s_.clients.size();
    first_id_ = w_.next_message;
    flights_.reserve(m * n_ + m * s_.redundancy);
    chosen_.resize(m);
    returned_.assign(m, std::vector<MaybeOutput>(s_.redundancy));
    dispatch_ids_.resize(m);
    receipts_.resize(m);
    expected_.assign(m, 0);

    std::vector<double> rep_at_request = w_.reputation;

    // Inputs to every peer, all clients in parallel.
    const Bytes nil_comp = encode_nil_comp();
    for (std::size_t i = 0; i < m; ++i) {
        const PeerIndex client = s_.clients[i];
        const Nonce nonce = draw_nonce(w_.rng);
        const Bytes payload = encode_input_payload(s_.inputs[i], nonce);
        for (PeerIndex l = 0; l < n_; ++l) {
            if (l == client) {
                ChannelMessage self_msg;
                self_msg.msg = w_.suite->pke_encrypt(w_.peers[l].keys.public_key, payload,
                                                     draw_bytes(w_.rng, 32));
                self_msg.ecomp = w_.suite->pke_encrypt(w_.peers[l].keys.public_key, nil_comp,
                                                       draw_bytes(w_.rng, 32));
                self_msg.dest = l;
                self_msg.carrier = l;
                workers_[l].receive(self_msg, l, contexts_[l]);
                continue;
            }
            launch(client, l, i, kInputCall, payload, nil_comp);
        }
    }

    // Key and pruned computation to each worker.
    for (std::size_t i = 0; i < m; ++i) {
        const PeerIndex client = s_.clients[i];
        if (opt_.workers)
            chosen_[i] = opt_.workers(i);
        else if (rational_)
            chosen_[i] = select_workers(client, w_.reputation[client], s_.kappa[i], s_.redundancy,
                                        w_.reputation, w_.rng);
        else
            chosen_[i] = uniform_workers(client, s_.redundancy, n_, w_.rng);
        if (chosen_[i].size() != s_.redundancy)
            throw std::logic_error("worker hook returned the wrong number of workers");
        const Bytes comp = encode_comp(prune_computation(s_.computation, s_, i));
        for (std::size_t k = 0; k < s_.redundancy; ++k)
            dispatch_ids_[i].push_back(launch(client, chosen_[i][k], i, k, s_.keys[i].key, comp));
    }

    for (;;) {
        while (!queue_.empty()) {
            Event ev = std::move(queue_.front());
            queue_.pop_front();
            if (auto* f = std::get_if<ForwardAt>(&ev))
                forward(*f);
            else if (auto* a = std::get_if<WorkerArrive>(&ev))
                arrive(*a);
            else
                reverse(std::move(std::get<ReverseAt>(ev)));
        }
        // Deadline: whatever is still waiting for inputs returns nil.
        bool expired = false;
        for (PeerIndex p = 0; p < n_; ++p) {
            if (workers_[p].pending() == 0)
                continue;
            for (auto& em : workers_[p].expire(contexts_[p]))
                emit(p, std::move(em));
            expired = true;
        }
        if (!expired)
            break;
    }

    const JointInput truth_inputs{s_.inputs};
    for (std::size_t i = 0; i < m; ++i) {
        ClientOutcome c;
        c.client = s_.clients[i];
        c.reputation_at_request = rep_at_request[c.client];
        c.slate.client = c.client;
        c.slate.workers = chosen_[i];
        c.slate.returned = returned_[i];
        const ComputationSpec ci = prune_computation(s_.computation, s_, i);
        if (publish_) {
            auto it = out_.bulletin.find(serialize(ci));
            if (it != out_.bulletin.end())
                c.output = majority_output(it->second);
        } else {
            c.output = majority_output(c.slate.returned);
        }
        c.truth = evaluate(ci, truth_inputs);
        c.correct = c.output && *c.output == c.truth;
        c.receipts = std::move(receipts_[i]);
        c.receipts_expected = expected_[i];
        if (rational_) {
            settle_rewards(c.slate, c.output, w_.registry);
            c.audit_punishments = audit_receipts(*w_.suite, w_.directory, c.client, c.receipts,
                                                 c.receipts_expected, w_.registry, w_.iteration);
            out_.stats.audit_punishments += c.audit_punishments;
        }
        out_.clients.push_back(std::move(c));
    }
    return std::move(out_);
}

} // namespace

SessionOutcome run_session(World& world, const Session& session, const SessionOptions& options)
{
    Engine engine(world, session, options);
    return engine.run();
}

} // namespace coutile
