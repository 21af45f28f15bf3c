#include "coutile/identity.hpp"

#include "coutile/crypto.hpp"

#include <algorithm>

namespace coutile {

Pseudonym derive_pseudonym(const RealId& id, ByteView nonce)
{
    if (nonce.empty())
        throw std::invalid_argument("pseudonym nonce must be nonempty");
    // Length-prefix the id so that (id, nonce) splits are unambiguous.
    ByteWriter w;
    w.u64(id.value.size()).raw(id.value).raw(nonce);
    return Pseudonym{crypto::sha256(w.bytes())};
}

bool prove_pseudonym(const RealId& id, ByteView nonce, const Pseudonym& p)
{
    if (nonce.empty())
        return false;
    return derive_pseudonym(id, nonce) == p;
}

AmAssignment assign_accountability_managers(const Pseudonym& p,
                                            const std::vector<Pseudonym>& roster,
                                            std::size_t managers)
{
    if (managers >= roster.size())
        throw ConfigError("accountability managers M must be smaller than the roster size");

    AmAssignment out{p, {}};
    out.managers.reserve(managers);
    const auto n = static_cast<std::uint64_t>(roster.size());
    for (std::uint32_t k = 0; out.managers.size() < managers; ++k) {
        ByteWriter w;
        w.raw(p.digest).u32(k);
        auto d = crypto::sha256(w.bytes());
        ByteReader r(d);
        auto index = static_cast<std::size_t>(r.u64() % n);
        if (roster[index] == p)
            continue;
        if (std::find(out.managers.begin(), out.managers.end(), index) != out.managers.end())
            continue;
        out.managers.push_back(index);
    }
    return out;
}

} // namespace coutile
