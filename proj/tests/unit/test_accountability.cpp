#include "coutile/accountability.hpp"

#include <gtest/gtest.h>

using namespace coutile;

namespace {

// Peer i is managed by the next three peers round the ring.
AccountabilityRegistry ring(std::size_t n, std::size_t m)
{
    std::vector<std::vector<PeerIndex>> managers(n);
    for (PeerIndex i = 0; i < n; ++i)
        for (std::size_t k = 1; k <= m; ++k)
            managers[i].push_back((i + k) % n);
    return AccountabilityRegistry(n, managers);
}

} // namespace

TEST(Registry, RewardLandsAtEveryCustodian)
{
    auto reg = ring(6, 3);
    reg.reward(0, 4);
    for (auto am : reg.managers_of(0))
        EXPECT_EQ(reg.held_by(am, 0, 4), 1.0);
    EXPECT_EQ(reg.consensus().at(0, 4), 1.0);
}

TEST(Registry, SingleCustodianOutvoted)
{
    auto reg = ring(6, 3);
    reg.reward_held_by(1, 0, 5);
    EXPECT_EQ(reg.held_by(1, 0, 5), 1.0);
    EXPECT_EQ(reg.held_by(2, 0, 5), 0.0);
    EXPECT_EQ(reg.consensus().at(0, 5), 0.0);
    reg.reward_held_by(2, 0, 5);
    EXPECT_EQ(reg.consensus().at(0, 5), 1.0);
}

TEST(Registry, MedianOfCopies)
{
    auto reg = ring(6, 3);
    for (int k = 0; k < 5; ++k)
        reg.reward_held_by(1, 0, 3);
    reg.reward_held_by(2, 0, 3);
    reg.reward_held_by(2, 0, 3);
    // Copies hold 5, 2, 0; the median is 2.
    EXPECT_EQ(reg.consensus().at(0, 3), 2.0);
}

TEST(Registry, NonManagerCannotHoldOrAudit)
{
    auto reg = ring(6, 3);
    EXPECT_FALSE(reg.is_manager_of(5, 0));
    EXPECT_THROW(reg.reward_held_by(5, 0, 2), std::invalid_argument);
    EXPECT_THROW(reg.audit_punish(5, 0, 1), std::invalid_argument);
}

TEST(Registry, AuditPunishLogsAndLowersOpinion)
{
    auto reg = ring(6, 3);
    reg.reward(1, 0);
    reg.reward(1, 0);
    reg.audit_punish(1, 0, 7);
    EXPECT_EQ(reg.consensus().at(1, 0), 1.0);
    ASSERT_EQ(reg.audit_log().size(), 1u);
    EXPECT_EQ(reg.audit_log()[0].manager, 1u);
    EXPECT_EQ(reg.audit_log()[0].client, 0u);
    EXPECT_EQ(reg.audit_log()[0].iteration, 7u);
}

TEST(Registry, ZeroManagersMeansSelfCustody)
{
    AccountabilityRegistry reg(4, std::vector<std::vector<PeerIndex>>(4));
    reg.reward(2, 3);
    EXPECT_EQ(reg.consensus().at(2, 3), 1.0);
    EXPECT_TRUE(reg.managers_of(2).empty());
}

TEST(Registry, MalformedAssignmentsRejected)
{
    EXPECT_THROW(AccountabilityRegistry(3, {{1}, {2}}), std::invalid_argument);
    EXPECT_THROW(AccountabilityRegistry(3, {{0}, {2}, {0}}), std::invalid_argument);
    EXPECT_THROW(AccountabilityRegistry(3, {{1}, {2, 0}, {0}}), std::invalid_argument);
}
