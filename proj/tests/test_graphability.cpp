#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <numeric>

#include "generators.hpp"
#include "oracles.hpp"
#include "tcgen/graphability.hpp"

using namespace tcgen;

TEST(ErdosGallai, Examples) {
    EXPECT_TRUE(erdos_gallai({3, 3, 3, 3}));
    EXPECT_FALSE(erdos_gallai({3, 1, 1}));
    EXPECT_TRUE(erdos_gallai({4, 4, 3, 3, 4, 3, 3, 2, 2, 2}));
    EXPECT_TRUE(erdos_gallai({}));
    EXPECT_TRUE(erdos_gallai({0, 0}));
    EXPECT_FALSE(erdos_gallai({3, 3, 1, 1}));
    EXPECT_FALSE(erdos_gallai({2}));
}

// Every sequence of length <= 7 with entries <= 4, against backtracking
// over adjacency matrices.
TEST(ErdosGallai, AgreesWithExhaustiveSearch) {
    std::size_t checked = 0;
    for (int n = 1; n <= 7; ++n) {
        std::vector<int> d(n, 0);
        // non-increasing sequences suffice up to permutation; permutation
        // invariance is checked separately
        std::function<void(int, int)> rec = [&](int pos, int cap) {
            if (pos == n) {
                ASSERT_EQ(erdos_gallai(d), oracle::realizable(d)) << ::testing::PrintToString(d);
                ++checked;
                return;
            }
            for (int v = 0; v <= cap; ++v) {
                d[pos] = v;
                rec(pos + 1, v);
            }
        };
        rec(0, 4);
    }
    EXPECT_GT(checked, 700u);
}

TEST(ErdosGallai, PermutationInvariant) {
    Rng rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<int> d(1 + uniform_index(rng, 9));
        for (auto& x : d)
            x = static_cast<int>(uniform_index(rng, d.size()));
        bool base = erdos_gallai(d);
        std::shuffle(d.begin(), d.end(), rng);
        EXPECT_EQ(erdos_gallai(d), base);
    }
}

// Removing one edge slot from a sequence that satisfies every EG inequality
// strictly keeps it graphical, provided no entry drops to zero. Dropping to
// zero shrinks the effective vertex count and can break it (see below).
TEST(ErdosGallai, StrictSlackMonotone) {
    auto strict = [](std::vector<int> d) {
        std::sort(d.rbegin(), d.rend());
        const int n = static_cast<int>(d.size());
        long long lhs = 0;
        for (int k = 1; k <= n; ++k) {
            lhs += d[k - 1];
            long long rhs = static_cast<long long>(k) * (k - 1);
            for (int i = k; i < n; ++i)
                rhs += std::min(d[i], k);
            if (lhs >= rhs)
                return false;
        }
        return true;
    };
    std::size_t tested = 0;
    for (int n = 2; n <= 6; ++n) {
        std::vector<int> d(n, 0);
        std::function<void(int)> rec = [&](int pos) {
            if (pos == n) {
                if (std::accumulate(d.begin(), d.end(), 0) % 2 || !erdos_gallai(d) || !strict(d))
                    return;
                for (int a = 0; a < n; ++a)
                    for (int b = a + 1; b < n; ++b) {
                        if (d[a] <= 1 || d[b] <= 1)
                            continue;
                        auto e = d;
                        --e[a];
                        --e[b];
                        EXPECT_TRUE(erdos_gallai(e));
                        ++tested;
                    }
                return;
            }
            for (int v = 0; v < n; ++v) {
                d[pos] = v;
                rec(pos + 1);
            }
        };
        rec(0);
    }
    EXPECT_GT(tested, 1000u);
}

TEST(ErdosGallai, EdgeSlotRemovalCreatingIsolatesCanFail) {
    EXPECT_TRUE(erdos_gallai({4, 2, 2, 2, 1, 1}));
    EXPECT_FALSE(erdos_gallai({4, 2, 2, 2, 0, 0}));
}

// Decrementing the two largest entries of a graphical sequence always keeps
// it graphical.
TEST(ErdosGallai, TwoLargestDecrementStaysGraphical) {
    for (int n = 2; n <= 7; ++n) {
        std::vector<int> d(n, 0);
        std::function<void(int, int)> rec = [&](int pos, int cap) {
            if (pos == n) {
                if (d[1] == 0 || !erdos_gallai(d))
                    return;
                auto e = d;
                --e[0];
                --e[1];
                EXPECT_TRUE(erdos_gallai(e)) << ::testing::PrintToString(d);
                return;
            }
            for (int v = 0; v <= cap; ++v) {
                d[pos] = v;
                rec(pos + 1, v);
            }
        };
        rec(0, n - 1);
    }
}

TEST(InterGraphable, Examples) {
    EXPECT_TRUE(inter_graphable({3, 2, 1}));
    EXPECT_FALSE(inter_graphable({5, 1, 1}));
    EXPECT_TRUE(inter_graphable({7, 4, 3}));
    EXPECT_FALSE(inter_graphable({3, 2, 2}));
    EXPECT_TRUE(inter_graphable({4, 4}));
    EXPECT_FALSE(inter_graphable({4, 2}));
}

TEST(Assignment, Examples) {
    EXPECT_TRUE(assignment_feasible(CommunitySpec{{2, 2}}, std::vector<int>{1, 1, 1, 1}));
    EXPECT_FALSE(assignment_feasible(CommunitySpec{{2, 2}}, std::vector<int>{3, 1, 1, 1}));
}

TEST(Assignment, AgreesWithExhaustiveEnumeration) {
    Rng rng(5);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<int> sizes;
        int n = 0;
        int target = 1 + static_cast<int>(uniform_index(rng, 10));
        while (n < target) {
            int s = 1 + static_cast<int>(uniform_index(rng, std::min(5, target - n)));
            sizes.push_back(s);
            n += s;
        }
        std::vector<int> e(n);
        for (auto& x : e)
            x = static_cast<int>(uniform_index(rng, 6));
        // try every labeling of slots
        std::vector<int> labels;
        for (std::size_t c = 0; c < sizes.size(); ++c)
            labels.insert(labels.end(), sizes[c], static_cast<int>(c));
        bool any = false;
        do {
            bool ok = true;
            for (int i = 0; i < n && ok; ++i)
                ok = e[i] < sizes[labels[i]];
            any = ok;
        } while (!any && std::next_permutation(labels.begin(), labels.end()));
        ASSERT_EQ(assignment_feasible(CommunitySpec{sizes}, e), any);
    }
}

TEST(CheckGraphable, FigureThreeSpec) {
    CommunitySpec sizes{{4, 4, 2}};
    DegreeSpec spec{{4, 4, 4, 3, 3, 3, 3, 2, 2, 2}, {3, 3, 3, 2, 2, 2, 2, 1, 1, 1}};
    // intra {3,3,2,2}, {3,2,2,1}, {1,1}: a K4 minus one edge, a star plus one
    // edge, and a dyad
    std::vector<int> member{0, 0, 1, 0, 0, 1, 1, 1, 2, 2};
    auto r = check_graphable(sizes, spec, std::span<const int>(member));
    EXPECT_TRUE(r.ok) << r.describe();
    EXPECT_TRUE(check_graphable(sizes, spec).ok);
}

TEST(CheckGraphable, SingleCommunityPigeonhole) {
    CommunitySpec sizes{{3}};
    DegreeSpec spec{{3, 3, 2}, {3, 3, 2}};
    auto r = check_graphable(sizes, spec);
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.failing_condition, GraphabilityCondition::assignment_infeasible);
    std::vector<int> member{0, 0, 0};
    r = check_graphable(sizes, spec, std::span<const int>(member));
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.failing_condition, GraphabilityCondition::assignment_infeasible);
    EXPECT_EQ(*r.failing_community, 0u);
}

TEST(CheckGraphable, ReportsFailingCommunity) {
    CommunitySpec sizes{{3, 3}};
    DegreeSpec spec{{2, 2, 2, 1, 1, 1}, {2, 2, 2, 1, 1, 0}};
    std::vector<int> member{0, 0, 0, 1, 1, 1};
    auto r = check_graphable(sizes, spec, std::span<const int>(member));
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.failing_condition, GraphabilityCondition::inter_parity);

    spec = {{2, 2, 2, 1, 2, 1}, {2, 2, 2, 1, 1, 0}};
    r = check_graphable(sizes, spec, std::span<const int>(member));
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.failing_condition, GraphabilityCondition::inter_max);
    EXPECT_EQ(*r.failing_community, 1u);

    spec = {{2, 2, 2, 2, 2, 1}, {2, 2, 2, 2, 2, 0}};
    r = check_graphable(sizes, spec, std::span<const int>(member));
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.failing_condition, GraphabilityCondition::intra_erdos_gallai);
    EXPECT_EQ(*r.failing_community, 1u);
}

TEST(CheckGraphable, SizeMismatchIsValidationError) {
    EXPECT_THROW(check_graphable(CommunitySpec{{3}}, DegreeSpec{{1, 1}, {1, 1}}), ValidationError);
}

// The aggregate inter condition alone would accept two singleton
// communities that both need two inter links.
TEST(CheckGraphable, ExactInterRealization) {
    CommunitySpec sizes{{1, 1}};
    DegreeSpec spec{{2, 2}, {0, 0}};
    std::vector<int> member{0, 1};
    EXPECT_TRUE(inter_graphable({2, 2}));
    auto r = check_graphable(sizes, spec, std::span<const int>(member));
    ASSERT_FALSE(r.ok);
    EXPECT_EQ(*r.failing_condition, GraphabilityCondition::inter_realization);
}

using testgen::random_small_spec;


TEST(CheckGraphable, AgreesWithBruteForceGivenMembership) {
    Rng rng(13);
    int accepted = 0, rejected = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto s = random_small_spec(rng, 8);
        DegreeSpec spec{s.total, s.intra};
        if (spec.intra_sum() % 2 || spec.inter_sum() % 2)
            continue;
        std::vector<int> inter(s.total.size());
        for (std::size_t i = 0; i < inter.size(); ++i)
            inter[i] = s.total[i] - s.intra[i];
        bool truth = oracle::clustered_realizable(s.member, s.intra, inter);
        auto r = check_graphable(CommunitySpec{s.sizes}, spec, std::span<const int>(s.member));
        ASSERT_EQ(r.ok, truth) << r.describe() << " sizes " << ::testing::PrintToString(s.sizes) << " d "
                               << ::testing::PrintToString(s.total) << " e " << ::testing::PrintToString(s.intra);
        (truth ? accepted : rejected)++;
    }
    EXPECT_GT(accepted, 50);
    EXPECT_GT(rejected, 50);
}

// Without a membership the check is a necessary condition: it never rejects
// a spec for which some assignment is realizable.
TEST(CheckGraphable, PreAssignmentNeverRejectsRealizable) {
    Rng rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        auto s = random_small_spec(rng, 6);
        DegreeSpec spec{s.total, s.intra};
        if (spec.intra_sum() % 2 || spec.inter_sum() % 2)
            continue;
        if (oracle::clustered_spec_realizable(s.sizes, s.total, s.intra)) {
            EXPECT_TRUE(check_graphable(CommunitySpec{s.sizes}, spec).ok);
        }
    }
}

TEST(InterRealizable, RespectsSizeLimit) {
    // passes the per-node and aggregate bounds; a1 and a2 both need b1 and
    // c1, which leaves c1 over budget
    std::vector<int> member{0, 0, 1, 2}, inter{2, 2, 3, 1};
    GraphabilityOptions tiny;
    tiny.exact_vertex_limit = 10;
    EXPECT_FALSE(inter_realizable(member, inter, tiny).has_value());
    auto exact = inter_realizable(member, inter);
    ASSERT_TRUE(exact.has_value());
    EXPECT_FALSE(*exact);
}

TEST(InterRealizable, LargeRegularInstance) {
    std::vector<int> member(2000), inter(2000, 7);
    for (int i = 0; i < 2000; ++i)
        member[i] = i % 9;
    auto r = inter_realizable(member, inter);
    ASSERT_TRUE(r.has_value());
    EXPECT_TRUE(*r);
}
