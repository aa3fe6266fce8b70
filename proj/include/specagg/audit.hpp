#pragma once

#include <optional>
#include <span>
#include <vector>

#include "specagg/layout.hpp"

namespace specagg {

// The sharing map written as a matrix: X = G [s; m], where G is the N x K
// transform matrix restricted to the non-zero signal columns, secret columns
// first (sigma order), mask columns after (ascending flat index).  K = N -
// |Z0 ∪ Z1|.  Row-major storage.
struct GeneratorMatrix {
    u32 rows = 0;
    u32 cols = 0;
    u32 secret_cols = 0;  // leading block width
    std::vector<u64> data;

    u64 at(u32 r, u32 c) const { return data[u64(r) * cols + c]; }
};

GeneratorMatrix build_generator(const Scheme& scheme);

// Rank over GF(q) by Gaussian elimination.
u32 rank_gf(std::vector<u64> m, u32 rows, u32 cols, const Field& field);

// True iff rank(G_P) == rank of G_P's mask block: the coalition P then
// learns nothing about the secrets (zero entropy leakage).  P = client ids.
bool rank_condition(const GeneratorMatrix& g, std::span<const u32> coalition, const Field& field);

struct RankAuditReport {
    u64 subsets_checked = 0;
    u64 failures = 0;
    u32 subset_size = 0;
    bool exhaustive = false;
    std::vector<u32> first_failure;  // empty when none
};

// Samples `samples` random subsets of size `subset_size` (or walks all of
// them when exhaustive fits in `samples`); never certifies universality, only
// hunts for counterexamples.
RankAuditReport rank_audit(const Scheme& scheme, u32 subset_size, u64 samples, Rng& rng);

// Walks every subset of size 1..max_size.
RankAuditReport rank_audit_exhaustive(const Scheme& scheme, u32 max_size);

// Searches for the smallest coalition beyond the threshold that breaks the
// rank condition (structured subsets first, then random); reports the first
// failing size found, or nullopt within the size budget.
std::optional<std::pair<u32, std::vector<u32>>> rank_break_search(const Scheme& scheme,
                                                                  u32 from_size, u32 to_size,
                                                                  u64 samples_per_size, Rng& rng);

struct TvReport {
    u64 states_enumerated = 0;  // q^mask_count per secret vector
    double tv_distance = 0.0;
    bool exact_zero = false;
};

// Exact total-variation distance between the coalition's share distributions
// for two fixed secret vectors, by enumerating every mask assignment.
// Requires a tiny instance (q <= 31, mask cells <= 4), else space_too_large.
TvReport empirical_privacy_test(const Scheme& scheme, std::span<const u32> coalition,
                                std::span<const u64> secrets_a, std::span<const u64> secrets_b);

}  // namespace specagg
