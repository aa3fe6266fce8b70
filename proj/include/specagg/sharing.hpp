#pragma once

#include <optional>
#include <span>
#include <vector>

#include "specagg/layout.hpp"

namespace specagg {

// Length-N share vector (the spectrum of the layout signal), with an
// explicit erasure mask.  Erased positions hold 0 and must never be read as
// values.
struct Shares {
    std::vector<u64> values;
    std::vector<u8> erased;  // same length; nonzero = missing

    u32 size() const { return u32(values.size()); }
    u32 erased_count() const;
    bool any_erased() const { return erased_count() != 0; }

    static Shares full(std::vector<u64> v);
    // Assemble from (client id, value) pairs; ids must be distinct and in
    // range. Positions without a pair are erased.
    static Shares from_pairs(std::span<const std::pair<u32, u64>> pairs, u32 n);
};

// Shares a block of at most s_count secrets: secrets (zero-padded) go to the
// secret cells via sigma, zeros to the zero rows/columns, fresh independent
// masks everywhere else, then the forward transform.  Two calls with the
// same secrets give different share vectors but reconstruct identically.
Shares share(std::span<const u64> secrets, const Scheme& scheme, Rng& rng);

// Test hook: identical, but mask cells take the given values (mask order =
// ascending flat index over IndexSets::mask_cells()).
Shares share_with_masks(std::span<const u64> secrets, const Scheme& scheme,
                        std::span<const u64> masks);

// Checks every aliasing parity constraint on a complete share vector: for
// each line family i (both grid axes for the product layout, axis 0 only for
// the row layout), for every offset c and every v < z_i,
//
//   sum_u omega^{-u*v*N/n_i} * X[u*N/n_i + c] == 0.
//
// Honest shares always pass; a uniformly random vector fails with
// overwhelming probability.
bool parity_check(const Shares& shares, const Scheme& scheme);

// Erasure decoding of one Reed-Solomon line. `row` holds the line values
// (erased entries flagged), `points` the evaluation points, `dim` the code
// dimension. Known values beyond the first `dim` act as a consistency check;
// a mismatch means the input is not a codeword (inconsistent_line).
struct LineSymbol {
    u64 value = 0;
    bool erased = false;
};
std::vector<u64> rs_erasure_decode(std::span<const LineSymbol> row, std::span<const u64> points,
                                   u32 dim, const Field& field);

// Peeling reconstruction: repeatedly decodes any line whose erasure count is
// within its capacity (z0 for axis-0 lines, z1 for axis-1), alternating full
// passes over the two families, for at most peel_iters iterations or until a
// pass makes no progress.  On full recovery returns the secrets (inverse
// transform restricted to sigma(S)); otherwise nullopt.
std::optional<std::vector<u64>> reconstruct(const Shares& shares, const Scheme& scheme);

// Recover the complete share vector (peeling only, no inverse transform).
// Exposed for benchmarks and the protocol server.
std::optional<std::vector<u64>> recover_shares(const Shares& shares, const Scheme& scheme);

}  // namespace specagg
