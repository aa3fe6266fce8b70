#pragma once

#include <optional>
#include <span>
#include <vector>

#include "specagg/gf.hpp"
#include "specagg/sharing.hpp"

namespace specagg {

// Multi-secret Shamir baseline: one degree-(S+T-1) polynomial whose first S
// coefficients are the secrets and next T are uniform masks, evaluated at N
// distinct nonzero points.  Any S+T shares reconstruct; fewer reveal nothing
// about the secrets.  Kept deliberately naive (O(n^2) interpolation) -- it is
// the practical baseline the spectral scheme is benchmarked against.
struct ShamirParams {
    u32 n = 0;        // number of shares
    u32 s_count = 0;  // secrets
    u32 t_count = 0;  // masks / privacy threshold
    u64 q = 0;        // prime, q > n so 1..n are distinct nonzero points
    std::vector<u64> eval_points;  // empty -> defaults to 1..n

    void validate() const;
    std::vector<u64> points() const;
};

Shares shamir_share(std::span<const u64> secrets, const ShamirParams& p, Rng& rng);

// Interpolates from any s_count+t_count present shares; nullopt when fewer
// are present. All present shares are used only through the first
// s_count+t_count in index order (the rest are redundant for the baseline).
std::optional<std::vector<u64>> shamir_recon(const Shares& shares, const ShamirParams& p);

}  // namespace specagg
