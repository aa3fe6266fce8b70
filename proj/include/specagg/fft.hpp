#pragma once

#include <vector>

#include "specagg/gf.hpp"

namespace specagg {

// Transform plan for length N = n0*n1 with gcd(n0,n1) = 1 over a prime field
// holding a primitive N-th root of unity.  The forward transform computes
//
//   X_j = sum_i omega^{ij} x_i
//
// via the Good-Thomas prime-factor decomposition: indices are mapped onto an
// n0 x n1 grid by the CRT (a = j mod n0, b = j mod n1), rows and columns are
// transformed with roots omega^{e1} and omega^{e0} where e_i are the CRT
// idempotents, and the output is read back through the same CRT map.  Each
// 1-D kernel is mixed-radix Cooley-Tukey over the prime factorization of its
// length; a prime factor p costs O(p) per output, so non-smooth lengths
// degrade to O(n_i^2) per line (documented; the scheme's desk-scale sizes
// keep n_i small or smooth).
class DftPlan {
public:
    DftPlan(const Field& field, u32 n0, u32 n1);

    const Field& field() const { return *field_; }
    u32 n0() const { return n0_; }
    u32 n1() const { return n1_; }
    u32 size() const { return n_; }

    // CRT index maps: flat <-> (a, b) with a = flat mod n0, b = flat mod n1.
    u32 crt_flat(u32 a, u32 b) const { return grid_to_flat_[u64(a) * n1_ + b]; }

    std::vector<u64> dft(const std::vector<u64>& x) const;
    std::vector<u64> idft(const std::vector<u64>& X) const;

private:
    const Field* field_;
    u32 n0_, n1_, n_;
    std::vector<u32> grid_to_flat_;      // (a,b) -> flat
    std::vector<u64> row_root_, col_root_;        // powers of omega^{e1}, omega^{e0}
    std::vector<u64> row_root_inv_, col_root_inv_;
    std::vector<u32> row_factors_, col_factors_;  // prime factorizations of n1, n0
};

// Aliasing identity check, used by tests: subsampling x with
// period n (keeping x_0, x_n, x_{2n}, ...) must have an (N/n)-point spectrum
// equal to 1/n times the stride-(N/n) sums of X.  Requires n | N.
bool subsample_alias_check(const std::vector<u64>& x, u32 n, const DftPlan& plan);

}  // namespace specagg
