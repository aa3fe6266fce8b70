#pragma once

#include <memory>
#include <vector>

#include "specagg/fft.hpp"
#include "specagg/gf.hpp"

namespace specagg {

// The two signal layouts.  product_code zeroes the leading rows *and*
// columns of the CRT grid, so shares form a 2-D product of Reed-Solomon
// codes; row_code zeroes only the leading rows, giving one RS constraint
// family and a better S/T/D trade-off for large N.
enum class Variant { product_code, row_code };

struct Params {
    Variant variant = Variant::product_code;
    u32 n0 = 0;  // coprime grid factors, n0 < n1, N = n0*n1
    u32 n1 = 0;
    u64 q = 0;  // prime with N | q-1
    Rational alpha, beta, delta0, delta1;  // delta1 ignored for row_code
    u32 peel_iters = 0;                    // 0 -> default n0 + n1

    u32 size() const { return n0 * n1; }
};

// Counts derived from Params.  s/t/d_count come from the floored trade-off
// formulas; zero-row/column counts from the floored region bounds.  The
// secret set is constructed with exactly s_count cells (clamped to the
// region when flooring makes the region smaller), so the implemented count
// always equals the constructed set size.
struct Derived {
    u32 z0_rows = 0;       // zeroed grid rows (capacity of each length-n0 line)
    u32 z1_cols = 0;       // zeroed grid columns (0 for row_code)
    u32 s_count = 0;       // secrets per block
    u32 t_count = 0;       // advertised privacy threshold
    u32 d_count = 0;       // dropout budget
    u32 mask_count = 0;    // random mask cells (includes the proof region)
    u32 free_rank = 0;     // K = N - |Z0 ∪ Z1|
    u32 peel_iters = 0;
};

struct GridIndex {
    u32 a = 0;  // flat mod n0
    u32 b = 0;  // flat mod n1
};

GridIndex crt_encode(u32 flat, const Params& p);
u32 crt_decode(u32 a, u32 b, const Params& p);

// Index sets over flat indices [0, N).  `secrets` is ordered by the secret
// bijection sigma (grid row-major: a ascending, then b); the other sets are
// sorted ascending.  `proof` is the privacy-proof region; its cells carry
// random masks at runtime, exactly like `free_masks`.
struct IndexSets {
    enum class Kind : u8 { zero, secret, mask };

    std::vector<u32> z0;          // zero-row cells
    std::vector<u32> z1;          // zero-column cells (empty for row_code)
    std::vector<u32> secrets;     // sigma order
    std::vector<u32> proof;       // T region
    std::vector<u32> free_masks;  // everything else

    std::vector<Kind> kind;  // size N lookup

    void finalize(u32 n);  // fills `kind`, checks the disjointness invariants
    std::vector<u32> mask_cells() const;  // proof ∪ free_masks, sorted
};

Derived derive(const Params& p);
IndexSets build_sets(const Params& p, const Derived& d);

// Working context bundling the validated parameters, field, transform plan
// and index sets.  Immutable after construction; cheap to copy (the field
// lives behind a shared_ptr so the plan's reference stays valid).
class Scheme {
public:
    static Scheme build(const Params& p);
    // Same, but with caller-supplied sets (test fixtures that pin a figure's
    // exact secret placement).  Derived counts are recomputed from the sets.
    static Scheme with_sets(const Params& p, IndexSets sets);

    const Params& params() const { return params_; }
    const Derived& derived() const { return derived_; }
    const Field& field() const { return *field_; }
    const DftPlan& plan() const { return plan_; }
    const IndexSets& sets() const { return sets_; }
    u32 size() const { return params_.size(); }

private:
    Scheme(Params p, Derived d, std::shared_ptr<const Field> f, IndexSets s);

    Params params_;
    Derived derived_;
    std::shared_ptr<const Field> field_;
    DftPlan plan_;
    IndexSets sets_;
};

// Factor helpers for deriving a grid from a bare N.
// product_code: the coprime divisor pair closest to balanced (n0 ~ sqrt N).
// row_code: n0 closest to max(4, ceil(c*log2 N)) among coprime divisors.
std::pair<u32, u32> balanced_factors(u64 n);
std::pair<u32, u32> rowcode_factors(u64 n, double c = 1.0);

}  // namespace specagg
