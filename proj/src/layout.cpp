#include "specagg/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace specagg {

GridIndex crt_encode(u32 flat, const Params& p) {
    if (flat >= p.size()) fail(Err::out_of_range, "crt_encode: index out of range");
    return GridIndex{flat % p.n0, flat % p.n1};
}

u32 crt_decode(u32 a, u32 b, const Params& p) {
    if (a >= p.n0 || b >= p.n1) fail(Err::out_of_range, "crt_decode: grid coordinate out of range");
    u64 n = p.size();
    u64 inv_n1 = 0, inv_n0 = 0;
    for (u64 t = 0; t < p.n0; ++t)
        if (t * p.n1 % p.n0 == 1) inv_n1 = t;
    for (u64 t = 0; t < p.n1; ++t)
        if (t * p.n0 % p.n1 == 1) inv_n0 = t;
    return u32((u64(a) * p.n1 % n * inv_n1 + u64(b) * p.n0 % n * inv_n0) % n);
}

namespace {

void check_ranges(const Params& p) {
    if (p.n0 < 2 || p.n1 < 2 || p.n0 >= p.n1 || std::gcd(p.n0, p.n1) != 1)
        fail(Err::degenerate_params, "params: need coprime factors 2 <= n0 < n1");
    Rational zero(0, 1), one(1, 1), half(1, 2);
    auto open_unit = [&](const Rational& r, const char* name) {
        if (!(zero < r) || !(r < one))
            fail(Err::degenerate_params, std::string("params: ") + name + " must lie in (0,1)");
    };
    open_unit(p.alpha, "alpha");
    open_unit(p.delta0, "delta0");
    if (p.variant == Variant::product_code) {
        open_unit(p.delta1, "delta1");
        if (!(zero < p.beta) || !(p.beta < half))
            fail(Err::degenerate_params, "params: beta must lie in (0,1/2) for the product layout");
    } else {
        open_unit(p.beta, "beta");
        if (p.n0 < 4) fail(Err::degenerate_params, "params: row layout needs n0 >= 4");
    }
    if (p.q != 0 && (p.q - 1) % p.size() != 0)
        fail(Err::degenerate_params, "params: N does not divide q-1");
}

struct Regions {
    u32 z0, z1;          // zero rows / columns
    u32 a1;              // first secret row; proof rows are [z0, a1)
    u32 b_lo, b_hi;      // secret columns [b_lo, b_hi] inclusive
    u32 tb_lo, tb_hi;    // proof columns [tb_lo, tb_hi] inclusive
};

Regions regions_for(const Params& p) {
    Rational one(1, 1);
    Regions r{};
    r.z0 = u32(p.delta0.floor_scaled(p.n0));
    if (p.variant == Variant::product_code) {
        r.z1 = u32(p.delta1.floor_scaled(p.n1));
        Rational rest0 = (one - p.delta0);
        Rational rest1 = (one - p.delta1);
        r.a1 = u32((p.delta0 + p.alpha * rest0).floor_scaled(p.n0));
        r.b_lo = u32((p.delta1 + p.beta * rest1).floor_scaled(p.n1));
        r.b_hi = u32((p.delta1 + (one - p.beta) * rest1).floor_scaled(p.n1));
        r.tb_lo = r.b_hi;
        r.tb_hi = p.n1 - 1;
    } else {
        r.z1 = 0;
        r.a1 = u32((p.delta0 + p.alpha * (one - p.delta0)).floor_scaled(p.n0));
        r.b_lo = 0;
        r.b_hi = u32((one - p.beta).floor_scaled(p.n1));
        r.tb_lo = r.b_hi;
        r.tb_hi = p.n1 - 1;
    }
    return r;
}

u32 derive_d_count(const Params& p) {
    Rational one(1, 1);
    std::int64_t v;
    if (p.variant == Variant::product_code) {
        Rational keep = (one - p.delta0) * (one - p.delta1);
        v = ((one - keep) * Rational(1, 2)).floor_scaled(p.size());
    } else {
        v = p.delta0.floor_scaled(p.size());
    }
    return u32(std::max<std::int64_t>(v, 0));
}

}  // namespace

Derived derive(const Params& p) {
    check_ranges(p);
    Rational one(1, 1);
    u32 n = p.size();
    Derived d{};
    Regions r = regions_for(p);
    d.z0_rows = r.z0;
    d.z1_cols = r.z1;

    std::int64_t s_formula, t_formula;
    if (p.variant == Variant::product_code) {
        Rational keep = (one - p.delta0) * (one - p.delta1);
        s_formula = ((one - p.alpha) * (one - p.beta - p.beta) * keep).floor_scaled(n);
        t_formula = (p.alpha * p.beta * keep).floor_scaled(n);
    } else {
        Rational keep = one - p.delta0;
        s_formula = ((one - p.alpha) * (one - p.beta) * keep).floor_scaled(n);
        t_formula = (p.alpha * p.beta * keep).floor_scaled(n);
    }

    if (r.z0 == 0) fail(Err::degenerate_params, "params: zero-row set is empty");
    if (p.variant == Variant::product_code && r.z1 == 0)
        fail(Err::degenerate_params, "params: zero-column set is empty");
    if (r.a1 >= p.n0 || r.b_lo > r.b_hi)
        fail(Err::degenerate_params, "params: secret region is empty");
    if (r.a1 <= r.z0 || r.tb_lo > r.tb_hi)
        fail(Err::degenerate_params, "params: proof region is empty");

    u64 region = u64(p.n0 - r.a1) * (r.b_hi - r.b_lo + 1);
    // Flooring can only be off by a cell or two between the formula and the
    // constructed region; the set is authoritative, so clamp.
    d.s_count = u32(std::min<u64>(u64(std::max<std::int64_t>(s_formula, 0)), region));
    if (d.s_count == 0) fail(Err::degenerate_params, "params: S_count is zero");
    d.t_count = u32(std::max<std::int64_t>(t_formula, 0));
    d.d_count = derive_d_count(p);

    u64 zero_cells = u64(r.z0) * p.n1 + u64(r.z1) * p.n0 - u64(r.z0) * r.z1;
    d.free_rank = u32(n - zero_cells);
    d.mask_count = d.free_rank - d.s_count;
    d.peel_iters = p.peel_iters ? p.peel_iters : p.n0 + p.n1;
    return d;
}

IndexSets build_sets(const Params& p, const Derived& d) {
    u32 n = p.size();
    Regions r = regions_for(p);
    IndexSets s;
    for (u32 a = 0; a < r.z0; ++a)
        for (u32 b = 0; b < p.n1; ++b) s.z0.push_back(crt_decode(a, b, p));
    for (u32 b = 0; b < r.z1; ++b)
        for (u32 a = 0; a < p.n0; ++a) s.z1.push_back(crt_decode(a, b, p));
    std::sort(s.z0.begin(), s.z0.end());
    std::sort(s.z1.begin(), s.z1.end());

    // secrets: first s_count region cells in sigma (row-major) order
    for (u32 a = r.a1; a < p.n0 && s.secrets.size() < d.s_count; ++a)
        for (u32 b = r.b_lo; b <= r.b_hi && s.secrets.size() < d.s_count; ++b)
            s.secrets.push_back(crt_decode(a, b, p));

    for (u32 a = r.z0; a < r.a1; ++a)
        for (u32 b = r.tb_lo; b <= r.tb_hi; ++b) s.proof.push_back(crt_decode(a, b, p));
    std::sort(s.proof.begin(), s.proof.end());
    s.finalize(n);
    return s;
}

void IndexSets::finalize(u32 n) {
    kind.assign(n, Kind::mask);
    std::vector<u8> seen(n, 0);
    auto mark = [&](const std::vector<u32>& cells, Kind k, bool allow_zero_overlap) {
        for (u32 f : cells) {
            if (f >= n) fail(Err::out_of_range, "index sets: flat index out of range");
            if (seen[f] && !(allow_zero_overlap && kind[f] == Kind::zero && k == Kind::zero))
                fail(Err::degenerate_params, "index sets: sets are not disjoint");
            seen[f] = 1;
            kind[f] = k;
        }
    };
    mark(z0, Kind::zero, true);
    mark(z1, Kind::zero, true);  // Z0 ∩ Z1 (the corner block) is legitimate
    mark(secrets, Kind::secret, false);
    mark(proof, Kind::mask, false);
    free_masks.clear();
    for (u32 f = 0; f < n; ++f)
        if (!seen[f]) free_masks.push_back(f);
}

std::vector<u32> IndexSets::mask_cells() const {
    std::vector<u32> out;
    out.reserve(proof.size() + free_masks.size());
    out.insert(out.end(), proof.begin(), proof.end());
    out.insert(out.end(), free_masks.begin(), free_masks.end());
    std::sort(out.begin(), out.end());
    return out;
}

Scheme::Scheme(Params p, Derived d, std::shared_ptr<const Field> f, IndexSets s)
    : params_(std::move(p)),
      derived_(d),
      field_(std::move(f)),
      plan_(*field_, params_.n0, params_.n1),
      sets_(std::move(s)) {}

Scheme Scheme::build(const Params& p) {
    Derived d = derive(p);
    auto field = std::make_shared<const Field>(p.q, p.size());
    IndexSets sets = build_sets(p, d);
    return Scheme(p, d, std::move(field), std::move(sets));
}

Scheme Scheme::with_sets(const Params& p, IndexSets sets) {
    check_ranges(p);
    u32 n = p.size();
    sets.finalize(n);
    if (sets.secrets.empty()) fail(Err::degenerate_params, "params: fixture has no secrets");

    // The parity structure needs the zeros on the *leading* grid rows and
    // columns, so a fixture's z0/z1 must be exactly the cells with
    // a < z0_rows and b < z1_cols.
    Derived d{};
    if (sets.z0.size() % p.n1 != 0 || (p.variant == Variant::product_code && sets.z1.size() % p.n0 != 0))
        fail(Err::degenerate_params, "fixture: z0/z1 are not whole rows/columns");
    d.z0_rows = u32(sets.z0.size() / p.n1);
    d.z1_cols = u32(sets.z1.size() / p.n0);
    for (u32 f : sets.z0)
        if (f % p.n0 >= d.z0_rows) fail(Err::degenerate_params, "fixture: z0 is not the leading rows");
    for (u32 f : sets.z1)
        if (f % p.n1 >= d.z1_cols) fail(Err::degenerate_params, "fixture: z1 is not the leading columns");
    if (d.z0_rows == 0) fail(Err::degenerate_params, "fixture: no zero rows");

    d.s_count = u32(sets.secrets.size());
    d.t_count = u32(sets.proof.size());
    d.d_count = derive_d_count(p);
    std::vector<u8> zeroed(n, 0);
    for (u32 f : sets.z0) zeroed[f] = 1;
    for (u32 f : sets.z1) zeroed[f] = 1;
    u32 zc = u32(std::count(zeroed.begin(), zeroed.end(), u8(1)));
    d.free_rank = n - zc;
    d.mask_count = d.free_rank - d.s_count;
    d.peel_iters = p.peel_iters ? p.peel_iters : p.n0 + p.n1;
    auto field = std::make_shared<const Field>(p.q, n);
    return Scheme(p, d, std::move(field), std::move(sets));
}

namespace {

std::vector<u64> divisors_of(u64 n) {
    std::vector<u64> out;
    for (u64 d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            if (d != n / d) out.push_back(n / d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::pair<u32, u32> balanced_factors(u64 n) {
    u64 best = 0;
    for (u64 d : divisors_of(n)) {
        u64 other = n / d;
        if (d < 2 || other < 2 || d >= other) continue;
        if (std::gcd(d, other) != 1) continue;
        if (best == 0 || double(other) / double(d) < double(n / best) / double(best)) best = d;
    }
    if (best == 0) fail(Err::degenerate_params, "no coprime factorization n0*n1 with 2 <= n0 < n1");
    return {u32(best), u32(n / best)};
}

std::pair<u32, u32> rowcode_factors(u64 n, double c) {
    u64 target = std::max<u64>(4, u64(std::ceil(c * std::log2(double(n)))));
    u64 best = 0;
    for (u64 d : divisors_of(n)) {
        u64 other = n / d;
        if (d < 4 || other <= d) continue;
        if (std::gcd(d, other) != 1) continue;
        auto dist = [&](u64 x) { return x > target ? x - target : target - x; };
        if (best == 0 || dist(d) < dist(best)) best = d;
    }
    if (best == 0)
        fail(Err::degenerate_params, "no coprime factorization with n0 >= 4 for the row layout");
    return {u32(best), u32(n / best)};
}

}  // namespace specagg
