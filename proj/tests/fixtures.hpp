#pragma once

#include "specagg/layout.hpp"

namespace specagg::fixtures {

// 5x6 grid over GF(31): one zero row, one zero column, four secret cells.
inline Params n30_params() {
    Params p;
    p.variant = Variant::product_code;
    p.n0 = 5;
    p.n1 = 6;
    p.q = 31;
    p.alpha = rat(1, 2);
    p.beta = rat(1, 4);
    p.delta0 = rat(1, 5);
    p.delta1 = rat(1, 6);
    return p;
}

// the figure-accurate variant: exactly 4 secrets, proof region as drawn
inline Scheme n30_scheme_s4() {
    Params p = n30_params();
    Derived d = derive(p);
    IndexSets sets = build_sets(p, d);
    sets.secrets.resize(4);
    sets.free_masks.clear();
    return Scheme::with_sets(p, std::move(sets));
}

// 10x13 grid over GF(131), product layout, the standard worked example:
// S = 26, T = 13, D = 12.
inline Params n130_params() {
    Params p;
    p.variant = Variant::product_code;
    p.n0 = 10;
    p.n1 = 13;
    p.q = 131;
    p.alpha = rat(1, 2);
    p.beta = rat(1, 4);
    p.delta0 = rat(1, 10);
    p.delta1 = rat(1, 10);
    return p;
}

// same grid, row layout: S = T = 29, D = 13.
inline Params n130_row_params() {
    Params p;
    p.variant = Variant::row_code;
    p.n0 = 10;
    p.n1 = 13;
    p.q = 131;
    p.alpha = rat(1, 2);
    p.beta = rat(1, 2);
    p.delta0 = rat(1, 10);
    p.delta1 = rat(0, 1);
    return p;
}

// 2x5 grid over GF(11) with a single secret cell and three mask cells; the
// mask space (11^3) is small enough to enumerate exactly.  The proof set is
// the three mask cells: the rank audit certifies privacy for |P| <= 3
// exhaustively on this instance.
inline Scheme tiny_scheme() {
    Params p;
    p.variant = Variant::product_code;
    p.n0 = 2;
    p.n1 = 5;
    p.q = 11;
    p.alpha = rat(1, 2);
    p.beta = rat(1, 4);
    p.delta0 = rat(1, 2);
    p.delta1 = rat(1, 5);
    IndexSets sets;
    sets.z0 = {0, 2, 4, 6, 8};  // grid row a = 0
    sets.z1 = {0, 5};           // grid column b = 0
    sets.secrets = {1};         // cell (a,b) = (1,1)
    sets.proof = {3, 7, 9};     // cells (1,3), (1,2), (1,4)
    return Scheme::with_sets(p, std::move(sets));
}

}  // namespace specagg::fixtures
