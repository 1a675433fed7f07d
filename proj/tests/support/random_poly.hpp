#pragma once

#include <random>

#include "qwz/exact/ratfun.hpp"

namespace qwz::fixtures {

inline MultiPoly random_poly(std::mt19937& rng, int max_terms = 4, int max_deg = 3) {
    std::uniform_int_distribution<int> nt(1, max_terms), deg(0, max_deg), coef(-6, 6);
    std::vector<MultiPoly::Term> ts;
    int n = nt(rng);
    for (int i = 0; i < n; ++i) {
        int c = coef(rng);
        if (c == 0) c = 1;
        ts.push_back({{deg(rng), deg(rng), deg(rng) / 2}, Rational(c)});
    }
    return MultiPoly::from_terms(ts);
}

inline Rational random_rational(std::mt19937& rng, int lo = -9, int hi = 9) {
    std::uniform_int_distribution<int> a(lo, hi), b(1, 9);
    Rational r(a(rng), b(rng));
    r.canonicalize();
    return r;
}

}  // namespace qwz::fixtures
