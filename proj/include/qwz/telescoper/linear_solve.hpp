#pragma once

#include <vector>

#include "qwz/exact/ratfun.hpp"

namespace qwz {

using PolyMatrix = std::vector<std::vector<MultiPoly>>;

struct EchelonForm {
    PolyMatrix rows;            // fraction-free row echelon form
    std::vector<int> pivots;    // pivot column per nonzero row
    int cols = 0;
};

// fraction-free (Bareiss) elimination; every division is exact
inline EchelonForm bareiss_echelon(PolyMatrix m, int cols) {
    EchelonForm e;
    e.cols = cols;
    const int nrows = static_cast<int>(m.size());
    MultiPoly prev(1);
    int r = 0;
    for (int col = 0; col < cols && r < nrows; ++col) {
        int best = -1;
        std::size_t best_size = 0;
        for (int i = r; i < nrows; ++i)
            if (!m[i][col].is_zero() && (best < 0 || m[i][col].terms().size() < best_size)) {
                best = i;
                best_size = m[i][col].terms().size();
            }
        if (best < 0) continue;
        std::swap(m[r], m[best]);
        const MultiPoly& piv = m[r][col];
        for (int i = r + 1; i < nrows; ++i) {
            const MultiPoly lead = m[i][col];
            for (int j = col + 1; j < cols; ++j) {
                MultiPoly v = piv * m[i][j];
                if (!lead.is_zero()) v = v - lead * m[r][j];
                if (prev == MultiPoly(1)) {
                    m[i][j] = std::move(v);
                } else {
                    auto d = exact_divide(v, prev);
                    if (!d) fail(ErrorKind::InvalidArgument, "Bareiss division not exact");
                    m[i][j] = std::move(*d);
                }
            }
            m[i][col] = MultiPoly();
        }
        prev = m[r][col];
        e.pivots.push_back(col);
        ++r;
    }
    m.resize(r);
    e.rows = std::move(m);
    return e;
}

inline int matrix_rank(const PolyMatrix& m, int cols) { return static_cast<int>(bareiss_echelon(m, cols).pivots.size()); }

// basis of the right nullspace over the fraction field, one vector per free column
inline std::vector<std::vector<RationalFunction>> nullspace(const EchelonForm& e) {
    std::vector<bool> is_pivot(e.cols, false);
    for (int c : e.pivots) is_pivot[c] = true;
    std::vector<std::vector<RationalFunction>> basis;
    for (int free = 0; free < e.cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<RationalFunction> x(e.cols, RationalFunction(0));
        x[free] = RationalFunction(1);
        for (int r = static_cast<int>(e.pivots.size()) - 1; r >= 0; --r) {
            int pc = e.pivots[r];
            RationalFunction s(0);
            for (int j = pc + 1; j < e.cols; ++j)
                if (!e.rows[r][j].is_zero() && !x[j].is_zero()) s += RationalFunction(e.rows[r][j]) * x[j];
            x[pc] = -s / RationalFunction(e.rows[r][pc]);
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

}  // namespace qwz
