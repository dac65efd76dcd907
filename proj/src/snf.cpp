#include "quadrank/snf.hpp"

#include "quadrank/errors.hpp"

namespace quadrank {

namespace {

IntMatrix identity(std::size_t n) {
    IntMatrix I(n, std::vector<i128>(n, 0));
    for (std::size_t i = 0; i < n; ++i) I[i][i] = 1;
    return I;
}

}  // namespace

SmithForm smith_normal_form(IntMatrix A) {
    const std::size_t n = A.size();
    for (const auto& row : A) require(row.size() == n, "smith_normal_form: matrix must be square");
    SmithForm out{{}, identity(n), identity(n)};
    auto& V = out.V;
    auto& Vi = out.V_inverse;

    // Column operations are mirrored on V (columns) and V^-1 (rows).
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t r = 0; r < n; ++r) {
            std::swap(A[r][i], A[r][j]);
            std::swap(V[r][i], V[r][j]);
        }
        std::swap(Vi[i], Vi[j]);
    };
    // col_j -= q * col_k
    auto sub_col = [&](std::size_t j, std::size_t k, i128 q) {
        if (q == 0) return;
        for (std::size_t r = 0; r < n; ++r) {
            A[r][j] -= q * A[r][k];
            V[r][j] -= q * V[r][k];
        }
        for (std::size_t c = 0; c < n; ++c) Vi[k][c] += q * Vi[j][c];
    };
    auto negate_col = [&](std::size_t k) {
        for (std::size_t r = 0; r < n; ++r) {
            A[r][k] = -A[r][k];
            V[r][k] = -V[r][k];
        }
        for (auto& x : Vi[k]) x = -x;
    };

    for (std::size_t k = 0; k < n; ++k) {
        while (true) {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            std::size_t pi = n, pj = n;
            for (std::size_t i = k; i < n; ++i) {
                for (std::size_t j = k; j < n; ++j) {
                    if (A[i][j] != 0 && (pi == n || nt::abs(A[i][j]) < nt::abs(A[pi][pj]))) {
                        pi = i;
                        pj = j;
                    }
                }
            }
            if (pi == n) throw precondition_error("smith_normal_form: matrix is singular");
            std::swap(A[k], A[pi]);
            swap_cols(k, pj);

            bool clean = true;
            for (std::size_t i = k + 1; i < n; ++i) {
                i128 q = A[i][k] / A[k][k];
                if (q != 0)
                    for (std::size_t c = k; c < n; ++c) A[i][c] -= q * A[k][c];
                if (A[i][k] != 0) clean = false;
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                sub_col(j, k, A[k][j] / A[k][k]);
                if (A[k][j] != 0) clean = false;
            }
            if (!clean) continue;

            // Divisibility: fold an offending row into row k and retry.
            bool divides = true;
            for (std::size_t i = k + 1; i < n && divides; ++i) {
                for (std::size_t j = k + 1; j < n; ++j) {
                    if (A[i][j] % A[k][k] != 0) {
                        for (std::size_t c = k; c < n; ++c) A[k][c] += A[i][c];
                        divides = false;
                        break;
                    }
                }
            }
            if (divides) break;
        }
        if (A[k][k] < 0) negate_col(k);
        out.diagonal.push_back(A[k][k]);
    }
    return out;
}

}  // namespace quadrank
