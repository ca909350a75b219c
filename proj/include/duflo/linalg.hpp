#pragma once

#include <optional>
#include <vector>

#include "duflo/errors.hpp"
#include "duflo/rational.hpp"

namespace duflo {

/// Dense matrix over exact rationals, row-major.
struct QMatrix {
    int rows = 0, cols = 0;
    std::vector<Scalar> data;

    QMatrix() = default;
    QMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, Scalar(0)) {}

    Scalar& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    const Scalar& at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    static QMatrix identity(int n) {
        QMatrix m(n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }
};

/// Reduced row echelon form of A, optionally with the accumulated left
/// transform M (so that R = M A). Pivoting is deterministic: first nonzero
/// entry in column order.
struct Eliminated {
    QMatrix R;
    QMatrix M;
    bool has_transform = false;
    std::vector<int> pivot_cols;

    int rank() const { return static_cast<int>(pivot_cols.size()); }

    /// Applies the recorded transform to a fresh right-hand side.
    std::vector<Scalar> transform(const std::vector<Scalar>& b) const {
        std::vector<Scalar> y(static_cast<std::size_t>(M.rows), Scalar(0));
        for (int r = 0; r < M.rows; ++r) {
            Scalar acc = 0;
            for (int c = 0; c < M.cols; ++c) {
                const Scalar& m = M.at(r, c);
                if (m != 0 && b[static_cast<std::size_t>(c)] != 0) acc += m * b[static_cast<std::size_t>(c)];
            }
            y[static_cast<std::size_t>(r)] = acc;
        }
        return y;
    }

    /// Solves A x = b using the recorded transform; nullopt if inconsistent.
    /// Free variables are set to zero.
    std::optional<std::vector<Scalar>> solve(const std::vector<Scalar>& b) const {
        std::vector<Scalar> y = transform(b);
        const int r = rank();
        for (int i = r; i < R.rows; ++i)
            if (y[static_cast<std::size_t>(i)] != 0) return std::nullopt;
        std::vector<Scalar> x(static_cast<std::size_t>(R.cols), Scalar(0));
        // R is in RREF; zeroing free variables leaves x[pivot] = y[row].
        for (int i = 0; i < r; ++i) x[static_cast<std::size_t>(pivot_cols[i])] = y[static_cast<std::size_t>(i)];
        return x;
    }

    /// Residual coordinates of b in the cokernel (rows past the rank after
    /// the transform); empty residual means b lies in the column space.
    std::vector<Scalar> residual(const std::vector<Scalar>& b) const {
        std::vector<Scalar> y = transform(b);
        return std::vector<Scalar>(y.begin() + rank(), y.end());
    }
};

inline Eliminated row_reduce(QMatrix a, bool track_transform = false) {
    Eliminated e;
    e.has_transform = track_transform;
    if (track_transform) e.M = QMatrix::identity(a.rows);
    int row = 0;
    for (int col = 0; col < a.cols && row < a.rows; ++col) {
        int pivot = -1;
        for (int r = row; r < a.rows; ++r)
            if (a.at(r, col) != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != row) {
            for (int c = 0; c < a.cols; ++c) std::swap(a.at(pivot, c), a.at(row, c));
            if (track_transform)
                for (int c = 0; c < e.M.cols; ++c) std::swap(e.M.at(pivot, c), e.M.at(row, c));
        }
        const Scalar inv = Scalar(1) / a.at(row, col);
        if (inv != 1) {
            for (int c = 0; c < a.cols; ++c)
                if (a.at(row, c) != 0) a.at(row, c) *= inv;
            if (track_transform)
                for (int c = 0; c < e.M.cols; ++c)
                    if (e.M.at(row, c) != 0) e.M.at(row, c) *= inv;
        }
        for (int r = 0; r < a.rows; ++r) {
            if (r == row) continue;
            const Scalar factor = a.at(r, col);
            if (factor == 0) continue;
            for (int c = 0; c < a.cols; ++c) {
                const Scalar& src = a.at(row, c);
                if (src != 0) a.at(r, c) -= factor * src;
            }
            if (track_transform)
                for (int c = 0; c < e.M.cols; ++c) {
                    const Scalar& src = e.M.at(row, c);
                    if (src != 0) e.M.at(r, c) -= factor * src;
                }
        }
        e.pivot_cols.push_back(col);
        ++row;
    }
    e.R = std::move(a);
    return e;
}

inline int rank(const QMatrix& a) { return row_reduce(a).rank(); }

/// Nullspace basis in deterministic order (one vector per free column,
/// ascending).
inline std::vector<std::vector<Scalar>> nullspace(const Eliminated& e) {
    std::vector<std::vector<Scalar>> basis;
    std::vector<bool> is_pivot(static_cast<std::size_t>(e.R.cols), false);
    for (int c : e.pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;
    for (int free = 0; free < e.R.cols; ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        std::vector<Scalar> v(static_cast<std::size_t>(e.R.cols), Scalar(0));
        v[static_cast<std::size_t>(free)] = 1;
        for (int r = 0; r < e.rank(); ++r)
            v[static_cast<std::size_t>(e.pivot_cols[r])] = -e.R.at(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// In-place reduction of a vector against the rows of an RREF matrix
/// (interpreted as spanning vectors); used for quotient representatives.
inline void reduce_against_rref_rows(const Eliminated& e, std::vector<Scalar>& v) {
    for (int r = 0; r < e.rank(); ++r) {
        const Scalar factor = v[static_cast<std::size_t>(e.pivot_cols[r])];
        if (factor == 0) continue;
        for (int c = 0; c < e.R.cols; ++c) {
            const Scalar& src = e.R.at(r, c);
            if (src != 0) v[static_cast<std::size_t>(c)] -= factor * src;
        }
    }
}

} // namespace duflo
