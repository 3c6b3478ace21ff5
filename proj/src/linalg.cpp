#include "cubesig/linalg.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "cubesig/errors.hpp"

namespace cubesig {

Matrix Matrix::identity(int k) {
    Matrix m(k, k);
    for (int i = 0; i < k; ++i) m(i, i) = 1.0;
    return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows) throw InvalidDimension("matmul shape mismatch");
    Matrix out(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

double determinant(Matrix a) {
    if (a.rows != a.cols) throw InvalidDimension("determinant requires a square matrix");
    const int k = a.rows;
    double det = 1.0;
    for (int col = 0; col < k; ++col) {
        int pivot = col;
        double best = std::abs(a(col, col));
        for (int r = col + 1; r < k; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (pivot != col) {
            for (int c = col; c < k; ++c) std::swap(a(pivot, c), a(col, c));
            det = -det;
        }
        const double p = a(col, col);
        det *= p;
        for (int r = col + 1; r < k; ++r) {
            const double f = a(r, col) / p;
            if (f == 0.0) continue;
            for (int c = col + 1; c < k; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return det;
}

double submatrix_det(const Matrix& a, const OrderedInjection& row_sel,
                     const OrderedInjection& col_sel) {
    const int k = row_sel.degree();
    if (col_sel.degree() != k) throw InvalidDimension("selection degrees differ");
    Matrix sub(k, k);
    for (int r = 0; r < k; ++r)
        for (int c = 0; c < k; ++c)
            sub(r, c) = a(row_sel(r + 1) - 1, col_sel(c + 1) - 1);
    return determinant(std::move(sub));
}

Matrix compound_matrix(const Matrix& a, int d) {
    if (d < 1 || d > a.rows || d > a.cols)
        throw InvalidDimension("compound order d must satisfy 1 <= d <= min(rows, cols)");
    const auto row_injections = enumerate_injections(d, a.rows);
    const auto col_injections = enumerate_injections(d, a.cols);
    Matrix out(static_cast<int>(row_injections.size()),
               static_cast<int>(col_injections.size()));
    for (std::size_t r = 0; r < row_injections.size(); ++r)
        for (std::size_t c = 0; c < col_injections.size(); ++c)
            out(static_cast<int>(r), static_cast<int>(c)) =
                submatrix_det(a, row_injections[r], col_injections[c]);
    return out;
}

}  // namespace cubesig
