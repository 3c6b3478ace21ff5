#pragma once

#include <vector>

#include "cubesig/indices.hpp"

namespace cubesig {

/// Dense row-major matrix, just big enough for the minor and compound
/// computations this library needs.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const {
        return data[static_cast<std::size_t>(r) * cols + c];
    }

    static Matrix identity(int k);
};

Matrix matmul(const Matrix& a, const Matrix& b);

// Determinant by LU with partial pivoting; input by value.
double determinant(Matrix a);

// det of the square submatrix with rows/cols selected by 1-based injections.
double submatrix_det(const Matrix& a, const OrderedInjection& row_sel,
                     const OrderedInjection& col_sel);

// d-th compound of an n'xn matrix: entry (P', P) is the minor with rows
// P'(.) and columns P(.); rows/cols ordered by enumerate_injections.
Matrix compound_matrix(const Matrix& a, int d);

}  // namespace cubesig
