#pragma once

// Dense vectors and matrices. Sizes in this library are small (the corpus
// problems have n <= 8), so storage is plain row-major std::vector.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace newton {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);
bool all_finite(std::span<const double> a);

Vector add(const Vector& a, const Vector& b);
Vector subtract(const Vector& a, const Vector& b);
Vector scaled(double alpha, const Vector& a);
// y + alpha * x
Vector axpy(double alpha, const Vector& x, const Vector& y);
Vector negated(const Vector& a);

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix diagonal(const Vector& d);
    static DenseMatrix outer(const Vector& a, const Vector& b);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const noexcept { return data_; }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_).subspan(i * cols_, cols_);
    }

    DenseMatrix transposed() const;
    // Max absolute row sum.
    double norm_inf() const;
    bool all_finite() const;
    // max |a_ij - a_ji|
    double asymmetry() const;
    // (A + A^T) / 2, exactly symmetric.
    DenseMatrix symmetrized() const;

    DenseMatrix& operator+=(const DenseMatrix& other);
    DenseMatrix& operator*=(double alpha);

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double alpha, DenseMatrix a);

Vector multiply(const DenseMatrix& a, const Vector& x);
// A^T x
Vector multiply_transposed(const DenseMatrix& a, const Vector& x);
DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);
// A^T A
DenseMatrix gram(const DenseMatrix& a);
// x^T A x
double quadratic_form(const DenseMatrix& a, const Vector& x);

}  // namespace newton
