#include "newton/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "newton/errors.hpp"

namespace newton {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": sizes " + std::to_string(a) + " and " +
                                std::to_string(b));
    }
}

}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_size(a.size(), b.size(), "dot");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double norm2(std::span<const double> a) {
    // Scaled accumulation keeps huge/tiny entries from overflowing.
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double sum = 0.0;
    for (double v : a) {
        const double t = v / scale;
        sum += t * t;
    }
    return scale * std::sqrt(sum);
}

double norm_inf(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

Vector add(const Vector& a, const Vector& b) {
    require_same_size(a.size(), b.size(), "add");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Vector subtract(const Vector& a, const Vector& b) {
    require_same_size(a.size(), b.size(), "subtract");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector scaled(double alpha, const Vector& a) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i];
    return out;
}

Vector axpy(double alpha, const Vector& x, const Vector& y) {
    require_same_size(x.size(), y.size(), "axpy");
    Vector out(y);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
    return out;
}

Vector negated(const Vector& a) { return scaled(-1.0, a); }

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    require_same_size(data_.size(), rows * cols, "DenseMatrix storage");
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        require_same_size(row.size(), c, "DenseMatrix::from_rows row length");
        data.insert(data.end(), row.begin(), row.end());
    }
    return DenseMatrix(r, c, std::move(data));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
    DenseMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
}

DenseMatrix DenseMatrix::outer(const Vector& a, const Vector& b) {
    DenseMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) m(i, j) = a[i] * b[j];
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::norm_inf() const {
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (double v : row(i)) s += std::abs(v);
        m = std::max(m, s);
    }
    return m;
}

bool DenseMatrix::all_finite() const { return newton::all_finite(data_); }

double DenseMatrix::asymmetry() const {
    if (!square()) throw DimensionMismatch("asymmetry of a non-square matrix");
    double m = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = i + 1; j < cols_; ++j)
            m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
    return m;
}

DenseMatrix DenseMatrix::symmetrized() const {
    if (!square()) throw DimensionMismatch("symmetrizing a non-square matrix");
    DenseMatrix s(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        s(i, i) = (*this)(i, i);
        for (std::size_t j = i + 1; j < cols_; ++j) {
            const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
    require_same_size(rows_, other.rows_, "matrix add rows");
    require_same_size(cols_, other.cols_, "matrix add cols");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

DenseMatrix& DenseMatrix::operator*=(double alpha) {
    for (double& v : data_) v *= alpha;
    return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) {
    a += b;
    return a;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    return a + (-1.0) * b;
}

DenseMatrix operator*(double alpha, DenseMatrix a) {
    a *= alpha;
    return a;
}

Vector multiply(const DenseMatrix& a, const Vector& x) {
    require_same_size(a.cols(), x.size(), "matrix-vector product");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vector multiply_transposed(const DenseMatrix& a, const Vector& x) {
    require_same_size(a.rows(), x.size(), "transposed matrix-vector product");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[j] += a(i, j) * x[i];
    return y;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_size(a.cols(), b.rows(), "matrix product");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix gram(const DenseMatrix& a) {
    const std::size_t n = a.cols();
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
            g(i, j) = s;
            g(j, i) = s;
        }
    return g;
}

double quadratic_form(const DenseMatrix& a, const Vector& x) { return dot(x, multiply(a, x)); }

}  // namespace newton
