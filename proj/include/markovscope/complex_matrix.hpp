#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace mscope {

using Complex = std::complex<double>;

// Dense complex matrix, row-major storage.  Everything in this library is
// 2x2 or 4x4, so the type is value-semantic and makes no attempt at being
// clever about allocation or cache behaviour.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    // Zero-filled rows x cols matrix.
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        if (rows_ == 0 || cols_ == 0)
            throw std::invalid_argument("ComplexMatrix: empty initializer");
        entries_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw std::invalid_argument("ComplexMatrix: ragged initializer");
            entries_.insert(entries_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Complex& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    ComplexMatrix& operator+=(const ComplexMatrix& rhs) {
        require_same_shape(rhs, "operator+=");
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += rhs.entries_[i];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& rhs) {
        require_same_shape(rhs, "operator-=");
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= rhs.entries_[i];
        return *this;
    }

    ComplexMatrix& operator*=(Complex scale) {
        for (auto& e : entries_) e *= scale;
        return *this;
    }

private:
    void require_same_shape(const ComplexMatrix& rhs, const char* op) const {
        if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
            throw std::invalid_argument(std::string("ComplexMatrix: shape mismatch in ") + op);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> entries_;
};

inline ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) {
    lhs += rhs;
    return lhs;
}

inline ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) {
    lhs -= rhs;
    return lhs;
}

inline ComplexMatrix operator*(Complex scale, ComplexMatrix m) {
    m *= scale;
    return m;
}

inline ComplexMatrix operator*(ComplexMatrix m, Complex scale) {
    m *= scale;
    return m;
}

// Matrix product.  Plain triple loop; operands never exceed 4x4 here.
inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("ComplexMatrix: inner dimensions do not match");
    ComplexMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

// Conjugate transpose.
inline ComplexMatrix dagger(const ComplexMatrix& m) {
    ComplexMatrix d(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) d(j, i) = std::conj(m(i, j));
    return d;
}

// Kronecker product: (a kron b)[i*p+k][j*q+l] = a[i][j] * b[k][l]
// for b of shape p x q.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Complex aij = a(i, j);
            if (aij == Complex{}) continue;
            for (std::size_t r = 0; r < b.rows(); ++r)
                for (std::size_t c = 0; c < b.cols(); ++c)
                    k(i * b.rows() + r, j * b.cols() + c) = aij * b(r, c);
        }
    return k;
}

inline Complex trace(const ComplexMatrix& m) {
    if (!m.is_square())
        throw std::invalid_argument("trace: matrix must be square");
    Complex t{};
    for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
    return t;
}

inline double frobenius_norm(const ComplexMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

inline double max_abs(const ComplexMatrix& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) s = std::max(s, std::abs(m(i, j)));
    return s;
}

inline bool all_finite(const ComplexMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

// Frobenius distance from m to its own conjugate transpose; zero iff Hermitian.
inline double hermiticity_defect(const ComplexMatrix& m) {
    if (!m.is_square())
        throw std::invalid_argument("hermiticity_defect: matrix must be square");
    return frobenius_norm(m - dagger(m));
}

// (m + m^dagger) / 2, the Hermitian part of m.
inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    if (!m.is_square())
        throw std::invalid_argument("hermitian_part: matrix must be square");
    ComplexMatrix h = m + dagger(m);
    h *= 0.5;
    return h;
}

}  // namespace mscope
