#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bessim/errors.hpp"

namespace bessim {

using Vector = std::vector<double>;

/// Dense square matrix, row-major. Sized for fleet-scale problems (n up to
/// a few dozen); everything downstream assumes dense storage is cheap.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t size() const { return n_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline Vector multiply(const Matrix& a, std::span<const double> x) {
    const std::size_t n = a.size();
    Vector y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * x[j];
        y[i] = acc;
    }
    return y;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double max_abs_entry(const Matrix& m) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) v = std::max(v, std::abs(m(i, j)));
    return v;
}

inline bool is_symmetric(const Matrix& m, double rel_tol = 1e-12) {
    const double tol = rel_tol * std::max(1.0, max_abs_entry(m));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i + 1; j < m.size(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol) return false;
    return true;
}

/// All eigenvalues of a symmetric matrix, ascending, via cyclic Jacobi
/// rotations. Accurate to ~1e-12 relative for the small dense matrices this
/// library deals with. Throws NotSymmetric when the input fails the 1e-12
/// relative symmetry check.
inline Vector symmetric_eigenvalues(const Matrix& m) {
    const std::size_t n = m.size();
    if (!is_symmetric(m)) throw NotSymmetric("symmetric_eigenvalues: matrix is not symmetric");
    if (n == 0) return {};
    if (n == 1) return {m(0, 0)};

    Matrix a = m;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = avg;
        }

    double frob = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
    frob = std::sqrt(frob);

    const double stop = std::max(1e-15 * frob, 1e-300);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        off = std::sqrt(2.0 * off);
        if (off <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= stop / (n * n)) continue;

                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = a(p, k) = akp - s * (akq + tau * akp);
                    a(k, q) = a(q, k) = akq + s * (akp - tau * akq);
                }
            }
        }
    }

    Vector eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

/// Cholesky factorization of a symmetric positive definite matrix; used to
/// apply H^{-1} without forming the inverse.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const Matrix& spd) : l_(spd.size()) {
        const std::size_t n = spd.size();
        if (!is_symmetric(spd)) throw NotSymmetric("cholesky: matrix is not symmetric");
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double acc = spd(i, j);
                for (std::size_t k = 0; k < j; ++k) acc -= l_(i, k) * l_(j, k);
                if (i == j) {
                    if (acc <= 0.0)
                        throw NotPositiveDefinite("cholesky: matrix is not positive definite");
                    l_(i, i) = std::sqrt(acc);
                } else {
                    l_(i, j) = acc / l_(j, j);
                }
            }
        }
    }

    std::size_t size() const { return l_.size(); }

    /// Solves A x = rhs where A is the factored matrix.
    Vector solve(std::span<const double> rhs) const {
        const std::size_t n = l_.size();
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = rhs[i];
            for (std::size_t k = 0; k < i; ++k) acc -= l_(i, k) * y[k];
            y[i] = acc / l_(i, i);
        }
        Vector x(n);
        for (std::size_t ii = n; ii-- > 0;) {
            double acc = y[ii];
            for (std::size_t k = ii + 1; k < n; ++k) acc -= l_(k, ii) * x[k];
            x[ii] = acc / l_(ii, ii);
        }
        return x;
    }

private:
    Matrix l_;
};

} // namespace bessim
