#include "dtcm/elliptic.hpp"

#include <cmath>

#include "dtcm/errors.hpp"

namespace dtcm {

namespace {

// Cholesky A = L L^T; returns false on a non-positive pivot.
bool cholesky(int n, const std::vector<double>& a, std::vector<double>& l) {
    l.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i * n + j)];
            for (int k = 0; k < j; ++k)
                s -= l[static_cast<std::size_t>(i * n + k)] * l[static_cast<std::size_t>(j * n + k)];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                l[static_cast<std::size_t>(i * n + i)] = std::sqrt(s);
            } else {
                l[static_cast<std::size_t>(i * n + j)] = s / l[static_cast<std::size_t>(j * n + j)];
            }
        }
    }
    return true;
}

// Exact inverse of the rationalized matrix by Gauss-Jordan.
std::vector<Rational> exact_inverse(int n, const std::vector<double>& a) {
    std::vector<Rational> m(static_cast<std::size_t>(n * 2 * n));
    auto at = [&](int i, int j) -> Rational& { return m[static_cast<std::size_t>(i * 2 * n + j)]; };
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) at(i, j) = Rational::from_double(a[static_cast<std::size_t>(i * n + j)]);
        at(i, n + i) = Rational(1);
    }
    for (int col = 0; col < n; ++col) {
        int pivot = -1;
        for (int r = col; r < n; ++r)
            if (!at(r, col).is_zero()) { pivot = r; break; }
        if (pivot < 0) throw DomainError("EllipticFreeze: singular diffusion matrix");
        if (pivot != col)
            for (int j = 0; j < 2 * n; ++j) std::swap(at(pivot, j), at(col, j));
        Rational inv = at(col, col).reciprocal();
        for (int j = 0; j < 2 * n; ++j) at(col, j) *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == col || at(r, col).is_zero()) continue;
            Rational f = at(r, col);
            for (int j = 0; j < 2 * n; ++j) at(r, j) -= f * at(col, j);
        }
    }
    std::vector<Rational> inv(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv[static_cast<std::size_t>(i * n + j)] = at(i, n + j);
    return inv;
}

}  // namespace

void sym_eigen_range(int dim, const std::vector<double>& a,
                     double& lambda_min, double& lambda_max) {
    std::vector<double> m = a;
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i * dim + j)]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < dim; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                if (std::abs(at(p, q)) < 1e-300) continue;
                double theta = 0.5 * std::atan2(2.0 * at(p, q), at(q, q) - at(p, p));
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < dim; ++k) {
                    double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < dim; ++k) {
                    double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    lambda_min = at(0, 0);
    lambda_max = at(0, 0);
    for (int i = 1; i < dim; ++i) {
        lambda_min = std::min(lambda_min, at(i, i));
        lambda_max = std::max(lambda_max, at(i, i));
    }
}

std::shared_ptr<const EllipticFreeze> EllipticFreeze::make(int dim,
                                                           const std::vector<double>& a) {
    if (dim < 1 || a.size() != static_cast<std::size_t>(dim * dim))
        throw StructuralError("EllipticFreeze: bad matrix size");
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < i; ++j)
            if (a[static_cast<std::size_t>(i * dim + j)] != a[static_cast<std::size_t>(j * dim + i)])
                throw StructuralError("EllipticFreeze: matrix not symmetric");

    std::vector<double> l;
    if (!cholesky(dim, a, l))
        throw DomainError("EllipticFreeze: diffusion matrix not positive definite");

    auto frz = std::shared_ptr<EllipticFreeze>(new EllipticFreeze());
    frz->dim_ = dim;
    frz->a_ = a;

    double det = 1.0;
    for (int i = 0; i < dim; ++i) det *= l[static_cast<std::size_t>(i * dim + i)];
    frz->det_a_ = det * det;

    // invert L, then A^{-1} = L^{-T} L^{-1}
    std::vector<double> linv(static_cast<std::size_t>(dim * dim), 0.0);
    for (int i = 0; i < dim; ++i) {
        linv[static_cast<std::size_t>(i * dim + i)] = 1.0 / l[static_cast<std::size_t>(i * dim + i)];
        for (int j = 0; j < i; ++j) {
            double s = 0.0;
            for (int k = j; k < i; ++k)
                s += l[static_cast<std::size_t>(i * dim + k)] * linv[static_cast<std::size_t>(k * dim + j)];
            linv[static_cast<std::size_t>(i * dim + j)] = -s / l[static_cast<std::size_t>(i * dim + i)];
        }
    }
    frz->inv_a_.assign(static_cast<std::size_t>(dim * dim), 0.0);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double s = 0.0;
            for (int k = std::max(i, j); k < dim; ++k)
                s += linv[static_cast<std::size_t>(k * dim + i)] * linv[static_cast<std::size_t>(k * dim + j)];
            frz->inv_a_[static_cast<std::size_t>(i * dim + j)] = s;
        }

    sym_eigen_range(dim, a, frz->lambda_min_, frz->lambda_max_);
    frz->inv_a_exact_ = exact_inverse(dim, a);
    return frz;
}

}  // namespace dtcm
