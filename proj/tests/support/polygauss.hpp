#pragma once

// Test-only closed-form calculus on sums of p(x) * exp(-c (x - x0)^2) terms.
// Used as an independent oracle: differentiation and application of DiffOps
// are exact here, and quadrature against these functions is spectrally
// accurate, so the symbolic pipeline can be cross-checked numerically.

#include <cmath>
#include <functional>
#include <vector>

#include "dtcm/diffop.hpp"

namespace dtcm::testsupport {

struct PolyGauss {
    std::vector<double> coeffs;  // polynomial in x, coeffs[k] x^k
    double c = 1.0;
    double x0 = 0.0;

    double poly_at(double x) const {
        double v = 0.0;
        for (std::size_t k = coeffs.size(); k-- > 0;) v = v * x + coeffs[k];
        return v;
    }
    double eval(double x) const {
        return poly_at(x) * std::exp(-c * (x - x0) * (x - x0));
    }

    PolyGauss dx() const {
        // (p e^{-c(x-x0)^2})' = (p' - 2c(x-x0) p) e^{...}
        PolyGauss out;
        out.c = c;
        out.x0 = x0;
        out.coeffs.assign(coeffs.size() + 1, 0.0);
        for (std::size_t k = 1; k < coeffs.size(); ++k)
            out.coeffs[k - 1] += static_cast<double>(k) * coeffs[k];
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            out.coeffs[k + 1] += -2.0 * c * coeffs[k];
            out.coeffs[k] += 2.0 * c * x0 * coeffs[k];
        }
        return out;
    }

    PolyGauss times_poly(const std::vector<double>& q) const {
        PolyGauss out;
        out.c = c;
        out.x0 = x0;
        out.coeffs.assign(coeffs.size() + q.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            for (std::size_t j = 0; j < q.size(); ++j)
                out.coeffs[i + j] += coeffs[i] * q[j];
        return out;
    }
};

struct PolyGaussSum {
    std::vector<PolyGauss> parts;

    double eval(double x) const {
        double v = 0.0;
        for (const auto& p : parts) v += p.eval(x);
        return v;
    }
    PolyGaussSum dx() const {
        PolyGaussSum out;
        for (const auto& p : parts) out.parts.push_back(p.dx());
        return out;
    }
};

// Coefficient polynomial of a 1D DiffOp term as a polynomial in x (xi = x - z),
// with all scalar variables evaluated from the supplied point.
inline std::vector<double> coeff_in_x(const MultiPoly& coeff, double z,
                                      const std::vector<double>& scalar_point) {
    const AlphabetPtr& alpha = coeff.alphabet();
    int deg = coeff.degree_of(alpha->xi(0));
    std::vector<double> out(static_cast<std::size_t>(deg + 1), 0.0);
    for (const auto& [e, c] : coeff.terms()) {
        double scalar = c.to_double();
        for (int v = 0; v < alpha->size(); ++v) {
            if (v == alpha->xi(0)) continue;
            for (int k = 0; k < e[static_cast<std::size_t>(v)]; ++k)
                scalar *= scalar_point[static_cast<std::size_t>(v)];
        }
        // (x - z)^n expanded by binomials
        int n = e[static_cast<std::size_t>(alpha->xi(0))];
        for (int j = 0; j <= n; ++j) {
            double binom = 1.0;
            for (int i = 0; i < j; ++i) binom = binom * (n - i) / (i + 1);
            out[static_cast<std::size_t>(j)] +=
                scalar * binom * std::pow(-z, n - j);
        }
    }
    return out;
}

// Apply a 1D DiffOp (sigma/t/theta already numeric via scalar_point) to f.
inline PolyGaussSum apply_diffop(const DiffOp& op, double z,
                                 const std::vector<double>& scalar_point,
                                 const PolyGauss& f) {
    PolyGaussSum out;
    for (const auto& [gamma, coeff] : op.terms()) {
        PolyGauss d = f;
        for (int k = 0; k < gamma[0]; ++k) d = d.dx();
        out.parts.push_back(d.times_poly(coeff_in_x(coeff, z, scalar_point)));
    }
    return out;
}

// Trapezoid quadrature; spectrally accurate for smooth decaying integrands.
inline double integrate(const std::function<double(double)>& fn, double lo, double hi,
                        int n) {
    double h = (hi - lo) / n;
    double sum = 0.5 * (fn(lo) + fn(hi));
    for (int i = 1; i < n; ++i) sum += fn(lo + h * i);
    return sum * h;
}

}  // namespace dtcm::testsupport
