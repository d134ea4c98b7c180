#pragma once

// Internal: roots of complex polynomials via companion-matrix eigenvalues.

#include "rhlab/series.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rhlab::detail {

struct RootCluster {
    Complex value;
    int multiplicity = 1;
    double spread = 0.0;  // largest distance of a member from the cluster mean
};

/// Roots of sum_i coeffs[i] x^i (highest coefficient nonzero), polished by Newton steps.
inline std::vector<Complex> polynomialRoots(const std::vector<Complex>& coeffs) {
    std::vector<Complex> c = coeffs;
    while (!c.empty() && c.back() == Complex(0.0)) c.pop_back();
    std::vector<Complex> roots;
    std::size_t zeros = 0;
    while (zeros < c.size() && c[zeros] == Complex(0.0)) ++zeros;
    for (std::size_t i = 0; i < zeros; ++i) roots.emplace_back(0.0);
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(zeros));
    const int n = static_cast<int>(c.size()) - 1;
    if (n <= 0) return roots;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    const auto& ev = solver.eigenvalues();
    auto evalPoly = [&](Complex x, Complex& deriv) {
        Complex p = 0.0;
        deriv = 0.0;
        for (int i = n; i >= 0; --i) {
            deriv = deriv * x + p;
            p = p * x + c[static_cast<std::size_t>(i)];
        }
        return p;
    };
    for (int i = 0; i < n; ++i) {
        Complex x = ev(i);
        for (int it = 0; it < 3; ++it) {
            Complex d;
            const Complex p = evalPoly(x, d);
            if (std::abs(d) < 1e-300) break;
            const Complex step = p / d;
            // Newton is unreliable at multiple roots; only accept shrinking corrections.
            if (std::abs(step) > 1e-6 * std::max(1.0, std::abs(x))) break;
            x -= step;
        }
        roots.push_back(x);
    }
    return roots;
}

/// Groups roots closer than tol * max(1, |r|) and replaces each group by its mean.
inline std::vector<RootCluster> clusterRoots(const std::vector<Complex>& roots, double tol) {
    std::vector<RootCluster> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        std::vector<Complex> members{roots[i]};
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(roots[j] - roots[i]) < tol * std::max(1.0, std::abs(roots[i]))) {
                members.push_back(roots[j]);
                used[j] = true;
            }
        }
        Complex mean = 0.0;
        for (auto m : members) mean += m;
        mean /= static_cast<double>(members.size());
        double spread = 0.0;
        for (auto m : members) spread = std::max(spread, std::abs(m - mean));
        out.push_back({mean, static_cast<int>(members.size()), spread});
    }
    return out;
}

/// Clusters roots of the polynomial `coeffs`. Multiple roots split by about
/// eps^{1/k} under the eigenvalue solver, so groups are first formed with the
/// loose tolerance and kept only when p, p', ..., p^{(k-1)} vanish at the mean;
/// otherwise the group falls back to clustering with `tol`.
inline std::vector<RootCluster> clusterPolynomialRoots(const std::vector<Complex>& coeffs,
                                                       const std::vector<Complex>& roots, double tol,
                                                       double loose = 1e-3) {
    const int n = static_cast<int>(coeffs.size()) - 1;
    // Taylor coefficients t_j = p^{(j)}(x)/j! with rounding scales sum_i |c_i| C(i,j) |x|^{i-j}.
    // A k-fold root at x has |t_j / t_k| of order tol^{k-j}.
    auto taylorTest = [&](Complex x, int k) {
        std::vector<Complex> t(static_cast<std::size_t>(k + 1), 0.0);
        std::vector<double> scale(static_cast<std::size_t>(k + 1), 0.0);
        for (int j = 0; j <= k; ++j)
            for (int i = n; i >= j; --i) {
                double binom = 1.0;
                for (int q = 0; q < j; ++q) binom = binom * (i - q) / (q + 1);
                const Complex term = coeffs[static_cast<std::size_t>(i)] * binom * std::pow(x, i - j);
                t[static_cast<std::size_t>(j)] += term;
                scale[static_cast<std::size_t>(j)] += std::abs(term);
            }
        const double tk = std::abs(t[static_cast<std::size_t>(k)]);
        const double unit = tol * std::max(1.0, std::abs(x));
        double binom = 1.0;
        for (int j = k - 1; j >= 0; --j) {
            binom = binom * (j + 1) / (k - j);
            const double bound = 10.0 * binom * std::pow(unit, k - j) * tk + 1e-13 * scale[static_cast<std::size_t>(j)];
            if (std::abs(t[static_cast<std::size_t>(j)]) > bound) return false;
        }
        return true;
    };
    std::vector<RootCluster> out;
    for (const RootCluster& g : clusterRoots(roots, loose)) {
        if (g.multiplicity == 1) {
            out.push_back(g);
            continue;
        }
        if (taylorTest(g.value, g.multiplicity)) {
            // The (k-1)-th derivative has a simple root there; polish the mean on it.
            RootCluster c = g;
            const int k = g.multiplicity;
            for (int it = 0; it < 4; ++it) {
                Complex tk1 = 0.0, tk = 0.0;
                for (int i = n; i >= k - 1; --i) {
                    double b1 = 1.0;
                    for (int q = 0; q < k - 1; ++q) b1 = b1 * (i - q) / (q + 1);
                    tk1 += coeffs[static_cast<std::size_t>(i)] * b1 * std::pow(c.value, i - k + 1);
                    if (i >= k) tk += coeffs[static_cast<std::size_t>(i)] * (b1 * (i - k + 1) / k) * std::pow(c.value, i - k);
                }
                if (std::abs(tk) == 0.0) break;
                const Complex step = tk1 / (static_cast<double>(k) * tk);
                if (std::abs(step) > loose * std::max(1.0, std::abs(g.value))) break;
                c.value -= step;
            }
            out.push_back(c);
            continue;
        }
        std::vector<Complex> members;
        for (const Complex r : roots)
            if (std::abs(r - g.value) <= g.spread * (1 + 1e-12) + 1e-300) members.push_back(r);
        for (const RootCluster& c : clusterRoots(members, tol)) out.push_back(c);
    }
    return out;
}

/// Snaps real and imaginary parts to nearby rationals with small denominators.
inline Complex snapToRational(Complex x, int maxDen = 48, double tol = 1e-10) {
    auto snap = [&](double v) {
        for (int q = 1; q <= maxDen; ++q) {
            const double p = std::round(v * q);
            if (std::abs(v - p / q) < tol) return p / q;
        }
        return v;
    };
    return {snap(x.real()), snap(x.imag())};
}

}  // namespace rhlab::detail
