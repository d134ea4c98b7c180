#pragma once

// Small random generators for property tests. Every suite seeds its own engine.

#include "rhlab/series.hpp"

#include <random>
#include <vector>

namespace gen {

using rhlab::Complex;
using rhlab::PuiseuxSeries;
using rhlab::Rational;

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
    bool coin() { return integer(0, 1) == 1; }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(integer(0, static_cast<int>(v.size()) - 1))]; }

    Rational rational(int lo, int hi, int maxDen) {
        const int den = integer(1, maxDen);
        return Rational(integer(lo * den, hi * den), den);
    }
    // Gaussian integers keep products and sums exact in double arithmetic.
    Complex gaussianInt(int bound) {
        Complex c;
        do c = Complex(integer(-bound, bound), integer(-bound, bound));
        while (c == Complex(0.0));
        return c;
    }
    Complex complex(double bound) { return {real(-bound, bound), real(-bound, bound)}; }
};

/// Exact series with up to `terms` Gaussian-integer terms, exponents in [lo, hi] with denominators <= maxDen.
inline PuiseuxSeries exactSeries(Rng& r, int terms, int lo, int hi, int maxDen) {
    PuiseuxSeries::TermMap m;
    const int n = r.integer(1, terms);
    for (int i = 0; i < n; ++i) m[r.rational(lo, hi, maxDen)] += r.gaussianInt(5);
    return PuiseuxSeries(std::move(m));
}

/// Nonzero polar part with real-double coefficients; exponents in [-maxPole, -1/maxDen].
inline PuiseuxSeries polarSeries(Rng& r, int terms, int maxPole, int maxDen) {
    PuiseuxSeries::TermMap m;
    const int n = r.integer(1, terms);
    for (int i = 0; i < n; ++i) {
        const int den = r.integer(1, maxDen);
        m[Rational(-r.integer(1, maxPole * den), den)] = r.gaussianInt(3);
    }
    return PuiseuxSeries(std::move(m));
}

}  // namespace gen
