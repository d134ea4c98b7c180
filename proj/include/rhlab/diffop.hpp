#pragma once

#include "rhlab/series.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rhlab {

/// Where the local coordinate of an operator is centred. Local analysis always
/// happens at 0; `Infinity` records that the operator was moved there by
/// atInfinity (w = 1/z).
enum class BasePoint { Zero, Infinity };

/// Operator written in the derivation delta = z d/dz: sum_k b_k(z) delta^k.
class DeltaForm {
public:
    DeltaForm() = default;
    explicit DeltaForm(std::vector<PuiseuxSeries> coeffs);

    static DeltaForm scalar(const PuiseuxSeries& s);
    static DeltaForm delta();

    /// Highest k with b_k nonzero (-1 for the zero operator).
    int order() const;
    const std::vector<PuiseuxSeries>& coeffs() const { return coeffs_; }
    const PuiseuxSeries& coeff(int k) const;
    bool isZero() const { return order() < 0; }

    friend DeltaForm operator+(const DeltaForm& a, const DeltaForm& b);
    friend DeltaForm operator-(const DeltaForm& a, const DeltaForm& b);
    /// Composition a o b.
    friend DeltaForm operator*(const DeltaForm& a, const DeltaForm& b);
    DeltaForm scaled(Complex c) const;

    /// Substitutes delta -> delta + g, i.e. conjugation by a solution factor with z-logarithmic derivative g.
    DeltaForm shiftedBy(const PuiseuxSeries& g) const;
    /// Term-wise application to a series.
    PuiseuxSeries apply(const PuiseuxSeries& u) const;

    bool approxEqual(const DeltaForm& other, double tol = 1e-12) const;

private:
    void trim();
    std::vector<PuiseuxSeries> coeffs_;
};

/// Linear differential operator sum_j a_j(z) (d/dz)^j with Puiseux coefficients.
class DiffOp {
public:
    DiffOp() = default;
    /// Throws DomainError if the order is below 1 or the leading coefficient vanishes.
    DiffOp(std::vector<PuiseuxSeries> coeffs, BasePoint base = BasePoint::Zero);

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    const std::vector<PuiseuxSeries>& coeffs() const { return coeffs_; }
    const PuiseuxSeries& coeff(int j) const { return coeffs_.at(static_cast<std::size_t>(j)); }
    BasePoint basePoint() const { return base_; }
    std::int64_t ramification() const;

    /// Re-parseable text in the operator grammar.
    std::string toString() const;

    bool approxEqual(const DiffOp& other, double tol = 1e-12) const;

private:
    std::vector<PuiseuxSeries> coeffs_;
    BasePoint base_ = BasePoint::Zero;
};

/// Parses the operator grammar:
///   expr := term (("+"|"-") term)*      term := factor (("*"|"/") factor)*
///   factor := base ("^" exponent)?      base := "D" | "delta" | "z" | number | "(" expr ")"
///   exponent := integer | "(" integer "/" integer ")"
///   number := decimal | "(" decimal ("+"|"-") decimal "i" ")"
/// Products are operator compositions, so "D*z" means z D + 1. Division is only by constants.
DiffOp parseOperator(std::string_view text);

DeltaForm toDeltaForm(const DiffOp& p);
DiffOp fromDeltaForm(const DeltaForm& d, BasePoint base = BasePoint::Zero);

PuiseuxSeries applyToSeries(const DiffOp& p, const PuiseuxSeries& u);

/// Q with Q(v) = e^{-f} z^{-rho} P(e^{f} z^{rho} v). The twist body may be any exact series.
DiffOp gaugeExp(const DiffOp& p, const PuiseuxSeries& f, Complex rho);
DiffOp gaugeExp(const DiffOp& p, const ExponentialFactor& f, Complex rho);
DeltaForm gaugeExp(const DeltaForm& p, const PuiseuxSeries& f, Complex rho);

/// Coordinate change z = 1/w; the result is studied at w = 0. Applying it twice
/// gives back the original term maps.
DiffOp atInfinity(const DiffOp& p);

/// True iff the delta-form Newton polygon has only the slope 0.
bool fuchsianTest(const DiffOp& p);

}  // namespace rhlab
