#include "rhlab/diffop.hpp"

#include "rhlab/error.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace rhlab {

namespace {

std::int64_t binomial(int n, int k) {
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Signed Stirling numbers of the first kind: x(x-1)...(x-n+1) = sum_k s(n,k) x^k.
std::vector<std::vector<double>> stirlingFirst(int n) {
    std::vector<std::vector<double>> s(n + 1, std::vector<double>(n + 1, 0.0));
    s[0][0] = 1.0;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k) s[i][k] = s[i - 1][k - 1] - (i - 1) * s[i - 1][k];
    return s;
}

// Stirling numbers of the second kind: x^n = sum_k S(n,k) x(x-1)...(x-k+1).
std::vector<std::vector<double>> stirlingSecond(int n) {
    std::vector<std::vector<double>> s(n + 1, std::vector<double>(n + 1, 0.0));
    s[0][0] = 1.0;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k) s[i][k] = s[i - 1][k - 1] + k * s[i - 1][k];
    return s;
}

const PuiseuxSeries& zeroSeries() {
    static const PuiseuxSeries zero;
    return zero;
}

}  // namespace

// ---------------------------------------------------------------------------
// DeltaForm

DeltaForm::DeltaForm(std::vector<PuiseuxSeries> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

DeltaForm DeltaForm::scalar(const PuiseuxSeries& s) { return DeltaForm({s}); }

DeltaForm DeltaForm::delta() { return DeltaForm({PuiseuxSeries(), PuiseuxSeries::constant(1.0)}); }

void DeltaForm::trim() {
    while (!coeffs_.empty() && coeffs_.back().isZero() && coeffs_.back().isExact()) coeffs_.pop_back();
}

int DeltaForm::order() const {
    for (int k = static_cast<int>(coeffs_.size()) - 1; k >= 0; --k)
        if (!coeffs_[static_cast<std::size_t>(k)].isZero()) return k;
    return -1;
}

const PuiseuxSeries& DeltaForm::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return zeroSeries();
    return coeffs_[static_cast<std::size_t>(k)];
}

DeltaForm operator+(const DeltaForm& a, const DeltaForm& b) {
    std::vector<PuiseuxSeries> c(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t k = 0; k < c.size(); ++k)
        c[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
    return DeltaForm(std::move(c));
}

DeltaForm operator-(const DeltaForm& a, const DeltaForm& b) { return a + b.scaled(-1.0); }

DeltaForm operator*(const DeltaForm& a, const DeltaForm& b) {
    const int na = static_cast<int>(a.coeffs_.size()), nb = static_cast<int>(b.coeffs_.size());
    if (na == 0 || nb == 0) return DeltaForm();
    std::vector<PuiseuxSeries> out(static_cast<std::size_t>(na + nb - 1));
    for (int j = 0; j < nb; ++j) {
        // delta^r b_j for r = 0..na-1
        std::vector<PuiseuxSeries> deltaPowers{b.coeff(j)};
        for (int r = 1; r < na; ++r) deltaPowers.push_back(deltaPowers.back().delta());
        for (int i = 0; i < na; ++i) {
            const PuiseuxSeries& ai = a.coeff(i);
            if (ai.isZero()) continue;
            // delta^i o b_j = sum_r C(i,r) (delta^r b_j) delta^{i-r}
            for (int r = 0; r <= i; ++r) {
                const PuiseuxSeries term =
                    (ai * deltaPowers[static_cast<std::size_t>(r)]).scaled(static_cast<double>(binomial(i, r)));
                out[static_cast<std::size_t>(i - r + j)] += term;
            }
        }
    }
    return DeltaForm(std::move(out));
}

DeltaForm DeltaForm::scaled(Complex c) const {
    std::vector<PuiseuxSeries> out;
    out.reserve(coeffs_.size());
    for (const auto& s : coeffs_) out.push_back(s.scaled(c));
    return DeltaForm(std::move(out));
}

DeltaForm DeltaForm::shiftedBy(const PuiseuxSeries& g) const {
    const DeltaForm step = DeltaForm::delta() + DeltaForm::scalar(g);
    DeltaForm power = DeltaForm::scalar(PuiseuxSeries::constant(1.0));
    DeltaForm out;
    for (int k = 0; k <= order(); ++k) {
        if (k > 0) power = step * power;
        if (!coeff(k).isZero()) out = out + DeltaForm::scalar(coeff(k)) * power;
    }
    return out;
}

PuiseuxSeries DeltaForm::apply(const PuiseuxSeries& u) const {
    PuiseuxSeries result = PuiseuxSeries(PuiseuxSeries::TermMap{}, std::nullopt);
    PuiseuxSeries du = u;
    bool first = true;
    for (int k = 0; k <= order(); ++k) {
        if (k > 0) du = du.delta();
        const PuiseuxSeries term = coeff(k) * du;
        result = first ? term : result + term;
        first = false;
    }
    // The zero operator still inherits the truncation of u.
    if (order() < 0 && u.truncationOrder()) return PuiseuxSeries::bigO(*u.truncationOrder());
    return result;
}

bool DeltaForm::approxEqual(const DeltaForm& other, double tol) const {
    const int n = std::max(order(), other.order());
    for (int k = 0; k <= n; ++k)
        if (!coeff(k).approxEqual(other.coeff(k), tol)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// DiffOp

DiffOp::DiffOp(std::vector<PuiseuxSeries> coeffs, BasePoint base)
    : coeffs_(std::move(coeffs)), base_(base) {
    while (!coeffs_.empty() && coeffs_.back().isZero()) coeffs_.pop_back();
    if (coeffs_.size() < 2)
        throw DomainError("operator must have order at least 1 with a nonzero leading coefficient");
}

std::int64_t DiffOp::ramification() const {
    std::int64_t d = 1;
    for (const auto& c : coeffs_) d = lcm64(d, c.ramification());
    return d;
}

std::string DiffOp::toString() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (int j = order(); j >= 0; --j) {
        for (const auto& [e, c] : coeffs_[static_cast<std::size_t>(j)].terms()) {
            if (!first) os << " + ";
            first = false;
            os << "(" << c.real() << (std::signbit(c.imag()) ? "-" : "+") << std::abs(c.imag()) << "i)";
            if (!e.isZero()) {
                os << "*z";
                if (!(e == Rational(1))) {
                    if (e.isInteger() && e.num() > 0)
                        os << "^" << e.num();
                    else
                        os << "^(" << e.toString() << ")";
                }
            }
            if (j > 0) os << "*D" << (j > 1 ? "^" + std::to_string(j) : "");
        }
    }
    return os.str();
}

bool DiffOp::approxEqual(const DiffOp& other, double tol) const {
    if (order() != other.order() || base_ != other.base_) return false;
    for (int j = 0; j <= order(); ++j)
        if (!coeff(j).approxEqual(other.coeff(j), tol)) return false;
    return true;
}

DeltaForm toDeltaForm(const DiffOp& p) {
    const int m = p.order();
    const auto s = stirlingFirst(m);
    std::vector<PuiseuxSeries> b(static_cast<std::size_t>(m + 1));
    for (int j = 0; j <= m; ++j) {
        const PuiseuxSeries aj = p.coeff(j).shifted(Rational(-j));
        for (int k = 0; k <= j; ++k)
            if (s[j][k] != 0.0) b[static_cast<std::size_t>(k)] += aj.scaled(s[j][k]);
    }
    return DeltaForm(std::move(b));
}

DiffOp fromDeltaForm(const DeltaForm& d, BasePoint base) {
    const int m = d.order();
    const auto S = stirlingSecond(std::max(m, 0));
    std::vector<PuiseuxSeries> a(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k)
        for (int j = 0; j <= k; ++j)
            if (S[k][j] != 0.0) a[static_cast<std::size_t>(j)] += d.coeff(k).shifted(Rational(j)).scaled(S[k][j]);
    return DiffOp(std::move(a), base);
}

PuiseuxSeries applyToSeries(const DiffOp& p, const PuiseuxSeries& u) { return toDeltaForm(p).apply(u); }

DeltaForm gaugeExp(const DeltaForm& p, const PuiseuxSeries& f, Complex rho) {
    if (!f.isExact()) throw DomainError("gauge twist body must be exact");
    PuiseuxSeries g = f.delta();
    if (rho != Complex(0.0)) g += PuiseuxSeries::constant(rho);
    if (g.isZero()) return p;
    return p.shiftedBy(g);
}

DiffOp gaugeExp(const DiffOp& p, const PuiseuxSeries& f, Complex rho) {
    return fromDeltaForm(gaugeExp(toDeltaForm(p), f, rho), p.basePoint());
}

DiffOp gaugeExp(const DiffOp& p, const ExponentialFactor& f, Complex rho) {
    return gaugeExp(p, f.body(), rho);
}

DiffOp atInfinity(const DiffOp& p) {
    const DeltaForm d = toDeltaForm(p);
    std::vector<PuiseuxSeries> b;
    for (int k = 0; k <= d.order(); ++k) {
        const PuiseuxSeries& c = d.coeff(k);
        if (!c.isExact()) throw DomainError("atInfinity needs exact coefficients");
        b.push_back(c.substitutePower(Rational(-1)).scaled(k % 2 ? -1.0 : 1.0));
    }
    const BasePoint flipped = p.basePoint() == BasePoint::Zero ? BasePoint::Infinity : BasePoint::Zero;
    return fromDeltaForm(DeltaForm(std::move(b)), flipped);
}

bool fuchsianTest(const DiffOp& p) {
    const DeltaForm d = toDeltaForm(p);
    const Rational top = *d.coeff(d.order()).valuation();
    for (int k = 0; k < d.order(); ++k) {
        const auto v = d.coeff(k).valuation();
        if (v && *v < top) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok { Num, Imag, D, Delta, Z, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    double value = 0.0;
    std::string text;
    int line = 1;
    int column = 1;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t{Tok::End, 0.0, {}, line, col};
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
                    while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
                    j = k;
                }
            }
            t.text = std::string(s.substr(i, j - i));
            try {
                std::size_t used = 0;
                t.value = std::stod(t.text, &used);
                if (used != t.text.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw ParseError("malformed number '" + t.text + "'", line, col);
            }
            t.kind = Tok::Num;
            advance(j - i);
            out.push_back(t);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) ++j;
            t.text = std::string(s.substr(i, j - i));
            if (t.text == "D")
                t.kind = Tok::D;
            else if (t.text == "delta")
                t.kind = Tok::Delta;
            else if (t.text == "z")
                t.kind = Tok::Z;
            else if (t.text == "i")
                t.kind = Tok::Imag;
            else
                throw ParseError("unknown identifier '" + t.text + "'", line, col);
            advance(j - i);
            out.push_back(t);
            continue;
        }
        switch (c) {
            case '+': t.kind = Tok::Plus; break;
            case '-': t.kind = Tok::Minus; break;
            case '*': t.kind = Tok::Star; break;
            case '/': t.kind = Tok::Slash; break;
            case '^': t.kind = Tok::Caret; break;
            case '(': t.kind = Tok::LParen; break;
            case ')': t.kind = Tok::RParen; break;
            default: throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = std::string(1, c);
        advance(1);
        out.push_back(t);
    }
    out.push_back(Token{Tok::End, 0.0, "end of input", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    DeltaForm parseAll() {
        DeltaForm e = expr();
        if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().line, peek().column); }
    void expect(Tok k, const char* what) {
        if (!accept(k)) fail(std::string("expected ") + what + " but found '" + peek().text + "'");
    }

    DeltaForm expr() {
        bool negate = false;
        if (accept(Tok::Minus))
            negate = true;
        else
            accept(Tok::Plus);
        DeltaForm acc = term();
        if (negate) acc = acc.scaled(-1.0);
        while (true) {
            if (accept(Tok::Plus))
                acc = acc + term();
            else if (accept(Tok::Minus))
                acc = acc - term();
            else
                return acc;
        }
    }

    DeltaForm term() {
        DeltaForm acc = factor();
        while (true) {
            if (accept(Tok::Star)) {
                acc = acc * factor();
            } else if (peek().kind == Tok::Slash) {
                const Token& at = peek();
                ++pos_;
                const DeltaForm divisor = factor();
                const auto c = constantValue(divisor);
                if (!c) throw ParseError("division is only defined by nonzero constants", at.line, at.column);
                acc = acc.scaled(1.0 / *c);
            } else {
                return acc;
            }
        }
    }

    static std::optional<Complex> constantValue(const DeltaForm& d) {
        if (d.order() != 0) return std::nullopt;
        const auto& t = d.coeff(0).terms();
        if (t.size() != 1 || !t.begin()->first.isZero()) return std::nullopt;
        return t.begin()->second;
    }

    // Returns (coefficient, exponent) when d is a scalar monomial c z^e.
    static std::optional<std::pair<Complex, Rational>> monomialValue(const DeltaForm& d) {
        if (d.order() != 0) return std::nullopt;
        const auto& t = d.coeff(0).terms();
        if (t.size() != 1) return std::nullopt;
        return std::make_pair(t.begin()->second, t.begin()->first);
    }

    Rational exponent() {
        if (accept(Tok::LParen)) {
            const std::int64_t num = signedInteger();
            std::int64_t den = 1;
            if (accept(Tok::Slash)) {
                den = signedInteger();
                if (den == 0) fail("zero denominator in exponent");
            }
            expect(Tok::RParen, "')'");
            return Rational(num, den);
        }
        return Rational(signedInteger());
    }

    std::int64_t signedInteger() {
        bool neg = accept(Tok::Minus);
        if (!neg) accept(Tok::Plus);
        const Token& t = peek();
        if (t.kind != Tok::Num || t.text.find_first_of(".eE") != std::string::npos)
            fail("expected an integer but found '" + t.text + "'");
        ++pos_;
        const auto v = static_cast<std::int64_t>(std::stoll(t.text));
        return neg ? -v : v;
    }

    DeltaForm factor() {
        const Token& at = peek();
        DeltaForm b = base();
        if (!accept(Tok::Caret)) return b;
        const Rational e = exponent();
        if (auto mono = monomialValue(b)) {
            const auto [c, ex] = *mono;
            Complex cp;
            if (e.isInteger())
                cp = std::pow(c, static_cast<int>(e.num()));
            else if (c == Complex(1.0))
                cp = 1.0;
            else
                throw ParseError("rational powers are only defined for z", at.line, at.column);
            return DeltaForm::scalar(PuiseuxSeries::monomial(cp, ex * e));
        }
        if (!e.isInteger() || e.num() < 0)
            throw ParseError("operators can only be raised to non-negative integer powers", at.line, at.column);
        DeltaForm out = DeltaForm::scalar(PuiseuxSeries::constant(1.0));
        for (std::int64_t k = 0; k < e.num(); ++k) out = out * b;
        return out;
    }

    DeltaForm base() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::D:
                ++pos_;
                return DeltaForm::scalar(PuiseuxSeries::monomial(1.0, Rational(-1))) * DeltaForm::delta();
            case Tok::Delta:
                ++pos_;
                return DeltaForm::delta();
            case Tok::Z:
                ++pos_;
                return DeltaForm::scalar(PuiseuxSeries::monomial(1.0, Rational(1)));
            case Tok::Num: {
                ++pos_;
                Complex v = t.value;
                if (accept(Tok::Imag)) v = Complex(0.0, t.value);
                return DeltaForm::scalar(PuiseuxSeries::constant(v));
            }
            case Tok::Imag:
                ++pos_;
                return DeltaForm::scalar(PuiseuxSeries::constant(Complex(0.0, 1.0)));
            case Tok::LParen: {
                ++pos_;
                DeltaForm e = expr();
                expect(Tok::RParen, "')'");
                return e;
            }
            default:
                fail("unexpected '" + t.text + "'");
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

}  // namespace

DiffOp parseOperator(std::string_view text) {
    Parser parser(tokenize(text));
    const DeltaForm d = parser.parseAll();
    if (d.order() < 1) throw ParseError("operator has no derivative term after simplification", 1, 1);
    return fromDeltaForm(d);
}

}  // namespace rhlab
