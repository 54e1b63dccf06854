#include "cosym/polynomial.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace cosym {

Polynomial::Polynomial(int vars) : vars_(vars) {}

Polynomial Polynomial::constant(int vars, double value)
{
    Polynomial p(vars);
    p.add_term(value, Exponents(static_cast<std::size_t>(vars), 0));
    return p;
}

Polynomial Polynomial::variable(int vars, int index)
{
    Exponents e(static_cast<std::size_t>(vars), 0);
    e.at(static_cast<std::size_t>(index)) = 1;
    Polynomial p(vars);
    p.add_term(1.0, e);
    return p;
}

Polynomial Polynomial::monomial(double coeff, Exponents exponents)
{
    Polynomial p(static_cast<int>(exponents.size()));
    p.add_term(coeff, exponents);
    return p;
}

int Polynomial::degree() const noexcept
{
    int degree = 0;
    for (const auto& [e, c] : terms_) {
        int d = 0;
        for (int k : e) {
            d += k;
        }
        degree = std::max(degree, d);
    }
    return degree;
}

void Polynomial::add_term(double coeff, const Exponents& exponents)
{
    if (static_cast<int>(exponents.size()) != vars_) {
        throw Error(Errc::ShapeMismatch, "monomial exponent count differs from polynomial arity");
    }
    if (std::any_of(exponents.begin(), exponents.end(), [](int k) { return k < 0; })) {
        throw Error(Errc::InvalidExpression, "negative exponent");
    }
    if (coeff == 0.0) {
        return;
    }
    terms_[exponents] += coeff;
    prune(exponents);
}

void Polynomial::prune(const Exponents& key)
{
    auto it = terms_.find(key);
    if (it != terms_.end() && it->second == 0.0) {
        terms_.erase(it);
    }
}

double Polynomial::evaluate(std::span<const double> x) const
{
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c;
        for (std::size_t i = 0; i < e.size(); ++i) {
            for (int k = 0; k < e[i]; ++k) {
                term *= x[i];
            }
        }
        sum += term;
    }
    return sum;
}

Polynomial Polynomial::derivative(int var) const
{
    Polynomial d(vars_);
    const auto v = static_cast<std::size_t>(var);
    for (const auto& [e, c] : terms_) {
        if (e[v] == 0) {
            continue;
        }
        Exponents lowered = e;
        lowered[v] -= 1;
        d.add_term(c * e[v], lowered);
    }
    return d;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs)
{
    if (rhs.vars_ != vars_) {
        throw Error(Errc::ShapeMismatch, "polynomial arity mismatch");
    }
    for (const auto& [e, c] : rhs.terms_) {
        add_term(c, e);
    }
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs)
{
    if (rhs.vars_ != vars_) {
        throw Error(Errc::ShapeMismatch, "polynomial arity mismatch");
    }
    for (const auto& [e, c] : rhs.terms_) {
        add_term(-c, e);
    }
    return *this;
}

Polynomial& Polynomial::operator*=(double rhs)
{
    if (rhs == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) {
        c *= rhs;
    }
    return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs)
{
    if (lhs.vars_ != rhs.vars_) {
        throw Error(Errc::ShapeMismatch, "polynomial arity mismatch");
    }
    Polynomial out(lhs.vars_);
    for (const auto& [ea, ca] : lhs.terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            Polynomial::Exponents e(ea.size());
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = ea[i] + eb[i];
            }
            out.add_term(ca * cb, e);
        }
    }
    return out;
}

std::array<double, 4> polynomial_derivatives(std::span<const double> coefficients, double x)
{
    // Horner on value and the first three derivatives at once.
    std::array<double, 4> d{0.0, 0.0, 0.0, 0.0};
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        d[3] = d[3] * x + 3.0 * d[2];
        d[2] = d[2] * x + 2.0 * d[1];
        d[1] = d[1] * x + d[0];
        d[0] = d[0] * x + *it;
    }
    return d;
}

PiecewisePolynomial::PiecewisePolynomial(std::vector<Piece> pieces) : pieces_(std::move(pieces))
{
    validate();
}

PiecewisePolynomial PiecewisePolynomial::polynomial(std::vector<double> coefficients)
{
    return PiecewisePolynomial({Piece{-std::numeric_limits<double>::infinity(),
                                      std::numeric_limits<double>::infinity(), std::move(coefficients)}});
}

double PiecewisePolynomial::lower() const noexcept
{
    return pieces_.empty() ? 0.0 : pieces_.front().lo;
}

double PiecewisePolynomial::upper() const noexcept
{
    return pieces_.empty() ? 0.0 : pieces_.back().hi;
}

void PiecewisePolynomial::validate() const
{
    if (pieces_.empty()) {
        throw Error(Errc::InvalidExpression, "piecewise polynomial without pieces");
    }
    for (std::size_t k = 0; k < pieces_.size(); ++k) {
        const auto& p = pieces_[k];
        if (!(p.lo < p.hi) || std::isnan(p.lo) || std::isnan(p.hi)) {
            throw Error(Errc::InvalidExpression, "empty piece interval");
        }
        if (p.coefficients.empty()) {
            throw Error(Errc::InvalidExpression, "piece without coefficients");
        }
        if (k == 0) {
            continue;
        }
        const auto& prev = pieces_[k - 1];
        if (prev.hi != p.lo) {
            throw Error(Errc::InvalidExpression, "pieces are not contiguous");
        }
        const double b = p.lo;
        const auto left = polynomial_derivatives(prev.coefficients, b);
        const auto right = polynomial_derivatives(p.coefficients, b);
        for (std::size_t d = 0; d < 4; ++d) {
            const double scale = std::max({1.0, std::abs(left[d]), std::abs(right[d])});
            if (std::abs(left[d] - right[d]) > 1e-9 * scale) {
                throw Error(Errc::InvalidExpression,
                            "piecewise join at " + std::to_string(b) + " is not C3 (derivative order " +
                                std::to_string(d) + ")");
            }
        }
    }
}

const PiecewisePolynomial::Piece& PiecewisePolynomial::piece_at(double x) const
{
    for (const auto& p : pieces_) {
        if (x >= p.lo && x < p.hi) {
            return p;
        }
    }
    // A finite upper end belongs to the last piece.
    if (!pieces_.empty() && x == pieces_.back().hi) {
        return pieces_.back();
    }
    throw Error(Errc::PointOutsideDomain, "argument " + std::to_string(x) + " outside piecewise domain");
}

std::array<double, 4> PiecewisePolynomial::evaluate(double x) const
{
    return polynomial_derivatives(piece_at(x).coefficients, x);
}

bool PiecewisePolynomial::locally_constant_at(double x) const
{
    const auto& c = piece_at(x).coefficients;
    return std::all_of(c.begin() + 1, c.end(), [](double v) { return v == 0.0; });
}

} // namespace cosym
