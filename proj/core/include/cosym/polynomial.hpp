#pragma once

#include <array>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cosym {

/// Sparse real polynomial in a fixed number of variables.
class Polynomial {
public:
    using Exponents = std::vector<int>;

    explicit Polynomial(int vars = 0);

    static Polynomial constant(int vars, double value);
    static Polynomial variable(int vars, int index);
    static Polynomial monomial(double coeff, Exponents exponents);

    [[nodiscard]] int vars() const noexcept { return vars_; }
    [[nodiscard]] const std::map<Exponents, double>& terms() const noexcept { return terms_; }
    [[nodiscard]] bool is_zero() const noexcept { return terms_.empty(); }
    [[nodiscard]] int degree() const noexcept;

    void add_term(double coeff, const Exponents& exponents);

    [[nodiscard]] double evaluate(std::span<const double> x) const;
    [[nodiscard]] Polynomial derivative(int var) const;

    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    Polynomial& operator*=(double rhs);

    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend Polynomial operator*(Polynomial lhs, double rhs) { return lhs *= rhs; }
    friend Polynomial operator*(double lhs, Polynomial rhs) { return rhs *= lhs; }
    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
    friend bool operator==(const Polynomial& lhs, const Polynomial& rhs) = default;

private:
    void prune(const Exponents& key);

    int vars_;
    std::map<Exponents, double> terms_;
};

/// Univariate piecewise polynomial. Piece k covers [lo_k, hi_k); at an exact
/// breakpoint the right-hand piece is used. Coefficients are in powers of x.
class PiecewisePolynomial {
public:
    struct Piece {
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        std::vector<double> coefficients;
    };

    PiecewisePolynomial() = default;
    explicit PiecewisePolynomial(std::vector<Piece> pieces);

    static PiecewisePolynomial polynomial(std::vector<double> coefficients);

    [[nodiscard]] const std::vector<Piece>& pieces() const noexcept { return pieces_; }
    [[nodiscard]] double lower() const noexcept;
    [[nodiscard]] double upper() const noexcept;

    /// Value and first three derivatives.
    [[nodiscard]] std::array<double, 4> evaluate(double x) const;

    /// True when the piece active at x has no nonconstant terms.
    [[nodiscard]] bool locally_constant_at(double x) const;

private:
    [[nodiscard]] const Piece& piece_at(double x) const;
    void validate() const;

    std::vector<Piece> pieces_;
};

std::array<double, 4> polynomial_derivatives(std::span<const double> coefficients, double x);

} // namespace cosym
