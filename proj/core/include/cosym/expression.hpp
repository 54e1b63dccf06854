#pragma once

#include "cosym/polynomial.hpp"
#include "cosym/taylor.hpp"

#include <memory>
#include <span>
#include <vector>

namespace cosym {

/// Closed-form scalar function of chart coordinates. Vocabulary: constants,
/// coordinates, sums, products, nonnegative integer powers, C3 piecewise
/// polynomials of a subexpression, and sparse polynomials in the coordinates.
class Expr {
public:
    enum class Kind { Constant, Coordinate, Sum, Product, Power, Piecewise, Polynomial };

    Expr();

    static Expr constant(double value);
    static Expr coordinate(int index);
    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    static Expr power(Expr base, int exponent);
    static Expr piecewise(PiecewisePolynomial f, Expr argument);
    static Expr polynomial(Polynomial p);

    [[nodiscard]] Kind kind() const noexcept;

    /// True for the literal constant 0.
    [[nodiscard]] bool is_zero() const noexcept;

    /// Highest coordinate index referenced, or -1.
    [[nodiscard]] int max_coordinate() const;

    [[nodiscard]] double evaluate(std::span<const double> x) const;

    /// Propagates the truncated Taylor expansions of the coordinates.
    [[nodiscard]] Taylor evaluate(std::span<const Taylor> coordinates) const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator*(double a, const Expr& b);

    struct Node;

private:
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;
};

} // namespace cosym
