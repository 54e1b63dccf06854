#include "cosym/expression.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <string>

namespace cosym {

struct Expr::Node {
    Kind kind = Kind::Constant;
    double value = 0.0;
    int index = 0;
    std::vector<Expr> children;
    PiecewisePolynomial f;
    Polynomial poly;
};

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value)
{
    auto node = std::make_shared<Node>();
    node->kind = Kind::Constant;
    node->value = value;
    return Expr(std::move(node));
}

Expr Expr::coordinate(int index)
{
    if (index < 0) {
        throw Error(Errc::InvalidExpression, "negative coordinate index");
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Coordinate;
    node->index = index;
    return Expr(std::move(node));
}

Expr Expr::sum(std::vector<Expr> terms)
{
    std::erase_if(terms, [](const Expr& e) { return e.is_zero(); });
    if (terms.empty()) {
        return constant(0.0);
    }
    if (terms.size() == 1) {
        return terms.front();
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Sum;
    node->children = std::move(terms);
    return Expr(std::move(node));
}

Expr Expr::product(std::vector<Expr> factors)
{
    if (factors.empty()) {
        return constant(1.0);
    }
    if (std::any_of(factors.begin(), factors.end(), [](const Expr& e) { return e.is_zero(); })) {
        return constant(0.0);
    }
    if (factors.size() == 1) {
        return factors.front();
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Product;
    node->children = std::move(factors);
    return Expr(std::move(node));
}

Expr Expr::power(Expr base, int exponent)
{
    if (exponent < 0) {
        throw Error(Errc::InvalidExpression, "negative exponent " + std::to_string(exponent));
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Power;
    node->index = exponent;
    node->children = {std::move(base)};
    return Expr(std::move(node));
}

Expr Expr::piecewise(PiecewisePolynomial f, Expr argument)
{
    auto node = std::make_shared<Node>();
    node->kind = Kind::Piecewise;
    node->f = std::move(f);
    node->children = {std::move(argument)};
    return Expr(std::move(node));
}

Expr Expr::polynomial(Polynomial p)
{
    if (p.is_zero()) {
        return constant(0.0);
    }
    auto node = std::make_shared<Node>();
    node->kind = Kind::Polynomial;
    node->poly = std::move(p);
    return Expr(std::move(node));
}

Expr::Kind Expr::kind() const noexcept
{
    return node_->kind;
}

bool Expr::is_zero() const noexcept
{
    return node_->kind == Kind::Constant && node_->value == 0.0;
}

int Expr::max_coordinate() const
{
    switch (node_->kind) {
    case Kind::Constant: return -1;
    case Kind::Coordinate: return node_->index;
    case Kind::Polynomial: {
        int highest = -1;
        for (const auto& [e, c] : node_->poly.terms()) {
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] != 0) {
                    highest = std::max(highest, static_cast<int>(i));
                }
            }
        }
        return highest;
    }
    default: break;
    }
    int highest = -1;
    for (const auto& c : node_->children) {
        highest = std::max(highest, c.max_coordinate());
    }
    return highest;
}

double Expr::evaluate(std::span<const double> x) const
{
    const Node& n = *node_;
    switch (n.kind) {
    case Kind::Constant: return n.value;
    case Kind::Coordinate:
        if (static_cast<std::size_t>(n.index) >= x.size()) {
            throw Error(Errc::InvalidExpression, "coordinate index out of range");
        }
        return x[static_cast<std::size_t>(n.index)];
    case Kind::Sum: {
        double s = 0.0;
        for (const auto& c : n.children) {
            s += c.evaluate(x);
        }
        return s;
    }
    case Kind::Product: {
        double p = 1.0;
        for (const auto& c : n.children) {
            p *= c.evaluate(x);
        }
        return p;
    }
    case Kind::Power: {
        const double b = n.children.front().evaluate(x);
        double p = 1.0;
        for (int k = 0; k < n.index; ++k) {
            p *= b;
        }
        return p;
    }
    case Kind::Piecewise: return n.f.evaluate(n.children.front().evaluate(x))[0];
    case Kind::Polynomial:
        if (static_cast<std::size_t>(n.poly.vars()) > x.size()) {
            throw Error(Errc::InvalidExpression, "polynomial arity exceeds chart dimension");
        }
        return n.poly.evaluate(x);
    }
    return 0.0;
}

Taylor Expr::evaluate(std::span<const Taylor> coordinates) const
{
    if (coordinates.empty()) {
        throw Error(Errc::InvalidExpression, "no coordinate jets supplied");
    }
    const Node& n = *node_;
    const auto& basis = coordinates.front();
    switch (n.kind) {
    case Kind::Constant: {
        Taylor t = basis * 0.0;
        t += n.value;
        return t;
    }
    case Kind::Coordinate:
        if (static_cast<std::size_t>(n.index) >= coordinates.size()) {
            throw Error(Errc::InvalidExpression, "coordinate index out of range");
        }
        return coordinates[static_cast<std::size_t>(n.index)];
    case Kind::Sum: {
        Taylor s = n.children.front().evaluate(coordinates);
        for (std::size_t i = 1; i < n.children.size(); ++i) {
            s += n.children[i].evaluate(coordinates);
        }
        return s;
    }
    case Kind::Product: {
        Taylor p = n.children.front().evaluate(coordinates);
        for (std::size_t i = 1; i < n.children.size(); ++i) {
            p = p * n.children[i].evaluate(coordinates);
        }
        return p;
    }
    case Kind::Power: return n.children.front().evaluate(coordinates).pow(n.index);
    case Kind::Piecewise: {
        const Taylor arg = n.children.front().evaluate(coordinates);
        return arg.compose(n.f.evaluate(arg.value()));
    }
    case Kind::Polynomial: {
        const auto vars = static_cast<std::size_t>(n.poly.vars());
        if (vars > coordinates.size()) {
            throw Error(Errc::InvalidExpression, "polynomial arity exceeds chart dimension");
        }
        // Power tables per variable, grown on demand.
        std::vector<std::vector<Taylor>> powers(vars);
        auto power_of = [&](std::size_t var, int k) -> const Taylor& {
            auto& table = powers[var];
            if (table.empty()) {
                Taylor one = basis * 0.0;
                one += 1.0;
                table.push_back(std::move(one));
            }
            while (static_cast<int>(table.size()) <= k) {
                table.push_back(table.back() * coordinates[var]);
            }
            return table[static_cast<std::size_t>(k)];
        };
        Taylor total = basis * 0.0;
        for (const auto& [e, c] : n.poly.terms()) {
            Taylor term = basis * 0.0;
            term += c;
            for (std::size_t i = 0; i < vars; ++i) {
                if (e[i] != 0) {
                    term = term * power_of(i, e[i]);
                }
            }
            total += term;
        }
        return total;
    }
    }
    return basis * 0.0;
}

Expr operator+(const Expr& a, const Expr& b)
{
    return Expr::sum({a, b});
}

Expr operator-(const Expr& a, const Expr& b)
{
    return Expr::sum({a, Expr::product({Expr::constant(-1.0), b})});
}

Expr operator*(const Expr& a, const Expr& b)
{
    return Expr::product({a, b});
}

Expr operator*(double a, const Expr& b)
{
    return Expr::product({Expr::constant(a), b});
}

} // namespace cosym
