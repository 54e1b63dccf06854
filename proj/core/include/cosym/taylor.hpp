#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace cosym {

inline constexpr int kMaxJetOrder = 3;

/// Monomial layout and product tables for truncated multivariate Taylor
/// polynomials of total degree <= kMaxJetOrder in a fixed number of variables.
/// Monomials are stored in graded order, so a jet truncated at order k is a
/// prefix of the full coefficient array.
class TaylorBasis {
public:
    struct ProductTerm {
        std::uint32_t lhs;
        std::uint32_t rhs;
        std::uint32_t result;
    };

    /// Shared, immutable basis for `vars` variables.
    static std::shared_ptr<const TaylorBasis> get(int vars);

    [[nodiscard]] int vars() const noexcept { return vars_; }

    /// Number of monomials of total degree <= order.
    [[nodiscard]] std::size_t size(int order) const noexcept { return sizes_[static_cast<std::size_t>(order)]; }

    [[nodiscard]] int degree_of(std::size_t monomial) const noexcept { return degrees_[monomial]; }

    [[nodiscard]] std::span<const ProductTerm> product_terms(int order) const noexcept;

    [[nodiscard]] std::size_t index1(int a) const noexcept;
    [[nodiscard]] std::size_t index2(int a, int b) const noexcept;
    [[nodiscard]] std::size_t index3(int a, int b, int c) const noexcept;

    /// alpha! for the monomial, i.e. the factor turning a Taylor coefficient into a partial derivative.
    [[nodiscard]] double factorial_weight(std::size_t monomial) const noexcept { return weights_[monomial]; }

    explicit TaylorBasis(int vars);

private:
    int vars_;
    std::array<std::size_t, kMaxJetOrder + 1> sizes_{};
    std::vector<int> degrees_;
    std::vector<double> weights_;
    std::vector<std::uint32_t> index2_;
    std::vector<std::uint32_t> index3_;
    std::vector<ProductTerm> products_;
    std::array<std::size_t, kMaxJetOrder + 1> product_counts_{};
};

/// Truncated Taylor expansion of a scalar function around a point.
/// Arithmetic is exact up to rounding for every retained coefficient.
class Taylor {
public:
    Taylor(std::shared_ptr<const TaylorBasis> basis, int order, double value = 0.0);

    static Taylor variable(std::shared_ptr<const TaylorBasis> basis, int order, int var, double value);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] const TaylorBasis& basis() const noexcept { return *basis_; }
    [[nodiscard]] double value() const noexcept { return coeffs_[0]; }
    [[nodiscard]] std::span<const double> coefficients() const noexcept { return coeffs_; }

    /// Partial derivative along the listed variables (size 0..order).
    [[nodiscard]] double derivative(std::span<const int> vars) const;

    Taylor& operator+=(const Taylor& rhs);
    Taylor& operator-=(const Taylor& rhs);
    Taylor& operator+=(double rhs) noexcept;
    Taylor& operator*=(double rhs) noexcept;

    friend Taylor operator+(Taylor lhs, const Taylor& rhs) { return lhs += rhs; }
    friend Taylor operator-(Taylor lhs, const Taylor& rhs) { return lhs -= rhs; }
    friend Taylor operator*(const Taylor& lhs, const Taylor& rhs);
    friend Taylor operator*(Taylor lhs, double rhs) noexcept { return lhs *= rhs; }
    friend Taylor operator*(double lhs, Taylor rhs) noexcept { return rhs *= lhs; }

    [[nodiscard]] Taylor pow(int exponent) const;

    /// f(this) given f and its first three derivatives at this->value().
    [[nodiscard]] Taylor compose(const std::array<double, 4>& derivatives) const;

private:
    Taylor(std::shared_ptr<const TaylorBasis> basis, int order, std::vector<double> coeffs);

    std::shared_ptr<const TaylorBasis> basis_;
    int order_;
    std::vector<double> coeffs_;
};

} // namespace cosym
