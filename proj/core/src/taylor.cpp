#include "cosym/taylor.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace cosym {

namespace {

double multiset_factorial(const std::vector<int>& vars)
{
    double weight = 1.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= vars.size(); ++i) {
        if (i < vars.size() && vars[i] == vars[i - 1]) {
            ++run;
        } else {
            for (std::size_t k = 2; k <= run; ++k) {
                weight *= static_cast<double>(k);
            }
            run = 1;
        }
    }
    return weight;
}

} // namespace

TaylorBasis::TaylorBasis(int vars) : vars_(vars)
{
    if (vars < 1) {
        throw Error(Errc::DimensionMismatch, "Taylor basis needs at least one variable");
    }
    const auto n = static_cast<std::size_t>(vars);

    // Monomials are sorted variable multisets, enumerated by degree.
    std::vector<std::vector<int>> monomials;
    monomials.push_back({});
    sizes_[0] = 1;
    for (int a = 0; a < vars; ++a) {
        monomials.push_back({a});
    }
    sizes_[1] = monomials.size();
    for (int a = 0; a < vars; ++a) {
        for (int b = a; b < vars; ++b) {
            monomials.push_back({a, b});
        }
    }
    sizes_[2] = monomials.size();
    for (int a = 0; a < vars; ++a) {
        for (int b = a; b < vars; ++b) {
            for (int c = b; c < vars; ++c) {
                monomials.push_back({a, b, c});
            }
        }
    }
    sizes_[3] = monomials.size();

    std::map<std::vector<int>, std::uint32_t> lookup;
    for (std::size_t m = 0; m < monomials.size(); ++m) {
        lookup.emplace(monomials[m], static_cast<std::uint32_t>(m));
        degrees_.push_back(static_cast<int>(monomials[m].size()));
        weights_.push_back(multiset_factorial(monomials[m]));
    }

    index2_.resize(n * n);
    index3_.resize(n * n * n);
    for (int a = 0; a < vars; ++a) {
        for (int b = 0; b < vars; ++b) {
            std::vector<int> key{a, b};
            std::sort(key.begin(), key.end());
            index2_[static_cast<std::size_t>(a * vars + b)] = lookup.at(key);
            for (int c = 0; c < vars; ++c) {
                std::vector<int> key3{a, b, c};
                std::sort(key3.begin(), key3.end());
                index3_[static_cast<std::size_t>((a * vars + b) * vars + c)] = lookup.at(key3);
            }
        }
    }

    std::vector<std::vector<ProductTerm>> by_degree(kMaxJetOrder + 1);
    for (std::size_t i = 0; i < monomials.size(); ++i) {
        for (std::size_t j = 0; j < monomials.size(); ++j) {
            const auto degree = monomials[i].size() + monomials[j].size();
            if (degree > static_cast<std::size_t>(kMaxJetOrder)) {
                continue;
            }
            std::vector<int> key = monomials[i];
            key.insert(key.end(), monomials[j].begin(), monomials[j].end());
            std::sort(key.begin(), key.end());
            by_degree[degree].push_back(
                {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), lookup.at(key)});
        }
    }
    for (int d = 0; d <= kMaxJetOrder; ++d) {
        products_.insert(products_.end(), by_degree[static_cast<std::size_t>(d)].begin(),
                         by_degree[static_cast<std::size_t>(d)].end());
        product_counts_[static_cast<std::size_t>(d)] = products_.size();
    }
}

std::shared_ptr<const TaylorBasis> TaylorBasis::get(int vars)
{
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const TaylorBasis>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[vars];
    if (!slot) {
        slot = std::make_shared<const TaylorBasis>(vars);
    }
    return slot;
}

std::span<const TaylorBasis::ProductTerm> TaylorBasis::product_terms(int order) const noexcept
{
    return {products_.data(), product_counts_[static_cast<std::size_t>(order)]};
}

std::size_t TaylorBasis::index1(int a) const noexcept
{
    return static_cast<std::size_t>(1 + a);
}

std::size_t TaylorBasis::index2(int a, int b) const noexcept
{
    return index2_[static_cast<std::size_t>(a * vars_ + b)];
}

std::size_t TaylorBasis::index3(int a, int b, int c) const noexcept
{
    return index3_[static_cast<std::size_t>((a * vars_ + b) * vars_ + c)];
}

Taylor::Taylor(std::shared_ptr<const TaylorBasis> basis, int order, double value)
    : basis_(std::move(basis)), order_(order)
{
    if (order < 0 || order > kMaxJetOrder) {
        throw Error(Errc::JetOrderUnsupported, "jet order " + std::to_string(order));
    }
    coeffs_.assign(basis_->size(order), 0.0);
    coeffs_[0] = value;
}

Taylor::Taylor(std::shared_ptr<const TaylorBasis> basis, int order, std::vector<double> coeffs)
    : basis_(std::move(basis)), order_(order), coeffs_(std::move(coeffs))
{
}

Taylor Taylor::variable(std::shared_ptr<const TaylorBasis> basis, int order, int var, double value)
{
    Taylor result(std::move(basis), order, value);
    if (order >= 1) {
        result.coeffs_[result.basis_->index1(var)] = 1.0;
    }
    return result;
}

double Taylor::derivative(std::span<const int> vars) const
{
    if (static_cast<int>(vars.size()) > order_) {
        throw Error(Errc::JetOrderUnsupported, "derivative order exceeds jet order");
    }
    std::size_t m = 0;
    switch (vars.size()) {
    case 0: m = 0; break;
    case 1: m = basis_->index1(vars[0]); break;
    case 2: m = basis_->index2(vars[0], vars[1]); break;
    default: m = basis_->index3(vars[0], vars[1], vars[2]); break;
    }
    return coeffs_[m] * basis_->factorial_weight(m);
}

Taylor& Taylor::operator+=(const Taylor& rhs)
{
    order_ = std::min(order_, rhs.order_);
    coeffs_.resize(basis_->size(order_));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] += rhs.coeffs_[i];
    }
    return *this;
}

Taylor& Taylor::operator-=(const Taylor& rhs)
{
    order_ = std::min(order_, rhs.order_);
    coeffs_.resize(basis_->size(order_));
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        coeffs_[i] -= rhs.coeffs_[i];
    }
    return *this;
}

Taylor& Taylor::operator+=(double rhs) noexcept
{
    coeffs_[0] += rhs;
    return *this;
}

Taylor& Taylor::operator*=(double rhs) noexcept
{
    for (auto& c : coeffs_) {
        c *= rhs;
    }
    return *this;
}

Taylor operator*(const Taylor& lhs, const Taylor& rhs)
{
    const int order = std::min(lhs.order_, rhs.order_);
    std::vector<double> out(lhs.basis_->size(order), 0.0);
    const double* a = lhs.coeffs_.data();
    const double* b = rhs.coeffs_.data();
    for (const auto& term : lhs.basis_->product_terms(order)) {
        out[term.result] += a[term.lhs] * b[term.rhs];
    }
    return Taylor(lhs.basis_, order, std::move(out));
}

Taylor Taylor::pow(int exponent) const
{
    if (exponent < 0) {
        throw Error(Errc::InvalidExpression, "negative integer powers are outside the expression vocabulary");
    }
    Taylor result(basis_, order_, 1.0);
    Taylor base = *this;
    while (exponent > 0) {
        if ((exponent & 1) != 0) {
            result = result * base;
        }
        exponent >>= 1;
        if (exponent > 0) {
            base = base * base;
        }
    }
    return result;
}

Taylor Taylor::compose(const std::array<double, 4>& derivatives) const
{
    Taylor delta = *this;
    delta.coeffs_[0] = 0.0;
    // Horner in delta: f0 + delta*(f1 + delta*(f2/2 + delta*f3/6)).
    Taylor acc(basis_, order_, derivatives[3] / 6.0);
    acc = acc * delta;
    acc += derivatives[2] / 2.0;
    acc = acc * delta;
    acc += derivatives[1];
    acc = acc * delta;
    acc += derivatives[0];
    return acc;
}

} // namespace cosym
