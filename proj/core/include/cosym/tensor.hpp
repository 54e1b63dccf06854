#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cosym {

enum class Variance : std::uint8_t { Covariant, Contravariant };

/// Components of a rank 0..5 tensor in dimension n, row-major by slot.
class DenseTensor {
public:
    DenseTensor() = default;
    DenseTensor(int n, std::vector<Variance> mask);

    static DenseTensor covariant(int n, int rank);
    static DenseTensor scalar(double value);
    /// Rank-2 tensor from a row-major n x n array.
    static DenseTensor matrix(int n, std::span<const double> values, Variance a, Variance b);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] int rank() const noexcept { return static_cast<int>(mask_.size()); }
    [[nodiscard]] const std::vector<Variance>& mask() const noexcept { return mask_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] std::vector<double>& data() noexcept { return data_; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    template <class... I>
    double& operator()(I... idx)
    {
        const std::array<int, sizeof...(I)> i{static_cast<int>(idx)...};
        return data_[offset(i)];
    }
    template <class... I>
    [[nodiscard]] double operator()(I... idx) const
    {
        const std::array<int, sizeof...(I)> i{static_cast<int>(idx)...};
        return data_[offset(i)];
    }
    [[nodiscard]] double at(std::span<const int> idx) const { return data_[offset(idx)]; }
    double& at(std::span<const int> idx) { return data_[offset(idx)]; }

    [[nodiscard]] double max_abs() const noexcept;

    /// Declared symmetry metadata, checked on request.
    std::vector<std::pair<int, int>> symmetric_slots;
    std::vector<std::pair<int, int>> antisymmetric_slots;

    /// Largest violation of the declared symmetries, relative to max_abs().
    [[nodiscard]] double symmetry_defect() const;

    /// Throws SymmetryViolation when symmetry_defect() exceeds tol.
    void check_symmetries(double tol = 1e-12) const;

    [[nodiscard]] Eigen::MatrixXd as_matrix() const;

    friend DenseTensor operator+(DenseTensor a, const DenseTensor& b);
    friend DenseTensor operator-(DenseTensor a, const DenseTensor& b);
    friend DenseTensor operator*(double c, DenseTensor a);

private:
    [[nodiscard]] std::size_t offset(std::span<const int> idx) const
    {
        std::size_t off = 0;
        for (int i : idx) {
            off = off * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i);
        }
        return off;
    }

    int n_ = 0;
    std::vector<Variance> mask_;
    std::vector<double> data_;
};

/// Trace over two slots. Same-variance slots need the metric (for two
/// contravariant slots) or the inverse metric (for two covariant slots).
DenseTensor contract(const DenseTensor& t, int slot_a, int slot_b, const DenseTensor* metric = nullptr);

/// Lowers (with g) or raises (with g^-1) one slot.
DenseTensor lower(const DenseTensor& t, int slot, const DenseTensor& g);
DenseTensor raise(const DenseTensor& t, int slot, const DenseTensor& g_inverse);

/// (a^b)_ijkl = a_ik b_jl - a_jk b_il - a_il b_jk + a_jl b_ik.
DenseTensor valued_wedge(const DenseTensor& a, const DenseTensor& b);

/// Index pairs i<j in lexicographic order.
std::vector<std::pair<int, int>> two_form_basis(int n);

/// Matrix of the 2-form map Omega -> W.Omega, entries W_ij^kl in the i<j basis.
Eigen::MatrixXd two_form_operator(const DenseTensor& W, const DenseTensor& g_inverse);

/// Gram matrix of the 2-form inner product induced by g^-1 in the i<j basis.
Eigen::MatrixXd two_form_gram(const DenseTensor& g_inverse);

/// Rows: (xi ^ Omega)_abc for a<b<c and each Omega; columns: components of xi.
Eigen::MatrixXd wedge_divisibility_system(std::span<const DenseTensor> two_forms);

inline constexpr double kRankThreshold = 1e-8;

struct RankInfo {
    int rank = 0;
    std::vector<double> singular_values;
    /// Some singular value sits in the band where the decision depends on the cutoff.
    bool ambiguous = false;
};

/// Singular-value rank with cutoff rel * sigma_max; ambiguous band (1e-10, 1e-6) * sigma_max.
RankInfo numerical_rank(const Eigen::MatrixXd& m, double rel = kRankThreshold);

/// Orthonormal basis (columns) of the numerical kernel.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel = kRankThreshold);

struct SignatureDiagnostic {
    int negative = 0;
    int zero = 0;
    int positive = 0;
    std::vector<double> eigenvalues;
};

SignatureDiagnostic signature(const DenseTensor& g);

/// Inverse of a rank-2 tensor, variances flipped.
DenseTensor inverse_metric(const DenseTensor& g);

} // namespace cosym
