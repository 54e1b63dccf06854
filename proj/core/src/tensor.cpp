#include "cosym/tensor.hpp"

#include "cosym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cosym {

namespace {

std::size_t sz(int k)
{
    return static_cast<std::size_t>(k);
}

std::size_t ipow(int n, int r)
{
    std::size_t p = 1;
    for (int i = 0; i < r; ++i) {
        p *= sz(n);
    }
    return p;
}

// Calls f(idx) for every index tuple of the given rank, in row-major order.
template <class F>
void for_each_index(int n, int rank, F&& f)
{
    std::vector<int> idx(sz(rank), 0);
    const std::size_t total = ipow(n, rank);
    for (std::size_t flat = 0; flat < total; ++flat) {
        f(std::span<const int>(idx));
        for (int s = rank - 1; s >= 0; --s) {
            if (++idx[sz(s)] < n) {
                break;
            }
            idx[sz(s)] = 0;
        }
    }
}

void require_slot(const DenseTensor& t, int slot)
{
    if (slot < 0 || slot >= t.rank()) {
        throw Error(Errc::SlotOutOfRange, "slot " + std::to_string(slot) + " of a rank-" + std::to_string(t.rank()) +
                                              " tensor");
    }
}

void require_rank2(const DenseTensor& t, Variance v, const char* what)
{
    if (t.rank() != 2 || t.mask()[0] != v || t.mask()[1] != v) {
        throw Error(Errc::VarianceMaskMismatch, std::string(what) + " has the wrong variance");
    }
}

double pair_defect(const DenseTensor& t, int a, int b, double sign)
{
    double worst = 0.0;
    for_each_index(t.dim(), t.rank(), [&](std::span<const int> idx) {
        std::vector<int> swapped(idx.begin(), idx.end());
        std::swap(swapped[sz(a)], swapped[sz(b)]);
        worst = std::max(worst, std::abs(t.at(idx) - sign * t.at(swapped)));
    });
    return worst;
}

} // namespace

DenseTensor::DenseTensor(int n, std::vector<Variance> mask) : n_(n), mask_(std::move(mask))
{
    if (n < 1) {
        throw Error(Errc::DimensionMismatch, "tensor dimension must be positive");
    }
    if (mask_.size() > 5) {
        throw Error(Errc::SlotOutOfRange, "tensor rank above 5");
    }
    data_.assign(ipow(n, rank()), 0.0);
}

DenseTensor DenseTensor::covariant(int n, int rank)
{
    return DenseTensor(n, std::vector<Variance>(sz(rank), Variance::Covariant));
}

DenseTensor DenseTensor::scalar(double value)
{
    DenseTensor t(1, {});
    t.data_[0] = value;
    return t;
}

DenseTensor DenseTensor::matrix(int n, std::span<const double> values, Variance a, Variance b)
{
    DenseTensor t(n, {a, b});
    if (values.size() != t.size()) {
        throw Error(Errc::ShapeMismatch, "matrix component count");
    }
    std::copy(values.begin(), values.end(), t.data_.begin());
    return t;
}

double DenseTensor::max_abs() const noexcept
{
    double m = 0.0;
    for (double v : data_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

double DenseTensor::symmetry_defect() const
{
    double worst = 0.0;
    for (const auto& [a, b] : symmetric_slots) {
        worst = std::max(worst, pair_defect(*this, a, b, 1.0));
    }
    for (const auto& [a, b] : antisymmetric_slots) {
        worst = std::max(worst, pair_defect(*this, a, b, -1.0));
    }
    const double scale = max_abs();
    return scale == 0.0 ? 0.0 : worst / scale;
}

void DenseTensor::check_symmetries(double tol) const
{
    const double defect = symmetry_defect();
    if (defect > tol) {
        throw Error(Errc::SymmetryViolation, "declared symmetry violated by " + std::to_string(defect));
    }
}

Eigen::MatrixXd DenseTensor::as_matrix() const
{
    if (rank() != 2) {
        throw Error(Errc::ShapeMismatch, "as_matrix needs a rank-2 tensor");
    }
    Eigen::MatrixXd m(n_, n_);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < n_; ++j) {
            m(i, j) = (*this)(i, j);
        }
    }
    return m;
}

DenseTensor operator+(DenseTensor a, const DenseTensor& b)
{
    if (a.n_ != b.n_ || a.mask_ != b.mask_) {
        throw Error(Errc::DimensionMismatch, "tensor sum of different shapes");
    }
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
        a.data_[i] += b.data_[i];
    }
    return a;
}

DenseTensor operator-(DenseTensor a, const DenseTensor& b)
{
    if (a.n_ != b.n_ || a.mask_ != b.mask_) {
        throw Error(Errc::DimensionMismatch, "tensor difference of different shapes");
    }
    for (std::size_t i = 0; i < a.data_.size(); ++i) {
        a.data_[i] -= b.data_[i];
    }
    return a;
}

DenseTensor operator*(double c, DenseTensor a)
{
    for (auto& v : a.data_) {
        v *= c;
    }
    return a;
}

DenseTensor contract(const DenseTensor& t, int slot_a, int slot_b, const DenseTensor* metric)
{
    require_slot(t, slot_a);
    require_slot(t, slot_b);
    if (slot_a == slot_b) {
        throw Error(Errc::SlotOutOfRange, "contraction slots must differ");
    }
    const int n = t.dim();
    const Variance va = t.mask()[sz(slot_a)];
    const bool needs_metric = va == t.mask()[sz(slot_b)];
    if (needs_metric) {
        const Variance want = va == Variance::Covariant ? Variance::Contravariant : Variance::Covariant;
        if (metric == nullptr || metric->rank() != 2 || metric->mask()[0] != want || metric->mask()[1] != want ||
            metric->dim() != n) {
            throw Error(Errc::VarianceMismatchWithoutMetric,
                        "slots share a variance; supply the matching metric or inverse metric");
        }
    }

    std::vector<Variance> mask;
    for (int s = 0; s < t.rank(); ++s) {
        if (s != slot_a && s != slot_b) {
            mask.push_back(t.mask()[sz(s)]);
        }
    }
    DenseTensor out = mask.empty() ? DenseTensor::scalar(0.0) : DenseTensor(n, mask);
    std::vector<int> full(sz(t.rank()));
    for_each_index(n, static_cast<int>(mask.size()), [&](std::span<const int> rest) {
        std::size_t r = 0;
        for (int s = 0; s < t.rank(); ++s) {
            if (s != slot_a && s != slot_b) {
                full[sz(s)] = rest[r++];
            }
        }
        double sum = 0.0;
        for (int p = 0; p < n; ++p) {
            full[sz(slot_a)] = p;
            if (needs_metric) {
                for (int q = 0; q < n; ++q) {
                    full[sz(slot_b)] = q;
                    sum += t.at(full) * (*metric)(p, q);
                }
            } else {
                full[sz(slot_b)] = p;
                sum += t.at(full);
            }
        }
        if (mask.empty()) {
            out.data()[0] = sum;
        } else {
            out.at(rest) = sum;
        }
    });
    return out;
}

namespace {

DenseTensor apply_on_slot(const DenseTensor& t, int slot, const DenseTensor& m, Variance from, Variance to)
{
    require_slot(t, slot);
    if (t.mask()[sz(slot)] != from) {
        throw Error(Errc::VarianceMaskMismatch, "slot " + std::to_string(slot) + " has the wrong variance");
    }
    if (m.dim() != t.dim()) {
        throw Error(Errc::DimensionMismatch, "metric dimension");
    }
    auto mask = t.mask();
    mask[sz(slot)] = to;
    DenseTensor out(t.dim(), mask);
    std::vector<int> src;
    for_each_index(t.dim(), t.rank(), [&](std::span<const int> idx) {
        src.assign(idx.begin(), idx.end());
        double sum = 0.0;
        for (int p = 0; p < t.dim(); ++p) {
            src[sz(slot)] = p;
            sum += m(idx[sz(slot)], p) * t.at(src);
        }
        out.at(idx) = sum;
    });
    return out;
}

} // namespace

DenseTensor lower(const DenseTensor& t, int slot, const DenseTensor& g)
{
    require_rank2(g, Variance::Covariant, "metric");
    return apply_on_slot(t, slot, g, Variance::Contravariant, Variance::Covariant);
}

DenseTensor raise(const DenseTensor& t, int slot, const DenseTensor& g_inverse)
{
    require_rank2(g_inverse, Variance::Contravariant, "inverse metric");
    return apply_on_slot(t, slot, g_inverse, Variance::Covariant, Variance::Contravariant);
}

DenseTensor valued_wedge(const DenseTensor& a, const DenseTensor& b)
{
    if (a.rank() != 2 || b.rank() != 2) {
        throw Error(Errc::ShapeMismatch, "valued wedge needs rank-2 arguments");
    }
    if (a.dim() != b.dim()) {
        throw Error(Errc::DimensionMismatch, "valued wedge arguments differ in dimension");
    }
    const int n = a.dim();
    DenseTensor out = DenseTensor::covariant(n, 4);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    out(i, j, k, l) = a(i, k) * b(j, l) - a(j, k) * b(i, l) - a(i, l) * b(j, k) + a(j, l) * b(i, k);
                }
            }
        }
    }
    return out;
}

std::vector<std::pair<int, int>> two_form_basis(int n)
{
    std::vector<std::pair<int, int>> basis;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            basis.emplace_back(i, j);
        }
    }
    return basis;
}

Eigen::MatrixXd two_form_operator(const DenseTensor& W, const DenseTensor& g_inverse)
{
    if (W.rank() != 4) {
        throw Error(Errc::ShapeMismatch, "two-form operator needs a rank-4 tensor");
    }
    require_rank2(g_inverse, Variance::Contravariant, "inverse metric");
    const int n = W.dim();
    const double scale = W.max_abs();
    double defect = std::max(pair_defect(W, 0, 1, -1.0), pair_defect(W, 2, 3, -1.0));
    if (scale > 0.0 && defect > 1e-9 * scale) {
        throw Error(Errc::SymmetryViolation, "input is not antisymmetric in its index pairs (defect " +
                                                 std::to_string(defect / scale) + ")");
    }

    // W_ij^kl = W_ijab g^ak g^bl, raised in two passes.
    DenseTensor half(n, {Variance::Covariant, Variance::Covariant, Variance::Covariant, Variance::Contravariant});
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int a = 0; a < n; ++a) {
                for (int l = 0; l < n; ++l) {
                    double sum = 0.0;
                    for (int b = 0; b < n; ++b) {
                        sum += W(i, j, a, b) * g_inverse(b, l);
                    }
                    half(i, j, a, l) = sum;
                }
            }
        }
    }
    const auto basis = two_form_basis(n);
    const auto N = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m(N, N);
    for (Eigen::Index r = 0; r < N; ++r) {
        const auto [i, j] = basis[sz(static_cast<int>(r))];
        for (Eigen::Index c = 0; c < N; ++c) {
            const auto [k, l] = basis[sz(static_cast<int>(c))];
            double sum = 0.0;
            for (int a = 0; a < n; ++a) {
                sum += half(i, j, a, l) * g_inverse(a, k);
            }
            m(r, c) = sum;
        }
    }
    return m;
}

Eigen::MatrixXd two_form_gram(const DenseTensor& g_inverse)
{
    require_rank2(g_inverse, Variance::Contravariant, "inverse metric");
    const auto basis = two_form_basis(g_inverse.dim());
    const auto N = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd m(N, N);
    for (Eigen::Index r = 0; r < N; ++r) {
        const auto [i, j] = basis[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < N; ++c) {
            const auto [k, l] = basis[static_cast<std::size_t>(c)];
            m(r, c) = g_inverse(i, k) * g_inverse(j, l) - g_inverse(i, l) * g_inverse(j, k);
        }
    }
    return m;
}

Eigen::MatrixXd wedge_divisibility_system(std::span<const DenseTensor> two_forms)
{
    if (two_forms.empty()) {
        throw Error(Errc::EmptyInput, "no two-forms supplied");
    }
    const int n = two_forms.front().dim();
    std::vector<std::array<int, 3>> triples;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            for (int c = b + 1; c < n; ++c) {
                triples.push_back({a, b, c});
            }
        }
    }
    const auto rows = static_cast<Eigen::Index>(triples.size() * two_forms.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, n);
    Eigen::Index r = 0;
    for (const auto& omega : two_forms) {
        if (omega.dim() != n || omega.rank() != 2) {
            throw Error(Errc::DimensionMismatch, "two-forms must share one dimension");
        }
        for (const auto& [a, b, c] : triples) {
            m(r, a) += omega(b, c);
            m(r, b) += omega(c, a);
            m(r, c) += omega(a, b);
            ++r;
        }
    }
    return m;
}

RankInfo numerical_rank(const Eigen::MatrixXd& m, double rel)
{
    RankInfo info;
    if (m.size() == 0) {
        return info;
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    info.singular_values.assign(s.data(), s.data() + s.size());
    const double top = s.size() > 0 ? s(0) : 0.0;
    if (top == 0.0) {
        return info;
    }
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (s(i) > rel * top) {
            ++info.rank;
        }
        if (s(i) > 1e-10 * top && s(i) < 1e-6 * top) {
            info.ambiguous = true;
        }
    }
    return info;
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, double rel)
{
    const auto cols = m.cols();
    if (m.rows() == 0) {
        return Eigen::MatrixXd::Identity(cols, cols);
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double top = s.size() > 0 ? s(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        if (top > 0.0 && s(i) > rel * top) {
            ++rank;
        }
    }
    return svd.matrixV().rightCols(cols - rank);
}

SignatureDiagnostic signature(const DenseTensor& g)
{
    if (g.rank() != 2) {
        throw Error(Errc::ShapeMismatch, "signature needs a rank-2 tensor");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.as_matrix(), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    SignatureDiagnostic d;
    const double top = ev.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        d.eigenvalues.push_back(ev(i));
        if (std::abs(ev(i)) <= 1e-12 * top || top == 0.0) {
            ++d.zero;
        } else if (ev(i) < 0.0) {
            ++d.negative;
        } else {
            ++d.positive;
        }
    }
    return d;
}

DenseTensor inverse_metric(const DenseTensor& g)
{
    if (g.rank() != 2) {
        throw Error(Errc::ShapeMismatch, "inverse needs a rank-2 tensor");
    }
    const Eigen::MatrixXd inv = g.as_matrix().inverse();
    const auto flip = [](Variance v) {
        return v == Variance::Covariant ? Variance::Contravariant : Variance::Covariant;
    };
    DenseTensor out(g.dim(), {flip(g.mask()[0]), flip(g.mask()[1])});
    for (int i = 0; i < g.dim(); ++i) {
        for (int j = 0; j < g.dim(); ++j) {
            // Symmetrize so downstream symmetry checks stay exact.
            out(i, j) = 0.5 * (inv(i, j) + inv(j, i));
        }
    }
    return out;
}

} // namespace cosym
