#pragma once

#include "qso/genotype.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qso {

inline constexpr double kConstructionTol = 1e-9;
inline constexpr double kTableTol = 1e-3;

/// Female:male mass split p:q, p + q = 1.
struct SexRatio {
    double p = 0.5;
    double q = 0.5;

    static SexRatio from_female_share(double p);
    bool one_to_one() const noexcept { return p == 0.5 && q == 0.5; }
};

/// Probability vector over Ω (length 2m), female block first.
class Distribution {
public:
    Distribution() = default;
    explicit Distribution(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }
    std::vector<double>& mutable_values() noexcept { return values_; }

    double sum() const noexcept;
    double female_mass(std::size_t m) const noexcept;

    friend bool operator==(const Distribution&, const Distribution&) = default;

private:
    std::vector<double> values_;
};

/// Point of the ordinary simplex S^{n-1}.
class ReducedDistribution {
public:
    ReducedDistribution() = default;
    explicit ReducedDistribution(std::vector<double> values) : values_(std::move(values)) {}

    static ReducedDistribution uniform(std::size_t n);
    static ReducedDistribution vertex(std::size_t n, std::size_t i);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    double sum() const noexcept;

    friend bool operator==(const ReducedDistribution&, const ReducedDistribution&) = default;

private:
    std::vector<double> values_;
};

double l1_distance(std::span<const double> a, std::span<const double> b);

/// Throws DistributionOutsideHyperSimplex unless lam is non-negative, has
/// unit mass and female mass p (all within tol).
void check_hyper_simplex(const Distribution& lam, std::size_t m, SexRatio ratio, double tol = kConstructionTol);
/// Throws DimensionMismatch / DistributionOutsideHyperSimplex.
void check_simplex(const ReducedDistribution& y, std::size_t n, double tol = kConstructionTol);

/// One measure μ_{σ'σ''} over Ω per (female trait, male trait) parent pair.
/// A single shared measure (the Mendelian μ_0) is the one-entry special case
/// handled by mendelian_coefficients directly.
class MeasureFamily {
public:
    explicit MeasureFamily(GenotypeSpace space);

    const GenotypeSpace& space() const noexcept { return space_; }

    void set(std::size_t female_trait, std::size_t male_trait, Distribution mu);
    bool has(std::size_t female_trait, std::size_t male_trait) const;
    /// Throws MissingPair when the pair was never set.
    const Distribution& at(std::size_t female_trait, std::size_t male_trait) const;

    /// Scales every measure to unit mass.
    MeasureFamily renormalized() const;

    friend bool operator==(const MeasureFamily&, const MeasureFamily&) = default;

private:
    std::size_t slot(std::size_t f, std::size_t m) const;

    GenotypeSpace space_;
    std::vector<Distribution> mu_;
    std::vector<bool> present_;
};

struct Violation {
    enum class Kind { negative, normalization, ratio, support, missing, asymmetry };
    Kind kind;
    std::size_t female_trait;
    std::size_t male_trait;
    std::size_t child;  // genotype index, or npos for pair-level checks
    double magnitude;

    std::string describe(const GenotypeSpace& space) const;
};

std::string_view to_string(Violation::Kind kind) noexcept;

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
};

/// Checks the measure-family invariants (non-negative, unit mass, gender
/// symmetric, every pair present).
ValidationReport validate_family(const MeasureFamily& family, double tol = kConstructionTol);

/// Heredity coefficients p_{σ'σ'',σ} stored for female-first parent pairs:
/// coefficient(f, m, σ) with f, m trait indices and σ a genotype index.
class HeredityTensor {
public:
    HeredityTensor(GenotypeSpace space, SexRatio ratio);
    HeredityTensor(GenotypeSpace space, SexRatio ratio, std::vector<double> coefficients);

    const GenotypeSpace& space() const noexcept { return space_; }
    SexRatio ratio() const noexcept { return ratio_; }

    double operator()(std::size_t female_trait, std::size_t male_trait, std::size_t child) const {
        return coeffs_[offset(female_trait, male_trait) + child];
    }
    double& operator()(std::size_t female_trait, std::size_t male_trait, std::size_t child) {
        return coeffs_[offset(female_trait, male_trait) + child];
    }

    /// Coefficient for an arbitrary ordered parent pair; zero for same gender.
    double coefficient(std::size_t parent_a, std::size_t parent_b, std::size_t child) const;

    std::span<const double> raw() const noexcept { return coeffs_; }

private:
    std::size_t offset(std::size_t f, std::size_t m) const noexcept {
        return (f * space_.trait_count() + m) * space_.size();
    }

    GenotypeSpace space_;
    SexRatio ratio_;
    std::vector<double> coeffs_;
};

/// p_{σ'σ'',σ} = 2 μ0(σ) / μ0(Ω_M(σ',σ'')) on the Mendelian offspring set.
HeredityTensor mendelian_coefficients(const GenotypeSpace& space, const Distribution& mu0);

/// p_{σ'σ'',σ} = 2 μ_{σ'σ''}(σ) for every mixed-gender pair.
HeredityTensor nonmendelian_coefficients(const MeasureFamily& family);

/// General p:q tensor from per-pair trait weights w_{f,m}(t) (each summing
/// to 1): p(f, m, (f,t)) = w/(2q), p(f, m, (m,t)) = w/(2p).
HeredityTensor sex_ratio_coefficients(const GenotypeSpace& space, SexRatio ratio,
                                      const std::vector<std::vector<double>>& trait_weights);

/// Lists every violated p:q constraint. Empty report iff the tensor has the
/// p:q property at tolerance tol.
ValidationReport validate_pq(const HeredityTensor& t, double tol = kConstructionTol);

/// Flags coefficients that are non-zero outside the Mendelian offspring set
/// of their parent pair.
ValidationReport validate_mendelian_support(const HeredityTensor& t, double tol = kConstructionTol);

/// λ'(σ) = 2 Σ_{σ'∈Ω_f, σ''∈Ω_m} p_{σ'σ'',σ} λ(σ') λ(σ'').
Distribution apply_canonical(const HeredityTensor& t, const Distribution& lam);

/// Symmetric, stochastic coefficients p_{ij,k} of y'_k = Σ p_{ij,k} y_i y_j.
class ReducedQso {
public:
    /// Validates symmetry, non-negativity and stochasticity at tol.
    ReducedQso(std::size_t n, std::vector<double> coefficients, double tol = kConstructionTol);

    std::size_t dimension() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j, std::size_t k) const { return p_[(i * n_ + j) * n_ + k]; }
    std::span<const double> raw() const noexcept { return p_; }

    double min_coefficient() const;

private:
    std::size_t n_;
    std::vector<double> p_;
};

/// Requires the 1:1 ratio and child gender symmetry.
ReducedQso reduce(const HeredityTensor& t);

/// Exact quadratic form; no renormalization.
ReducedDistribution apply_reduced(const ReducedQso& q, const ReducedDistribution& y);

/// λ(σ_f) = λ(σ_m) = y/2.
Distribution lift(const GenotypeSpace& space, const ReducedDistribution& y);
/// y_k = λ(σ_f^k) + λ(σ_m^k); requires gender symmetry within tol.
ReducedDistribution fold(const GenotypeSpace& space, const Distribution& lam, double tol = kConstructionTol);

} // namespace qso
