#include "qso/operators.hpp"

#include "qso/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qso {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

double sum_of(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

} // namespace

SexRatio SexRatio::from_female_share(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(Errc::InvalidArgument, "female share must lie in (0, 1), got " + fmt(p));
    }
    return {p, 1.0 - p};
}

double Distribution::sum() const noexcept { return sum_of(values_); }

double Distribution::female_mass(std::size_t m) const noexcept {
    return sum_of(std::span<const double>(values_).first(std::min(m, values_.size())));
}

ReducedDistribution ReducedDistribution::uniform(std::size_t n) {
    return ReducedDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ReducedDistribution ReducedDistribution::vertex(std::size_t n, std::size_t i) {
    std::vector<double> v(n, 0.0);
    v.at(i) = 1.0;
    return ReducedDistribution(std::move(v));
}

double ReducedDistribution::sum() const noexcept { return sum_of(values_); }

double l1_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(Errc::DimensionMismatch, "l1_distance on vectors of different length");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += std::abs(a[i] - b[i]);
    return d;
}

void check_hyper_simplex(const Distribution& lam, std::size_t m, SexRatio ratio, double tol) {
    if (lam.size() != 2 * m) {
        throw Error(Errc::DimensionMismatch,
                    "distribution has " + std::to_string(lam.size()) + " entries, space has " + std::to_string(2 * m));
    }
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (!(lam[i] >= -tol)) {
            throw Error(Errc::DistributionOutsideHyperSimplex, "negative mass at genotype " + std::to_string(i));
        }
    }
    const double total = lam.sum();
    const double female = lam.female_mass(m);
    if (std::abs(total - 1.0) > tol || std::abs(female - ratio.p) > tol) {
        throw Error(Errc::DistributionOutsideHyperSimplex,
                    "total mass " + fmt(total) + ", female mass " + fmt(female) + " (expected " + fmt(ratio.p) + ")");
    }
}

void check_simplex(const ReducedDistribution& y, std::size_t n, double tol) {
    if (y.size() != n) {
        throw Error(Errc::DimensionMismatch,
                    "point has " + std::to_string(y.size()) + " coordinates, operator has " + std::to_string(n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(y[i] >= -tol)) {
            throw Error(Errc::DistributionOutsideHyperSimplex, "negative coordinate " + std::to_string(i));
        }
    }
    if (std::abs(y.sum() - 1.0) > tol) {
        throw Error(Errc::DistributionOutsideHyperSimplex, "coordinates sum to " + fmt(y.sum()));
    }
}

// MeasureFamily ---------------------------------------------------------------

MeasureFamily::MeasureFamily(GenotypeSpace space)
    : space_(std::move(space)),
      mu_(space_.trait_count() * space_.trait_count()),
      present_(space_.trait_count() * space_.trait_count(), false) {}

std::size_t MeasureFamily::slot(std::size_t f, std::size_t m) const {
    if (f >= space_.trait_count() || m >= space_.trait_count()) {
        throw Error(Errc::InvalidGenotype, "parent trait index out of range");
    }
    return f * space_.trait_count() + m;
}

void MeasureFamily::set(std::size_t female_trait, std::size_t male_trait, Distribution mu) {
    if (mu.size() != space_.size()) {
        throw Error(Errc::DimensionMismatch, "measure must cover all " + std::to_string(space_.size()) + " genotypes");
    }
    const auto s = slot(female_trait, male_trait);
    mu_[s] = std::move(mu);
    present_[s] = true;
}

bool MeasureFamily::has(std::size_t female_trait, std::size_t male_trait) const {
    return present_[slot(female_trait, male_trait)];
}

const Distribution& MeasureFamily::at(std::size_t female_trait, std::size_t male_trait) const {
    const auto s = slot(female_trait, male_trait);
    if (!present_[s]) {
        throw Error(Errc::MissingPair, "no measure for parents (f:" + space_.trait_label(female_trait) +
                                           ", m:" + space_.trait_label(male_trait) + ")");
    }
    return mu_[s];
}

MeasureFamily MeasureFamily::renormalized() const {
    MeasureFamily out = *this;
    for (std::size_t s = 0; s < out.mu_.size(); ++s) {
        if (!out.present_[s]) continue;
        auto& v = out.mu_[s].mutable_values();
        const double total = sum_of(v);
        if (total <= 0.0) throw Error(Errc::ZeroTotal, "cannot renormalize a zero-mass measure");
        for (double& x : v) x /= total;
    }
    return out;
}

std::string_view to_string(Violation::Kind kind) noexcept {
    switch (kind) {
        case Violation::Kind::negative: return "negative";
        case Violation::Kind::normalization: return "normalization";
        case Violation::Kind::ratio: return "ratio";
        case Violation::Kind::support: return "support";
        case Violation::Kind::missing: return "missing";
        case Violation::Kind::asymmetry: return "asymmetry";
    }
    return "unknown";
}

std::string Violation::describe(const GenotypeSpace& space) const {
    std::string s = std::string(to_string(kind)) + " (f:" + space.trait_label(female_trait) +
                    ", m:" + space.trait_label(male_trait) + ")";
    if (child != npos) s += " child " + space.genotype_label(child);
    s += " magnitude " + fmt(magnitude);
    return s;
}

ValidationReport validate_family(const MeasureFamily& family, double tol) {
    const auto& space = family.space();
    const std::size_t m = space.trait_count();
    ValidationReport report;
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            if (!family.has(f, g)) {
                report.violations.push_back({Violation::Kind::missing, f, g, npos, 1.0});
                continue;
            }
            const auto& mu = family.at(f, g);
            for (std::size_t k = 0; k < mu.size(); ++k) {
                if (mu[k] < -tol || !std::isfinite(mu[k])) {
                    report.violations.push_back({Violation::Kind::negative, f, g, k, mu[k]});
                }
            }
            const double total = mu.sum();
            if (!(std::abs(total - 1.0) <= tol)) {
                report.violations.push_back({Violation::Kind::normalization, f, g, npos, total - 1.0});
            }
            for (std::size_t k = 0; k < m; ++k) {
                const double d = mu[k] - mu[k + m];
                if (!(std::abs(d) <= tol)) {
                    report.violations.push_back({Violation::Kind::asymmetry, f, g, k, d});
                }
            }
        }
    }
    return report;
}

// HeredityTensor ---------------------------------------------------------------

HeredityTensor::HeredityTensor(GenotypeSpace space, SexRatio ratio)
    : space_(std::move(space)),
      ratio_(ratio),
      coeffs_(space_.trait_count() * space_.trait_count() * space_.size(), 0.0) {}

HeredityTensor::HeredityTensor(GenotypeSpace space, SexRatio ratio, std::vector<double> coefficients)
    : space_(std::move(space)), ratio_(ratio), coeffs_(std::move(coefficients)) {
    const std::size_t expected = space_.trait_count() * space_.trait_count() * space_.size();
    if (coeffs_.size() != expected) {
        throw Error(Errc::DimensionMismatch,
                    "expected " + std::to_string(expected) + " coefficients, got " + std::to_string(coeffs_.size()));
    }
}

double HeredityTensor::coefficient(std::size_t parent_a, std::size_t parent_b, std::size_t child) const {
    const bool fa = space_.is_female(parent_a);
    const bool fb = space_.is_female(parent_b);
    if (fa == fb) return 0.0;
    const std::size_t m = space_.trait_count();
    if (fa) return (*this)(parent_a, parent_b - m, child);
    return (*this)(parent_b, parent_a - m, child);
}

HeredityTensor mendelian_coefficients(const GenotypeSpace& space, const Distribution& mu0) {
    const std::size_t m = space.trait_count();
    if (mu0.size() != space.size()) {
        throw Error(Errc::DimensionMismatch, "base measure must cover all " + std::to_string(space.size()) + " genotypes");
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(mu0[k] - mu0[k + m]) > kConstructionTol) {
            throw Error(Errc::AsymmetricMeasure,
                        "base measure differs between genders at trait " + space.trait_label(k));
        }
    }
    check_hyper_simplex(mu0, m, SexRatio{}, kConstructionTol);

    HeredityTensor t(space, SexRatio{});
    for (std::size_t f = 0; f < m; ++f) {
        const Genotype mother = space.genotype(f);
        for (std::size_t g = 0; g < m; ++g) {
            const Genotype father = space.genotype(g + m);
            const IndexSet offspring = mendelian_offspring_set(space, mother, father);
            double mass = 0.0;
            for (auto k : offspring) mass += mu0[k];
            if (!(mass > 0.0)) {
                throw Error(Errc::ZeroMassOffspringSet, "offspring set of (" + space.genotype_label(f) + ", " +
                                                            space.genotype_label(g + m) + ") has zero base mass");
            }
            for (auto k : offspring) t(f, g, k) = 2.0 * mu0[k] / mass;
        }
    }
    return t;
}

HeredityTensor nonmendelian_coefficients(const MeasureFamily& family) {
    const auto& space = family.space();
    const std::size_t m = space.trait_count();
    HeredityTensor t(space, SexRatio{});
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const Distribution& mu = family.at(f, g);
            for (std::size_t k = 0; k < m; ++k) {
                if (std::abs(mu[k] - mu[k + m]) > kConstructionTol) {
                    throw Error(Errc::AsymmetricMeasure, "measure for (f:" + space.trait_label(f) + ", m:" +
                                                             space.trait_label(g) + ") differs between genders at " +
                                                             space.trait_label(k));
                }
            }
            for (std::size_t k = 0; k < space.size(); ++k) t(f, g, k) = 2.0 * mu[k];
        }
    }
    return t;
}

HeredityTensor sex_ratio_coefficients(const GenotypeSpace& space, SexRatio ratio,
                                      const std::vector<std::vector<double>>& trait_weights) {
    const std::size_t m = space.trait_count();
    if (trait_weights.size() != m * m) {
        throw Error(Errc::DimensionMismatch, "need one weight vector per parent pair");
    }
    HeredityTensor t(space, ratio);
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const auto& w = trait_weights[f * m + g];
            if (w.size() != m) throw Error(Errc::DimensionMismatch, "trait weights must have length m");
            for (std::size_t k = 0; k < m; ++k) {
                t(f, g, k) = w[k] / (2.0 * ratio.q);
                t(f, g, k + m) = w[k] / (2.0 * ratio.p);
            }
        }
    }
    return t;
}

ValidationReport validate_pq(const HeredityTensor& t, double tol) {
    const auto& space = t.space();
    const std::size_t m = space.trait_count();
    const SexRatio r = t.ratio();
    const double target = 1.0 / (2.0 * r.p * r.q);
    ValidationReport report;
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            double total = 0.0;
            for (std::size_t k = 0; k < space.size(); ++k) {
                const double c = t(f, g, k);
                if (c < -tol || !std::isfinite(c)) report.violations.push_back({Violation::Kind::negative, f, g, k, c});
                total += c;
            }
            // An empty offspring set is the only admissible alternative to 1/(2pq).
            if (std::abs(total - target) > tol && std::abs(total) > tol) {
                report.violations.push_back({Violation::Kind::normalization, f, g, npos, total - target});
            }
            for (std::size_t k = 0; k < m; ++k) {
                const double cross = t(f, g, k) * r.q - t(f, g, k + m) * r.p;
                if (std::abs(cross) > tol) report.violations.push_back({Violation::Kind::ratio, f, g, k, cross});
            }
        }
    }
    return report;
}

ValidationReport validate_mendelian_support(const HeredityTensor& t, double tol) {
    const auto& space = t.space();
    const std::size_t m = space.trait_count();
    ValidationReport report;
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const IndexSet allowed = mendelian_offspring_set(space, space.genotype(f), space.genotype(g + m));
            for (std::size_t k = 0; k < space.size(); ++k) {
                if (std::binary_search(allowed.begin(), allowed.end(), k)) continue;
                if (std::abs(t(f, g, k)) > tol) {
                    report.violations.push_back({Violation::Kind::support, f, g, k, t(f, g, k)});
                }
            }
        }
    }
    return report;
}

Distribution apply_canonical(const HeredityTensor& t, const Distribution& lam) {
    const auto& space = t.space();
    const std::size_t m = space.trait_count();
    check_hyper_simplex(lam, m, t.ratio());
    std::vector<double> out(space.size(), 0.0);
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const double w = 2.0 * lam[f] * lam[g + m];
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < space.size(); ++k) out[k] += w * t(f, g, k);
        }
    }
    return Distribution(std::move(out));
}

// ReducedQso -------------------------------------------------------------------

ReducedQso::ReducedQso(std::size_t n, std::vector<double> coefficients, double tol)
    : n_(n), p_(std::move(coefficients)) {
    if (n_ == 0 || p_.size() != n_ * n_ * n_) {
        throw Error(Errc::DimensionMismatch, "reduced operator needs n^3 coefficients");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            double total = 0.0;
            for (std::size_t k = 0; k < n_; ++k) {
                const double c = (*this)(i, j, k);
                if (!(c >= 0.0) || !std::isfinite(c)) {
                    throw Error(Errc::InvalidCoefficients, "negative coefficient p(" + std::to_string(i) + "," +
                                                               std::to_string(j) + "," + std::to_string(k) + ")");
                }
                if (std::abs(c - (*this)(j, i, k)) > tol) {
                    throw Error(Errc::InvalidCoefficients, "coefficients not symmetric in the parent indices");
                }
                total += c;
            }
            if (std::abs(total - 1.0) > tol) {
                throw Error(Errc::InvalidCoefficients, "row (" + std::to_string(i) + "," + std::to_string(j) +
                                                           ") sums to " + fmt(total));
            }
        }
    }
}

double ReducedQso::min_coefficient() const { return *std::min_element(p_.begin(), p_.end()); }

ReducedQso reduce(const HeredityTensor& t) {
    if (!t.ratio().one_to_one()) {
        throw Error(Errc::NotOneToOne, "reduction is defined only for the 1:1 sex ratio");
    }
    const auto& space = t.space();
    const std::size_t n = space.trait_count();
    for (std::size_t f = 0; f < n; ++f) {
        for (std::size_t g = 0; g < n; ++g) {
            for (std::size_t k = 0; k < n; ++k) {
                if (std::abs(t(f, g, k) - t(f, g, k + n)) > kConstructionTol) {
                    throw Error(Errc::ChildAsymmetry, "daughter and son coefficients differ for trait " +
                                                          space.trait_label(k));
                }
            }
        }
    }
    // With y = 2x: y'_k = Σ_{i,j} p(f_i, m_j, f_k) y_i y_j; symmetrize in (i, j).
    std::vector<double> p(n * n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) p[(i * n + j) * n + k] = 0.5 * (t(i, j, k) + t(j, i, k));
        }
    }
    return ReducedQso(n, std::move(p));
}

ReducedDistribution apply_reduced(const ReducedQso& q, const ReducedDistribution& y) {
    const std::size_t n = q.dimension();
    if (y.size() != n) {
        throw Error(Errc::DimensionMismatch,
                    "point has " + std::to_string(y.size()) + " coordinates, operator has " + std::to_string(n));
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = y[i] * y[j];
            if (w == 0.0) continue;
            for (std::size_t k = 0; k < n; ++k) out[k] += q(i, j, k) * w;
        }
    }
    return ReducedDistribution(std::move(out));
}

Distribution lift(const GenotypeSpace& space, const ReducedDistribution& y) {
    const std::size_t m = space.trait_count();
    check_simplex(y, m);
    std::vector<double> lam(2 * m);
    for (std::size_t k = 0; k < m; ++k) lam[k] = lam[k + m] = 0.5 * y[k];
    return Distribution(std::move(lam));
}

ReducedDistribution fold(const GenotypeSpace& space, const Distribution& lam, double tol) {
    const std::size_t m = space.trait_count();
    if (lam.size() != 2 * m) throw Error(Errc::DimensionMismatch, "distribution does not match the space");
    std::vector<double> y(m);
    for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(lam[k] - lam[k + m]) > tol) {
            throw Error(Errc::GenderAsymmetric, "female and male mass differ at trait " + space.trait_label(k));
        }
        y[k] = lam[k] + lam[k + m];
    }
    return ReducedDistribution(std::move(y));
}

} // namespace qso
