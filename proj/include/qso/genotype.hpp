#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qso {

enum class Gender { female = 0, male = 1 };

char gender_code(Gender g) noexcept;

struct Genotype {
    Gender gender = Gender::female;
    std::vector<std::size_t> traits;  // allele index per trait component

    friend bool operator==(const Genotype&, const Genotype&) = default;
};

using IndexSet = std::vector<std::size_t>;  // sorted, unique genotype indices

/// Enumerated genotype space: the gender locus plus one or more trait
/// components, each holding a finite list of allele labels.
///
/// Index layout: gender_index * m + trait_index, where trait_index is the
/// lexicographic rank of the allele-index vector (first component most
/// significant). Females occupy [0, m), males [m, 2m).
class GenotypeSpace {
public:
    static GenotypeSpace build(std::vector<std::vector<std::string>> components);

    std::size_t component_count() const noexcept { return components_.size(); }
    const std::vector<std::string>& component(std::size_t i) const { return components_.at(i); }

    /// Number of trait combinations (m).
    std::size_t trait_count() const noexcept { return trait_count_; }
    /// |Ω| = 2m.
    std::size_t size() const noexcept { return 2 * trait_count_; }

    std::size_t index(const Genotype& g) const;
    Genotype genotype(std::size_t index) const;
    std::size_t mirror(std::size_t index) const;

    std::size_t trait_index(const std::vector<std::size_t>& traits) const;
    std::vector<std::size_t> trait_alleles(std::size_t trait_index) const;

    bool is_female(std::size_t index) const { return index < trait_count_; }

    /// Trait labels join allele labels with '/', e.g. "A/b". Single-component
    /// spaces use the bare allele label.
    std::string trait_label(std::size_t trait_index) const;
    std::size_t parse_trait_label(const std::string& label) const;
    std::string genotype_label(std::size_t index) const;

    /// Round-trips through parse_spec: components joined by ';', alleles by '|'.
    std::string spec() const;
    static GenotypeSpace parse_spec(const std::string& spec);

    friend bool operator==(const GenotypeSpace& a, const GenotypeSpace& b) {
        return a.components_ == b.components_;
    }

private:
    std::vector<std::vector<std::string>> components_;
    std::size_t trait_count_ = 0;
};

/// Children Mendelian parents can produce: every genotype (either gender)
/// whose allele at each component is inherited from one of the parents.
/// Empty for same-gender parents.
IndexSet mendelian_offspring_set(const GenotypeSpace& space, const Genotype& a, const Genotype& b);

/// All of Ω for mixed-gender parents, empty otherwise.
IndexSet nonmendelian_offspring_set(const GenotypeSpace& space, const Genotype& a, const Genotype& b);

} // namespace qso
