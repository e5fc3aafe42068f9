#include "qso/genotype.hpp"

#include "qso/error.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace qso {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::EmptyComponent: return "EmptyComponent";
        case Errc::DuplicateLabel: return "DuplicateLabel";
        case Errc::InvalidGenotype: return "InvalidGenotype";
        case Errc::ZeroMassOffspringSet: return "ZeroMassOffspringSet";
        case Errc::AsymmetricMeasure: return "AsymmetricMeasure";
        case Errc::MissingPair: return "MissingPair";
        case Errc::DistributionOutsideHyperSimplex: return "DistributionOutsideHyperSimplex";
        case Errc::NotOneToOne: return "NotOneToOne";
        case Errc::ChildAsymmetry: return "ChildAsymmetry";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::GenderAsymmetric: return "GenderAsymmetric";
        case Errc::NoConvergence: return "NoConvergence";
        case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
        case Errc::InvalidCoefficients: return "InvalidCoefficients";
        case Errc::NonPositiveAlpha: return "NonPositiveAlpha";
        case Errc::BadSum: return "BadSum";
        case Errc::MissingParentPair: return "MissingParentPair";
        case Errc::ZeroTotal: return "ZeroTotal";
        case Errc::ParseError: return "ParseError";
        case Errc::SchemaError: return "SchemaError";
        case Errc::InvariantViolation: return "InvariantViolation";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

char gender_code(Gender g) noexcept { return g == Gender::female ? 'f' : 'm'; }

GenotypeSpace GenotypeSpace::build(std::vector<std::vector<std::string>> components) {
    if (components.empty()) {
        throw Error(Errc::EmptyComponent, "genotype space needs at least one trait component");
    }
    std::size_t m = 1;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        if (c.empty()) {
            throw Error(Errc::EmptyComponent, "component " + std::to_string(i) + " has no alleles");
        }
        std::set<std::string> seen;
        for (const auto& label : c) {
            if (!seen.insert(label).second) {
                throw Error(Errc::DuplicateLabel,
                            "allele '" + label + "' repeated in component " + std::to_string(i));
            }
        }
        m *= c.size();
    }
    GenotypeSpace s;
    s.components_ = std::move(components);
    s.trait_count_ = m;
    return s;
}

std::size_t GenotypeSpace::trait_index(const std::vector<std::size_t>& traits) const {
    if (traits.size() != components_.size()) {
        throw Error(Errc::InvalidGenotype, "expected " + std::to_string(components_.size()) +
                                               " alleles, got " + std::to_string(traits.size()));
    }
    std::size_t idx = 0;
    for (std::size_t i = 0; i < traits.size(); ++i) {
        if (traits[i] >= components_[i].size()) {
            throw Error(Errc::InvalidGenotype, "allele index out of range at component " + std::to_string(i));
        }
        idx = idx * components_[i].size() + traits[i];
    }
    return idx;
}

std::vector<std::size_t> GenotypeSpace::trait_alleles(std::size_t trait_index) const {
    if (trait_index >= trait_count_) {
        throw Error(Errc::InvalidGenotype, "trait index out of range");
    }
    std::vector<std::size_t> traits(components_.size());
    for (std::size_t i = components_.size(); i-- > 0;) {
        traits[i] = trait_index % components_[i].size();
        trait_index /= components_[i].size();
    }
    return traits;
}

std::size_t GenotypeSpace::index(const Genotype& g) const {
    return static_cast<std::size_t>(g.gender) * trait_count_ + trait_index(g.traits);
}

Genotype GenotypeSpace::genotype(std::size_t index) const {
    if (index >= size()) {
        throw Error(Errc::InvalidGenotype, "genotype index out of range");
    }
    return {index < trait_count_ ? Gender::female : Gender::male, trait_alleles(index % trait_count_)};
}

std::size_t GenotypeSpace::mirror(std::size_t index) const {
    if (index >= size()) {
        throw Error(Errc::InvalidGenotype, "genotype index out of range");
    }
    return (index + trait_count_) % size();
}

std::string GenotypeSpace::trait_label(std::size_t trait_index) const {
    const auto alleles = trait_alleles(trait_index);
    std::string out;
    for (std::size_t i = 0; i < alleles.size(); ++i) {
        if (i) out += '/';
        out += components_[i][alleles[i]];
    }
    return out;
}

std::size_t GenotypeSpace::parse_trait_label(const std::string& label) const {
    std::vector<std::string> parts;
    if (components_.size() == 1) {
        parts.push_back(label);
    } else {
        std::stringstream ss(label);
        std::string item;
        while (std::getline(ss, item, '/')) parts.push_back(item);
    }
    if (parts.size() != components_.size()) {
        throw Error(Errc::InvalidGenotype, "trait label '" + label + "' does not match the space");
    }
    std::vector<std::size_t> traits(parts.size());
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto& c = components_[i];
        auto it = std::find(c.begin(), c.end(), parts[i]);
        if (it == c.end()) {
            throw Error(Errc::InvalidGenotype, "unknown allele '" + parts[i] + "' in label '" + label + "'");
        }
        traits[i] = static_cast<std::size_t>(it - c.begin());
    }
    return trait_index(traits);
}

std::string GenotypeSpace::genotype_label(std::size_t index) const {
    const Genotype g = genotype(index);
    return std::string(1, gender_code(g.gender)) + ":" + trait_label(index % trait_count_);
}

std::string GenotypeSpace::spec() const {
    std::string out;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        if (i) out += ';';
        for (std::size_t j = 0; j < components_[i].size(); ++j) {
            if (j) out += '|';
            out += components_[i][j];
        }
    }
    return out;
}

GenotypeSpace GenotypeSpace::parse_spec(const std::string& spec) {
    std::vector<std::vector<std::string>> components;
    std::stringstream outer(spec);
    std::string comp;
    while (std::getline(outer, comp, ';')) {
        std::vector<std::string> alleles;
        std::stringstream inner(comp);
        std::string allele;
        while (std::getline(inner, allele, '|')) {
            const auto b = allele.find_first_not_of(" \t");
            const auto e = allele.find_last_not_of(" \t");
            if (b == std::string::npos) {
                throw Error(Errc::EmptyComponent, "empty allele label in space spec '" + spec + "'");
            }
            alleles.push_back(allele.substr(b, e - b + 1));
        }
        components.push_back(std::move(alleles));
    }
    return build(std::move(components));
}

namespace {

void check(const GenotypeSpace& space, const Genotype& g) {
    (void)space.trait_index(g.traits);
}

} // namespace

IndexSet mendelian_offspring_set(const GenotypeSpace& space, const Genotype& a, const Genotype& b) {
    check(space, a);
    check(space, b);
    if (a.gender == b.gender) return {};

    // Enumerate the product of per-component choices {a_i, b_i}.
    const std::size_t nc = space.component_count();
    std::vector<std::vector<std::size_t>> choices(nc);
    for (std::size_t i = 0; i < nc; ++i) {
        choices[i].push_back(a.traits[i]);
        if (b.traits[i] != a.traits[i]) choices[i].push_back(b.traits[i]);
    }
    IndexSet out;
    std::vector<std::size_t> pick(nc, 0);
    std::vector<std::size_t> traits(nc);
    while (true) {
        for (std::size_t i = 0; i < nc; ++i) traits[i] = choices[i][pick[i]];
        const std::size_t t = space.trait_index(traits);
        out.push_back(t);
        out.push_back(t + space.trait_count());
        std::size_t i = nc;
        while (i-- > 0) {
            if (++pick[i] < choices[i].size()) break;
            pick[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

IndexSet nonmendelian_offspring_set(const GenotypeSpace& space, const Genotype& a, const Genotype& b) {
    check(space, a);
    check(space, b);
    if (a.gender == b.gender) return {};
    IndexSet out(space.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = k;
    return out;
}

} // namespace qso
