#include "qso/models.hpp"

#include "qso/dynamics.hpp"
#include "qso/error.hpp"
#include "qso/ingest.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <sstream>

namespace qso {

namespace detail {
extern const std::string_view kRhCsv;
extern const std::string_view kAboCsv;
} // namespace detail

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) {
        std::ostringstream os;
        os << "alpha must lie in (0, 1/2), got " << alpha;
        throw Error(Errc::AlphaOutOfRange, os.str());
    }
}

void check_alphas(const std::vector<double>& alphas) {
    if (alphas.size() < 2) throw Error(Errc::InvalidArgument, "need at least two allele weights");
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        if (!(alphas[i] > 0.0)) {
            throw Error(Errc::NonPositiveAlpha, "allele weight " + std::to_string(i + 1) + " must be positive");
        }
    }
    const double total = std::accumulate(alphas.begin(), alphas.end(), 0.0);
    if (std::abs(total - 0.5) > kConstructionTol) {
        std::ostringstream os;
        os.precision(12);
        os << "allele weights must sum to 1/2, got " << total;
        throw Error(Errc::BadSum, os.str());
    }
}

MeasureFamily load_table(const char* file, std::string_view embedded) {
    if (const char* dir = std::getenv("QSO_DATA_DIR"); dir && *dir) {
        return load_measure_family(std::filesystem::path(dir) / file);
    }
    std::istringstream in{std::string(embedded)};
    return read_measure_family(in, std::string("<embedded ") + file + ">");
}

std::vector<std::string> labels_of(const GenotypeSpace& space) {
    std::vector<std::string> out;
    for (std::size_t t = 0; t < space.trait_count(); ++t) out.push_back(space.trait_label(t));
    return out;
}

} // namespace

GenotypeSpace trait_space() { return GenotypeSpace::build({{"A", "a"}}); }

Distribution trait_base_measure(double alpha) {
    check_alpha(alpha);
    return Distribution({alpha, 0.5 - alpha, alpha, 0.5 - alpha});
}

ReducedQso mendelian_trait(double alpha) {
    check_alpha(alpha);
    const double h = 2.0 * alpha;
    // p_{ij,1}, then p_{ij,2} = 1 - p_{ij,1}; index (i*2 + j)*2 + k.
    return ReducedQso(2, {1.0, 0.0, h, 1.0 - h, h, 1.0 - h, 0.0, 1.0});
}

GenotypeSpace multi_allele_space(std::size_t n) {
    std::vector<std::string> alleles;
    for (std::size_t i = 1; i <= n; ++i) alleles.push_back(std::to_string(i));
    return GenotypeSpace::build({alleles});
}

Distribution multi_allele_base_measure(const std::vector<double>& alphas) {
    check_alphas(alphas);
    std::vector<double> mu(alphas);
    mu.insert(mu.end(), alphas.begin(), alphas.end());
    return Distribution(std::move(mu));
}

ReducedQso multi_allele(const std::vector<double>& alphas) {
    check_alphas(alphas);
    const std::size_t n = alphas.size();
    std::vector<double> p(n * n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                p[(i * n + i) * n + i] = 1.0;
                continue;
            }
            const double s = alphas[i] + alphas[j];
            p[(i * n + j) * n + i] = alphas[i] / s;
            p[(i * n + j) * n + j] = alphas[j] / s;
        }
    }
    return ReducedQso(n, std::move(p));
}

std::string_view embedded_table_csv(std::string_view name) {
    if (name == "rh") return detail::kRhCsv;
    if (name == "abo") return detail::kAboCsv;
    throw Error(Errc::InvalidArgument, "no embedded table named '" + std::string(name) + "'");
}

MeasureFamily rh_table() { return load_table("rh.csv", detail::kRhCsv); }
MeasureFamily abo_table() { return load_table("abo.csv", detail::kAboCsv); }

Model family_model(const MeasureFamily& family, std::string name, bool renormalize) {
    const MeasureFamily used = renormalize ? family.renormalized() : family;
    ReducedQso q = reduce(nonmendelian_coefficients(used));
    ModelDescriptor d;
    d.name = std::move(name);
    d.n = q.dimension();
    d.type_labels = labels_of(family.space());
    d.source = "coefficient-file";
    return {std::move(d), std::move(q)};
}

Model rh_model() {
    Model model = family_model(rh_table(), "rh", false);
    const Quadratic1dAnalysis qa = analyze_quadratic_1d(model.qso);
    model.descriptor.source = "embedded-table";
    model.descriptor.parameters = {{"a", qa.a}, {"b", qa.b}, {"c", qa.c}};
    return model;
}

Model abo_model() {
    Model model = family_model(abo_table(), "abo", true);
    model.descriptor.source = "embedded-table";
    return model;
}

Model trait_model(double alpha) {
    ModelDescriptor d{"trait", 2, {"A", "a"}, {{"alpha", alpha}}, "closed-form"};
    return {std::move(d), mendelian_trait(alpha)};
}

Model multi_allele_model(const std::vector<double>& alphas) {
    ReducedQso q = multi_allele(alphas);
    ModelDescriptor d{"multi", alphas.size(), labels_of(multi_allele_space(alphas.size())), {}, "closed-form"};
    for (std::size_t i = 0; i < alphas.size(); ++i) d.parameters["alpha" + std::to_string(i + 1)] = alphas[i];
    return {std::move(d), std::move(q)};
}

} // namespace qso
