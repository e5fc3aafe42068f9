#pragma once

#include "qso/operators.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qso {

struct ModelDescriptor {
    std::string name;
    std::size_t n = 0;
    std::vector<std::string> type_labels;
    std::map<std::string, double> parameters;
    std::string source;  // "closed-form" or "embedded-table"
};

struct Model {
    ModelDescriptor descriptor;
    ReducedQso qso;
};

/// Single two-allele trait, alleles "A" and "a".
GenotypeSpace trait_space();
/// μ_0 = (α, ½-α, α, ½-α) over (f,A), (f,a), (m,A), (m,a).
Distribution trait_base_measure(double alpha);

/// Two-type reduction of the Mendelian trait operator:
/// p_{11,1} = 1, p_{12,1} = 2α, p_{22,1} = 0.
ReducedQso mendelian_trait(double alpha);

/// Single trait with alleles "1".."n".
GenotypeSpace multi_allele_space(std::size_t n);
/// μ_0(σ_{f,i}) = μ_0(σ_{m,i}) = α_i.
Distribution multi_allele_base_measure(const std::vector<double>& alphas);

/// Volterra operator y'_i = y_i (1 + Σ_j a_ij y_j), a_ij = (α_i-α_j)/(α_i+α_j).
/// Requires α_i > 0 and Σ α_i = ½.
ReducedQso multi_allele(const std::vector<double>& alphas);

/// Rh (+/-) and ABO blood-group tables. Read from $QSO_DATA_DIR/{rh,abo}.csv
/// when that variable is set, otherwise from the copy compiled into the
/// library. Values are returned exactly as tabulated (no renormalization).
MeasureFamily rh_table();
MeasureFamily abo_table();
/// Raw CSV text of the compiled-in table ("rh" or "abo").
std::string_view embedded_table_csv(std::string_view name);

Model rh_model();
/// Rows are renormalized to unit mass before the tensor is built.
Model abo_model();

Model trait_model(double alpha);
Model multi_allele_model(const std::vector<double>& alphas);

/// Non-Mendelian model from a user-supplied measure family.
Model family_model(const MeasureFamily& family, std::string name, bool renormalize);

} // namespace qso
