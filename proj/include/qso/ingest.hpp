#pragma once

#include "qso/operators.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qso {

struct CountRow {
    std::string mother;  // trait label of the female parent
    std::string father;  // trait label of the male parent
    Gender child_gender = Gender::female;
    std::string child_type;
    std::uint64_t count = 0;
};

struct CountsTable {
    GenotypeSpace space;
    std::vector<CountRow> rows;
};

/// μ(child) = count / pair total for every parent pair. With symmetrize set,
/// daughter and son counts of the same trait are pooled and split equally.
/// Without it, gender-asymmetric counts raise InvariantViolation.
MeasureFamily estimate_measures(const GenotypeSpace& space, const CountsTable& counts, bool symmetrize);

// On-disk format (measures and counts share it, last column differs):
//
//   # space: A|B|AB|O
//   mother,father,child_gender,child_type,value
//   A,A,f,A,0.4533
//   ...
//
// Rows of one parent pair are contiguous; missing child rows read as zero;
// missing parent pairs are an error.

struct ReadOptions {
    /// Reject families whose rows break non-negativity, unit mass or gender
    /// symmetry beyond `tol`.
    bool check_invariants = true;
    double tol = kTableTol;
};

MeasureFamily read_measure_family(std::istream& in, const std::string& source = "<stream>",
                                  const ReadOptions& options = {});
MeasureFamily load_measure_family(const std::filesystem::path& path, const ReadOptions& options = {});
void write_measure_family(const MeasureFamily& family, std::ostream& out);
void save_measure_family(const MeasureFamily& family, const std::filesystem::path& path);

CountsTable read_counts(std::istream& in, const std::string& source = "<stream>");
CountsTable load_counts(const std::filesystem::path& path);
void write_counts(const CountsTable& counts, std::ostream& out);

/// Shortest decimal text that parses back to the same double.
std::string format_decimal(double value);

} // namespace qso
