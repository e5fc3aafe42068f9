#include "qso/ingest.hpp"

#include "qso/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

namespace qso {

namespace {

constexpr std::string_view kMeasureHeader = "mother,father,child_gender,child_type,value";
constexpr std::string_view kCountsHeader = "mother,father,child_gender,child_type,count";

struct Field {
    std::string text;
    std::size_t column;  // 1-based
};

struct RawRow {
    std::size_t line;
    std::size_t female;
    std::size_t male;
    std::size_t child;  // genotype index
    Field value;
};

struct RawTable {
    std::optional<GenotypeSpace> space;
    std::vector<RawRow> rows;
};

std::string where(const std::string& source, std::size_t line, std::size_t column = 0) {
    std::string s = source + ":" + std::to_string(line);
    if (column) s += ":" + std::to_string(column);
    return s;
}

std::vector<Field> split(const std::string& line) {
    std::vector<Field> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto end = comma == std::string::npos ? line.size() : comma;
        fields.push_back({line.substr(start, end - start), start + 1});
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return fields;
}

// Shared reader for the measure and counts layouts; returns rows with the
// last column still as text.
RawTable read_table(std::istream& in, const std::string& source, std::string_view header) {
    RawTable table;
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    std::set<std::pair<std::size_t, std::size_t>> closed_pairs;
    std::optional<std::pair<std::size_t, std::size_t>> open_pair;
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (line[0] == '#') {
            const auto pos = line.find("space:");
            if (pos != std::string::npos && !table.space) {
                try {
                    table.space = GenotypeSpace::parse_spec(line.substr(pos + 6));
                } catch (const Error& e) {
                    throw Error(Errc::SchemaError, where(source, lineno) + ": bad space declaration: " + e.what());
                }
            }
            continue;
        }
        if (!saw_header) {
            if (line != header) {
                throw Error(Errc::SchemaError, where(source, lineno) + ": expected header '" + std::string(header) + "'");
            }
            if (!table.space) {
                throw Error(Errc::SchemaError, where(source, lineno) + ": missing '# space:' declaration before header");
            }
            saw_header = true;
            continue;
        }

        const GenotypeSpace& space = *table.space;
        const auto fields = split(line);
        if (fields.size() != 5) {
            throw Error(Errc::ParseError, where(source, lineno, fields.back().column) + ": expected 5 fields, found " +
                                              std::to_string(fields.size()));
        }
        const auto resolve = [&](const Field& f) {
            try {
                return space.parse_trait_label(f.text);
            } catch (const Error& e) {
                throw Error(Errc::SchemaError, where(source, lineno, f.column) + ": " + e.what());
            }
        };
        const std::size_t female = resolve(fields[0]);
        const std::size_t male = resolve(fields[1]);
        std::size_t gender_offset = 0;
        if (fields[2].text == "m") {
            gender_offset = space.trait_count();
        } else if (fields[2].text != "f") {
            throw Error(Errc::ParseError,
                        where(source, lineno, fields[2].column) + ": child_gender must be 'f' or 'm'");
        }
        const std::size_t child = resolve(fields[3]) + gender_offset;

        const auto pair = std::make_pair(female, male);
        if (open_pair != pair) {
            if (closed_pairs.count(pair)) {
                throw Error(Errc::SchemaError, where(source, lineno) + ": rows for parents (" + fields[0].text + ", " +
                                                   fields[1].text + ") are not contiguous");
            }
            if (open_pair) closed_pairs.insert(*open_pair);
            open_pair = pair;
        }
        if (!seen.insert({female, male, child}).second) {
            throw Error(Errc::SchemaError, where(source, lineno) + ": duplicate row");
        }
        table.rows.push_back({lineno, female, male, child, fields[4]});
    }
    if (!saw_header) {
        throw Error(Errc::SchemaError, source + ": no header line");
    }
    return table;
}

double parse_value(const Field& f, const std::string& source, std::size_t line) {
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || f.text.empty()) {
        throw Error(Errc::ParseError, where(source, line, f.column) + ": not a decimal number: '" + f.text + "'");
    }
    return v;
}

std::uint64_t parse_count(const Field& f, const std::string& source, std::size_t line) {
    std::uint64_t v = 0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || f.text.empty()) {
        throw Error(Errc::ParseError,
                    where(source, line, f.column) + ": not a non-negative integer count: '" + f.text + "'");
    }
    return v;
}

std::string report_text(const ValidationReport& report, const GenotypeSpace& space) {
    std::string s;
    for (const auto& v : report.violations) s += "\n  " + v.describe(space);
    return s;
}

void write_header(std::ostream& out, const GenotypeSpace& space, std::string_view header) {
    out << "# space: " << space.spec() << '\n' << header << '\n';
}

void write_row(std::ostream& out, const GenotypeSpace& space, std::size_t f, std::size_t g, std::size_t child,
               const std::string& value) {
    const std::size_t m = space.trait_count();
    out << space.trait_label(f) << ',' << space.trait_label(g) << ',' << (child < m ? 'f' : 'm') << ','
        << space.trait_label(child % m) << ',' << value << '\n';
}

} // namespace

std::string format_decimal(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error(Errc::InvalidArgument, "cannot format value");
    return std::string(buf, ptr);
}

MeasureFamily read_measure_family(std::istream& in, const std::string& source, const ReadOptions& options) {
    RawTable raw = read_table(in, source, kMeasureHeader);
    const GenotypeSpace& space = *raw.space;
    const std::size_t m = space.trait_count();

    std::vector<std::vector<double>> values(m * m);
    for (const auto& row : raw.rows) {
        auto& v = values[row.female * m + row.male];
        if (v.empty()) v.assign(space.size(), 0.0);
        v[row.child] = parse_value(row.value, source, row.line);
    }
    MeasureFamily family(space);
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            auto& v = values[f * m + g];
            if (v.empty()) {
                throw Error(Errc::SchemaError, source + ": missing parent pair (" + space.trait_label(f) + ", " +
                                                   space.trait_label(g) + ")");
            }
            family.set(f, g, Distribution(std::move(v)));
        }
    }
    if (options.check_invariants) {
        const ValidationReport report = validate_family(family, options.tol);
        if (!report.ok()) {
            throw Error(Errc::InvariantViolation, source + ": measure family violates its invariants" +
                                                      report_text(report, space));
        }
    }
    return family;
}

MeasureFamily load_measure_family(const std::filesystem::path& path, const ReadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
    return read_measure_family(in, path.string(), options);
}

void write_measure_family(const MeasureFamily& family, std::ostream& out) {
    const auto& space = family.space();
    const std::size_t m = space.trait_count();
    write_header(out, space, kMeasureHeader);
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const Distribution& mu = family.at(f, g);
            for (std::size_t k = 0; k < space.size(); ++k) write_row(out, space, f, g, k, format_decimal(mu[k]));
        }
    }
}

void save_measure_family(const MeasureFamily& family, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
    write_measure_family(family, out);
    if (!out) throw Error(Errc::InvalidArgument, "write failed for " + path.string());
}

CountsTable read_counts(std::istream& in, const std::string& source) {
    RawTable raw = read_table(in, source, kCountsHeader);
    CountsTable table{*raw.space, {}};
    const std::size_t m = table.space.trait_count();
    for (const auto& row : raw.rows) {
        table.rows.push_back({table.space.trait_label(row.female), table.space.trait_label(row.male),
                              row.child < m ? Gender::female : Gender::male, table.space.trait_label(row.child % m),
                              parse_count(row.value, source, row.line)});
    }
    return table;
}

CountsTable load_counts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::ParseError, "cannot open " + path.string());
    return read_counts(in, path.string());
}

void write_counts(const CountsTable& counts, std::ostream& out) {
    const auto& space = counts.space;
    write_header(out, space, kCountsHeader);
    for (const auto& r : counts.rows) {
        out << r.mother << ',' << r.father << ',' << gender_code(r.child_gender) << ',' << r.child_type << ','
            << r.count << '\n';
    }
}

MeasureFamily estimate_measures(const GenotypeSpace& space, const CountsTable& counts, bool symmetrize) {
    const std::size_t m = space.trait_count();
    std::vector<std::vector<std::uint64_t>> tally(m * m);
    for (const auto& r : counts.rows) {
        const std::size_t f = space.parse_trait_label(r.mother);
        const std::size_t g = space.parse_trait_label(r.father);
        const std::size_t child = space.parse_trait_label(r.child_type) + (r.child_gender == Gender::male ? m : 0);
        auto& t = tally[f * m + g];
        if (t.empty()) t.assign(space.size(), 0);
        t[child] += r.count;
    }

    MeasureFamily family(space);
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            const auto& t = tally[f * m + g];
            const std::string pair = "(" + space.trait_label(f) + ", " + space.trait_label(g) + ")";
            if (t.empty()) throw Error(Errc::MissingParentPair, "no counts for parents " + pair);
            std::uint64_t total = 0;
            for (auto c : t) total += c;
            if (total == 0) throw Error(Errc::ZeroTotal, "parents " + pair + " have no children counted");

            const double denom = static_cast<double>(total);
            std::vector<double> mu(space.size());
            if (symmetrize) {
                for (std::size_t k = 0; k < m; ++k) {
                    mu[k] = mu[k + m] = static_cast<double>(t[k] + t[k + m]) / (2.0 * denom);
                }
            } else {
                for (std::size_t k = 0; k < space.size(); ++k) mu[k] = static_cast<double>(t[k]) / denom;
            }
            family.set(f, g, Distribution(std::move(mu)));
        }
    }
    if (!symmetrize) {
        const ValidationReport report = validate_family(family, kConstructionTol);
        if (!report.ok()) {
            throw Error(Errc::InvariantViolation,
                        "estimated measures are not gender symmetric (use symmetrize to pool daughters and sons)" +
                            report_text(report, space));
        }
    }
    return family;
}

} // namespace qso
