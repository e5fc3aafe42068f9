#include "qso/cli.hpp"

#include "qso/dynamics.hpp"
#include "qso/error.hpp"
#include "qso/ingest.hpp"
#include "qso/models.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace qso::cli {

namespace {

using nlohmann::json;

// Numbers leave the program with 12 significant digits.
double r12(double x) {
    if (!std::isfinite(x)) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string s12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json vec(std::span<const double> v) {
    json a = json::array();
    for (double x : v) a.push_back(r12(x));
    return a;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        const char* first = item.data();
        const char* last = first + item.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || item.empty()) {
            throw Error(Errc::InvalidArgument, what + ": not a number: '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty()) throw Error(Errc::InvalidArgument, what + " is empty");
    return out;
}

struct ModelArgs {
    std::string model;
    double alpha = 0.0;
    bool alpha_set = false;
    std::string alphas;
    std::string coeff_file;
    bool renormalize = false;
};

struct StartArgs {
    std::string start = "uniform";
    std::uint64_t seed = 0;
};

struct SolverArgs {
    double tol = kDefaultTol;
    std::size_t max_iters = kDefaultMaxIters;
};

void add_model_options(CLI::App* cmd, ModelArgs& m) {
    cmd->add_option("--model", m.model, "trait | multi | rh | abo");
    cmd->add_option_function<double>(
        "--alpha", [&m](double a) { m.alpha = a, m.alpha_set = true; }, "allele weight for the trait model");
    cmd->add_option("--alphas", m.alphas, "comma-separated allele weights for the multi model");
    cmd->add_option("--coeff-file", m.coeff_file, "measure-family CSV defining a non-Mendelian model");
    cmd->add_flag("--renormalize", m.renormalize, "scale each table row to unit mass first");
}

void add_solver_options(CLI::App* cmd, StartArgs& s, SolverArgs& v) {
    cmd->add_option("--start", s.start, "uniform | random[:SEED] | y1,...,yn");
    cmd->add_option("--seed", s.seed, "seed for --start random");
    cmd->add_option("--tol", v.tol, "l1 convergence tolerance");
    cmd->add_option("--max-iters", v.max_iters, "iteration budget");
}

Model resolve_model(const ModelArgs& m) {
    if (!m.model.empty() && !m.coeff_file.empty()) {
        throw Error(Errc::InvalidArgument, "give either --model or --coeff-file, not both");
    }
    if (!m.coeff_file.empty()) {
        return family_model(load_measure_family(m.coeff_file), m.coeff_file, m.renormalize);
    }
    if (m.model == "trait") {
        if (!m.alpha_set) throw Error(Errc::InvalidArgument, "--model trait needs --alpha");
        return trait_model(m.alpha);
    }
    if (m.model == "multi") {
        if (m.alphas.empty()) throw Error(Errc::InvalidArgument, "--model multi needs --alphas");
        return multi_allele_model(parse_list(m.alphas, "--alphas"));
    }
    if (m.model == "rh") return rh_model();
    if (m.model == "abo") return abo_model();
    if (m.model.empty()) throw Error(Errc::InvalidArgument, "no model given (use --model or --coeff-file)");
    throw Error(Errc::InvalidArgument, "unknown model '" + m.model + "'");
}

ReducedDistribution resolve_start(const StartArgs& s, std::size_t n) {
    if (s.start == "uniform") return ReducedDistribution::uniform(n);
    if (s.start.rfind("random", 0) == 0) {
        std::uint64_t seed = s.seed;
        if (s.start.size() > 6) {
            if (s.start[6] != ':') throw Error(Errc::InvalidArgument, "bad start '" + s.start + "'");
            const std::string digits = s.start.substr(7);
            const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
            if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
                throw Error(Errc::InvalidArgument, "bad seed in '" + s.start + "'");
            }
        }
        return SimplexSampler(seed).point(n);
    }
    ReducedDistribution y(parse_list(s.start, "--start"));
    check_simplex(y, n);
    return y;
}

json model_json(const Model& model) {
    json params = json::object();
    for (const auto& [k, v] : model.descriptor.parameters) params[k] = r12(v);
    return {{"name", model.descriptor.name},
            {"n", model.descriptor.n},
            {"types", model.descriptor.type_labels},
            {"parameters", params},
            {"source", model.descriptor.source}};
}

int cmd_run(const ModelArgs& m, const StartArgs& s, const SolverArgs& v, const std::string& format,
            std::size_t stride, std::ostream& out) {
    const Model model = resolve_model(m);
    const ReducedDistribution y0 = resolve_start(s, model.qso.dimension());
    const Trajectory t = iterate(model.qso, y0, {v.max_iters, v.tol, stride});

    if (format == "csv") {
        out << "iter";
        for (std::size_t i = 1; i <= model.qso.dimension(); ++i) out << ",y" << i;
        out << '\n';
        for (std::size_t p = 0; p < t.points.size(); ++p) {
            out << t.steps[p];
            for (double x : t.points[p].values()) out << ',' << s12(x);
            out << '\n';
        }
    } else {
        json points = json::array();
        for (const auto& p : t.points) points.push_back(vec(p.values()));
        json doc = {{"model", model_json(model)},
                    {"steps", t.steps},
                    {"points", points},
                    {"converged", t.converged},
                    {"iterations", t.iterations},
                    {"final_residual", r12(t.final_residual)}};
        out << doc.dump(2) << '\n';
    }
    return t.converged ? kOk : kNotConverged;
}

json report_json(const FixedPointReport& r) {
    return {{"point", vec(r.point.values())},
            {"residual", r12(r.residual)},
            {"spectral_radius", r12(r.jacobian_spectral_radius)},
            {"classification", std::string(to_string(r.classification))},
            {"iterations", r.iterations}};
}

int cmd_fixpoint(const ModelArgs& m, const StartArgs& s, const SolverArgs& v, std::ostream& out) {
    const Model model = resolve_model(m);
    const ReducedDistribution y0 = resolve_start(s, model.qso.dimension());
    json doc = {{"model", model_json(model)}};
    int code = kOk;
    try {
        const FixedPointReport r = find_fixed_point(model.qso, y0, {v.max_iters, v.tol, 1});
        doc.update(report_json(r));
        doc["converged"] = true;
    } catch (const NoConvergenceError& e) {
        doc.update(report_json(e.partial()));
        doc["converged"] = false;
        code = kNotConverged;
    }
    const Regularity reg = regularity_check(model.qso);
    doc["regularity"] = {{"holds", reg.holds}, {"margin", r12(reg.margin)}};
    if (model.qso.dimension() == 2) {
        const Quadratic1dAnalysis qa = analyze_quadratic_1d(model.qso);
        doc["delta"] = r12(qa.delta);
        doc["quadratic"] = {{"a", r12(qa.a)},
                            {"b", r12(qa.b)},
                            {"c", r12(qa.c)},
                            {"fixed_points", vec(qa.fixed_points)},
                            {"regime", qa.regime}};
    }
    out << doc.dump(2) << '\n';
    return code;
}

int cmd_validate(const std::string& path, double tol, bool renormalize, std::ostream& out) {
    MeasureFamily family = load_measure_family(path, {false, tol});
    if (renormalize) family = family.renormalized();
    const GenotypeSpace& space = family.space();
    const std::size_t m = space.trait_count();

    ValidationReport report = validate_family(family, tol);
    HeredityTensor t(space, SexRatio{});
    for (std::size_t f = 0; f < m; ++f) {
        for (std::size_t g = 0; g < m; ++g) {
            for (std::size_t k = 0; k < space.size(); ++k) t(f, g, k) = 2.0 * family.at(f, g)[k];
        }
    }
    const ValidationReport pq = validate_pq(t, tol);
    report.violations.insert(report.violations.end(), pq.violations.begin(), pq.violations.end());

    if (report.ok()) {
        out << "ok: " << path << " (" << m * m << " parent pairs, tolerance " << s12(tol) << ")\n";
        return kOk;
    }
    out << report.violations.size() << " violation(s) in " << path << " at tolerance " << s12(tol) << ":\n";
    for (const auto& v : report.violations) out << "  " << v.describe(space) << '\n';
    return kNotConverged;
}

int cmd_ingest(const std::string& counts_path, const std::string& out_path, bool symmetrize, std::ostream& out) {
    const CountsTable counts = load_counts(counts_path);
    const MeasureFamily family = estimate_measures(counts.space, counts, symmetrize);
    save_measure_family(family, out_path);
    out << "wrote " << out_path << " (" << family.space().trait_count() * family.space().trait_count()
        << " parent pairs)\n";
    return kOk;
}

int cmd_export(const std::string& name, const std::string& out_path, std::ostream& out) {
    if (name != "rh" && name != "abo") throw Error(Errc::InvalidArgument, "only rh and abo have embedded tables");
    const MeasureFamily family = name == "rh" ? rh_table() : abo_table();
    if (out_path.empty()) {
        write_measure_family(family, out);
    } else {
        save_measure_family(family, out_path);
    }
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quadratic stochastic operators for bisexual population genetics"};
    app.require_subcommand(1);

    ModelArgs model;
    StartArgs start;
    SolverArgs solver;
    std::string format = "json";
    std::size_t stride = 1;

    auto* run_cmd = app.add_subcommand("run", "iterate a model and print its trajectory");
    add_model_options(run_cmd, model);
    add_solver_options(run_cmd, start, solver);
    run_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    run_cmd->add_option("--stride", stride, "keep every k-th point")->check(CLI::PositiveNumber);

    auto* fix_cmd = app.add_subcommand("fixpoint", "find and classify a fixed point");
    add_model_options(fix_cmd, model);
    add_solver_options(fix_cmd, start, solver);

    std::string path;
    double validate_tol = kTableTol;
    bool renormalize = false;
    auto* val_cmd = app.add_subcommand("validate", "check a measure-family file for the 1:1 property");
    val_cmd->add_option("path", path, "measure-family CSV")->required();
    val_cmd->add_option("--tol", validate_tol, "tolerance");
    val_cmd->add_flag("--renormalize", renormalize, "scale each row to unit mass first");

    std::string counts_path;
    std::string out_path;
    bool symmetrize = false;
    auto* ing_cmd = app.add_subcommand("ingest", "estimate a measure family from frequency counts");
    ing_cmd->add_option("counts", counts_path, "counts CSV")->required();
    ing_cmd->add_option("out", out_path, "measure-family CSV to write")->required();
    ing_cmd->add_flag("--symmetrize", symmetrize, "pool daughters and sons of the same type");

    std::string export_name;
    auto* exp_cmd = app.add_subcommand("export", "write an embedded coefficient table as CSV");
    exp_cmd->add_option("--model", export_name, "rh | abo")->required();
    exp_cmd->add_option("--out", out_path, "output file (default: stdout)");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }

    try {
        if (*run_cmd) return cmd_run(model, start, solver, format, stride, out);
        if (*fix_cmd) return cmd_fixpoint(model, start, solver, out);
        if (*val_cmd) return cmd_validate(path, validate_tol, renormalize, out);
        if (*ing_cmd) return cmd_ingest(counts_path, out_path, symmetrize, out);
        if (*exp_cmd) return cmd_export(export_name, out_path, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

} // namespace qso::cli
