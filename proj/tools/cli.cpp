#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "hdes/error.hpp"
#include "hdes/parser.hpp"
#include "hdes/profile.hpp"
#include "hdes/result_json.hpp"
#include "hdes/rk4.hpp"
#include "hdes/samples.hpp"
#include "hdes/solver.hpp"
#include "hdes/validation.hpp"

namespace fs = std::filesystem;

namespace hdes::cli {

namespace {

// Input problems (missing files, bad JSON) map to exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        out.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << text;
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::pair<std::string, std::string> split_assignment(const std::string& s, const char* flag) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
        throw ContractError(std::string(flag) + " expects NAME=VALUE, got '" + s + "'");
    return {s.substr(0, eq), s.substr(eq + 1)};
}

int parse_int(const std::string& s, const char* flag) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw ContractError(std::string(flag) + ": '" + s + "' is not an integer");
    return v;
}

struct SolveArgs {
    std::string problem;
    std::optional<int> qubits, depth;
    std::optional<std::size_t> samples, max_iter;
    std::optional<double> eps, eta;
    std::optional<std::string> strategy;
    std::uint64_t seed = 0;
    std::size_t restarts = 1;
    std::uint64_t shots = 0;
    bool rescale = false;
    bool no_regroup = false;
    std::vector<std::string> function_qubits, function_depth, function_alloc;
    std::string out;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    if (!fs::exists(a.problem)) throw InputError("problem file '" + a.problem + "' does not exist");
    const std::string source = read_file(a.problem);
    DESystem sys;
    try {
        sys = parse_problem(source);
    } catch (const ParseError& e) {
        throw InputError(a.problem + ":" + e.what());
    }
    SolverConfig cfg = config_from_problem(sys);
    if (a.qubits) cfg.qubits = *a.qubits;
    if (a.depth) cfg.depth = *a.depth;
    if (a.samples) cfg.samples = *a.samples;
    if (a.max_iter) cfg.max_iterations = *a.max_iter;
    if (a.eps) cfg.target_loss = *a.eps;
    if (a.eta) cfg.eta = *a.eta;
    if (a.strategy) cfg.strategy = parse_strategy(*a.strategy);
    cfg.seed = a.seed;
    cfg.shots = a.shots;
    cfg.rescale = a.rescale;
    cfg.regroup = !a.no_regroup;
    cfg.workers = a.restarts > 1 ? 1 : worker_count();
    for (const auto& s : a.function_qubits) {
        const auto [name, v] = split_assignment(s, "--function-qubits");
        cfg.per_function[name].qubits = parse_int(v, "--function-qubits");
    }
    for (const auto& s : a.function_depth) {
        const auto [name, v] = split_assignment(s, "--function-depth");
        cfg.per_function[name].depth = parse_int(v, "--function-depth");
    }
    for (const auto& s : a.function_alloc) {
        const auto [name, v] = split_assignment(s, "--function-alloc");
        std::vector<int> l;
        std::stringstream ss(v);
        for (std::string part; std::getline(ss, part, ',');) l.push_back(parse_int(part, "--function-alloc"));
        cfg.per_function[name].qubits_per_variable = l;
    }
    for (const auto& [name, fs_] : cfg.per_function) (void)sys.function_index(name);
    if (a.restarts < 1) throw ContractError("--restarts must be >= 1");

    const Json echo = config_to_json(cfg, a.restarts);
    Json doc;
    if (a.restarts == 1) {
        const SolveResult r = solve(sys, cfg);
        doc = result_to_json(r, sys, source, echo);
        err << "final loss " << format_double(r.final_loss) << " after " << r.iterations << " iterations ("
            << r.termination << ")\n";
    } else {
        const MultiStartResult m = multi_start(sys, cfg, a.restarts);
        const SolveResult& best = m.runs[m.summary.best_index];
        doc = result_to_json(best, sys, source, echo, &m);
        err << "restarts " << a.restarts << ": best loss " << format_double(m.summary.best_loss) << " (seed "
            << best.seed << "), median " << format_double(m.summary.median_loss) << "\n";
    }
    emit(doc.dump(2) + "\n", a.out, out);
    return kOk;
}

ReferenceSolution load_reference(const ResultDocument& doc, bool rk4, double rk4_step, const std::string& table) {
    if (rk4 && !table.empty()) throw InputError("use either --rk4 or --reference, not both");
    if (rk4) return rk4_reference(doc.system, rk4_step);
    if (table.empty()) throw InputError("a reference is required: --rk4 or --reference table.csv");
    std::vector<std::string> coords;
    for (const auto& v : doc.system.variables) coords.push_back(v.name);
    return tabulated_reference(read_file(table), coords);
}

struct ValidateArgs {
    std::string result;
    bool rk4 = false;
    double rk4_step = 1e-3;
    std::string reference;
    std::size_t points = 100;
    std::string out;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    const ResultDocument doc = result_from_json(read_json(a.result));
    const ReferenceSolution ref = load_reference(doc, a.rk4, a.rk4_step, a.reference);
    if (a.points < 1) throw ContractError("--points must be >= 1");
    const std::vector<Point> sv = generate_samples(a.points, doc.system.domain());

    SolutionScores scores;
    std::vector<ValidationScore> vfs;
    for (std::size_t f = 0; f < doc.functions.size(); ++f) {
        const auto& fr = doc.functions[f];
        const ReferenceFunction* rf = ref.find(fr.name);
        if (!rf) throw ContractError("reference has no function '" + fr.name + "'");
        const std::size_t idx = doc.system.function_index(fr.name);
        std::vector<Point> projected;
        for (const auto& p : sv) projected.push_back(doc.system.project(idx, p));
        scores.functions.push_back(score_levels(fr.solved(), *rf, fr.orders, projected));
        vfs.push_back(scores.functions.back().vf);
    }
    scores.global = score_global(vfs);
    Json j = scores_to_json(scores);
    j["reference"] = to_string(ref.kind);
    j["points"] = sv.size();
    emit(j.dump(2) + "\n", a.out, out);
    err << "V = (" << format_double(scores.global.first) << ", " << format_double(scores.global.second) << ")\n";
    return kOk;
}

struct CurveArgs {
    std::string result;
    std::size_t points = 100;
    bool derivatives = false;
    bool rk4 = false;
    double rk4_step = 1e-3;
    std::string reference;
    std::string out;
};

int cmd_curve(const CurveArgs& a, std::ostream& out, std::ostream&) {
    const ResultDocument doc = result_from_json(read_json(a.result));
    std::optional<ReferenceSolution> ref;
    if (a.rk4 || !a.reference.empty()) ref = load_reference(doc, a.rk4, a.rk4_step, a.reference);
    if (a.points < 1) throw ContractError("--points must be >= 1");
    const std::vector<Point> grid = generate_samples(a.points, doc.system.domain());

    struct Column {
        std::string header;
        std::function<double(const Point&)> value;
    };
    std::vector<Column> cols;
    for (const auto& fr : doc.functions) {
        const std::size_t idx = doc.system.function_index(fr.name);
        const SolvedFunction sf = fr.solved();
        std::vector<MultiIndex> orders{MultiIndex::zero(fr.variables.size())};
        if (a.derivatives)
            for (const auto& mi : fr.orders)
                if (!mi.is_zero()) orders.push_back(mi);
        const ReferenceFunction* rf = ref ? ref->find(fr.name) : nullptr;
        if (ref && !rf) throw ContractError("reference has no function '" + fr.name + "'");
        for (const auto& mi : orders) {
            cols.push_back({column_name(fr.name, mi), [&doc, idx, sf, mi](const Point& p) {
                                return sf.evaluate(doc.system.project(idx, p), mi);
                            }});
        }
        if (rf) {
            for (const auto& mi : orders) {
                if (!rf->supports(mi))
                    throw ContractError("reference lacks derivative order (" + mi.to_string() + ") of '" + fr.name + "'");
                cols.push_back({column_name(fr.name, mi) + "_ref", [&doc, idx, rf, mi](const Point& p) {
                                    return rf->eval(doc.system.project(idx, p), mi);
                                }});
            }
        }
    }
    std::string csv;
    for (std::size_t v = 0; v < doc.system.variables.size(); ++v) csv += (v ? "," : "") + doc.system.variables[v].name;
    for (const auto& c : cols) csv += "," + c.header;
    csv += "\n";
    for (const auto& p : grid) {
        for (std::size_t v = 0; v < p.size(); ++v) csv += (v ? "," : "") + format_double17(p[v]);
        for (const auto& c : cols) csv += "," + format_double17(c.value(p));
        csv += "\n";
    }
    emit(csv, a.out, out);
    return kOk;
}

struct ProfileArgs {
    std::string dir;
    double threshold = 5e-2;
    double r_max = 1e6;
    std::string component = "first";
    std::size_t tau_points = 200;
    std::string out;
};

int cmd_profile(const ProfileArgs& a, std::ostream& out, std::ostream& err) {
    if (!fs::is_directory(a.dir)) throw InputError("'" + a.dir + "' is not a directory");
    if (a.component != "first" && a.component != "second")
        throw ContractError("--component must be 'first' or 'second'");
    const std::size_t comp = a.component == "first" ? 0 : 1;
    std::vector<std::string> solvers;
    std::map<std::string, std::map<std::string, double>> table;  // problem -> solver -> score
    for (const auto& entry : fs::directory_iterator(a.dir)) {
        if (entry.is_directory()) solvers.push_back(entry.path().filename().string());
    }
    std::sort(solvers.begin(), solvers.end());
    for (const auto& s : solvers) {
        for (const auto& entry : fs::directory_iterator(fs::path(a.dir) / s)) {
            if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
            const Json j = read_json(entry.path().string());
            if (!j.contains("V") || !j["V"].is_array() || j["V"].size() != 2)
                throw InputError(entry.path().string() + ": not a scores file (missing V)");
            table[entry.path().stem().string()][s] = j["V"][comp].get<double>();
        }
    }
    if (table.empty()) throw InputError("no score files found under '" + a.dir + "'");

    std::vector<std::vector<double>> scores;
    for (const auto& [problem, row] : table) {
        std::vector<double> r;
        for (const auto& s : solvers) {
            const auto it = row.find(s);
            // A solver without a score for a problem did not solve it.
            r.push_back(it == row.end() ? std::numeric_limits<double>::infinity() : it->second);
        }
        scores.push_back(std::move(r));
    }
    ProfileOptions opt{a.threshold, a.r_max};
    const auto taus = tau_grid(opt.r_max, a.tau_points);
    const auto curves = performance_profiles(scores, solvers, taus, opt);
    std::string csv = "tau,solver,rho\n";
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.tau.size(); ++i)
            csv += format_double17(c.tau[i]) + "," + c.solver + "," + format_double17(c.rho[i]) + "\n";
    emit(csv, a.out, out);
    err << table.size() << " problem(s), " << solvers.size() << " solver(s)\n";
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hybrid variational differential-equation solver"};
    app.name("hdes");
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file and write the result JSON");
    solve_cmd->add_option("problem", sa.problem, "Problem file (.hde)")->required();
    solve_cmd->add_option("--qubits", sa.qubits, "Register size N per function (sign qubit included)");
    solve_cmd->add_option("--depth", sa.depth, "Ansatz depth");
    solve_cmd->add_option("--samples", sa.samples, "Number of sample points n_s");
    solve_cmd->add_option("--max-iter", sa.max_iter, "BFGS iteration budget");
    solve_cmd->add_option("--eps", sa.eps, "Target loss");
    solve_cmd->add_option("--eta", sa.eta, "Boundary penalty weight");
    solve_cmd->add_option("--strategy", sa.strategy, "penalty | floating | tangential");
    solve_cmd->add_option("--seed", sa.seed, "Random seed");
    solve_cmd->add_option("--restarts", sa.restarts, "Number of seeds (seed .. seed+R-1)");
    solve_cmd->add_option("--shots", sa.shots, "Measurement shots (0 = exact)");
    solve_cmd->add_flag("--rescale", sa.rescale, "Map each domain onto [-1, 1]");
    solve_cmd->add_flag("--no-regroup", sa.no_regroup, "Evaluate linear equations term by term");
    solve_cmd->add_option("--function-qubits", sa.function_qubits, "NAME=N register size for one function");
    solve_cmd->add_option("--function-depth", sa.function_depth, "NAME=D depth for one function");
    solve_cmd->add_option("--function-alloc", sa.function_alloc, "NAME=l1,l2,... qubits per variable");
    solve_cmd->add_option("--out", sa.out, "Output file (default stdout)");

    ValidateArgs va;
    auto* validate_cmd = app.add_subcommand("validate", "Score a result against a reference");
    validate_cmd->add_option("result", va.result, "Result JSON")->required();
    validate_cmd->add_flag("--rk4", va.rk4, "Use the Runge-Kutta reference");
    validate_cmd->add_option("--rk4-step", va.rk4_step, "Runge-Kutta step");
    validate_cmd->add_option("--reference", va.reference, "Tabulated reference CSV");
    validate_cmd->add_option("--points", va.points, "Validation points (default 100)");
    validate_cmd->add_option("--out", va.out, "Output file (default stdout)");

    CurveArgs ca;
    auto* curve_cmd = app.add_subcommand("curve", "Tabulate solved functions on a uniform grid");
    curve_cmd->add_option("result", ca.result, "Result JSON")->required();
    curve_cmd->add_option("--points", ca.points, "Grid points (default 100)");
    curve_cmd->add_flag("--derivatives", ca.derivatives, "Add a column per derivative order used");
    curve_cmd->add_flag("--rk4", ca.rk4, "Add Runge-Kutta reference columns");
    curve_cmd->add_option("--rk4-step", ca.rk4_step, "Runge-Kutta step");
    curve_cmd->add_option("--reference", ca.reference, "Add columns from a tabulated reference");
    curve_cmd->add_option("--out", ca.out, "Output file (default stdout)");

    ProfileArgs pa;
    auto* profile_cmd = app.add_subcommand("profile", "Performance profiles from DIR/<solver>/<problem>.json");
    profile_cmd->add_option("dir", pa.dir, "Scores directory")->required();
    profile_cmd->add_option("--threshold", pa.threshold, "Acceptance threshold (default 5e-2)");
    profile_cmd->add_option("--r-max", pa.r_max, "Ratio assigned to failures (default 1e6)");
    profile_cmd->add_option("--component", pa.component, "Score component: first | second");
    profile_cmd->add_option("--tau-points", pa.tau_points, "Number of tau values (default 200)");
    profile_cmd->add_option("--out", pa.out, "Output file (default stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "hdes: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (solve_cmd->parsed()) return cmd_solve(sa, out, err);
        if (validate_cmd->parsed()) return cmd_validate(va, out, err);
        if (curve_cmd->parsed()) return cmd_curve(ca, out, err);
        if (profile_cmd->parsed()) return cmd_profile(pa, out, err);
    } catch (const ParseError& e) {
        err << "hdes: " << e.what() << "\n";
        return kInputError;
    } catch (const InputError& e) {
        err << "hdes: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "hdes: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kInputError;
}

}  // namespace hdes::cli
