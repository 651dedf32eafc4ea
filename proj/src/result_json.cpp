#include "hdes/result_json.hpp"

#include "hdes/error.hpp"
#include "hdes/parser.hpp"

namespace hdes {

namespace {

Json pair_json(const ValidationScore& s) { return Json::array({s.first, s.second}); }

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ContractError(std::string("result JSON: missing field '") + key + "'");
    return j.at(key);
}

template <class T>
T get(const Json& j, const char* key) {
    try {
        return field(j, key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ContractError(std::string("result JSON: field '") + key + "' has the wrong type");
    }
}

}  // namespace

Json config_to_json(const SolverConfig& cfg, std::size_t restarts) {
    Json per = Json::object();
    for (const auto& [name, fs] : cfg.per_function) {
        Json o = Json::object();
        if (fs.qubits) o["qubits"] = *fs.qubits;
        if (!fs.qubits_per_variable.empty()) o["qubits_per_variable"] = fs.qubits_per_variable;
        if (fs.depth) o["depth"] = *fs.depth;
        per[name] = o;
    }
    return Json{{"qubits", cfg.qubits},
                {"depth", cfg.depth},
                {"per_function", per},
                {"samples", cfg.samples},
                {"max_iter", cfg.max_iterations},
                {"eps", cfg.target_loss},
                {"seed", cfg.seed},
                {"shots", cfg.shots},
                {"strategy", to_string(cfg.strategy)},
                {"eta", cfg.eta},
                {"rescale", cfg.rescale},
                {"regroup", cfg.regroup},
                {"restarts", restarts},
                {"threads", worker_count()},
                {"gradient", "central_difference"},
                {"fd_step", 1e-7}};
}

Json result_to_json(const SolveResult& result, const DESystem& sys, const std::string& source, const Json& config_echo,
                    const MultiStartResult* multi) {
    Json vars = Json::array();
    for (const auto& v : sys.variables) vars.push_back({{"name", v.name}, {"domain", {v.domain.lo, v.domain.hi}}});
    Json fns = Json::array();
    for (const auto& f : result.functions) {
        Json coeffs = Json::array();
        for (const auto& t : f.expansion.terms()) coeffs.push_back({{"orders", t.orders}, {"coefficient", t.coefficient}});
        Json orders = Json::array();
        for (const auto& mi : f.orders) orders.push_back(mi.counts());
        Json maps = Json::array();
        for (const auto& m : f.maps) maps.push_back({{"scale", m.scale}, {"offset", m.offset}});
        fns.push_back({{"name", f.name},
                       {"variables", f.variables},
                       {"qubits", f.alloc.total_qubits()},
                       {"qubits_per_variable", f.alloc.qubits_per_variable()},
                       {"depth", f.depth},
                       {"orders", orders},
                       {"coefficients", coeffs},
                       {"lambda", f.lambda},
                       {"angles", f.angles},
                       {"shift", f.shift.coefficients()},
                       {"domain_map", maps}});
    }
    Json j{{"problem", source},
           {"variables", vars},
           {"functions", fns},
           {"final_loss", result.final_loss},
           {"iterations", result.iterations},
           {"evaluations", result.evaluations},
           {"termination", result.termination},
           {"loss_trace", result.loss_trace},
           {"seed", result.seed},
           {"config_echo", config_echo}};
    if (multi) {
        const auto& s = multi->summary;
        Json samples = Json::array();
        for (const auto& p : s.samples) samples.push_back(p);
        Json mean = Json::object(), stddev = Json::object();
        for (std::size_t f = 0; f < sys.functions.size(); ++f) {
            mean[sys.functions[f].name] = s.mean[f];
            stddev[sys.functions[f].name] = s.stddev[f];
        }
        j["multi_start"] = {{"restarts", multi->runs.size()},
                            {"best_loss", s.best_loss},
                            {"median_loss", s.median_loss},
                            {"mean_loss", s.mean_loss},
                            {"best_seed", multi->runs[s.best_index].seed},
                            {"final_losses", s.final_losses},
                            {"samples", samples},
                            {"mean", mean},
                            {"stddev", stddev}};
    }
    return j;
}

std::vector<ScoredFunction> ResultDocument::scored() const {
    std::vector<ScoredFunction> out;
    for (const auto& f : functions) out.push_back({f.solved(), f.orders});
    return out;
}

ResultDocument result_from_json(const Json& j) {
    ResultDocument doc;
    doc.source = get<std::string>(j, "problem");
    doc.system = parse_problem(doc.source);
    const Json& fns = field(j, "functions");
    if (!fns.is_array()) throw ContractError("result JSON: 'functions' must be an array");
    if (fns.size() != doc.system.functions.size())
        throw ContractError("result JSON: function count does not match the embedded problem");
    for (const auto& fj : fns) {
        FunctionResult f;
        f.name = get<std::string>(fj, "name");
        const std::size_t idx = doc.system.function_index(f.name);
        f.variables = get<std::vector<std::string>>(fj, "variables");
        f.alloc = VariableAllocation(get<std::vector<int>>(fj, "qubits_per_variable"));
        f.depth = get<int>(fj, "depth");
        for (const auto& o : get<std::vector<std::vector<int>>>(fj, "orders")) f.orders.insert(MultiIndex(o));
        std::vector<SpectralTerm> terms;
        for (const auto& t : field(fj, "coefficients"))
            terms.push_back({get<std::vector<int>>(t, "orders"), get<double>(t, "coefficient")});
        f.lambda = get<double>(fj, "lambda");
        f.angles = get<std::vector<double>>(fj, "angles");
        f.shift = ShiftFunction(get<std::vector<double>>(fj, "shift"));
        for (const auto& m : field(fj, "domain_map")) f.maps.push_back({get<double>(m, "scale"), get<double>(m, "offset")});
        if (f.variables.size() != doc.system.functions[idx].variables.size())
            throw ContractError("result JSON: variables of '" + f.name + "' do not match the problem");
        f.expansion = SpectralExpansion(f.variables.size(), std::move(terms), f.maps);
        doc.functions.push_back(std::move(f));
    }
    doc.final_loss = get<double>(j, "final_loss");
    doc.iterations = get<std::size_t>(j, "iterations");
    doc.termination = get<std::string>(j, "termination");
    doc.loss_trace = get<std::vector<double>>(j, "loss_trace");
    doc.seed = get<std::uint64_t>(j, "seed");
    doc.config_echo = field(j, "config_echo");
    if (j.contains("multi_start")) doc.multi_start = j.at("multi_start");
    return doc;
}

Json scores_to_json(const SolutionScores& scores) {
    Json per = Json::object();
    for (const auto& f : scores.functions) {
        Json orders = Json::object();
        for (const auto& [mi, s] : f.per_order) orders[mi.to_string()] = pair_json(s);
        per[f.name] = {{"orders", orders}, {"V_f", pair_json(f.vf)}};
    }
    return Json{{"per_function", per}, {"V", pair_json(scores.global)}};
}

}  // namespace hdes
