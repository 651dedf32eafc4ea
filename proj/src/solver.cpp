#include "hdes/solver.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <limits>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "hdes/bfgs.hpp"
#include "hdes/error.hpp"
#include "hdes/samples.hpp"

namespace hdes {

namespace {

std::size_t positive_integer(const ProblemOption& o) {
    const double v = *o.number;
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
        throw ContractError("option " + o.key + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

}  // namespace

void SolverConfig::validate() const {
    auto check_qubits = [](int q) {
        if (q < 2 || q > VariableAllocation::kMaxQubits)
            throw ContractError("qubits must be in [2, " + std::to_string(VariableAllocation::kMaxQubits) + "]");
    };
    check_qubits(qubits);
    if (depth < 1) throw ContractError("depth must be >= 1");
    for (const auto& [name, fs] : per_function) {
        if (fs.qubits) check_qubits(*fs.qubits);
        if (fs.depth && *fs.depth < 1) throw ContractError("depth of '" + name + "' must be >= 1");
    }
    if (samples < 1) throw ContractError("samples must be >= 1");
    if (max_iterations < 1) throw ContractError("max_iter must be >= 1");
    if (!(target_loss > 0.0) || !std::isfinite(target_loss)) throw ContractError("eps must be positive");
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ContractError("eta must be finite and >= 0");
}

SolverConfig config_from_problem(const DESystem& sys) {
    SolverConfig cfg;
    for (const auto& o : sys.options) {
        if (o.key == "strategy") cfg.strategy = parse_strategy(o.word);
        else if (o.key == "max_iter") cfg.max_iterations = positive_integer(o);
        else if (o.key == "qubits") cfg.qubits = static_cast<int>(positive_integer(o));
        else if (o.key == "depth") cfg.depth = static_cast<int>(positive_integer(o));
        else if (o.key == "samples") cfg.samples = positive_integer(o);
        else if (o.key == "eta") cfg.eta = *o.number;
        else if (o.key == "eps") cfg.target_loss = *o.number;
    }
    return cfg;
}

std::vector<FunctionLayout> build_layouts(const DESystem& sys, const SolverConfig& cfg) {
    cfg.validate();
    for (const auto& [name, fs] : cfg.per_function) (void)sys.function_index(name);
    std::vector<FunctionLayout> out;
    for (std::size_t f = 0; f < sys.functions.size(); ++f) {
        const auto& decl = sys.functions[f];
        const auto it = cfg.per_function.find(decl.name);
        const FunctionSettings* fs = it == cfg.per_function.end() ? nullptr : &it->second;
        FunctionLayout lay;
        if (fs && !fs->qubits_per_variable.empty()) {
            lay.alloc = VariableAllocation(fs->qubits_per_variable);
        } else {
            lay.alloc = VariableAllocation::split(fs && fs->qubits ? *fs->qubits : cfg.qubits, decl.variables.size());
        }
        if (lay.alloc.variables() != decl.variables.size())
            throw ContractError("qubit allocation of '" + decl.name + "' does not match its variable count");
        lay.depth = fs && fs->depth ? *fs->depth : cfg.depth;
        if (cfg.rescale)
            for (std::size_t v : decl.variables)
                lay.maps.push_back(AffineMap::onto_unit(sys.variables[v].domain.lo, sys.variables[v].domain.hi));
        out.push_back(std::move(lay));
    }
    return out;
}

std::vector<double> init_params(const DESystem& sys, const SolverConfig& cfg, std::uint64_t seed) {
    const auto layouts = build_layouts(sys, cfg);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> scale(0.0, std::log(10.0));
    std::vector<double> p;
    for (const auto& lay : layouts) {
        for (std::size_t i = 0; i + 1 < lay.parameter_count(); ++i) p.push_back(angle(rng));
        p.push_back(scale(rng));
    }
    return p;
}

LossEngine make_loss_engine(const DESystem& sys, const SolverConfig& cfg) {
    LossConfig lc;
    lc.eta = cfg.eta;
    lc.strategy = cfg.strategy;
    lc.samples = generate_samples(cfg.samples, sys.domain());
    lc.regroup = cfg.regroup;
    lc.shots = cfg.shots;
    lc.seed = cfg.seed;
    return LossEngine(sys, build_layouts(sys, cfg), std::move(lc));
}

SolveResult solve(const DESystem& sys, const SolverConfig& cfg) {
    const LossEngine engine = make_loss_engine(sys, cfg);
    const Objective objective = [&engine](std::span<const double> p) {
        try {
            return engine(p);
        } catch (const EvaluationError&) {
            return std::numeric_limits<double>::infinity();
        }
    };
    BfgsOptions opt;
    opt.max_iterations = cfg.max_iterations;
    opt.target_loss = cfg.target_loss;
    opt.workers = std::max<std::size_t>(cfg.workers, 1);

    std::vector<double> p0 = init_params(sys, cfg, cfg.seed);
    const double f0 = objective(p0);
    if (!std::isfinite(f0)) {
        // Reproduce the underlying evaluation error for the caller.
        (void)engine(p0);
        throw ContractError("loss is not finite at the initial parameters");
    }
    const BfgsResult br = bfgs_minimize(objective, std::move(p0), opt);

    SolveResult res;
    res.parameters = br.x;
    res.final_loss = br.value;
    res.loss_trace = br.trace;
    res.iterations = br.iterations;
    res.evaluations = br.evaluations;
    res.termination = br.termination;
    res.seed = cfg.seed;

    const auto fns = engine.decode(res.parameters);
    const auto shifts = engine.shifts(fns);
    const auto orders = derivative_orders(sys);
    for (std::size_t f = 0; f < fns.size(); ++f) {
        FunctionResult fr;
        fr.name = sys.functions[f].name;
        for (std::size_t v : sys.functions[f].variables) fr.variables.push_back(sys.variables[v].name);
        fr.alloc = fns[f].allocation();
        fr.depth = fns[f].circuit().depth();
        fr.angles.assign(fns[f].angles().begin(), fns[f].angles().end());
        fr.lambda = fns[f].lambda();
        fr.maps.assign(fns[f].maps().begin(), fns[f].maps().end());
        fr.orders = orders[f];
        fr.expansion = to_closed_form(fns[f]);
        fr.shift = shifts[f];
        res.functions.push_back(std::move(fr));
    }
    return res;
}

MultiStartResult multi_start(const DESystem& sys, const SolverConfig& cfg, std::size_t restarts) {
    if (restarts < 1) throw ContractError("multi_start: restarts must be >= 1");
    cfg.validate();
    MultiStartResult out;
    out.runs.resize(restarts);

    const std::size_t workers = std::min(worker_count(), restarts);
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(restarts);
    auto work = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < restarts;) {
            try {
                SolverConfig c = cfg;
                c.seed = cfg.seed + r;
                if (workers > 1) c.workers = 1;
                out.runs[r] = solve(sys, c);
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    MultiStartSummary& s = out.summary;
    s.samples = generate_samples(cfg.samples, sys.domain());
    const std::size_t nf = sys.functions.size();
    s.mean.assign(nf, std::vector<double>(s.samples.size(), 0.0));
    s.stddev.assign(nf, std::vector<double>(s.samples.size(), 0.0));
    for (std::size_t f = 0; f < nf; ++f) {
        std::vector<SolvedFunction> solved;
        for (const auto& run : out.runs) solved.push_back(run.functions[f].solved());
        for (std::size_t i = 0; i < s.samples.size(); ++i) {
            const Point x = sys.project(f, s.samples[i]);
            std::vector<double> v;
            for (const auto& sf : solved) v.push_back(sf.evaluate(x));
            const double m = pairwise_sum(v) / static_cast<double>(v.size());
            for (double& d : v) d = (d - m) * (d - m);
            s.mean[f][i] = m;
            s.stddev[f][i] = std::sqrt(pairwise_sum(v) / static_cast<double>(v.size()));
        }
    }
    for (const auto& run : out.runs) s.final_losses.push_back(run.final_loss);
    s.best_index = static_cast<std::size_t>(std::min_element(s.final_losses.begin(), s.final_losses.end()) -
                                            s.final_losses.begin());
    s.best_loss = s.final_losses[s.best_index];
    s.mean_loss = pairwise_sum(s.final_losses) / static_cast<double>(restarts);
    std::vector<double> sorted = s.final_losses;
    std::sort(sorted.begin(), sorted.end());
    s.median_loss = restarts % 2 ? sorted[restarts / 2] : 0.5 * (sorted[restarts / 2 - 1] + sorted[restarts / 2]);
    return out;
}

}  // namespace hdes
