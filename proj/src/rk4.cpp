#include "hdes/rk4.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <memory>

#include "hdes/error.hpp"

namespace hdes {

Rk4Trajectory::Rk4Trajectory(OdeRhs rhs, double x0, std::vector<double> y0, double x1, double h)
    : rhs_(std::move(rhs)) {
    if (!(x1 > x0)) throw ContractError("rk4: need x1 > x0");
    if (!(h > 0.0)) throw ContractError("rk4: step must be positive");
    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil((x1 - x0) / h - 1e-9)));
    const double step = (x1 - x0) / static_cast<double>(n);
    const std::size_t dim = y0.size();

    auto axpy = [&](const std::vector<double>& y, double a, const std::vector<double>& k) {
        std::vector<double> out(dim);
        for (std::size_t i = 0; i < dim; ++i) out[i] = y[i] + a * k[i];
        return out;
    };
    xs_.reserve(n + 1);
    xs_.push_back(x0);
    ys_.push_back(std::move(y0));
    dys_.push_back(rhs_(x0, ys_.back()));
    for (std::size_t i = 0; i < n; ++i) {
        const double x = xs_.back();
        const std::vector<double>& y = ys_.back();
        const std::vector<double>& k1 = dys_.back();
        const auto k2 = rhs_(x + 0.5 * step, axpy(y, 0.5 * step, k1));
        const auto k3 = rhs_(x + 0.5 * step, axpy(y, 0.5 * step, k2));
        const auto k4 = rhs_(x + step, axpy(y, step, k3));
        std::vector<double> next(dim);
        for (std::size_t j = 0; j < dim; ++j) next[j] = y[j] + step / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        const double xn = i + 1 == n ? x1 : x0 + step * static_cast<double>(i + 1);
        xs_.push_back(xn);
        dys_.push_back(rhs_(xn, next));
        ys_.push_back(std::move(next));
    }
}

std::vector<double> Rk4Trajectory::state(double x) const {
    const double lo = xs_.front(), hi = xs_.back();
    const double tol = 1e-12 * std::max(1.0, std::fabs(hi - lo));
    if (x < lo - tol || x > hi + tol) throw ContractError("rk4: x = " + format_double(x) + " outside the trajectory");
    x = std::clamp(x, lo, hi);
    const std::size_t n = steps();
    const double step = (hi - lo) / static_cast<double>(n);
    auto k = static_cast<std::size_t>((x - lo) / step);
    k = std::min(k, n - 1);
    const double hk = xs_[k + 1] - xs_[k];
    const double t = (x - xs_[k]) / hk;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    std::vector<double> y(ys_[k].size());
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = h00 * ys_[k][i] + h10 * hk * dys_[k][i] + h01 * ys_[k + 1][i] + h11 * hk * dys_[k + 1][i];
    return y;
}

std::vector<double> Rk4Trajectory::rhs(double x) const { return rhs_(x, state(x)); }

namespace {

// Solves the equations for the highest derivatives of every function.
class TopDerivatives {
public:
    TopDerivatives(const DESystem& sys, std::vector<int> top, std::vector<std::size_t> offsets)
        : sys_(sys), top_(std::move(top)), offsets_(std::move(offsets)) {}

    std::vector<double> solve(double x, std::span<const double> y) const {
        const auto n = static_cast<Eigen::Index>(top_.size());
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd r = residual(x, y, z);
        for (int it = 0; it < 60; ++it) {
            const double scale = std::max(1.0, z.lpNorm<Eigen::Infinity>());
            if (r.lpNorm<Eigen::Infinity>() <= 1e-13 * scale) break;
            Eigen::MatrixXd j(n, n);
            for (Eigen::Index c = 0; c < n; ++c) {
                Eigen::VectorXd zp = z;
                const double dz = 1e-7 * std::max(1.0, std::fabs(z[c]));
                zp[c] += dz;
                j.col(c) = (residual(x, y, zp) - r) / dz;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
            if (!lu.isInvertible())
                throw ContractError("rk4: equations cannot be solved for the highest derivatives");
            const Eigen::VectorXd step = lu.solve(r);
            z -= step;
            r = residual(x, y, z);
            if (step.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, z.lpNorm<Eigen::Infinity>())) break;
        }
        return std::vector<double>(z.data(), z.data() + n);
    }

private:
    Eigen::VectorXd residual(double x, std::span<const double> y, const Eigen::VectorXd& z) const {
        std::vector<double> slots(sys_.slots.size());
        for (std::size_t k = 0; k < slots.size(); ++k) {
            const Slot& s = sys_.slots[k];
            const int q = s.order[0];
            slots[k] = q == top_[s.function] ? z[static_cast<Eigen::Index>(s.function)] : y[offsets_[s.function] + q];
        }
        const double xv[1] = {x};
        Eigen::VectorXd r(static_cast<Eigen::Index>(sys_.equations.size()));
        for (std::size_t e = 0; e < sys_.equations.size(); ++e)
            r[static_cast<Eigen::Index>(e)] = evaluate_expr(*sys_.equations[e].expr, slots, xv);
        return r;
    }

    DESystem sys_;
    std::vector<int> top_;
    std::vector<std::size_t> offsets_;
};

bool match_equations(const std::vector<std::vector<bool>>& defines, std::size_t e, std::vector<bool>& used) {
    if (e == defines.size()) return true;
    for (std::size_t f = 0; f < used.size(); ++f) {
        if (!defines[e][f] || used[f]) continue;
        used[f] = true;
        if (match_equations(defines, e + 1, used)) return true;
        used[f] = false;
    }
    return false;
}

struct Condition {
    std::size_t component;
    double x;
    double value;
};

}  // namespace

ReferenceSolution rk4_reference(const DESystem& sys, double h) {
    if (sys.variables.size() != 1) throw ContractError("rk4 reference needs a single independent variable");
    const std::size_t nf = sys.functions.size();
    if (sys.equations.size() != nf)
        throw ContractError("rk4 reference needs as many equations as functions");
    const auto orders = derivative_orders(sys);
    std::vector<int> top(nf, 0);
    std::vector<std::size_t> offsets(nf, 0);
    std::size_t dim = 0;
    for (std::size_t f = 0; f < nf; ++f) {
        for (const auto& mi : orders[f]) top[f] = std::max(top[f], mi[0]);
        if (top[f] == 0)
            throw ContractError("rk4 reference: '" + sys.functions[f].name + "' never appears differentiated");
        offsets[f] = dim;
        dim += static_cast<std::size_t>(top[f]);
    }
    std::vector<std::vector<bool>> defines(nf, std::vector<bool>(nf, false));
    for (std::size_t e = 0; e < nf; ++e)
        for (std::size_t k : referenced_slots(*sys.equations[e].expr)) {
            const Slot& s = sys.slots[k];
            if (s.order[0] == top[s.function]) defines[e][s.function] = true;
        }
    std::vector<bool> used(nf, false);
    if (!match_equations(defines, 0, used))
        throw ContractError("rk4 reference: equations cannot be matched to highest derivatives");

    const Interval dom = sys.variables[0].domain;
    std::vector<Condition> left, other;
    for (const auto& bc : sys.boundary_conditions) {
        const int q = bc.order[0];
        if (q >= top[bc.function])
            throw ContractError("rk4 reference: condition on derivative order " + std::to_string(q) + " of '" +
                                sys.functions[bc.function].name + "' is not part of the state");
        Condition c{offsets[bc.function] + static_cast<std::size_t>(q), bc.point[0], bc.value};
        (c.x == dom.lo ? left : other).push_back(c);
    }
    if (left.size() + other.size() != dim)
        throw ContractError("rk4 reference: " + std::to_string(dim) + " conditions needed, " +
                            std::to_string(left.size() + other.size()) + " given");
    std::vector<bool> fixed(dim, false);
    for (const auto& c : left) {
        if (fixed[c.component]) throw ContractError("rk4 reference: duplicate initial condition");
        fixed[c.component] = true;
    }
    std::vector<std::size_t> unknown;
    for (std::size_t i = 0; i < dim; ++i)
        if (!fixed[i]) unknown.push_back(i);

    auto solver = std::make_shared<TopDerivatives>(sys, top, offsets);
    OdeRhs rhs = [solver, top, offsets, dim](double x, std::span<const double> y) {
        const auto z = solver->solve(x, y);
        std::vector<double> dy(dim);
        for (std::size_t f = 0; f < top.size(); ++f) {
            for (int q = 0; q + 1 < top[f]; ++q) dy[offsets[f] + q] = y[offsets[f] + q + 1];
            dy[offsets[f] + top[f] - 1] = z[f];
        }
        return dy;
    };

    std::vector<double> y0(dim, 0.0);
    for (const auto& c : left) y0[c.component] = c.value;
    auto integrate = [&](const std::vector<double>& start) {
        return std::make_shared<Rk4Trajectory>(rhs, dom.lo, start, dom.hi, h);
    };
    auto mismatch = [&](const Rk4Trajectory& tr) {
        Eigen::VectorXd r(static_cast<Eigen::Index>(other.size()));
        for (std::size_t i = 0; i < other.size(); ++i)
            r[static_cast<Eigen::Index>(i)] = tr.state(other[i].x)[other[i].component] - other[i].value;
        return r;
    };

    auto traj = integrate(y0);
    if (!unknown.empty()) {
        // Newton shooting on the initial values not fixed at the left end.
        const auto n = static_cast<Eigen::Index>(unknown.size());
        Eigen::VectorXd r = mismatch(*traj);
        for (int it = 0; it < 40; ++it) {
            double scale = 1.0;
            for (const auto& c : other) scale = std::max(scale, std::fabs(c.value));
            if (r.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) break;
            Eigen::MatrixXd j(n, n);
            for (Eigen::Index c = 0; c < n; ++c) {
                std::vector<double> yp = y0;
                const double du = 1e-6 * std::max(1.0, std::fabs(y0[unknown[c]]));
                yp[unknown[c]] += du;
                j.col(c) = (mismatch(*integrate(yp)) - r) / du;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
            if (!lu.isInvertible()) throw ContractError("rk4 reference: boundary conditions do not determine the solution");
            const Eigen::VectorXd step = lu.solve(r);
            for (Eigen::Index c = 0; c < n; ++c) y0[unknown[c]] -= step[c];
            traj = integrate(y0);
            r = mismatch(*traj);
        }
        double scale = 1.0;
        for (const auto& c : other) scale = std::max(scale, std::fabs(c.value));
        if (r.lpNorm<Eigen::Infinity>() > 1e-8 * scale)
            throw ContractError("rk4 reference: shooting did not converge");
    }

    ReferenceSolution ref;
    ref.kind = ReferenceKind::Rk4;
    for (std::size_t f = 0; f < nf; ++f) {
        ReferenceFunction rf;
        rf.name = sys.functions[f].name;
        for (int q = 0; q <= top[f] + 1; ++q) rf.orders.insert(MultiIndex({q}));
        const int m = top[f];
        const std::size_t off = offsets[f];
        rf.eval = [traj, solver, m, off, f, dom](std::span<const double> x, const MultiIndex& mi) {
            if (x.size() != 1 || mi.size() != 1) throw ContractError("rk4 reference is univariate");
            const int q = mi[0];
            auto top_at = [&](double t) { return solver->solve(t, traj->state(t))[f]; };
            if (q < m) return traj->state(x[0])[off + static_cast<std::size_t>(q)];
            if (q == m) return top_at(x[0]);
            if (q == m + 1) {
                const double d = 1e-5;
                const double t = x[0];
                if (t - d < dom.lo) return (-3.0 * top_at(t) + 4.0 * top_at(t + d) - top_at(t + 2 * d)) / (2 * d);
                if (t + d > dom.hi) return (3.0 * top_at(t) - 4.0 * top_at(t - d) + top_at(t - 2 * d)) / (2 * d);
                return (top_at(t + d) - top_at(t - d)) / (2 * d);
            }
            throw ContractError("rk4 reference supports derivative orders up to " + std::to_string(m + 1));
        };
        ref.functions.push_back(std::move(rf));
    }
    return ref;
}

}  // namespace hdes
