#include "hdes/bfgs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "hdes/error.hpp"

namespace hdes {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kValueResolution = 1e-12;

class Problem {
public:
    Problem(const Objective& f, const GradientFn& g, const BfgsOptions& opt) : f_(f), g_(g), opt_(opt) {}

    double value(const Vec& x) {
        ++evaluations_;
        const double v = f_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
        return std::isfinite(v) ? v : kInf;
    }

    Vec gradient(const Vec& x) {
        const auto n = static_cast<std::size_t>(x.size());
        Vec out(x.size());
        if (g_) {
            g_(std::span<const double>(x.data(), n), std::span<double>(out.data(), n));
        } else {
            const Objective counted = [this](std::span<const double> p) {
                evaluations_.fetch_add(1, std::memory_order_relaxed);
                return f_(p);
            };
            const auto g = central_difference_gradient(counted, std::span<const double>(x.data(), n), opt_.fd_step,
                                                       opt_.workers);
            for (std::size_t i = 0; i < n; ++i) out[static_cast<Eigen::Index>(i)] = g[i];
        }
        return out;
    }

    std::size_t evaluations() const { return evaluations_; }

private:
    const Objective& f_;
    const GradientFn& g_;
    const BfgsOptions& opt_;
    std::atomic<std::size_t> evaluations_{0};
};

struct LinePoint {
    double alpha = 0.0;
    double value = kInf;
    Vec grad;
    double slope = 0.0;
};

struct LineResult {
    bool ok = false;
    LinePoint point;
};

// Minimizer of the quadratic through (a, fa) with slope da and (b, fb), kept inside
// the middle 80% of [a, b]; bisection when the data are unusable.
double interpolate(double a, double fa, double da, double b, double fb) {
    const double lo = std::min(a, b), hi = std::max(a, b);
    const double w = hi - lo;
    double t = 0.5 * (a + b);
    if (std::isfinite(fb)) {
        const double d = b - a;
        const double denom = 2.0 * (fb - fa - da * d);
        if (denom > 0.0) t = a - da * d * d / denom;
    }
    if (!(t >= lo + 0.1 * w && t <= hi - 0.1 * w)) t = 0.5 * (a + b);
    return t;
}

class LineSearch {
public:
    LineSearch(Problem& p, const Vec& x, double f0, const Vec& g0, const Vec& d, double c1, double c2)
        : p_(p), x_(x), d_(d), f0_(f0), slope0_(g0.dot(d)), c1_(c1), c2_(c2) {}

    LineResult run(double alpha0) {
        LinePoint prev{0.0, f0_, Vec(), slope0_};
        double alpha = alpha0;
        for (int i = 0; i < 40; ++i) {
            LinePoint cur = probe_value(alpha);
            if (!armijo(cur) || (i > 0 && cur.value >= prev.value)) {
                if (approx_wolfe(cur)) return {true, cur};
                return zoom(prev, cur);
            }
            with_gradient(cur);
            remember(cur);
            if (std::fabs(cur.slope) <= -c2_ * slope0_) return {true, cur};
            if (cur.slope >= 0.0) return zoom(cur, prev);
            prev = cur;
            alpha *= 2.0;
            if (alpha > 1e8) break;
        }
        return fallback();
    }

private:
    Problem& p_;
    const Vec& x_;
    const Vec& d_;
    double f0_;
    double slope0_;
    double c1_, c2_;
    LinePoint best_;  // best Armijo point seen with its gradient

    LinePoint probe_value(double alpha) {
        LinePoint pt;
        pt.alpha = alpha;
        pt.value = p_.value(x_ + alpha * d_);
        return pt;
    }
    void with_gradient(LinePoint& pt) {
        pt.grad = p_.gradient(x_ + pt.alpha * d_);
        pt.slope = pt.grad.dot(d_);
    }
    bool armijo(const LinePoint& pt) const { return pt.value <= f0_ + c1_ * pt.alpha * slope0_; }
    // Approximate Wolfe conditions (Hager-Zhang) for steps whose expected decrease is
    // lost in rounding: no increase in value, sufficient decrease measured on the slope.
    bool approx_wolfe(LinePoint& pt) {
        const double resolution = kValueResolution * std::fabs(f0_);
        if (!(pt.value <= f0_ + resolution) || -pt.alpha * slope0_ > resolution) return false;
        with_gradient(pt);
        if (!(pt.value <= f0_)) return false;
        remember(pt);
        return c2_ * slope0_ <= pt.slope && pt.slope <= (2.0 * c1_ - 1.0) * slope0_;
    }
    void remember(const LinePoint& pt) {
        if (pt.value < best_.value) best_ = pt;
    }
    LineResult fallback() const {
        if (best_.grad.size() > 0 && best_.value < f0_) return {true, best_};
        return {false, {}};
    }

    LineResult zoom(LinePoint lo, LinePoint hi) {
        for (int i = 0; i < 40; ++i) {
            const double alpha = interpolate(lo.alpha, lo.value, lo.slope, hi.alpha, hi.value);
            if (std::fabs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::fabs(lo.alpha))) break;
            LinePoint cur = probe_value(alpha);
            if (!armijo(cur) || cur.value >= lo.value) {
                if (approx_wolfe(cur)) return {true, cur};
                // below value resolution the slope decides the side
                if (cur.grad.size() > 0 && cur.slope * (hi.alpha - lo.alpha) < 0.0) {
                    lo = cur;
                    continue;
                }
                hi = cur;
                continue;
            }
            with_gradient(cur);
            remember(cur);
            if (std::fabs(cur.slope) <= -c2_ * slope0_) return {true, cur};
            if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
            lo = cur;
        }
        return fallback();
    }
};

}  // namespace

std::vector<double> central_difference_gradient(const Objective& f, std::span<const double> x, double h,
                                                std::size_t workers) {
    const std::size_t n = x.size();
    std::vector<double> g(n);
    auto component = [&](std::size_t i, std::vector<double>& work) {
        work[i] = x[i] + h;
        const double up = f(work);
        work[i] = x[i] - h;
        const double down = f(work);
        work[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        std::vector<double> work(x.begin(), x.end());
        for (std::size_t i = 0; i < n; ++i) component(i, work);
        return g;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            std::vector<double> work(x.begin(), x.end());
            for (std::size_t i = w; i < n; i += workers) component(i, work);
        });
    }
    for (auto& t : pool) t.join();
    return g;
}

BfgsResult bfgs_minimize(const Objective& f, std::vector<double> x0, const BfgsOptions& opt,
                         const GradientFn& gradient) {
    if (x0.empty()) throw ContractError("bfgs_minimize: empty parameter vector");
    if (opt.max_iterations < 1) throw ContractError("bfgs_minimize: max_iterations must be >= 1");
    if (!(opt.fd_step > 0.0)) throw ContractError("bfgs_minimize: fd_step must be positive");
    if (!(0.0 < opt.c1 && opt.c1 < opt.c2 && opt.c2 < 1.0)) throw ContractError("bfgs_minimize: need 0 < c1 < c2 < 1");

    Problem prob(f, gradient, opt);
    const auto n = static_cast<Eigen::Index>(x0.size());
    Vec x = Eigen::Map<const Vec>(x0.data(), n);
    double fx = prob.value(x);
    if (!std::isfinite(fx)) throw ContractError("bfgs_minimize: objective is not finite at the starting point");

    BfgsResult res;
    res.trace.push_back(fx);
    auto finish = [&](const char* reason) {
        res.x.assign(x.data(), x.data() + n);
        res.value = fx;
        res.termination = reason;
        res.evaluations = prob.evaluations();
        return res;
    };
    if (fx <= opt.target_loss) return finish("target_reached");

    Vec g = prob.gradient(x);
    if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance) return finish("gradient_converged");

    Mat h = Mat::Identity(n, n);
    bool identity = true;
    bool scaled = false;
    while (res.iterations < opt.max_iterations) {
        Vec d = -h * g;
        if (!(g.dot(d) < 0.0)) {
            h.setIdentity();
            identity = true;
            d = -g;
        }
        // With an unscaled H the first trial step is capped at unit length.
        auto first_alpha = [&] { return identity ? std::min(1.0, 1.0 / d.norm()) : 1.0; };
        LineResult ls = LineSearch(prob, x, fx, g, d, opt.c1, opt.c2).run(first_alpha());
        if (!ls.ok && !identity) {
            h.setIdentity();
            identity = true;
            d = -g;
            ls = LineSearch(prob, x, fx, g, d, opt.c1, opt.c2).run(first_alpha());
        }
        if (!ls.ok) return finish("line_search_stalled");

        const Vec s = ls.point.alpha * d;
        const Vec y = ls.point.grad - g;
        x += s;
        fx = ls.point.value;
        g = ls.point.grad;
        ++res.iterations;
        res.trace.push_back(fx);

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
            if (!scaled) {
                h = Mat::Identity(n, n) * (sy / y.dot(y));
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const Vec hy = h * y;
            // H+ = (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
            h += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
            identity = false;
        }

        if (fx <= opt.target_loss) return finish("target_reached");
        if (g.lpNorm<Eigen::Infinity>() <= opt.gradient_tolerance) return finish("gradient_converged");
    }
    return finish("max_iterations");
}

}  // namespace hdes
