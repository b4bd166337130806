#include "aqc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aqc {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

void adam_step(AdamState& state, std::span<const double> gradient,
               std::vector<double>& angles) {
    if (state.m.size() != angles.size() || gradient.size() != angles.size())
        throw std::invalid_argument("adam state, gradient and angles sizes differ");
    for (double g : gradient)
        if (!std::isfinite(g))
            throw std::runtime_error("adam received a non-finite gradient");

    const AdamConfig& c = state.cfg;
    state.t += 1;
    const double b1t = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double b2t = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < angles.size(); ++i) {
        state.m[i] = c.beta1 * state.m[i] + (1.0 - c.beta1) * gradient[i];
        state.v[i] = c.beta2 * state.v[i] + (1.0 - c.beta2) * gradient[i] * gradient[i];
        double mhat = state.m[i] / b1t;
        double vhat = state.v[i] / b2t;
        angles[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

const char* schedule_mode_name(WeightSchedule::Mode mode) {
    switch (mode) {
    case WeightSchedule::Mode::None: return "none";
    case WeightSchedule::Mode::SqrtCost: return "sqrt";
    default: return "ema";
    }
}

void update_weight(WeightSchedule& schedule, double cost) {
    if (cost < -1e-12)
        throw std::invalid_argument("weight schedule received a negative cost");
    if (schedule.mode == WeightSchedule::Mode::None) return;
    double r = std::sqrt(std::max(0.0, cost));
    if (schedule.mode == WeightSchedule::Mode::SqrtCost)
        schedule.w = r;
    else
        schedule.w = schedule.ema_mix * r + schedule.ema_keep * schedule.w;
    schedule.w = std::clamp(schedule.w, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Strong-Wolfe line search
// ---------------------------------------------------------------------------

namespace {

struct LineEval {
    double a = 0.0;
    double f = 0.0;
    double dphi = 0.0;
};

class LineSearcher {
public:
    LineSearcher(const Objective& obj, std::span<const double> x0,
                 std::span<const double> dir, double f0, double dphi0,
                 const LbfgsConfig& cfg)
        : obj_(obj), x0_(x0), dir_(dir), f0_(f0), dphi0_(dphi0), cfg_(cfg),
          x_(x0.size()), g_(x0.size()) {}

    /// Returns the accepted step length, or 0 on failure. On success x()/g()/f()
    /// hold the evaluation at the accepted point.
    double search(double a_init) {
        const double a_max = 1e4;
        LineEval prev{0.0, f0_, dphi0_};
        double a = a_init;
        for (std::size_t it = 0; it < cfg_.max_line_search_steps; ++it) {
            LineEval cur = eval(a);
            if (cur.f > f0_ + cfg_.wolfe_c1 * a * dphi0_ || (it > 0 && cur.f >= prev.f))
                return zoom(prev, cur);
            if (std::abs(cur.dphi) <= -cfg_.wolfe_c2 * dphi0_) return cur.a;
            if (cur.dphi >= 0.0) return zoom(cur, prev);
            prev = cur;
            a = std::min(2.0 * a, a_max);
            if (prev.a >= a_max) break;
        }
        return 0.0;
    }

    const std::vector<double>& x() const { return x_; }
    const std::vector<double>& g() const { return g_; }
    double f() const { return f_; }

private:
    LineEval eval(double a) {
        for (std::size_t i = 0; i < x_.size(); ++i) x_[i] = x0_[i] + a * dir_[i];
        f_ = obj_(x_, g_);
        ++evals_;
        return {a, f_, dot(g_, dir_)};
    }

    double zoom(LineEval lo, LineEval hi) {
        for (std::size_t it = 0; it < cfg_.max_line_search_steps; ++it) {
            if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, std::abs(lo.a))) break;
            double a = interpolate(lo, hi);
            LineEval cur = eval(a);
            if (cur.f > f0_ + cfg_.wolfe_c1 * a * dphi0_ || cur.f >= lo.f) {
                hi = cur;
            } else {
                if (std::abs(cur.dphi) <= -cfg_.wolfe_c2 * dphi0_) return cur.a;
                if (cur.dphi * (hi.a - lo.a) >= 0.0) hi = lo;
                lo = cur;
            }
        }
        // Sufficient decrease alone still makes the step usable.
        if (lo.a > 0.0 && lo.f < f0_ + cfg_.wolfe_c1 * lo.a * dphi0_) {
            eval(lo.a);
            return lo.a;
        }
        return 0.0;
    }

    double interpolate(const LineEval& lo, const LineEval& hi) const {
        // Quadratic model through (lo.f, lo.dphi, hi.f), safeguarded by
        // bisection when the minimizer falls too close to either end.
        double span = hi.a - lo.a;
        double denom = 2.0 * (hi.f - lo.f - lo.dphi * span);
        double a = (denom != 0.0) ? lo.a - lo.dphi * span * span / denom
                                  : lo.a + 0.5 * span;
        double lo_guard = lo.a + 0.1 * span;
        double hi_guard = lo.a + 0.9 * span;
        if (span > 0.0) {
            if (a < lo_guard || a > hi_guard) a = lo.a + 0.5 * span;
        } else {
            if (a > lo_guard || a < hi_guard) a = lo.a + 0.5 * span;
        }
        return a;
    }

    const Objective& obj_;
    std::span<const double> x0_;
    std::span<const double> dir_;
    double f0_, dphi0_;
    const LbfgsConfig& cfg_;
    std::vector<double> x_, g_;
    double f_ = 0.0;
    std::size_t evals_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// L-BFGS stepper
// ---------------------------------------------------------------------------

LbfgsStepper::LbfgsStepper(LbfgsConfig cfg) : cfg_(cfg) {}

void LbfgsStepper::prime(const Objective& objective, const std::vector<double>& x) {
    mem_.x = x;
    mem_.grad.assign(x.size(), 0.0);
    mem_.cost = objective(mem_.x, mem_.grad);
    mem_.primed = true;
}

void LbfgsStepper::set_state(std::vector<double> x, double cost, std::vector<double> grad) {
    mem_.x = std::move(x);
    mem_.cost = cost;
    mem_.grad = std::move(grad);
    mem_.primed = true;
}

void LbfgsStepper::reset_memory() {
    mem_.s_list.clear();
    mem_.y_list.clear();
    mem_.rho_list.clear();
}

double LbfgsStepper::grad_norm() const { return norm2(mem_.grad); }

std::vector<double> LbfgsStepper::direction() const {
    const std::size_t n = mem_.x.size();
    std::vector<double> q = mem_.grad;
    const std::size_t h = mem_.s_list.size();
    std::vector<double> alpha(h, 0.0);
    for (std::size_t i = h; i-- > 0;) {
        alpha[i] = mem_.rho_list[i] * dot(mem_.s_list[i], q);
        for (std::size_t j = 0; j < n; ++j) q[j] -= alpha[i] * mem_.y_list[i][j];
    }
    if (h > 0) {
        const auto& s = mem_.s_list.back();
        const auto& y = mem_.y_list.back();
        double gamma = dot(s, y) / std::max(dot(y, y), 1e-300);
        for (double& v : q) v *= gamma;
    }
    for (std::size_t i = 0; i < h; ++i) {
        double beta = mem_.rho_list[i] * dot(mem_.y_list[i], q);
        for (std::size_t j = 0; j < n; ++j) q[j] += mem_.s_list[i][j] * (alpha[i] - beta);
    }
    for (double& v : q) v = -v;
    return q;
}

bool LbfgsStepper::step(const Objective& objective) {
    if (!mem_.primed) throw std::logic_error("lbfgs step before prime");
    std::vector<double> dir = direction();
    double dphi0 = dot(mem_.grad, dir);
    if (!(dphi0 < 0.0)) {
        // History no longer models a descent metric; fall back to steepest
        // descent with fresh memory.
        reset_memory();
        dir = mem_.grad;
        for (double& v : dir) v = -v;
        dphi0 = dot(mem_.grad, dir);
        if (!(dphi0 < 0.0)) return false;  // gradient is numerically zero
    }

    double a_init = 1.0;
    if (mem_.s_list.empty()) {
        double gn = norm2(mem_.grad);
        a_init = std::min(1.0, 1.0 / std::max(gn, 1e-12));
    }

    LineSearcher searcher(objective, mem_.x, dir, mem_.cost, dphi0, cfg_);
    double a = searcher.search(a_init);
    if (a <= 0.0) return false;

    std::vector<double> s(mem_.x.size()), y(mem_.x.size());
    for (std::size_t i = 0; i < mem_.x.size(); ++i) {
        s[i] = searcher.x()[i] - mem_.x[i];
        y[i] = searcher.g()[i] - mem_.grad[i];
    }
    double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
        mem_.s_list.push_back(std::move(s));
        mem_.y_list.push_back(std::move(y));
        mem_.rho_list.push_back(1.0 / sy);
        while (mem_.s_list.size() > cfg_.memory) {
            mem_.s_list.pop_front();
            mem_.y_list.pop_front();
            mem_.rho_list.pop_front();
        }
    }
    mem_.x = searcher.x();
    mem_.grad = searcher.g();
    mem_.cost = searcher.f();
    mem_.iter += 1;
    return true;
}

LbfgsResult lbfgs_minimize(const Objective& objective, std::vector<double> x0,
                           const LbfgsConfig& cfg, const IterationHook& hook) {
    LbfgsStepper stepper(cfg);
    stepper.prime(objective, x0);

    LbfgsResult result;
    result.best_x = stepper.memory().x;
    result.best_cost = stepper.memory().cost;

    double stall_ref = stepper.memory().cost;
    std::size_t stall_count = 0;

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        double gn = stepper.grad_norm();
        if (hook && !hook(it, stepper.memory().x, stepper.memory().cost, gn)) break;
        if (gn < cfg.grad_tolerance || stepper.memory().cost < cfg.cost_tolerance) {
            result.converged = true;
            break;
        }
        if (!stepper.step(objective)) {
            result.stalled = true;
            break;
        }
        result.iterations += 1;
        if (stepper.memory().cost < result.best_cost) {
            result.best_cost = stepper.memory().cost;
            result.best_x = stepper.memory().x;
        }
        if (stall_ref - stepper.memory().cost < cfg.stall_eps) {
            if (++stall_count >= cfg.stall_window) {
                result.stalled = true;
                break;
            }
        } else {
            stall_count = 0;
            stall_ref = stepper.memory().cost;
        }
    }
    if (!result.stalled && !result.converged) {
        double gn = stepper.grad_norm();
        result.converged = gn < cfg.grad_tolerance ||
                           stepper.memory().cost < cfg.cost_tolerance;
    }
    return result;
}

}  // namespace aqc
