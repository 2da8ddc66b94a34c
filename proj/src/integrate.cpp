#include "acdyn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace acdyn {

namespace {

// Dormand-Prince 5(4) coefficients. The last row of `a` doubles as the
// 5th-order solution weights (FSAL).
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
// Error weights: 5th-order minus embedded 4th-order solution.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kMaxClamp = 1e-7;
constexpr double kMinStepFactor = 0.2;
constexpr double kMaxStepFactor = 5.0;
constexpr double kSafety = 0.9;

using Vec = std::vector<double>;

void check_finite(const Vec& v) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::runtime_error("integrate: non-finite dynamics");
    }
}

double field_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

class Stepper {
public:
    Stepper(const VectorField& f, const IntegrationOptions& opts)
        : f_(f), opts_(opts), n_(f.dim) {
        for (auto* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_}) k->resize(n_);
        tmp_.resize(n_);
    }

    void eval(const Vec& y, Vec& dy) {
        f_.rhs(std::span<const double>(y), std::span<double>(dy));
        check_finite(dy);
    }

    // One Dormand-Prince attempt from (t, y) with step h. On success fills
    // y_out and returns the scaled error norm; k1 must hold f(y) on entry.
    double attempt(const Vec& y, double h, Vec& y_out) {
        auto stage = [&](const Vec& base, auto&&... terms) {
            // tmp_ = y + h * (c1*k1 + ...)
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                ((acc += terms.first * (*terms.second)[i]), ...);
                tmp_[i] = base[i] + h * acc;
            }
        };
        using P = std::pair<double, const Vec*>;
        stage(y, P{a21, &k1_});
        eval(tmp_, k2_);
        stage(y, P{a31, &k1_}, P{a32, &k2_});
        eval(tmp_, k3_);
        stage(y, P{a41, &k1_}, P{a42, &k2_}, P{a43, &k3_});
        eval(tmp_, k4_);
        stage(y, P{a51, &k1_}, P{a52, &k2_}, P{a53, &k3_}, P{a54, &k4_});
        eval(tmp_, k5_);
        stage(y, P{a61, &k1_}, P{a62, &k2_}, P{a63, &k3_}, P{a64, &k4_}, P{a65, &k5_});
        eval(tmp_, k6_);
        stage(y, P{a71, &k1_}, P{a73, &k3_}, P{a74, &k4_}, P{a75, &k5_}, P{a76, &k6_});
        y_out = tmp_;
        eval(y_out, k7_);

        double err = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double ei = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                   e6 * k6_[i] + e7 * k7_[i]);
            const double sc =
                opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y[i]), std::abs(y_out[i]));
            err = std::max(err, std::abs(ei) / sc);
        }
        return err;
    }

    // Classic RK4, fixed step (debug mode). k1 must hold f(y) on entry.
    void rk4(const Vec& y, double h, Vec& y_out) {
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
        eval(tmp_, k2_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
        eval(tmp_, k3_);
        for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * k3_[i];
        eval(tmp_, k4_);
        y_out.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            y_out[i] = y[i] + h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
        }
        eval(y_out, k7_);  // keep the FSAL slot in sync for reuse
    }

    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_;

private:
    const VectorField& f_;
    const IntegrationOptions& opts_;
    std::size_t n_;
};

// Clamp y into the box; throw if any component sits further than kMaxClamp
// outside, which indicates a bug rather than rounding drift.
void clamp_into_box(const VectorField& f, Vec& y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double lo = f.lower[i], hi = f.upper[i];
        if (y[i] < lo) {
            if (lo - y[i] > kMaxClamp)
                throw std::runtime_error("integrate: state left the valid box");
            y[i] = lo;
        } else if (y[i] > hi) {
            if (y[i] - hi > kMaxClamp)
                throw std::runtime_error("integrate: state left the valid box");
            y[i] = hi;
        }
    }
}

}  // namespace

void IntegrationOptions::validate() const {
    if (!(std::isfinite(t_end) && t_end > 0.0))
        throw std::invalid_argument("IntegrationOptions: t_end must be > 0");
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
        throw std::invalid_argument("IntegrationOptions: tolerances must be > 0");
    if (!(equilibrium_eps > 0.0))
        throw std::invalid_argument("IntegrationOptions: equilibrium_eps must be > 0");
    if (sample_interval > t_end)
        throw std::invalid_argument("IntegrationOptions: sample_interval must be <= t_end");
    if (fixed_step < 0.0)
        throw std::invalid_argument("IntegrationOptions: fixed_step must be >= 0");
}

double IntegrationOptions::effective_sample_interval() const {
    return sample_interval > 0.0 ? sample_interval : t_end / 1000.0;
}

VectorField sis_vector_field(const SisParams& p) {
    VectorField f;
    f.dim = 1;
    f.rhs = [p](std::span<const double> y, std::span<double> dy) { dy[0] = sis_rate(p, y[0]); };
    f.lower = {0.0};
    f.upper = {1.0};
    f.infected = [](std::span<const double> y) { return y[0]; };
    return f;
}

VectorField asis_vector_field(const AsisParams& p) {
    VectorField f;
    f.dim = 2;
    f.rhs = [p](std::span<const double> y, std::span<double> dy) {
        const AsisRates r = asis_rates(p, y[0], y[1]);
        dy[0] = r.di_a;
        dy[1] = r.di_r;
    };
    f.lower = {0.0, 0.0};
    f.upper = {p.x_a, 1.0 - p.x_a};
    f.infected = [](std::span<const double> y) { return y[0] + y[1]; };
    return f;
}

VectorField asir_vector_field(const AsirParams& p) {
    VectorField f;
    f.dim = 5;
    f.rhs = [p](std::span<const double> y, std::span<double> dy) {
        const AsirRates r = asir_rates(p, AsirState{y[0], y[1], y[2], y[3], y[4]});
        dy[0] = r.ds_a;
        dy[1] = r.ds_r;
        dy[2] = r.di_a;
        dy[3] = r.di_r;
        dy[4] = r.dr;
    };
    f.lower.assign(5, 0.0);
    f.upper.assign(5, 1.0);
    f.infected = [](std::span<const double> y) { return y[2] + y[3]; };
    return f;
}

Trajectory integrate(const VectorField& field, std::span<const double> s0,
                     const IntegrationOptions& opts) {
    opts.validate();
    if (field.dim == 0 || !field.rhs || field.lower.size() != field.dim ||
        field.upper.size() != field.dim)
        throw std::invalid_argument("integrate: malformed vector field");
    if (s0.size() != field.dim) throw std::invalid_argument("integrate: s0 has wrong dimension");

    Vec y(s0.begin(), s0.end());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || y[i] < field.lower[i] - kStateTol ||
            y[i] > field.upper[i] + kStateTol)
            throw std::invalid_argument("integrate: s0 outside the valid box");
        y[i] = std::clamp(y[i], field.lower[i], field.upper[i]);
    }

    const double dt_sample = opts.effective_sample_interval();
    const std::size_t n_samples = static_cast<std::size_t>(std::ceil(opts.t_end / dt_sample));

    Trajectory traj;
    Stepper st(field, opts);

    st.eval(y, st.k1_);
    traj.times.push_back(0.0);
    traj.states.push_back(y);
    traj.converged = field_norm(st.k1_) < opts.equilibrium_eps;

    double t = 0.0;
    double h = opts.fixed_step > 0.0 ? opts.fixed_step : std::min(dt_sample, 1.0) / 10.0;
    const double h_floor = opts.t_end * 1e-14;

    for (std::size_t k = 1; k <= n_samples && !traj.converged; ++k) {
        const double t_next = std::min(static_cast<double>(k) * dt_sample, opts.t_end);
        while (t < t_next) {
            const bool hits_boundary = t + h >= t_next;
            const double h_try = hits_boundary ? t_next - t : h;
            Vec y_new;
            if (opts.fixed_step > 0.0) {
                st.rk4(y, h_try, y_new);
                ++traj.steps_accepted;
            } else {
                const double err = st.attempt(y, h_try, y_new);
                const double factor =
                    err > 0.0 ? std::clamp(kSafety * std::pow(err, -0.2), kMinStepFactor,
                                           kMaxStepFactor)
                              : kMaxStepFactor;
                if (err > 1.0) {
                    ++traj.steps_rejected;
                    h = h_try * factor;
                    if (h < h_floor) throw std::runtime_error("integrate: step-size underflow");
                    continue;
                }
                ++traj.steps_accepted;
                if (!hits_boundary) h = h_try * factor;
            }
            const Vec before_clamp = y_new;
            clamp_into_box(field, y_new);
            y = std::move(y_new);
            t = hits_boundary ? t_next : t + h_try;
            if (y == before_clamp) {
                st.k7_.swap(st.k1_);  // FSAL: reuse the derivative at y
            } else {
                st.eval(y, st.k1_);
            }
        }
        traj.times.push_back(t);
        traj.states.push_back(y);
        if (field_norm(st.k1_) < opts.equilibrium_eps) traj.converged = true;
    }

    traj.final_state = traj.states.back();
    if (field.infected) {
        auto [pv, pt] = track_peak(traj, field.infected);
        traj.peak_infected = pv;
        traj.peak_time = pt;
    }
    return traj;
}

std::pair<double, double> track_peak(
    const Trajectory& traj, const std::function<double(std::span<const double>)>& projection) {
    if (traj.states.empty()) throw std::invalid_argument("track_peak: empty trajectory");

    std::size_t best = 0;
    double best_v = projection(std::span<const double>(traj.states[0]));
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
        const double v = projection(std::span<const double>(traj.states[k]));
        if (v > best_v) {
            best_v = v;
            best = k;
        }
    }
    if (best == 0 || best + 1 == traj.states.size()) return {best_v, traj.times[best]};

    // Quadratic through the three samples around the discrete argmax.
    const double t0 = traj.times[best - 1], t1 = traj.times[best], t2 = traj.times[best + 1];
    const double v0 = projection(std::span<const double>(traj.states[best - 1]));
    const double v2 = projection(std::span<const double>(traj.states[best + 1]));
    const double d01 = (best_v - v0) / (t1 - t0);
    const double d12 = (v2 - best_v) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);  // half the second derivative
    if (!(curv < 0.0)) return {best_v, t1};
    const double t_star = 0.5 * (t0 + t1 - d01 / curv);
    if (t_star < t0 || t_star > t2) return {best_v, t1};
    const double v_star = v0 + d01 * (t_star - t0) + curv * (t_star - t0) * (t_star - t1);
    return {std::max(v_star, best_v), t_star};
}

}  // namespace acdyn
