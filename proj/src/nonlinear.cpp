#include "kinvar/nonlinear.hpp"
#include "kinvar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kinvar {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// fifth minus fourth order weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

// PI controller constants.
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxGrowth = 10.0;
constexpr double kMaxShrink = 5.0;

void validate(const IntegratorConfig& cfg)
{
    if (!(cfg.rel_tol >= 1e-14))
        throw InputError("integrator rel_tol must be >= 1e-14");
    if (!(cfg.abs_tol >= 1e-16))
        throw InputError("integrator abs_tol must be >= 1e-16");
    if (!(cfg.max_step > 0.0))
        throw InputError("integrator max_step must be positive");
}

class Stepper {
public:
    Stepper(const OdeRhs& rhs, std::size_t n, IntegratorStats& stats)
        : rhs_(rhs), n_(n), stats_(stats), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n),
          cont(5, std::vector<double>(n))
    {
    }

    void eval(double t, const std::vector<double>& y, std::vector<double>& out)
    {
        rhs_(t, y, out);
        ++stats_.rhs_evaluations;
    }

    // Attempts a step of size h from (t, y); k1 must hold f(t, y).
    // Fills ynew, k7 = f(t + h, ynew) and returns the scaled error norm.
    double attempt(double t, const std::vector<double>& y, double h, const IntegratorConfig& cfg)
    {
        for (std::size_t i = 0; i < n_; ++i)
            tmp[i] = y[i] + h * a21 * k1[i];
        eval(t + c2 * h, tmp, k2);
        for (std::size_t i = 0; i < n_; ++i)
            tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(t + c3 * h, tmp, k3);
        for (std::size_t i = 0; i < n_; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(t + c4 * h, tmp, k4);
        for (std::size_t i = 0; i < n_; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(t + c5 * h, tmp, k5);
        for (std::size_t i = 0; i < n_; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        eval(t + h, tmp, k6);
        for (std::size_t i = 0; i < n_; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        eval(t + h, ynew, k7);

        double err = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const double e =
                h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]) / sk;
            err += e * e;
        }
        return std::sqrt(err / static_cast<double>(n_));
    }

    // Continuous extension coefficients for the step just accepted.
    void prepare_dense(const std::vector<double>& y, double h)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            cont[0][i] = y[i];
            cont[1][i] = ydiff;
            cont[2][i] = bspl;
            cont[3][i] = ydiff - h * k7[i] - bspl;
            cont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
    }

    double dense(std::size_t i, double theta) const
    {
        const double theta1 = 1.0 - theta;
        return cont[0][i] +
               theta * (cont[1][i] + theta1 * (cont[2][i] + theta * (cont[3][i] + theta1 * cont[4][i])));
    }

private:
    const OdeRhs& rhs_;
    std::size_t n_;
    IntegratorStats& stats_;

public:
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp, ynew;
    std::vector<std::vector<double>> cont;
};

double initial_step(Stepper& st, const std::vector<double>& y, double t_end, const IntegratorConfig& cfg)
{
    // Hairer-Wanner starting step: explicit Euler probe plus second-derivative estimate.
    const std::size_t n = y.size();
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
        dnf += (st.k1[i] / sk) * (st.k1[i] / sk);
        dny += (y[i] / sk) * (y[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min({h, cfg.max_step, t_end});
    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i)
        y1[i] = y[i] + h * st.k1[i];
    st.eval(h, y1, f1);
    double der2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y[i]);
        const double d = (f1[i] - st.k1[i]) / sk;
        der2 += d * d;
    }
    der2 = std::sqrt(der2 / static_cast<double>(n)) / h;
    const double der12 = std::max(der2, std::sqrt(dnf / static_cast<double>(n)));
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    return std::min({100.0 * h, h1, cfg.max_step, t_end});
}

} // namespace

Eigen::MatrixXd integrate_ode(const OdeRhs& rhs, const std::vector<double>& y0, const std::vector<double>& times,
                              const IntegratorConfig& cfg, bool check_nonnegative, IntegratorStats* stats)
{
    validate(cfg);
    require_valid_grid(times);
    const std::size_t n = y0.size();
    IntegratorStats local;
    IntegratorStats& st_stats = stats ? *stats : local;

    Eigen::MatrixXd out(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        out(0, static_cast<Eigen::Index>(i)) = y0[i];
    if (times.size() == 1 || n == 0)
        return out;

    const double t_end = times.back();
    Stepper st(rhs, n, st_stats);
    std::vector<double> y = y0;
    double t = 0.0;
    st.eval(t, y, st.k1);
    double h = initial_step(st, y, t_end, cfg);
    double facold = 1e-4;
    bool last_rejected = false;
    std::size_t next = 1;

    while (next < times.size()) {
        if (st_stats.accepted + st_stats.rejected >= cfg.max_steps)
            throw NumericalError("integrator exceeded " + std::to_string(cfg.max_steps) + " steps at t = " +
                                 std::to_string(t));
        const double stop = cfg.dense_output ? t_end : times[next];
        bool hits_stop = false;
        if (t + h >= stop || t + 1.01 * h >= stop) {
            h = stop - t;
            hits_stop = true;
        }
        if (h < 10.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1e-300)) {
            std::ostringstream msg;
            msg << "step size underflow at t = " << t;
            throw NumericalError(msg.str());
        }

        const double err = st.attempt(t, y, h, cfg);
        const double fac11 = std::pow(err, kExpo);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(facold, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kMaxGrowth, kMaxShrink);
            double hnew = std::min(h / fac, cfg.max_step);
            if (last_rejected)
                hnew = std::min(hnew, h);
            facold = std::max(err, 1e-4);
            ++st_stats.accepted;

            const double t_new = hits_stop ? stop : t + h;
            if (check_nonnegative) {
                for (std::size_t i = 0; i < n; ++i)
                    if (st.ynew[i] < -10.0 * cfg.abs_tol) {
                        std::ostringstream msg;
                        msg << "negative concentration " << st.ynew[i] << " in component " << i << " at t = " << t_new;
                        throw NumericalError(msg.str());
                    }
            }
            st.prepare_dense(y, h);
            while (next < times.size() && times[next] <= t_new) {
                const auto row = static_cast<Eigen::Index>(next);
                if (times[next] == t_new) {
                    for (std::size_t i = 0; i < n; ++i)
                        out(row, static_cast<Eigen::Index>(i)) = st.ynew[i];
                } else {
                    const double theta = (times[next] - t) / h;
                    for (std::size_t i = 0; i < n; ++i)
                        out(row, static_cast<Eigen::Index>(i)) = st.dense(i, theta);
                }
                ++next;
            }
            t = t_new;
            y = st.ynew;
            st.k1 = st.k7;
            h = hnew;
            last_rejected = false;
        } else {
            h = h / std::min(kMaxShrink, fac11 / kSafety);
            ++st_stats.rejected;
            last_rejected = true;
        }
    }
    return out;
}

Trajectory integrate(const ReactionNetwork& net, const std::vector<double>& c0, const std::vector<double>& times,
                     const IntegratorConfig& cfg, IntegratorStats* stats)
{
    if (c0.size() != net.size())
        throw InputError("dimension mismatch: initial vector has " + std::to_string(c0.size()) +
                         " entries, network has " + std::to_string(net.size()) + " species");
    for (double x : c0)
        if (x < 0.0)
            throw InputError("initial concentrations must be nonnegative");

    const OdeRhs rhs = [&net](double, const std::vector<double>& y, std::vector<double>& dydt) {
        dydt = mass_action_rhs(net, y);
    };
    Trajectory traj;
    traj.times = times;
    traj.concentrations = integrate_ode(rhs, c0, times, cfg, true, stats);
    const auto first = std::find_if(c0.begin(), c0.end(), [](double x) { return x > 0.0; });
    traj.initial_species = first == c0.end() ? 0 : static_cast<SpeciesIndex>(first - c0.begin());
    for (const auto& s : net.species)
        traj.species_names.push_back(s.name);
    return traj;
}

std::pair<double, double> matched_initial_amounts(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b)
{
    const auto w = conservation_vector(net);
    return {1.0, w.at(a) / w.at(b)};
}

DualExperiment dual_experiment_nonlinear(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b, double a0,
                                         double b0, const std::vector<double>& times, const IntegratorConfig& cfg)
{
    if (a == b)
        throw InputError("dual experiment needs two distinct species");
    if (a >= net.size() || b >= net.size())
        throw InputError("dual experiment species index out of range");
    const auto w = conservation_vector(net);
    const double total_a = w[a] * a0, total_b = w[b] * b0;
    if (std::abs(total_a - total_b) > 1e-12) {
        std::ostringstream msg;
        msg << "invalid pairing: conservation totals differ (" << total_a << " vs " << total_b << ")";
        throw InputError(msg.str());
    }
    std::vector<double> ca(net.size(), 0.0), cb(net.size(), 0.0);
    ca[a] = a0;
    cb[b] = b0;

    DualExperiment dual;
    dual.species_a = a;
    dual.species_b = b;
    dual.conservation_total = total_a;
    dual.from_a = integrate(net, ca, times, cfg);
    dual.from_a.initial_species = a;
    dual.from_a.label = "from " + net.species[a].name;
    dual.from_b = integrate(net, cb, times, cfg);
    dual.from_b.initial_species = b;
    dual.from_b.label = "from " + net.species[b].name;
    return dual;
}

} // namespace kinvar
