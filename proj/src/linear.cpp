#include "kinvar/linear.hpp"
#include "kinvar/errors.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>

namespace kinvar {

namespace {

using Eigen::Index;

Eigen::VectorXd to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v)
{
    return {v.data(), v.data() + v.size()};
}

Eigen::MatrixXd exp_uniformized(const Eigen::MatrixXd& m, double t)
{
    const Index n = m.rows();
    const double alpha = m.diagonal().cwiseAbs().maxCoeff();
    if (alpha == 0.0 || t == 0.0)
        return Eigen::MatrixXd::Identity(n, n);

    int squarings = 0;
    double h = t;
    while (alpha * h > 0.5) {
        h *= 0.5;
        ++squarings;
    }

    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += alpha;
    shifted = shifted.cwiseMax(0.0) * h;  // clear -0 roundoff on the diagonal

    // Taylor series of exp(shifted): all terms nonnegative, so no cancellation.
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd sum = term;
    const int max_terms = static_cast<int>(n) + 30;
    for (int j = 1; j <= max_terms; ++j) {
        term = (shifted * term) / static_cast<double>(j);
        sum += term;
        if (term.maxCoeff() == 0.0)
            break;
    }
    sum *= std::exp(-alpha * h);
    for (int i = 0; i < squarings; ++i)
        sum = (sum * sum).eval();
    return sum;
}

class EigenPropagator {
public:
    explicit EigenPropagator(const Eigen::MatrixXd& m) : m_(m)
    {
        Eigen::EigenSolver<Eigen::MatrixXd> es(m);
        if (es.info() != Eigen::Success) {
            fallback_ = true;
            return;
        }
        values_ = es.eigenvalues();
        vectors_ = es.eigenvectors();
        const double scale = std::max(1.0, m.norm());
        const double residual =
            (m.cast<std::complex<double>>() * vectors_ - vectors_ * values_.asDiagonal()).norm() / scale;
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vectors_);
        const auto sv = svd.singularValues();
        const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                     : std::numeric_limits<double>::infinity();
        fallback_ = residual > 1e-8 || cond > 1e8;
        if (!fallback_)
            lu_ = vectors_.partialPivLu();
    }

    Eigen::VectorXd apply(double t, const Eigen::VectorXd& c0) const
    {
        if (fallback_)
            return (m_ * t).exp() * c0;
        const Eigen::VectorXcd y = lu_.solve(c0.cast<std::complex<double>>());
        const Eigen::VectorXcd ex = (values_ * t).array().exp().matrix();
        return (vectors_ * ex.cwiseProduct(y)).real();
    }

private:
    Eigen::MatrixXd m_;
    Eigen::VectorXcd values_;
    Eigen::MatrixXcd vectors_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    bool fallback_ = false;
};

} // namespace

RateMatrix::RateMatrix(Eigen::MatrixXd m) : m_(std::move(m))
{
    if (m_.rows() != m_.cols())
        throw InputError("rate matrix must be square");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    for (Index j = 0; j < m_.cols(); ++j) {
        for (Index i = 0; i < m_.rows(); ++i)
            if (i != j && m_(i, j) < 0.0)
                throw InputError("rate matrix has a negative off-diagonal entry");
        if (std::abs(m_.col(j).sum()) > 1e-12 * scale)
            throw InputError("rate matrix column " + std::to_string(j) + " does not sum to zero");
    }
}

std::vector<double> Trajectory::row(std::size_t k) const
{
    return to_std(concentrations.row(static_cast<Index>(k)).transpose());
}

RateMatrix build_rate_matrix(const ReactionNetwork& net)
{
    if (!net.all_first_order())
        throw InputError("build_rate_matrix: network is not all-first-order");
    const auto n = static_cast<Index>(net.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (const auto& rx : net.reactions) {
        const auto u = static_cast<Index>(rx.reactants.front().species);
        const auto v = static_cast<Index>(rx.products.front().species);
        m(v, u) += rx.k_forward;
        m(u, v) += rx.k_backward;
    }
    for (Index j = 0; j < n; ++j) {
        double out = 0.0;
        for (Index i = 0; i < n; ++i)
            if (i != j)
                out += m(i, j);
        m(j, j) = -out;
    }
    return RateMatrix(std::move(m));
}

std::vector<std::complex<double>> eigenvalues(const RateMatrix& m)
{
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.matrix(), false);
    const Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
    std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.real() > b.real(); });
    return out;
}

void require_valid_grid(const std::vector<double>& times)
{
    if (times.empty() || times.front() != 0.0)
        throw InputError("time grid must start at t = 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]) || !std::isfinite(times[k]))
            throw InputError("time grid must be strictly increasing");
}

std::vector<double> propagate(const RateMatrix& m, const std::vector<double>& c0, double t, ExpMethod method)
{
    if (c0.size() != m.size())
        throw InputError("dimension mismatch: initial vector vs rate matrix");
    if (method == ExpMethod::Eigen)
        return to_std(EigenPropagator(m.matrix()).apply(t, to_vector(c0)));
    return to_std(exp_uniformized(m.matrix(), t) * to_vector(c0));
}

Trajectory simulate_linear(const RateMatrix& m, const std::vector<double>& c0, const std::vector<double>& times,
                           ExpMethod method)
{
    if (c0.size() != m.size())
        throw InputError("dimension mismatch: initial vector has " + std::to_string(c0.size()) +
                         " entries, rate matrix is " + std::to_string(m.size()) + "x" + std::to_string(m.size()));
    require_valid_grid(times);
    for (double x : c0)
        if (x < 0.0)
            throw InputError("initial concentrations must be nonnegative");

    Trajectory traj;
    traj.times = times;
    traj.concentrations.resize(static_cast<Index>(times.size()), static_cast<Index>(m.size()));
    const Eigen::VectorXd x0 = to_vector(c0);
    traj.concentrations.row(0) = x0.transpose();

    if (method == ExpMethod::Eigen) {
        const EigenPropagator prop(m.matrix());
        for (std::size_t k = 1; k < times.size(); ++k)
            traj.concentrations.row(static_cast<Index>(k)) = prop.apply(times[k], x0).transpose();
    } else {
        for (std::size_t k = 1; k < times.size(); ++k)
            traj.concentrations.row(static_cast<Index>(k)) =
                (exp_uniformized(m.matrix(), times[k]) * x0).transpose();
    }

    const auto first = std::find_if(c0.begin(), c0.end(), [](double x) { return x > 0.0; });
    traj.initial_species = first == c0.end() ? 0 : static_cast<SpeciesIndex>(first - c0.begin());
    return traj;
}

DualExperiment dual_experiment(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b,
                               const std::vector<double>& times, ExpMethod method)
{
    if (a == b)
        throw InputError("dual experiment needs two distinct species");
    if (a >= net.size() || b >= net.size())
        throw InputError("dual experiment species index out of range");
    const RateMatrix m = build_rate_matrix(net);
    std::vector<std::string> names;
    for (const auto& s : net.species)
        names.push_back(s.name);

    DualExperiment dual;
    dual.species_a = a;
    dual.species_b = b;
    dual.from_a = simulate_linear(m, unit_vector(net.size(), a), times, method);
    dual.from_a.initial_species = a;
    dual.from_a.label = "from " + net.species[a].name;
    dual.from_a.species_names = names;
    dual.from_b = simulate_linear(m, unit_vector(net.size(), b), times, method);
    dual.from_b.initial_species = b;
    dual.from_b.label = "from " + net.species[b].name;
    dual.from_b.species_names = names;
    return dual;
}

std::vector<double> equilibrium_composition(const RateMatrix& m)
{
    const auto& a = m.matrix();
    const Index n = a.rows();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(1e-10);
    if (n - lu.rank() > 1)
        throw InputError("multiple equilibria: kernel of the rate matrix has dimension " +
                         std::to_string(n - lu.rank()) + " (disconnected network)");

    // Solve [M; 1^T] x = [0; 1] in the least-squares sense (consistent system).
    Eigen::MatrixXd aug(n + 1, n);
    aug.topRows(n) = a;
    aug.row(n).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs(n) = 1.0;
    Eigen::VectorXd x = aug.colPivHouseholderQr().solve(rhs);
    for (Index i = 0; i < n; ++i)
        if (std::abs(x(i)) < 1e-15)
            x(i) = 0.0;
    return to_std(x);
}

double relaxation_time(const RateMatrix& m)
{
    const auto ev = eigenvalues(m);
    const double scale = std::max(1.0, m.matrix().cwiseAbs().maxCoeff());
    double slowest = std::numeric_limits<double>::infinity();
    for (const auto& l : ev)
        if (std::abs(l) > 1e-10 * scale)
            slowest = std::min(slowest, std::abs(l.real()));
    if (!std::isfinite(slowest) || slowest == 0.0)
        throw InputError("relaxation time undefined: rate matrix has no nonzero eigenvalue");
    return 1.0 / slowest;
}

std::vector<double> make_time_grid(double t_max, std::size_t points, bool geometric, double t_min)
{
    if (points < 2)
        throw InputError("time grid needs at least 2 points");
    if (!(t_max > 0.0))
        throw InputError("time grid needs t_max > 0");
    std::vector<double> t(points, 0.0);
    if (!geometric) {
        for (std::size_t k = 1; k < points; ++k)
            t[k] = t_max * static_cast<double>(k) / static_cast<double>(points - 1);
        t.back() = t_max;
        return t;
    }
    if (!(t_min > 0.0) || !(t_min < t_max))
        throw InputError("geometric grid needs 0 < t_min < t_max");
    if (points == 2) {
        t[1] = t_max;
        return t;
    }
    const double ratio = std::log(t_max / t_min);
    for (std::size_t k = 1; k < points; ++k)
        t[k] = t_min * std::exp(ratio * static_cast<double>(k - 1) / static_cast<double>(points - 2));
    t[1] = t_min;
    t.back() = t_max;
    return t;
}

std::vector<double> default_time_grid(const RateMatrix& m, std::size_t points)
{
    const double tau = relaxation_time(m);
    return make_time_grid(10.0 * tau, points, true, 1e-3 * tau);
}

} // namespace kinvar
