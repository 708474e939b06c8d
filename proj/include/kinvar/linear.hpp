#pragma once

#include "kinvar/network.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace kinvar {

/// First-order generator: dC/dt = M C, M(i,j) = total rate of j -> i for i != j,
/// columns summing to zero.
class RateMatrix {
public:
    RateMatrix() = default;
    /// Checks off-diagonal nonnegativity and zero column sums.
    explicit RateMatrix(Eigen::MatrixXd m);

    std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(std::size_t i, std::size_t j) const
    {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

private:
    Eigen::MatrixXd m_;
};

struct Trajectory {
    std::vector<double> times;
    Eigen::MatrixXd concentrations;  ///< rows: grid points, columns: species
    SpeciesIndex initial_species = 0;
    std::string label;
    std::vector<std::string> species_names;

    std::size_t points() const { return times.size(); }
    double at(std::size_t k, SpeciesIndex i) const
    {
        return concentrations(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
    }
    std::vector<double> row(std::size_t k) const;
};

/// The pair of runs primed with pure `species_a` and pure `species_b`.
struct DualExperiment {
    Trajectory from_a;
    Trajectory from_b;
    SpeciesIndex species_a = 0;
    SpeciesIndex species_b = 0;
    /// Shared value of w . C for the conservation vector w.
    double conservation_total = 1.0;
};

enum class ExpMethod {
    /// Scaling and squaring of exp(M h) = e^{-a h} exp((M + a I) h) with a
    /// nonnegative Taylor kernel. Every intermediate is a nonnegative matrix, so
    /// small entries keep full relative precision.
    Uniformized,
    /// Eigendecomposition; falls back to Pade scaling and squaring when the
    /// residual |MV - V diag(l)| exceeds 1e-8 or V is ill-conditioned.
    Eigen,
};

RateMatrix build_rate_matrix(const ReactionNetwork& net);

std::vector<std::complex<double>> eigenvalues(const RateMatrix& m);

/// exp(M t) c0 for one time.
std::vector<double> propagate(const RateMatrix& m, const std::vector<double>& c0, double t,
                              ExpMethod method = ExpMethod::Uniformized);

/// Rows exp(M t_k) c0 over a grid starting at 0.
Trajectory simulate_linear(const RateMatrix& m, const std::vector<double>& c0, const std::vector<double>& times,
                           ExpMethod method = ExpMethod::Uniformized);

DualExperiment dual_experiment(const ReactionNetwork& net, SpeciesIndex a, SpeciesIndex b,
                               const std::vector<double>& times, ExpMethod method = ExpMethod::Uniformized);

/// Normalised kernel vector of M. Throws InputError when the kernel is not
/// one-dimensional (several equilibria).
std::vector<double> equilibrium_composition(const RateMatrix& m);

/// 1 / |smallest nonzero eigenvalue|.
double relaxation_time(const RateMatrix& m);

/// 0 followed by points-1 geometric points from 1e-3 tau to 10 tau.
std::vector<double> default_time_grid(const RateMatrix& m, std::size_t points = 400);

/// 0 followed by points-1 points in [t_min, t_max] (geometric or linear).
/// For linear spacing t_min is ignored and the grid is uniform on [0, t_max].
std::vector<double> make_time_grid(double t_max, std::size_t points, bool geometric, double t_min = 1e-3);

/// Throws InputError unless times[0] == 0 and the grid is strictly increasing.
void require_valid_grid(const std::vector<double>& times);

} // namespace kinvar
