#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "neumann_holes/geometry.hpp"

namespace nh {

using Point = std::vector<double>;
using MultiIndex = std::vector<int>;

// Product of axis cosines on a box (0,s_1) x ... x (0,s_N).
struct BoxCosine {
    std::vector<double> sides;
    std::vector<int> index;
};

// Radially symmetric Neumann mode of a disk of radius R (angular order 0).
struct DiskRadial {
    double radius = 2.0;
    int root_index = 1; // k-th positive root of J0'
};

struct AnalyticEigenfunction {
    std::variant<BoxCosine, DiskRadial> kind;
    double lambda = 0.0;     // eigenvalue of -Delta phi + phi = lambda phi
    double norm_const = 1.0; // L2 normalization
    bool simple = true;

    int dim() const;
    double value(const Point& x) const;
    // partial derivative D^beta (|beta| <= 6)
    double derivative(const Point& x, const MultiIndex& beta) const;
    std::vector<double> gradient(const Point& x) const;
};

AnalyticEigenfunction make_box_mode(const std::vector<double>& sides,
                                    const std::vector<int>& index);
AnalyticEigenfunction make_disk_mode(double radius, int root_index);

struct SpectrumEntry {
    double lambda;
    std::vector<int> index;
    bool simple;
};

// Sorted lowest eigenvalues; surd-exact degeneracy detection when the sides
// are (1, 2^{1/4}) or (1, 2^{1/4}, 3^{1/4}).
std::vector<SpectrumEntry> box_spectrum(const std::vector<double>& sides, int count);
// Radial (n = 0) modes of the disk: lambda = (alpha_{0k}/R)^2 + 1.
std::vector<SpectrumEntry> disk_spectrum(double radius, int count);

// Homogeneous Taylor table: coefficients D^beta u(x0) / beta! for |beta| = degree.
struct TaylorPolynomial {
    Point x0;
    int degree = 0;
    std::vector<std::pair<MultiIndex, double>> terms;

    double evaluate(const Point& dx) const;       // sum c_beta dx^beta
    double laplacian_coeff_max() const;           // max |coeff| of Delta P
    double laplacian_constant() const;            // Delta P when degree == 2 (a constant)
    double max_abs_coeff() const;
};

// Smallest k >= 1 with a nonvanishing degree-k derivative of phi - phi(x0),
// plus the degree-k Taylor table. Throws OrderTooHighError past k_max.
std::pair<int, TaylorPolynomial> vanishing_order(const AnalyticEigenfunction& phi,
                                                 const Point& x0, int k_max = 6,
                                                 double tol = 1e-9);

// Integral of P^2 over the unit sphere in R^3 (tensor Gauss, exact for
// polynomial integrands of the degrees used here).
double sphere_surface_integral_sq(const TaylorPolynomial& p);

// Leading term of lambda_eps - lambda: coeff * eps^exponent * (|log eps| when flagged).
struct ShiftPrediction {
    double exponent = 0.0;
    bool log_correction = false;
    double coeff = 0.0;
    double torsion_term = 0.0; // split of coeff
    double volume_term = 0.0;
    // 2D critical-non-nodal case: the eps^4 |log eps| torsion diagnostic
    bool has_log_diagnostic = false;
    double log_diagnostic_coeff = 0.0;

    double predict(double eps) const;
};

// Ball hole of radius eps centered at x0, N = 2 closed forms.
ShiftPrediction predict_shift_2d(const AnalyticEigenfunction& phi, const Point& x0);

// N >= 3, ball hole; regular point (x0 outside the singular set).
ShiftPrediction predict_shift_nd_regular(int N, double lambda, double grad_norm_sq,
                                         double value);
// N >= 3, ball hole; singular point with vanishing order k >= 2 and
// Y = P|_{unit sphere}, y_norm_sq = int_{S} Y^2.
ShiftPrediction predict_shift_nd_singular(int N, double lambda, int k, double y_norm_sq);

// Two-term prediction from independently computed quantities.
ShiftPrediction predict_shift_general(double torsion_value, double volume_term);

// h(x) = N/(N-1) |grad phi|^2 - (lambda - 1) phi^2
double gamma_indicator(const AnalyticEigenfunction& phi, const Point& x);

// int over the ball hole x0 + eps B of (|grad phi|^2 - (lambda-1) phi^2),
// adaptive product quadrature to relative tolerance rtol.
double hole_energy_integral(const AnalyticEigenfunction& phi, const Point& x0,
                            double eps, double rtol = 1e-8);

double unit_ball_volume(int N);

} // namespace nh
