#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "neumann_holes/analytic.hpp"
#include "neumann_holes/contour.hpp"
#include "neumann_holes/eigensolve.hpp"
#include "neumann_holes/geometry.hpp"
#include "neumann_holes/torsion.hpp"

namespace nh {

enum class FitModel { Power, PowerLog };
enum class SignClass { OmegaPlus, OmegaMinus, IndeterminateNearGamma };

struct ExperimentConfig {
    DomainSpec domain; // outer shape; hole filled in per sweep point
    HoleShape hole_shape = CircleHole{};
    Vec2 hole_center;
    std::vector<double> eps_list; // strictly decreasing, >= 4 entries
    int target_n = 1;             // index in the sorted unperturbed spectrum
    double h0 = 0.04;
    int levels = 3;
    int order = 1;
    double eig_tol = 1e-9;
    FitModel fit_model = FitModel::Power;
    std::string output_dir = "out";
    std::uint64_t seed = 0x5EED;
    bool fem_reference = false; // lambda_n from an unperforated mesh family

    void validate() const;
};

ExperimentConfig parse_config_toml(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct SweepRow {
    double eps = 0.0;
    double lambda_eps = 0.0;   // Richardson-extrapolated
    double delta_lambda = 0.0; // lambda_eps - lambda_reference
    double error_bar = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    double lambda_reference = 0.0;
    int target_n = 0;
    std::vector<int> mode_index; // analytic identification of the target mode
};

SweepTable run_sweep(const ExperimentConfig& config);

// Richardson-extrapolated lambda_n on a nested family over `dom` (which may
// or may not carry a hole), with its error bar. Uses config mesh/eig fields.
std::pair<double, double> extrapolated_eigenvalue(const DomainSpec& dom,
                                                  const ExperimentConfig& config);

struct FitResult {
    double p_hat = 0.0;
    double c_hat = 0.0;
    double r_squared = 0.0;
    FitModel model = FitModel::Power;
    std::vector<int> used_rows;
    std::vector<double> residuals; // log-ordinate residuals per used row
};

// Least squares of log|delta| (Power) or log(|delta|/|log eps|) (PowerLog)
// against log eps; rows with |delta| < 100 * error_bar are discarded.
// Throws UnfittableError with fewer than 4 usable rows.
FitResult fit_leading_order(const SweepTable& table, FitModel model);

// Sign of the eigenvalue shift from the Gamma indicator with a margin rule:
// |h(x0)| < margin * max|h| over the domain reads as indeterminate.
SignClass classify_sign(const AnalyticEigenfunction& phi, const Point& x0,
                        double margin = 1e-3);

void write_sweep_csv(std::ostream& os, const SweepTable& table);
void write_sweep_json(std::ostream& os, const SweepTable& table, const FitResult* fit);

// Disk Gamma figure data (interface + nodal circles of a radial mode).
struct DiskGammaFigure {
    double radius = 2.0;
    int root_index = 1;
    std::vector<double> gamma_radii; // roots of the radial indicator
    std::vector<double> nodal_radii;
    std::vector<Polyline> gamma_contours; // from marching squares
    std::vector<Polyline> nodal_circles;
};

DiskGammaFigure compute_disk_gamma(double radius, int root_index, int grid_n = 401);
void write_disk_gamma_svg(std::ostream& os, const DiskGammaFigure& fig);
void write_disk_gamma_csv(std::ostream& os, const DiskGammaFigure& fig);

// --- property suite ---------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;
    long count = 0;
};

struct SuiteReport {
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks; // sorted by name
    bool all_pass = false;
};

SuiteReport verify_all(std::uint64_t seed);
void write_suite_json(std::ostream& os, const SuiteReport& report);

// Individual checks with injectable knobs, so the suite itself is testable:
// flipping the load sign must break the torsion identities, and a wrong
// gradient prefactor must break the expansion-coefficient consistency.
// `sobolev` selects the energy form: K+M for the Sobolev torsion solves,
// K alone for the zero-average gradient problem.
bool torsion_identities_hold(const TorsionSolution& sol, const SparseSym& K,
                             const SparseSym& M, double tol = 1e-10, bool sobolev = true);
CheckResult check_torsion_identities(std::uint64_t seed, double load_sign = 1.0);
CheckResult check_shift_split_consistency(double gradient_prefactor = 2.0);

} // namespace nh
