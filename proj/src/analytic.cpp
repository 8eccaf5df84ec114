#include "neumann_holes/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "neumann_holes/bessel.hpp"

namespace nh {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kJetOrder = 6;

// ---------------------------------------------------------------------------
// Bivariate Taylor jets up to total degree 6: a[i][j] is the coefficient of
// dx^i dy^j, i.e. D^(i,j) f / (i! j!).

struct Jet2 {
    double a[kJetOrder + 1][kJetOrder + 1] = {};

    static Jet2 constant(double c) {
        Jet2 j;
        j.a[0][0] = c;
        return j;
    }

    Jet2 operator+(const Jet2& o) const {
        Jet2 r;
        for (int i = 0; i <= kJetOrder; ++i)
            for (int j = 0; i + j <= kJetOrder; ++j) r.a[i][j] = a[i][j] + o.a[i][j];
        return r;
    }

    Jet2 operator*(const Jet2& o) const {
        Jet2 r;
        for (int i1 = 0; i1 <= kJetOrder; ++i1)
            for (int j1 = 0; i1 + j1 <= kJetOrder; ++j1) {
                if (a[i1][j1] == 0.0) continue;
                for (int i2 = 0; i1 + j1 + i2 <= kJetOrder; ++i2)
                    for (int j2 = 0; i1 + j1 + i2 + j2 <= kJetOrder; ++j2)
                        r.a[i1 + i2][j1 + j2] += a[i1][j1] * o.a[i2][j2];
            }
        return r;
    }

    Jet2 scaled(double c) const {
        Jet2 r;
        for (int i = 0; i <= kJetOrder; ++i)
            for (int j = 0; i + j <= kJetOrder; ++j) r.a[i][j] = a[i][j] * c;
        return r;
    }
};

// Compose a univariate Taylor series (coeffs f[m] = F^(m)(u0)/m!) with a jet
// u whose constant part equals u0: result = sum_m f[m] (u - u0)^m.
Jet2 compose_series(const std::vector<double>& f, Jet2 u) {
    u.a[0][0] = 0.0; // (u - u0)
    Jet2 r = Jet2::constant(f.empty() ? 0.0 : f[0]);
    Jet2 p = Jet2::constant(1.0);
    for (size_t m = 1; m < f.size() && m <= kJetOrder; ++m) {
        p = p * u;
        r = r + p.scaled(f[m]);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Disk radial modes: phi(x, y) = c * G(x^2 + y^2), with
// G(s) = J0(alpha sqrt(s) / R) = sum_j g_j s^j, entire in s.

std::vector<long double> disk_series_coeffs(double alpha, double R, int nterms) {
    std::vector<long double> g(nterms);
    const long double q = (long double)(alpha) / (2.0L * R);
    long double c = 1.0L;
    g[0] = 1.0L;
    for (int j = 1; j < nterms; ++j) {
        c *= -(q * q) / ((long double)j * j);
        g[j] = c;
    }
    return g;
}

// Taylor coefficients of G at s0: b_m = sum_{j>=m} g_j C(j, m) s0^{j-m}
std::vector<double> shift_series(const std::vector<long double>& g, double s0, int order) {
    std::vector<double> b(order + 1, 0.0);
    const int J = (int)g.size();
    for (int m = 0; m <= order; ++m) {
        long double sum = 0.0L;
        long double binom = 1.0L; // C(m, m)
        long double pw = 1.0L;    // s0^(j-m)
        for (int j = m; j < J; ++j) {
            sum += g[j] * binom * pw;
            binom = binom * (j + 1) / (long double)(j + 1 - m);
            pw *= s0;
        }
        b[m] = (double)sum;
    }
    return b;
}

Jet2 disk_jet(const DiskRadial& d, double norm_const, double x0, double y0) {
    const double alpha = bessel::j0_prime_zero(d.root_index);
    auto g = disk_series_coeffs(alpha, d.radius, 48);
    const double s0 = x0 * x0 + y0 * y0;
    auto b = shift_series(g, s0, kJetOrder);
    Jet2 s; // x^2 + y^2 around (x0, y0)
    s.a[0][0] = s0;
    s.a[1][0] = 2.0 * x0;
    s.a[0][1] = 2.0 * y0;
    s.a[2][0] = 1.0;
    s.a[0][2] = 1.0;
    return compose_series(b, s).scaled(norm_const);
}

// ---------------------------------------------------------------------------

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// cos(w x + m pi/2) = m-th derivative phase shift
double cos_derivative(double w, double x, int m) {
    return std::pow(w, m) * std::cos(w * x + 0.5 * kPi * m);
}

bool has_independent_surd_sides(const std::vector<double>& sides) {
    const double surd[3] = {1.0, std::pow(2.0, 0.25), std::pow(3.0, 0.25)};
    if (sides.size() > 3) return false;
    for (size_t i = 0; i < sides.size(); ++i)
        if (std::abs(sides[i] - surd[i]) > 1e-14) return false;
    return true;
}

// With the surd sides (1, 2^{1/4}, 3^{1/4}) the coefficients {1, 1/sqrt2, 1/sqrt3} are
// rationally independent, so distinct index tuples give distinct eigenvalues.
bool box_mode_is_simple(const std::vector<double>& sides, const std::vector<int>& index) {
    if (has_independent_surd_sides(sides)) return true;
    const int N = (int)sides.size();
    double lambda = 1.0;
    for (int i = 0; i < N; ++i)
        lambda += kPi * kPi * index[i] * index[i] / (sides[i] * sides[i]);
    std::vector<int> bound(N);
    for (int i = 0; i < N; ++i)
        bound[i] = (int)std::ceil(sides[i] * std::sqrt(std::max(lambda - 1.0, 0.0)) / kPi) + 1;
    std::vector<int> m(N, 0);
    std::function<bool(int)> rec = [&](int d) -> bool {
        if (d == N) {
            if (m == index) return false;
            double lam = 1.0;
            for (int i = 0; i < N; ++i)
                lam += kPi * kPi * m[i] * m[i] / (sides[i] * sides[i]);
            return std::abs(lam - lambda) <= 1e-12 * std::max(1.0, lambda);
        }
        for (m[d] = 0; m[d] <= bound[d]; ++m[d])
            if (rec(d + 1)) return true;
        return false;
    };
    return !rec(0);
}

} // namespace

int AnalyticEigenfunction::dim() const {
    if (std::holds_alternative<BoxCosine>(kind))
        return (int)std::get<BoxCosine>(kind).sides.size();
    return 2;
}

double AnalyticEigenfunction::value(const Point& x) const {
    return derivative(x, MultiIndex(dim(), 0));
}

double AnalyticEigenfunction::derivative(const Point& x, const MultiIndex& beta) const {
    const int N = dim();
    if ((int)x.size() != N || (int)beta.size() != N)
        throw Error("derivative: dimension mismatch");
    int total = 0;
    for (int b : beta) {
        if (b < 0) throw Error("derivative: negative order");
        total += b;
    }
    if (total > kJetOrder) throw Error("derivative: order above 6 not supported");

    if (std::holds_alternative<BoxCosine>(kind)) {
        const auto& box = std::get<BoxCosine>(kind);
        double v = norm_const;
        for (int i = 0; i < N; ++i) {
            double w = kPi * box.index[i] / box.sides[i];
            if (box.index[i] == 0)
                v *= (beta[i] == 0) ? 1.0 : 0.0;
            else
                v *= cos_derivative(w, x[i], beta[i]);
        }
        return v;
    }
    const auto& d = std::get<DiskRadial>(kind);
    Jet2 j = disk_jet(d, norm_const, x[0], x[1]);
    return j.a[beta[0]][beta[1]] * factorial(beta[0]) * factorial(beta[1]);
}

std::vector<double> AnalyticEigenfunction::gradient(const Point& x) const {
    const int N = dim();
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) {
        MultiIndex beta(N, 0);
        beta[i] = 1;
        g[i] = derivative(x, beta);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Mode construction

AnalyticEigenfunction make_box_mode(const std::vector<double>& sides,
                                    const std::vector<int>& index) {
    if (sides.size() != index.size() || sides.empty())
        throw Error("make_box_mode: sides and index must have equal positive length");
    for (double s : sides)
        if (!(s > 0.0)) throw Error("make_box_mode: sides must be positive");
    AnalyticEigenfunction f;
    double lambda = 1.0, norm_sq = 1.0;
    for (size_t i = 0; i < sides.size(); ++i) {
        lambda += kPi * kPi * index[i] * index[i] / (sides[i] * sides[i]);
        norm_sq *= (index[i] == 0) ? sides[i] : 0.5 * sides[i];
    }
    f.kind = BoxCosine{sides, index};
    f.lambda = lambda;
    f.norm_const = 1.0 / std::sqrt(norm_sq);
    f.simple = box_mode_is_simple(sides, index);
    return f;
}

AnalyticEigenfunction make_disk_mode(double radius, int root_index) {
    if (!(radius > 0.0)) throw Error("make_disk_mode: radius must be positive");
    if (root_index < 1) throw Error("make_disk_mode: root index must be >= 1");
    AnalyticEigenfunction f;
    double alpha = bessel::j0_prime_zero(root_index);
    f.kind = DiskRadial{radius, root_index};
    f.lambda = (alpha / radius) * (alpha / radius) + 1.0;
    f.norm_const = 1.0 / (radius * std::sqrt(kPi) * std::abs(bessel::j0(alpha)));
    f.simple = true;
    return f;
}

// ---------------------------------------------------------------------------
// Spectra

std::vector<SpectrumEntry> box_spectrum(const std::vector<double>& sides, int count) {
    const int N = (int)sides.size();
    if (N < 1 || N > 3) throw Error("box_spectrum: 1 to 3 sides supported");
    if (count < 1) throw Error("box_spectrum: count must be positive");
    const bool surd = has_independent_surd_sides(sides);

    // enumerate enough candidates to cover `count` lowest
    int bound = 2;
    std::vector<SpectrumEntry> out;
    while (true) {
        std::vector<std::pair<double, std::vector<int>>> cand;
        std::vector<int> idx(N, 0);
        std::function<void(int)> rec = [&](int d) {
            if (d == N) {
                double lam = 1.0;
                for (int i = 0; i < N; ++i)
                    lam += kPi * kPi * idx[i] * idx[i] / (sides[i] * sides[i]);
                cand.push_back({lam, idx});
                return;
            }
            for (idx[d] = 0; idx[d] <= bound; ++idx[d]) rec(d + 1);
        };
        rec(0);
        std::sort(cand.begin(), cand.end(),
                  [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first < b.first;
                      return a.second < b.second;
                  });
        // interior candidates only: the largest retained index must be < bound
        // in every coordinate to guarantee nothing lower was missed
        double complete_up_to = 1.0 + kPi * kPi * bound * bound /
            *std::max_element(sides.begin(), sides.end()) /
            *std::max_element(sides.begin(), sides.end());
        int usable = 0;
        for (const auto& c : cand) {
            if (c.first >= complete_up_to) break;
            ++usable;
        }
        if (usable >= count) {
            out.clear();
            for (int i = 0; i < usable && (int)out.size() < count; ++i) {
                SpectrumEntry e{cand[i].first, cand[i].second, true};
                if (surd) {
                    // rationally independent surd coefficients: all simple
                    e.simple = true;
                } else {
                    for (int j = 0; j < usable; ++j) {
                        if (j == i) continue;
                        if (std::abs(cand[i].first - cand[j].first) <=
                            1e-12 * std::max(1.0, std::abs(cand[i].first))) {
                            e.simple = false;
                            break;
                        }
                    }
                }
                out.push_back(std::move(e));
            }
            return out;
        }
        bound *= 2;
        if (bound > 256) throw Error("box_spectrum: enumeration bound exceeded");
    }
}

std::vector<SpectrumEntry> disk_spectrum(double radius, int count) {
    if (count < 1) throw Error("disk_spectrum: count must be >= 1");
    std::vector<SpectrumEntry> out;
    for (int k = 1; k <= count; ++k) {
        double alpha = bessel::j0_prime_zero(k);
        out.push_back({(alpha / radius) * (alpha / radius) + 1.0, {0, k}, true});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Taylor tables and vanishing order

double TaylorPolynomial::evaluate(const Point& dx) const {
    double s = 0.0;
    for (const auto& [beta, c] : terms) {
        double m = c;
        for (size_t i = 0; i < beta.size(); ++i) m *= std::pow(dx[i], beta[i]);
        s += m;
    }
    return s;
}

double TaylorPolynomial::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [beta, c] : terms) m = std::max(m, std::abs(c));
    return m;
}

namespace {

// coefficients of Delta P as a map multiindex -> coeff
std::map<MultiIndex, double> laplacian_terms(const TaylorPolynomial& p) {
    std::map<MultiIndex, double> out;
    for (const auto& [beta, c] : p.terms) {
        for (size_t i = 0; i < beta.size(); ++i) {
            if (beta[i] < 2) continue;
            MultiIndex g = beta;
            g[i] -= 2;
            out[g] += c * beta[i] * (beta[i] - 1);
        }
    }
    return out;
}

} // namespace

double TaylorPolynomial::laplacian_coeff_max() const {
    double m = 0.0;
    for (const auto& [g, c] : laplacian_terms(*this)) m = std::max(m, std::abs(c));
    return m;
}

double TaylorPolynomial::laplacian_constant() const {
    if (degree != 2) throw Error("laplacian_constant: defined for degree 2 tables");
    double s = 0.0;
    for (const auto& [g, c] : laplacian_terms(*this)) s += c;
    return s;
}

namespace {

void enumerate_multiindices(int dim, int total, MultiIndex& cur, int pos,
                            std::vector<MultiIndex>& out) {
    if (pos == dim - 1) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (int v = 0; v <= total; ++v) {
        cur[pos] = v;
        enumerate_multiindices(dim, total - v, cur, pos + 1, out);
    }
}

std::vector<MultiIndex> multiindices(int dim, int total) {
    std::vector<MultiIndex> out;
    MultiIndex cur(dim, 0);
    enumerate_multiindices(dim, total, cur, 0, out);
    return out;
}

} // namespace

std::pair<int, TaylorPolynomial> vanishing_order(const AnalyticEigenfunction& phi,
                                                 const Point& x0, int k_max, double tol) {
    const int N = phi.dim();
    if ((int)x0.size() != N) throw Error("vanishing_order: dimension mismatch");
    // derivative tables per order
    std::vector<std::vector<std::pair<MultiIndex, double>>> per_order(k_max + 1);
    double scale = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        for (const auto& beta : multiindices(N, k)) {
            double d = phi.derivative(x0, beta);
            per_order[k].push_back({beta, d});
            scale = std::max(scale, std::abs(d));
        }
    }
    if (scale == 0.0) throw OrderTooHighError("all derivatives vanish up to k_max");
    for (int k = 1; k <= k_max; ++k) {
        double mx = 0.0;
        for (const auto& [beta, d] : per_order[k]) mx = std::max(mx, std::abs(d));
        if (mx > tol * scale) {
            TaylorPolynomial p;
            p.x0 = x0;
            p.degree = k;
            for (const auto& [beta, d] : per_order[k]) {
                double bfact = 1.0;
                for (int b : beta) bfact *= factorial(b);
                p.terms.push_back({beta, d / bfact});
            }
            return {k, std::move(p)};
        }
    }
    throw OrderTooHighError("vanishing order exceeds k_max");
}

double sphere_surface_integral_sq(const TaylorPolynomial& p) {
    if (p.x0.size() != 3) throw Error("sphere_surface_integral_sq: 3D only");
    // tensor rule: Gauss-Legendre in cos(theta) x uniform in phi
    const int nt = 24, np = 48;
    // Gauss-Legendre nodes/weights on [-1,1] via Newton on Legendre polynomials
    std::vector<double> xs(nt), ws(nt);
    for (int i = 0; i < nt; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (nt + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= nt; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = nt * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= nt; ++j) {
            double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = nt * (x * p1 - p0) / (x * x - 1.0);
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    double s = 0.0;
    for (int i = 0; i < nt; ++i) {
        double ct = xs[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < np; ++j) {
            double ph = 2.0 * kPi * j / np;
            Point x = {st * std::cos(ph), st * std::sin(ph), ct};
            double v = p.evaluate(x);
            s += ws[i] * (2.0 * kPi / np) * v * v;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// Shift predictions

double ShiftPrediction::predict(double eps) const {
    double v = coeff * std::pow(eps, exponent);
    if (log_correction) v *= std::abs(std::log(eps));
    return v;
}

ShiftPrediction predict_shift_2d(const AnalyticEigenfunction& phi, const Point& x0) {
    if (phi.dim() != 2) throw Error("predict_shift_2d: 2D eigenfunctions only");
    if (!phi.simple) throw SimplicityError("target eigenvalue is not simple");
    const double lambda = phi.lambda;
    const double val = phi.value(x0);
    auto grad = phi.gradient(x0);
    const double grad_sq = grad[0] * grad[0] + grad[1] * grad[1];

    auto [k, table] = vanishing_order(phi, x0);
    // classification scale: largest derivative magnitude through order 6
    double mag = std::abs(val);
    for (int ord = 1; ord <= 2; ++ord)
        for (int i = 0; i <= ord; ++i) {
            MultiIndex b = {ord - i, i};
            mag = std::max(mag, std::abs(phi.derivative(x0, b)));
        }
    mag = std::max(mag, table.max_abs_coeff());
    const bool value_zero = std::abs(val) <= 1e-9 * mag;
    const bool grad_zero = k >= 2;

    ShiftPrediction out;
    if (!(value_zero && grad_zero)) {
        // regular point: eps^2 law
        out.exponent = 2.0;
        out.torsion_term = -kPi * grad_sq;
        out.volume_term = -kPi * (grad_sq - (lambda - 1.0) * val * val);
        out.coeff = out.torsion_term + out.volume_term;
        if (grad_zero && !value_zero) {
            out.has_log_diagnostic = true;
            out.log_diagnostic_coeff =
                -0.5 * kPi * (lambda - 1.0) * (lambda - 1.0) * val * val;
        }
        return out;
    }
    // singular point: eps^{2k} law with the k-th derivative pair
    MultiIndex bx(2, 0), bxy(2, 0);
    bx[0] = k;
    bxy[0] = k - 1;
    bxy[1] = 1;
    double dk_x = phi.derivative(x0, bx);
    double dk_xy = phi.derivative(x0, bxy);
    out.exponent = 2.0 * k;
    double core = dk_x * dk_x + dk_xy * dk_xy / (double(k) * k);
    out.torsion_term = -kPi * k * core;
    out.volume_term = -kPi * k * core;
    out.coeff = -2.0 * kPi * k * core;
    return out;
}

ShiftPrediction predict_shift_nd_regular(int N, double lambda, double grad_norm_sq,
                                         double value) {
    if (N < 3) throw DomainError("predict_shift_nd_regular: N >= 3 required");
    ShiftPrediction out;
    out.exponent = (double)N;
    const double wn = unit_ball_volume(N);
    out.torsion_term = -wn / (N - 1.0) * grad_norm_sq;
    out.volume_term = -wn * (grad_norm_sq - (lambda - 1.0) * value * value);
    out.coeff = -wn * (N / (N - 1.0) * grad_norm_sq - (lambda - 1.0) * value * value);
    return out;
}

ShiftPrediction predict_shift_nd_singular(int N, double lambda, int k, double y_norm_sq) {
    if (N < 3) throw DomainError("predict_shift_nd_singular: N >= 3 required");
    if (k < 2) throw Error("predict_shift_nd_singular: vanishing order k >= 2 required");
    if (y_norm_sq < 0.0) throw Error("predict_shift_nd_singular: negative norm");
    (void)lambda;
    ShiftPrediction out;
    out.exponent = (double)(N + 2 * k - 2);
    out.torsion_term = -double(k) * k / (N + k - 2.0) * y_norm_sq;
    out.volume_term = -double(k) * y_norm_sq;
    out.coeff = -double(k) * (N + 2.0 * k - 2.0) / (N + k - 2.0) * y_norm_sq;
    return out;
}

ShiftPrediction predict_shift_general(double torsion_value, double volume_term) {
    ShiftPrediction out;
    out.exponent = 0.0;
    out.torsion_term = -torsion_value;
    out.volume_term = -volume_term;
    out.coeff = -torsion_value - volume_term;
    return out;
}

double gamma_indicator(const AnalyticEigenfunction& phi, const Point& x) {
    const int N = phi.dim();
    auto g = phi.gradient(x);
    double gsq = 0.0;
    for (double v : g) gsq += v * v;
    double val = phi.value(x);
    return N / (N - 1.0) * gsq - (phi.lambda - 1.0) * val * val;
}

double hole_energy_integral(const AnalyticEigenfunction& phi, const Point& x0,
                            double eps, double rtol) {
    if (phi.dim() != 2) throw Error("hole_energy_integral: 2D only");
    const double lambda = phi.lambda;
    auto integrand = [&](double x, double y) {
        Point p = {x, y};
        auto g = phi.gradient(p);
        double v = phi.value(p);
        return g[0] * g[0] + g[1] * g[1] - (lambda - 1.0) * v * v;
    };
    // polar product Gauss with doubling until the relative change is small
    auto eval = [&](int nr, int nt) {
        // Gauss-Legendre on [0,1] radially (scaled), trapezoid in angle
        std::vector<double> xs(nr), ws(nr);
        for (int i = 0; i < nr; ++i) {
            double x = std::cos(kPi * (i + 0.75) / (nr + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= nr; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = nr * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= nr; ++j) {
                double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = nr * (x * p1 - p0) / (x * x - 1.0);
            xs[i] = 0.5 * (x + 1.0);
            ws[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
        double s = 0.0;
        for (int i = 0; i < nr; ++i) {
            double r = eps * xs[i];
            for (int j = 0; j < nt; ++j) {
                double t = 2.0 * kPi * j / nt;
                s += ws[i] * (2.0 * kPi / nt) * r * eps *
                     integrand(x0[0] + r * std::cos(t), x0[1] + r * std::sin(t));
            }
        }
        return s;
    };
    int nr = 8, nt = 16;
    double prev = eval(nr, nt);
    for (int it = 0; it < 8; ++it) {
        nr *= 2;
        nt *= 2;
        double cur = eval(nr, nt);
        if (std::abs(cur - prev) <= rtol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

double unit_ball_volume(int N) {
    if (N < 1) throw DomainError("unit_ball_volume: N >= 1");
    return std::pow(kPi, 0.5 * N) / std::tgamma(0.5 * N + 1.0);
}

} // namespace nh
