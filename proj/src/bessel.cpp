#include "neumann_holes/bessel.hpp"

#include <cmath>

namespace nh {
namespace bessel {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesCut = 16.0;

// ascending series in long double; cancellation at z=16 stays within budget
long double j0_series(long double z) {
    const long double q = 0.25L * z * z;
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m < 80; ++m) {
        term *= -q / ((long double)m * m);
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

long double j1_series(long double z) {
    const long double q = 0.25L * z * z;
    long double term = 0.5L * z, sum = term;
    for (int m = 1; m < 80; ++m) {
        term *= -q / ((long double)m * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-22L * std::abs(sum)) break;
    }
    return sum;
}

// Hankel asymptotic expansion, truncated at the smallest term.
// J_nu(z) = sqrt(2/(pi z)) (P cos(w) - Q sin(w)),  w = z - (2 nu + 1) pi / 4
long double hankel(long double z, int nu, bool& ok) {
    const long double mu = 4.0L * nu * nu;
    long double p = 1.0L, q = 0.0L;
    long double term = 1.0L;
    long double prev = 1e30L;
    for (int k = 1; k < 64; ++k) {
        long double num = mu - (long double)(2 * k - 1) * (2 * k - 1);
        term *= num / (8.0L * z * k);
        long double mag = std::abs(term);
        if (mag > prev) break; // divergent tail reached
        prev = mag;
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
        if (mag < 1e-20L) break;
    }
    ok = true;
    const long double w = z - (2 * nu + 1) * (kPi / 4.0L);
    return std::sqrt(2.0L / (kPi * z)) * (p * std::cos(w) - q * std::sin(w));
}

} // namespace

double j0(double z) {
    double az = std::abs(z);
    if (az <= kSeriesCut) return (double)j0_series(az);
    bool ok;
    return (double)hankel(az, 0, ok);
}

double j1(double z) {
    double az = std::abs(z);
    double v;
    if (az <= kSeriesCut) v = (double)j1_series(az);
    else {
        bool ok;
        v = (double)hankel(az, 1, ok);
    }
    return z < 0.0 ? -v : v;
}

std::vector<double> jn_table(double z, int n_max) {
    std::vector<double> out(n_max + 1, 0.0);
    if (z == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (n_max == 0) {
        out[0] = j0(z);
        return out;
    }
    // downward Miller recurrence, normalized with the accurate J0
    int start = n_max + 16 + (int)z;
    std::vector<long double> t(start + 2, 0.0L);
    t[start + 1] = 0.0L;
    t[start] = 1e-30L;
    for (int n = start; n >= 1; --n) {
        t[n - 1] = (2.0L * n / z) * t[n] - t[n + 1];
        if (std::abs(t[n - 1]) > 1e280L) {
            for (int i = n - 1; i <= start + 1; ++i) t[i] *= 1e-280L;
        }
    }
    long double scale = (long double)j0(z) / t[0];
    for (int n = 0; n <= n_max; ++n) out[n] = (double)(t[n] * scale);
    return out;
}

namespace {

// bracketed Newton on a smooth function with derivative
template <class F, class DF>
double newton_bracketed(F&& f, DF&& df, double lo, double hi) {
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (flo * fhi > 0.0) throw RootBracketError("root not bracketed");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) { lo = x; flo = fx; }
        else hi = x;
        double d = df(x);
        double step = d != 0.0 ? fx / d : 0.0;
        double xn = x - step;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi); // bisection fallback
        if (std::abs(xn - x) <= 1e-15 * std::abs(x)) return xn;
        x = xn;
    }
    return x;
}

} // namespace

double j0_prime_zero(int k) {
    if (k < 1) throw DomainError("root index must be >= 1");
    // J0' = -J1; positive roots of J1 are near (k + 1/4) pi
    double guess = (k + 0.25) * kPi;
    double lo = guess - 0.5 * kPi + 0.05;
    double hi = guess + 0.5 * kPi - 0.05;
    // J1' = J0 - J1/z
    return newton_bracketed([](double z) { return j1(z); },
                            [](double z) { return j0(z) - j1(z) / z; }, lo, hi);
}

double j0_zero(int k) {
    if (k < 1) throw DomainError("root index must be >= 1");
    double guess = (k - 0.25) * kPi;
    double lo = guess - 0.5 * kPi + 0.05;
    double hi = guess + 0.5 * kPi - 0.05;
    return newton_bracketed([](double z) { return j0(z); },
                            [](double z) { return -j1(z); }, lo, hi);
}

} // namespace bessel
} // namespace nh
