#include "platemodes/specfun.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "platemodes/errors.hpp"

namespace platemodes {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;
constexpr double kEps = 1e-17;

void require_finite(double z) {
    if (!std::isfinite(z)) throw DomainError("bessel: non-finite argument");
}

void require_positive(double z) {
    require_finite(z);
    if (z <= 0.0) throw DomainError("bessel: Y and K need a positive argument");
}

// Ascending series for z < 2.
BesselJY jy_series(double z) {
    const double q = 0.25 * z * z;
    double j0 = 0.0, j1 = 0.0, ys0 = 0.0, ys1 = 0.0;
    double t0 = 1.0;   // (-q)^k / (k!)^2
    double t1 = 1.0;   // (-q)^k / (k! (k+1)!)
    double hk = 0.0;   // harmonic number H_k
    for (int k = 0; k < 60; ++k) {
        if (k > 0) {
            t0 *= -q / (double(k) * k);
            t1 *= -q / (double(k) * (k + 1));
            hk += 1.0 / k;
        }
        j0 += t0;
        j1 += t1;
        ys0 -= hk * t0;
        ys1 += (hk + hk + 1.0 / (k + 1) - 2.0 * kEuler) * t1;
        if (std::abs(t0) < kEps * std::abs(j0) && k > 2) break;
    }
    j1 *= 0.5 * z;
    const double lg = std::log(0.5 * z);
    BesselJY r;
    r.j0 = j0;
    r.j1 = j1;
    r.y0 = (2.0 / kPi) * ((lg + kEuler) * j0 + ys0);
    r.y1 = -2.0 / (kPi * z) + (2.0 / kPi) * lg * j1 - (0.5 * z / kPi) * ys1;
    return r;
}

// Miller backward recurrence normalised by J0 + 2 sum J_2k = 1, with the
// Neumann series for Y0, Y1.
BesselJY jy_miller(double z) {
    std::array<double, 160> jk{};
    int m = int(z + 20.0 + 4.0 * std::cbrt(z));
    m += m % 2;
    jk[m + 1] = 0.0;
    jk[m] = 1e-30;
    for (int k = m; k >= 1; --k) {
        jk[k - 1] = (2.0 * k / z) * jk[k] - jk[k + 1];
        if (std::abs(jk[k - 1]) > 1e250) {
            for (int i = k - 1; i <= m + 1; ++i) jk[i] *= 1e-250;
        }
    }
    double norm = jk[0];
    for (int k = 2; k <= m; k += 2) norm += 2.0 * jk[k];
    const double s = 1.0 / norm;
    double sy0 = 0.0, sy1 = 0.0;
    double sign = -1.0;
    for (int k = 1; 2 * k <= m; ++k, sign = -sign) {
        sy0 += sign * jk[2 * k] / k;
        sy1 += sign * (jk[2 * k - 1] - jk[2 * k + 1]) / k;
    }
    BesselJY r;
    r.j0 = jk[0] * s;
    r.j1 = jk[1] * s;
    const double lg = std::log(0.5 * z) + kEuler;
    r.y0 = (2.0 / kPi) * lg * r.j0 - (4.0 / kPi) * sy0 * s;
    r.y1 = -(2.0 / kPi) * r.j0 / z + (2.0 / kPi) * lg * r.j1 + (2.0 / kPi) * sy1 * s;
    return r;
}

// Hankel expansion P, Q for order nu (0 or 1).
void hankel_pq(int nu, double z, double& p, double& q) {
    const double mu4 = 4.0 * nu * nu;
    const double x8 = 1.0 / (8.0 * z);
    p = 1.0;
    q = 0.0;
    double term = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= (mu4 - odd * odd) * x8 / k;
        if (std::abs(term) > last) break;  // asymptotic series started diverging
        last = std::abs(term);
        // a_k terms alternate between Q (odd k) and P (even k)
        switch (k % 4) {
            case 1: q += term; break;
            case 2: p -= term; break;
            case 3: q -= term; break;
            case 0: p += term; break;
        }
        if (last < kEps) break;
    }
}

BesselJY jy_asymptotic(double z) {
    double p0, q0, p1, q1;
    hankel_pq(0, z, p0, q0);
    hankel_pq(1, z, p1, q1);
    const double amp = std::sqrt(2.0 / (kPi * z));
    const double c = std::cos(z), s = std::sin(z);
    // cos(z - pi/4), sin(z - pi/4), and the order-1 phase z - 3pi/4
    const double r2 = std::numbers::sqrt2 / 2.0;
    const double c0 = r2 * (c + s), s0 = r2 * (s - c);
    const double c1 = r2 * (s - c), s1 = -r2 * (c + s);
    BesselJY r;
    r.j0 = amp * (p0 * c0 - q0 * s0);
    r.y0 = amp * (p0 * s0 + q0 * c0);
    r.j1 = amp * (p1 * c1 - q1 * s1);
    r.y1 = amp * (p1 * s1 + q1 * c1);
    return r;
}

void i_series(double z, double& i0, double& i1) {
    const double q = 0.25 * z * z;
    double t0 = 1.0, t1 = 1.0;
    i0 = 1.0;
    i1 = 1.0;
    for (int k = 1; k < 300; ++k) {
        t0 *= q / (double(k) * k);
        t1 *= q / (double(k) * (k + 1));
        i0 += t0;
        i1 += t1;
        if (t1 < kEps * i1) break;
    }
    i1 *= 0.5 * z;
}

void i_asymptotic(double z, double& i0, double& i1) {
    const double pre = std::exp(z) / std::sqrt(2.0 * kPi * z);
    const double x8 = 1.0 / (8.0 * z);
    for (int nu = 0; nu <= 1; ++nu) {
        const double mu4 = 4.0 * nu * nu;
        double sum = 1.0, term = 1.0;
        for (int k = 1; k < 100; ++k) {
            const double odd = 2.0 * k - 1.0;
            term *= -(mu4 - odd * odd) * x8 / k;
            sum += term;
            if (std::abs(term) < kEps) break;
        }
        (nu == 0 ? i0 : i1) = pre * sum;
    }
}

void k_series(double z, double i0, double i1, double& k0, double& k1) {
    const double q = 0.25 * z * z;
    double t0 = 1.0, t1 = 1.0, hk = 0.0;
    double s0 = 0.0, s1 = 1.0 - 2.0 * kEuler;  // k = 0 term of psi(1)+psi(2)
    for (int k = 1; k < 60; ++k) {
        t0 *= q / (double(k) * k);
        t1 *= q / (double(k) * (k + 1));
        hk += 1.0 / k;
        s0 += hk * t0;
        s1 += (hk + hk + 1.0 / (k + 1) - 2.0 * kEuler) * t1;
        if (t0 < kEps * std::abs(s0)) break;
    }
    const double lg = std::log(0.5 * z);
    k0 = -(lg + kEuler) * i0 + s0;
    k1 = 1.0 / z + lg * i1 - 0.25 * z * s1;
}

// Steed's continued fraction (Temme's CF2) at order zero, z > 2.
void k_steed(double z, double& k0, double& k1) {
    double b = 2.0 * (1.0 + z);
    double d = 1.0 / b;
    double h = d, delh = d;
    double q1 = 0.0, q2 = 1.0;
    const double a1 = 0.25;
    double q = a1, c = a1, a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 2; i < 500; ++i) {
        a -= 2.0 * (i - 1);
        c = -a * c / i;
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::abs(dels / s) < kEps) break;
    }
    h *= a1;
    k0 = std::sqrt(kPi / (2.0 * z)) * std::exp(-z) / s;
    k1 = k0 * (z + 0.5 - h) / z;
}

}  // namespace

BesselJY bessel_jy(double z) {
    require_positive(z);
    if (z < 2.0) return jy_series(z);
    if (z < 25.0) return jy_miller(z);
    return jy_asymptotic(z);
}

BesselIK bessel_ik(double z) {
    require_positive(z);
    BesselIK r;
    if (z <= 40.0) i_series(z, r.i0, r.i1);
    else i_asymptotic(z, r.i0, r.i1);
    if (z <= 2.0) k_series(z, r.i0, r.i1, r.k0, r.k1);
    else k_steed(z, r.k0, r.k1);
    return r;
}

BesselYK bessel_yk(double z) {
    require_positive(z);
    const BesselJY jy = bessel_jy(z);
    BesselYK r{jy.y0, jy.y1, 0.0, 0.0};
    if (z <= 2.0) {
        double i0, i1;
        i_series(z, i0, i1);
        k_series(z, i0, i1, r.k0, r.k1);
    } else {
        k_steed(z, r.k0, r.k1);
    }
    return r;
}

double bessel_j0(double z) {
    require_finite(z);
    if (z < 0.0) z = -z;
    if (z == 0.0) return 1.0;
    return bessel_jy(z).j0;
}

double bessel_j1(double z) {
    require_finite(z);
    if (z == 0.0) return 0.0;
    if (z < 0.0) return -bessel_j1(-z);
    return bessel_jy(z).j1;
}

double bessel_y0(double z) { return bessel_jy(z).y0; }
double bessel_y1(double z) { return bessel_jy(z).y1; }

double bessel_i0(double z) {
    require_finite(z);
    if (z < 0.0) z = -z;
    if (z == 0.0) return 1.0;
    double i0, i1;
    if (z <= 40.0) i_series(z, i0, i1);
    else i_asymptotic(z, i0, i1);
    return i0;
}

double bessel_i1(double z) {
    require_finite(z);
    if (z == 0.0) return 0.0;
    if (z < 0.0) return -bessel_i1(-z);
    double i0, i1;
    if (z <= 40.0) i_series(z, i0, i1);
    else i_asymptotic(z, i0, i1);
    return i1;
}

double bessel_k0(double z) { return bessel_ik(z).k0; }
double bessel_k1(double z) { return bessel_ik(z).k1; }

double bessel(BesselKind kind, double z) {
    switch (kind) {
        case BesselKind::J0: return bessel_j0(z);
        case BesselKind::J1: return bessel_j1(z);
        case BesselKind::Y0: return bessel_y0(z);
        case BesselKind::Y1: return bessel_y1(z);
        case BesselKind::I0: return bessel_i0(z);
        case BesselKind::I1: return bessel_i1(z);
        case BesselKind::K0: return bessel_k0(z);
        case BesselKind::K1: return bessel_k1(z);
    }
    throw DomainError("bessel: unknown kind");
}

double bessel_jn(int n, double z) {
    if (n < 0) throw DomainError("bessel_jn: negative order");
    if (n == 0) return bessel_j0(z);
    if (n == 1) return bessel_j1(z);
    require_finite(z);
    if (z == 0.0) return 0.0;
    if (z > double(n)) {
        // upward recurrence is stable while the order stays below z
        double jm = bessel_j0(z), j = bessel_j1(z);
        for (int k = 1; k < n; ++k) {
            const double jp = (2.0 * k / z) * j - jm;
            jm = j;
            j = jp;
        }
        return j;
    }
    const double q = 0.25 * z * z;
    double term = std::pow(0.5 * z, n) / std::tgamma(n + 1.0);
    double sum = term;
    for (int k = 1; k < 100; ++k) {
        term *= -q / (double(k) * (n + k));
        sum += term;
        if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return sum;
}

double bessel_in(int n, double z) {
    if (n < 0) throw DomainError("bessel_in: negative order");
    if (n == 0) return bessel_i0(z);
    if (n == 1) return bessel_i1(z);
    require_finite(z);
    if (z == 0.0) return 0.0;
    const double q = 0.25 * z * z;
    double term = std::pow(0.5 * std::abs(z), n) / std::tgamma(n + 1.0);
    double sum = term;
    for (int k = 1; k < 400; ++k) {
        term *= q / (double(k) * (n + k));
        sum += term;
        if (term < kEps * sum) break;
    }
    return (z < 0.0 && n % 2 == 1) ? -sum : sum;
}

}  // namespace platemodes
