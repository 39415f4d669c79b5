#pragma once

// Bessel functions of order 0 and 1 on the positive real axis.
// Accuracy target: 1e-12 relative on (1e-8, 60], absolute near zeros of J and Y.

namespace platemodes {

enum class BesselKind { J0, J1, Y0, Y1, I0, I1, K0, K1 };

double bessel(BesselKind kind, double z);

double bessel_j0(double z);
double bessel_j1(double z);
double bessel_y0(double z);
double bessel_y1(double z);
double bessel_i0(double z);
double bessel_i1(double z);
double bessel_k0(double z);
double bessel_k1(double z);

struct BesselJY { double j0, j1, y0, y1; };
struct BesselIK { double i0, i1, k0, k1; };
struct BesselYK { double y0, y1, k0, k1; };

BesselJY bessel_jy(double z);
BesselIK bessel_ik(double z);
// The four values the plate kernels need, sharing work between them.
BesselYK bessel_yk(double z);

// Integer orders, used by the disk closed forms.
double bessel_jn(int n, double z);
double bessel_in(int n, double z);

}  // namespace platemodes
