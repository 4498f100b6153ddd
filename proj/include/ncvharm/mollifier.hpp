#pragma once

#include "ncvharm/gridfn.hpp"

namespace ncvharm {

// Fixed bump (15/16)(1 - x^2)^2 on (-1, 1) with closed-form antiderivatives.
namespace bump {
double density(double x);
double density_derivative(double x);
// First antiderivative, 0 at -1 and 1 at +1.
double cdf(double x);
// Second antiderivative: 0 left of -1, equal to x right of +1.
double second(double x);
// Autocorrelation  int bump(u) bump(u - w) du, supported on [-2, 2].
double autocorrelation(double w);

inline constexpr double kL2NormSq = 5.0 / 7.0;
inline constexpr double kDerivativeL2NormSq = 15.0 / 7.0;
// sup |bump'| attained at x = 1/sqrt(3).
double derivative_sup();
}  // namespace bump

// phi_m(x) = m * bump(m x).
struct Mollifier {
  int scale = 1;

  explicit Mollifier(int m);
  double operator()(double x) const;
  double support_radius() const { return 1.0 / scale; }
  double l2_norm_sq() const { return bump::kL2NormSq * scale; }
  // Autocorrelation of phi_m: the profile of R_m R_m.
  double autocorrelation(double w) const;
};

// Nonnegative profile with compact support given through its second antiderivative.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual double lo() const = 0;
  virtual double hi() const = 0;
  // int_{-inf}^u int_{-inf}^s p.
  virtual double second(double u) const = 0;
  virtual double mass() const = 0;
};

class BumpProfile final : public Profile {
 public:
  explicit BumpProfile(int m) : m_(m) {}
  double lo() const override { return -1.0 / m_; }
  double hi() const override { return 1.0 / m_; }
  double second(double u) const override;
  double mass() const override { return 1.0; }

 private:
  int m_;
};

// phi_m restricted to [u0, u1].
class TruncatedBumpProfile final : public Profile {
 public:
  TruncatedBumpProfile(int m, double u0, double u1);
  double lo() const override { return u0_; }
  double hi() const override { return u1_; }
  double second(double u) const override;
  double mass() const override;

 private:
  int m_;
  double u0_, u1_;
  double cdf(double u) const;
  double second_raw(double u) const;
};

// Cell-averaged convolution p * f on a grid widened to hold its support.
GridFn convolve_profile(const GridFn& f, const Profile& p);
// R_m f = phi_m * f; output widened by ceil(1/(m h)) cells per side.
GridFn convolve(const GridFn& f, const Mollifier& phi);

}  // namespace ncvharm
