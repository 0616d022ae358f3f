#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltlab/common.hpp"

namespace ltlab {

/// Analytic origin of a potential.
enum class FamilyTag { square_well, poschl_teller, gaussian, rank_one_narrow, random_smooth, composite, samples };

std::string to_string(FamilyTag tag);
FamilyTag family_from_string(const std::string& name);

/// Parameters of a potential family. Only the fields relevant to `tag` are read.
///
///  square-well      V = -depth * 1 on [center - half_width, center + half_width]
///  poschl-teller    V = -nu (nu + 1) sech^2(x - center)
///  gaussian         V = -depth * exp(-((x - center) / width)^2)
///  rank-one-narrow  V = -(integral / width) * 1_[center, center + width] * P, P = e e*
///  random-smooth    V = bump((x - center) / radius) * (-depth + amplitude * sum_m 0.6^m (H_m cos + G_m sin))
///  composite        direct sum of `blocks`
struct FamilySpec {
  FamilyTag tag = FamilyTag::square_well;
  int dim = 1;
  double depth = 1.0;
  double half_width = 1.0;
  double center = 0.0;
  double nu = 1.0;
  double width = 1.0;
  double integral = 2.0;
  double radius = 2.0;
  double amplitude = 0.5;
  int modes = 4;
  std::uint64_t seed = 0;
  std::vector<FamilySpec> blocks;
};

void to_json(nlohmann::json& j, const FamilySpec& s);
void from_json(const nlohmann::json& j, FamilySpec& s);

/// Coefficient decay per Fourier mode of the random-smooth family.
inline constexpr double kRandomModeDecay = 0.6;
/// Max-entry norm below which a sample counts as outside the support.
inline constexpr double kSupportThreshold = 1e-14;

/// Continuous description of a matrix-valued potential. Implementations are
/// immutable and safe to share between threads.
class Profile {
 public:
  virtual ~Profile() = default;
  virtual int dim() const = 0;
  virtual Interval support() const = 0;
  virtual Matrix value(double x) const = 0;
  virtual std::optional<Matrix> derivative(double) const { return std::nullopt; }
  /// Jump discontinuities; empty for smooth profiles.
  virtual std::vector<double> breakpoints() const { return {}; }
  /// Constant between consecutive breakpoints.
  virtual bool piecewise_constant() const { return false; }
  /// Narrowest length scale the sampling grid must resolve.
  virtual double feature_width() const = 0;
  /// Mean of V over [a, b]; exact for piecewise-constant profiles.
  virtual Matrix cell_mean(double a, double b) const;
};

/// Hermitian n x n matrix-valued function sampled on a uniform grid.
class SampledPotential {
 public:
  SampledPotential(double start, double step, std::vector<Matrix> values, Interval support, FamilySpec origin,
                   std::shared_ptr<const Profile> profile = nullptr,
                   std::optional<std::vector<Matrix>> derivative = std::nullopt);

  double start() const { return start_; }
  double step() const { return step_; }
  std::size_t size() const { return values_.size(); }
  int dim() const { return static_cast<int>(values_.front().rows()); }
  double x(std::size_t i) const { return start_ + static_cast<double>(i) * step_; }
  Interval window() const { return {start_, x(size() - 1)}; }
  Interval support() const { return support_; }
  const std::vector<Matrix>& values() const { return values_; }
  const Matrix& operator[](std::size_t i) const { return values_[i]; }
  const std::optional<std::vector<Matrix>>& analytic_derivative() const { return derivative_; }
  const FamilySpec& family() const { return origin_; }
  const std::shared_ptr<const Profile>& profile() const { return profile_; }

  bool is_smooth() const { return breakpoints().empty(); }
  std::vector<double> breakpoints() const;

  /// V at an arbitrary point: the analytic profile when present, else cubic
  /// interpolation of the samples (zero outside the window).
  Matrix at(double x) const;
  /// Cell mean over [a, b]; point value at the centre for smooth potentials.
  Matrix cell_mean(double a, double b) const;

  /// Same analytic potential on a finer or coarser grid.
  SampledPotential resampled(double step) const;

  /// Stable identifier of the analytic origin and grid, used to check that
  /// derived data come from the same potential.
  std::string fingerprint() const;

 private:
  double start_;
  double step_;
  std::vector<Matrix> values_;
  Interval support_;
  FamilySpec origin_;
  std::shared_ptr<const Profile> profile_;
  std::optional<std::vector<Matrix>> derivative_;
};

/// Sampling controls. A zero step selects one that puts at least 16 points
/// across the narrowest feature and lands grid points on the support ends.
struct SamplingSpec {
  double step = 0.0;
  double margin = 1.0;
  double max_step = 0.05;
};

SampledPotential build_family(const FamilySpec& spec, const SamplingSpec& sampling = {});

/// Potential from raw samples; throws InvalidArgument on non-Hermitian input.
SampledPotential from_samples(double start, double step, std::vector<Matrix> values);

/// Shared analytic profile for a family (used by build_family and resampling).
std::shared_ptr<const Profile> make_profile(const FamilySpec& spec);

// Pointwise transformations; each preserves Hermiticity.
SampledPotential scaled(const SampledPotential& v, double alpha);
SampledPotential negated(const SampledPotential& v);
/// x -> U V(x) U* for a fixed unitary U.
SampledPotential conjugated(const SampledPotential& v, const Matrix& unitary);
SampledPotential direct_sum(const SampledPotential& a, const SampledPotential& b);

/// V = V+ - V- with V+ V- = 0 at every point.
struct MatrixFunctionSplit {
  SampledPotential positive;
  SampledPotential negative;
};

MatrixFunctionSplit split_parts(const SampledPotential& v);

enum class Part { plus, minus };

/// Integral of sum_j f(mu_j(x)) over the window, mu_j the eigenvalues of V(x).
double trace_integral(const SampledPotential& v, const std::function<double(double)>& f);

/// Integral of tr V_{+/-}(x)^p.
double trace_power_integral(const SampledPotential& v, Part part, double p);

/// Integral of tr V(x)^m for integer m (signed).
double trace_moment_integral(const SampledPotential& v, int m);

/// Integral of tr (dV/dx)^2; analytic derivative when available, otherwise a
/// fourth-order central difference of the samples.
double derivative_square_integral(const SampledPotential& v);

/// Largest eigenvalue of V-(x) over the grid.
double max_negative_eigenvalue(const SampledPotential& v);

nlohmann::json to_json(const SampledPotential& v, bool include_samples);
SampledPotential potential_from_json(const nlohmann::json& j);

}  // namespace ltlab
