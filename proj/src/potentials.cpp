#include "ltlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "ltlab/hermitian.hpp"
#include "ltlab/quadrature.hpp"

namespace ltlab {

using nlohmann::json;

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::square_well: return "square-well";
    case FamilyTag::poschl_teller: return "poschl-teller";
    case FamilyTag::gaussian: return "gaussian";
    case FamilyTag::rank_one_narrow: return "rank-one-narrow";
    case FamilyTag::random_smooth: return "random-smooth";
    case FamilyTag::composite: return "composite";
    case FamilyTag::samples: return "samples";
  }
  return "unknown";
}

FamilyTag family_from_string(const std::string& name) {
  for (FamilyTag t : {FamilyTag::square_well, FamilyTag::poschl_teller, FamilyTag::gaussian,
                      FamilyTag::rank_one_narrow, FamilyTag::random_smooth, FamilyTag::composite,
                      FamilyTag::samples}) {
    if (to_string(t) == name) return t;
  }
  throw InvalidArgument("unknown potential family '" + name + "'");
}

void to_json(json& j, const FamilySpec& s) {
  j = json::object();
  j["family"] = to_string(s.tag);
  switch (s.tag) {
    case FamilyTag::square_well:
      j["depth"] = s.depth;
      j["half_width"] = s.half_width;
      j["center"] = s.center;
      j["dim"] = s.dim;
      break;
    case FamilyTag::poschl_teller:
      j["nu"] = s.nu;
      j["center"] = s.center;
      break;
    case FamilyTag::gaussian:
      j["depth"] = s.depth;
      j["width"] = s.width;
      j["center"] = s.center;
      j["dim"] = s.dim;
      break;
    case FamilyTag::rank_one_narrow:
      j["integral"] = s.integral;
      j["width"] = s.width;
      j["center"] = s.center;
      j["dim"] = s.dim;
      break;
    case FamilyTag::random_smooth:
      j["seed"] = s.seed;
      j["dim"] = s.dim;
      j["radius"] = s.radius;
      j["depth"] = s.depth;
      j["amplitude"] = s.amplitude;
      j["modes"] = s.modes;
      j["center"] = s.center;
      break;
    case FamilyTag::composite:
      j["blocks"] = s.blocks;
      break;
    case FamilyTag::samples:
      j["dim"] = s.dim;
      break;
  }
}

void from_json(const json& j, FamilySpec& s) {
  s = FamilySpec{};
  s.tag = family_from_string(j.at("family").get<std::string>());
  auto opt = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  opt("dim", s.dim);
  opt("depth", s.depth);
  opt("half_width", s.half_width);
  opt("center", s.center);
  opt("nu", s.nu);
  opt("width", s.width);
  opt("integral", s.integral);
  opt("radius", s.radius);
  opt("amplitude", s.amplitude);
  opt("modes", s.modes);
  opt("seed", s.seed);
  if (j.contains("blocks")) s.blocks = j.at("blocks").get<std::vector<FamilySpec>>();
}

// ---------------------------------------------------------------------------
// Profiles

Matrix Profile::cell_mean(double a, double b) const {
  if (b <= a) return value(a);
  std::vector<double> cuts{a};
  for (double p : breakpoints()) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  const quad::Rule& rule = quad::gauss_legendre(5);
  Matrix sum = Matrix::Zero(dim(), dim());
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double c = 0.5 * (cuts[s] + cuts[s + 1]);
    const double hw = 0.5 * (cuts[s + 1] - cuts[s]);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += (rule.weights[i] * hw) * value(c + hw * rule.nodes[i]);
  }
  return sum / (b - a);
}

namespace {

Matrix identity(int n) { return Matrix::Identity(n, n); }

class SquareWellProfile final : public Profile {
 public:
  SquareWellProfile(double depth, double half_width, double center, int n)
      : depth_(depth), a_(half_width), c_(center), n_(n) {}
  int dim() const override { return n_; }
  Interval support() const override { return {c_ - a_, c_ + a_}; }
  Matrix value(double x) const override {
    return std::abs(x - c_) <= a_ ? Matrix(-depth_ * identity(n_)) : Matrix(Matrix::Zero(n_, n_));
  }
  std::vector<double> breakpoints() const override { return {c_ - a_, c_ + a_}; }
  bool piecewise_constant() const override { return true; }
  double feature_width() const override { return 2.0 * a_; }
  Matrix cell_mean(double lo, double hi) const override {
    if (hi <= lo) return value(lo);
    const double overlap = std::max(0.0, std::min(hi, c_ + a_) - std::max(lo, c_ - a_));
    return (-depth_ * overlap / (hi - lo)) * identity(n_);
  }

 private:
  double depth_, a_, c_;
  int n_;
};

class RankOneProfile final : public Profile {
 public:
  RankOneProfile(double integral, double width, double center, int n) : c_(center), w_(width), n_(n) {
    depth_ = integral / width;
    Vector e = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
    projector_ = e * e.adjoint();
  }
  int dim() const override { return n_; }
  Interval support() const override { return {c_, c_ + w_}; }
  Matrix value(double x) const override {
    return (x >= c_ && x <= c_ + w_) ? Matrix(-depth_ * projector_) : Matrix(Matrix::Zero(n_, n_));
  }
  std::vector<double> breakpoints() const override { return {c_, c_ + w_}; }
  bool piecewise_constant() const override { return true; }
  double feature_width() const override { return w_; }
  Matrix cell_mean(double lo, double hi) const override {
    if (hi <= lo) return value(lo);
    const double overlap = std::max(0.0, std::min(hi, c_ + w_) - std::max(lo, c_));
    return (-depth_ * overlap / (hi - lo)) * projector_;
  }

 private:
  double c_, w_, depth_;
  int n_;
  Matrix projector_;
};

class PoschlTellerProfile final : public Profile {
 public:
  PoschlTellerProfile(double nu, double center) : c_(center) {
    strength_ = nu * (nu + 1.0);
    cutoff_ = std::acosh(std::sqrt(strength_ / kSupportThreshold));
  }
  int dim() const override { return 1; }
  Interval support() const override { return {c_ - cutoff_, c_ + cutoff_}; }
  Matrix value(double x) const override {
    const double t = x - c_;
    if (std::abs(t) > cutoff_) return Matrix::Zero(1, 1);
    const double s = 1.0 / std::cosh(t);
    return Matrix::Constant(1, 1, -strength_ * s * s);
  }
  std::optional<Matrix> derivative(double x) const override {
    const double t = x - c_;
    if (std::abs(t) > cutoff_) return Matrix::Zero(1, 1);
    const double s = 1.0 / std::cosh(t);
    return Matrix::Constant(1, 1, 2.0 * strength_ * s * s * std::tanh(t));
  }
  double feature_width() const override { return 1.0; }

 private:
  double c_, strength_, cutoff_;
};

class GaussianProfile final : public Profile {
 public:
  GaussianProfile(double depth, double width, double center, int n) : depth_(depth), w_(width), c_(center), n_(n) {
    cutoff_ = width * std::sqrt(std::max(0.0, std::log(std::abs(depth) / kSupportThreshold)));
  }
  int dim() const override { return n_; }
  Interval support() const override { return {c_ - cutoff_, c_ + cutoff_}; }
  Matrix value(double x) const override {
    const double t = (x - c_) / w_;
    if (std::abs(x - c_) > cutoff_) return Matrix::Zero(n_, n_);
    return (-depth_ * std::exp(-t * t)) * identity(n_);
  }
  std::optional<Matrix> derivative(double x) const override {
    const double t = (x - c_) / w_;
    if (std::abs(x - c_) > cutoff_) return Matrix(Matrix::Zero(n_, n_));
    return Matrix((2.0 * depth_ * t / w_ * std::exp(-t * t)) * identity(n_));
  }
  double feature_width() const override { return w_; }

 private:
  double depth_, w_, c_, cutoff_;
  int n_;
};

double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

Matrix random_hermitian(std::mt19937_64& rng, int n) {
  Matrix h(n, n);
  for (int r = 0; r < n; ++r) {
    h(r, r) = uniform_pm1(rng);
    for (int c = r + 1; c < n; ++c) {
      const double re = uniform_pm1(rng);
      const double im = uniform_pm1(rng);
      h(r, c) = Complex(re, im) / std::sqrt(2.0);
      h(c, r) = std::conj(h(r, c));
    }
  }
  return h;
}

/// bump(t) = exp(1 - 1/(1 - t^2)) on |t| < 1: C-infinity with compact support.
class RandomSmoothProfile final : public Profile {
 public:
  explicit RandomSmoothProfile(const FamilySpec& s)
      : n_(s.dim), r_(s.radius), c_(s.center), depth_(s.depth), amp_(s.amplitude) {
    std::mt19937_64 rng(s.seed);
    double weight = 1.0;
    for (int m = 0; m < s.modes; ++m) {
      cos_terms_.push_back(weight * random_hermitian(rng, n_));
      sin_terms_.push_back(weight * random_hermitian(rng, n_));
      weight *= kRandomModeDecay;
    }
    modes_ = s.modes;
  }
  int dim() const override { return n_; }
  Interval support() const override { return {c_ - r_, c_ + r_}; }
  Matrix value(double x) const override {
    const double t = (x - c_) / r_;
    if (std::abs(t) >= 1.0) return Matrix::Zero(n_, n_);
    return bump(t) * series(t);
  }
  std::optional<Matrix> derivative(double x) const override {
    const double t = (x - c_) / r_;
    if (std::abs(t) >= 1.0) return Matrix(Matrix::Zero(n_, n_));
    const double b = bump(t);
    const double q = 1.0 - t * t;
    const double db = b * (-2.0 * t / (q * q));
    Matrix ds = Matrix::Zero(n_, n_);
    for (int m = 1; m < modes_; ++m) {
      const double w = m * std::numbers::pi;
      ds += amp_ * w * (-std::sin(w * t) * cos_terms_[m] + std::cos(w * t) * sin_terms_[m]);
    }
    return Matrix((db * series(t) + b * ds) / r_);
  }
  double feature_width() const override { return r_ / (2.0 * std::max(modes_, 2)); }

 private:
  static double bump(double t) { return std::exp(1.0 - 1.0 / (1.0 - t * t)); }
  Matrix series(double t) const {
    Matrix s = -depth_ * identity(n_);
    for (int m = 0; m < modes_; ++m) {
      const double w = m * std::numbers::pi;
      s += amp_ * (std::cos(w * t) * cos_terms_[m] + std::sin(w * t) * sin_terms_[m]);
    }
    return s;
  }

  int n_;
  double r_, c_, depth_, amp_;
  int modes_ = 0;
  std::vector<Matrix> cos_terms_, sin_terms_;
};

class DirectSumProfile final : public Profile {
 public:
  explicit DirectSumProfile(std::vector<std::shared_ptr<const Profile>> parts) : parts_(std::move(parts)) {
    for (const auto& p : parts_) n_ += p->dim();
  }
  int dim() const override { return n_; }
  Interval support() const override {
    Interval s = parts_.front()->support();
    for (const auto& p : parts_) {
      s.lo = std::min(s.lo, p->support().lo);
      s.hi = std::max(s.hi, p->support().hi);
    }
    return s;
  }
  Matrix value(double x) const override {
    return assemble([x](const Profile& p) { return p.value(x); });
  }
  std::optional<Matrix> derivative(double x) const override {
    for (const auto& p : parts_) {
      if (!p->derivative(x)) return std::nullopt;
    }
    return assemble([x](const Profile& p) { return *p.derivative(x); });
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> out;
    for (const auto& p : parts_) {
      auto b = p->breakpoints();
      out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  bool piecewise_constant() const override {
    return std::all_of(parts_.begin(), parts_.end(), [](const auto& p) { return p->piecewise_constant(); });
  }
  double feature_width() const override {
    double w = parts_.front()->feature_width();
    for (const auto& p : parts_) w = std::min(w, p->feature_width());
    return w;
  }
  Matrix cell_mean(double a, double b) const override {
    return assemble([a, b](const Profile& p) { return p.cell_mean(a, b); });
  }

 private:
  template <typename F>
  Matrix assemble(F&& f) const {
    Matrix out = Matrix::Zero(n_, n_);
    int off = 0;
    for (const auto& p : parts_) {
      const int k = p->dim();
      out.block(off, off, k, k) = f(*p);
      off += k;
    }
    return out;
  }

  std::vector<std::shared_ptr<const Profile>> parts_;
  int n_ = 0;
};

/// alpha * U base(x) U*; covers scaling, negation and unitary conjugation.
class TransformedProfile final : public Profile {
 public:
  TransformedProfile(std::shared_ptr<const Profile> base, double alpha, Matrix unitary)
      : base_(std::move(base)), alpha_(alpha), u_(std::move(unitary)) {}
  int dim() const override { return base_->dim(); }
  Interval support() const override { return base_->support(); }
  Matrix value(double x) const override { return apply(base_->value(x)); }
  std::optional<Matrix> derivative(double x) const override {
    auto d = base_->derivative(x);
    if (!d) return std::nullopt;
    return apply(*d);
  }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  bool piecewise_constant() const override { return base_->piecewise_constant(); }
  double feature_width() const override { return base_->feature_width(); }
  Matrix cell_mean(double a, double b) const override { return apply(base_->cell_mean(a, b)); }

 private:
  Matrix apply(const Matrix& m) const {
    Matrix out = alpha_ * (u_ * m * u_.adjoint());
    return 0.5 * (out + out.adjoint());
  }
  std::shared_ptr<const Profile> base_;
  double alpha_;
  Matrix u_;
};

/// V+ or V- of a base profile.
class PartProfile final : public Profile {
 public:
  PartProfile(std::shared_ptr<const Profile> base, Part part) : base_(std::move(base)), part_(part) {}
  int dim() const override { return base_->dim(); }
  Interval support() const override { return base_->support(); }
  Matrix value(double x) const override { return take(base_->value(x)); }
  std::vector<double> breakpoints() const override { return base_->breakpoints(); }
  bool piecewise_constant() const override { return base_->piecewise_constant(); }
  double feature_width() const override { return base_->feature_width(); }
  Matrix cell_mean(double a, double b) const override { return take(base_->cell_mean(a, b)); }

 private:
  Matrix take(const Matrix& m) const { return part_ == Part::plus ? positive_part(m) : negative_part(m); }
  std::shared_ptr<const Profile> base_;
  Part part_;
};

Interval detect_support(double start, double step, const std::vector<Matrix>& values) {
  std::size_t first = values.size(), last = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (max_entry_norm(values[i]) > kSupportThreshold) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == values.size()) {
    const double mid = start + 0.5 * step * static_cast<double>(values.size() - 1);
    return {mid, mid};
  }
  return {start + step * static_cast<double>(first), start + step * static_cast<double>(last)};
}

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

SampledPotential sample_profile(std::shared_ptr<const Profile> profile, const FamilySpec& spec, double start,
                                double step, std::size_t count) {
  std::vector<Matrix> values(count);
  std::vector<Matrix> deriv;
  bool have_deriv = profile->derivative(start).has_value();
  if (have_deriv) deriv.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double x = start + static_cast<double>(i) * step;
    values[i] = profile->value(x);
    if (have_deriv) {
      auto d = profile->derivative(x);
      if (!d) {
        have_deriv = false;
        deriv.clear();
      } else {
        deriv[i] = *d;
      }
    }
  }
  std::optional<std::vector<Matrix>> d;
  if (have_deriv) d = std::move(deriv);
  const Interval support = profile->support();
  return SampledPotential(start, step, std::move(values), support, spec, std::move(profile), std::move(d));
}

}  // namespace

std::shared_ptr<const Profile> make_profile(const FamilySpec& s) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be positive");
  };
  if (s.dim < 1) throw InvalidArgument("matrix dimension must be >= 1");
  switch (s.tag) {
    case FamilyTag::square_well:
      positive(s.half_width, "square-well half_width");
      return std::make_shared<SquareWellProfile>(s.depth, s.half_width, s.center, s.dim);
    case FamilyTag::poschl_teller:
      positive(s.nu, "poschl-teller nu");
      return std::make_shared<PoschlTellerProfile>(s.nu, s.center);
    case FamilyTag::gaussian:
      positive(s.width, "gaussian width");
      positive(std::abs(s.depth), "gaussian depth");
      return std::make_shared<GaussianProfile>(s.depth, s.width, s.center, s.dim);
    case FamilyTag::rank_one_narrow:
      positive(s.width, "rank-one-narrow width");
      return std::make_shared<RankOneProfile>(s.integral, s.width, s.center, s.dim);
    case FamilyTag::random_smooth:
      positive(s.radius, "random-smooth radius");
      if (s.modes < 1) throw InvalidArgument("random-smooth needs at least one mode");
      return std::make_shared<RandomSmoothProfile>(s);
    case FamilyTag::composite: {
      if (s.blocks.empty()) throw InvalidArgument("composite potential needs blocks");
      std::vector<std::shared_ptr<const Profile>> parts;
      for (const auto& b : s.blocks) parts.push_back(make_profile(b));
      return std::make_shared<DirectSumProfile>(std::move(parts));
    }
    case FamilyTag::samples:
      throw InvalidArgument("raw-sample potentials have no analytic profile");
  }
  throw InvalidArgument("unhandled family");
}

// ---------------------------------------------------------------------------
// SampledPotential

SampledPotential::SampledPotential(double start, double step, std::vector<Matrix> values, Interval support,
                                   FamilySpec origin, std::shared_ptr<const Profile> profile,
                                   std::optional<std::vector<Matrix>> derivative)
    : start_(start),
      step_(step),
      values_(std::move(values)),
      support_(support),
      origin_(std::move(origin)),
      profile_(std::move(profile)),
      derivative_(std::move(derivative)) {
  if (!(step_ > 0.0)) throw InvalidArgument("grid step must be positive");
  if (values_.size() < 3) throw InvalidArgument("a sampled potential needs at least 3 grid points");
  const int n = static_cast<int>(values_.front().rows());
  if (n < 1) throw InvalidArgument("matrix dimension must be >= 1");
  const Interval win = window();
  if (!win.contains(support_)) throw InvalidArgument("support must lie inside the sampled window");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const Matrix& m = values_[i];
    if (m.rows() != n || m.cols() != n) throw InvalidArgument("inconsistent matrix sizes in samples");
    if (!is_hermitian(m, 1e-12)) {
      throw InvalidArgument("sample " + std::to_string(i) + " is not Hermitian");
    }
    const double xi = x(i);
    if (!support_.contains(xi) && max_entry_norm(m) > kSupportThreshold) {
      throw InvalidArgument("sample at x=" + std::to_string(xi) + " lies outside the declared support but is nonzero");
    }
  }
  if (derivative_ && derivative_->size() != values_.size()) {
    throw InvalidArgument("derivative samples must match the value grid");
  }
}

std::vector<double> SampledPotential::breakpoints() const {
  return profile_ ? profile_->breakpoints() : std::vector<double>{};
}

Matrix SampledPotential::at(double xq) const {
  if (profile_) return profile_->value(xq);
  const Interval w = window();
  const int n = dim();
  if (xq < w.lo || xq > w.hi) return Matrix::Zero(n, n);
  const double s = (xq - start_) / step_;
  const auto count = static_cast<std::ptrdiff_t>(size());
  auto i = static_cast<std::ptrdiff_t>(std::floor(s));
  i = std::clamp<std::ptrdiff_t>(i, 0, count - 2);
  const double t = s - static_cast<double>(i);
  auto sample = [&](std::ptrdiff_t k) -> Matrix {
    if (k < 0 || k >= count) return Matrix::Zero(n, n);
    return values_[static_cast<std::size_t>(k)];
  };
  // Catmull-Rom cubic through i-1 .. i+2
  const Matrix p0 = sample(i - 1), p1 = sample(i), p2 = sample(i + 1), p3 = sample(i + 2);
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

Matrix SampledPotential::cell_mean(double a, double b) const {
  if (profile_ && !profile_->breakpoints().empty()) return profile_->cell_mean(a, b);
  return at(0.5 * (a + b));
}

SampledPotential SampledPotential::resampled(double new_step) const {
  if (!profile_) throw InvalidArgument("resampling requires an analytic profile");
  if (!(new_step > 0.0)) throw InvalidArgument("grid step must be positive");
  const double margin = support_.lo - start_;
  const double len = support_.length();
  const auto cells = std::max<long>(2, std::lround(std::ceil(len / new_step - 1e-9)));
  const double step = len > 0.0 ? len / static_cast<double>(cells) : new_step;
  const auto margin_cells = static_cast<long>(std::ceil(margin / step - 1e-9));
  const double start = support_.lo - static_cast<double>(margin_cells) * step;
  const auto count = static_cast<std::size_t>(cells + 1 + 2 * margin_cells);
  return sample_profile(profile_, origin_, start, step, count);
}

std::string SampledPotential::fingerprint() const {
  std::uint64_t h = fnv1a(&start_, sizeof start_);
  h = fnv1a(&step_, sizeof step_, h);
  for (const Matrix& m : values_) h = fnv1a(m.data(), sizeof(Complex) * static_cast<std::size_t>(m.size()), h);
  std::ostringstream os;
  os << to_string(origin_.tag) << ':' << std::hex << h;
  return os.str();
}

SampledPotential build_family(const FamilySpec& spec, const SamplingSpec& sampling) {
  auto profile = make_profile(spec);
  const Interval sup = profile->support();
  const double target =
      sampling.step > 0.0 ? sampling.step : std::min(profile->feature_width() / 16.0, sampling.max_step);
  if (profile->feature_width() / target < 8.0 - 1e-9) {
    throw InvalidArgument("grid step " + std::to_string(target) + " does not resolve the feature width " +
                          std::to_string(profile->feature_width()) + " with 8 points");
  }
  const double len = sup.length();
  const auto cells = std::max<long>(2, std::lround(std::ceil(len / target - 1e-9)));
  const double step = len / static_cast<double>(cells);
  const auto margin_cells = static_cast<long>(std::ceil(std::max(sampling.margin, 2.0 * step) / step - 1e-9));
  const double start = sup.lo - static_cast<double>(margin_cells) * step;
  const auto count = static_cast<std::size_t>(cells + 1 + 2 * margin_cells);
  return sample_profile(std::move(profile), spec, start, step, count);
}

SampledPotential from_samples(double start, double step, std::vector<Matrix> values) {
  if (values.empty()) throw InvalidArgument("no samples");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!is_hermitian(values[i], 1e-12)) throw InvalidArgument("sample " + std::to_string(i) + " is not Hermitian");
  }
  FamilySpec spec;
  spec.tag = FamilyTag::samples;
  spec.dim = static_cast<int>(values.front().rows());
  const Interval sup = detect_support(start, step, values);
  return SampledPotential(start, step, std::move(values), sup, spec);
}

namespace {

SampledPotential transform(const SampledPotential& v, double alpha, const Matrix& u) {
  std::vector<Matrix> values;
  values.reserve(v.size());
  for (const Matrix& m : v.values()) {
    Matrix t = alpha * (u * m * u.adjoint());
    values.push_back(0.5 * (t + t.adjoint()));
  }
  std::optional<std::vector<Matrix>> deriv;
  if (v.analytic_derivative()) {
    deriv.emplace();
    for (const Matrix& m : *v.analytic_derivative()) {
      Matrix t = alpha * (u * m * u.adjoint());
      deriv->push_back(0.5 * (t + t.adjoint()));
    }
  }
  std::shared_ptr<const Profile> profile;
  if (v.profile()) profile = std::make_shared<TransformedProfile>(v.profile(), alpha, u);
  return SampledPotential(v.start(), v.step(), std::move(values), v.support(), v.family(), std::move(profile),
                          std::move(deriv));
}

}  // namespace

SampledPotential scaled(const SampledPotential& v, double alpha) {
  return transform(v, alpha, Matrix::Identity(v.dim(), v.dim()));
}

SampledPotential negated(const SampledPotential& v) { return scaled(v, -1.0); }

SampledPotential conjugated(const SampledPotential& v, const Matrix& unitary) {
  const int n = v.dim();
  if (unitary.rows() != n || unitary.cols() != n ||
      max_entry_norm(unitary * unitary.adjoint() - Matrix::Identity(n, n)) > 1e-12) {
    throw InvalidArgument("conjugated: matrix is not unitary of matching size");
  }
  return transform(v, 1.0, unitary);
}

SampledPotential direct_sum(const SampledPotential& a, const SampledPotential& b) {
  if (a.start() != b.start() || a.step() != b.step() || a.size() != b.size()) {
    throw InvalidArgument("direct_sum: potentials must share a grid");
  }
  const int na = a.dim(), nb = b.dim();
  auto block = [na, nb](const Matrix& x, const Matrix& y) {
    Matrix out = Matrix::Zero(na + nb, na + nb);
    out.topLeftCorner(na, na) = x;
    out.bottomRightCorner(nb, nb) = y;
    return out;
  };
  std::vector<Matrix> values;
  for (std::size_t i = 0; i < a.size(); ++i) values.push_back(block(a[i], b[i]));
  std::optional<std::vector<Matrix>> deriv;
  if (a.analytic_derivative() && b.analytic_derivative()) {
    deriv.emplace();
    for (std::size_t i = 0; i < a.size(); ++i) deriv->push_back(block((*a.analytic_derivative())[i], (*b.analytic_derivative())[i]));
  }
  FamilySpec spec;
  spec.tag = FamilyTag::composite;
  spec.blocks = {a.family(), b.family()};
  std::shared_ptr<const Profile> profile;
  if (a.profile() && b.profile()) {
    profile = std::make_shared<DirectSumProfile>(std::vector<std::shared_ptr<const Profile>>{a.profile(), b.profile()});
  }
  const Interval sup{std::min(a.support().lo, b.support().lo), std::max(a.support().hi, b.support().hi)};
  return SampledPotential(a.start(), a.step(), std::move(values), sup, spec, std::move(profile), std::move(deriv));
}

MatrixFunctionSplit split_parts(const SampledPotential& v) {
  std::vector<Matrix> plus, minus;
  plus.reserve(v.size());
  minus.reserve(v.size());
  for (const Matrix& m : v.values()) {
    plus.push_back(positive_part(m));
    minus.push_back(negative_part(m));
  }
  std::shared_ptr<const Profile> pp, pm;
  if (v.profile()) {
    pp = std::make_shared<PartProfile>(v.profile(), Part::plus);
    pm = std::make_shared<PartProfile>(v.profile(), Part::minus);
  }
  return {SampledPotential(v.start(), v.step(), std::move(plus), v.support(), v.family(), std::move(pp)),
          SampledPotential(v.start(), v.step(), std::move(minus), v.support(), v.family(), std::move(pm))};
}

// ---------------------------------------------------------------------------
// Integrals

double trace_integral(const SampledPotential& v, const std::function<double(double)>& f) {
  auto pointwise = [&f](const Matrix& m) {
    const RealVector ev = hermitian_eigenvalues(m);
    double s = 0.0;
    for (Eigen::Index j = 0; j < ev.size(); ++j) s += f(ev(j));
    return s;
  };
  const auto bps = v.breakpoints();
  if (v.profile() && !bps.empty()) {
    // integrate each smooth piece separately so jumps sit on panel edges
    const Interval w = v.window();
    std::vector<double> cuts{w.lo};
    for (double b : bps) {
      if (b > w.lo && b < w.hi) cuts.push_back(b);
    }
    cuts.push_back(w.hi);
    double total = 0.0;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double len = cuts[s + 1] - cuts[s];
      if (len <= 0.0) continue;
      const int panels = std::max(1, static_cast<int>(std::ceil(len / v.step())));
      total += quad::composite_gauss([&](double x) { return pointwise(v.profile()->value(x)); }, cuts[s],
                                     cuts[s + 1], panels, 5);
    }
    return total;
  }
  std::vector<double> g(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) g[i] = pointwise(v[i]);
  return quad::simpson(g, v.step());
}

double trace_power_integral(const SampledPotential& v, Part part, double p) {
  if (!(p >= 0.5)) throw InvalidArgument("trace_power_integral: exponent must be >= 1/2");
  const double sign = part == Part::plus ? 1.0 : -1.0;
  return trace_integral(v, [sign, p](double mu) {
    const double s = sign * mu;
    return s > 0.0 ? std::pow(s, p) : 0.0;
  });
}

double trace_moment_integral(const SampledPotential& v, int m) {
  if (m < 1) throw InvalidArgument("trace_moment_integral: m must be >= 1");
  return trace_integral(v, [m](double mu) { return std::pow(mu, m); });
}

double derivative_square_integral(const SampledPotential& v) {
  if (v.size() < 5) throw InvalidArgument("derivative_square_integral: grid too coarse (fewer than 5 points)");
  if (!v.is_smooth()) throw InvalidArgument("derivative_square_integral: potential has jump discontinuities");
  const std::size_t n = v.size();
  std::vector<double> g(n);
  if (v.analytic_derivative()) {
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix& d = (*v.analytic_derivative())[i];
      g[i] = std::real((d * d).trace());
    }
  } else {
    const double h = v.step();
    for (std::size_t i = 0; i < n; ++i) {
      Matrix d;
      if (i >= 2 && i + 2 < n) {
        d = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
      } else if (i + 2 < n) {
        d = (-3.0 * v[i] + 4.0 * v[i + 1] - v[i + 2]) / (2.0 * h);
      } else {
        d = (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * h);
      }
      g[i] = std::real((d * d).trace());
    }
  }
  return quad::simpson(g, v.step());
}

double max_negative_eigenvalue(const SampledPotential& v) {
  double m = 0.0;
  for (const Matrix& s : v.values()) {
    const RealVector ev = hermitian_eigenvalues(s);
    m = std::max(m, -ev.minCoeff());
  }
  return m;
}

// ---------------------------------------------------------------------------
// Serialisation

json to_json(const SampledPotential& v, bool include_samples) {
  json j;
  j["schema_version"] = 1;
  j["family"] = v.family();
  j["dim"] = v.dim();
  j["grid"] = {{"start", v.start()}, {"step", v.step()}, {"count", v.size()}};
  j["support"] = {v.support().lo, v.support().hi};
  if (include_samples || !v.profile()) {
    json samples = json::array();
    for (const Matrix& m : v.values()) {
      json row = json::array();
      for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) {
          row.push_back(m(r, c).real());
          row.push_back(m(r, c).imag());
        }
      }
      samples.push_back(std::move(row));
    }
    j["samples"] = std::move(samples);
  }
  return j;
}

SampledPotential potential_from_json(const json& j) {
  if (j.value("schema_version", 0) != 1) throw InvalidArgument("potential record: unsupported schema_version");
  const auto& grid = j.at("grid");
  const double start = grid.at("start").get<double>();
  const double step = grid.at("step").get<double>();
  const auto count = grid.at("count").get<std::size_t>();
  const FamilySpec spec = j.at("family").get<FamilySpec>();
  if (j.contains("samples")) {
    const int n = j.at("dim").get<int>();
    const auto& samples = j.at("samples");
    if (samples.size() != count) throw InvalidArgument("potential record: sample count does not match grid");
    std::vector<Matrix> values;
    values.reserve(count);
    for (const auto& row : samples) {
      if (row.size() != static_cast<std::size_t>(2 * n * n)) throw InvalidArgument("potential record: bad sample row");
      Matrix m(n, n);
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
          const std::size_t k = 2 * static_cast<std::size_t>(r * n + c);
          m(r, c) = Complex(row[k].get<double>(), row[k + 1].get<double>());
        }
      }
      values.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!is_hermitian(values[i], 1e-12)) throw InvalidArgument("sample " + std::to_string(i) + " is not Hermitian");
    }
    Interval sup = detect_support(start, step, values);
    if (j.contains("support")) sup = {j["support"][0].get<double>(), j["support"][1].get<double>()};
    return SampledPotential(start, step, std::move(values), sup, spec);
  }
  auto profile = make_profile(spec);
  return sample_profile(std::move(profile), spec, start, step, count);
}

}  // namespace ltlab
