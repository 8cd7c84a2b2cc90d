#include "bjo/numerical_range.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace bjo {

const char* to_string(Answer answer) {
  switch (answer) {
    case Answer::Holds: return "Holds";
    case Answer::Fails: return "Fails";
    case Answer::Borderline: return "Borderline";
  }
  return "Unknown";
}

std::vector<int> EigenFrame::attained_blocks() const {
  std::vector<int> out;
  for (int k = 0; k < static_cast<int>(blocks.size()); ++k) {
    if (blocks[static_cast<std::size_t>(k)].attained) out.push_back(k);
  }
  return out;
}

EigenFrame top_eigenframe(const AlgebraElement& p, double eig_tol, double gray_tol) {
  const Spectrum spectrum = p.spectral_decomposition();
  double norm = 0.0;
  double bottom = std::numeric_limits<double>::infinity();
  for (const auto& values : spectrum.values) {
    norm = std::max(norm, values(0));
    bottom = std::min(bottom, values(values.size() - 1));
  }
  if (bottom < -eig_tol * std::max(norm, std::abs(bottom))) {
    throw Error(ErrorCode::NotPositive, "eigenframe requested for a non-positive element");
  }

  EigenFrame frame{p.algebra(), {}, norm, eig_tol, false};
  const double cut = eig_tol * norm;
  const double gray_cut = gray_tol * norm;
  for (std::size_t k = 0; k < spectrum.values.size(); ++k) {
    const auto& values = spectrum.values[k];
    const auto& vectors = spectrum.vectors[k];
    EigenFrame::Block block;
    block.top_value = values(0);
    block.attained = values(0) >= norm - cut;
    Eigen::Index d = 0;
    while (d < values.size() && values(d) >= values(0) - cut) ++d;
    block.basis = vectors.leftCols(d);
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      const double gap = norm - values(j);
      if (gap > cut && gap <= gray_cut) frame.ambiguous = true;
    }
    frame.blocks.push_back(std::move(block));
  }
  return frame;
}

std::vector<Compression> compress(const AlgebraElement& c, const EigenFrame& frame) {
  if (!(c.algebra() == frame.algebra)) {
    throw Error(ErrorCode::AlgebraMismatch, "compression against a frame of another algebra");
  }
  std::vector<Compression> out;
  for (int k : frame.attained_blocks()) {
    const Matrix& basis = frame.blocks[static_cast<std::size_t>(k)].basis;
    out.push_back({k, basis.adjoint() * c.block(k) * basis});
  }
  return out;
}

Complex rayleigh_value(const Matrix& c, const Vector& xi) {
  return xi.dot(c * xi) / xi.squaredNorm();
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// H(theta) = Re(e^{-i theta} C) = cos(theta) Re C + sin(theta) Im C.
class Pencil {
 public:
  explicit Pencil(const Matrix& c)
      : n_(c.rows()),
        re_(0.5 * (c + c.adjoint())),
        im_(Complex(0.0, -0.5) * (c - c.adjoint())),
        work_(n_, n_),
        solver_(n_) {}

  double top(double theta) const {
    const double co = std::cos(theta);
    const double si = std::sin(theta);
    if (n_ == 1) return co * re_(0, 0).real() + si * im_(0, 0).real();
    if (n_ == 2) {
      double a, d;
      Complex b;
      entries2(co, si, a, b, d);
      const double half = 0.5 * (a - d);
      return 0.5 * (a + d) + std::sqrt(half * half + std::norm(b));
    }
    work_ = co * re_ + si * im_;
    solver_.compute(work_, Eigen::EigenvaluesOnly);
    return solver_.eigenvalues()(n_ - 1);
  }

  Vector top_vector(double theta) const {
    const double co = std::cos(theta);
    const double si = std::sin(theta);
    if (n_ == 1) return Vector::Ones(1);
    if (n_ == 2) {
      double a, d;
      Complex b;
      entries2(co, si, a, b, d);
      const double half = 0.5 * (a - d);
      const double lambda = 0.5 * (a + d) + std::sqrt(half * half + std::norm(b));
      Vector v1(2), v2(2);
      v1 << b, lambda - a;
      v2 << lambda - d, std::conj(b);
      Vector v = v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
      const double len = v.norm();
      if (!(len > 0.0) || !std::isfinite(len)) {
        v << 1.0, 0.0;
        return v;
      }
      return v / len;
    }
    work_ = co * re_ + si * im_;
    solver_.compute(work_, Eigen::ComputeEigenvectors);
    return solver_.eigenvectors().col(n_ - 1);
  }

 private:
  void entries2(double co, double si, double& a, Complex& b, double& d) const {
    a = co * re_(0, 0).real() + si * im_(0, 0).real();
    d = co * re_(1, 1).real() + si * im_(1, 1).real();
    b = co * re_(0, 1) + si * im_(0, 1);
  }

  Eigen::Index n_;
  Matrix re_;
  Matrix im_;
  mutable Matrix work_;
  mutable Eigen::SelfAdjointEigenSolver<Matrix> solver_;
};

struct Sample {
  double theta = 0.0;
  double h = 0.0;
  int source = 0;
  Vector vector;
  Complex point;
};

class HullSampler {
 public:
  explicit HullSampler(std::span<const Matrix> mats) : mats_(mats) {
    pencils_.reserve(mats.size());
    for (const auto& m : mats) pencils_.emplace_back(m);
  }

  /// Support value of the union; `source` receives the argmax.
  double value(double theta, int* source = nullptr) const {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t k = 0; k < pencils_.size(); ++k) {
      const double h = pencils_[k].top(theta);
      if (h > best) {
        best = h;
        arg = static_cast<int>(k);
      }
    }
    if (source) *source = arg;
    ++evaluations;
    return best;
  }

  Sample sample(double theta) const {
    Sample s;
    s.theta = theta;
    s.h = value(theta, &s.source);
    complete(s);
    return s;
  }

  void complete(Sample& s) const {
    s.vector = pencils_[static_cast<std::size_t>(s.source)].top_vector(s.theta);
    s.point = rayleigh_value(mats_[static_cast<std::size_t>(s.source)], s.vector);
  }

  const Matrix& matrix(int k) const { return mats_[static_cast<std::size_t>(k)]; }

  mutable int evaluations = 0;

 private:
  std::span<const Matrix> mats_;
  std::vector<Pencil> pencils_;
};

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

/// Nearest point of segment [a, b] to 0, as the parameter t in [0, 1].
double nearest_on_segment(Complex a, Complex b) {
  const Complex d = b - a;
  const double len2 = std::norm(d);
  if (len2 == 0.0) return 0.0;
  const double t = -(a.real() * d.real() + a.imag() * d.imag()) / len2;
  return std::clamp(t, 0.0, 1.0);
}

/// Position of 0 relative to the convex hull of the sample points.
struct PolygonFit {
  double signed_distance = -std::numeric_limits<double>::infinity();  // >= 0 inside
  std::vector<std::pair<std::size_t, double>> combination;  // sample index, weight
  Complex point;                                            // sum of weight * point
};

PolygonFit fit_polygon(const std::vector<Sample>& samples, double merge_radius) {
  std::vector<std::size_t> sorted(samples.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) sorted[i] = i;
  auto pt = [&](std::size_t i) { return samples[i].point; };
  std::sort(sorted.begin(), sorted.end(), [&](std::size_t i, std::size_t j) {
    const Complex a = pt(i), b = pt(j);
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  // Many directions share one exposed point (a vertex of W); rounding
  // scatters the copies, and the edges between them have no meaningful
  // orientation. Keep one representative per cluster.
  std::vector<std::size_t> order;
  order.reserve(sorted.size());
  for (std::size_t i : sorted) {
    bool duplicate = false;
    for (auto it = order.rbegin(); it != order.rend() && pt(*it).real() >= pt(i).real() - merge_radius; ++it) {
      if (std::abs(pt(*it) - pt(i)) <= merge_radius) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) order.push_back(i);
  }

  // Andrew's monotone chain, counter-clockwise, collinear points dropped.
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t i : order) {
    while (k >= 2 && cross(pt(hull[k - 1]) - pt(hull[k - 2]), pt(i) - pt(hull[k - 2])) <= 0.0) --k;
    hull[k++] = i;
  }
  for (std::size_t t = order.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t i = order[t];
    while (k >= lower && cross(pt(hull[k - 1]) - pt(hull[k - 2]), pt(i) - pt(hull[k - 2])) <= 0.0) --k;
    hull[k++] = i;
  }
  hull.resize(k > 1 ? k - 1 : k);
  // Duplicate points can leave a 2-cycle of identical vertices.
  if (hull.size() == 2 && pt(hull[0]) == pt(hull[1])) hull.resize(1);

  PolygonFit fit;
  if (hull.size() == 1) {
    fit.signed_distance = -std::abs(pt(hull[0]));
    fit.combination = {{hull[0], 1.0}};
    fit.point = pt(hull[0]);
    return fit;
  }

  auto nearest_edge = [&](std::size_t count, bool closed) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < (closed ? count : count - 1); ++e) {
      const std::size_t i = hull[e], j = hull[(e + 1) % count];
      const double t = nearest_on_segment(pt(i), pt(j));
      const Complex q = (1.0 - t) * pt(i) + t * pt(j);
      if (std::abs(q) < best) {
        best = std::abs(q);
        fit.signed_distance = -best;
        fit.combination = {{i, 1.0 - t}, {j, t}};
        fit.point = q;
      }
    }
  };

  if (hull.size() == 2) {
    nearest_edge(2, false);
    return fit;
  }

  const std::size_t n = hull.size();
  bool inside = true;
  double inner = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < n; ++e) {
    const Complex a = pt(hull[e]), b = pt(hull[(e + 1) % n]);
    const double c = cross(b - a, -a);
    if (c < 0.0) {
      inside = false;
      break;
    }
    inner = std::min(inner, c / std::abs(b - a));
  }
  if (!inside) {
    nearest_edge(n, true);
    return fit;
  }

  fit.signed_distance = inner;
  fit.point = 0.0;
  // Fan triangulation from hull[0].
  const Complex a = pt(hull[0]);
  double best_min_weight = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 1; t + 1 < n; ++t) {
    const Complex b = pt(hull[t]), c = pt(hull[t + 1]);
    const double area = cross(b - a, c - a);
    if (area <= 0.0) continue;
    double wa = cross(b, c) / area;
    double wb = cross(c, a) / area;
    double wc = cross(a, b) / area;
    const double lowest = std::min({wa, wb, wc});
    if (lowest > best_min_weight) {
      best_min_weight = lowest;
      wa = std::max(wa, 0.0);
      wb = std::max(wb, 0.0);
      wc = std::max(wc, 0.0);
      const double total = wa + wb + wc;
      fit.combination = {{hull[0], wa / total}, {hull[t], wb / total}, {hull[t + 1], wc / total}};
      fit.point = (wa * a + wb * b + wc * c) / total;
    }
  }
  return fit;
}

/// Merges a convex combination of range points into at most one vector per
/// source matrix.
RangeWitness build_witness(const HullSampler& sampler, const std::vector<Sample>& samples,
                           const PolygonFit& fit) {
  struct Partial {
    int source;
    double weight;
    Vector vector;
  };
  std::vector<Partial> merged;
  for (const auto& [index, weight] : fit.combination) {
    if (!(weight > 1e-15)) continue;
    const Sample& s = samples[index];
    auto it = std::find_if(merged.begin(), merged.end(),
                           [&](const Partial& p) { return p.source == s.source; });
    if (it == merged.end()) {
      merged.push_back({s.source, weight, s.vector});
      continue;
    }
    const double total = it->weight + weight;
    it->vector = reduce_on_segment(sampler.matrix(s.source), it->vector, s.vector, weight / total);
    it->weight = total;
  }
  double total = 0.0;
  for (const auto& p : merged) total += p.weight;

  RangeWitness witness;
  witness.value = 0.0;
  for (auto& p : merged) {
    const double w = p.weight / total;
    witness.value += w * rayleigh_value(sampler.matrix(p.source), p.vector);
    witness.terms.push_back({p.source, w, std::move(p.vector)});
  }
  return witness;
}

struct CoreResult {
  CertifiedBool certificate;
  std::optional<RangeWitness> witness;
};

CoreResult certify(std::span<const Matrix> mats, double tol, const RangeOptions& options) {
  double lipschitz = 0.0;
  for (const auto& m : mats) lipschitz = std::max(lipschitz, spectral_norm(m));

  CoreResult result;
  CertifiedBool& cert = result.certificate;
  if (lipschitz == 0.0) {
    cert.answer = Answer::Holds;
    cert.margin = tol;
    RangeWitness w;
    w.terms.push_back({0, 1.0, Vector::Unit(mats[0].rows(), 0)});
    w.value = 0.0;
    result.witness = std::move(w);
    return result;
  }

  HullSampler sampler(mats);
  const int grid = std::max(options.grid_points, 8);
  const double spacing = kTwoPi / grid;
  const double min_width = spacing / std::ldexp(1.0, options.max_depth);

  std::vector<Sample> samples(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    Sample& s = samples[static_cast<std::size_t>(i)];
    s.theta = spacing * i;
    s.h = sampler.value(s.theta, &s.source);
  }

  auto lipschitz_bound = [&](std::size_t i, double* width = nullptr) {
    const Sample& a = samples[i];
    const Sample& b = samples[(i + 1) % samples.size()];
    double w = b.theta - a.theta;
    if (w <= 0.0) w += kTwoPi;
    if (width) *width = w;
    return 0.5 * (a.h + b.h) - 0.5 * lipschitz * w;
  };
  auto lipschitz_lower = [&]() {
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples.size(); ++i) lo = std::min(lo, lipschitz_bound(i));
    return lo;
  };
  auto record_min = [&]() {
    cert.min_upper = std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
      if (s.h < cert.min_upper) {
        cert.min_upper = s.h;
        cert.argmin_theta = s.theta;
      }
    }
  };

  auto fail = [&]() {
    // Tighten the separating direction locally; only the margin changes.
    double lo = cert.argmin_theta - spacing, hi = cert.argmin_theta + spacing;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
    double f1 = sampler.value(x1), f2 = sampler.value(x2);
    for (int it = 0; it < 40; ++it) {
      if (f1 < f2) {
        hi = x2, x2 = x1, f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = sampler.value(x1);
      } else {
        lo = x1, x1 = x2, f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = sampler.value(x2);
      }
    }
    for (auto [t, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
      if (f < cert.min_upper) {
        cert.min_upper = f;
        cert.argmin_theta = std::fmod(t + kTwoPi, kTwoPi);
      }
    }
    cert.answer = Answer::Fails;
    cert.margin = -cert.min_upper;
    cert.min_lower = std::min(lipschitz_lower(), cert.min_upper);
    cert.evaluations = sampler.evaluations;
    return result;
  };

  record_min();
  cert.lipschitz_slack = 0.5 * lipschitz * spacing;
  if (cert.min_upper < -tol) return fail();

  for (auto& s : samples) sampler.complete(s);

  const double accept = tol + 64.0 * std::numeric_limits<double>::epsilon() * lipschitz;
  constexpr int kMaxEvaluations = 200000;
  for (int depth = 0;; ++depth) {
    const PolygonFit fit = fit_polygon(samples, 1e-12 * lipschitz);
    const double lip_lower = lipschitz_lower();
    cert.min_lower = std::max(lip_lower, std::min(fit.signed_distance, cert.min_upper));
    if (fit.signed_distance >= -tol) {
      RangeWitness witness = build_witness(sampler, samples, fit);
      if (std::abs(witness.value) <= accept) {
        cert.answer = Answer::Holds;
        cert.margin = cert.min_lower + tol;
        cert.evaluations = sampler.evaluations;
        result.witness = std::move(witness);
        return result;
      }
    }
    if (depth >= options.max_depth || sampler.evaluations > kMaxEvaluations) break;

    // Cells to split: those the Lipschitz bound cannot certify, and those
    // spanning the polygon feature nearest to 0.
    std::vector<char> split(samples.size(), 0);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double width = 0.0;
      if (lipschitz_bound(i, &width) < -tol && width > 2.0 * min_width) split[i] = 1;
    }
    if (fit.combination.size() >= 2) {
      std::size_t lo = samples.size(), hi = 0;
      for (const auto& term : fit.combination) {
        lo = std::min(lo, term.first);
        hi = std::max(hi, term.first);
      }
      // Mark the shorter angular arc between the extreme vertices; long arcs
      // only get their end cells split.
      const std::size_t count = samples.size();
      const std::size_t forward = hi - lo;
      const std::size_t start = forward <= count - forward ? lo : hi;
      const std::size_t length = std::min(forward, count - forward);
      for (std::size_t j = 0; j < length; ++j) {
        if (length > 8 && j > 0 && j + 1 < length) continue;
        split[(start + j) % count] = 1;
      }
    } else if (!fit.combination.empty()) {
      const std::size_t i = fit.combination.front().first;
      split[i] = 1;
      split[(i + samples.size() - 1) % samples.size()] = 1;
    }

    std::vector<Sample> refined;
    refined.reserve(samples.size() * 2);
    bool added = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      refined.push_back(samples[i]);
      if (!split[i]) continue;
      double width = 0.0;
      lipschitz_bound(i, &width);
      if (width <= 2.0 * min_width) continue;
      refined.push_back(sampler.sample(samples[i].theta + 0.5 * width));
      if (refined.back().theta >= kTwoPi) refined.back().theta -= kTwoPi;
      added = true;
    }
    std::sort(refined.begin(), refined.end(),
              [](const Sample& a, const Sample& b) { return a.theta < b.theta; });
    samples = std::move(refined);
    record_min();
    if (cert.min_upper < -tol) return fail();
    if (!added) break;
  }

  cert.answer = Answer::Borderline;
  cert.margin = 0.0;
  cert.lipschitz_slack = 0.5 * lipschitz * min_width;
  cert.evaluations = sampler.evaluations;
  return result;
}

}  // namespace

double support_function(const Matrix& c, double theta) {
  if (c.rows() != c.cols() || c.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "support function needs a nonempty square matrix");
  }
  return Pencil(c).top(theta);
}

Vector reduce_on_segment(const Matrix& c, const Vector& u1_in, const Vector& u2_in, double s) {
  const Vector u1 = u1_in.normalized();
  const Vector u2 = u2_in.normalized();
  const Complex z1 = rayleigh_value(c, u1);
  const Complex z2 = rayleigh_value(c, u2);
  const double d = std::abs(z2 - z1);
  const double scale = std::max(spectral_norm(c), 1e-300);
  if (d <= 1e-14 * scale) return s < 0.5 ? u1 : u2;

  // Shift and rotate so that z1 -> 0 and z2 -> d on the positive real axis.
  const Complex rot = std::conj(z2 - z1) / d;
  const Matrix shifted = rot * (c - z1 * Matrix::Identity(c.rows(), c.cols()));
  const Complex a = u1.dot(shifted * u2);
  const Complex b = u2.dot(shifted * u1);
  const Complex skew = a - std::conj(b);
  const Complex phase = std::abs(skew) > 0.0 ? std::conj(skew) / std::abs(skew) : Complex(1.0);
  const Vector u2p = phase * u2;

  // Along xi(t) = cos t u1 + e^{i phi} sin t u2 the shifted value stays real.
  auto path = [&](double t) -> Vector { return std::cos(t) * u1 + std::sin(t) * u2p; };
  auto residual = [&](double t) {
    const Vector xi = path(t);
    return rayleigh_value(shifted, xi).real() - s * d;
  };
  double lo = 0.0, hi = 0.5 * std::numbers::pi;
  if (residual(lo) >= 0.0) return u1;
  if (residual(hi) <= 0.0) return u2p;
  for (int it = 0; it < 100 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return path(0.5 * (lo + hi)).normalized();
}

ZeroMembership contains_zero(std::span<const Matrix> compressions, RangeMode mode, double tol,
                             const RangeOptions& options) {
  if (compressions.empty()) throw Error(ErrorCode::EmptyInput, "contains_zero needs at least one matrix");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  for (const auto& m : compressions) {
    if (m.rows() != m.cols() || m.rows() == 0) {
      throw Error(ErrorCode::InvalidArgument, "compressions must be nonempty square matrices");
    }
  }

  ZeroMembership out;
  if (mode == RangeMode::Hull) {
    CoreResult core = certify(compressions, tol, options);
    out.certificate = core.certificate;
    out.witness = std::move(core.witness);
    return out;
  }

  bool any_borderline = false;
  double fail_margin = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> holds_at;
  for (std::size_t k = 0; k < compressions.size(); ++k) {
    CoreResult core = certify(compressions.subspan(k, 1), tol, options);
    out.per_matrix.push_back(core.certificate);
    if (core.certificate.answer == Answer::Holds && !holds_at) {
      holds_at = k;
      out.certificate = core.certificate;
      out.witness = std::move(core.witness);
      for (auto& term : out.witness->terms) term.source = static_cast<int>(k);
    } else if (core.certificate.answer == Answer::Borderline) {
      any_borderline = true;
    } else if (core.certificate.answer == Answer::Fails) {
      fail_margin = std::min(fail_margin, core.certificate.margin);
    }
  }
  if (holds_at) return out;
  if (any_borderline) {
    for (const auto& c : out.per_matrix) {
      if (c.answer == Answer::Borderline) out.certificate = c;
    }
    return out;
  }
  // Every matrix fails: report the weakest separation.
  for (const auto& c : out.per_matrix) {
    if (c.margin == fail_margin) {
      out.certificate = c;
      break;
    }
  }
  return out;
}

KernelSearch kernel_vector_in_frame(const AlgebraElement& c, const EigenFrame& frame, double tol) {
  if (!(c.algebra() == frame.algebra)) {
    throw Error(ErrorCode::AlgebraMismatch, "kernel search against a frame of another algebra");
  }
  KernelSearch out;
  out.sigma_min = std::numeric_limits<double>::infinity();
  for (int k : frame.attained_blocks()) {
    const Matrix& basis = frame.blocks[static_cast<std::size_t>(k)].basis;
    const Matrix m = c.block(k).adjoint() * basis;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const auto d = svd.singularValues().size();
    const double sigma = svd.singularValues()(d - 1);
    out.per_block.push_back(sigma);
    if (sigma < out.sigma_min) {
      out.sigma_min = sigma;
      if (sigma <= tol) {
        Vector xi = basis * svd.matrixV().col(d - 1);
        out.witness = PureState(k, xi.normalized());
      } else {
        out.witness.reset();
      }
    }
  }
  return out;
}

}  // namespace bjo
