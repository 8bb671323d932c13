#include "lyapopt/metric_field.hpp"

#include "lyapopt/rng.hpp"

#include <cmath>
#include <limits>

namespace lyapopt {

namespace {

std::size_t grid_cells(int resolution, int dim) {
  std::size_t c = 1;
  for (int i = 0; i < dim; ++i) c *= static_cast<std::size_t>(resolution);
  return c;
}

// log det of an SPD matrix via Cholesky; avoids the catastrophic cancellation
// of cofactor expansion when the matrix is ill-conditioned.
double log_det_spd(const Matrix& m) {
  Eigen::LLT<Matrix> llt(spd::sym(m));
  if (llt.info() != Eigen::Success)
    throw NotPositiveDefinite("matrix not positive-definite");
  double acc = 0.0;
  const Matrix l = llt.matrixL();
  for (int i = 0; i < m.rows(); ++i) acc += std::log(l(i, i));
  return 2.0 * acc;
}

Matrix renormalize_det(const Matrix& m) {
  return m * std::exp(-log_det_spd(m) / static_cast<double>(m.rows()));
}

double trace_against(const Matrix& g, const Matrix& h) {
  return (g.inverse() * h).trace();
}

}  // namespace

TangentField::TangentField(int resolution, int dim, std::vector<Matrix> values)
    : resolution_(resolution), dim_(dim), values_(std::move(values)) {
  if (values_.size() != grid_cells(resolution, dim))
    throw DimensionMismatch("cell count does not match grid");
  for (const Matrix& v : values_) spd::check_symmetric(v);
}

TangentField TangentField::operator*(double s) const {
  std::vector<Matrix> out;
  out.reserve(values_.size());
  for (const Matrix& v : values_) out.push_back(v * s);
  return TangentField(resolution_, dim_, std::move(out));
}

MetricField::MetricField(int resolution, int dim, std::vector<Matrix> values,
                         double sample_offset)
    : resolution_(resolution),
      dim_(dim),
      sample_offset_(sample_offset),
      values_(std::move(values)) {
  if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
  if (values_.size() != grid_cells(resolution, dim))
    throw DimensionMismatch("cell count does not match grid");
  for (const Matrix& g : values_) {
    spd::check_symmetric(g);
    Eigen::SelfAdjointEigenSolver<Matrix> es(spd::sym(g));
    const Vector ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0)
      throw NotPositiveDefinite("cell Gram matrix not positive-definite");
    double log_det = 0.0;
    for (int i = 0; i < ev.size(); ++i) log_det += std::log(ev[i]);
    // The entries of an ill-conditioned matrix only pin its determinant down
    // to ~eps * cond in relative terms, so widen the tolerance accordingly.
    const double cond = ev.maxCoeff() / ev.minCoeff();
    const double tol = 1e-10 + 100.0 * std::numeric_limits<double>::epsilon() * cond;
    if (std::abs(log_det) > tol)
      throw VolumeNotPreserved("cell Gram matrix is not det-1");
  }
}

MetricField MetricField::flat(int resolution, int dim, double sample_offset) {
  return MetricField(resolution, dim,
                     std::vector<Matrix>(grid_cells(resolution, dim),
                                         Matrix::Identity(dim, dim)),
                     sample_offset);
}

double MetricField::offset_for(const TorusSystem& sys) {
  return sys.is_automorphism() ? 0.0 : 0.5;
}

TorusPoint MetricField::sample_point(std::size_t cell) const {
  Vector coords(dim_);
  std::size_t rem = cell;
  for (int i = dim_ - 1; i >= 0; --i) {
    coords[i] = (static_cast<double>(rem % resolution_) + sample_offset_) /
                resolution_;
    rem /= resolution_;
  }
  return TorusPoint(std::move(coords));
}

std::vector<std::pair<std::size_t, double>> MetricField::stencil(
    const TorusPoint& x) const {
  if (x.dim() != dim_) throw DimensionMismatch("point dim mismatch");
  const int n = resolution_;

  std::vector<int> base(dim_);
  std::vector<double> frac(dim_);
  for (int i = 0; i < dim_; ++i) {
    double u = x[i] * n - sample_offset_;
    u -= std::floor(u / n) * n;  // wrap into [0,n)
    int b = static_cast<int>(std::floor(u));
    double fr = u - b;
    // Snap to exact sample points so automorphism grids need no interpolation.
    if (fr < 1e-9) fr = 0.0;
    if (fr > 1.0 - 1e-9) {
      fr = 0.0;
      b = (b + 1) % n;
    }
    base[i] = b % n;
    frac[i] = fr;
  }

  std::vector<std::pair<std::size_t, double>> out;
  const int corners = 1 << dim_;
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int i = 0; i < dim_; ++i) {
      const int bit = (c >> i) & 1;
      w *= bit ? frac[i] : 1.0 - frac[i];
      idx = idx * n + static_cast<std::size_t>((base[i] + bit) % n);
    }
    if (w > 0.0) out.emplace_back(idx, w);
  }
  return out;
}

Matrix MetricField::evaluate(const TorusPoint& x) const {
  const auto corners = stencil(x);
  if (corners.size() == 1) return values_[corners[0].first];
  Matrix acc = Matrix::Zero(dim_, dim_);
  for (const auto& [idx, w] : corners) acc += w * spd::matrix_log(values_[idx]);
  return spd::matrix_exp(acc);
}

bool MetricField::same_grid(const MetricField& other) const {
  return resolution_ == other.resolution_ && dim_ == other.dim_ &&
         sample_offset_ == other.sample_offset_;
}

bool MetricField::same_grid(const TangentField& h) const {
  return resolution_ == h.resolution() && dim_ == h.dim();
}

MetricField pullback(const TorusSystem& sys, const MetricField& g) {
  if (sys.dim() != g.dim()) throw DimensionMismatch("system/field dim mismatch");
  std::vector<Matrix> out(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const TorusPoint x = g.sample_point(c);
    const Matrix a = sys.jacobian(x);
    if (std::abs(std::abs(a.determinant()) - 1.0) > 1e-8)
      throw VolumeNotPreserved("Jacobian determinant is not +-1");
    const Matrix target = g.evaluate(sys.apply(x));
    out[c] = renormalize_det(spd::sym(a.transpose() * target * a));
  }
  return MetricField(g.resolution(), g.dim(), std::move(out), g.sample_offset());
}

MetricField field_barycenter(const std::vector<MetricField>& fields,
                             const ToleranceProfile& tol) {
  if (fields.empty()) throw std::invalid_argument("barycenter of empty list");
  for (const MetricField& f : fields)
    if (!fields[0].same_grid(f)) throw DimensionMismatch("field grids differ");

  std::vector<Matrix> out(fields[0].cell_count());
  std::vector<Matrix> pts(fields.size());
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (std::size_t i = 0; i < fields.size(); ++i) pts[i] = fields[i][c];
    out[c] = renormalize_det(spd::barycenter(pts, tol));
  }
  return MetricField(fields[0].resolution(), fields[0].dim(), std::move(out),
                     fields[0].sample_offset());
}

MetricField geodesic_step(const MetricField& g, const TangentField& h, double t,
                          double tangency_tol) {
  if (!g.same_grid(h)) throw DimensionMismatch("field grids differ");
  std::vector<Matrix> out(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    if (std::abs(trace_against(g[c], h[c])) > tangency_tol)
      throw TangencyViolated("tangent field is not trace-free against g");
    out[c] = renormalize_det(spd::geodesic_from(g[c], h[c], t));
  }
  return MetricField(g.resolution(), g.dim(), std::move(out), g.sample_offset());
}

TangentField connecting_tangent(const MetricField& g, const MetricField& g2) {
  if (!g.same_grid(g2)) throw DimensionMismatch("field grids differ");
  std::vector<Matrix> out(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c)
    out[c] = spd::riemannian_log(g[c], g2[c]);
  return TangentField(g.resolution(), g.dim(), std::move(out));
}

double l2_distance(const MetricField& g1, const MetricField& g2,
                   const MeasureWeights& weights) {
  if (!g1.same_grid(g2)) throw DimensionMismatch("field grids differ");
  if (weights.resolution() != g1.resolution() || weights.dim() != g1.dim())
    throw DimensionMismatch("weights grid differs");
  double acc = 0.0;
  for (std::size_t c = 0; c < g1.cell_count(); ++c) {
    const double d = spd::distance(g1[c], g2[c]);
    acc += weights[c] * d * d;
  }
  return std::sqrt(acc);
}

double l2_inner(const MetricField& g, const TangentField& a,
                const TangentField& b, const MeasureWeights& weights) {
  if (!g.same_grid(a) || !g.same_grid(b))
    throw DimensionMismatch("field grids differ");
  double acc = 0.0;
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const Matrix gi = g[c].inverse();
    acc += weights[c] * (gi * a[c] * gi * b[c]).trace();
  }
  return acc;
}

MetricField bochi_sequence(const TorusSystem& sys, const MetricField& g0, int N,
                           const ToleranceProfile& tol) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  std::vector<MetricField> iterates;
  iterates.reserve(N);
  iterates.push_back(g0);
  for (int i = 1; i < N; ++i) iterates.push_back(pullback(sys, iterates.back()));
  return field_barycenter(iterates, tol);
}

MetricField random_field(int resolution, int dim, double magnitude,
                         std::uint64_t seed, double sample_offset) {
  Rng rng(seed);
  std::vector<Matrix> out(grid_cells(resolution, dim));
  for (Matrix& g : out) {
    Matrix v(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) v(i, j) = rng.uniform(-1.0, 1.0);
    v = spd::sym(v);
    v -= (v.trace() / dim) * Matrix::Identity(dim, dim);
    if (v.norm() > 0) v *= magnitude * rng.uniform() / v.norm();
    g = renormalize_det(spd::matrix_exp(v));
  }
  return MetricField(resolution, dim, std::move(out), sample_offset);
}

TangentField random_tangent(const MetricField& g, const MeasureWeights& weights,
                            std::uint64_t seed) {
  Rng rng(seed);
  const int d = g.dim();
  std::vector<Matrix> out(g.cell_count());
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    Matrix v(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v(i, j) = rng.uniform(-1.0, 1.0);
    v = spd::sym(v);
    v -= (trace_against(g[c], v) / d) * g[c];
    out[c] = v;
  }
  TangentField h(g.resolution(), d, std::move(out));
  const double norm = std::sqrt(l2_inner(g, h, h, weights));
  if (norm == 0.0) throw std::invalid_argument("degenerate random tangent");
  return h * (1.0 / norm);
}

}  // namespace lyapopt
