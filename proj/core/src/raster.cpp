#include "perronlab/raster.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "perronlab/parallel.hpp"

namespace perronlab {

namespace {

constexpr double kFractional = 1e-10;  // coverage within this of 0 or 1 is treated as exact

bool fractional(double c) { return c > kFractional && c < 1.0 - kFractional; }

void require_inside(const Box& window, const Box& b, const char* who) {
  const double tol = 1e-9 * std::max(window.width(), window.height());
  if (!window.contains(b, tol)) throw std::invalid_argument(std::string(who) + ": shape extends outside the window");
}

// int_{ya}^{yb} max(0, x - e(y)) dy for e linear from ea to eb over height h.
double ramp_integral(double ea, double eb, double x, double h) {
  const double lo = std::min(ea, eb);
  const double hi = std::max(ea, eb);
  if (x <= lo) return 0.0;
  if (x >= hi) return h * (x - 0.5 * (ea + eb));
  return 0.5 * h * (x - lo) * (x - lo) / (hi - lo);
}

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffer {
  fftw_complex* data = nullptr;
  std::size_t n = 0;
  FftBuffer() = default;
  explicit FftBuffer(std::size_t size) : data(fftw_alloc_complex(size)), n(size) {
    if (!data) throw std::bad_alloc();
  }
  FftBuffer(FftBuffer&& o) noexcept : data(o.data), n(o.n) { o.data = nullptr; }
  FftBuffer& operator=(FftBuffer&& o) noexcept {
    std::swap(data, o.data);
    std::swap(n, o.n);
    return *this;
  }
  ~FftBuffer() {
    if (data) fftw_free(data);
  }
  std::complex<double>* c() { return reinterpret_cast<std::complex<double>*>(data); }
  const std::complex<double>* c() const { return reinterpret_cast<const std::complex<double>*>(data); }
};

struct Kernel {
  int mx_lo = 0, mx_hi = 0, my_lo = 0, my_hi = 0;
  std::vector<double> cov;  // row-major over the offset box
  double area = 0.0;
  std::size_t cells = 0;    // cells with positive coverage
};

Kernel make_kernel(const RasterGrid& grid, const Rect& r) {
  const double dx = grid.dx();
  const double dy = grid.dy();
  const Box b = r.bounding_box();
  Kernel k;
  k.mx_lo = static_cast<int>(std::floor(b.x0 / dx + 0.5));
  k.mx_hi = static_cast<int>(std::ceil(b.x1 / dx - 0.5));
  k.my_lo = static_cast<int>(std::floor(b.y0 / dy + 0.5));
  k.my_hi = static_cast<int>(std::ceil(b.y1 / dy - 0.5));
  RasterGrid local;
  local.window = {(k.mx_lo - 0.5) * dx, (k.my_lo - 0.5) * dy, (k.mx_hi + 0.5) * dx, (k.my_hi + 0.5) * dy};
  local.n_cols = k.mx_hi - k.mx_lo + 1;
  local.n_rows = k.my_hi - k.my_lo + 1;
  k.cov = exact_coverage(to_slab_pieces(r.polygon()), local);
  k.area = r.area();
  k.cells = static_cast<std::size_t>(std::count_if(k.cov.begin(), k.cov.end(), [](double v) { return v > 0.0; }));
  return k;
}

}  // namespace

std::pair<int, int> RasterGrid::cell_of(Vec2 p) const {
  const int c = static_cast<int>(std::floor((p.x - window.x0) / dx()));
  const int r = static_cast<int>(std::floor((p.y - window.y0) / dy()));
  return {std::clamp(c, 0, n_cols - 1), std::clamp(r, 0, n_rows - 1)};
}

RasterField RasterField::zeros(const RasterGrid& grid) {
  RasterField f;
  f.grid = grid;
  f.values.assign(grid.size(), 0.0);
  return f;
}

double RasterField::mass() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cell_area();
}

double RasterField::lp_norm_p(double p) const {
  double s = 0.0;
  for (double v : values) s += std::pow(std::fabs(v), p);
  return s * grid.cell_area();
}

RasterField RasterField::scaled(double t) const {
  RasterField out = *this;
  for (double& v : out.values) v *= t;
  for (double& v : out.osc) v *= std::fabs(t);
  for (double& v : out.err) v *= std::fabs(t);
  out.mass_err *= std::fabs(t);
  return out;
}

double cell_width(const RasterGrid& grid, const Rect& r) {
  const auto c = r.corners();
  const Vec2 s1{(c[1].x - c[0].x) / grid.dx(), (c[1].y - c[0].y) / grid.dy()};
  const Vec2 s2{(c[3].x - c[0].x) / grid.dx(), (c[3].y - c[0].y) / grid.dy()};
  return std::fabs(cross(s1, s2)) / std::max(norm(s1), norm(s2));
}

void check_resolution(const RasterGrid& grid, std::span<const Rect> rects) {
  for (std::size_t k = 0; k < rects.size(); ++k) {
    const double w = cell_width(grid, rects[k]);
    if (w < kMinCellWidth) {
      std::ostringstream msg;
      msg << "resolution too coarse: rectangle " << k << " is " << w << " cells wide (need "
          << kMinCellWidth << ")";
      if (const auto rows = rows_for_guard(grid.window, grid.n_cols, rects)) {
        msg << "; use at least " << *rows << " rows at " << grid.n_cols << " columns";
      } else {
        msg << "; increase the column count";
      }
      throw ResolutionError(msg.str());
    }
  }
}

std::optional<int> rows_for_guard(const Box& window, int n_cols, std::span<const Rect> rects) {
  const double dx = window.width() / n_cols;
  const double g = kMinCellWidth * (1.0 + 1e-9);
  double dy = window.height();
  for (const Rect& r : rects) {
    // Width across a side pair with unit normal n is w / |(dx n.x, dy n.y)|.
    const std::pair<Vec2, double> strips[] = {{r.short_axis(), r.width()}, {r.long_axis(), r.length()}};
    for (const auto& [n, w] : strips) {
      const double budget = (w / g) * (w / g) - (dx * n.x) * (dx * n.x);
      if (budget <= 0.0) return std::nullopt;
      if (std::fabs(n.y) > 1e-15) dy = std::min(dy, std::sqrt(budget) / std::fabs(n.y));
    }
  }
  return std::max(1, static_cast<int>(std::ceil(window.height() / dy)));
}

int fft_size(int n) {
  for (int m = std::max(n, 1);; ++m) {
    int r = m;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

std::vector<double> exact_coverage(std::span<const SlabPiece> pieces, const RasterGrid& grid) {
  std::vector<double> cov(grid.size(), 0.0);
  const double x0 = grid.window.x0;
  const double y0 = grid.window.y0;
  const double dx = grid.dx();
  const double dy = grid.dy();
  const double inv_area = 1.0 / grid.cell_area();
  for (const SlabPiece& p : pieces) {
    if (!(p.y_hi > p.y_lo)) continue;
    require_inside(grid.window,
                   {std::min(p.left_lo, p.left_hi), p.y_lo, std::max(p.right_lo, p.right_hi), p.y_hi},
                   "exact_coverage");
    const int r_lo = std::max(0, static_cast<int>(std::floor((p.y_lo - y0) / dy)));
    const int r_hi = std::min(grid.n_rows - 1, static_cast<int>(std::ceil((p.y_hi - y0) / dy)) - 1);
    for (int r = r_lo; r <= r_hi; ++r) {
      const double ya = std::max(p.y_lo, y0 + r * dy);
      const double yb = std::min(p.y_hi, y0 + (r + 1) * dy);
      if (!(yb > ya)) continue;
      const double h = yb - ya;
      const double la = p.left_at(ya), lb = p.left_at(yb);
      const double ra = p.right_at(ya), rb = p.right_at(yb);
      const int c_lo = std::max(0, static_cast<int>(std::floor((std::min(la, lb) - x0) / dx)));
      const int c_hi = std::min(grid.n_cols - 1, static_cast<int>(std::floor((std::max(ra, rb) - x0) / dx)));
      for (int c = c_lo; c <= c_hi; ++c) {
        // Local coordinates keep the differences well conditioned.
        const double xl = x0 + c * dx;
        const double a = (ramp_integral(la - xl, lb - xl, dx, h) - ramp_integral(la - xl, lb - xl, 0.0, h)) -
                         (ramp_integral(ra - xl, rb - xl, dx, h) - ramp_integral(ra - xl, rb - xl, 0.0, h));
        if (a > 0.0) cov[grid.index(c, r)] += a * inv_area;
      }
    }
  }
  for (double& v : cov) v = std::min(v, 1.0);
  return cov;
}

RasterField simple_function_field(const RasterGrid& grid, std::span<const ConvexPolygon> sets,
                                  std::span<const double> coeffs) {
  if (sets.size() != coeffs.size()) throw std::invalid_argument("simple_function_field: size mismatch");
  RasterField f = RasterField::zeros(grid);
  f.osc.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const auto cov = exact_coverage(to_slab_pieces(sets[i]), grid);
    for (std::size_t j = 0; j < cov.size(); ++j) {
      if (cov[j] == 0.0) continue;
      f.values[j] += coeffs[i] * cov[j];
      if (fractional(cov[j])) f.osc[j] += std::fabs(coeffs[i]);
    }
  }
  return f;
}

RasterField indicator_field(const RasterGrid& grid, std::span<const ConvexPolygon> disjoint) {
  std::vector<SlabPiece> pieces;
  for (const auto& p : disjoint) {
    const auto s = to_slab_pieces(p);
    pieces.insert(pieces.end(), s.begin(), s.end());
  }
  RasterField f;
  f.grid = grid;
  f.values = exact_coverage(pieces, grid);
  f.osc.assign(grid.size(), 0.0);
  for (std::size_t j = 0; j < f.values.size(); ++j) f.osc[j] = fractional(f.values[j]) ? 1.0 : 0.0;
  return f;
}

RasterField rasterize(std::span<const ConvexPolygon> polys, const Box& window, int resolution) {
  if (resolution < 1) throw std::invalid_argument("rasterize: resolution must be positive");
  RasterGrid grid{window, resolution, resolution};
  RasterField f = RasterField::zeros(grid);
  f.exact = false;
  f.osc.assign(grid.size(), 0.0);
  if (polys.empty()) return f;
  std::vector<Box> boxes;
  double boundary = 0.0;
  for (const auto& p : polys) {
    boxes.push_back(p.bounding_box());
    require_inside(window, boxes.back(), "rasterize");
    boundary += p.perimeter();
  }
  const double dx = grid.dx();
  const double dy = grid.dy();

  parallel_for(static_cast<std::size_t>(grid.n_rows), [&](std::size_t rr) {
    const int r = static_cast<int>(rr);
    std::vector<int> count(static_cast<std::size_t>(grid.n_cols), 0);
    std::vector<std::pair<double, double>> spans;
    for (int sy = 0; sy < 4; ++sy) {
      const double y = window.y0 + (r + (sy + 0.5) / 4.0) * dy;
      spans.clear();
      for (std::size_t i = 0; i < polys.size(); ++i) {
        if (y < boxes[i].y0 || y > boxes[i].y1) continue;
        if (const auto s = horizontal_slice(polys[i], y)) spans.push_back(*s);
      }
      for (const auto& [a, b] : spans) {
        // Sub-column centres x_m = x0 + (m + 0.5) dx/4 inside [a, b].
        const double q = 4.0 / dx;
        const long m_lo = std::max(0L, static_cast<long>(std::ceil((a - window.x0) * q - 0.5)));
        const long m_hi = std::min(4L * grid.n_cols - 1, static_cast<long>(std::floor((b - window.x0) * q - 0.5)));
        // Overlapping spans must not double count; mark sub-samples first.
        for (long m = m_lo; m <= m_hi; ++m) count[static_cast<std::size_t>(m / 4)] |= 1 << (sy * 4 + m % 4);
      }
    }
    for (int c = 0; c < grid.n_cols; ++c) {
      f.values[grid.index(c, r)] = std::popcount(static_cast<unsigned>(count[static_cast<std::size_t>(c)])) / 16.0;
    }
  });

  // Cells touched by an edge: per row band, the x-range of the clipped edge.
  for (const auto& p : polys) {
    const auto v = p.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Vec2 a = v[i];
      const Vec2 b = v[(i + 1) % v.size()];
      const double ylo = std::min(a.y, b.y), yhi = std::max(a.y, b.y);
      const int r_lo = std::max(0, static_cast<int>(std::floor((ylo - window.y0) / dy)));
      const int r_hi = std::min(grid.n_rows - 1, static_cast<int>(std::floor((yhi - window.y0) / dy)));
      for (int r = r_lo; r <= r_hi; ++r) {
        double xa = a.x, xb = b.x;
        if (yhi > ylo) {
          const double ya = std::max(ylo, window.y0 + r * dy);
          const double yb = std::min(yhi, window.y0 + (r + 1) * dy);
          xa = a.x + (b.x - a.x) * (ya - a.y) / (b.y - a.y);
          xb = a.x + (b.x - a.x) * (yb - a.y) / (b.y - a.y);
        }
        const int c_lo = std::max(0, static_cast<int>(std::floor((std::min(xa, xb) - window.x0) / dx)));
        const int c_hi = std::min(grid.n_cols - 1, static_cast<int>(std::floor((std::max(xa, xb) - window.x0) / dx)));
        for (int c = c_lo; c <= c_hi; ++c) f.osc[grid.index(c, r)] = 1.0;
      }
    }
  }
  f.mass_err = boundary * std::hypot(dx, dy);
  return f;
}

struct MaximalOperator::Impl {
  RasterGrid grid;
  std::vector<Rect> rects;
  std::vector<Kernel> kernels;
  std::array<int, 4> support{};  // c0, c1, r0, r1
  int nx = 0, ny = 0;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::vector<FftBuffer> cached;  // spectra of cov + i frac(cov), for exact inputs

  std::size_t n() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t neg(std::size_t idx) const {
    const std::size_t r = idx / nx, c = idx % nx;
    return ((ny - r) % ny) * nx + (nx - c) % nx;
  }

  // Spectrum of cov + i w, where w is the error weight of each kernel cell.
  FftBuffer kernel_spectrum(std::size_t k, bool exact_input) const {
    const Kernel& ker = kernels[k];
    FftBuffer buf(n());
    std::fill(buf.c(), buf.c() + n(), std::complex<double>{});
    const int w = ker.mx_hi - ker.mx_lo + 1;
    for (int my = ker.my_lo; my <= ker.my_hi; ++my) {
      for (int mx = ker.mx_lo; mx <= ker.mx_hi; ++mx) {
        const double c = ker.cov[static_cast<std::size_t>(my - ker.my_lo) * w + (mx - ker.mx_lo)];
        if (c == 0.0) continue;
        const double e = exact_input ? (fractional(c) ? 0.25 : 0.0) : c;
        const std::size_t idx = static_cast<std::size_t>((my % ny + ny) % ny) * nx + (mx % nx + nx) % nx;
        buf.c()[idx] = {c, e};
      }
    }
    FftBuffer out(n());
    fftw_execute_dft(fwd, buf.data, out.data);
    return out;
  }
};

MaximalOperator::MaximalOperator(const RasterGrid& grid, std::vector<Rect> rects, bool cache_kernels,
                                 std::optional<std::array<int, 4>> support)
    : impl_(std::make_unique<Impl>()) {
  if (rects.empty()) throw std::invalid_argument("MaximalOperator: no rectangles");
  if (grid.n_cols < 1 || grid.n_rows < 1) throw std::invalid_argument("MaximalOperator: empty grid");
  check_resolution(grid, rects);
  Impl& m = *impl_;
  m.grid = grid;
  m.rects = std::move(rects);
  m.support = support.value_or(std::array<int, 4>{0, grid.n_cols - 1, 0, grid.n_rows - 1});
  m.kernels.resize(m.rects.size());
  parallel_for(m.rects.size(), [&](std::size_t k) { m.kernels[k] = make_kernel(grid, m.rects[k]); });

  int mx_lo = 0, mx_hi = 0, my_lo = 0, my_hi = 0;
  for (const Kernel& k : m.kernels) {
    mx_lo = std::min(mx_lo, k.mx_lo);
    mx_hi = std::max(mx_hi, k.mx_hi);
    my_lo = std::min(my_lo, k.my_lo);
    my_hi = std::max(my_hi, k.my_hi);
  }
  const auto& s = m.support;
  // Linear correlation on the grid: wrapped indices must miss the support.
  m.nx = fft_size(std::max({grid.n_cols, grid.n_cols + mx_hi - s[0], s[1] - mx_lo + 1, mx_hi - mx_lo + 1}));
  m.ny = fft_size(std::max({grid.n_rows, grid.n_rows + my_hi - s[2], s[3] - my_lo + 1, my_hi - my_lo + 1}));

  {
    std::lock_guard lock(planner_mutex());
    FftBuffer a(m.n()), b(m.n());
    m.fwd = fftw_plan_dft_2d(m.ny, m.nx, a.data, b.data, FFTW_FORWARD, FFTW_ESTIMATE);
    m.inv = fftw_plan_dft_2d(m.ny, m.nx, a.data, b.data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (cache_kernels) {
    for (std::size_t k = 0; k < m.kernels.size(); ++k) m.cached.push_back(m.kernel_spectrum(k, true));
  }
}

MaximalOperator::~MaximalOperator() {
  if (!impl_) return;
  std::lock_guard lock(planner_mutex());
  if (impl_->fwd) fftw_destroy_plan(impl_->fwd);
  if (impl_->inv) fftw_destroy_plan(impl_->inv);
}

MaximalOperator::MaximalOperator(MaximalOperator&&) noexcept = default;
MaximalOperator& MaximalOperator::operator=(MaximalOperator&&) noexcept = default;

const RasterGrid& MaximalOperator::grid() const { return impl_->grid; }
std::span<const Rect> MaximalOperator::rects() const { return impl_->rects; }
int MaximalOperator::padded_cols() const { return impl_->nx; }
int MaximalOperator::padded_rows() const { return impl_->ny; }

bool MaximalOperator::window_covers(const RasterField& f) const {
  const RasterGrid& g = impl_->grid;
  int c0 = g.n_cols, c1 = -1, r0 = g.n_rows, r1 = -1;
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::size_t j = g.index(c, r);
      if (f.values[j] == 0.0 && (f.osc.empty() || f.osc[j] == 0.0)) continue;
      c0 = std::min(c0, c);
      c1 = std::max(c1, c);
      r0 = std::min(r0, r);
      r1 = std::max(r1, r);
    }
  }
  if (c1 < 0) return true;
  for (const Kernel& k : impl_->kernels) {
    if (c0 - k.mx_hi < 0 || c1 - k.mx_lo > g.n_cols - 1) return false;
    if (r0 - k.my_hi < 0 || r1 - k.my_lo > g.n_rows - 1) return false;
  }
  return true;
}

std::vector<RasterField> MaximalOperator::apply(const RasterField& f, std::span<const std::vector<double>> norms,
                                                bool absolute) const {
  const Impl& m = *impl_;
  const RasterGrid& g = m.grid;
  if (f.grid.n_cols != g.n_cols || f.grid.n_rows != g.n_rows || f.values.size() != g.size()) {
    throw std::invalid_argument("MaximalOperator::apply: field is on a different grid");
  }
  for (const auto& nk : norms) {
    if (nk.size() != m.rects.size()) throw std::invalid_argument("MaximalOperator::apply: normaliser count");
  }
  const bool has_osc = !f.osc.empty();
  double f_max = 0.0;
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::size_t j = g.index(c, r);
      const double mag = std::max(std::fabs(f.values[j]), has_osc ? f.osc[j] : 0.0);
      if (mag == 0.0) continue;
      if (c < m.support[0] || c > m.support[1] || r < m.support[2] || r > m.support[3]) {
        throw std::invalid_argument("MaximalOperator::apply: field is non-zero outside the declared support");
      }
      f_max = std::max(f_max, mag);
    }
  }

  const std::size_t N = m.n();
  const std::size_t nx = static_cast<std::size_t>(m.nx);
  FftBuffer in(N), spec(N);
  std::fill(in.c(), in.c() + N, std::complex<double>{});
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::size_t j = g.index(c, r);
      in.c()[static_cast<std::size_t>(r) * nx + c] = {f.values[j], has_osc ? f.osc[j] : 0.0};
    }
  }
  fftw_execute_dft(m.fwd, in.data, spec.data);
  // Separate the spectra of the two real inputs packed as re + i im.
  FftBuffer a1(N), a2(N);
  parallel_for(static_cast<std::size_t>(m.ny), [&](std::size_t row) {
    for (std::size_t i = row * nx; i < (row + 1) * nx; ++i) {
      const std::complex<double> s = spec.c()[i];
      const std::complex<double> t = std::conj(spec.c()[m.neg(i)]);
      a1.c()[i] = 0.5 * (s + t);
      a2.c()[i] = std::complex<double>(0.0, -0.5) * (s - t);
    }
  });
  spec = FftBuffer();
  in = FftBuffer();

  std::vector<RasterField> out(norms.size());
  for (auto& o : out) {
    o = RasterField::zeros(g);
    o.err.assign(g.size(), 0.0);
    o.exact = false;
  }
  const double A = g.cell_area();
  FftBuffer work(N), res(N);
  for (std::size_t k = 0; k < m.kernels.size(); ++k) {
    FftBuffer local;
    const FftBuffer* z = nullptr;
    if (!m.cached.empty() && f.exact) {
      z = &m.cached[k];
    } else {
      local = m.kernel_spectrum(k, f.exact);
      z = &local;
    }
    parallel_for(static_cast<std::size_t>(m.ny), [&](std::size_t row) {
      for (std::size_t i = row * nx; i < (row + 1) * nx; ++i) {
        const std::complex<double> s = z->c()[i];
        const std::complex<double> t = std::conj(z->c()[m.neg(i)]);
        const std::complex<double> g1 = 0.5 * (s + t);
        const std::complex<double> g2 = std::complex<double>(0.0, -0.5) * (s - t);
        work.c()[i] = a1.c()[i] * std::conj(g1) + std::complex<double>(0.0, 1.0) * a2.c()[i] * std::conj(g2);
      }
    });
    fftw_execute_dft(m.inv, work.data, res.data);
    const double scale = 1.0 / static_cast<double>(N);
    // Rounding allowance for the transforms and the coverage cut-off.
    const double slack = 1e-10 * f_max * static_cast<double>(m.kernels[k].cells + 1);
    for (std::size_t s = 0; s < norms.size(); ++s) {
      const double unit = A / norms[s][k];
      RasterField& o = out[s];
      parallel_for(static_cast<std::size_t>(g.n_rows), [&](std::size_t row) {
        for (int c = 0; c < g.n_cols; ++c) {
          const std::complex<double> v = res.c()[row * nx + c] * scale;
          double val = v.real() * unit;
          if (absolute) val = std::fabs(val);
          const double e = (std::max(0.0, v.imag()) + slack) * unit;
          const std::size_t j = g.index(c, static_cast<int>(row));
          if (val > o.values[j]) o.values[j] = val;
          if (e > o.err[j]) o.err[j] = e;
        }
      });
    }
  }
  return out;
}

RasterField MaximalOperator::apply(const RasterField& f) const {
  std::vector<std::vector<double>> norms(1);
  for (const Rect& r : impl_->rects) norms[0].push_back(r.area());
  return std::move(apply(f, norms, true).front());
}

double exact_maximal_at(std::span<const ConvexPolygon> k_pieces, std::span<const Rect> rects, Vec2 x) {
  double best = 0.0;
  for (const Rect& r : rects) {
    const ConvexPolygon window = r.polygon(x);
    const Box wb = window.bounding_box();
    const Vec2 u = r.long_axis();
    const Vec2 v = r.short_axis();
    double sum = 0.0;
    for (const ConvexPolygon& p : k_pieces) {
      if (!wb.overlaps(p.bounding_box())) continue;
      // Separating-axis reject along the rectangle's own axes.
      double u_lo = INFINITY, u_hi = -INFINITY, v_lo = INFINITY, v_hi = -INFINITY;
      for (const Vec2& q : p.vertices()) {
        const double a = dot(q - x, u), b = dot(q - x, v);
        u_lo = std::min(u_lo, a);
        u_hi = std::max(u_hi, a);
        v_lo = std::min(v_lo, b);
        v_hi = std::max(v_hi, b);
      }
      if (u_lo >= r.half_length() || u_hi <= -r.half_length() || v_lo >= r.half_width() || v_hi <= -r.half_width()) {
        continue;
      }
      if (const auto c = clip(p, window)) sum += c->area();
    }
    best = std::max(best, sum / r.area());
  }
  return best;
}

SuperlevelMeasure superlevel_measure(const RasterField& t, double lambda, bool strict) {
  const RasterGrid& g = t.grid;
  auto in = [&](std::size_t j) { return strict ? t.values[j] > lambda : t.values[j] >= lambda; };
  SuperlevelMeasure m;
  for (int r = 0; r < g.n_rows; ++r) {
    for (int c = 0; c < g.n_cols; ++c) {
      const std::size_t j = g.index(c, r);
      const bool s = in(j);
      if (s) ++m.cells;
      bool boundary = false;
      if (c > 0 && in(g.index(c - 1, r)) != s) boundary = true;
      if (c + 1 < g.n_cols && in(g.index(c + 1, r)) != s) boundary = true;
      if (r > 0 && in(g.index(c, r - 1)) != s) boundary = true;
      if (r + 1 < g.n_rows && in(g.index(c, r + 1)) != s) boundary = true;
      const double e = t.err.empty() ? 0.0 : t.err[j];
      const bool uncertain = std::fabs(t.values[j] - lambda) <= e;
      if (boundary) ++m.boundary_cells;
      if (uncertain) ++m.uncertain_cells;
      if (boundary || uncertain) m.err += 1.0;
    }
  }
  m.measure = static_cast<double>(m.cells) * g.cell_area();
  m.err *= g.cell_area();
  return m;
}

SuperlevelRatio superlevel_ratio(const RasterField& t_field, double lambda, double set_area) {
  if (!(set_area > 0.0)) throw std::invalid_argument("superlevel_ratio: set_area must be positive");
  const SuperlevelMeasure m = superlevel_measure(t_field, lambda, true);
  return {m.measure / set_area, m.err / set_area};
}

Box window_for(const Box& support, std::span<const Rect> rects, double margin) {
  double hx = 0.0, hy = 0.0;
  for (const Rect& r : rects) {
    const Box b = r.bounding_box();
    hx = std::max(hx, b.x1);
    hy = std::max(hy, b.y1);
  }
  return support.dilated(hx * (1.0 + margin), hy * (1.0 + margin));
}

}  // namespace perronlab
