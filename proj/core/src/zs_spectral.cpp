#include "nlslab/zs_spectral.hpp"

#include "nlslab/csv.hpp"
#include "nlslab/errors.hpp"
#include "nlslab/parallel.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <string>

namespace nlslab {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxImaginaryLambda = 300.0;

struct Mat2 {
  cplx a, b, c, d;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline Mat2 operator+(const Mat2& x, const Mat2& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}


// cosh(x) and sinh(x)/x as functions of z = x^2. Both are even in x, so
// the branch of sqrt(z) is irrelevant.
struct EvenFunctions {
  cplx cosh_root;
  cplx sinhc_root;
};

EvenFunctions even_functions(cplx z) {
  if (z.imag() == 0.0) {
    const double r = z.real();
    if (r < 0.0) {
      const double y = std::sqrt(-r);
      return {std::cos(y), y == 0.0 ? 1.0 : std::sin(y) / y};
    }
    const double y = std::sqrt(r);
    return {std::cosh(y), y == 0.0 ? 1.0 : std::sinh(y) / y};
  }
  const cplx x = std::sqrt(z);
  if (std::abs(x) < 1e-8) return {1.0 + 0.5 * z, 1.0 + z / 6.0};
  return {std::cosh(x), std::sinh(x) / x};
}

// d/dz [sinh(x)/x] = (cosh x - sinh(x)/x) / (2z), by series near z = 0.
cplx sinhc_derivative(cplx z, const EvenFunctions& f) {
  if (std::abs(z) < 1e-2) {
    // sum_{k>=1} k z^{k-1} / (2k+1)!
    cplx term_power = 1.0;
    cplx sum = 0.0;
    double factorial = 6.0;  // 3!
    for (int k = 1; k <= 9; ++k) {
      sum += static_cast<double>(k) * term_power / factorial;
      term_power *= z;
      factorial *= (2.0 * k + 2.0) * (2.0 * k + 3.0);
    }
    return sum;
  }
  return (f.cosh_root - f.sinhc_root) / (2.0 * z);
}

void check_lambda(cplx lambda) {
  if (std::abs(lambda.imag()) > kMaxImaginaryLambda)
    throw DomainError("|Im lambda| too large for monodromy evaluation");
}

}  // namespace

ZsOperator::ZsOperator(const Potential& phi, int cells) : real_type_(phi.real_type) {
  const int N = phi.phi1.grid().size();
  if (cells == 0) cells = 4 * N;
  if (cells < N) throw ConfigurationError("cells must be at least the grid point count");
  if (cells % N != 0) throw ConfigurationError("cells must be a multiple of the grid point count");
  q1_ = phi.phi1.interpolate(cells, 0.5);
  q2_ = phi.phi2.interpolate(cells, 0.5);
  if (real_type_) {
    // Take phi2 from phi1 so q2 = conj(q1) holds bit for bit.
    for (std::size_t j = 0; j < q1_.size(); ++j) q2_[j] = std::conj(q1_[j]);
  }
  product_.resize(q1_.size());
  for (std::size_t j = 0; j < q1_.size(); ++j)
    product_[j] = real_type_ ? cplx(std::norm(q1_[j]), 0.0) : q1_[j] * q2_[j];
  h_ = 1.0 / cells;
}

MonodromyMatrix ZsOperator::monodromy(cplx lambda) const {
  check_lambda(lambda);
  const cplx i{0.0, 1.0};
  Mat2 m = Mat2::identity();
  const double h2 = h_ * h_;
  const cplx lam2 = lambda * lambda;
  for (std::size_t j = 0; j < q1_.size(); ++j) {
    const cplx z = h2 * (product_[j] - lam2);
    const EvenFunctions f = even_functions(z);
    const cplx s = f.sinhc_root * h_;
    // hA = h [[-i lambda, i q1], [-i q2, i lambda]]
    const Mat2 e{f.cosh_root - s * i * lambda, s * i * q1_[j],
                 -s * i * q2_[j], f.cosh_root + s * i * lambda};
    m = e * m;
  }
  return {lambda, m.a, m.b, m.c, m.d};
}

cplx ZsOperator::discriminant(cplx lambda) const { return monodromy(lambda).trace(); }

DiscriminantJet ZsOperator::discriminant_jet(cplx lambda) const {
  check_lambda(lambda);
  const cplx i{0.0, 1.0};
  Mat2 m = Mat2::identity();
  Mat2 dm = Mat2::zero();
  const double h2 = h_ * h_;
  const cplx lam2 = lambda * lambda;
  const cplx dz = -2.0 * lambda * h2;
  for (std::size_t j = 0; j < q1_.size(); ++j) {
    const cplx z = h2 * (product_[j] - lam2);
    const EvenFunctions f = even_functions(z);
    const cplx s = f.sinhc_root * h_;
    const Mat2 e{f.cosh_root - s * i * lambda, s * i * q1_[j],
                 -s * i * q2_[j], f.cosh_root + s * i * lambda};
    // dE/dlambda = (sinhc/2) dz Id + (d sinhc/dz) dz hA + sinhc h diag(-i, i)
    const cplx dc = 0.5 * f.sinhc_root * dz;
    const cplx ds = sinhc_derivative(z, f) * dz * h_;
    const Mat2 de{dc - ds * i * lambda - s * i, ds * i * q1_[j],
                  -ds * i * q2_[j], dc + ds * i * lambda + s * i};
    dm = de * m + e * dm;
    m = e * m;
  }
  return {m.a + m.d, dm.a + dm.d};
}

MonodromyMatrix monodromy(const Potential& phi, cplx lambda, int cells) {
  return ZsOperator(phi, cells).monodromy(lambda);
}

cplx discriminant(const Potential& phi, cplx lambda, int cells) {
  return ZsOperator(phi, cells).discriminant(lambda);
}

GapTable::GapTable(int K, std::vector<GapEntry> entries) : K_(K), entries_(std::move(entries)) {
  if (static_cast<int>(entries_.size()) != 2 * K + 1)
    throw InternalError("gap table size does not match its index range");
}

const GapEntry& GapTable::at(int n) const {
  if (!contains(n)) throw DomainError("gap index " + std::to_string(n) + " outside table");
  return entries_[static_cast<std::size_t>(n + K_)];
}

std::vector<int> GapTable::open_indices() const {
  std::vector<int> out;
  for (const auto& e : entries_)
    if (e.open) out.push_back(e.n);
  return out;
}

int count_periodic_eigenvalues(const ZsOperator& op, double lo, double hi, double height) {
  const auto f = [&](cplx z) {
    const cplx d = op.discriminant(z);
    return d * d - 4.0;
  };
  const std::array<cplx, 5> corners{cplx(lo, -height), cplx(hi, -height), cplx(hi, height),
                                    cplx(lo, height), cplx(lo, -height)};
  double winding = 0.0;
  for (std::size_t e = 0; e + 1 < corners.size(); ++e) {
    // Adaptive walk: refine until every phase increment is below pi/4.
    struct Segment {
      cplx a, b, fa, fb;
      int depth;
    };
    // Seed with a uniform partition so no lobe is skipped between the ends.
    std::vector<Segment> stack;
    constexpr int kSeed = 32;
    cplx prev = corners[e];
    cplx fprev = f(prev);
    std::vector<Segment> seeds;
    for (int k = 1; k <= kSeed; ++k) {
      const cplx next = corners[e] + (corners[e + 1] - corners[e]) * (static_cast<double>(k) / kSeed);
      const cplx fnext = f(next);
      seeds.push_back({prev, next, fprev, fnext, 0});
      prev = next;
      fprev = fnext;
    }
    for (auto it = seeds.rbegin(); it != seeds.rend(); ++it) stack.push_back(*it);
    while (!stack.empty()) {
      Segment s = stack.back();
      stack.pop_back();
      if (s.fa == 0.0 || s.fb == 0.0)
        throw ResolutionError("periodic eigenvalue on the counting rectangle boundary");
      const double step = std::arg(s.fb / s.fa);
      if (std::abs(step) < kPi / 4.0 || s.depth >= 30) {
        winding += step;
        continue;
      }
      const cplx mid = 0.5 * (s.a + s.b);
      const cplx fm = f(mid);
      stack.push_back({mid, s.b, fm, s.fb, s.depth + 1});
      stack.push_back({s.a, mid, s.fa, fm, s.depth + 1});
    }
  }
  return static_cast<int>(std::lround(winding / (2.0 * kPi)));
}

namespace {

template <typename F>
double polish_root(F&& f, double a, double b, double fa, double fb, double tol) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  std::uintmax_t max_iter = 200;
  const auto stop = [tol](double x, double y) { return std::abs(x - y) <= tol; };
  const auto bracket = boost::math::tools::toms748_solve(f, a, b, fa, fb, stop, max_iter);
  return 0.5 * (bracket.first + bracket.second);
}

int sign_changes(const std::vector<double>& v) {
  int count = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if ((v[i] < 0.0) != (v[i + 1] < 0.0)) ++count;
  return count;
}

GapEntry locate_window(const ZsOperator& op, int n, const SpectrumOptions& opt) {
  const double center = n * kPi;
  const double lo = center - 0.5 * kPi;
  const double hi = center + 0.5 * kPi;
  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  const std::string where = "window n = " + std::to_string(n);

  const auto g_of = [&](double lam) {
    const cplx d = op.discriminant(lam);
    if (op.real_type() && std::abs(d.imag()) > 1e-8)
      throw InternalError(where + ": discriminant not real on the real axis");
    return parity * d.real() - 2.0;
  };
  const auto dg_of = [&](double lam) { return parity * op.discriminant_jet(lam).derivative.real(); };

  const int points = std::max(8, opt.scan_points);
  std::vector<double> grid(static_cast<std::size_t>(points) + 1);
  std::vector<double> g(grid.size());
  std::vector<double> dg(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / points;
    const DiscriminantJet jet = op.discriminant_jet(grid[i]);
    if (op.real_type() && std::abs(jet.value.imag()) > 1e-8)
      throw InternalError(where + ": discriminant not real on the real axis");
    g[i] = parity * jet.value.real() - 2.0;
    dg[i] = parity * jet.derivative.real();
  }
  if (!(g.front() < 0.0 && g.back() < 0.0))
    throw ResolutionError(where + ": eigenvalue at or beyond the window edge; "
                          "increase cells or shrink the potential");

  const int slope_changes = sign_changes(dg);
  const int value_changes = sign_changes(g);
  const bool regular = slope_changes == 1 && (value_changes == 0 || value_changes == 2);
  if (!regular) {
    const int count = count_periodic_eigenvalues(op, lo, hi, opt.argument_height);
    if (count != 2)
      throw ResolutionError(where + ": " + std::to_string(count) +
                            " periodic eigenvalues in window (expected 2)");
    if (value_changes != 2)
      throw InternalError(where + ": two eigenvalues counted but no real pair located; "
                          "non-real spectrum for this potential");
  }

  GapEntry entry;
  entry.n = n;
  if (regular) {
    std::size_t k = 0;
    while (!((dg[k] >= 0.0) && (dg[k + 1] < 0.0))) {
      if (++k + 1 >= dg.size())
        throw ResolutionError(where + ": discriminant has a minimum where a maximum is expected");
    }
    const double peak_at = polish_root(dg_of, grid[k], grid[k + 1], dg[k], dg[k + 1], opt.root_tol);
    entry.peak = g_of(peak_at);
    if (entry.peak <= opt.discriminant_noise) {
      entry.lambda_minus = entry.lambda_plus = peak_at;
    } else {
      entry.lambda_minus = polish_root(g_of, lo, peak_at, g.front(), entry.peak, opt.root_tol);
      entry.lambda_plus = polish_root(g_of, peak_at, hi, entry.peak, g.back(), opt.root_tol);
    }
  } else {
    std::vector<double> roots;
    for (std::size_t k = 0; k + 1 < g.size(); ++k)
      if ((g[k] < 0.0) != (g[k + 1] < 0.0))
        roots.push_back(polish_root(g_of, grid[k], grid[k + 1], g[k], g[k + 1], opt.root_tol));
    entry.lambda_minus = roots[0];
    entry.lambda_plus = roots[1];
    entry.peak = g_of(0.5 * (roots[0] + roots[1]));
  }
  entry.tau = 0.5 * (entry.lambda_plus + entry.lambda_minus);
  entry.gamma = entry.lambda_plus - entry.lambda_minus;
  entry.open = entry.peak > opt.discriminant_noise &&
               entry.gamma > opt.gap_tol * std::max(1.0, std::abs(static_cast<double>(n)));
  return entry;
}

}  // namespace

GapTable periodic_spectrum(const ZsOperator& op, int K, const SpectrumOptions& options) {
  if (K < 0) throw ConfigurationError("K must be non-negative");
  std::vector<GapEntry> entries(static_cast<std::size_t>(2 * K + 1));
  parallel_for(entries.size(), [&](std::size_t i) {
    entries[i] = locate_window(op, static_cast<int>(i) - K, options);
  });
  for (std::size_t i = 0; i + 1 < entries.size(); ++i)
    if (!(entries[i].lambda_plus < entries[i + 1].lambda_minus))
      throw InternalError("periodic eigenvalues out of order between n = " +
                          std::to_string(entries[i].n) + " and " + std::to_string(entries[i + 1].n));
  return GapTable(K, std::move(entries));
}

GapTable periodic_spectrum(const Potential& phi, int K, const SpectrumOptions& options) {
  if (K < 0) throw ConfigurationError("K must be non-negative");
  return periodic_spectrum(ZsOperator(phi, options.cells), K, options);
}

std::vector<TauResidual> tau_asymptotics_check(const GapTable& gaps, const Potential& phi) {
  const double pairing = phi.pairing_integral().real();
  std::vector<TauResidual> out;
  for (const auto& e : gaps.entries()) {
    if (e.n == 0) continue;
    const double k = e.n;
    const double predicted = k * kPi + pairing / (2.0 * kPi * k);
    out.push_back({e.n, k * k * std::abs(e.tau - predicted)});
  }
  return out;
}

void write_gap_csv(std::ostream& os, const GapTable& gaps) {
  csv::Writer w(os);
  w.header({"n", "lambda_minus", "lambda_plus", "tau", "gamma", "open"});
  for (const auto& e : gaps.entries())
    w.row(e.n, e.lambda_minus, e.lambda_plus, e.tau, e.gamma, e.open);
}

}  // namespace nlslab
