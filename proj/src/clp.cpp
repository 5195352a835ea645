#include "hyphinf/clp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

namespace hyphinf::clp {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInvPhi = 0.6180339887498949;

std::vector<double> parallel_map(Index count,
                                 const std::function<double(Index)>& f) {
  std::vector<double> out(static_cast<std::size_t>(count), 0.0);
  const Index workers =
      std::clamp<Index>(std::min<Index>(worker_threads(), count / 64), 1, 64);
  if (workers == 1) {
    for (Index i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (Index i = w; i < count; i += workers) out[i] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct Probe {
  double x = 0.0;
  double value = 0.0;
};

// Maximizes f on [a, b] by golden-section search.
Probe golden_max(double a, double b, double tol,
                 const std::function<double(double)>& f) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 300 && b - a > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? Probe{c, fc} : Probe{d, fd};
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

double grid_angle(Index i, Index n) {
  return kTwoPi * static_cast<double>(i) / static_cast<double>(n);
}

// Indices of the largest circular local maxima of values, best first.
std::vector<Index> top_local_maxima(const std::vector<double>& values,
                                    std::size_t how_many) {
  const Index n = static_cast<Index>(values.size());
  std::vector<Index> peaks;
  for (Index i = 0; i < n; ++i) {
    const double prev = values[(i + n - 1) % n];
    const double next = values[(i + 1) % n];
    if (values[i] >= prev && values[i] >= next) peaks.push_back(i);
  }
  if (peaks.empty()) {
    peaks.push_back(static_cast<Index>(
        std::max_element(values.begin(), values.end()) - values.begin()));
  }
  std::stable_sort(peaks.begin(), peaks.end(), [&](Index a, Index b) {
    return values[a] > values[b];
  });
  if (peaks.size() > how_many) peaks.resize(how_many);
  return peaks;
}

// Picks the larger value; near-equal values keep the smaller angle.
bool better(const Probe& cand, const Probe& best) {
  const double tie = 1e-13 * std::max(1.0, std::abs(best.value));
  if (cand.value > best.value + tie) return true;
  if (cand.value >= best.value - tie) return cand.x < best.x;
  return false;
}

double block_scale(const Matrix& a, const Matrix& b, const Matrix& c,
                     const Matrix& d) {
  Matrix m(a.rows() + c.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.topRightCorner(b.rows(), b.cols()) = b;
  m.bottomLeftCorner(c.rows(), c.cols()) = c;
  m.bottomRightCorner(d.rows(), d.cols()) = d;
  return 1.0 + m.norm();
}

// [[zI − A, −B], [−C, −D]].
CMatrix rosenbrock(const Matrix& a, const Matrix& b, const Matrix& c,
                   const Matrix& d, Complex z) {
  const Index n = a.rows();
  CMatrix m(n + c.rows(), n + b.cols());
  m.topLeftCorner(n, n) =
      z * CMatrix::Identity(n, n) - a.cast<Complex>();
  m.topRightCorner(n, b.cols()) = -b.cast<Complex>();
  m.bottomLeftCorner(c.rows(), n) = -c.cast<Complex>();
  m.bottomRightCorner(c.rows(), b.cols()) = -d.cast<Complex>();
  return m;
}

struct RankCheck {
  bool passed = false;
  Witness witness;
};

// Full rank of the Rosenbrock matrix on the unit circle, in the direction
// named by `columns` (full column rank) or rows otherwise.
RankCheck unit_circle_rank(const std::string& name, const Matrix& a,
                           const Matrix& b, const Matrix& c, const Matrix& d,
                           bool columns) {
  RankCheck out;
  out.witness.condition = name;
  const bool shape_ok = columns ? c.rows() >= b.cols() : b.cols() >= c.rows();
  if (!shape_ok) {
    out.witness.point = Complex(1.0, 0.0);
    out.witness.margin = 0.0;
    return out;
  }
  const double threshold = 1e-8 * block_scale(a, b, c, d);
  const auto sigma = [&](double theta) {
    return num::min_singular_value(
        rosenbrock(a, b, c, d, std::polar(1.0, theta)));
  };
  const Index n = a.rows();
  if (c.rows() == b.cols()) {
    // Square: locate invariant zeros directly.
    const Index s = n + b.cols();
    num::Pencil pencil{Matrix::Zero(s, s), Matrix::Zero(s, s)};
    pencil.M.topLeftCorner(n, n) = num::identity(n);
    pencil.N.topLeftCorner(n, n) = a;
    pencil.N.topRightCorner(n, b.cols()) = b;
    pencil.N.bottomLeftCorner(c.rows(), n) = c;
    pencil.N.bottomRightCorner(c.rows(), b.cols()) = d;
    const num::GeneralizedSpectrum spectrum = num::generalized_eigenvalues(pencil);
    const double ta = 1e-12 * (1.0 + pencil.N.norm());
    bool regular = true;
    bool off_circle = true;
    std::vector<double> angles;
    for (Index j = 0; j < spectrum.alpha.size(); ++j) {
      const double alpha = std::abs(spectrum.alpha(j));
      const double beta = spectrum.beta(j);
      if (alpha <= ta && beta <= 1e-12) {
        regular = false;
        continue;
      }
      if (beta <= 1e-14 * alpha) continue;
      const Complex zero = spectrum.alpha(j) / beta;
      if (std::abs(std::abs(zero) - 1.0) <= num::kDichotomyTolerance) {
        off_circle = false;
      }
      angles.push_back(wrap_angle(std::arg(zero)));
    }
    if (angles.empty()) angles.push_back(0.0);
    out.witness.margin = std::numeric_limits<double>::infinity();
    for (double t : angles) {
      const double sv = sigma(t);
      if (sv < out.witness.margin) {
        out.witness.margin = sv;
        out.witness.point = std::polar(1.0, t);
      }
    }
    out.passed = regular && off_circle && out.witness.margin > threshold;
    return out;
  }
  constexpr Index kScan = 4096;
  const std::vector<double> values =
      parallel_map(kScan, [&](Index i) { return -sigma(grid_angle(i, kScan)); });
  Probe best{0.0, -std::numeric_limits<double>::infinity()};
  for (Index i : top_local_maxima(values, 3)) {
    const double t = grid_angle(i, kScan);
    const double h = kTwoPi / kScan;
    Probe p = golden_max(t - h, t + h, 1e-10,
                         [&](double x) { return -sigma(x); });
    p.x = wrap_angle(p.x);
    if (values[i] > p.value) p = Probe{t, values[i]};
    if (better(p, best)) best = p;
  }
  out.witness.point = std::polar(1.0, best.x);
  out.witness.margin = -best.value;
  out.passed = out.witness.margin > threshold;
  return out;
}

}  // namespace

int worker_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("HYPHINF_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(std::min<long>(v, 64));
  }
  return std::min(hw, 64);
}

ClosedLoop close_loop(const pde::DiscretePlant& plant,
                      const StateSpace& controller) {
  const LftResult r = lft(plant, controller, ErrorCode::kClosedLoopIllPosed);
  return {r.system, plant.travel_time, r.det_s};
}

TransferEvaluator::TransferEvaluator(StateSpace sys) : sys_(std::move(sys)) {
  sys_.validate("system");
  poles_ = num::eigenvalues(sys_.A);
}

CMatrix TransferEvaluator::operator()(Complex z) const {
  for (Index i = 0; i < poles_.size(); ++i) {
    if (std::abs(z - poles_(i)) <= 1e-12) {
      fail(ErrorCode::kPoleProximity,
           "evaluation point within 1e-12 of an eigenvalue");
    }
  }
  const Index n = sys_.states();
  CMatrix g = sys_.D.cast<Complex>();
  if (n == 0) return g;
  const CMatrix resolvent = z * CMatrix::Identity(n, n) - sys_.A.cast<Complex>();
  g += sys_.C.cast<Complex>() *
       resolvent.partialPivLu().solve(sys_.B.cast<Complex>());
  return g;
}

CMatrix transfer_eval(const StateSpace& sys, Complex z) {
  return TransferEvaluator(sys)(z);
}

CMatrix transfer_eval_cont(const ClosedLoop& cl, Complex s) {
  return transfer_eval(cl.sys, std::exp(s * cl.travel_time));
}

NormResult hinf_norm_disc(const StateSpace& sys, const NormOptions& options) {
  if (options.grid_size < 1) fail(ErrorCode::kRange, "grid_size must be >= 1");
  if (!(options.refine_tol > 0.0)) {
    fail(ErrorCode::kRange, "refine_tol must be positive");
  }
  const TransferEvaluator eval(sys);
  const double radius = num::spectral_radius(sys.A);
  if (!(radius < 1.0 - num::kStabilityMargin)) {
    fail(ErrorCode::kUnstableSystem,
         "norm undefined on the circle (spectral radius " +
             std::to_string(radius) + ")");
  }
  const auto gain = [&](double theta) {
    return num::max_singular_value(eval(std::polar(1.0, theta)));
  };
  const Index n = options.grid_size;
  const std::vector<double> values =
      parallel_map(n, [&](Index i) { return gain(grid_angle(i, n)); });
  Probe best{0.0, -1.0};
  for (Index i = 0; i < n; ++i) {
    const Probe p{grid_angle(i, n), values[i]};
    if (better(p, best)) best = p;
  }
  const double h = kTwoPi / static_cast<double>(n);
  for (Index i : top_local_maxima(values, 3)) {
    const double t = grid_angle(i, n);
    Probe p = golden_max(t - h, t + h, options.refine_tol, gain);
    p.x = wrap_angle(p.x);
    if (better(p, best)) best = p;
  }
  return {best.value, best.x};
}

ContinuousNormResult hinf_norm_cont(const ClosedLoop& cl,
                                    const NormOptions& options) {
  if (!(cl.travel_time > 0.0)) {
    fail(ErrorCode::kContract, "travel time must be positive");
  }
  const NormResult r = hinf_norm_disc(cl.sys, options);
  return {r.norm, r.theta / cl.travel_time};
}

std::vector<FrequencySample> frequency_sweep(
    const StateSpace& sys, Index grid_size, double travel_time,
    const std::optional<NormResult>& peak) {
  if (grid_size < 1) fail(ErrorCode::kRange, "grid_size must be >= 1");
  if (!(travel_time > 0.0)) {
    fail(ErrorCode::kContract, "travel time must be positive");
  }
  const TransferEvaluator eval(sys);
  const std::vector<double> values = parallel_map(grid_size, [&](Index i) {
    return num::max_singular_value(
        eval(std::polar(1.0, grid_angle(i, grid_size))));
  });
  std::vector<FrequencySample> out;
  out.reserve(values.size() + 1);
  double grid_max = -1.0;
  for (Index i = 0; i < grid_size; ++i) {
    const double t = grid_angle(i, grid_size);
    out.push_back({t, t / travel_time, values[i]});
    grid_max = std::max(grid_max, values[i]);
  }
  if (peak && peak->norm > grid_max) {
    const FrequencySample s{peak->theta, peak->theta / travel_time,
                            peak->norm};
    const auto it = std::lower_bound(
        out.begin(), out.end(), s.theta,
        [](const FrequencySample& a, double t) { return a.theta < t; });
    if (it == out.end() || it->theta != s.theta) out.insert(it, s);
  }
  return out;
}

void write_freqresp_csv(std::ostream& out,
                        const std::vector<FrequencySample>& samples) {
  out << "theta,omega,norm_G\n";
  char buf[96];
  for (const FrequencySample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", s.theta, s.omega,
                  s.gain);
    out << buf;
  }
}

AssumptionReport check_assumptions(const TwoPortStateSpace& plant) {
  plant.validate("plant");
  AssumptionReport report;
  const Index n = plant.n();
  const num::CVector ev = num::eigenvalues(plant.A);

  const auto pbh = [&](const std::string& name, const Matrix& other,
                       bool stack_right) {
    const double scale =
        1.0 + (stack_right ? num::hstack(plant.A, other)
                           : num::vstack(plant.A, other))
                  .norm();
    bool passed = true;
    Witness worst{name, Complex(0.0, 0.0),
                  std::numeric_limits<double>::infinity()};
    for (Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev(i)) <= 1.0 - num::kStabilityMargin) continue;
      const CMatrix shifted =
          ev(i) * CMatrix::Identity(n, n) - plant.A.cast<Complex>();
      CMatrix m;
      if (stack_right) {
        m.resize(n, n + other.cols());
        m.leftCols(n) = shifted;
        m.rightCols(other.cols()) = other.cast<Complex>();
      } else {
        m.resize(n + other.rows(), n);
        m.topRows(n) = shifted;
        m.bottomRows(other.rows()) = other.cast<Complex>();
      }
      const double margin = num::min_singular_value(m);
      if (margin < worst.margin) worst = Witness{name, ev(i), margin};
      if (!(margin > 1e-9 * scale)) passed = false;
    }
    if (std::isfinite(worst.margin)) report.witnesses.push_back(worst);
    return passed;
  };
  report.stabilizable = pbh("stabilizable", plant.B2, true);
  report.detectable = pbh("detectable", plant.C2, false);

  const RankCheck r12 = unit_circle_rank("rank12", plant.A, plant.B2,
                                         plant.C1, plant.D12, true);
  const RankCheck r21 = unit_circle_rank("rank21", plant.A, plant.B1,
                                         plant.C2, plant.D21, false);
  report.rank12 = r12.passed;
  report.rank21 = r21.passed;
  report.witnesses.push_back(r12.witness);
  report.witnesses.push_back(r21.witness);
  return report;
}

}  // namespace hyphinf::clp
