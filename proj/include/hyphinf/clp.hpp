#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyphinf/pde.hpp"
#include "hyphinf/state_space.hpp"

namespace hyphinf::clp {

using num::CMatrix;
using num::Complex;

/// Closed loop from d to z, sampled with the plant's travel time.
struct ClosedLoop {
  StateSpace sys;
  double travel_time = 1.0;
  /// det(I − D22·D_c), nonzero by construction.
  double det_s = 1.0;
};

ClosedLoop close_loop(const pde::DiscretePlant& plant,
                      const StateSpace& controller);

/// Evaluates D + C(zI − A)⁻¹B, caching the spectrum of A.
class TransferEvaluator {
 public:
  explicit TransferEvaluator(StateSpace sys);
  /// Throws kPoleProximity when z lies within 1e-12 of an eigenvalue.
  CMatrix operator()(Complex z) const;
  const StateSpace& system() const { return sys_; }

 private:
  StateSpace sys_;
  num::CVector poles_;
};

CMatrix transfer_eval(const StateSpace& sys, Complex z);

/// Continuous-frame response D + C(e^{s·p(1)} I − A)⁻¹B.
CMatrix transfer_eval_cont(const ClosedLoop& cl, Complex s);

struct NormOptions {
  Index grid_size = 4096;
  double refine_tol = 1e-10;
};

struct NormResult {
  double norm = 0.0;
  /// Argmax on [0, 2π); the smaller angle wins ties.
  double theta = 0.0;
};

/// Grid sweep refined by golden-section search around the three largest
/// local maxima. Throws kUnstableSystem unless ρ(A) < 1.
NormResult hinf_norm_disc(const StateSpace& sys, const NormOptions& options = {});

struct ContinuousNormResult {
  double norm = 0.0;
  double omega = 0.0;
};

/// Same supremum as the discrete norm; ω = θ / p(1).
ContinuousNormResult hinf_norm_cont(const ClosedLoop& cl,
                                    const NormOptions& options = {});

struct FrequencySample {
  double theta = 0.0;
  double omega = 0.0;
  double gain = 0.0;
};

/// Gains on the uniform θ-grid. A refined peak that beats every grid sample
/// is inserted in θ order.
std::vector<FrequencySample> frequency_sweep(
    const StateSpace& sys, Index grid_size, double travel_time,
    const std::optional<NormResult>& peak = std::nullopt);

/// Header theta,omega,norm_G and 17 significant digits per value.
void write_freqresp_csv(std::ostream& out,
                        const std::vector<FrequencySample>& samples);

struct Witness {
  std::string condition;
  Complex point;
  /// Smallest singular value observed at point.
  double margin = 0.0;
};

struct AssumptionReport {
  bool stabilizable = false;
  bool detectable = false;
  bool rank12 = false;
  bool rank21 = false;
  std::vector<Witness> witnesses;

  bool all_passed() const {
    return stabilizable && detectable && rank12 && rank21;
  }
};

AssumptionReport check_assumptions(const TwoPortStateSpace& plant);

/// Worker count for frequency sweeps, capped by HYPHINF_THREADS.
int worker_threads();

}  // namespace hyphinf::clp
