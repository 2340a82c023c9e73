#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "homwb/interference.hpp"
#include "homwb/montecarlo.hpp"

namespace homwb::tags {

// Uniformly binned delay histogram. Bin centres sit at tau_lo + (i + 1/2) bin.
// Raw counts stay nonnegative; `values` may go negative after background
// subtraction, with the subtracted baseline recorded alongside.
struct CoincidenceHistogram {
  double tau_lo_ns = 0.0;
  double bin_ns = 1.0;
  std::vector<int64_t> raw;      // accumulated pair counts
  std::vector<double> values;    // raw, minus baseline, and/or rescaled
  std::vector<double> errors;    // per-bin 1 sigma
  double baseline = 0.0;         // subtracted per-bin level (pre-scaling)
  double scale = 1.0;            // common normalisation divisor

  std::size_t size() const { return values.size(); }
  double center(std::size_t i) const {
    return tau_lo_ns + bin_ns * (static_cast<double>(i) + 0.5);
  }
  std::optional<std::size_t> bin_of(double tau_ns) const;
  // index of the bin whose centre is closest to tau = 0
  std::size_t zero_bin() const;
};

// Histogram with `values` = raw counts and Poisson errors sqrt(n).
CoincidenceHistogram make_counts_histogram(double tau_lo_ns, double bin_ns,
                                           std::vector<int64_t> raw);

// Merge integer-factor groups of bins; counts add, errors in quadrature.
CoincidenceHistogram rebin(const CoincidenceHistogram& h, std::size_t factor);

// Streaming A-B pair correlator: counts every cross-channel pair with
// |tau| <= tau_max, tau = t_B - t_A. Feed time-ordered chunks in order.
class PairAccumulator {
 public:
  PairAccumulator(double tau_max_ns, double bin_ns);

  void feed(const TagStream& chunk);
  void feed(const TimeTag& tag);

  CoincidenceHistogram histogram() const;
  uint64_t singles(Channel ch) const {
    return ch == Channel::A ? singles_a_ : singles_b_;
  }

 private:
  int64_t tau_max_ps_;
  double bin_ns_;
  double tau_lo_ns_;
  std::size_t n_bins_;
  std::vector<int64_t> counts_;
  std::deque<int64_t> buf_a_, buf_b_;
  uint64_t singles_a_ = 0, singles_b_ = 0;

  void record(int64_t tau_ps);
};

// 2-D pulsed coincidence map: pulse phase t of the SPAD-A event (time since
// the latest clock tag, modulo the period) against the A-B delay tau.
struct CoincidenceMap {
  double period_ns = 0.0;
  double t_bin_ns = 0.0;
  double tau_lo_ns = 0.0;
  double tau_bin_ns = 0.0;
  std::size_t n_t = 0, n_tau = 0;
  std::vector<int64_t> counts;  // index = it * n_tau + itau
  std::vector<int64_t> a_singles_profile;  // A counts per phase bin
  uint64_t clk_count = 0;

  int64_t at(std::size_t it, std::size_t itau) const {
    return counts[it * n_tau + itau];
  }
};

class CoincidenceMapAccumulator {
 public:
  CoincidenceMapAccumulator(double period_us, double t_bin_ns, double tau_bin_ns,
                            double tau_max_us);

  void feed(const TagStream& chunk);
  void feed(const TimeTag& tag);

  const CoincidenceMap& map() const { return map_; }
  uint64_t singles(Channel ch) const {
    return ch == Channel::A ? singles_a_ : singles_b_;
  }

 private:
  struct AEvent {
    int64_t t_ps;
    std::size_t phase_bin;
  };
  int64_t period_ps_;
  int64_t tau_max_ps_;
  CoincidenceMap map_;
  std::deque<AEvent> buf_a_;
  std::deque<int64_t> buf_b_;
  std::optional<int64_t> last_clk_;
  uint64_t singles_a_ = 0, singles_b_ = 0;
  bool saw_clk_ = false;

  void pair(const AEvent& a, int64_t t_b);
};

CoincidenceMap coincidence_map(const TagStream& stream, double period_us,
                               double t_bin_ns, double tau_bin_ns,
                               double tau_max_us);

// C(tau) = sum of map rows over the union of phase windows.
CoincidenceHistogram gate_and_project(const CoincidenceMap& map,
                                      const std::vector<GateWindow>& windows);

// Average of copies shifted by tau_k = half_period + k * period over the
// given k range; the per-bin error is the Poisson error of the mean.
CoincidenceHistogram shifted_reference(const CoincidenceHistogram& c_tau,
                                       double period_us, double half_period_us,
                                       int k_min, int k_max);

// Flat accidental-coincidence level per bin.
double expected_background(double singles_a_per_s, double singles_b_per_s,
                           double gate_duty, double bin_ns, double duration_s);

enum class NormalizationMode { ReferencePlateau, ReferencePeak };

struct NormalizedPair {
  CoincidenceHistogram overlapped;
  CoincidenceHistogram reference;
};

// Subtracts the background level from both histograms, then divides both by
// one common scale taken from the reference: its plateau (mean over the outer
// 20% of bins) or its peak bin.
NormalizedPair subtract_and_normalize(const CoincidenceHistogram& signal,
                                      double background_level,
                                      const CoincidenceHistogram& reference,
                                      NormalizationMode mode);

struct VisibilityResult {
  double v = 0.0;
  double sigma = 0.0;
  double n_par_0 = 0.0;
  double n_perp_0 = 0.0;
};

// Zero-delay visibility from the two normalised histograms, averaging
// `center_bins` bins around tau = 0; errors propagated to first order.
VisibilityResult visibility_from_histograms(const CoincidenceHistogram& n_par,
                                            const CoincidenceHistogram& n_perp,
                                            std::size_t center_bins = 1);

enum class G2Normalization { Plateau, Analytic };

struct G2Result {
  CoincidenceHistogram histogram;  // normalised g2(tau)
  double plateau = 0.0;            // uncorrelated level (counts per bin)
  double g2_zero = 0.0;            // zero-delay bin (or centre average)
  double g2_zero_sigma = 0.0;
  double g2_dip_min = 0.0;         // minimum over the central half-range
};

// Intensity autocorrelation of one beamsplitter pair: histogram of A-B delays
// normalised to the uncorrelated level. Plateau normalisation uses the outer
// 20% of the range; the analytic variant uses R_A R_B bin T.
G2Result g2_histogram(const TagStream& stream, double tau_max_ns, double bin_ns,
                      std::size_t center_bins = 1,
                      G2Normalization norm = G2Normalization::Plateau,
                      double duration_s = 0.0);
G2Result g2_from_accumulator(const PairAccumulator& acc,
                             std::size_t center_bins = 1,
                             G2Normalization norm = G2Normalization::Plateau,
                             double duration_s = 0.0);

}  // namespace homwb::tags
