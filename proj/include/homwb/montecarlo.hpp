#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "homwb/envelope.hpp"
#include "homwb/mixture.hpp"
#include "homwb/spectral.hpp"

namespace homwb {

enum class Channel : uint8_t { A = 0, B = 1, Clk = 2 };

// One detection record. Timestamps are integer picoseconds from run start.
struct TimeTag {
  int64_t t_ps = 0;
  Channel channel = Channel::A;

  friend bool operator<(const TimeTag& a, const TimeTag& b) {
    return a.t_ps != b.t_ps ? a.t_ps < b.t_ps : a.channel < b.channel;
  }
  friend bool operator==(const TimeTag& a, const TimeTag& b) {
    return a.t_ps == b.t_ps && a.channel == b.channel;
  }
};

struct TagStream {
  std::vector<TimeTag> tags;  // nondecreasing timestamps
  double resolution_ps = 1.0;
};

TagStream split_stream(const TagStream& stream, Channel channel);
TagStream merge_streams(const std::vector<TagStream>& parts);

enum class SimMode { Cw, Pulsed };

struct SourceSpec {
  // CW emission rate (counts/s) or per-attempt detection probability when
  // pulsed. Zero disables the source.
  double rate = 0.0;
  double g2_zero = 0.0;
  // pair-correlation time scale: the antibunching dip extends over +-tau_coh
  // and residual two-photon events are spread over +-tau_coh/2
  double coherence_window_ns = 10.0;
  std::string label;
};

struct DetectorSpec {
  double efficiency = 1.0;
  double dark_rate_per_s = 0.0;
};

struct ExperimentConfig {
  SimMode mode = SimMode::Cw;
  double duration_s = 1.0;

  SourceSpec atom;
  SourceSpec ion;
  double overlap_c = 1.0;

  // pulse-resolved photon description (pulsed mode; also used by theory)
  TemporalEnvelope atom_envelope = exponential_envelope(120.0, 0.0, 1200.0, 0.5);
  EmissionMixture ion_mixture =
      EmissionMixture(exponential_envelope(50.0, 0.0, 500.0, 0.5));
  SpectralModel spectral;

  // CW mode: two photons arriving within this half-width of each other
  // interfere; their opposite-port probability is (1 - c)/2
  double interference_window_ns = 10.0;

  // pulsed mode timing
  double pulse_period_us = 5.0;
  std::vector<double> ion_slot_offsets_us = {1.75, 4.25};
  double atom_slot_offset_us = 4.25;
  double arrival_offset_ns = 40.0;  // ion mean arrival shift at the splitter

  DetectorSpec detector_a;
  DetectorSpec detector_b;

  uint64_t rng_seed = 1;
  int threads = 0;          // 0: hardware concurrency
  double block_seconds = 1.0;  // generation block length (CW)
};

// Substream mapping: every (concern, block) pair draws from its own
// mt19937_64 seeded by splitmix64 chained over (seed, concern, block), so
// parallel block generation reproduces the serial stream for any worker
// count.
uint64_t substream_seed(uint64_t seed, uint64_t concern, uint64_t block);

struct SimSummary {
  uint64_t counts_a = 0;
  uint64_t counts_b = 0;
  uint64_t counts_clk = 0;
  double duration_s = 0.0;
};

using TagSink = std::function<void(const TagStream& chunk)>;

// Stochastic (continuous) operation: each source emits a dead-time-regulated
// singles process at its configured rate plus a doublet process at rate
// R^2 g2(0) tau_coh / 2 carrying the residual two-photon events. Photons
// route through the splitter; atom-ion pairs inside the interference window
// draw their joint port outcome with opposite-port probability (1 - c)/2.
// Deterministic for a given seed, independent of the worker count.
SimSummary simulate_cw(const ExperimentConfig& config, const TagSink& sink);
TagStream simulate_cw(const ExperimentConfig& config);

// On-demand operation: per 5-us period the atom answers a request with its
// per-attempt probability and the ion fires in each configured slot; one ion
// slot coincides with the atom photon and overlapped pairs sample their
// detection times from the full joint density. A clock tag opens each period.
SimSummary simulate_pulsed(const ExperimentConfig& config, const TagSink& sink);
TagStream simulate_pulsed(const ExperimentConfig& config);

// Throws ModelValidityError when the small-flux approximation breaks
// (CW mean occupancy R tau_coh > 0.1) or pulsed slots overlap ambiguously.
void validate_config(const ExperimentConfig& config);

}  // namespace homwb
