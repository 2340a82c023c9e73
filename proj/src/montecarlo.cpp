#include "homwb/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "homwb/errors.hpp"
#include "homwb/interference.hpp"
#include "homwb/threading.hpp"
#include "homwb/units.hpp"

namespace homwb {

namespace {

uint64_t splitmix64_step(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// rng concerns; each (concern, block) pair owns an independent substream
enum Concern : uint64_t {
  kAtomSingles = 1,
  kAtomDoublets,
  kIonSingles,
  kIonDoublets,
  kRouting,
  kEfficiency,
  kDarkA,
  kDarkB,
  kPulsedEmission,
};

struct Rng {
  std::mt19937_64 eng;

  explicit Rng(uint64_t seed) : eng(seed) {}

  double u01() {  // uniform in [0, 1), 53-bit
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
  }
  double exp_gap(double rate) { return -std::log1p(-u01()) / rate; }
  bool chance(double p) { return u01() < p; }
};

struct Photon {
  double t_ns;     // block-local
  uint8_t source;  // 0 atom, 1 ion
  bool paired = false;
  Channel port = Channel::A;
};

// Inverse-CDF sampler over a sampled intensity profile. Cell masses use the
// trapezoid rule; the position within a cell is uniform.
struct IntensitySampler {
  double t0 = 0.0, dt = 1.0;
  std::vector<double> cdf;  // cumulative cell masses, normalised

  IntensitySampler() = default;
  IntensitySampler(double t0_ns, double dt_ns, const std::vector<double>& in)
      : t0(t0_ns), dt(dt_ns) {
    cdf.resize(in.size() > 1 ? in.size() - 1 : 0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < in.size(); ++i) {
      acc += 0.5 * (in[i] + in[i + 1]) * dt;
      cdf[i] = acc;
    }
    if (!(acc > 0.0)) throw ParameterError("sampler profile has no area");
    for (double& v : cdf) v /= acc;
  }

  double sample(Rng& rng) const {
    double u = rng.u01();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    auto i = static_cast<std::size_t>(it - cdf.begin());
    if (i >= cdf.size()) i = cdf.size() - 1;
    return t0 + dt * (static_cast<double>(i) + rng.u01());
  }
};

struct MixtureSampler {
  IntensitySampler direct;
  IntensitySampler delay;
  double p_direct = 1.0;

  double sample(Rng& rng) const {
    double t = direct.sample(rng);
    if (p_direct < 1.0 && !rng.chance(p_direct)) t += delay.sample(rng);
    return t;
  }
};

MixtureSampler make_mixture_sampler(const EmissionMixture& mix) {
  MixtureSampler s;
  s.direct = IntensitySampler(mix.direct().t0(), mix.direct().dt(),
                              mix.direct().intensity_samples());
  s.p_direct = mix.direct_weight();
  if (!mix.is_pure_direct())
    s.delay = IntensitySampler(mix.delay().t0_ns, mix.delay().dt_ns,
                               mix.delay().density);
  return s;
}

// Samples (t0, tau) from c * P_full + (1 - c) * P_diag; the cell-mass total
// is the opposite-port probability of the pair.
struct JointSampler {
  double t_lo, dt, tau_lo, dtau;
  std::size_t n_t, n_tau;
  std::vector<double> cdf;
  double p_opposite = 0.0;

  JointSampler(const JointDensity& d, double c) {
    t_lo = d.t_lo();
    dt = d.dt();
    tau_lo = d.tau_lo();
    dtau = d.dtau();
    n_t = d.n_t();
    n_tau = d.n_tau();
    cdf.resize(n_t * n_tau);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_tau; ++j)
      for (std::size_t i = 0; i < n_t; ++i) {
        double v = c * d.value(j, i) + (1.0 - c) * d.diagonal(j, i);
        acc += std::max(v, 0.0) * dt * dtau;
        cdf[j * n_t + i] = acc;
      }
    p_opposite = acc;
    if (acc > 0.0)
      for (double& v : cdf) v /= acc;
  }

  std::pair<double, double> sample(Rng& rng) const {
    double u = rng.u01();
    auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    auto k = static_cast<std::size_t>(it - cdf.begin());
    if (k >= cdf.size()) k = cdf.size() - 1;
    std::size_t j = k / n_t, i = k % n_t;
    double t0 = t_lo + dt * (static_cast<double>(i) + rng.u01() - 0.5);
    double tau = tau_lo + dtau * (static_cast<double>(j) + rng.u01() - 0.5);
    return {t0, tau};
  }
};

int64_t to_ps(double t_ns) {
  return static_cast<int64_t>(std::llround(t_ns * units::ps_per_ns));
}

// Dead-time-regulated singles: Poisson candidates at R' = R/(1 - R tau) keep
// the accepted rate at exactly R while suppressing pairs closer than tau.
void generate_singles(Rng& rng, double rate_per_ns, double tau_coh_ns,
                      double block_len_ns, uint8_t source,
                      std::vector<Photon>& out) {
  if (!(rate_per_ns > 0.0)) return;
  double r_cand = rate_per_ns / (1.0 - rate_per_ns * tau_coh_ns);
  double t = rng.exp_gap(r_cand);
  double last = -2.0 * tau_coh_ns;
  while (t < block_len_ns) {
    if (t - last >= tau_coh_ns) {
      out.push_back({t, source});
      last = t;
    }
    t += rng.exp_gap(r_cand);
  }
}

// Residual two-photon events at rate R^2 g2(0) tau_coh / 2, pair separation
// uniform over [0, tau_coh / 2]; together with the dead-time singles this
// reproduces g2(0) in the analysis layer.
void generate_doublets(Rng& rng, double rate_per_ns, double g2,
                       double tau_coh_ns, double block_len_ns, uint8_t source,
                       std::vector<Photon>& out) {
  double r_d = rate_per_ns * rate_per_ns * g2 * tau_coh_ns / 2.0;
  if (!(r_d > 0.0)) return;
  double t = rng.exp_gap(r_d);
  while (t < block_len_ns) {
    double sep = rng.u01() * tau_coh_ns / 2.0;
    out.push_back({t, source});
    out.push_back({t + sep, source});
    t += rng.exp_gap(r_d);
  }
}

void generate_darks(Rng& rng, double rate_per_ns, double block_len_ns,
                    Channel ch, int64_t block_start_ps,
                    std::vector<TimeTag>& out) {
  if (!(rate_per_ns > 0.0)) return;
  double t = rng.exp_gap(rate_per_ns);
  while (t < block_len_ns) {
    out.push_back({block_start_ps + to_ps(t), ch});
    t += rng.exp_gap(rate_per_ns);
  }
}

struct CwContext {
  const ExperimentConfig& cfg;
  double block_len_ns;
  std::size_t n_blocks;
};

std::vector<TimeTag> generate_cw_block(const CwContext& ctx, std::size_t block) {
  const auto& cfg = ctx.cfg;
  int64_t block_start_ps =
      static_cast<int64_t>(block) * to_ps(ctx.block_len_ns);
  double atom_rate = cfg.atom.rate / units::ns_per_s;
  double ion_rate = cfg.ion.rate / units::ns_per_s;

  std::vector<Photon> atoms, ions;
  {
    Rng r(substream_seed(cfg.rng_seed, kAtomSingles, block));
    generate_singles(r, atom_rate, cfg.atom.coherence_window_ns,
                     ctx.block_len_ns, 0, atoms);
  }
  {
    Rng r(substream_seed(cfg.rng_seed, kAtomDoublets, block));
    generate_doublets(r, atom_rate, cfg.atom.g2_zero,
                      cfg.atom.coherence_window_ns, ctx.block_len_ns, 0, atoms);
  }
  {
    Rng r(substream_seed(cfg.rng_seed, kIonSingles, block));
    generate_singles(r, ion_rate, cfg.ion.coherence_window_ns,
                     ctx.block_len_ns, 1, ions);
  }
  {
    Rng r(substream_seed(cfg.rng_seed, kIonDoublets, block));
    generate_doublets(r, ion_rate, cfg.ion.g2_zero,
                      cfg.ion.coherence_window_ns, ctx.block_len_ns, 1, ions);
  }
  auto by_time = [](const Photon& a, const Photon& b) { return a.t_ns < b.t_ns; };
  std::sort(atoms.begin(), atoms.end(), by_time);
  std::sort(ions.begin(), ions.end(), by_time);

  // pair each ion photon with the nearest free atom photon in the window
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  {
    std::size_t lo = 0;
    for (std::size_t i = 0; i < ions.size(); ++i) {
      double t = ions[i].t_ns;
      while (lo < atoms.size() && atoms[lo].t_ns < t - cfg.interference_window_ns)
        ++lo;
      std::size_t best = atoms.size();
      double best_d = cfg.interference_window_ns;
      for (std::size_t j = lo; j < atoms.size(); ++j) {
        if (atoms[j].t_ns > t + cfg.interference_window_ns) break;
        if (atoms[j].paired) continue;
        double d = std::abs(atoms[j].t_ns - t);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (best < atoms.size()) {
        atoms[best].paired = true;
        ions[i].paired = true;
        pairs.emplace_back(best, i);
      }
    }
  }

  {
    Rng r(substream_seed(cfg.rng_seed, kRouting, block));
    double p_opp = 0.5 * (1.0 - cfg.overlap_c);
    for (auto& [ai, ii] : pairs) {
      if (r.chance(p_opp)) {
        bool atom_to_a = r.chance(0.5);
        atoms[ai].port = atom_to_a ? Channel::A : Channel::B;
        ions[ii].port = atom_to_a ? Channel::B : Channel::A;
      } else {
        Channel c = r.chance(0.5) ? Channel::A : Channel::B;
        atoms[ai].port = c;
        ions[ii].port = c;
      }
    }
    for (auto& p : atoms)
      if (!p.paired) p.port = r.chance(0.5) ? Channel::A : Channel::B;
    for (auto& p : ions)
      if (!p.paired) p.port = r.chance(0.5) ? Channel::A : Channel::B;
  }

  std::vector<TimeTag> tags;
  tags.reserve(atoms.size() + ions.size() + 16);
  {
    Rng r(substream_seed(cfg.rng_seed, kEfficiency, block));
    auto emit = [&](const std::vector<Photon>& ps) {
      for (const auto& p : ps) {
        double eta = p.port == Channel::A ? cfg.detector_a.efficiency
                                          : cfg.detector_b.efficiency;
        if (eta >= 1.0 || r.chance(eta))
          tags.push_back({block_start_ps + to_ps(p.t_ns), p.port});
      }
    };
    emit(atoms);
    emit(ions);
  }
  {
    Rng r(substream_seed(cfg.rng_seed, kDarkA, block));
    generate_darks(r, cfg.detector_a.dark_rate_per_s / units::ns_per_s,
                   ctx.block_len_ns, Channel::A, block_start_ps, tags);
  }
  {
    Rng r(substream_seed(cfg.rng_seed, kDarkB, block));
    generate_darks(r, cfg.detector_b.dark_rate_per_s / units::ns_per_s,
                   ctx.block_len_ns, Channel::B, block_start_ps, tags);
  }
  std::sort(tags.begin(), tags.end());
  return tags;
}

struct PulsedContext {
  const ExperimentConfig& cfg;
  int64_t period_ps = 0;
  uint64_t n_periods = 0;
  uint64_t periods_per_block = 0;
  std::size_t n_blocks = 0;
  // slot geometry (ns within the period)
  std::vector<double> ion_slots_ns;
  std::size_t overlap_slot = SIZE_MAX;
  double atom_slot_ns = 0.0;
  // samplers
  IntensitySampler atom_sampler;
  MixtureSampler ion_sampler;
  std::unique_ptr<JointSampler> joint;
  // doublet probability conditioned on an emission, so that the
  // unconditional two-photon probability per attempt is g2 p^2 / 2
  double p2_atom = 0.0, p2_ion = 0.0;

  explicit PulsedContext(const ExperimentConfig& c) : cfg(c) {}
};

std::vector<TimeTag> generate_pulsed_block(const PulsedContext& ctx,
                                           std::size_t block) {
  const auto& cfg = ctx.cfg;
  uint64_t p_begin = static_cast<uint64_t>(block) * ctx.periods_per_block;
  uint64_t p_end = std::min<uint64_t>(p_begin + ctx.periods_per_block, ctx.n_periods);

  std::vector<TimeTag> tags;
  tags.reserve(static_cast<std::size_t>(p_end - p_begin) + 64);

  Rng rng(substream_seed(cfg.rng_seed, kPulsedEmission, block));
  double p_opp = ctx.joint ? ctx.joint->p_opposite : 0.0;

  struct Det {
    double t_ns;  // period-local
    Channel ch;
  };
  std::vector<Det> dets;

  for (uint64_t p = p_begin; p < p_end; ++p) {
    int64_t period_start_ps = static_cast<int64_t>(p) * ctx.period_ps;
    tags.push_back({period_start_ps, Channel::Clk});
    dets.clear();

    bool atom_present = cfg.atom.rate > 0.0 && rng.chance(cfg.atom.rate);
    bool atom_doublet = atom_present && ctx.p2_atom > 0.0 && rng.chance(ctx.p2_atom);
    // per-slot ion emissions
    for (std::size_t s = 0; s < ctx.ion_slots_ns.size(); ++s) {
      bool ion_present = cfg.ion.rate > 0.0 && rng.chance(cfg.ion.rate);
      bool ion_doublet = ion_present && ctx.p2_ion > 0.0 && rng.chance(ctx.p2_ion);

      if (s == ctx.overlap_slot && atom_present && ion_present && ctx.joint) {
        if (rng.chance(p_opp)) {
          auto [t0, tau] = ctx.joint->sample(rng);
          dets.push_back({ctx.atom_slot_ns + t0, Channel::A});
          dets.push_back({ctx.atom_slot_ns + t0 + tau, Channel::B});
        } else {
          Channel c = rng.chance(0.5) ? Channel::A : Channel::B;
          dets.push_back({ctx.atom_slot_ns + ctx.atom_sampler.sample(rng), c});
          dets.push_back({ctx.atom_slot_ns + cfg.arrival_offset_ns +
                              ctx.ion_sampler.sample(rng),
                          c});
        }
        atom_present = false;  // consumed by the joint outcome
      } else if (ion_present) {
        dets.push_back({ctx.ion_slots_ns[s] + cfg.arrival_offset_ns +
                            ctx.ion_sampler.sample(rng),
                        rng.chance(0.5) ? Channel::A : Channel::B});
      }
      if (ion_doublet) {
        dets.push_back({ctx.ion_slots_ns[s] + cfg.arrival_offset_ns +
                            ctx.ion_sampler.sample(rng),
                        rng.chance(0.5) ? Channel::A : Channel::B});
      }
    }
    if (atom_present) {
      dets.push_back({ctx.atom_slot_ns + ctx.atom_sampler.sample(rng),
                      rng.chance(0.5) ? Channel::A : Channel::B});
    }
    if (atom_doublet) {
      dets.push_back({ctx.atom_slot_ns + ctx.atom_sampler.sample(rng),
                      rng.chance(0.5) ? Channel::A : Channel::B});
    }

    for (const auto& d : dets) {
      double eta = d.ch == Channel::A ? cfg.detector_a.efficiency
                                      : cfg.detector_b.efficiency;
      if (eta >= 1.0 || rng.chance(eta))
        tags.push_back({period_start_ps + to_ps(d.t_ns), d.ch});
    }
  }

  double block_len_ns = static_cast<double>(p_end - p_begin) *
                        static_cast<double>(ctx.period_ps) / units::ps_per_ns;
  int64_t block_start_ps = static_cast<int64_t>(p_begin) * ctx.period_ps;
  {
    Rng r(substream_seed(cfg.rng_seed, kDarkA, block));
    generate_darks(r, cfg.detector_a.dark_rate_per_s / units::ns_per_s,
                   block_len_ns, Channel::A, block_start_ps, tags);
  }
  {
    Rng r(substream_seed(cfg.rng_seed, kDarkB, block));
    generate_darks(r, cfg.detector_b.dark_rate_per_s / units::ns_per_s,
                   block_len_ns, Channel::B, block_start_ps, tags);
  }
  std::sort(tags.begin(), tags.end());
  return tags;
}

// Generates blocks in waves of `threads` workers and hands time-ordered
// chunks to the sink. Events spilling past a block boundary are merged into
// the next chunk, so the emitted stream is globally ordered and identical
// for any worker count.
SimSummary run_blocks(std::size_t n_blocks, int threads,
                      const std::function<std::vector<TimeTag>(std::size_t)>& gen,
                      const std::function<int64_t(std::size_t)>& block_end_ps,
                      const TagSink& sink, double duration_s) {
  SimSummary summary;
  summary.duration_s = duration_s;
  int nw = resolve_thread_count(threads);
  std::vector<TimeTag> spill;

  for (std::size_t wave = 0; wave < n_blocks;
       wave += static_cast<std::size_t>(nw)) {
    std::size_t count = std::min<std::size_t>(nw, n_blocks - wave);
    std::vector<std::vector<TimeTag>> results(count);
    parallel_for(count, nw,
                 [&](std::size_t i) { results[i] = gen(wave + i); });

    for (std::size_t i = 0; i < count; ++i) {
      std::size_t block = wave + i;
      auto& tags = results[i];
      if (!spill.empty()) {
        tags.insert(tags.begin(), spill.begin(), spill.end());
        std::inplace_merge(tags.begin(), tags.begin() + spill.size(),
                           tags.end());
        spill.clear();
      }
      if (block + 1 < n_blocks) {
        int64_t cut = block_end_ps(block);
        auto it = std::lower_bound(
            tags.begin(), tags.end(), cut,
            [](const TimeTag& t, int64_t v) { return t.t_ps < v; });
        spill.assign(it, tags.end());
        tags.erase(it, tags.end());
      }
      for (const auto& t : tags) {
        if (t.channel == Channel::A) ++summary.counts_a;
        else if (t.channel == Channel::B) ++summary.counts_b;
        else ++summary.counts_clk;
      }
      if (sink) {
        TagStream chunk;
        chunk.tags = std::move(tags);
        sink(chunk);
      }
    }
  }
  return summary;
}

void validate_common(const ExperimentConfig& cfg) {
  if (!(cfg.duration_s > 0.0)) throw ParameterError("duration must be > 0");
  if (cfg.overlap_c < 0.0 || cfg.overlap_c > 1.0)
    throw ParameterError("overlap c must lie in [0, 1]");
  for (const auto* d : {&cfg.detector_a, &cfg.detector_b}) {
    if (d->efficiency < 0.0 || d->efficiency > 1.0)
      throw ParameterError("detector efficiency must lie in [0, 1]");
    if (d->dark_rate_per_s < 0.0)
      throw ParameterError("dark rate must be >= 0");
  }
  for (const auto* s : {&cfg.atom, &cfg.ion}) {
    if (s->rate < 0.0) throw ParameterError("source rate must be >= 0");
    if (s->g2_zero < 0.0) throw ParameterError("g2(0) must be >= 0");
    if (!(s->coherence_window_ns > 0.0))
      throw ParameterError("coherence window must be > 0");
  }
}

}  // namespace

uint64_t substream_seed(uint64_t seed, uint64_t concern, uint64_t block) {
  uint64_t x = seed;
  (void)splitmix64_step(x);
  x ^= 0x517cc1b727220a95ull * (concern + 1);
  (void)splitmix64_step(x);
  x ^= block;
  return splitmix64_step(x);
}

TagStream split_stream(const TagStream& stream, Channel channel) {
  TagStream out;
  out.resolution_ps = stream.resolution_ps;
  for (const auto& t : stream.tags)
    if (t.channel == channel) out.tags.push_back(t);
  return out;
}

TagStream merge_streams(const std::vector<TagStream>& parts) {
  TagStream out;
  for (const auto& p : parts) {
    out.resolution_ps = p.resolution_ps;
    out.tags.insert(out.tags.end(), p.tags.begin(), p.tags.end());
  }
  std::sort(out.tags.begin(), out.tags.end());
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  validate_common(cfg);
  if (cfg.mode == SimMode::Cw) {
    for (const auto* s : {&cfg.atom, &cfg.ion}) {
      double occupancy =
          s->rate / units::ns_per_s * s->coherence_window_ns;
      if (occupancy > 0.1)
        throw ModelValidityError(
            "mean occupancy per coherence window exceeds 0.1: the small-flux "
            "model does not apply");
    }
    if (!(cfg.interference_window_ns > 0.0))
      throw ParameterError("interference window must be > 0");
    if (!(cfg.block_seconds > 0.0))
      throw ParameterError("block length must be > 0");
    return;
  }

  // pulsed
  if (!(cfg.pulse_period_us > 0.0)) throw ParameterError("period must be > 0");
  if (cfg.ion_slot_offsets_us.empty())
    throw ParameterError("pulsed mode needs at least one ion slot");
  for (const auto* s : {&cfg.atom, &cfg.ion})
    if (s->rate > 1.0)
      throw ParameterError("per-attempt probability must lie in [0, 1]");
  double period_ns = cfg.pulse_period_us * units::ns_per_us;
  double atom_span = cfg.atom_envelope.t_end() - cfg.atom_envelope.t0();
  auto ion_prof = cfg.ion_mixture.averaged_intensity();
  double ion_span =
      ion_prof.dt_ns * static_cast<double>(ion_prof.intensity.size() - 1) +
      std::abs(cfg.arrival_offset_ns);
  double span = std::max(atom_span, ion_span);

  std::vector<double> slots;
  for (double s : cfg.ion_slot_offsets_us) slots.push_back(s * units::ns_per_us);
  double atom_slot = cfg.atom_slot_offset_us * units::ns_per_us;
  bool atom_on_ion_slot = false;
  for (double s : slots)
    if (std::abs(s - atom_slot) < 1.0) atom_on_ion_slot = true;
  if (!atom_on_ion_slot) slots.push_back(atom_slot);
  std::sort(slots.begin(), slots.end());
  for (double s : slots)
    if (s < 0.0 || s >= period_ns)
      throw ParameterError("slot offsets must lie within the period");
  for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
    if (slots[i + 1] - slots[i] < span)
      throw ModelValidityError(
          "overlap ambiguity: slot separation is smaller than the photon span");
  }
  double wrap = slots.front() + period_ns - slots.back();
  if (wrap < span)
    throw ModelValidityError(
        "overlap ambiguity: slot separation across periods is smaller than "
        "the photon span");
}

SimSummary simulate_cw(const ExperimentConfig& cfg, const TagSink& sink) {
  if (cfg.mode != SimMode::Cw) throw ParameterError("config mode is not CW");
  validate_config(cfg);

  CwContext ctx{cfg, cfg.block_seconds * units::ns_per_s, 0};
  double total_ns = cfg.duration_s * units::ns_per_s;
  ctx.n_blocks = static_cast<std::size_t>(
      std::ceil(total_ns / ctx.block_len_ns - 1e-9));
  if (ctx.n_blocks == 0) ctx.n_blocks = 1;

  auto gen = [&](std::size_t b) { return generate_cw_block(ctx, b); };
  auto end_ps = [&](std::size_t b) {
    return static_cast<int64_t>(b + 1) * to_ps(ctx.block_len_ns);
  };
  return run_blocks(ctx.n_blocks, cfg.threads, gen, end_ps, sink,
                    cfg.duration_s);
}

TagStream simulate_cw(const ExperimentConfig& cfg) {
  TagStream out;
  simulate_cw(cfg, [&](const TagStream& chunk) {
    out.tags.insert(out.tags.end(), chunk.tags.begin(), chunk.tags.end());
  });
  return out;
}

SimSummary simulate_pulsed(const ExperimentConfig& cfg, const TagSink& sink) {
  if (cfg.mode != SimMode::Pulsed)
    throw ParameterError("config mode is not pulsed");
  validate_config(cfg);

  PulsedContext ctx(cfg);
  ctx.period_ps = to_ps(cfg.pulse_period_us * units::ns_per_us);
  ctx.n_periods = static_cast<uint64_t>(
      std::llround(cfg.duration_s * units::ps_per_s /
                   static_cast<double>(ctx.period_ps)));
  if (ctx.n_periods == 0) ctx.n_periods = 1;
  uint64_t per_block = static_cast<uint64_t>(std::llround(
      std::max(1.0, cfg.block_seconds * units::ps_per_s /
                        static_cast<double>(ctx.period_ps))));
  ctx.periods_per_block = per_block;
  ctx.n_blocks = static_cast<std::size_t>(
      (ctx.n_periods + per_block - 1) / per_block);

  for (double s : cfg.ion_slot_offsets_us)
    ctx.ion_slots_ns.push_back(s * units::ns_per_us);
  ctx.atom_slot_ns = cfg.atom_slot_offset_us * units::ns_per_us;
  for (std::size_t s = 0; s < ctx.ion_slots_ns.size(); ++s)
    if (std::abs(ctx.ion_slots_ns[s] - ctx.atom_slot_ns) < 1.0)
      ctx.overlap_slot = s;

  ctx.atom_sampler =
      IntensitySampler(cfg.atom_envelope.t0(), cfg.atom_envelope.dt(),
                       cfg.atom_envelope.intensity_samples());
  ctx.ion_sampler = make_mixture_sampler(cfg.ion_mixture);

  if (ctx.overlap_slot != SIZE_MAX && cfg.atom.rate > 0.0 &&
      cfg.ion.rate > 0.0) {
    // joint density over the overlap window, on a grid coarse enough to
    // sample quickly but well below the analysis binning
    const TemporalEnvelope& ion_direct = cfg.ion_mixture.direct();
    TemporalEnvelope ion_shifted(ion_direct.t0() + cfg.arrival_offset_ns,
                                 ion_direct.dt(), ion_direct.samples());
    EmissionMixture shifted_mix =
        cfg.ion_mixture.is_pure_direct()
            ? EmissionMixture(ion_shifted)
            : EmissionMixture(ion_shifted, cfg.ion_mixture.direct_weight(),
                              cfg.ion_mixture.delay());
    auto prof = shifted_mix.averaged_intensity();
    double ion_hi =
        prof.t0_ns + prof.dt_ns * static_cast<double>(prof.intensity.size() - 1);
    double span = std::max(cfg.atom_envelope.t_end(), ion_hi) -
                  std::min(cfg.atom_envelope.t0(), prof.t0_ns);
    TauGrid grid{-span, span, 1.0};
    TemporalEnvelope atom_coarse = cfg.atom_envelope.dt() < 1.0
                                       ? resample(cfg.atom_envelope, 1.0)
                                       : cfg.atom_envelope;
    EmissionMixture ion_coarse =
        ion_shifted.dt() < 1.0
            ? (shifted_mix.is_pure_direct()
                   ? EmissionMixture(resample(ion_shifted, 1.0))
                   : EmissionMixture(resample(ion_shifted, 1.0),
                                     shifted_mix.direct_weight(),
                                     shifted_mix.delay()))
            : shifted_mix;
    JointDensity dens = joint_density_full(atom_coarse, ion_coarse,
                                           cfg.spectral, grid, cfg.threads);
    ctx.joint = std::make_unique<JointSampler>(dens, cfg.overlap_c);
  }

  ctx.p2_atom = cfg.atom.g2_zero * cfg.atom.rate / 2.0;
  ctx.p2_ion = cfg.ion.g2_zero * cfg.ion.rate / 2.0;

  auto gen = [&](std::size_t b) { return generate_pulsed_block(ctx, b); };
  auto end_ps = [&](std::size_t b) {
    uint64_t p_end = std::min<uint64_t>(
        (static_cast<uint64_t>(b) + 1) * ctx.periods_per_block, ctx.n_periods);
    return static_cast<int64_t>(p_end) * ctx.period_ps;
  };
  return run_blocks(ctx.n_blocks, cfg.threads, gen, end_ps, sink,
                    cfg.duration_s);
}

TagStream simulate_pulsed(const ExperimentConfig& cfg) {
  TagStream out;
  simulate_pulsed(cfg, [&](const TagStream& chunk) {
    out.tags.insert(out.tags.end(), chunk.tags.begin(), chunk.tags.end());
  });
  return out;
}

}  // namespace homwb
