#include "ecodrive/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "ecodrive/error.hpp"

namespace ecodrive {

namespace {

constexpr double kWilsonZ = 1.959963984540054;
constexpr double kHistogramBin = 1.0;  // s of delay per bin
constexpr double kPositionTolerance = 1e-6;

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

struct Tally {
  std::vector<std::size_t> violations;   // per route signal
  std::vector<std::vector<HistogramBin>> bins;
  std::size_t runs_with_violation = 0;
};

std::vector<HistogramBin> empty_bins(std::size_t signal, const DelayDistribution& law) {
  std::vector<HistogramBin> bins;
  const double span = law.hi() - law.lo();
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / kHistogramBin - 1e-9)));
  for (std::size_t b = 0; b < count; ++b) {
    const double lo = law.lo() + kHistogramBin * static_cast<double>(b);
    bins.push_back({signal, lo, std::min(law.hi(), lo + kHistogramBin), 0, 0});
  }
  return bins;
}

void record(Tally& tally, std::size_t signal, double delay, bool violated) {
  auto& bins = tally.bins[signal];
  if (violated) ++tally.violations[signal];
  if (bins.empty()) return;
  std::size_t b = 0;
  while (b + 1 < bins.size() && delay >= bins[b].hi) ++b;
  ++bins[b].samples;
  if (violated) ++bins[b].violations;
}

// Splits replicates [0, samples) over workers; each replicate owns its seed,
// so results do not depend on the thread count.
template <typename Body>
void run_replicates(std::size_t samples, unsigned threads, Body body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(samples, 1))));
  if (workers == 1) {
    body(0, std::size_t{0}, samples);
    return;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (samples + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(samples, chunk * w);
    const std::size_t end = std::min(samples, begin + chunk);
    pool.emplace_back([&body, w, begin, end] { body(w, begin, end); });
  }
}

Tally make_tally(const Route& route) {
  Tally t;
  t.violations.assign(route.signals.size(), 0);
  t.bins.resize(route.signals.size());
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    const SignalSpec& sig = route.signals[i];
    if (sig.kind == SignalKind::signal && sig.delay) t.bins[i] = empty_bins(i, *sig.delay);
  }
  return t;
}

void merge(Tally& into, const Tally& from) {
  into.runs_with_violation += from.runs_with_violation;
  for (std::size_t i = 0; i < into.violations.size(); ++i) {
    into.violations[i] += from.violations[i];
    for (std::size_t b = 0; b < into.bins[i].size(); ++b) {
      into.bins[i][b].samples += from.bins[i][b].samples;
      into.bins[i][b].violations += from.bins[i][b].violations;
    }
  }
}

void require_delays(const Route& route) {
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    const SignalSpec& sig = route.signals[i];
    if (sig.kind == SignalKind::signal && !sig.delay) {
      throw ConfigError("route.signals[" + std::to_string(i) + "]: Monte-Carlo evaluation needs a delay law");
    }
  }
}

// One draw per timed signal in route order; zero for stop signs.
std::vector<double> draw_delays(const Route& route, Rng& rng) {
  std::vector<double> delays(route.signals.size(), 0.0);
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    const SignalSpec& sig = route.signals[i];
    if (sig.kind == SignalKind::signal) delays[i] = sig.delay->sample(rng);
  }
  return delays;
}

std::size_t signal_index(const Route& route, double position) {
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    if (std::abs(route.signals[i].position - position) <= kPositionTolerance) return i;
  }
  throw ConfigError("passing at " + std::to_string(position) + " m matches no route signal");
}

ViolationReport finish_report(const Route& route, std::size_t samples, std::uint64_t seed, Tally tally,
                              std::vector<double> arrivals, std::vector<double> fuel) {
  ViolationReport report;
  report.samples = samples;
  report.seed = seed;
  for (std::size_t i = 0; i < route.signals.size(); ++i) {
    if (route.signals[i].kind != SignalKind::signal) continue;
    SignalViolationStats s;
    s.position = route.signals[i].position;
    s.violations = tally.violations[i];
    s.rate = samples ? static_cast<double>(s.violations) / static_cast<double>(samples) : 0.0;
    s.interval = wilson_interval(s.violations, samples);
    report.per_signal.push_back(s);
    for (const auto& b : tally.bins[i]) report.histogram.push_back(b);
  }
  report.runs_with_violation = tally.runs_with_violation;
  report.run_interval = wilson_interval(tally.runs_with_violation, samples);
  report.arrival_times = std::move(arrivals);
  report.fuel = std::move(fuel);
  return report;
}

std::string fmt(double x, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << x;
  return os.str();
}

std::string signed_percent(double x) {
  std::ostringstream os;
  os << std::showpos << std::fixed << std::setprecision(1) << x << '%';
  return os.str();
}

}  // namespace

RunMetrics metrics(const Trajectory& traj) {
  if (traj.steps.size() < 2) throw ConfigError("incomplete trajectory: fewer than two rows");
  RunMetrics m;
  m.label = traj.method;
  m.scenario_hash = traj.scenario_hash;
  m.eta = traj.eta;
  m.arrival_time = traj.arrival_time();
  m.total_fuel = traj.total_fuel();
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    const TrajectoryStep& prev = traj.steps[i - 1];
    const TrajectoryStep& s = traj.steps[i];
    const double mean_speed = 0.5 * (prev.velocity + s.velocity);
    if (s.engine_torque > 0.0 && mean_speed > 0.0) {
      m.positive_energy += s.engine_torque * s.engine_speed * (s.distance - prev.distance) / mean_speed;
    }
  }
  if (m.positive_energy > 0.0) m.avg_bsfc = m.total_fuel / (m.positive_energy / 3.6e6);
  for (const auto& p : traj.passings) m.passing_clock_times.push_back(p.clock_time);
  bool stopped = false;
  for (std::size_t i = 1; i + 1 < traj.steps.size(); ++i) {
    const bool at_rest = traj.steps[i].velocity == 0.0;
    if (at_rest && !stopped) ++m.complete_stops;
    stopped = at_rest;
  }
  return m;
}

BinomialInterval wilson_interval(std::size_t successes, std::size_t trials) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = kWilsonZ * kWilsonZ;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = kWilsonZ * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double ViolationReport::arrival_quantile(double q) const {
  if (arrival_times.empty()) throw ConfigError("no arrival samples");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile must lie in [0, 1]");
  std::vector<double> sorted = arrival_times;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[rank == 0 ? 0 : std::min(rank, sorted.size()) - 1];
}

double ViolationReport::mean_fuel() const {
  if (fuel.empty()) return 0.0;
  double sum = 0.0;
  for (double f : fuel) sum += f;
  return sum / static_cast<double>(fuel.size());
}

ViolationReport monte_carlo_violations(const Trajectory& plan, const Route& route, std::size_t samples,
                                       std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw ConfigError("samples must be >= 1");
  require_delays(route);
  std::vector<std::pair<std::size_t, double>> passings;  // (signal, universal passing time)
  for (const auto& p : plan.passings) {
    const std::size_t i = signal_index(route, p.position);
    if (route.signals[i].kind == SignalKind::signal) passings.emplace_back(i, p.passing_time);
  }
  const unsigned workers = std::max(1u, threads);
  std::vector<Tally> tallies(workers, make_tally(route));
  run_replicates(samples, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    Tally& tally = tallies[w];
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng(derive_seed(seed, r));
      const std::vector<double> delays = draw_delays(route, rng);
      bool any = false;
      for (const auto& [i, t] : passings) {
        const bool v = violates(route.signals[i], t, delays[i]);
        record(tally, i, delays[i], v);
        any = any || v;
      }
      if (any) ++tally.runs_with_violation;
    }
  });
  Tally total = make_tally(route);
  for (const auto& t : tallies) merge(total, t);
  return finish_report(route, samples, seed, std::move(total),
                       std::vector<double>(samples, plan.arrival_time()),
                       std::vector<double>(samples, plan.total_fuel()));
}

ViolationReport monte_carlo_idm(const Route& route, const Vehicle& vehicle, const IdmParams& idm,
                                std::size_t samples, std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw ConfigError("samples must be >= 1");
  require_delays(route);
  const unsigned workers = std::max(1u, threads);
  std::vector<Tally> tallies(workers, make_tally(route));
  std::vector<double> arrivals(samples);
  std::vector<double> fuel(samples);
  run_replicates(samples, workers, [&](unsigned w, std::size_t begin, std::size_t end) {
    Tally& tally = tallies[w];
    for (std::size_t r = begin; r < end; ++r) {
      Rng rng(derive_seed(seed, r));
      const std::vector<double> delays = draw_delays(route, rng);
      const Trajectory traj = simulate_idm(route, vehicle, idm, delays);
      bool any = false;
      for (const auto& p : traj.passings) {
        const std::size_t i = signal_index(route, p.position);
        const bool v = violates(route.signals[i], p.passing_time, delays[i]);
        record(tally, i, delays[i], v);
        any = any || v;
      }
      if (any) ++tally.runs_with_violation;
      arrivals[r] = traj.arrival_time();
      fuel[r] = traj.total_fuel();
    }
  });
  Tally total = make_tally(route);
  for (const auto& t : tallies) merge(total, t);
  return finish_report(route, samples, seed, std::move(total), std::move(arrivals), std::move(fuel));
}

ComparisonReport compare(std::span<const RunMetrics> runs, const std::string& baseline) {
  if (runs.size() < 2) throw ConfigError("comparison needs at least two runs");
  const auto base = std::find_if(runs.begin(), runs.end(), [&](const RunMetrics& m) { return m.label == baseline; });
  if (base == runs.end()) throw ConfigError("baseline run '" + baseline + "' not found");
  auto change = [](double x, double ref) { return ref == 0.0 ? 0.0 : 100.0 * (x - ref) / ref; };
  ComparisonReport report;
  report.baseline = baseline;
  for (const auto& m : runs) {
    if (&m == &*base) continue;
    ComparisonRow row;
    row.label = m.label;
    row.arrival_change = change(m.arrival_time, base->arrival_time);
    row.fuel_change = change(m.total_fuel, base->total_fuel);
    if (m.avg_bsfc && base->avg_bsfc) {
      row.bsfc_change = change(*m.avg_bsfc, *base->avg_bsfc);
    } else {
      row.bsfc_change = std::numeric_limits<double>::quiet_NaN();
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_metrics_csv(std::span<const RunMetrics> runs, std::ostream& out) {
  out << std::setprecision(17);
  out << "label,scenario_hash,eta,arrival_time_s,total_fuel_g,avg_bsfc_gpkwh,positive_energy_j,complete_stops,"
         "passing_clock_times_s\n";
  for (const auto& m : runs) {
    out << m.label << ',' << m.scenario_hash << ',' << m.eta << ',' << m.arrival_time << ',' << m.total_fuel << ',';
    if (m.avg_bsfc) out << *m.avg_bsfc;
    out << ',' << m.positive_energy << ',' << m.complete_stops << ',';
    for (std::size_t i = 0; i < m.passing_clock_times.size(); ++i) {
      out << (i ? ";" : "") << m.passing_clock_times[i];
    }
    out << '\n';
  }
}

std::vector<RunMetrics> read_metrics_csv(std::istream& in) {
  std::vector<RunMetrics> runs;
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) throw ConfigError("metrics csv line " + std::to_string(line_no) + ": expected 9 fields");
    try {
      RunMetrics m;
      m.label = f[0];
      m.scenario_hash = f[1];
      m.eta = std::stod(f[2]);
      m.arrival_time = std::stod(f[3]);
      m.total_fuel = std::stod(f[4]);
      if (!f[5].empty()) m.avg_bsfc = std::stod(f[5]);
      m.positive_energy = std::stod(f[6]);
      m.complete_stops = std::stoi(f[7]);
      for (const auto& c : split(f[8], ';')) {
        if (!c.empty()) m.passing_clock_times.push_back(std::stod(c));
      }
      runs.push_back(std::move(m));
    } catch (const std::exception&) {
      throw ConfigError("metrics csv line " + std::to_string(line_no) + ": malformed number");
    }
  }
  return runs;
}

void write_metrics_table(std::span<const RunMetrics> runs, const ComparisonReport* comparison, std::ostream& out) {
  std::size_t width = 6;
  for (const auto& m : runs) width = std::max(width, m.label.size());
  if (comparison) {
    for (const auto& r : comparison->rows) width = std::max(width, r.label.size() + 9);
  }
  auto row = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
    out << std::left << std::setw(static_cast<int>(width)) << a << "  " << std::right << std::setw(12) << b
        << "  " << std::setw(14) << c << "  " << std::setw(12) << d << '\n';
  };
  row("Method", "Arrival (s)", "B_avg (g/kWh)", "Fuel (g)");
  for (const auto& m : runs) {
    row(m.label, fmt(m.arrival_time, 1), m.avg_bsfc ? fmt(*m.avg_bsfc, 2) : "-", fmt(m.total_fuel, 2));
  }
  if (comparison) {
    for (const auto& r : comparison->rows) {
      row("Change (" + r.label + ")", signed_percent(r.arrival_change),
          std::isnan(r.bsfc_change) ? "-" : signed_percent(r.bsfc_change), signed_percent(r.fuel_change));
    }
    out << "Change = relative to " << comparison->baseline << '\n';
  }
}

void write_violation_csv(const ViolationReport& report, std::ostream& out) {
  out << std::setprecision(17);
  out << "# samples=" << report.samples << '\n';
  out << "# seed=" << report.seed << '\n';
  out << "position_m,violations,samples,rate,wilson_lo,wilson_hi\n";
  for (const auto& s : report.per_signal) {
    out << s.position << ',' << s.violations << ',' << report.samples << ',' << s.rate << ',' << s.interval.lo
        << ',' << s.interval.hi << '\n';
  }
  out << "any," << report.runs_with_violation << ',' << report.samples << ','
      << static_cast<double>(report.runs_with_violation) / static_cast<double>(std::max<std::size_t>(1, report.samples))
      << ',' << report.run_interval.lo << ',' << report.run_interval.hi << '\n';
}

void write_histogram_csv(const ViolationReport& report, std::ostream& out) {
  out << std::setprecision(17);
  out << "signal_index,delay_lo_s,delay_hi_s,samples,violations\n";
  for (const auto& b : report.histogram) {
    out << b.signal << ',' << b.lo << ',' << b.hi << ',' << b.samples << ',' << b.violations << '\n';
  }
}

}  // namespace ecodrive
