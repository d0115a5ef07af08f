#include "chainsim/experiments.hpp"

#include "chainsim/dynamics.hpp"
#include "chainsim/fitting.hpp"
#include "chainsim/floquet.hpp"
#include "chainsim/otoc.hpp"
#include "chainsim/prethermal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

namespace chainsim {

using nlohmann::json;

namespace {

const std::vector<double> kFieldGrid{0.16, 0.25, 0.33, 0.41, 0.49, 0.58, 0.66, 0.82, 0.99, 1.2, 1.3};
const std::vector<double> kAveragingGrid{3.77, 5.02, 6.28, 7.54, 8.80, 10.05};

json time_range(double start, double stop, double step) {
  return json{{"start", start}, {"stop", stop}, {"step", step}};
}

std::vector<double> parse_times(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (!j.is_object()) throw ConfigError("times must be a list or {start, stop, step}");
  const double start = j.value("start", 0.0);
  const double stop = j.at("stop").get<double>();
  const double step = j.at("step").get<double>();
  if (!(step > 0.0) || stop < start) throw ConfigError("times: need step > 0 and stop >= start");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

/// Runs fn(i) for i in [0, n) on up to `workers` threads; results keep index
/// order, and the first failure by index is rethrown.
template <class T>
std::vector<T> sweep(int workers, std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

using Rows = std::vector<std::vector<double>>;

double dense_bytes(int num_sites) {
  const double dim = std::ldexp(1.0, num_sites);
  return dim * dim * 16.0;
}

DenseOperator collective(int num_sites, Axis axis) { return to_dense(build_collective(num_sites, axis)); }

/// (4/L) ||[A, B]||^2 / 2^L.
double commutator_norm(const DenseOperator& a, const DenseOperator& b) {
  const DenseOperator c = commutator(a, b);
  return 4.0 / a.num_sites() * hs_norm_sq(c);
}

// -- fig1a -------------------------------------------------------------------

std::vector<ResultTable> run_fig1a(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  const DenseOperator z = collective(n, Axis::Z);
  const DenseOperator y = collective(n, Axis::Y);
  const auto rows = sweep<Rows>(effective_workers(cfg, 6 * dense_bytes(n)), cfg.g.size(), [&](std::size_t i) {
    const EigenSystem eig = EigenSystem::diagonalize(build_transverse_dipolar(cfg.model(cfg.g[i])));
    const auto zz = two_point_series(z, z, eig, cfg.times);
    const auto yy = two_point_series(y, y, eig, cfg.times);
    Rows r;
    for (std::size_t k = 0; k < cfg.times.size(); ++k) r.push_back({cfg.g[i], cfg.times[k], zz[k], yy[k]});
    return r;
  });
  ResultTable t{"two_point", {"g", "Jt", "zz", "yy"}, {}};
  for (const auto& r : rows) t.rows.insert(t.rows.end(), r.begin(), r.end());
  return {t};
}

// -- fig1bc ------------------------------------------------------------------

std::vector<ResultTable> run_fig1bc(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  const double t_field = cfg.param("t_field", 7.6);
  const DenseOperator z = collective(n, Axis::Z);
  const DenseOperator y = collective(n, Axis::Y);
  const auto rows = sweep<Rows>(effective_workers(cfg, 6 * dense_bytes(n)), cfg.g.size(), [&](std::size_t i) {
    const EigenSystem eig = EigenSystem::diagonalize(build_transverse_dipolar(cfg.model(cfg.g[i])));
    Rows r;
    r.push_back({cfg.g[i], t_field, oto_commutator_direct(y, z, eig, t_field)});
    for (double t : cfg.times) r.push_back({cfg.g[i], t, oto_commutator_direct(y, z, eig, t)});
    return r;
  });
  ResultTable field{"c_yz_vs_field", {"g", "Jt", "c_yz"}, {}};
  ResultTable time{"c_yz_vs_time", {"g", "Jt", "c_yz"}, {}};
  for (const auto& r : rows) {
    field.rows.push_back(r.front());
    time.rows.insert(time.rows.end(), r.begin() + 1, r.end());
  }
  return {field, time};
}

// -- fig2 --------------------------------------------------------------------

std::vector<ResultTable> run_fig2(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  const bool mqc = cfg.param("mqc_check", n <= 10);
  const DenseOperator z = collective(n, Axis::Z);
  const DenseOperator y = collective(n, Axis::Y);
  const double per_task = (mqc ? static_cast<double>(cfg.times.size()) + 6 : 6) * dense_bytes(n);
  const auto rows = sweep<std::vector<double>>(effective_workers(cfg, per_task), cfg.g.size(), [&](std::size_t i) {
    const EigenSystem eig = EigenSystem::diagonalize(build_transverse_dipolar(cfg.model(cfg.g[i])));
    const DenseOperator zt = time_average_operator(z, eig, cfg.times);
    const DenseOperator yt = time_average_operator(y, eig, cfg.times);
    double via_mqc = nan();
    if (mqc) {
      // normalized delta rho = 2 Z / sqrt(L), encoded about Z
      DenseOperator rho = z;
      rho *= Complex{2.0 / std::sqrt(static_cast<double>(n))};
      via_mqc = oto_time_averaged(rho, eig, z, cfg.times, n);
    }
    return std::vector<double>{cfg.g[i], commutator_norm(zt, z), commutator_norm(yt, y), trace_ratio(zt, z),
                               trace_ratio(yt, y), via_mqc};
  });
  ResultTable t{"time_averaged", {"g", "c_zz_avg", "c_yy_avg", "tr_ratio_z", "tr_ratio_y", "c_zz_avg_mqc"}, rows};
  return {t};
}

// -- fig3a / sm-prexx ----------------------------------------------------------

Rows gap_rows(double g, const Vector& e, const DenseSeries& s) {
  Rows r;
  for (int k = 1; k <= s.completed_orders(); ++k) {
    const Vector pre = s.h_pre_spectrum(k);
    r.push_back({g, static_cast<double>(k), eigenvalue_gap_abs(e, pre, s.num_sites()),
                 eigenvalue_gap(e, pre, s.num_sites()), s.residual(k)});
  }
  return r;
}

ResultTable optimal_orders(const Rows& rows) {
  ResultTable t{"optimal_order", {"g", "n_star", "r_at_n_star"}, {}};
  std::size_t a = 0;
  while (a < rows.size()) {
    std::size_t b = a;
    std::vector<double> r;
    while (b < rows.size() && rows[b][0] == rows[a][0]) r.push_back(rows[b++][2]);
    const int n_star = optimal_order(r);
    t.add_row({rows[a][0], static_cast<double>(n_star), r[static_cast<std::size_t>(n_star - 1)]});
    a = b;
  }
  return t;
}

std::vector<ResultTable> run_series_gaps(const RunConfig& cfg, bool alternative) {
  const int n = cfg.num_sites;
  SeriesOptions opt;
  opt.max_order = cfg.max_order;
  // every BCH intermediate is a dense block pair; about max_order^2 / 2 of them live at once
  const double per_task = 0.5 * cfg.max_order * (cfg.max_order + 3) * 0.5 * dense_bytes(n) / 2.0;
  const auto rows = sweep<Rows>(effective_workers(cfg, per_task), cfg.g.size(), [&](std::size_t i) {
    const double g = cfg.g[i];
    const OperatorSum h = build_transverse_dipolar(cfg.model(g));
    const Vector e = spectrum(h);
    const DenseSeries s =
        alternative ? alternative_generator_series(h, opt) : construct_series_dense(split_h0_v(h, g), opt);
    return gap_rows(g, e, s);
  });
  ResultTable t{"eigenvalue_difference", {"g", "n_M", "r", "r_signed", "residual"}, {}};
  for (const auto& r : rows) t.rows.insert(t.rows.end(), r.begin(), r.end());
  return {t, optimal_orders(t.rows)};
}

// -- fig3bcd -----------------------------------------------------------------

std::vector<ResultTable> run_fig3bcd(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  const HammingSpectrum base = random_operator_baseline(n);
  ResultTable spectrum_table{"hamming", {"g", "Jt", "k", "f_k", "baseline_k"}, {}};
  ResultTable summary{"hamming_summary", {"g", "Jt", "f_1", "baseline_1", "max_baseline_deviation"}, {}};
  // at L = 13 a single task already needs about three dense copies
  const auto rows = sweep<Rows>(effective_workers(cfg, 3.5 * dense_bytes(n)), cfg.g.size(), [&](std::size_t i) {
    const EigenSystem eig = EigenSystem::diagonalize(build_transverse_dipolar(cfg.model(cfg.g[i])));
    Matrix z_eig = eig.to_eigenbasis(collective(n, Axis::Z).matrix());
    Rows r;
    for (double t : cfg.times) {
      DenseOperator zt(eig.from_eigenbasis(eig.evolve_in_eigenbasis(z_eig, t)));
      const HammingSpectrum f = hamming_decompose(std::move(zt));
      for (int k = 0; k <= n; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        r.push_back({cfg.g[i], t, static_cast<double>(k), f.f[kk], base.f[kk]});
      }
    }
    return r;
  });
  for (const auto& r : rows) {
    spectrum_table.rows.insert(spectrum_table.rows.end(), r.begin(), r.end());
    for (std::size_t a = 0; a < r.size(); a += static_cast<std::size_t>(n) + 1) {
      double dev = 0.0;
      for (int k = 0; k <= n; ++k) {
        const auto& row = r[a + static_cast<std::size_t>(k)];
        dev = std::max(dev, std::abs(row[3] - row[4]));
      }
      summary.add_row({r[a][0], r[a][1], r[a + 1][3], base.f[1], dev});
    }
  }
  return {spectrum_table, summary};
}

// -- sm-decay ----------------------------------------------------------------

/// Mean spacing of the local maxima, or pi / g when fewer than two exist.
double oscillation_period(const std::vector<double>& t, const std::vector<double>& y, double g) {
  std::vector<double> peaks;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) peaks.push_back(t[i]);
  }
  if (peaks.size() < 2) return M_PI / g;
  return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

std::vector<ResultTable> run_sm_decay(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  const DenseOperator z = collective(n, Axis::Z);
  const DenseOperator y = collective(n, Axis::Y);
  struct Out {
    Rows series;
    std::vector<double> fit;
  };
  const auto outs = sweep<Out>(effective_workers(cfg, 6 * dense_bytes(n)), cfg.g.size(), [&](std::size_t i) {
    const double g = cfg.g[i];
    const EigenSystem eig = EigenSystem::diagonalize(build_transverse_dipolar(cfg.model(g)));
    const auto zz = two_point_series(z, z, eig, cfg.times);
    const auto yy = two_point_series(y, y, eig, cfg.times);
    Out o;
    for (std::size_t k = 0; k < cfg.times.size(); ++k) o.series.push_back({g, cfg.times[k], zz[k], yy[k]});
    const double period = oscillation_period(cfg.times, zz, g);
    const ExponentialFit fz = fit_exponential(cfg.times, zz, period);
    double gy = nan();
    double ry = nan();
    try {
      const ExponentialFit fy = fit_exponential(cfg.times, yy, oscillation_period(cfg.times, yy, g));
      gy = fy.gamma;
      ry = fy.residual;
    } catch (const std::invalid_argument&) {
      // <Y(t)Y> changes sign at larger fields and has no exponential envelope
    }
    o.fit = {g, period, fz.amplitude, fz.gamma, fz.residual, gy, ry};
    return o;
  });
  ResultTable series{"decay_series", {"g", "Jt", "zz", "yy"}, {}};
  ResultTable fits{"decay_fits", {"g", "period", "amplitude", "gamma", "residual", "gamma_y", "residual_y"}, {}};
  std::vector<double> gs;
  std::vector<double> gammas;
  for (const auto& o : outs) {
    series.rows.insert(series.rows.end(), o.series.begin(), o.series.end());
    fits.add_row(o.fit);
    gs.push_back(o.fit[0]);
    gammas.push_back(o.fit[3]);
  }
  std::vector<ResultTable> out{series, fits};
  if (gs.size() >= 4) {
    const DecayTrendFit e = fit_exponential_trend(gs, gammas);
    const LinearFit l = fit_linear(gs, gammas);
    out.push_back({"decay_trend",
                   {"exp_amplitude", "exp_rate", "exp_offset", "exp_residual", "lin_intercept", "lin_slope",
                    "lin_residual"},
                   {{e.amplitude, e.rate, e.offset, e.residual, l.intercept, l.slope, l.residual}}});
  }
  return out;
}

// -- sm-otoc-sim ---------------------------------------------------------------

std::vector<ResultTable> run_sm_otoc_sim(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  const double t_field = cfg.param("t_field", 7.6);
  const DenseOperator z = collective(n, Axis::Z);
  const DenseOperator y = collective(n, Axis::Y);
  const auto rows = sweep<std::vector<double>>(effective_workers(cfg, 7 * dense_bytes(n)), cfg.g.size(), [&](std::size_t i) {
    const EigenSystem eig = EigenSystem::diagonalize(build_transverse_dipolar(cfg.model(cfg.g[i])));
    const DenseOperator zinf = diagonal_ensemble(z, eig);
    const DenseOperator zt = time_average_operator(z, eig, cfg.times);
    return std::vector<double>{cfg.g[i],
                               oto_commutator_direct(y, z, eig, t_field),
                               trace_ratio(zinf, z),
                               commutator_norm(zinf, z),
                               trace_ratio(zt, z),
                               commutator_norm(zt, z)};
  });
  return {ResultTable{"otoc_panels",
                      {"g", "c_yz_field", "tr_ratio_zinf", "c_zinf_z", "tr_ratio_ztilde", "c_ztilde_z"},
                      rows}};
}

// -- sm-locality ---------------------------------------------------------------

/// S_j and D_j of every completed order in the OperatorSum text format.
void dump_series(const PrethermalSeries& s, const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  for (int k = 1; k <= s.completed_orders(); ++k) {
    const auto kk = static_cast<std::size_t>(k - 1);
    for (const auto& [tag, op] : {std::pair{"S", &s.s[kk]}, std::pair{"D", &s.d[kk]}}) {
      const auto file = dir / (stem + "_" + tag + std::to_string(k) + ".txt");
      std::ofstream os(file);
      if (!os) throw std::runtime_error("cannot write " + file.string());
      write_text(os, *op);
    }
  }
}

std::vector<ResultTable> run_sm_locality(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  SeriesOptions opt;
  opt.max_order = cfg.max_order;
  opt.term_cap = cfg.param<std::size_t>("term_cap", opt.term_cap);
  const std::string dump_dir = cfg.param<std::string>("dump_dir", "");
  const auto rows = sweep<Rows>(cfg.workers, cfg.g.size(), [&](std::size_t i) {
    const double g = cfg.g[i];
    const PrethermalSeries s = construct_series(split_h0_v(build_transverse_dipolar(cfg.model(g)), g), opt);
    if (!dump_dir.empty()) dump_series(s, dump_dir, "L" + std::to_string(n) + "_g" + std::to_string(g));
    Rows r;
    for (int k = 1; k <= s.completed_orders(); ++k) {
      const auto w = locality_profile(s.generator(k));
      for (std::size_t d = 0; d < w.size(); ++d) {
        r.push_back({g, static_cast<double>(k), static_cast<double>(d), w[d]});
      }
    }
    return r;
  });
  ResultTable t{"generator_locality", {"g", "n_M", "distance", "weight"}, {}};
  for (const auto& r : rows) t.rows.insert(t.rows.end(), r.begin(), r.end());
  return {t};
}

// -- floquet -----------------------------------------------------------------

PulseSequence sequence_from_json(const json& j) {
  PulseSequence seq;
  seq.delays = j.at("delays").get<std::vector<double>>();
  for (const auto& p : j.at("pulses")) {
    seq.pulses.push_back({p.value("phase_deg", 0.0) * M_PI / 180.0, p.value("angle_deg", 90.0) * M_PI / 180.0});
  }
  seq.pulse_width = j.value("pulse_width", 0.0);
  seq.u = j.value("u", 0.0);
  try {
    seq.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sequence: ") + e.what());
  }
  return seq;
}

/// Coefficient c minimizing ||H0 - c T|| and the remaining distance.
std::pair<double, double> project_onto(const OperatorSum& h0, const OperatorSum& target) {
  const double c = hs_inner(target, h0).real() / hs_inner(target, target).real();
  return {c, max_coefficient_distance(h0, c * target)};
}

std::vector<ResultTable> run_floquet(const RunConfig& cfg) {
  const int n = cfg.num_sites;
  if (n > kMaxFloquetSites) {
    throw ResourceGuardError("floquet: dense propagators limited to L <= " + std::to_string(kMaxFloquetSites));
  }
  const double u = cfg.param("u_sequence", 0.2);
  const int cycles = cfg.param("n_cycles", 16);
  // internal Hamiltonian in units of |J_nn|; dimensionless times are J_nn t
  SpinChainModel natural = cfg.model(0.0);
  natural.u = 1.0;
  const OperatorSum h_int = build_dipolar(natural, Axis::Z);
  const OperatorSum dy = build_dipolar(natural, Axis::Y);
  const double j_nn = std::abs(natural.J);
  const double jeff_tc = cfg.param("jeff_tc", 0.62);
  const double tc_default = jeff_tc / (u * j_nn);
  const double tau_default = tc_default / 24.0;

  ResultTable engineered{"average_hamiltonian",
                         {"kind", "u", "tau", "pulse_width", "h0_dy_coefficient", "h0_dy_distance",
                          "h1_max_coefficient", "rf_cycle_residual"},
                         {}};
  const auto widths = cfg.param<std::vector<double>>("pulse_widths", {0.0});
  for (int kind = 0; kind < 2; ++kind) {
    for (double w : widths) {
      const PulseSequence seq =
          build_sequence(kind == 0 ? SequenceKind::Forward : SequenceKind::Backward, u, tau_default, w);
      const auto frames = toggling_hamiltonians(seq, h_int);
      const auto [c, dist] = project_onto(average_hamiltonian(frames, 0), dy);
      engineered.add_row({static_cast<double>(kind), u, tau_default, w, c, dist,
                          average_hamiltonian(frames, 1).max_abs_coefficient(),
                          (rf_cycle_rotation(seq) - Rotation::Identity()).norm()});
    }
  }

  ResultTable scaling{"cycle_defect", {"tau", "t_c", "cycle_defect", "total_defect", "first_order_norm"}, {}};
  const auto taus = cfg.param<std::vector<double>>("taus", {0.01, 0.02, 0.04, 0.08, 0.16});
  const auto defects = sweep<std::vector<double>>(cfg.workers, taus.size(), [&](std::size_t i) {
    const PulseSequence seq = build_sequence(SequenceKind::Forward, u, taus[i]);
    const EngineeringReport rep = verify_engineering(seq, h_int, cycles);
    return std::vector<double>{taus[i], seq.period(), rep.cycle_defect, rep.total_defect, rep.first_order_norm};
  });
  scaling.rows = defects;

  ResultTable shift{"phase_shift",
                    {"g_over_jeff", "g", "phi", "n_cycles", "telescoping_error", "absorption_error",
                     "zeroth_order_error"},
                    {}};
  const auto fields = cfg.param<std::vector<double>>("phase_fields", {1.5e-3, 0.05, 0.5});
  const PulseSequence base = build_sequence(SequenceKind::Forward, u, tau_default);
  shift.rows = sweep<std::vector<double>>(cfg.workers, fields.size(), [&](std::size_t i) {
    const double g = fields[i] * u * j_nn;
    const double phi = -g * base.period();
    const PhaseShiftReport rep = phase_shift_field(base, h_int, cycles, phi);
    return std::vector<double>{fields[i], rep.g, phi, static_cast<double>(cycles), rep.telescoping_error,
                               rep.absorption_error, rep.zeroth_order_error};
  });

  std::vector<ResultTable> out{engineered, scaling, shift};
  if (cfg.params.contains("sequence")) {
    const PulseSequence custom = sequence_from_json(cfg.params.at("sequence"));
    const auto frames = toggling_hamiltonians(custom, h_int);
    const auto [c, dist] = project_onto(average_hamiltonian(frames, 0), dy);
    out.push_back({"custom_sequence",
                   {"t_c", "h0_dy_coefficient", "h0_dy_distance", "h1_max_coefficient", "rf_cycle_residual"},
                   {{custom.period(), c, dist, average_hamiltonian(frames, 1).max_abs_coefficient(),
                     (rf_cycle_rotation(custom) - Rotation::Identity()).norm()}}});
  }
  return out;
}

using Runner = std::function<std::vector<ResultTable>(const RunConfig&)>;

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> list = [] {
    const json grid = kFieldGrid;
    std::vector<Entry> e;
    e.push_back({{"fig1a", "two-point correlators <Z(t)Z> and <Y(t)Y>",
                  {{"L", 12}, {"g", {0.25, 1.0}}, {"times", time_range(0, 10, 0.1)}}},
                 run_fig1a});
    e.push_back({{"fig1bc", "C_YZ against field at fixed Jt and against time",
                  {{"L", 12}, {"g", grid}, {"times", {2.0, 4.0, 6.0, 8.0, 10.0}}, {"t_field", 7.6}}},
                 run_fig1bc});
    e.push_back({{"fig2", "time-averaged C_ZZ, C_YY and Tr ratios over the averaging grid",
                  {{"L", 12}, {"g", grid}, {"times", kAveragingGrid}}},
                 run_fig2});
    e.push_back({{"fig3a", "eigenvalue difference r against truncation order, H0 = Z",
                  {{"L", 10}, {"g", {0.25, 0.5, 1.0, 2.0}}, {"max_order", 12}}},
                 [](const RunConfig& c) { return run_series_gaps(c, false); }});
    e.push_back({{"fig3bcd", "Hamming-weight spectrum of Z(t)",
                  {{"L", 13}, {"g", {0.05, 0.5, 5.0}}, {"times", {1.0, 10.0, 100.0, 1000.0}}}},
                 run_fig3bcd});
    e.push_back({{"sm-decay", "exponential fits of the <Z(t)Z> envelope",
                  {{"L", 12}, {"g", grid}, {"times", time_range(0, 10.05, 0.015)}}},
                 run_sm_decay});
    e.push_back({{"sm-otoc-sim", "diagonal-ensemble and time-averaged OTOC panels",
                  {{"L", 12}, {"g", grid}, {"times", kAveragingGrid}, {"t_field", 7.6}}},
                 run_sm_otoc_sim});
    e.push_back({{"sm-locality", "distance profile of the prethermal generator",
                  {{"L", 8}, {"g", {1.0, 2.0}}, {"max_order", 4}}},
                 run_sm_locality});
    e.push_back({{"sm-prexx", "eigenvalue difference with the nearest-neighbour yy generator",
                  {{"L", 11}, {"g", {0.16, 0.5, 1.0, 2.0, 5.0}}, {"max_order", 6}}},
                 [](const RunConfig& c) { return run_series_gaps(c, true); }});
    e.push_back({{"floquet", "average Hamiltonians, cycle defect scaling and phase-shift field",
                  {{"L", 6}, {"g", {0.0}}, {"u_sequence", 0.2}, {"n_cycles", 16}}},
                 run_floquet});
    return e;
  }();
  return list;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : entries()) {
    if (e.info.name == name) return e;
  }
  throw ConfigError("unknown experiment '" + name + "'");
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) { return find_entry(name).info; }

RunConfig RunConfig::from_json(const std::string& experiment, const json& user) {
  if (!user.is_object()) throw ConfigError("config must be a JSON object");
  const std::string name = experiment.empty() ? user.value("experiment", std::string{}) : experiment;
  json j = find_experiment(name).defaults;
  j.merge_patch(user);
  RunConfig c;
  c.experiment = name;
  try {
    c.num_sites = j.at("L").get<int>();
    c.J = j.value("J", -1.0);
    c.u = j.value("u", 1.0);
    c.g = j.at("g").is_array() ? j.at("g").get<std::vector<double>>() : std::vector<double>{j.at("g").get<double>()};
    c.range = parse_range(j.value("range", std::string("power_law")));
    c.max_order = j.value("max_order", 0);
    c.workers = j.value("workers", 1);
    c.seed = j.value("seed", std::uint64_t{0});
    c.memory_budget = j.value("memory_budget_gb", 4.0) * 1e9;
    if (j.contains("times_us")) {
      // physical input: J_nn in krad/s and times in microseconds
      const double j_nn = j.at("J_nn_krad_s").get<double>() * 1e3;
      const double u_seq = j.value("u_sequence", 0.2);
      for (double t : j.at("times_us").get<std::vector<double>>()) {
        c.times.push_back(dimensionless_time(u_seq, j_nn, t * 1e-6));
      }
    } else if (j.contains("times")) {
      c.times = parse_times(j.at("times"));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const char* key : {"experiment", "L", "J", "u", "g", "range", "times", "max_order", "workers", "seed",
                          "memory_budget_gb", "times_us", "J_nn_krad_s", "out"}) {
    j.erase(key);
  }
  c.params = std::move(j);
  c.validate();
  return c;
}

json RunConfig::to_json() const {
  json j = params;
  j["experiment"] = experiment;
  j["L"] = num_sites;
  j["J"] = J;
  j["u"] = u;
  j["g"] = g;
  j["range"] = to_string(range);
  j["times"] = times;
  j["max_order"] = max_order;
  j["workers"] = workers;
  j["seed"] = seed;
  j["memory_budget_gb"] = memory_budget / 1e9;
  return j;
}

void RunConfig::validate() const {
  find_experiment(experiment);
  if (g.empty()) throw ConfigError("g list must be non-empty");
  if (num_sites < 2) throw ConfigError("L must be >= 2");
  check_dense_sites(num_sites);
  if (workers < 1) throw ConfigError("workers must be >= 1");
  try {
    model(g.front()).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SpinChainModel RunConfig::model(double field) const {
  SpinChainModel m;
  m.num_sites = num_sites;
  m.J = J;
  m.u = u;
  m.g = field;
  m.range = range;
  return m;
}

void ResultTable::add_row(std::vector<double> row) {
  if (!columns.empty() && row.size() != columns.size()) {
    throw std::invalid_argument("ResultTable " + name + ": row width does not match columns");
  }
  rows.push_back(std::move(row));
}

void ResultTable::write_csv(const std::filesystem::path& file) const {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << "\n";
  char buf[32];
  for (const auto& r : rows) {
    if (r.size() != columns.size()) throw std::runtime_error("ResultTable " + name + " is not rectangular");
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      os << (i ? "," : "") << buf;
    }
    os << "\n";
  }
}

std::vector<ResultTable> run_experiment(const RunConfig& cfg) {
  cfg.validate();
  return find_entry(cfg.experiment).run(cfg);
}

void write_results(const std::vector<ResultTable>& tables, const RunConfig& cfg,
                   const std::filesystem::path& out_dir, double wall_seconds) {
  std::filesystem::create_directories(out_dir);
  json meta;
  meta["engine_version"] = kEngineVersion;
  meta["config"] = cfg.to_json();
  meta["wall_time_seconds"] = wall_seconds;
  meta["tables"] = json::array();
  for (const auto& t : tables) {
    const std::string file = cfg.experiment + "_" + t.name + ".csv";
    t.write_csv(out_dir / file);
    meta["tables"].push_back({{"name", t.name}, {"file", file}, {"columns", t.columns}, {"rows", t.rows.size()}});
  }
  std::ofstream os(out_dir / (cfg.experiment + "_metadata.json"));
  os << meta.dump(2) << "\n";
}

int effective_workers(const RunConfig& cfg, double bytes_per_task) {
  const double fit = std::floor(cfg.memory_budget / std::max(bytes_per_task, 1.0));
  return std::max(1, std::min(cfg.workers, static_cast<int>(fit)));
}

}  // namespace chainsim
