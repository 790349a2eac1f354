#include "mqc/runner/pipelines.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "mqc/errors.hpp"
#include "mqc/metrology.hpp"
#include "mqc/oracle.hpp"
#include "mqc/parallel.hpp"
#include "mqc/runner/output.hpp"

namespace mqc::runner {

namespace fs = std::filesystem;

namespace {

struct Context {
  const RunConfig& cfg;
  fs::path root;
  fs::path dir;  // pipeline output directory
  std::string run_id;
  std::vector<std::string>* files;
  json* entry;  // manifest record of the pipeline

  fs::path file(const std::string& name) const {
    const fs::path p = dir / name;
    files->push_back(fs::relative(p, root).generic_string());
    (*entry)["files"].push_back(files->back());
    return p;
  }
  void warn(const std::string& w) const { (*entry)["warnings"].push_back(w); }
  void warn(const std::vector<std::string>& ws) const {
    for (const auto& w : ws) warn(w);
  }
};

void write_spectrum(const Context& ctx, const std::string& name, const CoherenceSpectrum& s) {
  CsvWriter csv(ctx.file(name), ctx.run_id, {"q", "intensity"});
  for (const auto& [q, v] : s.intensities) {
    csv << q << v;
    csv.end_row();
  }
  csv.close();
}

Series spectrum_series(const CoherenceSpectrum& s, const std::string& label) {
  Series sr{label, {}, {}};
  for (const auto& [q, v] : s.intensities) {
    sr.x.push_back(q);
    sr.y.push_back(v);
  }
  return sr;
}

void basis_info(const Context& ctx, const BasisInfoParams& p) {
  {
    CsvWriter csv(ctx.file("basis_counts.csv"), ctx.run_id, {"n_spins", "label_count", "expected"});
    for (int n = 1; n <= p.n_spins; ++n) {
      csv << n << static_cast<int>(enumerate_basis(n)->size())
          << static_cast<int>(expected_basis_size(n));
      csv.end_row();
    }
    csv.close();
  }
  if (!p.labels) return;
  const auto b = enumerate_basis(p.n_spins);
  CsvWriter csv(ctx.file("basis.csv"), ctx.run_id, {"index", "m", "n", "h", "q", "norm"});
  for (std::size_t i = 0; i < b->size(); ++i) {
    const Label& l = b->label(i);
    csv << static_cast<int>(i) << l.m << l.n << l.h << l.order() << b->norm(i);
    csv.end_row();
  }
  csv.close();
  (*ctx.entry)["summary"] = {{"label_count", b->size()}};
}

void build_cluster_pipeline(const Context& ctx, const BuildClusterParams& p) {
  const auto b = enumerate_basis(p.cluster.n_spins);
  SymOperator rho = build_cluster(p.cluster, b);
  if (p.dephasing > 0.0) rho = dephase(rho, p.dephasing);
  const CoherenceSpectrum s = coherence_spectrum(rho);
  write_spectrum(ctx, "cluster_spectrum.csv", s);
  (*ctx.entry)["summary"] = {{"trace", rho.trace().real()},
                             {"hs_norm_squared", rho.coeffs().squaredNorm()},
                             {"lambda", p.cluster.mixing * positivity_bound(p.cluster.n_spins)}};
  if (ctx.cfg.plots) {
    write_svg_plot(ctx.file("cluster_spectrum.svg"), "cluster coherence spectrum", "q", "intensity",
                   {spectrum_series(s, "")}, ctx.run_id);
  }
}

int resolvable_order(const Context& ctx, int n_spins, int points) {
  const int m = points - 1;  // phase_grid includes pi
  if (n_spins < m) return n_spins;
  ctx.warn("orders above " + std::to_string(m - 1) + " are not resolvable with " +
           std::to_string(points) + " phase points; spectrum truncated");
  return m - 1;
}

void mqc_scan(const Context& ctx, const ScanParams& p) {
  const auto b = enumerate_basis(p.n_spins);
  EvolutionConfig evo = p.evolution;
  evo.threads = ctx.cfg.threads;
  const ScanResult scan = phase_scan(initial_state(p.initial, b), evo, phase_grid(p.phase_points),
                                     std::nullopt, p.method);
  ctx.warn(scan.warnings);
  {
    CsvWriter csv(ctx.file("scan.csv"), ctx.run_id, {"phi", "signal"});
    for (std::size_t k = 0; k < scan.phi.size(); ++k) {
      csv << scan.phi[k] << scan.signal[k];
      csv.end_row();
    }
    csv.close();
  }
  const CoherenceSpectrum spec =
      spectrum_from_scan(scan, p.suppress_zero, resolvable_order(ctx, p.n_spins, p.phase_points));
  write_spectrum(ctx, "spectrum.csv", spec);
  if (p.fit) {
    try {
      const ClusterFit f = gaussian_fit(spec, p.suppress_zero);
      json j = {{"fwhh", f.fwhh},         {"amplitude", f.amplitude}, {"n_cl", f.n_cl},
                {"residual", f.residual}, {"points", f.points},       {"run_id", ctx.run_id},
                {"manifest", "manifest.json"}};
      write_text(ctx.file("fit.json"), j.dump(2) + "\n");
    } catch (const FitError& e) {
      ctx.warn(std::string("gaussian fit skipped: ") + e.what());
    }
  }
  if (ctx.cfg.plots) {
    write_svg_plot(ctx.file("scan.svg"), "phase scan", "phi (rad)", "S(phi)",
                   {{"", scan.phi, scan.signal}}, ctx.run_id);
    write_svg_plot(ctx.file("spectrum.svg"), "coherence spectrum", "q", "intensity",
                   {spectrum_series(spec, "")}, ctx.run_id);
  }
}

void jitter_sweep_pipeline(const Context& ctx, const JitterSweepParams& p) {
  const auto b = enumerate_basis(p.n_spins);
  JitterSweepSpec spec;
  spec.evolution = p.evolution;
  spec.evolution.threads = ctx.cfg.threads;
  spec.deltas = p.deltas;
  spec.m_c = p.m_c;
  spec.phase_points = p.phase_points;
  spec.suppress_zero = p.suppress_zero;
  resolvable_order(ctx, p.n_spins, p.phase_points);
  const JitterSweepResult r = jitter_sweep(initial_state(p.initial, b), spec);
  ctx.warn(r.warnings);
  {
    CsvWriter csv(ctx.file("distortion.csv"), ctx.run_id, {"delta", "m_c", "D"});
    for (const auto& row : r.rows) {
      csv << row.delta << row.m_c << row.value;
      csv.end_row();
    }
    csv.close();
  }
  {
    CsvWriter csv(ctx.file("sweep_spectra.csv"), ctx.run_id, {"delta", "q", "intensity"});
    for (std::size_t i = 0; i < r.spectra.size(); ++i) {
      for (const auto& [q, v] : r.spectra[i].intensities) {
        csv << p.deltas[i] << q << v;
        csv.end_row();
      }
    }
    csv.close();
  }
  if (ctx.cfg.plots) {
    std::vector<Series> series;
    for (int m : p.m_c) {
      Series s{"m_c=" + std::to_string(m), {}, {}};
      for (const auto& row : r.rows) {
        if (row.m_c != m) continue;
        s.x.push_back(row.delta);
        s.y.push_back(row.value);
      }
      series.push_back(std::move(s));
    }
    write_svg_plot(ctx.file("distortion.svg"), "distortion variance", "delta / tau_pi2", "D", series,
                   ctx.run_id);
  }
}

void qfi_sweep_pipeline(const Context& ctx, const QfiSweepParams& p) {
  QfiSweepOptions opts;
  opts.gaussian_width = p.gaussian_width;
  opts.mixing = p.mixing;
  opts.threads = ctx.cfg.threads;
  for (WeightMode mode : p.modes) {
    const auto rows = qfi_vs_max_order(p.n_spins, p.m_c, p.p, mode, opts);
    const std::string tag = to_string(mode);
    CsvWriter csv(ctx.file("qfi_" + tag + ".csv"), ctx.run_id, {"p", "m_c", "qfi", "precision_bound"});
    for (const auto& row : rows) {
      ctx.warn(row.warnings);
      // Single-shot quantum Cramer-Rao bound on the phase.
      const double bound = row.qfi > 0.0 ? 1.0 / std::sqrt(row.qfi) : HUGE_VAL;
      csv << row.p << row.m_c << row.qfi << bound;
      csv.end_row();
    }
    csv.close();
    if (ctx.cfg.plots) {
      std::vector<Series> series;
      for (double pv : p.p) {
        Series s{"p=" + format_double(pv), {}, {}};
        for (const auto& row : rows) {
          if (row.p != pv) continue;
          s.x.push_back(row.m_c);
          s.y.push_back(row.qfi);
        }
        series.push_back(std::move(s));
      }
      write_svg_plot(ctx.file("qfi_" + tag + ".svg"), "QFI vs maximum order (" + tag + ")", "m_c", "F_Q",
                     series, ctx.run_id);
    }
  }
}

bool oracle_pipeline(const Context& ctx, const OracleParams& p) {
  const auto checks = oracle_checks(p.n_spins, p.samples, ctx.cfg.seed, ctx.cfg.threads);
  json list = json::array();
  bool ok = true;
  CsvWriter csv(ctx.file("oracle_validation.csv"), ctx.run_id,
                {"test", "n_spins", "samples", "tolerance", "max_deviation", "pass"});
  for (const auto& c : checks) {
    csv << c.test << c.n_spins << c.samples << c.tolerance << c.max_deviation << (c.pass() ? 1 : 0);
    csv.end_row();
    list.push_back({{"test", c.test},
                    {"n_spins", c.n_spins},
                    {"tolerance", c.tolerance},
                    {"max_deviation", c.max_deviation},
                    {"pass", c.pass()}});
    ok = ok && c.pass();
  }
  csv.close();
  json report = {{"run_id", ctx.run_id}, {"manifest", "manifest.json"}, {"all_pass", ok}, {"checks", list}};
  write_text(ctx.file("oracle_report.json"), report.dump(2) + "\n");
  if (!ok) ctx.warn("oracle comparison failed for at least one operation");
  return ok;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

SymOperator initial_state(const InitialState& s, const BasisPtr& basis) {
  SymOperator rho = s.kind == InitialKind::Cluster ? build_cluster(s.cluster, basis)
                    : s.kind == InitialKind::Ghz   ? ghz_state(basis)
                                                   : thermal_state(basis);
  if (s.dephasing > 0.0) rho = dephase(rho, s.dephasing);
  return rho;
}

RunResult run(const RunConfig& cfg, const fs::path& out_dir) {
  RunResult result;
  result.out_dir = out_dir;
  fs::create_directories(out_dir);
  const std::string id = cfg.run_id();
  json entries = json::array();
  for (std::size_t i = 0; i < cfg.pipelines.size(); ++i) {
    const Pipeline& p = cfg.pipelines[i];
    json entry = {{"type", p.type}, {"files", json::array()}, {"warnings", json::array()}};
    if (!p.name.empty()) entry["name"] = p.name;
    const fs::path dir = p.name.empty() ? out_dir : out_dir / p.name;
    fs::create_directories(dir);
    Context ctx{cfg, out_dir, dir, id, &result.files, &entry};
    if (p.basis_info) basis_info(ctx, *p.basis_info);
    if (p.build_cluster) build_cluster_pipeline(ctx, *p.build_cluster);
    if (p.scan) mqc_scan(ctx, *p.scan);
    if (p.jitter_sweep) jitter_sweep_pipeline(ctx, *p.jitter_sweep);
    if (p.qfi_sweep) qfi_sweep_pipeline(ctx, *p.qfi_sweep);
    if (p.oracle && !oracle_pipeline(ctx, *p.oracle)) result.oracle_failures = true;
    entries.push_back(entry);
  }
  result.manifest = {{"run_id", id},
                     {"timestamp", utc_timestamp()},
                     {"artifact_version", MQC_VERSION},
                     {"config_digest", "sha256:" + cfg.source_digest},
                     {"threads", cfg.threads},
                     {"csv_format", "17 significant digits, '.' decimal, LF line ends"},
                     {"parameters", cfg.resolved},
                     {"pipelines", entries}};
  write_text(out_dir / "manifest.json", result.manifest.dump(2) + "\n");
  return result;
}

namespace {

using oracle::Mat;

SymOperator random_operator(const BasisPtr& b, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  SymOperator x(b);
  for (Eigen::Index i = 0; i < x.coeffs().size(); ++i) x.coeffs()[i] = cplx(g(rng), g(rng));
  x.coeffs() /= x.coeffs().norm();
  return x;
}

SymOperator random_hermitian(const BasisPtr& b, std::mt19937_64& rng) {
  SymOperator x = random_operator(b, rng);
  x += x.adjoint();
  x.coeffs() /= x.coeffs().norm();
  return x;
}

// Full-rank state A A^dagger / Tr built in the dense picture.
SymOperator random_state(const BasisPtr& b, std::mt19937_64& rng) {
  const Mat a = oracle::embed(random_operator(b, rng));
  Mat r = a * a.adjoint() + 1e-3 * Mat::Identity(a.rows(), a.cols());
  r /= r.trace().real();
  return oracle::project(r, b);
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

constexpr int kChecks = 6;
const char* kNames[kChecks] = {"multiply", "rotate_z", "dephase", "propagate", "coherence_spectrum", "qfi"};
const double kTolerance[kChecks] = {1e-10, 1e-12, 1e-10, 1e-8, 1e-12, 1e-6};

std::array<double, kChecks> one_sample(int n, std::uint64_t seed, int k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(k)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto b = enumerate_basis(n);
  std::array<double, kChecks> dev{};

  const SymOperator x = random_hermitian(b, rng);
  const SymOperator y = random_hermitian(b, rng);
  const Mat ex = oracle::embed(x);
  const Mat ey = oracle::embed(y);
  const Mat xy = ex * ey;
  dev[0] = max_abs(oracle::embed(multiply(x, y)) - xy);

  const double phi = 2.0 * std::numbers::pi * u(rng);
  dev[1] = max_abs(oracle::embed(rotate_z(x, phi)) - oracle::rotate_z(ex, phi));

  const SymOperator rho = random_state(b, rng);
  const Mat er = oracle::embed(rho);
  const double p = u(rng);
  dev[2] = max_abs(oracle::embed(dephase(rho, p)) - oracle::dephase_kraus(er, p));

  const double d = 0.5 + u(rng);
  const double t = 0.2 + u(rng);
  const SymOperator h = dq_hamiltonian(b, d);
  const SymOperator v = v_operator(b, 2.0 * d);
  // Dissipation strength of order one over t: kappa ||V||^2 <= 0.5.
  const double nv = Eigen::SelfAdjointEigenSolver<Mat>(oracle::embed(v), Eigen::EigenvaluesOnly)
                        .eigenvalues()
                        .cwiseAbs()
                        .maxCoeff();
  const double kappa = (k % 2) ? 0.5 * u(rng) / (nv * nv) : 0.0;
  const auto prop = propagate(rho, h, v, kappa, t, 32);
  const Mat eh = oracle::embed(h);
  const Mat exact = kappa == 0.0 ? oracle::evolve_unitary(er, eh, t)
                                 : oracle::evolve_lindblad(er, eh, oracle::embed(v), kappa, t);
  dev[3] = oracle::trace_distance(oracle::embed(prop.state), exact);

  const CoherenceSpectrum s = coherence_spectrum(x);
  const auto es = oracle::coherence_spectrum(ex);
  for (int q = -n; q <= n; ++q) {
    dev[4] = std::max(dev[4], std::abs(s.at(q) - es[static_cast<std::size_t>(q + n)]));
  }

  const SymOperator g = (k % 2) ? collective_z(b) : random_hermitian(b, rng);
  const double fast = qfi(rho, g).value;
  const double ref = oracle::qfi_exact(er, oracle::embed(g));
  dev[5] = std::abs(fast - ref) / std::max(std::abs(ref), 1e-300);
  return dev;
}

}  // namespace

std::vector<OracleCheck> oracle_checks(const std::vector<int>& n_spins, int samples,
                                       std::uint64_t seed, int threads) {
  std::vector<OracleCheck> out;
  for (int n : n_spins) {
    oracle::check_size(n);
    std::vector<std::array<double, kChecks>> dev(static_cast<std::size_t>(samples));
    parallel_for(dev.size(), threads,
                 [&](std::size_t k) { dev[k] = one_sample(n, seed, static_cast<int>(k)); });
    for (int c = 0; c < kChecks; ++c) {
      OracleCheck oc{kNames[c], n, samples, kTolerance[c], 0.0};
      for (const auto& d : dev) oc.max_deviation = std::max(oc.max_deviation, d[c]);
      out.push_back(oc);
    }
  }
  return out;
}

}  // namespace mqc::runner
