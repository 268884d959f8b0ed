// kdarts command line: volume error curves, maximal Poisson-disk runs, and
// probability-of-failure experiments, all emitting seeded deterministic CSV.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "kdarts/error_curve.hpp"
#include "kdarts/mps.hpp"
#include "kdarts/pof.hpp"
#include "kdarts/rng.hpp"

#ifndef KDARTS_VERSION
#define KDARTS_VERSION "0.0.0"
#endif

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw CLI::ValidationError("bad number '" + tok + "'");
  }
  if (pos != tok.size()) throw CLI::ValidationError("bad number '" + tok + "'");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

// "1e2:1e5" expands geometrically by x10; otherwise a comma list of counts.
std::vector<std::uint64_t> parse_counts(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw CLI::ValidationError("bad range '" + text + "'");
    const double lo = parse_number(parts[0]);
    const double hi = parse_number(parts[1]);
    if (lo < 1.0 || hi < lo) throw CLI::ValidationError("bad range '" + text + "'");
    for (double v = lo; v <= hi * 1.0000001; v *= 10.0)
      out.push_back(static_cast<std::uint64_t>(v + 0.5));
  } else {
    for (const auto& tok : split(text, ',')) {
      const double v = parse_number(tok);
      if (v < 1.0) throw CLI::ValidationError("bad count '" + tok + "'");
      out.push_back(static_cast<std::uint64_t>(v + 0.5));
    }
  }
  if (out.empty()) throw CLI::ValidationError("empty list '" + text + "'");
  return out;
}

// "2:6" expands linearly by +1; otherwise a comma list.
std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw CLI::ValidationError("bad range '" + text + "'");
    const int lo = static_cast<int>(parse_number(parts[0]) + 0.5);
    const int hi = static_cast<int>(parse_number(parts[1]) + 0.5);
    if (lo < 1 || hi < lo) throw CLI::ValidationError("bad range '" + text + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  } else {
    for (const auto& tok : split(text, ','))
      out.push_back(static_cast<int>(parse_number(tok) + 0.5));
  }
  if (out.empty()) throw CLI::ValidationError("empty list '" + text + "'");
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& tok : split(text, ',')) out.push_back(parse_number(tok));
  if (out.empty()) throw CLI::ValidationError("empty list '" + text + "'");
  return out;
}

std::uint64_t parse_count(const std::string& text, bool allow_zero = false) {
  const double v = parse_number(text);
  if (v < (allow_zero ? 0.0 : 1.0))
    throw CLI::ValidationError("bad count '" + text + "'");
  return static_cast<std::uint64_t>(v + 0.5);
}

// "name.csv" + "_hist" -> "name_hist.csv"
std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of("/\\");
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

// Writes to <path>.tmp and renames on commit; an uncommitted file (error
// path) is removed by the destructor so failures leave no partial output.
class CsvFile {
 public:
  explicit CsvFile(std::string path) : path_(std::move(path)), tmp_(path_ + ".tmp") {
    out_.open(tmp_, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("cannot open output " + tmp_);
  }
  ~CsvFile() {
    if (!committed_) {
      out_.close();
      std::error_code ec;
      std::filesystem::remove(tmp_, ec);
    }
  }
  std::ofstream& stream() { return out_; }
  void commit() {
    out_.flush();
    if (!out_) throw std::runtime_error("write failed for " + tmp_);
    out_.close();
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
  }

 private:
  std::string path_, tmp_;
  std::ofstream out_;
  bool committed_ = false;
};

struct Common {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware parallelism
  int reps = 100;
  std::string out;
  bool timing = false;  // wall_s columns print 0 unless set, for byte replay
  std::string invocation;

  int resolved_threads() const {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
  }
  double wall(double seconds) const { return timing ? seconds : 0.0; }
  void header(std::ofstream& os) const {
    os << "# kdarts " << KDARTS_VERSION << " | cmd: " << invocation
       << " | seed: " << seed << "\n";
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--threads", c.threads,
                  "worker threads (default: hardware)");
  cmd->add_option("--reps", c.reps, "replications per cell")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output CSV path")->required();
  cmd->add_flag("--timing", c.timing,
                "record wall times (breaks byte-identical replay)");
}

// ---------------------------------------------------------------- volume --

struct VolumeArgs {
  Common common;
  std::string object = "sphere";
  int d = 3;
  double squish = 0.5;
  int rotations = 10;
  std::string k_list = "0,1,2";
  std::string n_range = "1e2:1e4";
  std::string sampler = "mc";
  bool unaligned = false;
};

int run_volume(const VolumeArgs& a) {
  using namespace kdarts;
  const VolumeObject obj =
      a.object == "sphere"
          ? VolumeObject::unit_sphere(a.d)
          : VolumeObject::random_ellipsoid(a.d, a.squish, a.rotations,
                                           RngStream(a.common.seed, 0x6f626a));
  ErrorCurveConfig cfg;
  cfg.sampler = a.sampler == "lhs" ? SamplerKind::latin_hypercube
                                   : SamplerKind::monte_carlo;
  if (a.unaligned) {
    if (a.d != 2)
      throw CLI::ValidationError("--unaligned needs --d 2");
    if (cfg.sampler != SamplerKind::monte_carlo)
      throw CLI::ValidationError("--unaligned needs --sampler mc");
    cfg.ks = {{1, FlatVariant::aligned, "1a"},
              {1, FlatVariant::oriented_single, "1r"},
              {1, FlatVariant::oriented_pair, "1o"}};
  } else {
    for (int k : parse_dims(a.k_list)) {
      if (k < 0 || k > a.d)
        throw CLI::ValidationError("k out of range for --d");
      cfg.ks.push_back({k, FlatVariant::aligned, std::to_string(k)});
    }
  }
  cfg.flat_budgets = parse_counts(a.n_range);
  cfg.replications = a.common.reps;
  cfg.seed = a.common.seed;
  cfg.threads = a.common.resolved_threads();
  cfg.keep_ratios = true;

  const auto cells = error_curve(obj, cfg);

  CsvFile csv(a.common.out);
  CsvFile hist(with_suffix(a.common.out, "_hist"));
  a.common.header(csv.stream());
  csv.stream() << "k,n,rms_rel,mean_abs_rel,std_err,wall_s\n";
  a.common.header(hist.stream());
  hist.stream() << "k,n,rep,ratio\n";
  for (const auto& c : cells) {
    csv.stream() << c.k.label << ',' << c.n << ',' << fmt(c.rms_rel) << ','
                 << fmt(c.mean_abs_rel) << ',' << fmt(c.std_err_rel) << ','
                 << fmt(a.common.wall(c.wall_s)) << '\n';
    for (std::size_t r = 0; r < c.ratios.size(); ++r)
      hist.stream() << c.k.label << ',' << c.n << ',' << r << ','
                    << fmt(c.ratios[r]) << '\n';
  }
  csv.commit();
  hist.commit();
  return 0;
}

// ------------------------------------------------------------------- mps --

struct MpsArgs {
  Common common;
  int d = 2;
  double r_f = 0.1;
  double void_fraction = 1e-2;
  std::string dart = "line";
  std::string max_darts = "0";
  double time_budget = 0.0;
  std::string probes = "1e4";
};

int run_mps_cmd(const MpsArgs& a) {
  using namespace kdarts;
  using namespace kdarts::mps;
  MpsConfig cfg;
  cfg.dim = a.d;
  cfg.r_f = a.r_f;
  cfg.void_fraction = a.void_fraction;
  cfg.dart_kind = a.dart == "point" ? DartKind::point : DartKind::line;
  cfg.max_darts = parse_count(a.max_darts, true);
  cfg.time_budget_s = a.time_budget;

  auto [cloud, stats] = run_mps(cfg, RngStream(a.common.seed, 0));
  const QualityReport q = measure_quality(cloud, cfg.r_f,
                                          parse_count(a.probes, true),
                                          RngStream(a.common.seed, 1),
                                          a.common.resolved_threads());

  CsvFile csv(a.common.out);
  auto& os = csv.stream();
  a.common.header(os);
  os << "# points: " << cloud.size() << " | hits: " << stats.hits
     << " | misses: " << stats.misses
     << " | r_f_measured: " << fmt(q.r_f_measured)
     << " | r_c_estimate: " << fmt(q.r_c_estimate)
     << " | aspect_ratio: " << fmt(q.aspect_ratio)
     << " | peak_memory_bytes: " << stats.peak_memory_bytes
     << " | max_segment_endpoints: " << stats.max_segment_endpoints << "\n";
  os << "event,wall_s,points,misses_consec\n";
  for (std::size_t i = 0; i < stats.inserted_over_time.size(); ++i) {
    const auto& e = stats.inserted_over_time[i];
    const bool last = i + 1 == stats.inserted_over_time.size();
    os << (last ? "final" : "insert") << ',' << fmt(a.common.wall(e.wall_s))
       << ',' << e.points << ',' << e.miss_run << '\n';
  }

  CsvFile cloud_csv(with_suffix(a.common.out, "_cloud"));
  auto& cs = cloud_csv.stream();
  a.common.header(cs);
  cs << "# d: " << cfg.dim << " | n: " << cloud.size()
     << " | r_f: " << fmt(cfg.r_f) << "\n";
  for (int j = 0; j < cfg.dim; ++j) cs << (j ? ",x" : "x") << j;
  cs << '\n';
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    for (int j = 0; j < cfg.dim; ++j)
      cs << (j ? "," : "") << fmt(p[static_cast<std::size_t>(j)]);
    cs << '\n';
  }
  csv.commit();
  cloud_csv.commit();
  return 0;
}

// ------------------------------------------------------------------- pof --

struct PofArgs {
  Common common;
  std::string surface = "parabola";
  std::string d_range = "2:6";
  std::string pf_list = "1e-5";
  std::string k_list = "0,1";
  std::string n_flats = "1e5";
  std::string speedup_base = "2e4";
  int speedup_reps = 10;
};

int run_pof(const PofArgs& a) {
  using namespace kdarts;
  using namespace kdarts::pof;
  const SurfaceKind kind = a.surface == "cross" ? SurfaceKind::planar_cross
                                                : SurfaceKind::circular_parabola;
  const auto dims = parse_dims(a.d_range);
  const auto pfs = parse_doubles(a.pf_list);
  const auto ks = parse_dims(a.k_list);
  for (int k : ks)
    if (k != 0 && k != 1) throw CLI::ValidationError("--k must be 0 or 1");
  const std::uint64_t n_flats = parse_count(a.n_flats);
  const std::uint64_t speedup_base = parse_count(a.speedup_base);
  const int threads = a.common.resolved_threads();

  struct Row {
    int d, k;
    double pf, estimate, rms_rel, wall, speedup;
  };
  std::vector<Row> rows;
  for (std::size_t di = 0; di < dims.size(); ++di) {
    const ResponseSurface rs{kind, dims[di]};
    for (std::size_t pi = 0; pi < pfs.size(); ++pi) {
      const double y_t = calibrate_threshold(rs, pfs[pi]);
      const FailureSpec spec{rs, y_t, pfs[pi]};
      const std::uint64_t cell_tag = ((di + 1) << 40) | ((pi + 1) << 32);
      const SpeedupResult sp = speedup_experiment(
          spec, speedup_base, a.speedup_reps,
          RngStream(a.common.seed, cell_tag | 0xFF), threads);
      // The budget ratio is the deterministic stand-in for the wall-time
      // speedup; the measured ratio appears only under --timing.
      const double speedup =
          a.common.timing ? sp.speedup
                          : static_cast<double>(sp.n_point) /
                                static_cast<double>(sp.n_line);
      for (int k : ks) {
        const auto t0 = std::chrono::steady_clock::now();
        const RngStream base(a.common.seed,
                             cell_tag | static_cast<std::uint64_t>(k + 1));
        double mean = 0.0, sq = 0.0;
        for (int r = 0; r < a.common.reps; ++r) {
          const Estimate est = estimate_pof(
              spec, k, n_flats, base.fork(static_cast<std::uint64_t>(r)));
          mean += est.mean;
          const double rel = est.mean / pfs[pi] - 1.0;
          sq += rel * rel;
        }
        mean /= a.common.reps;
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        rows.push_back({dims[di], k, pfs[pi], mean,
                        std::sqrt(sq / a.common.reps), wall, speedup});
      }
    }
  }

  CsvFile csv(a.common.out);
  auto& os = csv.stream();
  a.common.header(os);
  os << "surface,d,pf,k,n,estimate,rms_rel,wall_s,speedup\n";
  for (const auto& r : rows)
    os << a.surface << ',' << r.d << ',' << fmt(r.pf) << ',' << r.k << ','
       << n_flats << ',' << fmt(r.estimate) << ',' << fmt(r.rms_rel) << ','
       << fmt(a.common.wall(r.wall)) << ',' << fmt(r.speedup) << '\n';
  csv.commit();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-d darts: sampling with k-dimensional flats"};
  app.require_subcommand(1);

  VolumeArgs va;
  CLI::App* volume = app.add_subcommand(
      "volume", "volume estimation error curves and histograms");
  add_common(volume, va.common);
  volume->add_option("--object", va.object, "sphere or ellipsoid")
      ->check(CLI::IsMember({"sphere", "ellipsoid"}));
  volume->add_option("--d", va.d, "dimension")->check(CLI::PositiveNumber);
  volume->add_option("--s", va.squish, "ellipsoid squish factor");
  volume->add_option("--rot", va.rotations, "ellipsoid Givens rotation count");
  volume->add_option("--k", va.k_list, "flat dimensions, e.g. 0,1,2");
  volume->add_option("--n", va.n_range,
                     "flat budgets, a:b expands x10 (e.g. 1e2:1e5)");
  volume->add_option("--sampler", va.sampler, "mc or lhs")
      ->check(CLI::IsMember({"mc", "lhs"}));
  volume->add_flag("--unaligned", va.unaligned,
                   "run the k=1 variants 1a/1r/1o (d=2, mc only)");

  MpsArgs ma;
  CLI::App* mps = app.add_subcommand(
      "mps", "maximal Poisson-disk sampling by line or point darts");
  add_common(mps, ma.common);
  mps->add_option("--d", ma.d, "dimension")->check(CLI::PositiveNumber);
  mps->add_option("--rf", ma.r_f, "disk-free radius")
      ->check(CLI::PositiveNumber);
  mps->add_option("--V", ma.void_fraction,
                  "termination void fraction in (0, 1]");
  mps->add_option("--dart", ma.dart, "point or line")
      ->check(CLI::IsMember({"point", "line"}));
  mps->add_option("--max-darts", ma.max_darts, "dart cap, 0 for none");
  mps->add_option("--time-budget", ma.time_budget,
                  "seconds cap, 0 for none (not byte-reproducible)");
  mps->add_option("--probes", ma.probes, "coverage probes for r_c");

  PofArgs pa;
  CLI::App* pof = app.add_subcommand(
      "pof", "probability-of-failure estimation and line-dart speedup");
  add_common(pof, pa.common);
  pof->add_option("--surface", pa.surface, "parabola or cross")
      ->check(CLI::IsMember({"parabola", "cross"}));
  pof->add_option("--d", pa.d_range, "dimensions, a:b expands +1 (e.g. 2:6)");
  pof->add_option("--pf", pa.pf_list, "target failure probabilities");
  pof->add_option("--k", pa.k_list, "dart dimensions among 0,1");
  pof->add_option("--n", pa.n_flats, "flat budget per replication")
      ->check(CLI::PositiveNumber);
  pof->add_option("--speedup-base", pa.speedup_base,
                  "line-dart budget for the speedup experiment");
  pof->add_option("--speedup-reps", pa.speedup_reps,
                  "replications for the speedup experiment")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  std::string invocation;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) invocation += ' ';
    invocation += argv[i];
  }
  va.common.invocation = invocation;
  ma.common.invocation = invocation;
  pa.common.invocation = invocation;

  try {
    if (volume->parsed()) return run_volume(va);
    if (mps->parsed()) return run_mps_cmd(ma);
    return run_pof(pa);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "kdarts: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kdarts: " << e.what() << "\n";
    return 1;
  }
}
