#include "beamqe/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "beamqe/errors.hpp"
#include "beamqe/parallel.hpp"

namespace beamqe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::vector<std::string> split_list(const std::string& key, const std::string& v) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') {
    throw ConfigError("config: '" + key + "' expects a list [a, b, ...]");
  }
  std::vector<std::string> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(unquote(item));
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(d)) {
    throw ConfigError("config: '" + key + "' expects a finite number, got '" + v + "'");
  }
  return d;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long n = 0;
  try {
    n = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return n;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  const long long n = to_integer(key, v);
  if (n < 0) throw ConfigError("config: '" + key + "' must be nonnegative");
  return static_cast<std::uint64_t>(n);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config: '" + key + "' expects true or false, got '" + v + "'");
}

std::string_view h_name(HConvention h) {
  return h == HConvention::inverse_degree ? "inverse_degree" : "inverse_sqrt_eigenvalue";
}

HConvention h_from_name(const std::string& v) {
  if (v == "inverse_degree") return HConvention::inverse_degree;
  if (v == "inverse_sqrt_eigenvalue") return HConvention::inverse_sqrt_eigenvalue;
  throw ConfigError("config: unknown h_convention '" + v + "'");
}

using Setter = std::function<void(SweepConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"N_list",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.N_list.clear();
         for (const auto& s : split_list(k, v)) c.N_list.push_back(static_cast<int>(to_integer(k, s)));
       }},
      {"D",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         if (unquote(v) == "calibrate") {
           c.D.reset();
         } else {
           c.D = to_double(k, v);
         }
       }},
      {"point_kind", [](SweepConfig& c, const std::string&,
                        const std::string& v) { c.points.kind = point_kind_from_string(unquote(v)); }},
      {"seed", [](SweepConfig& c, const std::string& k, const std::string& v) { c.points.seed = to_unsigned(k, v); }},
      {"point_file", [](SweepConfig& c, const std::string&, const std::string& v) { c.points.file = unquote(v); }},
      {"anneal_iterations",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.points.anneal_iterations = to_unsigned(k, v); }},
      {"anneal_radius_widths",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.points.anneal_radius_widths = to_double(k, v);
       }},
      {"anneal_seed",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.points.anneal_seed = to_unsigned(k, v); }},
      {"quadrature_margin",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.quadrature_margin = static_cast<int>(to_integer(k, v));
       }},
      {"observables",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.observables = split_list(k, v); }},
      {"output_dir", [](SweepConfig& c, const std::string&, const std::string& v) { c.output_dir = unquote(v); }},
      {"threads",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.threads = static_cast<unsigned>(to_unsigned(k, v));
       }},
      {"h_convention",
       [](SweepConfig& c, const std::string&, const std::string& v) { c.h_convention = h_from_name(unquote(v)); }},
      {"override_certificate",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.override_certificate = to_bool(k, v); }},
      {"allow_large_N",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.allow_large_N = to_bool(k, v); }},
      {"memory_budget_mb",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.memory_budget_mb = to_unsigned(k, v); }},
      {"husimi_grid",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.husimi_grid = to_unsigned(k, v); }},
      {"sup_oversample",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.sup_oversample = static_cast<int>(to_integer(k, v));
       }},
      {"pole_rule_degree",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.pole_rule_degree = static_cast<int>(to_integer(k, v));
       }},
      {"c_floor", [](SweepConfig& c, const std::string& k, const std::string& v) { c.c_floor = to_double(k, v); }},
      {"C_ceiling", [](SweepConfig& c, const std::string& k, const std::string& v) { c.C_ceiling = to_unsigned(k, v); }},
      {"weyl_ceiling",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.weyl_ceiling = to_double(k, v); }},
      {"weyl_min_m",
       [](SweepConfig& c, const std::string& k, const std::string& v) { c.weyl_min_m = to_unsigned(k, v); }},
      {"calibration_N",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.calibration_N = static_cast<int>(to_integer(k, v));
       }},
      {"calibration_grid",
       [](SweepConfig& c, const std::string& k, const std::string& v) {
         c.calibration_grid.clear();
         for (const auto& s : split_list(k, v)) c.calibration_grid.push_back(to_double(k, s));
       }},
  };
  return table;
}

template <class T, class F>
std::string list_text(const std::vector<T>& xs, F&& f) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) s += ", ";
    s += f(xs[i]);
  }
  return s + "]";
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

VerifyThresholds thresholds_from(const SweepConfig& c) {
  VerifyThresholds t;
  t.c_floor = c.c_floor;
  t.C_ceiling = c.C_ceiling;
  t.weyl_ceiling = c.weyl_ceiling;
  t.weyl_min_m = c.weyl_min_m;
  return t;
}

std::vector<Observable> selected_bank(const SweepConfig& c) {
  if (c.observables.empty()) return observable_bank();
  std::vector<Observable> bank;
  for (const auto& name : c.observables) bank.push_back(bank_observable(name));
  return bank;
}

void check_ratio(const std::vector<int>& Ns, double D) {
  for (int N : Ns) {
    if (std::sqrt(double(N)) / (D * D) < 2.0) {
      throw ConfigError("config: N = " + std::to_string(N) + " with D = " + fmt_double(D) +
                        " gives sqrt(N)/D^2 < 2; lower D or drop N");
    }
  }
}

}  // namespace

SweepConfig parse_config(const std::string& text) {
  SweepConfig c;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    it->second(c, key, value);
  }
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const SweepConfig& c) {
  const auto q = [](const std::string& s) { return "\"" + s + "\""; };
  std::ostringstream os;
  os << "N_list = " << list_text(c.N_list, [](int n) { return std::to_string(n); }) << "\n";
  os << "D = " << (c.D ? fmt_double(*c.D) : q("calibrate")) << "\n";
  os << "point_kind = " << q(std::string(to_string(c.points.kind))) << "\n";
  os << "seed = " << c.points.seed << "\n";
  os << "point_file = " << q(c.points.file) << "\n";
  os << "anneal_iterations = " << c.points.anneal_iterations << "\n";
  os << "anneal_radius_widths = " << fmt_double(c.points.anneal_radius_widths) << "\n";
  os << "anneal_seed = " << c.points.anneal_seed << "\n";
  os << "quadrature_margin = " << c.quadrature_margin << "\n";
  os << "observables = " << list_text(c.observables, q) << "\n";
  os << "output_dir = " << q(c.output_dir) << "\n";
  os << "threads = " << c.threads << "\n";
  os << "h_convention = " << q(std::string(h_name(c.h_convention))) << "\n";
  os << "override_certificate = " << (c.override_certificate ? "true" : "false") << "\n";
  os << "allow_large_N = " << (c.allow_large_N ? "true" : "false") << "\n";
  os << "memory_budget_mb = " << c.memory_budget_mb << "\n";
  os << "husimi_grid = " << c.husimi_grid << "\n";
  os << "sup_oversample = " << c.sup_oversample << "\n";
  os << "pole_rule_degree = " << c.pole_rule_degree << "\n";
  os << "c_floor = " << fmt_double(c.c_floor) << "\n";
  os << "C_ceiling = " << c.C_ceiling << "\n";
  os << "weyl_ceiling = " << fmt_double(c.weyl_ceiling) << "\n";
  os << "weyl_min_m = " << c.weyl_min_m << "\n";
  os << "calibration_N = " << c.calibration_N << "\n";
  os << "calibration_grid = " << list_text(c.calibration_grid, fmt_double) << "\n";
  return os.str();
}

void validate(const SweepConfig& c, bool D_required) {
  if (c.N_list.empty()) throw ConfigError("config: N_list is empty");
  const int max_N = c.allow_large_N ? kLargeMaxN : kDefaultMaxN;
  for (std::size_t i = 0; i < c.N_list.size(); ++i) {
    const int N = c.N_list[i];
    if (N < 1) throw ConfigError("config: N_list entries must be >= 1");
    if (i > 0 && N <= c.N_list[i - 1]) throw ConfigError("config: N_list must be strictly ascending");
    if (N > max_N) {
      throw ConfigError("config: N = " + std::to_string(N) + " exceeds " + std::to_string(max_N) +
                        (c.allow_large_N ? "" : " (set allow_large_N = true for up to 4096)"));
    }
  }
  if (c.D) {
    if (!(*c.D > 0.0)) throw ConfigError("config: D must be positive");
    check_ratio(c.N_list, *c.D);
  } else if (D_required) {
    throw ConfigError("config: a numeric D is required here");
  } else {
    if (c.calibration_grid.empty()) throw ConfigError("config: calibration_grid is empty");
    for (double d : c.calibration_grid) {
      if (!(d > 0.0)) throw ConfigError("config: calibration_grid entries must be positive");
    }
    if (c.calibration_N < 1) throw ConfigError("config: calibration_N must be >= 1");
  }
  if (c.points.kind == PointKind::file && c.points.file.empty()) {
    throw ConfigError("config: point_kind = file needs point_file");
  }
  if (c.points.anneal_radius_widths < 0.0) throw ConfigError("config: anneal_radius_widths must be >= 0");
  if (c.quadrature_margin < 0) throw ConfigError("config: quadrature_margin must be >= 0");
  if (c.sup_oversample < 2) throw ConfigError("config: sup_oversample must be >= 2");
  if (c.pole_rule_degree < 1) throw ConfigError("config: pole_rule_degree must be >= 1");
  if (c.memory_budget_mb == 0) throw ConfigError("config: memory_budget_mb must be positive");
  if (!(c.c_floor > 0.0) || !(c.weyl_ceiling > 0.0)) throw ConfigError("config: thresholds must be positive");
  for (const auto& name : c.observables) (void)bank_observable(name);
}

std::size_t predicted_sweep_bytes(int N, int margin) {
  const int degree = 2 * N + margin;
  const std::size_t nodes = static_cast<std::size_t>(degree / 2 + 1) * static_cast<std::size_t>(degree + 1);
  return SphereRule::predicted_bytes(degree) + nodes * sizeof(std::complex<double>);
}

PointSet make_point_set(int N, std::size_t m, const PointPipeline& p) {
  switch (p.kind) {
    case PointKind::fibonacci:
    case PointKind::spiral:
    case PointKind::uniform_random:
      return generate(p.kind, m, p.seed);
    case PointKind::annealed: {
      AnnealParams params;
      params.iterations = p.anneal_iterations;
      params.seed = p.anneal_seed;
      if (p.anneal_radius_widths > 0.0) params.radius = p.anneal_radius_widths / std::sqrt(double(N));
      // Keep the candidate-circle grid spacing below half the clustering radius.
      const double r = params.radius > 0.0 ? params.radius : 1.0 / double(m);
      params.grid_factor = std::max(params.grid_factor, std::ceil(16.0 * std::numbers::pi / (r * r * double(m))));
      return anneal_declustering(generate(PointKind::fibonacci, m, p.seed), params).best;
    }
    case PointKind::file: {
      std::string path = p.file;
      if (const auto at = path.find("{m}"); at != std::string::npos) path.replace(at, 3, std::to_string(m));
      PointSet ps = load_point_set(path);
      if (ps.m() != m) {
        throw ConfigError("point file '" + path + "' has m = " + std::to_string(ps.m()) + ", need " +
                          std::to_string(m));
      }
      return ps;
    }
  }
  throw ConfigError("unhandled point kind");
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("least_squares_slope: size mismatch");
  if (x.size() < 2) return 0.0;
  const double n = double(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: x values are all equal");
  return sxy / sxx;
}

CalibrationResult calibrate_D(int N_probe, std::vector<double> grid, const SweepConfig& config, double threshold) {
  if (grid.empty()) throw ConfigError("calibrate_D: empty D grid");
  std::sort(grid.begin(), grid.end());
  CalibrationResult r;
  r.N_probe = N_probe;
  r.threshold = threshold;
  SupNormOptions sup_opt;
  sup_opt.oversample = config.sup_oversample;
  std::optional<double> chosen;
  double prev_tail = std::numeric_limits<double>::infinity();
  for (double D : grid) {
    CalibrationRow row;
    row.D = D;
    if (std::sqrt(double(N_probe)) / (D * D) < 1.0) {
      row.skipped = true;
      r.rows.push_back(row);
      continue;
    }
    row.m = choose_m(N_probe, D);
    const PointSet ps = make_point_set(N_probe, row.m, config.points);
    const Certificate cert = verify(ps, thresholds_from(config));
    row.certified = cert.passed();
    BuildOptions opt;
    opt.certificate = &cert;
    opt.override_checks = true;
    const auto F = BeamSuperposition::build(N_probe, D, ps, opt);
    const auto sup = sup_norm(F, sup_opt);
    row.sup_u = normalized(F).sup(sup);
    row.pole_sums = pole_sum_decomposition(F, sup.argmax);
    row.tail = row.pole_sums.sum_II + row.pole_sums.sum_III;
    if (row.tail > prev_tail) r.monotone = false;
    prev_tail = row.tail;
    if (!chosen && row.tail < threshold) chosen = D;
    r.rows.push_back(row);
  }
  if (!chosen) {
    throw ConfigError("calibrate_D: no D in the grid brings the Group II + III total below " +
                      fmt_double(threshold) + " at N = " + std::to_string(N_probe) +
                      "; extend the grid to larger D");
  }
  r.D = *chosen;
  return r;
}

SweepRecord run_sweep(const SweepConfig& config) {
  validate(config);
  set_thread_count(config.threads);
  SweepRecord rec;
  rec.config = config;
  rec.created = utc_now();

  double D = 0.0;
  if (config.D) {
    D = *config.D;
  } else {
    rec.calibration = calibrate_D(config.calibration_N, config.calibration_grid, config);
    D = rec.calibration->D;
    check_ratio(config.N_list, D);
  }

  const auto bank = selected_bank(config);
  const std::size_t budget = config.memory_budget_mb * std::size_t{1024} * 1024;
  SupNormOptions sup_opt;
  sup_opt.oversample = config.sup_oversample;

  std::vector<double> logN, logS;
  for (int N : config.N_list) {
    const auto t0 = std::chrono::steady_clock::now();
    const bool quadrature = N <= kDefaultMaxN;
    if (quadrature) {
      const std::size_t need = predicted_sweep_bytes(N, config.quadrature_margin);
      if (need > budget) {
        const int degree = 2 * N + config.quadrature_margin;
        const std::size_t nodes = static_cast<std::size_t>(degree / 2 + 1) * static_cast<std::size_t>(degree + 1);
        throw ResourceError("N = " + std::to_string(N) + ": quadrature of degree " + std::to_string(degree) +
                            " needs " + std::to_string(nodes) + " nodes (" + std::to_string(need) +
                            " bytes), over the budget of " + std::to_string(budget) + " bytes");
      }
    }

    DegreeRecord d;
    d.N = N;
    d.D = D;
    d.m = choose_m(N, D);
    const PointSet ps = make_point_set(N, d.m, config.points);
    d.generator = std::string(to_string(ps.generator()));
    d.seed = ps.seed();
    d.fingerprint = ps.fingerprint();
    d.certificate = verify(ps, thresholds_from(config));
    if (!d.certificate.passed() && !config.override_certificate) {
      throw CertificateError("N = " + std::to_string(N) + ", m = " + std::to_string(d.m) +
                             ": point set failed certification (separation " +
                             (d.certificate.separation_ok ? "ok" : "FAIL") + ", clustering " +
                             (d.certificate.clustering_ok ? "ok" : "FAIL") + ", equidistribution " +
                             (d.certificate.equidistribution_ok ? "ok" : "FAIL") + ")");
    }
    BuildOptions bopt;
    bopt.certificate = &d.certificate;
    bopt.override_checks = config.override_certificate && !d.certificate.passed();
    const auto F = BeamSuperposition::build(N, D, ps, bopt);
    d.overridden = F.overridden();
    d.C_N = normalization_constant(N);
    d.c0D_proxy = F.c0D_proxy();
    d.l2 = l2_norm_analytic(F);
    const NormalizedHarmonic u = normalized(F, d.l2);

    std::optional<SphereRule> rule;
    std::vector<std::complex<double>> u_on_rule;
    if (quadrature) {
      rule.emplace(2 * N + config.quadrature_margin);
      u_on_rule = F.eval_on(*rule);
      std::vector<double> mod2(u_on_rule.size());
      for (std::size_t i = 0; i < mod2.size(); ++i) mod2[i] = std::norm(u_on_rule[i]);
      d.l2_quadrature = integrate_tabulated(mod2, *rule);
      for (auto& v : u_on_rule) v /= u.l2_norm;
    }

    d.sup = sup_norm(F, sup_opt);
    d.sup_u = u.sup(d.sup);
    d.pole_sums = pole_sum_decomposition(F, d.sup.argmax);

    QEOptions qopt;
    qopt.pole_rule_degree = config.pole_rule_degree;
    qopt.h_convention = config.h_convention;
    qopt.physical_rule = rule ? &*rule : nullptr;
    qopt.u_on_rule = rule ? &u_on_rule : nullptr;
    qopt.husimi_grid = quadrature ? config.husimi_grid : 0;
    d.qe = qe_report(F, u, bank, qopt);

    d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    logN.push_back(std::log(double(N)));
    logS.push_back(std::log(d.sup_u));
    rec.L = std::max(rec.L, d.sup_u);
    rec.c1 = std::max(rec.c1, d.C_N);
    rec.degrees.push_back(std::move(d));
  }
  rec.slope = least_squares_slope(logN, logS);
  return rec;
}

}  // namespace beamqe
