#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "beamqe/errors.hpp"
#include "beamqe/experiment.hpp"
#include "json.hpp"

namespace beamqe {

namespace {

using json = nlohmann::ordered_json;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double get_num(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

json opt_num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t from_hex64(const std::string& s) { return std::stoull(s, nullptr, 16); }

std::string g17(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g17(const std::optional<double>& v) { return v ? g17(*v) : ""; }

json vec_json(const UnitVector& v) { return json::array({v.x(), v.y(), v.z()}); }

UnitVector vec_from(const json& j) {
  return UnitVector::from_normalized(Vec3{j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()});
}

json config_json(const SweepConfig& c) {
  json j;
  j["N_list"] = c.N_list;
  j["D"] = c.D ? json(*c.D) : json("calibrate");
  j["point_kind"] = std::string(to_string(c.points.kind));
  j["seed"] = c.points.seed;
  j["point_file"] = c.points.file;
  j["anneal_iterations"] = c.points.anneal_iterations;
  j["anneal_radius_widths"] = c.points.anneal_radius_widths;
  j["anneal_seed"] = c.points.anneal_seed;
  j["quadrature_margin"] = c.quadrature_margin;
  j["observables"] = c.observables;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["h_convention"] = c.h_convention == HConvention::inverse_degree ? "inverse_degree" : "inverse_sqrt_eigenvalue";
  j["override_certificate"] = c.override_certificate;
  j["allow_large_N"] = c.allow_large_N;
  j["memory_budget_mb"] = c.memory_budget_mb;
  j["husimi_grid"] = c.husimi_grid;
  j["sup_oversample"] = c.sup_oversample;
  j["pole_rule_degree"] = c.pole_rule_degree;
  j["c_floor"] = c.c_floor;
  j["C_ceiling"] = c.C_ceiling;
  j["weyl_ceiling"] = c.weyl_ceiling;
  j["weyl_min_m"] = c.weyl_min_m;
  j["calibration_N"] = c.calibration_N;
  j["calibration_grid"] = c.calibration_grid;
  return j;
}

SweepConfig config_from(const json& j) {
  SweepConfig c;
  c.N_list = j.at("N_list").get<std::vector<int>>();
  if (j.at("D").is_string()) {
    c.D.reset();
  } else {
    c.D = j.at("D").get<double>();
  }
  c.points.kind = point_kind_from_string(j.at("point_kind").get<std::string>());
  c.points.seed = j.at("seed").get<std::uint64_t>();
  c.points.file = j.at("point_file").get<std::string>();
  c.points.anneal_iterations = j.at("anneal_iterations").get<std::size_t>();
  c.points.anneal_radius_widths = j.at("anneal_radius_widths").get<double>();
  c.points.anneal_seed = j.at("anneal_seed").get<std::uint64_t>();
  c.quadrature_margin = j.at("quadrature_margin").get<int>();
  c.observables = j.at("observables").get<std::vector<std::string>>();
  c.output_dir = j.at("output_dir").get<std::string>();
  c.threads = j.at("threads").get<unsigned>();
  c.h_convention = j.at("h_convention").get<std::string>() == "inverse_degree" ? HConvention::inverse_degree
                                                                               : HConvention::inverse_sqrt_eigenvalue;
  c.override_certificate = j.at("override_certificate").get<bool>();
  c.allow_large_N = j.at("allow_large_N").get<bool>();
  c.memory_budget_mb = j.at("memory_budget_mb").get<std::size_t>();
  c.husimi_grid = j.at("husimi_grid").get<std::size_t>();
  c.sup_oversample = j.at("sup_oversample").get<int>();
  c.pole_rule_degree = j.at("pole_rule_degree").get<int>();
  c.c_floor = j.at("c_floor").get<double>();
  c.C_ceiling = j.at("C_ceiling").get<std::size_t>();
  c.weyl_ceiling = j.at("weyl_ceiling").get<double>();
  c.weyl_min_m = j.at("weyl_min_m").get<std::size_t>();
  c.calibration_N = j.at("calibration_N").get<int>();
  c.calibration_grid = j.at("calibration_grid").get<std::vector<double>>();
  return c;
}

json pole_sums_json(const PoleSums& p) {
  return json{{"sum_I", p.sum_I},         {"sum_II", p.sum_II},   {"sum_III", p.sum_III}, {"total", p.total},
              {"count_I", p.count_I},     {"count_II", p.count_II}, {"count_III", p.count_III}};
}

PoleSums pole_sums_from(const json& j) {
  PoleSums p;
  p.sum_I = j.at("sum_I").get<double>();
  p.sum_II = j.at("sum_II").get<double>();
  p.sum_III = j.at("sum_III").get<double>();
  p.total = j.at("total").get<double>();
  p.count_I = j.at("count_I").get<std::size_t>();
  p.count_II = j.at("count_II").get<std::size_t>();
  p.count_III = j.at("count_III").get<std::size_t>();
  return p;
}

json l2_json(const L2Analytic& l) {
  return json{{"norm_squared", l.norm_squared},         {"offdiagonal_total", l.offdiagonal_total},
              {"max_offdiagonal", l.max_offdiagonal},   {"max_pruned_bound", l.max_pruned_bound},
              {"min_beta", l.min_beta},                 {"pairs_computed", l.pairs_computed},
              {"pairs_pruned", l.pairs_pruned}};
}

L2Analytic l2_from(const json& j) {
  L2Analytic l;
  l.norm_squared = j.at("norm_squared").get<double>();
  l.offdiagonal_total = j.at("offdiagonal_total").get<double>();
  l.max_offdiagonal = j.at("max_offdiagonal").get<double>();
  l.max_pruned_bound = j.at("max_pruned_bound").get<double>();
  l.min_beta = j.at("min_beta").get<double>();
  l.pairs_computed = j.at("pairs_computed").get<std::size_t>();
  l.pairs_pruned = j.at("pairs_pruned").get<std::size_t>();
  return l;
}

json sup_json(const SupNormRecord& s) {
  return json{{"value", s.value},
              {"argmax", vec_json(s.argmax)},
              {"grid_resolution", s.grid_resolution},
              {"grid_points", s.grid_points},
              {"grid_max", s.grid_max},
              {"refinement_iterations", s.refinement_iterations},
              {"certified_gap", num(s.certified_gap)},
              {"upper_bound", num(s.upper_bound)}};
}

SupNormRecord sup_from(const json& j) {
  SupNormRecord s;
  s.value = j.at("value").get<double>();
  s.argmax = vec_from(j.at("argmax"));
  s.grid_resolution = j.at("grid_resolution").get<double>();
  s.grid_points = j.at("grid_points").get<std::size_t>();
  s.grid_max = j.at("grid_max").get<double>();
  s.refinement_iterations = j.at("refinement_iterations").get<std::size_t>();
  s.certified_gap = get_num(j.at("certified_gap"));
  s.upper_bound = get_num(j.at("upper_bound"));
  return s;
}

json qe_json(const QEReport& r) {
  json j;
  j["N"] = r.N;
  j["D"] = r.D;
  j["m"] = r.m;
  j["h"] = r.h;
  json obs = json::array();
  for (const auto& o : r.observables) {
    obs.push_back(json{{"name", o.name},
                       {"position_only", o.position_only},
                       {"physical_element", opt_num(o.physical_element)},
                       {"sphere_mean", opt_num(o.sphere_mean)},
                       {"circle_average_sum", o.circle_average_sum},
                       {"liouville_value", o.liouville_value},
                       {"defect", o.defect}});
  }
  j["observables"] = std::move(obs);
  j["offdiag_max"] = r.offdiag_max;
  j["offdiag_max_numeric"] = r.offdiag_max_numeric;
  j["offdiag_max_pruned_bound"] = r.offdiag_max_pruned_bound;
  j["offdiag_pairs_computed"] = r.offdiag_pairs_computed;
  j["offdiag_pairs_pruned"] = r.offdiag_pairs_pruned;
  if (r.husimi) {
    j["husimi_summary"] = json{{"grid_size", r.husimi->grid_size},
                               {"normalization", r.husimi->normalization},
                               {"min", r.husimi->min},
                               {"max", r.husimi->max},
                               {"mean", r.husimi->mean}};
  } else {
    j["husimi_summary"] = nullptr;
  }
  return j;
}

QEReport qe_from(const json& j) {
  QEReport r;
  r.N = j.at("N").get<int>();
  r.D = j.at("D").get<double>();
  r.m = j.at("m").get<std::size_t>();
  r.h = j.at("h").get<double>();
  for (const auto& o : j.at("observables")) {
    ObservableRecord rec;
    rec.name = o.at("name").get<std::string>();
    rec.position_only = o.at("position_only").get<bool>();
    rec.physical_element = get_opt(o.at("physical_element"));
    rec.sphere_mean = get_opt(o.at("sphere_mean"));
    rec.circle_average_sum = o.at("circle_average_sum").get<double>();
    rec.liouville_value = o.at("liouville_value").get<double>();
    rec.defect = o.at("defect").get<double>();
    r.observables.push_back(std::move(rec));
  }
  r.offdiag_max = j.at("offdiag_max").get<double>();
  r.offdiag_max_numeric = j.at("offdiag_max_numeric").get<double>();
  r.offdiag_max_pruned_bound = j.at("offdiag_max_pruned_bound").get<double>();
  r.offdiag_pairs_computed = j.at("offdiag_pairs_computed").get<std::size_t>();
  r.offdiag_pairs_pruned = j.at("offdiag_pairs_pruned").get<std::size_t>();
  if (const auto& h = j.at("husimi_summary"); !h.is_null()) {
    HusimiSummary s;
    s.grid_size = h.at("grid_size").get<std::size_t>();
    s.normalization = h.at("normalization").get<double>();
    s.min = h.at("min").get<double>();
    s.max = h.at("max").get<double>();
    s.mean = h.at("mean").get<double>();
    r.husimi = s;
  }
  return r;
}

json calibration_json(const CalibrationResult& c) {
  json j;
  j["N_probe"] = c.N_probe;
  j["threshold"] = c.threshold;
  j["D"] = c.D;
  j["monotone"] = c.monotone;
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back(json{{"D", r.D},
                        {"skipped", r.skipped},
                        {"m", r.m},
                        {"certified", r.certified},
                        {"sup_u", r.sup_u},
                        {"pole_sums", pole_sums_json(r.pole_sums)},
                        {"tail", r.tail}});
  }
  j["rows"] = std::move(rows);
  return j;
}

CalibrationResult calibration_from(const json& j) {
  CalibrationResult c;
  c.N_probe = j.at("N_probe").get<int>();
  c.threshold = j.at("threshold").get<double>();
  c.D = j.at("D").get<double>();
  c.monotone = j.at("monotone").get<bool>();
  for (const auto& r : j.at("rows")) {
    CalibrationRow row;
    row.D = r.at("D").get<double>();
    row.skipped = r.at("skipped").get<bool>();
    row.m = r.at("m").get<std::size_t>();
    row.certified = r.at("certified").get<bool>();
    row.sup_u = r.at("sup_u").get<double>();
    row.pole_sums = pole_sums_from(r.at("pole_sums"));
    row.tail = r.at("tail").get<double>();
    c.rows.push_back(row);
  }
  return c;
}

json degree_json(const DegreeRecord& d, bool without_volatile) {
  json j;
  j["N"] = d.N;
  j["m"] = d.m;
  j["D"] = d.D;
  j["point_set"] = json{{"generator", d.generator}, {"seed", d.seed}, {"fingerprint", hex64(d.fingerprint)}};
  j["certificate"] = json::parse(certificate_to_json(d.certificate));
  j["overridden"] = d.overridden;
  j["C_N"] = d.C_N;
  j["c0D_proxy"] = d.c0D_proxy;
  j["l2_analytic"] = l2_json(d.l2);
  j["l2_quadrature"] = opt_num(d.l2_quadrature);
  j["sup_F"] = sup_json(d.sup);
  j["sup_u"] = d.sup_u;
  j["pole_sums"] = pole_sums_json(d.pole_sums);
  j["qe"] = qe_json(d.qe);
  if (!without_volatile) j["seconds"] = d.seconds;
  return j;
}

DegreeRecord degree_from(const json& j) {
  DegreeRecord d;
  d.N = j.at("N").get<int>();
  d.m = j.at("m").get<std::size_t>();
  d.D = j.at("D").get<double>();
  const auto& ps = j.at("point_set");
  d.generator = ps.at("generator").get<std::string>();
  d.seed = ps.at("seed").get<std::uint64_t>();
  d.fingerprint = from_hex64(ps.at("fingerprint").get<std::string>());
  d.certificate = certificate_from_json(j.at("certificate").dump());
  d.overridden = j.at("overridden").get<bool>();
  d.C_N = j.at("C_N").get<double>();
  d.c0D_proxy = j.at("c0D_proxy").get<double>();
  d.l2 = l2_from(j.at("l2_analytic"));
  d.l2_quadrature = get_opt(j.at("l2_quadrature"));
  d.sup = sup_from(j.at("sup_F"));
  d.sup_u = j.at("sup_u").get<double>();
  d.pole_sums = pole_sums_from(j.at("pole_sums"));
  d.qe = qe_from(j.at("qe"));
  if (j.contains("seconds")) d.seconds = j.at("seconds").get<double>();
  return d;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  os << content;
  if (!os) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace

std::string qe_report_to_json(const QEReport& report) { return qe_json(report).dump(2); }

std::string calibration_to_json(const CalibrationResult& result) { return calibration_json(result).dump(2); }

std::string sweep_record_to_json(const SweepRecord& r, bool without_volatile) {
  json j;
  if (!without_volatile) j["created"] = r.created;
  j["config"] = config_json(r.config);
  j["calibration"] = r.calibration ? calibration_json(*r.calibration) : json(nullptr);
  json degrees = json::array();
  for (const auto& d : r.degrees) degrees.push_back(degree_json(d, without_volatile));
  j["degrees"] = std::move(degrees);
  j["L"] = r.L;
  j["slope"] = r.slope;
  j["c1"] = r.c1;
  return j.dump(2);
}

SweepRecord sweep_record_from_json(const std::string& text) {
  try {
    const auto j = json::parse(text);
    SweepRecord r;
    if (j.contains("created")) r.created = j.at("created").get<std::string>();
    r.config = config_from(j.at("config"));
    if (!j.at("calibration").is_null()) r.calibration = calibration_from(j.at("calibration"));
    for (const auto& d : j.at("degrees")) r.degrees.push_back(degree_from(d));
    r.L = j.at("L").get<double>();
    r.slope = j.at("slope").get<double>();
    r.c1 = j.at("c1").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sweep record JSON: ") + e.what());
  }
}

std::uint64_t content_hash(const SweepRecord& record) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : sweep_record_to_json(record, true)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string summary_text(const SweepRecord& r) {
  std::ostringstream os;
  os << "created: " << r.created << "\n";
  os << "content_hash: " << hex64(content_hash(r)) << "\n";
  if (r.calibration) {
    os << "calibrated_D: " << g17(r.calibration->D) << " (N_probe " << r.calibration->N_probe
       << ", monotone " << (r.calibration->monotone ? "yes" : "no") << ")\n";
  }
  os << "degrees: " << r.degrees.size() << "\n";
  os << "L: " << g17(r.L) << "\n";
  os << "slope_log_sup_u_vs_log_N: " << g17(r.slope) << "\n";
  os << "c1_max_C_N: " << g17(r.c1) << "\n";
  for (const auto& d : r.degrees) {
    os << "N " << d.N << ": m " << d.m << ", certified " << (d.certificate.passed() ? "yes" : "no")
       << ", sup_u " << g17(d.sup_u) << ", l2 " << g17(d.l2.norm_squared) << ", offdiag_max "
       << g17(d.qe.offdiag_max) << "\n";
  }
  return os.str();
}

void emit_report(const SweepRecord& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());

  write_file(fs::path(dir) / "sweep.json", sweep_record_to_json(r) + "\n");
  write_file(fs::path(dir) / "config.toml", config_to_text(r.config));
  write_file(fs::path(dir) / "summary.txt", summary_text(r));

  std::ostringstream rows;
  rows << "N,m,D,generator,seed,fingerprint,certified,overridden,C_N,c0D_proxy,min_separation,sep_constant,"
          "max_circle_count,l2_analytic,l2_quadrature,l2_max_offdiagonal,sup_F,sup_u,certified_gap,"
          "sum_I,sum_II,sum_III,offdiag_max,offdiag_max_numeric,offdiag_max_pruned_bound\n";
  for (const auto& d : r.degrees) {
    rows << d.N << ',' << d.m << ',' << g17(d.D) << ',' << d.generator << ',' << d.seed << ','
         << hex64(d.fingerprint) << ',' << (d.certificate.passed() ? 1 : 0) << ',' << (d.overridden ? 1 : 0) << ','
         << g17(d.C_N) << ',' << g17(d.c0D_proxy) << ',' << g17(d.certificate.separation.distance) << ','
         << g17(d.certificate.sep_constant) << ',' << d.certificate.clustering.count << ','
         << g17(d.l2.norm_squared) << ',' << g17(d.l2_quadrature) << ',' << g17(d.l2.max_offdiagonal) << ','
         << g17(d.sup.value) << ',' << g17(d.sup_u) << ',' << g17(d.sup.certified_gap) << ','
         << g17(d.pole_sums.sum_I) << ',' << g17(d.pole_sums.sum_II) << ',' << g17(d.pole_sums.sum_III) << ','
         << g17(d.qe.offdiag_max) << ',' << g17(d.qe.offdiag_max_numeric) << ','
         << g17(d.qe.offdiag_max_pruned_bound) << '\n';
  }
  write_file(fs::path(dir) / "degrees.csv", rows.str());

  std::ostringstream defects;
  defects << "N,m,observable,physical_element,sphere_mean,circle_average_sum,liouville_value,defect\n";
  for (const auto& d : r.degrees) {
    for (const auto& o : d.qe.observables) {
      defects << d.N << ',' << d.m << ',' << o.name << ',' << g17(o.physical_element) << ','
              << g17(o.sphere_mean) << ',' << g17(o.circle_average_sum) << ',' << g17(o.liouville_value) << ','
              << g17(o.defect) << '\n';
    }
  }
  write_file(fs::path(dir) / "defects.csv", defects.str());
}

SweepRecord read_report(const std::string& dir) {
  const auto path = std::filesystem::path(dir) / "sweep.json";
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return sweep_record_from_json(ss.str());
}

}  // namespace beamqe
