// beamqe: command line front end for the beam superposition library.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "beamqe/errors.hpp"
#include "beamqe/experiment.hpp"
#include "beamqe/parallel.hpp"
#include "json.hpp"

using namespace beamqe;

namespace {

constexpr int kExitCertificate = 2;
constexpr int kExitResource = 3;
constexpr int kExitConfig = 4;

struct PointArgs {
  std::string kind = "fibonacci";
  std::uint64_t seed = 0;
  std::string file;
  std::size_t anneal_iterations = 10000;
  double anneal_radius_widths = 0.0;
  std::uint64_t anneal_seed = 1;

  void add(CLI::App* app) {
    app->add_option("--kind", kind, "fibonacci | spiral | uniform-random | annealed | file")->capture_default_str();
    app->add_option("--seed", seed, "generator seed")->capture_default_str();
    app->add_option("--points", file, "point-set file (implies --kind file); {m} is replaced by m");
    app->add_option("--anneal-iterations", anneal_iterations)->capture_default_str();
    app->add_option("--anneal-radius-widths", anneal_radius_widths,
                    "anneal clustering radius in units of N^-1/2; 0 means 1/m")
        ->capture_default_str();
    app->add_option("--anneal-seed", anneal_seed)->capture_default_str();
  }

  PointPipeline pipeline() const {
    PointPipeline p;
    p.kind = file.empty() ? point_kind_from_string(kind) : PointKind::file;
    p.seed = seed;
    p.file = file;
    p.anneal_iterations = anneal_iterations;
    p.anneal_radius_widths = anneal_radius_widths;
    p.anneal_seed = anneal_seed;
    return p;
  }
};

struct ThresholdArgs {
  VerifyThresholds t;
  void add(CLI::App* app) {
    app->add_option("--c-floor", t.c_floor)->capture_default_str();
    app->add_option("--C-ceiling", t.C_ceiling)->capture_default_str();
    app->add_option("--weyl-ceiling", t.weyl_ceiling)->capture_default_str();
    app->add_option("--weyl-min-m", t.weyl_min_m)->capture_default_str();
    app->add_option("--lmax", t.lmax)->capture_default_str();
    app->add_option("--radius", t.radius, "clustering radius; 0 means 1/m")->capture_default_str();
    app->add_option("--grid-factor", t.search.grid_factor)->capture_default_str();
    app->add_option("--caps", t.caps)->capture_default_str();
  }
};

struct HarmonicArgs {
  int N = 64;
  double D = 2.0;
  bool override_checks = false;
  PointArgs points;
  ThresholdArgs thresholds;

  void add(CLI::App* app) {
    app->add_option("--N", N, "degree")->capture_default_str();
    app->add_option("--D", D, "spacing constant")->capture_default_str();
    app->add_flag("--override", override_checks, "build even if the certificate fails");
    points.add(app);
    thresholds.add(app);
  }
};

struct Built {
  PointSet ps;
  Certificate cert;
  BeamSuperposition F;
};

Built build_from(const HarmonicArgs& a) {
  const std::size_t m = choose_m(a.N, a.D);
  PointSet ps = make_point_set(a.N, m, a.points.pipeline());
  Certificate cert = verify(ps, a.thresholds.t);
  BuildOptions opt;
  opt.certificate = &cert;
  opt.override_checks = a.override_checks;
  auto F = BeamSuperposition::build(a.N, a.D, ps, opt);
  return {std::move(ps), std::move(cert), std::move(F)};
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::ordered_json provenance(const Built& b) {
  nlohmann::ordered_json j;
  j["N"] = b.F.degree();
  j["D"] = b.F.D();
  j["m"] = b.F.m();
  j["generator"] = std::string(to_string(b.ps.generator()));
  j["seed"] = b.ps.seed();
  j["fingerprint"] = hex64(b.ps.fingerprint());
  j["certified"] = b.F.certified();
  j["overridden"] = b.F.overridden();
  j["min_separation"] = b.F.min_separation();
  j["c0D_proxy"] = b.F.c0D_proxy();
  j["C_N"] = normalization_constant(b.F.degree());
  return j;
}

nlohmann::ordered_json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniformly bounded spherical harmonics from Gaussian beams"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads; 0 uses all cores")->capture_default_str();

  // gen-points
  auto* gen = app.add_subcommand("gen-points", "generate a point set");
  std::string gen_kind = "fibonacci", gen_out;
  std::size_t gen_m = 64;
  std::uint64_t gen_seed = 0;
  gen->add_option("--kind", gen_kind)->capture_default_str();
  gen->add_option("--m", gen_m)->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "output file; stdout if omitted");

  // verify-points
  auto* ver = app.add_subcommand("verify-points", "certify a point set");
  std::string ver_in, ver_out;
  ThresholdArgs ver_t;
  ver->add_option("--in", ver_in)->required();
  ver->add_option("--out", ver_out, "certificate JSON file; stdout if omitted");
  ver_t.add(ver);

  // anneal
  auto* ann = app.add_subcommand("anneal", "decluster a point set by simulated annealing");
  std::string ann_in, ann_out;
  AnnealParams ann_p;
  ann->add_option("--in", ann_in)->required();
  ann->add_option("--out", ann_out)->required();
  ann->add_option("--iterations", ann_p.iterations)->capture_default_str();
  ann->add_option("--seed", ann_p.seed)->capture_default_str();
  ann->add_option("--radius", ann_p.radius, "clustering radius; 0 means 1/m")->capture_default_str();
  ann->add_option("--floor", ann_p.min_sep_floor, "separation floor; 0 means 0.5/sqrt(m)")->capture_default_str();
  ann->add_option("--grid-factor", ann_p.grid_factor)->capture_default_str();
  ann->add_option("--t-start", ann_p.t_start)->capture_default_str();
  ann->add_option("--t-end", ann_p.t_end)->capture_default_str();

  // build / norms / supnorm / qe
  auto* bld = app.add_subcommand("build", "build F_N and print its provenance");
  HarmonicArgs bld_a;
  bld_a.add(bld);

  auto* nrm = app.add_subcommand("norms", "L2 norm of F_N, analytic and by quadrature");
  HarmonicArgs nrm_a;
  int nrm_margin = 2;
  bool nrm_skip_quad = false;
  nrm_a.add(nrm);
  nrm->add_option("--margin", nrm_margin, "quadrature degree above 2N")->capture_default_str();
  nrm->add_flag("--analytic-only", nrm_skip_quad);

  auto* sup = app.add_subcommand("supnorm", "sup norm of F_N and u_N");
  HarmonicArgs sup_a;
  SupNormOptions sup_o;
  sup_a.add(sup);
  sup->add_option("--oversample", sup_o.oversample)->capture_default_str();
  sup->add_option("--candidates", sup_o.candidates)->capture_default_str();

  auto* qe = app.add_subcommand("qe", "quantum-ergodicity diagnostics for u_N");
  HarmonicArgs qe_a;
  std::vector<std::string> qe_obs;
  std::size_t qe_husimi = 4096;
  int qe_margin = 4;
  std::string qe_h = "inverse_degree";
  qe_a.add(qe);
  qe->add_option("--observables", qe_obs, "bank names; all if omitted");
  qe->add_option("--husimi-grid", qe_husimi, "0 skips the Husimi density")->capture_default_str();
  qe->add_option("--margin", qe_margin, "physical rule degree above 2N")->capture_default_str();
  qe->add_option("--h-convention", qe_h, "inverse_degree | inverse_sqrt_eigenvalue")->capture_default_str();

  // sweep
  auto* swp = app.add_subcommand("sweep", "run an N sweep and write a report directory");
  std::string swp_config;
  std::vector<int> swp_N;
  std::string swp_D, swp_kind, swp_out;
  std::optional<std::uint64_t> swp_seed;
  std::optional<double> swp_widths;
  std::optional<std::size_t> swp_iters, swp_husimi;
  bool swp_override = false, swp_large = false;
  swp->add_option("--config", swp_config, "key = value config file");
  swp->add_option("--N-list", swp_N);
  swp->add_option("--D", swp_D, "number or 'calibrate'");
  swp->add_option("--kind", swp_kind);
  swp->add_option("--seed", swp_seed);
  swp->add_option("--anneal-radius-widths", swp_widths);
  swp->add_option("--anneal-iterations", swp_iters);
  swp->add_option("--husimi-grid", swp_husimi);
  swp->add_option("--out-dir", swp_out);
  swp->add_flag("--override", swp_override);
  swp->add_flag("--allow-large-N", swp_large);

  // calibrate-d
  auto* cal = app.add_subcommand("calibrate-d", "choose D from the pole-sum tail at the sup argmax");
  int cal_N = 256;
  std::vector<double> cal_grid{1.0, 1.5, 2.0, 3.0, 4.0};
  double cal_threshold = 0.5;
  PointArgs cal_p;
  cal->add_option("--N-probe", cal_N)->capture_default_str();
  cal->add_option("--D-grid", cal_grid)->delimiter(',');
  cal->add_option("--threshold", cal_threshold)->capture_default_str();
  cal_p.add(cal);

  // report
  auto* rep = app.add_subcommand("report", "summarize or re-emit a report directory");
  std::string rep_dir, rep_to;
  rep->add_option("--dir", rep_dir)->required();
  rep->add_option("--emit-to", rep_to, "rewrite all report files into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    set_thread_count(threads);

    if (*gen) {
      const auto ps = generate(point_kind_from_string(gen_kind), gen_m, gen_seed);
      std::ostringstream os;
      write_point_set(os, ps);
      write_text(gen_out, os.str());
      return 0;
    }
    if (*ver) {
      const auto cert = verify(load_point_set(ver_in), ver_t.t);
      write_text(ver_out, certificate_to_json(cert) + "\n");
      return cert.passed() ? 0 : kExitCertificate;
    }
    if (*ann) {
      const auto ps = load_point_set(ann_in);
      const auto res = anneal_declustering(ps, ann_p);
      save_point_set(ann_out, res.best);
      nlohmann::ordered_json j;
      j["m"] = res.best.m();
      j["initial_objective"] = res.initial_objective;
      j["best_objective"] = res.best_objective;
      j["accepted"] = res.accepted;
      j["rejected_floor"] = res.rejected_floor;
      j["fingerprint"] = hex64(res.best.fingerprint());
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*bld) {
      const auto b = build_from(bld_a);
      std::cout << provenance(b).dump(2) << "\n";
      return 0;
    }
    if (*nrm) {
      const auto b = build_from(nrm_a);
      const auto l2 = l2_norm_analytic(b.F);
      auto j = provenance(b);
      j["l2_analytic"] = l2.norm_squared;
      j["offdiagonal_total"] = l2.offdiagonal_total;
      j["max_offdiagonal"] = l2.max_offdiagonal;
      j["max_pruned_bound"] = l2.max_pruned_bound;
      j["pairs_computed"] = l2.pairs_computed;
      j["pairs_pruned"] = l2.pairs_pruned;
      if (!nrm_skip_quad) {
        const SphereRule rule(2 * nrm_a.N + nrm_margin);
        const double q = l2_norm_quadrature(b.F, rule);
        j["l2_quadrature"] = q;
        j["relative_difference"] = std::abs(q - l2.norm_squared) / l2.norm_squared;
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*sup) {
      const auto b = build_from(sup_a);
      const auto rec = sup_norm(b.F, sup_o);
      const auto u = normalized(b.F);
      const auto ps = pole_sum_decomposition(b.F, rec.argmax);
      auto j = provenance(b);
      j["sup_F"] = rec.value;
      j["sup_u"] = u.sup(rec);
      j["argmax"] = {rec.argmax.x(), rec.argmax.y(), rec.argmax.z()};
      j["grid_resolution"] = rec.grid_resolution;
      j["grid_points"] = rec.grid_points;
      j["grid_max"] = rec.grid_max;
      j["refinement_iterations"] = rec.refinement_iterations;
      j["certified_gap"] = finite_or_null(rec.certified_gap);
      j["upper_bound"] = finite_or_null(rec.upper_bound);
      j["pole_sums"] = {{"sum_I", ps.sum_I}, {"sum_II", ps.sum_II}, {"sum_III", ps.sum_III},
                        {"count_I", ps.count_I}, {"count_II", ps.count_II}, {"count_III", ps.count_III}};
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*qe) {
      const auto b = build_from(qe_a);
      const auto u = normalized(b.F);
      std::vector<Observable> bank;
      if (qe_obs.empty()) {
        bank = observable_bank();
      } else {
        for (const auto& n : qe_obs) bank.push_back(bank_observable(n));
      }
      const SphereRule rule(2 * qe_a.N + qe_margin);
      QEOptions opt;
      opt.physical_rule = &rule;
      opt.husimi_grid = qe_husimi;
      if (qe_h == "inverse_sqrt_eigenvalue") {
        opt.h_convention = HConvention::inverse_sqrt_eigenvalue;
      } else if (qe_h != "inverse_degree") {
        throw ConfigError("unknown h convention '" + qe_h + "'");
      }
      std::cout << qe_report_to_json(qe_report(b.F, u, bank, opt)) << "\n";
      return 0;
    }
    if (*swp) {
      SweepConfig c = swp_config.empty() ? SweepConfig{} : load_config(swp_config);
      if (!swp_N.empty()) c.N_list = swp_N;
      if (!swp_D.empty()) {
        c = parse_config(config_to_text(c) + "D = " + swp_D + "\n");
      }
      if (!swp_kind.empty()) c.points.kind = point_kind_from_string(swp_kind);
      if (swp_seed) c.points.seed = *swp_seed;
      if (swp_widths) c.points.anneal_radius_widths = *swp_widths;
      if (swp_iters) c.points.anneal_iterations = *swp_iters;
      if (swp_husimi) c.husimi_grid = *swp_husimi;
      if (!swp_out.empty()) c.output_dir = swp_out;
      if (swp_override) c.override_certificate = true;
      if (swp_large) c.allow_large_N = true;
      if (threads != 0) c.threads = threads;
      const auto rec = run_sweep(c);
      emit_report(rec, c.output_dir);
      std::cout << summary_text(rec);
      return 0;
    }
    if (*cal) {
      SweepConfig c;
      c.points = cal_p.pipeline();
      const auto res = calibrate_D(cal_N, cal_grid, c, cal_threshold);
      std::cout << calibration_to_json(res) << "\n";
      return 0;
    }
    if (*rep) {
      const auto rec = read_report(rep_dir);
      if (!rep_to.empty()) emit_report(rec, rep_to);
      std::cout << summary_text(rec);
      return 0;
    }
  } catch (const CertificateError& e) {
    std::cerr << "certificate failure: " << e.what() << "\n";
    return kExitCertificate;
  } catch (const ResourceError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kExitResource;
  } catch (const ConfigError& e) {
    std::cerr << "bad config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "bad config: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
