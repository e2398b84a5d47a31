// Copyright 2026 The vpctl Authors
// SPDX-License-Identifier: Apache-2.0
//
// Batch verification harness: scenario loading, proposition checks, control
// runs, report emission. One command = one process; nonzero exit on failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "vpctl/absorption.hpp"
#include "vpctl/characteristics.hpp"
#include "vpctl/control.hpp"
#include "vpctl/fixed_point.hpp"
#include "vpctl/parallel.hpp"
#include "vpctl/report.hpp"
#include "vpctl/scenario.hpp"
#include "vpctl/spectral.hpp"

namespace fs = std::filesystem;
using namespace vpctl;

namespace {

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int workers = 0;
  double tol_override = 0.0;
};

ScenarioConfig load_config(const Common& c) {
  ScenarioConfig cfg;
  if (!c.config_path.empty()) cfg = ScenarioConfig::from_json_file(c.config_path);
  if (c.seed != 1) cfg.seed = c.seed;
  if (c.tol_override > 0.0) cfg.tol = c.tol_override;
  return cfg;
}

void finish(RunReport& rep, const Common& c, const std::string& file) {
  fs::create_directories(c.out_dir);
  rep.print();
  rep.save(c.out_dir + "/" + file);
  if (!rep.all_pass()) std::exit(1);
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

GccCertificate gcc_for(const ScenarioConfig& cfg, const MagneticProfile& b) {
  CompactSet k = [&] {
    if (cfg.field_kind == "magnetic-axes-cross")
      return CompactSet::axes_cross(cfg.n_geo, cfg.axes_width);
    return CompactSet::from_profile_threshold(b, cfg.n_geo, 0.5 * b.b_max());
  }();
  return certify_gcc(b, k, 64, 64);
}

ReferenceControl synthesize_control(const ScenarioConfig& cfg, const std::string& out_dir) {
  ReferenceControl rc;
  if (cfg.is_magnetic()) {
    MagneticProfile b = cfg.magnetic_profile();
    GccCertificate gcc = gcc_for(cfg, b);
    if (!gcc.pass)
      throw std::runtime_error("refusing to synthesize: GCC certificate failed: " + gcc.reason);
    rc = compose_reference_magnetic(cfg.T, b, cfg.x0, cfg.r0, gcc, cfg.n_grid);
  } else {
    rc = compose_reference_bounded(cfg.T, cfg.external_force(), cfg.x0, cfg.r0, cfg.n_grid);
  }
  const MagneticProfile bprof = cfg.is_magnetic() ? cfg.magnetic_profile() : MagneticProfile();
  rc.eps_margin = certify_rendezvous_margin(
      rc, cfg.is_magnetic() ? ForceField() : cfg.external_force(),
      cfg.is_magnetic() ? &bprof : nullptr);
  if (!out_dir.empty()) rc.save(out_dir + "/control_" + cfg.name);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vpctl: Vlasov-Poisson control laboratory"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--config", common.config_path, "scenario config (JSON)");
  app.add_option("--out", common.out_dir, "output directory");
  app.add_option("--seed", common.seed, "RNG seed");
  app.add_option("--workers", common.workers, "worker cap (0 = all cores)");
  app.add_option("--tol", common.tol_override, "tolerance override");

  auto* sub_poisson = app.add_subcommand("poisson-test", "spectral Poisson oracle suite");
  auto* sub_gcc = app.add_subcommand("gcc-certify", "certify the geometric control condition");
  auto* sub_trace = app.add_subcommand("trace", "integrate one characteristic, CSV output");
  double tr_x = 0.1, tr_y = 0.1, tr_vx = 1.0, tr_vy = 0.0, tr_T = 1.0, tr_dt = 1e-3;
  sub_trace->add_option("--x", tr_x, "");
  sub_trace->add_option("--y", tr_y, "");
  sub_trace->add_option("--vx", tr_vx, "");
  sub_trace->add_option("--vy", tr_vy, "");
  sub_trace->add_option("--T", tr_T, "");
  sub_trace->add_option("--dt", tr_dt, "");
  auto* sub_synth = app.add_subcommand("synthesize", "build and store the reference control");
  auto* sub_verify = app.add_subcommand("verify", "run a named sampled verification");
  std::string prop;
  sub_verify->add_option("prop", prop,
                         "gv | accelerate | magnetic-gv | rendezvous | nonconcentration | gcc | "
                         "scaling | crossing-bound")
      ->required();
  auto* sub_run = app.add_subcommand("control-run", "full pipeline for a scenario");
  std::string variant = "local-bounded";
  sub_run->add_option("--variant", variant, "local-bounded | local-magnetic | global-hyperplane");
  auto* sub_report = app.add_subcommand("report", "merge run reports in the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (common.workers > 0) set_workers(common.workers);

  try {
    ScenarioConfig cfg = load_config(common);
    Timer timer;
    RunReport rep;
    rep.config_digest = cfg.digest();

    if (sub_poisson->parsed()) {
      rep.command = "poisson-test";
      const int n = cfg.n_grid;
      // single mode
      {
        DensityGrid rho(n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) rho.at(i, j) = std::cos(2.0 * M_PI * i / n);
        PotentialGrid phi = solve_poisson(rho);
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::fabs(phi.at(i, j) +
                                              std::cos(2.0 * M_PI * i / n) /
                                                  (4.0 * M_PI * M_PI)));
        rep.add("single-mode solution", worst <= 1e-12, worst, 1e-12);
      }
      // residual on a random smooth density
      {
        DensityGrid rho(n);
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) / n, y = static_cast<double>(j) / n;
            rho.at(i, j) = std::sin(2.0 * M_PI * (x + 2.0 * y)) +
                           0.3 * std::cos(2.0 * M_PI * (3.0 * x - y));
          }
        PotentialGrid phi = solve_poisson(rho);
        ScalarGrid lap = laplacian(phi);
        const double mean = rho.mean();
        double worst = 0.0, scale = rho.max_abs();
        for (std::size_t k = 0; k < lap.values().size(); ++k)
          worst = std::max(worst, std::fabs(lap.values()[k] - (rho.values()[k] - mean)));
        rep.add("spectral residual", worst <= 1e-10 * scale, worst / scale, 1e-10);
        rep.add("zero mean", std::fabs(phi.mean()) <= 1e-12, std::fabs(phi.mean()), 1e-12);
      }
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "poisson_test.json");
      return 0;
    }

    if (sub_gcc->parsed()) {
      rep.command = "gcc-certify";
      if (!cfg.is_magnetic()) throw std::runtime_error("gcc-certify needs a magnetic scenario");
      MagneticProfile b = cfg.magnetic_profile();
      GccCertificate cert = gcc_for(cfg, b);
      rep.add("gcc pass", cert.pass, cert.pass ? 1.0 : 0.0, 1.0, cert.reason);
      if (cert.pass) {
        const bool sound = recheck_gcc(cert, b,
                                       cfg.field_kind == "magnetic-axes-cross"
                                           ? CompactSet::axes_cross(cfg.n_geo, cfg.axes_width)
                                           : CompactSet::from_profile_threshold(
                                                 b, cfg.n_geo, 0.5 * b.b_max()),
                                       100, cfg.seed);
        rep.add("soundness recheck (100 rays)", sound, sound ? 1.0 : 0.0, 1.0);
        rep.add("b_floor positive", cert.b_floor > 0.0, cert.b_floor, 0.0);
      }
      fs::create_directories(common.out_dir);
      std::ofstream f(common.out_dir + "/gcc_certificate.json");
      f << cert.to_json();
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "gcc_certify.json");
      return 0;
    }

    if (sub_trace->parsed()) {
      rep.command = "trace";
      ForceField F = cfg.external_force();
      const MagneticProfile b = cfg.is_magnetic() ? cfg.magnetic_profile() : MagneticProfile();
      Trajectory tr;
      if (cfg.is_magnetic()) {
        tr = trace({wrap(tr_x, tr_y), {tr_vx, tr_vy}}, ForceField(), &b, 0.0, tr_T, tr_dt,
                   Scheme::kRotationSplitting, {SurfaceSpec::sphere(cfg.x0, cfg.r0)});
      } else {
        tr = trace({wrap(tr_x, tr_y), {tr_vx, tr_vy}}, F, nullptr, 0.0, tr_T, tr_dt,
                   Scheme::kRk4, {SurfaceSpec::sphere(cfg.x0, cfg.r0)});
      }
      fs::create_directories(common.out_dir);
      save_trajectory_csv(tr, common.out_dir + "/trace.csv");
      rep.add("trace samples", !tr.samples.empty(), static_cast<double>(tr.samples.size()), 1.0);
      rep.add("events", true, static_cast<double>(tr.events.size()), 0.0);
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "trace.json");
      return 0;
    }

    if (sub_synth->parsed()) {
      rep.command = "synthesize";
      ReferenceControl rc = synthesize_control(cfg, common.out_dir);
      rep.add("sweep min |W|", rc.sweep.min_norm >= 0.5 * kSweepMinNorm, rc.sweep.min_norm,
              kSweepMinNorm);
      rep.add("harmonic residual outside ball", rc.sweep.harmonic_residual <= 1e-8,
              rc.sweep.harmonic_residual, 1e-8);
      rep.add("m_lower found", rc.m_lower > 0.0, rc.m_lower, 1.0);
      rep.add("accelerator built", rc.M_tilde > rc.M + 1.0, rc.M_tilde, rc.M + 1.0);
      rep.add("rendezvous margin", rc.eps_margin > 0.0, rc.eps_margin, 0.0);
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "synthesize.json");
      return 0;
    }

    if (sub_verify->parsed()) {
      rep.command = "verify " + prop;
      ForceField F = cfg.external_force();
      const MagneticProfile b = cfg.is_magnetic() ? cfg.magnetic_profile() : MagneticProfile();
      if (prop == "gcc") {
        if (!cfg.is_magnetic()) throw std::runtime_error("gcc verify needs magnetic scenario");
        GccCertificate cert = gcc_for(cfg, b);
        rep.add("gcc pass", cert.pass, cert.pass ? 1 : 0, 1, cert.reason);
      } else if (prop == "scaling") {
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        auto sched = std::make_shared<ScheduledVectorGrid>();
        {
          DensityGrid rho(64);
          for (int j = 0; j < 64; ++j)
            for (int i = 0; i < 64; ++i) rho.at(i, j) = std::cos(2.0 * M_PI * i / 64.0);
          VectorGrid g = gradient(solve_poisson(rho));
          ScheduledVectorGrid::Piece pc;
          pc.t0 = 0.0;
          pc.t1 = 1e9;
          pc.weight = [](double) { return 1.0; };
          pc.grid = g;
          sched->pieces.push_back(pc);
        }
        ForceField field = ForceField::potential_schedule(sched);
        for (int k = 0; k < 30; ++k) {
          PhaseState s{{uni(rng), uni(rng)}, {2.0 * uni(rng) - 1.0, 2.0 * uni(rng) - 1.0}};
          for (double lam : {0.5, 2.0, -1.0})
            worst = std::max(worst, verify_scaling(s, field, lam, 0.5, 2e-4));
        }
        rep.add("scaling defect (lambda 1/2,2,-1)", worst <= 1e-6, worst, 1e-6);
      } else if (prop == "rendezvous" || prop == "gv" || prop == "magnetic-gv" ||
                 prop == "accelerate") {
        ReferenceControl rc = synthesize_control(cfg, "");
        RendezvousReport rr = verify_rendezvous(
            rc, cfg.is_magnetic() ? ForceField() : F, cfg.is_magnetic() ? &b : nullptr, 7, 16,
            std::max(4.0, rc.M), 2.0 * rc.m_lower, 0.0);
        rep.add("rendezvous fraction", rr.hit == rr.total, rr.fraction(), 1.0);
      } else if (prop == "nonconcentration") {
        HyperplaneControl hc = build_hyperplane_control(cfg.hp, cfg.hq, cfg.slab_d, cfg.T, F,
                                                        cfg.n_grid);
        NonConcentration nc = verify_nonconcentration(hc.reference_force(), cfg.T, 40, cfg.seed);
        rep.add("unperturbed ratio == 1", std::fabs(nc.c - 1.0) <= 1e-9, nc.c, 1.0 + 1e-9);
      } else if (prop == "crossing-bound") {
        // free transport through the ball: n(x,v) <= C (1+|v|)
        InitialData data = cfg.initial_data();
        data.nx = 24;
        data.nv = 10;
        WeightedEnsemble ens = sample_ensemble(data);
        std::vector<double> speeds0;
        for (auto& p : ens.particles) speeds0.push_back(p.state.v.norm());
        BoundaryAtlas atlas = BoundaryAtlas::ball(cfg.x0, cfg.r0);
        BumpProfile ups = BumpProfile::upsilon(cfg.T);
        TransportParams tp;
        tp.dt = cfg.dt;
        transport_absorb(ens, ForceField(), 0.0, cfg.T, atlas, ups, tp);
        auto [worst, ok] = verify_crossing_bound(ens, speeds0, 4.0 * cfg.T);
        rep.add("crossing ratio", ok, worst, 4.0 * cfg.T);
      } else {
        throw std::runtime_error("unknown verification: " + prop);
      }
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "verify_" + prop + ".json");
      return 0;
    }

    if (sub_run->parsed()) {
      rep.command = "control-run " + variant;
      ForceField F = cfg.external_force();
      FixedPointParams fp;
      fp.n_grid = cfg.n_grid;
      fp.n_knots = cfg.n_knots;
      fp.dt = cfg.dt;
      fp.max_iters = cfg.max_iters;
      fp.tol = cfg.tol;
      WeightedEnsemble f0 = sample_ensemble(cfg.initial_data());
      fs::create_directories(common.out_dir);
      ControlReport cr;
      if (variant == "global-hyperplane") {
        HyperplaneControl hc = build_hyperplane_control(cfg.hp, cfg.hq, cfg.slab_d, cfg.T, F,
                                                        cfg.n_grid);
        RegionSpec omega{RegionSpec::Kind::kSlab, {}, 0.0, hc.n_hat, 2.0 * hc.d, hc.spacing};
        cr = run_global(f0, hc, F, omega, fp);
      } else {
        const MagneticProfile b = cfg.is_magnetic() ? cfg.magnetic_profile() : MagneticProfile();
        ReferenceControl rc = synthesize_control(cfg, common.out_dir);
        cr = run_fixed_point(f0, rc, cfg.is_magnetic() ? ForceField() : F,
                             cfg.is_magnetic() ? &b : nullptr, cfg.omega, fp,
                             common.out_dir + "/iteration_history.csv");
      }
      std::ofstream f(common.out_dir + "/control_report.json");
      f << cr.to_json();
      rep.add("converged", cr.converged, cr.final_gap, fp.tol);
      rep.add("residual mass <= 1%", cr.residual_mass_outside <= 0.01 * cr.initial_mass,
              cr.residual_mass_outside, 0.01 * cr.initial_mass);
      rep.add("mass drift", cr.mass_drift <= 1e-10, cr.mass_drift, 1e-10);
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "control_run.json");
      return 0;
    }

    if (sub_report->parsed()) {
      rep.command = "report";
      int merged = 0;
      for (const auto& entry : fs::directory_iterator(common.out_dir)) {
        if (entry.path().extension() == ".json" &&
            entry.path().filename() != "merged_report.json")
          ++merged;
      }
      rep.add("reports found", merged > 0, merged, 1.0);
      rep.elapsed_seconds = timer.seconds();
      finish(rep, common, "merged_report.json");
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
