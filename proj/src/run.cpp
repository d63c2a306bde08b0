#include "bisys/run.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bisys/classical.hpp"
#include "bisys/correlation.hpp"
#include "bisys/dirac.hpp"
#include "bisys/radial.hpp"

namespace bisys {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt16(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.16e", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < columns.size(); ++i)
      out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
      out_ << (i ? "," : "") << fmt16(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

class GateCollector {
 public:
  explicit GateCollector(const Tolerances& tol) : tol_(tol) {}

  // Pass when measured <= threshold.
  bool check(const std::string& name, double measured, double threshold) {
    const bool ok = measured <= threshold;
    gates_.push_back({name, measured, threshold, ok});
    return ok;
  }

  const Tolerances& tol() const { return tol_; }
  const std::vector<GateResult>& gates() const { return gates_; }

  bool all_passed() const {
    for (const auto& g : gates_)
      if (!g.passed) return false;
    return true;
  }

  ordered_json to_json() const {
    ordered_json arr = ordered_json::array();
    for (const auto& g : gates_)
      arr.push_back({{"name", g.name},
                     {"measured", g.measured},
                     {"threshold", g.threshold},
                     {"passed", g.passed}});
    return arr;
  }

 private:
  Tolerances tol_;
  std::vector<GateResult> gates_;
};

std::string level_tag(int n, int l) {
  return "n" + std::to_string(n) + "l" + std::to_string(l);
}

std::string dirac_tag(const DiracLevel& lvl) {
  return "n" + std::to_string(lvl.n) + "j" + std::to_string(std::llround(2.0 * lvl.j)) +
         "half";
}

ordered_json run_classical_mode(const RunConfig& cfg,
                                const std::filesystem::path& out_dir,
                                GateCollector& gates,
                                std::vector<std::string>& artifacts) {
  const auto& sys = cfg.system;
  const auto& pot = cfg.potential;
  const auto& cl = *cfg.classical;

  ClassicalState rel_ic;
  double period_hint = 0.0;
  if (cl.r0) {
    const auto orbit = circular_orbit(sys, pot, *cl.r0);
    rel_ic = orbit.state;
    period_hint = orbit.period;
  } else {
    rel_ic = {*cl.position, *cl.velocity};
  }
  const double t_end = cl.t_end ? *cl.t_end : cl.periods * period_hint;
  const double dt = cl.dt ? *cl.dt : period_hint / cl.steps_per_period;

  IntegrationOptions opts;
  opts.stride = cl.sample_stride;
  auto relative = integrate_relative(sys, pot, rel_ic, t_end, dt, opts);
  const auto [ic1, ic2] = derive_individual_ics(sys, rel_ic);
  auto body1 = integrate_individual(sys, pot, 1, ic1, t_end, dt, opts);
  auto body2 = integrate_individual(sys, pot, 2, ic2, t_end, dt, opts);
  const auto set = assemble_trajectory_set(sys, pot, std::move(relative),
                                           std::move(body1), std::move(body2));
  const auto rep = check_equivalence(set, sys);

  const auto& tol = gates.tol();
  const double p_scale =
      (sys.m1 * set.body1.velocity).colwise().norm().maxCoeff();
  gates.check("classical.collinearity_body1", rep.max_pos_residual_body1,
              tol.collinearity * rep.position_scale);
  gates.check("classical.collinearity_body2", rep.max_pos_residual_body2,
              tol.collinearity * rep.position_scale);
  gates.check("classical.energy_split_body1", rep.max_energy_residual_body1,
              tol.energy_split * rep.energy_scale);
  gates.check("classical.energy_split_body2", rep.max_energy_residual_body2,
              tol.energy_split * rep.energy_scale);
  gates.check("classical.angmom_split_body1", rep.max_angmom_residual_body1,
              tol.angmom_split * rep.angmom_scale);
  gates.check("classical.angmom_split_body2", rep.max_angmom_residual_body2,
              tol.angmom_split * rep.angmom_scale);
  gates.check("classical.momentum_opposition", rep.max_momentum_sum,
              tol.momentum_opposition * p_scale);
  gates.check("classical.cm_fixed", rep.max_cm_displacement,
              tol.collinearity * rep.position_scale);
  gates.check("classical.energy_drift_relative", rep.energy_drift_rel,
              tol.energy_drift * rep.energy_scale);
  gates.check("classical.energy_drift_body1", rep.energy_drift_body1,
              tol.energy_drift * rep.energy_scale);
  gates.check("classical.energy_drift_body2", rep.energy_drift_body2,
              tol.energy_drift * rep.energy_scale);

  {
    CsvWriter csv(out_dir / "trajectories.csv",
                  {"t",
                   "rel_x", "rel_y", "rel_z", "rel_vx", "rel_vy", "rel_vz",
                   "b1_x", "b1_y", "b1_z", "b1_vx", "b1_vy", "b1_vz",
                   "b2_x", "b2_y", "b2_z", "b2_vx", "b2_vy", "b2_vz",
                   "energy_rel", "energy_b1", "energy_b2",
                   "angmom_rel", "angmom_b1", "angmom_b2"});
    for (Eigen::Index i = 0; i < set.relative.t.size(); ++i) {
      std::vector<double> row;
      row.push_back(set.relative.t[i]);
      for (const auto* tr : {&set.relative, &set.body1, &set.body2}) {
        for (int c = 0; c < 3; ++c) row.push_back(tr->position(c, i));
        for (int c = 0; c < 3; ++c) row.push_back(tr->velocity(c, i));
      }
      row.push_back(set.energy_rel[i]);
      row.push_back(set.energy_body1[i]);
      row.push_back(set.energy_body2[i]);
      row.push_back(set.angmom_rel.col(i).norm());
      row.push_back(set.angmom_body1.col(i).norm());
      row.push_back(set.angmom_body2.col(i).norm());
      csv.row(row);
    }
    artifacts.push_back("trajectories.csv");
  }

  ordered_json res;
  res["samples"] = set.relative.t.size();
  res["t_end"] = t_end;
  res["dt"] = dt;
  res["cm_consistent"] = rep.cm_consistent;
  res["position_scale"] = rep.position_scale;
  res["energy_scale"] = rep.energy_scale;
  res["max_pos_residual_body1"] = rep.max_pos_residual_body1;
  res["max_pos_residual_body2"] = rep.max_pos_residual_body2;
  res["max_energy_residual_body1"] = rep.max_energy_residual_body1;
  res["max_energy_residual_body2"] = rep.max_energy_residual_body2;
  res["max_angmom_residual_body1"] = rep.max_angmom_residual_body1;
  res["max_angmom_residual_body2"] = rep.max_angmom_residual_body2;
  res["max_momentum_sum"] = rep.max_momentum_sum;
  res["max_cm_displacement"] = rep.max_cm_displacement;
  res["energy_drift"] = {rep.energy_drift_rel, rep.energy_drift_body1,
                         rep.energy_drift_body2};
  return res;
}

double closed_form_energy(const CentralPotential& pot, double mass, int n, int l) {
  if (pot.kind() == PotentialKind::Coulomb) {
    const double k = pot.coefficient();
    return -mass * k * k / (2.0 * n * n);
  }
  // harmonic: (2 n_r + l + 3/2) omega
  const double omega = std::sqrt(pot.coefficient() / mass);
  return (2.0 * (n - l - 1) + l + 1.5) * omega;
}

ordered_json run_schrodinger_mode(const RunConfig& cfg,
                                  const std::filesystem::path& out_dir,
                                  GateCollector& gates,
                                  std::vector<std::string>& artifacts) {
  const auto& sys = cfg.system;
  const auto& pot = cfg.potential;
  const auto& sc = *cfg.schrodinger;
  const auto& tol = gates.tol();

  ordered_json levels = ordered_json::array();
  CsvWriter csv(out_dir / "levels.csv",
                {"n", "l", "energy_rel", "energy_b1", "energy_b2", "ratio_b1",
                 "ratio_b2", "eta2", "eta1", "nodes_rel", "nodes_b1", "nodes_b2",
                 "similarity_b1", "similarity_b2"});

  for (const auto& [n, l] : sc.levels) {
    RadialGrid grid = sc.r_max
                          ? RadialGrid{*sc.r_max, sc.n_points}
                          : default_grid(sys.reduced_mass, pot, n, sc.n_points);
    const auto rel = solve_relative(sys, pot, n, l, grid);
    const RadialGrid grid1{sys.eta2 * grid.r_max, sc.n_points};
    const RadialGrid grid2{sys.eta1 * grid.r_max, sc.n_points};
    const auto ind1 = solve_individual(sys, pot, 1, n, l, grid1);
    const auto ind2 = solve_individual(sys, pot, 2, n, l, grid2);

    const std::string tag = level_tag(n, l);
    const double ratio1 = ind1.energy / rel.energy;
    const double ratio2 = ind2.energy / rel.energy;
    gates.check("schrodinger.energy_ratio_body1_" + tag,
                std::abs(ratio1 - sys.eta2), tol.energy_ratio * sys.eta2);
    gates.check("schrodinger.energy_ratio_body2_" + tag,
                std::abs(ratio2 - sys.eta1), tol.energy_ratio * sys.eta1);
    const int target = n - l - 1;
    gates.check("schrodinger.node_count_" + tag,
                std::abs(rel.nodes - target) + std::abs(ind1.nodes - target) +
                    std::abs(ind2.nodes - target),
                0.5);
    const double sim1 = compare_scaled_wavefunctions(rel, ind1, sys.eta2);
    const double sim2 = compare_scaled_wavefunctions(rel, ind2, sys.eta1);
    gates.check("schrodinger.similarity_body1_" + tag, sim1, tol.similarity);
    gates.check("schrodinger.similarity_body2_" + tag, sim2, tol.similarity);

    if (pot.kind() == PotentialKind::Coulomb || pot.kind() == PotentialKind::Harmonic) {
      const double exact = closed_form_energy(pot, sys.reduced_mass, n, l);
      gates.check("schrodinger.closed_form_" + tag, std::abs(rel.energy - exact),
                  tol.closed_form * std::abs(exact));
    }
    // virial: <T> = p/(p+2) E for V ~ r^p (p = -1 Coulomb, p = 2 harmonic)
    const double p = pot.exponent();
    const double vexp = radial_expectation(rel, [&](double r) { return pot(r); });
    const double t_expect = rel.energy - vexp;
    gates.check("schrodinger.virial_" + tag,
                std::abs(t_expect - p / (p + 2.0) * rel.energy),
                tol.virial * std::abs(rel.energy));

    csv.row({double(n), double(l), rel.energy, ind1.energy, ind2.energy, ratio1,
             ratio2, sys.eta2, sys.eta1, double(rel.nodes), double(ind1.nodes),
             double(ind2.nodes), sim1, sim2});

    CsvWriter wf(out_dir / ("wavefunction_" + tag + ".csv"),
                 {"r_rel", "u_rel", "r_b1", "u_b1", "r_b2", "u_b2"});
    for (Eigen::Index i = 0; i < rel.r.size(); ++i)
      wf.row({rel.r[i], rel.u[i], ind1.r[i], ind1.u[i], ind2.r[i], ind2.u[i]});
    artifacts.push_back("wavefunction_" + tag + ".csv");

    ordered_json entry;
    entry["n"] = n;
    entry["l"] = l;
    entry["energy_relative"] = rel.energy;
    entry["energy_body1"] = ind1.energy;
    entry["energy_body2"] = ind2.energy;
    entry["ratio_body1"] = ratio1;
    entry["ratio_body2"] = ratio2;
    entry["similarity_body1"] = sim1;
    entry["similarity_body2"] = sim2;
    levels.push_back(entry);
  }
  artifacts.push_back("levels.csv");

  ordered_json res;
  res["levels"] = levels;
  return res;
}

ordered_json run_correlate_mode(const RunConfig& cfg,
                                const std::filesystem::path& out_dir,
                                GateCollector& gates,
                                std::vector<std::string>& artifacts) {
  const auto& sys = cfg.system;
  const auto& pot = cfg.potential;
  const auto& co = *cfg.correlate;
  const auto& tol = gates.tol();

  ordered_json res;
  {
    CsvWriter csv(out_dir / "spreads.csv",
                  {"sigma", "cm_position_spread", "total_momentum_spread", "product"});
    ordered_json arr = ordered_json::array();
    double prev_pos = -1.0, prev_mom = -1.0;
    bool monotone = true;
    double worst_product = 0.0;
    bool first = true;
    for (double s : co.sigmas) {
      const double ps = cm_position_spread(s);
      const double ms = total_momentum_spread(s);
      const double prod = spread_product(s);
      worst_product = std::max(worst_product, std::abs(prod - 2.25));
      if (!first) {
        if (!(ps < prev_pos) || !(ms > prev_mom)) monotone = false;
      }
      first = false;
      prev_pos = ps;
      prev_mom = ms;
      csv.row({s, ps, ms, prod});
      arr.push_back({{"sigma", s},
                     {"cm_position_spread", ps},
                     {"total_momentum_spread", ms},
                     {"product", prod}});
    }
    gates.check("correlate.spread_product", worst_product, tol.spread_product);
    gates.check("correlate.tradeoff_monotone", monotone ? 0.0 : 1.0, 0.5);
    res["spreads"] = arr;
    artifacts.push_back("spreads.csv");
  }

  const auto [n, l] = co.level;
  const auto grid = default_grid(sys.reduced_mass, pot, n, co.n_points);
  const auto rel = solve_relative(sys, pot, n, l, grid);
  const auto ind1 = solve_individual(sys, pot, 1, n, l,
                                     RadialGrid{sys.eta2 * grid.r_max, co.n_points});
  const auto ind2 = solve_individual(sys, pot, 2, n, l,
                                     RadialGrid{sys.eta1 * grid.r_max, co.n_points});

  const double h_r = rel.r[1];
  const double length = pot.characteristic_length(sys.reduced_mass);
  Eigen::Index k_points = co.k_points + (co.k_points % 2);
  const double pi = double(EIGEN_PI);
  // default well inside both Nyquist caps: near the edge the Simpson error of
  // the oscillatory kernel dominates and poisons the reconstruction
  double k_max = co.k_max ? *co.k_max
                          : 0.25 * std::min(0.9 * pi / h_r,
                                            0.9 * pi * double(k_points) / grid.r_max);
  const Eigen::ArrayXd k_grid = Eigen::ArrayXd::LinSpaced(k_points + 1, 0.0, k_max);
  const auto mwf = momentum_wavefunction(rel, k_grid);
  const double norm_k = parseval_norm(mwf);
  gates.check("correlate.parseval", std::abs(norm_k - 1.0), tol.parseval);

  const Eigen::ArrayXd u_back = position_wavefunction(mwf, rel.r);
  const double recon = (u_back - rel.u).abs().maxCoeff();
  gates.check("correlate.reconstruction", recon, tol.reconstruction);

  const double window_max = 0.05 * length;
  const auto fits = small_r_exponent(rel, ind1, ind2, sys, window_max);
  gates.check("correlate.exponent_relative", std::abs(fits.relative.slope - l),
              tol.exponent);
  gates.check("correlate.exponent_product", std::abs(fits.product.slope - 2.0 * l),
              tol.exponent);

  {
    CsvWriter csv(out_dir / "momentum.csv", {"k", "u_tilde"});
    for (Eigen::Index i = 0; i < mwf.k.size(); ++i) csv.row({mwf.k[i], mwf.u[i]});
    artifacts.push_back("momentum.csv");
  }

  res["level"] = {{"n", n}, {"l", l}};
  res["parseval_norm"] = norm_k;
  res["reconstruction_error"] = recon;
  res["k_max"] = k_max;
  res["exponent_relative"] = {{"slope", fits.relative.slope},
                              {"stderr", fits.relative.slope_error},
                              {"samples", fits.relative.n_samples}};
  res["exponent_product"] = {{"slope", fits.product.slope},
                             {"stderr", fits.product.slope_error},
                             {"samples", fits.product.n_samples}};
  return res;
}

ordered_json run_dirac_mode(const RunConfig& cfg, const std::filesystem::path& out_dir,
                            GateCollector& gates, std::vector<std::string>& artifacts) {
  const auto& sys = cfg.system;
  const auto& dc = *cfg.dirac;
  const auto& tol = gates.tol();
  const auto sys_ld = make_system<long double>(sys.m1, sys.m2);

  CsvWriter csv(out_dir / "spectra.csv",
                {"n", "two_j", "coupling", "bound_mass", "mass_defect",
                 "old_reduced_mass", "old_with_recoil", "diff_numeric_bare",
                 "diff_numeric_recoil", "diff_formula"});
  ordered_json arr = ordered_json::array();

  double worst_scaling = 0.0;
  long double worst_c2 = 0.0L;
  double worst_bohr = 0.0;

  for (const auto& lvl : dc.levels) {
    const double x = dc.coupling;
    const auto cmp_a = compare_spectra(sys, x, lvl, OldPrescription::ReducedMass);
    const auto cmp_b = compare_spectra(sys, x, lvl, OldPrescription::ReducedMassPlusRecoil);
    const std::string tag = dirac_tag(lvl);

    gates.check("dirac.defect_positive_" + tag, -cmp_a.mass_defect, 0.0);

    // nonrelativistic limit: defect/x^2 -> mu/(2n^2) on the halving ladder
    const long double base = dc.ladder_base;
    std::vector<long double> rungs(3);
    long double xx = base;
    for (auto& g : rungs) {
      g = mass_defect(sys_ld, xx, lvl) / (xx * xx);
      xx /= 2.0L;
    }
    const long double limit = richardson_limit(std::move(rungs));
    const long double bohr = sys_ld.reduced_mass / (2.0L * lvl.n * lvl.n);
    const double bohr_dev = static_cast<double>(std::abs(limit / bohr - 1.0L));
    worst_bohr = std::max(worst_bohr, bohr_dev);
    gates.check("dirac.bohr_limit_" + tag, bohr_dev, tol.bohr_limit);

    // quartic scaling of the level difference on the same ladder
    for (const auto variant :
         {OldPrescription::ReducedMass, OldPrescription::ReducedMassPlusRecoil}) {
      const long double d0 = level_difference_numeric(sys_ld, base, lvl, variant);
      const long double d1 = level_difference_numeric(sys_ld, base / 2.0L, lvl, variant);
      const long double d2 = level_difference_numeric(sys_ld, base / 4.0L, lvl, variant);
      worst_scaling = std::max(
          worst_scaling,
          std::max(static_cast<double>(std::abs(d0 / d1 / 16.0L - 1.0L)),
                   static_cast<double>(std::abs(d1 / d2 / 16.0L - 1.0L))));
      const long double c2 = quadratic_residual(sys_ld, base, lvl, variant);
      worst_c2 = std::max(worst_c2, std::abs(c2));
    }

    csv.row({double(lvl.n), 2.0 * lvl.j, x, cmp_a.bound_mass, cmp_a.mass_defect,
             cmp_a.old_bound_mass, cmp_b.old_bound_mass, cmp_a.difference_numeric,
             cmp_b.difference_numeric, cmp_a.difference_formula});

    ordered_json entry;
    entry["n"] = lvl.n;
    entry["j"] = lvl.j;
    entry["bound_mass"] = cmp_a.bound_mass;
    entry["mass_defect"] = cmp_a.mass_defect;
    entry["diff_numeric_bare"] = cmp_a.difference_numeric;
    entry["diff_numeric_recoil"] = cmp_b.difference_numeric;
    entry["diff_formula"] = cmp_a.difference_formula;
    entry["formula_over_numeric_recoil"] =
        cmp_a.difference_formula / cmp_b.difference_numeric;
    entry["bohr_limit_deviation"] = bohr_dev;
    arr.push_back(entry);
  }
  artifacts.push_back("spectra.csv");

  gates.check("dirac.quartic_scaling", worst_scaling, tol.quartic_scaling);
  gates.check("dirac.quadratic_cancellation", static_cast<double>(worst_c2),
              tol.quadratic_cancellation * sys.total_mass);

  ordered_json res;
  res["coupling"] = dc.coupling;
  res["ladder_base"] = dc.ladder_base;
  res["levels"] = arr;
  res["worst_quartic_scaling_deviation"] = worst_scaling;
  res["worst_quadratic_residual"] = static_cast<double>(worst_c2);
  res["worst_bohr_limit_deviation"] = worst_bohr;
  return res;
}

}  // namespace

RunReport run(const RunConfig& cfg, const std::filesystem::path& out_dir, bool verbose,
              std::ostream* log) {
  std::filesystem::create_directories(out_dir);

  GateCollector gates(cfg.tolerances);
  RunReport report;
  ordered_json summary;
  summary["mode"] = to_string(cfg.mode);
  summary["system"] = {{"m1", cfg.system.m1},
                       {"m2", cfg.system.m2},
                       {"total_mass", cfg.system.total_mass},
                       {"reduced_mass", cfg.system.reduced_mass},
                       {"eta1", cfg.system.eta1},
                       {"eta2", cfg.system.eta2}};
  {
    ordered_json pj;
    switch (cfg.potential.kind()) {
      case PotentialKind::Coulomb:
        pj = {{"kind", "coulomb"}, {"strength", cfg.potential.coefficient()}};
        break;
      case PotentialKind::Harmonic:
        pj = {{"kind", "harmonic"}, {"stiffness", cfg.potential.coefficient()}};
        break;
      case PotentialKind::PowerLaw:
        pj = {{"kind", "power"},
              {"coefficient", cfg.potential.coefficient()},
              {"exponent", cfg.potential.exponent()}};
        break;
    }
    summary["potential"] = pj;
  }

  ordered_json results;
  std::string error;
  try {
    const bool full = cfg.mode == RunMode::FullReport;
    if (full || cfg.mode == RunMode::Classical)
      results["classical"] =
          run_classical_mode(cfg, out_dir, gates, report.artifacts);
    if (full || cfg.mode == RunMode::Schrodinger)
      results["schrodinger"] =
          run_schrodinger_mode(cfg, out_dir, gates, report.artifacts);
    if (full || cfg.mode == RunMode::Correlate)
      results["correlate"] =
          run_correlate_mode(cfg, out_dir, gates, report.artifacts);
    if (full || cfg.mode == RunMode::Dirac)
      results["dirac"] = run_dirac_mode(cfg, out_dir, gates, report.artifacts);
  } catch (const std::exception& e) {
    error = to_string(cfg.mode) + ": " + e.what();
  }

  summary["results"] = results;
  summary["gates"] = gates.to_json();
  report.gates = gates.gates();
  report.all_passed = gates.all_passed() && error.empty();
  summary["all_passed"] = report.all_passed;
  if (!error.empty()) summary["error"] = error;
  summary["artifacts"] = report.artifacts;

  report.summary_json = summary.dump(2) + "\n";
  {
    std::ofstream out(out_dir / "summary.json");
    if (!out) throw std::runtime_error("cannot write summary.json");
    out << report.summary_json;
  }
  report.artifacts.push_back("summary.json");

  if (log) {
    if (verbose)
      for (const auto& g : gates.gates())
        *log << (g.passed ? "[PASS] " : "[FAIL] ") << g.name
             << "  measured=" << fmt16(g.measured)
             << "  threshold=" << fmt16(g.threshold) << "\n";
    std::size_t passed = 0;
    for (const auto& g : gates.gates()) passed += g.passed;
    *log << "gates passed: " << passed << "/" << gates.gates().size();
    if (!error.empty()) *log << "  error: " << error;
    *log << "\n";
  }

  report.error = error;
  return report;
}

}  // namespace bisys
