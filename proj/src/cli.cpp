#include "shorsim/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "shorsim/errors.hpp"
#include "shorsim/shor_full.hpp"
#include "shorsim/shor_single.hpp"

namespace shorsim {

namespace {

std::vector<DisorderModel> selected_models(const std::string& name) {
  if (name == "both") return {DisorderModel::generic, DisorderModel::correlated};
  return {parse_model(name)};
}

std::vector<double> selected_grid(const RunConfig& cfg) {
  if (!cfg.eps.empty()) {
    std::vector<double> grid = cfg.eps;
    std::sort(grid.begin(), grid.end());
    return grid;
  }
  return geometric_grid(cfg.eps_min, cfg.eps_max, cfg.per_decade);
}

std::string join_doubles(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) out += (k ? "," : "") + format_double(values[k]);
  return out;
}

std::vector<std::string> config_comments(const RunConfig& cfg) {
  return {describe(cfg), "seed=" + std::to_string(cfg.seed)};
}

/// Writes to cfg.out when set, otherwise to `out`.
void emit(const RunConfig& cfg, std::ostream& out, CsvSchema schema, const std::vector<CsvRow>& rows) {
  if (cfg.out.empty())
    write_csv(out, schema, rows, config_comments(cfg));
  else
    write_csv(cfg.out, schema, rows, config_comments(cfg));
}

std::vector<double> folded_mean_full(const ProblemInstance& inst, DisorderModel model, double eps,
                                     const RunConfig& cfg, int realizations) {
  const FoldGeometry g(inst.Q, inst.r);
  std::vector<double> W(static_cast<std::size_t>(g.s), 0.0);
  const PropagationOptions prop = sweep_options(cfg).propagation;
  for (int k = 0; k < realizations; ++k) {
    const auto P = run_full_shor(inst, realization(inst, model, eps, cfg.seed, k), prop);
    const auto Wk = exact_clash_distribution(P, inst.Q, inst.r);
    for (std::size_t c = 0; c < W.size(); ++c) W[c] += Wk[c] / realizations;
  }
  return W;
}

int cmd_order(const RunConfig& cfg, std::ostream& out) {
  const auto inst = ProblemInstance::make(cfg.N, cfg.x);
  out << "N=" << inst.N << " x=" << inst.x << "\n";
  out << "r=" << inst.r << "\n";
  out << "n_q=" << inst.n_q << " n_l=" << inst.n_l << " Q=" << inst.Q << "\n";
  if (const auto f = factor_from_period(inst.x, inst.r, inst.N))
    out << "factors=" << f->first << "," << f->second << "\n";
  else
    out << "factors=none\n";
  return exit_code::ok;
}

int cmd_run(const RunConfig& cfg, std::ostream& out) {
  const auto inst = ProblemInstance::make(cfg.N, cfg.x);
  const DisorderModel model = parse_model(cfg.model);
  const double eps = cfg.eps.empty() ? 0.0 : cfg.eps.front();
  const u64 samples = cfg.samples;
  const int n_r = std::max(1, cfg.realizations);
  const PropagationOptions prop = sweep_options(cfg).propagation;
  const FoldGeometry g(inst.Q, inst.r);

  const auto schedule = std::make_shared<const ModMultSchedule>(inst);
  std::vector<SingleControlShor> shors;
  std::vector<Rng> streams;
  for (int k = 0; k < n_r; ++k) {
    shors.emplace_back(inst, schedule, realization(inst, model, eps, cfg.seed, k), prop);
    streams.push_back(make_stream(cfg.seed, StreamTag::measurement,
                                  {static_cast<u64>(model), static_cast<u64>(k), bits_of(eps)}));
  }
  ClashHistogram hist(g.s);
  for (const auto& c : config_comments(cfg)) out << "# " << c << '\n';
  out << "series,realization,a,c\n";
  for (u64 i = 0; i < samples; ++i) {
    const std::size_t k = i % static_cast<u64>(n_r);
    const u64 a = shors[k].sample(streams[k]);
    const i64 c = clash_fold(a, g);
    hist.add(c);
    out << i << ',' << k << ',' << a << ',' << c << '\n';
  }
  if (!cfg.out.empty()) {
    std::vector<double> W;
    if (eps == 0.0)
      W = ideal_clash_distribution(inst);
    else if (cfg.exact)
      W = folded_mean_full(inst, model, eps, cfg, static_cast<int>(std::min<u64>(n_r, std::max<u64>(samples, 1))));
    write_csv(cfg.out, CsvSchema::histogram, histogram_rows(hist, W.empty() ? nullptr : &W), config_comments(cfg));
  }
  return exit_code::ok;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto inst = ProblemInstance::make(cfg.N, cfg.x);
  const auto grid = selected_grid(cfg);
  const SweepOptions opts = sweep_options(cfg);
  std::vector<CsvRow> rows;
  bool capped = false;
  for (const auto model : selected_models(cfg.model)) {
    for (const double eps : grid) {
      const SweepPoint p = measure_point(inst, model, eps, opts);
      capped = capped || p.cap_reached;
      rows.push_back(sweep_row(inst, model, p, cfg.seed));
      err << "model=" << to_string(model) << " eps=" << format_double(eps) << " xi=" << format_double(p.xi)
          << " xi_err=" << format_double(p.xi_err) << " R=" << p.R_total << (p.cap_reached ? " CAP" : "") << '\n';
    }
  }
  emit(cfg, out, CsvSchema::sweep, rows);
  if (capped) {
    err << "warning: sample cap reached for at least one point\n";
    return exit_code::cap_reached;
  }
  return exit_code::ok;
}

int cmd_epsc(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  std::vector<std::pair<u64, u64>> instances;
  if (cfg.preset == "table1")
    instances = table1_instances();
  else if (cfg.preset == "reduced")
    instances = reduced_scaling_instances();
  else if (cfg.preset.empty())
    instances = {{cfg.N, cfg.x}};
  else
    throw std::invalid_argument("unknown preset '" + cfg.preset + "'");

  const auto grid = selected_grid(cfg);
  const SweepOptions opts = sweep_options(cfg);
  std::vector<CsvRow> rows, sweep_rows;
  int status = exit_code::ok;
  for (const auto& [N, x] : instances) {
    const auto inst = ProblemInstance::make(N, x);
    for (const auto model : selected_models(cfg.model)) {
      try {
        const BorderResult res = locate_epsilon_c(inst, model, grid, opts, cfg.stride);
        u64 total = 0;
        bool capped = false;
        for (const auto& p : res.points) {
          total += p.R_total;
          capped = capped || p.cap_reached;
          sweep_rows.push_back(sweep_row(inst, model, p, cfg.seed));
        }
        rows.push_back(epsc_row(inst, model, res.epsilon_c, cfg.seed));
        if (capped && status == exit_code::ok) status = exit_code::cap_reached;
        out << "N=" << N << " x=" << x << " r=" << inst.r << " model=" << to_string(model)
            << " xi0=" << format_double(res.xi0) << " points=" << res.points.size() << " R_total=" << total
            << (capped ? " CAP" : "") << " eps_c=" << format_double(res.epsilon_c) << std::endl;
      } catch (const NotBracketed& e) {
        err << "N=" << N << " x=" << x << " model=" << to_string(model) << ": " << e.what() << '\n';
        status = exit_code::not_bracketed;
      }
    }
  }
  if (!cfg.out.empty()) write_csv(cfg.out, CsvSchema::epsc, rows, config_comments(cfg));
  if (!cfg.sweep_out.empty()) write_csv(cfg.sweep_out, CsvSchema::sweep, sweep_rows, config_comments(cfg));
  return status;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.inputs.empty()) throw std::invalid_argument("fit: pass at least one --in epsc.csv");
  std::vector<std::pair<double, double>> generic, correlated;
  for (const auto& path : cfg.inputs) {
    const CsvTable table = read_csv(path, CsvSchema::epsc);
    for (const auto& p : epsc_points(table, DisorderModel::generic)) generic.push_back(p);
    for (const auto& p : epsc_points(table, DisorderModel::correlated)) correlated.push_back(p);
  }
  bool any = false;
  for (const auto& [model, pts] : {std::pair{DisorderModel::generic, &generic},
                                   std::pair{DisorderModel::correlated, &correlated}}) {
    if (pts->empty()) continue;
    const PowerLawFit fit = power_law_fit(*pts, cfg.min_log2N);
    out << "model=" << to_string(model) << " points=" << fit.points.size() << " B=" << format_double(fit.B)
        << " B_err=" << format_double(fit.B_err) << " beta=" << format_double(fit.beta)
        << " beta_err=" << format_double(fit.beta_err) << '\n';
    any = true;
  }
  if (!any) throw std::invalid_argument("fit: no epsc rows found");
  return exit_code::ok;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const auto inst = ProblemInstance::make(cfg.N, cfg.x);
  const DisorderModel model = parse_model(cfg.model);
  const double eps = cfg.eps.empty() ? 0.04 : cfg.eps.front();
  const PropagationOptions prop = sweep_options(cfg).propagation;

  const auto ideal = run_full_shor(inst, ideal_disorder(inst.n_q, inst.n_l), prop);
  const auto analytic = analytic_distribution(inst);
  double max_diff = 0.0;
  for (u64 a = 0; a < inst.Q; ++a) max_diff = std::max(max_diff, std::abs(ideal[a] - analytic[a]));

  const DisorderRealization disorder = realization(inst, model, eps, cfg.seed, 0);
  const auto P = run_full_shor(inst, disorder, prop);
  const auto W = exact_clash_distribution(P, inst.Q, inst.r);
  const FoldGeometry g(inst.Q, inst.r);
  SingleControlShor shor(inst, disorder, prop);
  Rng rng = make_stream(cfg.seed, StreamTag::measurement, {static_cast<u64>(model), 0, bits_of(eps)});
  ClashHistogram hist(g.s);
  for (u64 i = 0; i < cfg.samples; ++i) hist.add(clash_fold(shor.sample(rng), g));
  const auto counts = hist.dense();
  double tv = 0.0;
  for (std::size_t c = 0; c < W.size(); ++c)
    tv += std::abs(W[c] - static_cast<double>(counts[c]) / static_cast<double>(hist.total()));
  tv *= 0.5;

  const bool ok = max_diff < 1e-10 && tv < 0.02;
  out << "N=" << inst.N << " x=" << inst.x << " r=" << inst.r << " n_q=" << inst.n_q << " n_l=" << inst.n_l << '\n';
  out << "ideal_max_abs_diff=" << format_double(max_diff) << '\n';
  out << "model=" << to_string(model) << " eps=" << format_double(eps) << " samples=" << hist.total()
      << " tv_distance=" << format_double(tv) << '\n';
  out << (ok ? "PASS" : "FAIL") << '\n';
  if (!cfg.out.empty()) write_csv(cfg.out, CsvSchema::histogram, histogram_rows(hist, &W), config_comments(cfg));
  return ok ? exit_code::ok : exit_code::validation_failed;
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::order: return "order";
    case Command::run: return "run";
    case Command::sweep: return "sweep";
    case Command::epsc: return "epsc";
    case Command::fit: return "fit";
    case Command::validate: return "validate";
  }
  return "?";
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  os << "shorsim " << to_string(cfg.command);
  if (cfg.command == Command::fit) {
    for (const auto& in : cfg.inputs) os << " --in " << in;
    os << " --min-log2N " << format_double(cfg.min_log2N);
    return os.str();
  }
  if (!cfg.preset.empty())
    os << " --preset " << cfg.preset;
  else
    os << " --N " << cfg.N << " --x " << cfg.x;
  if (cfg.command == Command::order) return os.str();
  os << " --model " << cfg.model;
  if (!cfg.eps.empty())
    os << " --eps " << join_doubles(cfg.eps);
  else if (cfg.command == Command::sweep || cfg.command == Command::epsc)
    os << " --eps-min " << format_double(cfg.eps_min) << " --eps-max " << format_double(cfg.eps_max)
       << " --per-decade " << cfg.per_decade;
  os << " --NR " << cfg.realizations << " --rel-tol " << format_double(cfg.rel_tol) << " --seed " << cfg.seed;
  if (cfg.substeps)
    os << " --substeps " << *cfg.substeps;
  else
    os << " --propagator " << cfg.propagator;
  if (cfg.command == Command::run || cfg.command == Command::validate) os << " --samples " << cfg.samples;
  if (cfg.command == Command::sweep || cfg.command == Command::epsc)
    os << " --batch " << cfg.batch << " --max-samples " << cfg.max_samples;
  if (cfg.command == Command::epsc) os << " --stride " << cfg.stride;
  if (cfg.exact) os << " --exact";
  return os.str();
}

void validate_config(const RunConfig& cfg) {
  if (!(cfg.rel_tol > 0.0)) throw std::invalid_argument("--rel-tol must be > 0");
  if (cfg.realizations < 1) throw std::invalid_argument("--NR must be >= 1");
  if (cfg.substeps && *cfg.substeps < 1) throw std::invalid_argument("--substeps must be >= 1");
  if (cfg.propagator != "chebyshev" && cfg.propagator != "split")
    throw std::invalid_argument("--propagator must be chebyshev or split");
  for (const double e : cfg.eps)
    if (!(e >= 0.0)) throw std::invalid_argument("--eps values must be >= 0");
  if (cfg.model != "both") parse_model(cfg.model);
  if (cfg.command == Command::fit) return;
  if (cfg.command == Command::epsc && !cfg.preset.empty()) return;
  ProblemInstance::make(cfg.N, cfg.x);
}

SweepOptions sweep_options(const RunConfig& cfg) {
  SweepOptions opts;
  opts.realizations = cfg.realizations;
  opts.seed = cfg.seed;
  opts.adaptive.rel_tol = cfg.rel_tol;
  opts.adaptive.batch = cfg.batch;
  opts.adaptive.max_samples = cfg.max_samples;
  if (cfg.substeps) {
    opts.propagation = {Propagation::split, *cfg.substeps};
  } else if (cfg.propagator == "split") {
    opts.propagation = {Propagation::split, kDefaultSubsteps};
  }
  return opts;
}

int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    switch (cfg.command) {
      case Command::order: return cmd_order(cfg, out);
      case Command::run: return cmd_run(cfg, out);
      case Command::sweep: return cmd_sweep(cfg, out, err);
      case Command::epsc: return cmd_epsc(cfg, out, err);
      case Command::fit: return cmd_fit(cfg, out);
      case Command::validate: return cmd_validate(cfg, out);
    }
  } catch (const TrivialFactor& e) {
    err << "trivial factor: " << e.what() << " (factor=" << e.factor() << ")\n";
    return exit_code::trivial_factor;
  } catch (const NotBracketed& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::not_bracketed;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return exit_code::usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
  return exit_code::failure;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-control-qubit Shor simulator with static imperfections"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<u64> samples;

  const auto add_instance = [&](CLI::App* sub, bool required) {
    auto* n = sub->add_option("--N", cfg.N, "odd composite number to factor");
    auto* x = sub->add_option("--x", cfg.x, "base coprime to N");
    if (required) {
      n->required();
      x->required();
    }
  };
  const auto add_physics = [&](CLI::App* sub) {
    sub->add_option("--model", cfg.model, "generic, correlated or both")->capture_default_str();
    sub->add_option("--eps", cfg.eps, "imperfection strengths (comma separated)")->delimiter(',');
    sub->add_option("--NR", cfg.realizations, "disorder realizations")->capture_default_str();
    sub->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    sub->add_option("--substeps", cfg.substeps, "use the split propagator with this many substeps");
    sub->add_option("--propagator", cfg.propagator, "chebyshev or split")->capture_default_str();
    sub->add_option("--out", cfg.out, "output CSV path");
  };
  const auto add_sweep = [&](CLI::App* sub) {
    sub->add_option("--eps-min", cfg.eps_min, "grid lower edge")->capture_default_str();
    sub->add_option("--eps-max", cfg.eps_max, "grid upper edge")->capture_default_str();
    sub->add_option("--per-decade", cfg.per_decade, "grid points per decade")->capture_default_str();
    sub->add_option("--rel-tol", cfg.rel_tol, "relative error target of 1/xi_R")->capture_default_str();
    sub->add_option("--batch", cfg.batch, "samples per estimator update")->capture_default_str();
    sub->add_option("--max-samples", cfg.max_samples, "sample cap per point")->capture_default_str();
  };

  auto* order = app.add_subcommand("order", "multiplicative order and factors");
  add_instance(order, true);
  auto* run = app.add_subcommand("run", "measurement series at one eps");
  add_instance(run, true);
  add_physics(run);
  run->add_option("--samples", samples, "measurement series (default 1000)");
  run->add_flag("--exact", cfg.exact, "fill W_exact from the full-register simulation");
  auto* sweep = app.add_subcommand("sweep", "IPR versus eps");
  add_instance(sweep, true);
  add_physics(sweep);
  add_sweep(sweep);
  auto* epsc = app.add_subcommand("epsc", "locate the chaos border eps_c");
  add_instance(epsc, false);
  add_physics(epsc);
  add_sweep(epsc);
  epsc->add_option("--preset", cfg.preset, "instance list: reduced or table1");
  epsc->add_option("--stride", cfg.stride, "coarse scan stride over the grid")->capture_default_str();
  epsc->add_option("--sweep-out", cfg.sweep_out, "also write evaluated sweep points");
  auto* fit = app.add_subcommand("fit", "power-law fit of eps_c versus log2 N");
  fit->add_option("--in", cfg.inputs, "epsc CSV files")->required();
  fit->add_option("--min-log2N", cfg.min_log2N, "fit window lower edge")->capture_default_str();
  auto* validate = app.add_subcommand("validate", "cross-check single-control sampling against the full register");
  add_instance(validate, false);
  add_physics(validate);
  validate->add_option("--samples", samples, "measurement series (default 100000)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? exit_code::ok : exit_code::usage;
  }

  if (order->parsed()) cfg.command = Command::order;
  if (run->parsed()) cfg.command = Command::run;
  if (sweep->parsed()) cfg.command = Command::sweep;
  if (epsc->parsed()) cfg.command = Command::epsc;
  if (fit->parsed()) cfg.command = Command::fit;
  if (validate->parsed()) cfg.command = Command::validate;
  cfg.samples = samples.value_or(cfg.command == Command::validate ? 100'000 : 1000);
  if (cfg.command == Command::validate && cfg.N == 0) {
    cfg.N = 21;
    if (cfg.x == 0) cfg.x = 2;
  }
  return dispatch(cfg, out, err);
}

std::vector<CsvRow> histogram_rows(const ClashHistogram& h, const std::vector<double>* W_exact) {
  std::vector<CsvRow> rows;
  if (h.total() == 0 && W_exact == nullptr) return rows;
  const auto counts = h.dense();
  const i64 lo = -(h.cells() / 2);
  for (std::size_t k = 0; k < counts.size(); ++k)
    rows.push_back({std::to_string(lo + static_cast<i64>(k)), std::to_string(counts[k]),
                    W_exact ? format_double((*W_exact)[k]) : std::string{}});
  return rows;
}

CsvRow sweep_row(const ProblemInstance& inst, DisorderModel model, const SweepPoint& p, u64 seed) {
  return {std::to_string(inst.N),    std::to_string(inst.x),      std::to_string(inst.r),
          std::to_string(inst.n_q),  std::to_string(inst.n_l),    std::string(to_string(model)),
          format_double(p.epsilon),  format_double(p.xi),         format_double(p.xi_err),
          std::to_string(p.R_total), std::to_string(p.N_R),       std::to_string(seed)};
}

CsvRow epsc_row(const ProblemInstance& inst, DisorderModel model, double eps_c, u64 seed) {
  return {std::to_string(inst.N), format_double(inst.log2N()), std::to_string(inst.x), std::to_string(inst.r),
          std::string(to_string(model)), format_double(eps_c), std::to_string(seed)};
}

std::vector<std::pair<double, double>> epsc_points(const CsvTable& table, DisorderModel model) {
  const std::size_t m = table.column("model");
  const std::size_t l = table.column("log2N");
  const std::size_t e = table.column("eps_c");
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : table.rows)
    if (row[m] == to_string(model)) pts.emplace_back(parse_double(row[l]), parse_double(row[e]));
  return pts;
}

}  // namespace shorsim
