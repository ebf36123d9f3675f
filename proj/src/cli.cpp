#include "earnshaw/cli.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "CLI11.hpp"
#include "earnshaw/config.hpp"
#include "earnshaw/csv.hpp"
#include "earnshaw/errors.hpp"
#include "earnshaw/parallel.hpp"
#include "json.hpp"

namespace earnshaw::cli {

namespace {

using csv::Cell;
using csv::Table;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> tol;
  std::optional<int> lmax;
  std::optional<std::string> output;
};

void diagnostic(std::ostream& err, const char* level, const char* kind, const std::string& message, int code,
                std::optional<double> partial = std::nullopt) {
  nlohmann::json d = {{"level", level}, {"kind", kind}, {"message", message}};
  if (code >= 0) d["exit_code"] = code;
  if (partial) d["partial_value"] = *partial;
  err << d.dump() << '\n';
}

Table make_table(const config::RunConfig& rc, const std::string& what, std::vector<std::string> header) {
  Table t;
  t.comments = {"earnshaw " + what + "; units hbar = c = 1, length unit " + rc.length_unit + ", energy unit hbar c / " +
                rc.length_unit};
  t.header = std::move(header);
  return t;
}

const casimir::Configuration& need_spheres(const config::RunConfig& rc) {
  if (!rc.casimir) throw ValidationError("this subcommand needs 'objects'");
  return *rc.casimir;
}

std::vector<std::string> targets(const config::RunConfig& rc) {
  if (!rc.targets.empty()) return rc.targets;
  std::vector<std::string> all;
  for (const auto& o : need_spheres(rc).objects) all.push_back(o.label);
  return all;
}

Cell opt_sign(std::optional<int> s) { return s ? Cell(static_cast<double>(*s)) : Cell(std::string()); }

Table classify(const config::RunConfig& rc) {
  const auto& cfg = need_spheres(rc);
  Table t = make_table(rc, "classify", {"object", "class", "sign", "predicted_sign_product"});
  std::vector<double> kappas;
  for (const auto& g : casimir::frequency_grid(cfg, 16)) kappas.push_back(g.kappa);
  for (const auto& o : cfg.objects) {
    const auto c = materials::classify(o.eps, o.mu, cfg.medium, kappas);
    t.rows.push_back({o.label, materials::to_string(c.cls), opt_sign(c.sign),
                      cfg.objects.size() > 1 ? opt_sign(stability::predicted_sign_product(cfg, o.label)) : Cell(std::string())});
  }
  return t;
}

Table energy(const config::RunConfig& rc) {
  const auto& cfg = need_spheres(rc);
  Table t = make_table(rc, "energy", {"energy", "est_rel_error", "l_max", "nodes", "tau", "min_eigenvalue"});
  const auto r = casimir::energy(cfg, rc.energy);
  t.rows.push_back({r.value, r.est_rel_error, static_cast<double>(r.l_max_used), static_cast<double>(r.node_count), cfg.tau,
                    r.min_eigenvalue.value_or(kNaN)});
  return t;
}

Table force(const config::RunConfig& rc) {
  const auto& cfg = need_spheres(rc);
  Table t = make_table(rc, "force", {"object", "force_x", "force_y", "force_z"});
  for (const auto& label : targets(rc)) {
    const Vec3 f = stability::force(cfg, label, rc.stability);
    t.rows.push_back({label, f.x(), f.y(), f.z()});
  }
  return t;
}

Table stability_table(const config::RunConfig& rc) {
  const auto& cfg = need_spheres(rc);
  Table t = make_table(rc, "stability",
                       {"object", "force_x", "force_y", "force_z", "laplacian", "laplacian_raw", "curvature_x", "curvature_y",
                        "curvature_z", "term1", "term2", "term3", "decomposition_laplacian", "predicted_sign_product",
                        "h", "est_error", "l_max", "nodes"});
  for (const auto& label : targets(rc)) {
    const auto r = stability::stability_report(cfg, label, rc.stability, rc.decomposition);
    const auto d = r.decomposition;
    t.rows.push_back({label, r.force.x(), r.force.y(), r.force.z(), r.laplacian, r.laplacian_raw, r.curvature.x(),
                      r.curvature.y(), r.curvature.z(), d ? d->term1 : kNaN, d ? d->term2 : kNaN, d ? d->term3 : kNaN,
                      d ? d->laplacian() : kNaN, opt_sign(r.predicted_sign_product), r.h_used, r.est_error,
                      static_cast<double>(r.l_max_used), static_cast<double>(r.nodes_used)});
  }
  return t;
}

Table sweep(const config::RunConfig& rc) {
  const auto& cfg = need_spheres(rc);
  if (!rc.sweep) throw ValidationError("the sweep subcommand needs a 'sweep' section");
  const auto& s = *rc.sweep;
  Table t = make_table(rc, "sweep along (" + csv::format_double(s.direction.x()) + ", " + csv::format_double(s.direction.y()) +
                               ", " + csv::format_double(s.direction.z()) + ") of " + s.target,
                       {"offset", "min_gap", "energy", "est_rel_error", "force_x", "force_y", "force_z"});
  const int index = casimir::find_object(cfg, s.target);
  for (double off : s.offsets) {
    casimir::Configuration moved = cfg;
    moved.objects[index].center += off * s.direction;
    const auto e = casimir::energy(moved, rc.energy);
    Vec3 f = Vec3::Constant(kNaN);
    if (s.force) f = stability::force(moved, s.target, rc.stability);
    t.rows.push_back({off, casimir::min_gap(moved), e.value, e.est_rel_error, f.x(), f.y(), f.z()});
  }
  return t;
}

Table plates(const config::RunConfig& rc) {
  if (!rc.plates) throw ValidationError("the plates subcommand needs a 'plates' section");
  const auto& p = *rc.plates;
  Table t = make_table(rc, "plates", {"gap", "tau", "energy_per_area"});
  for (double g : p.gaps) t.rows.push_back({g, rc.tau, casimir::lifshitz_plates(p.plate1, p.plate2, rc.medium, g, rc.tau, p.tol)});
  return t;
}

Table mc(const config::RunConfig& rc, std::ostream& err) {
  if (!rc.classical || !rc.mc) throw ValidationError("the mc subcommand needs a 'classical' section");
  const auto& cc = *rc.classical;
  auto opt = rc.mc->options;
  opt.seed = rc.seed;
  Table t = make_table(rc, "mc seed " + std::to_string(rc.seed),
                       {"container", "laplacian_estimate", "stderr", "n_samples", "autocorrelation_time", "acceptance_rate",
                        "quadrature_laplacian"});
  const auto run = classical::metropolis_run(cc, opt);
  if (run.acceptance_warning)
    diagnostic(err, "warning", "acceptance", "Metropolis acceptance rate " + csv::format_double(run.acceptance_rate) +
                                                 " is outside [0.1, 0.9]; adjust step_size", -1);
  const auto e = classical::laplacian_F_estimator(cc, rc.mc->target, run);
  std::size_t mobiles = 0;
  for (const auto& c : cc.containers) mobiles += c.mobile.size();
  double reference = kNaN;
  if (rc.mc->quadrature && mobiles <= 2)
    reference = classical::laplacian_F_fd(cc, rc.mc->target, rc.mc->fd_step, rc.mc->quadrature_options);
  t.rows.push_back({rc.mc->target, e.mean, e.stderr_, static_cast<double>(e.n_samples), e.autocorrelation_time,
                    run.acceptance_rate, reference});
  return t;
}

void apply_flags(const Flags& f, config::RunConfig& rc) {
  if (f.seed) rc.seed = *f.seed;
  if (f.tol) {
    if (!(*f.tol > 0.0)) throw ValidationError("--tol must be positive");
    rc.energy.tol = *f.tol;
    if (rc.plates) rc.plates->tol = *f.tol;
  }
  if (f.lmax) {
    if (*f.lmax < 1) throw ValidationError("--lmax must be >= 1");
    rc.energy.l_max = *f.lmax;
    rc.energy.adapt_lmax = false;
    rc.stability.l_max = *f.lmax;
  }
  if (f.output) rc.output = *f.output;
  if (f.threads) set_max_threads(*f.threads);
}

}  // namespace

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const PrecisionError*>(&e)) return kConvergence;
  if (dynamic_cast<const TruncationError*>(&e)) return kTruncation;
  return kValidation;
}

std::string error_kind(const Error& e) {
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const PrecisionError*>(&e)) return "PrecisionError";
  if (dynamic_cast<const TruncationError*>(&e)) return "TruncationError";
  if (dynamic_cast<const GeometryError*>(&e)) return "GeometryError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const CapabilityError*>(&e)) return "CapabilityError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  return "Error";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Casimir and classical stability calculations for arrangements of spheres"};
  app.name("earnshaw");
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands = {
      {"classify", "Material class of each object relative to the medium"},
      {"energy", "Interaction energy at zero or finite temperature"},
      {"force", "Casimir force on the target objects"},
      {"stability", "Force, Laplacian and trace decomposition for the target objects"},
      {"sweep", "Energy (and force) along a displacement of one object"},
      {"plates", "Lifshitz energy per area of two half-spaces"},
      {"mc", "Classical Metropolis estimate of the free-energy Laplacian"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", flags.config_path, "JSON run configuration")->required();
    sub->add_option("--seed", flags.seed, "Random seed (overrides the config)");
    sub->add_option("--threads", flags.threads, "Maximum worker threads, 0 for all cores");
    sub->add_option("--tol", flags.tol, "Relative tolerance for energies and plates");
    sub->add_option("--lmax", flags.lmax, "Fixed multipole cutoff");
    sub->add_option("-o,--output", flags.output, "CSV output path, '-' for stdout");
  }

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    diagnostic(err, "error", "UsageError", e.what(), kValidation);
    return kValidation;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    auto rc = config::load_run_config(flags.config_path);
    apply_flags(flags, rc);
    Table t;
    if (command == "classify") t = classify(rc);
    else if (command == "energy") t = energy(rc);
    else if (command == "force") t = force(rc);
    else if (command == "stability") t = stability_table(rc);
    else if (command == "sweep") t = sweep(rc);
    else if (command == "plates") t = plates(rc);
    else t = mc(rc, err);
    if (rc.output == "-") out << csv::to_csv(t) << std::flush;
    else csv::write_csv(t, rc.output);
    return kOk;
  } catch (const ConvergenceError& e) {
    diagnostic(err, "error", "ConvergenceError", e.what(), kConvergence, e.partial_value());
    return kConvergence;
  } catch (const Error& e) {
    const int code = exit_code_for(e);
    diagnostic(err, "error", error_kind(e).c_str(), e.what(), code);
    return code;
  } catch (const std::exception& e) {
    diagnostic(err, "error", "InternalError", e.what(), 1);
    return 1;
  }
}

}  // namespace earnshaw::cli
