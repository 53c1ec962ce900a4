// varflow command-line driver.

#include "varflow/config.hpp"
#include "varflow/estimates.hpp"
#include "varflow/flow.hpp"
#include "varflow/iteration.hpp"
#include "varflow/mesh_gen.hpp"
#include "varflow/nucleation.hpp"
#include "varflow/output.hpp"
#include "varflow/suites.hpp"
#include "varflow/types.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace varflow;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResolution = 3;

struct Common {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  int threads = 1;
  std::vector<NamedHash> inputs;

  Config resolve() {
    Config c;
    if (!config_path.empty()) {
      const std::string text = read_file(config_path);
      std::istringstream is(text);
      c = parse_config(is);
      inputs.push_back({config_path, git_blob_hash(text)});
    }
    for (const auto& [k, v] : overrides) {
      if (k == "r0" && v == "default") c.r0.reset();
      else set_config_value(c, k, v);
    }
    c.validate();
    if (threads > 1) std::cerr << "note: worker parallelism is not built in; running single-threaded\n";
    return c;
  }

  DiscreteVarifold load_input(const std::string& path) {
    const std::string text = read_file(path);
    inputs.push_back({path, git_blob_hash(text)});
    std::istringstream is(text);
    return read_dvar(is);
  }
};

std::string header(const Config& c, const Common& common, const std::string& prefix = "# ") {
  return output_header(c.echo(), common.inputs, prefix);
}

nlohmann::ordered_json meta_json(const Config& c, const Common& common) {
  nlohmann::ordered_json m;
  m["tool"] = "varflow output";
  nlohmann::ordered_json cfg;
  std::istringstream lines(c.echo());
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find(" = ");
    cfg[line.substr(0, eq)] = line.substr(eq + 3);
  }
  m["config"] = cfg;
  nlohmann::ordered_json in = nlohmann::ordered_json::object();
  for (const auto& h : common.inputs) in[h.name] = h.hash;
  m["inputs"] = in;
  return m;
}

// Parses the JSON a writer produced and puts "meta" first.
std::string with_meta(const std::string& json_text, const nlohmann::ordered_json& meta) {
  const auto body = nlohmann::ordered_json::parse(json_text);
  nlohmann::ordered_json out;
  out["meta"] = meta;
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  return out.dump(2) + "\n";
}

void add_config_flags(CLI::App* app, Common& common) {
  app->add_option("--config", common.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
  const std::vector<std::pair<std::string, std::string>> keys = {
      {"alpha", "growth exponent, > 1/2"},
      {"Q", "sheet count"},
      {"r0", "envelope radius"},
      {"zeta", "cutoff transition width"},
      {"delta", "squash parameter"},
      {"eps", "nucleation scale"},
      {"mesh_level", "mesh refinement level"},
      {"dt_factor", "dt / min_edge^2"},
      {"quad_order", "simplex quadrature order 1..3"},
      {"seed", "random seed"},
      {"log_base", "natural or two"},
      {"kind", "flat_stack, branched_disk or perturbed_stack"},
      {"j", "iteration index"},
  };
  for (const auto& [key, help] : keys) {
    std::string flag = "--" + key;
    if (key == "mesh_level") flag = "--level,--mesh-level";
    else if (key == "dt_factor") flag = "--dt-factor";
    else if (key == "quad_order") flag = "--quad-order";
    else if (key == "log_base") flag = "--log-base";
    app->add_option_function<std::string>(
        flag, [&common, key](const std::string& v) { common.overrides[key] = v; }, help);
  }
  app->add_flag_function(
      "--allow-critical", [&common](std::int64_t) { common.overrides["allow_critical"] = "true"; },
      "permit alpha = 1/2");
}

FlowOptions flow_options(const Config& c, double cadence) {
  FlowOptions fo;
  fo.dt_factor = c.dt_factor;
  fo.quad_order = c.quad_order;
  fo.cadence = cadence;
  return fo;
}

std::string mass_dat(const FlowTrajectory& traj) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& r : traj.ledger) os << r.t << ' ' << r.mass << '\n';
  return os.str();
}

int cmd_gen_fixture(Common& common, const std::string& out) {
  const Config c = common.resolve();
  const DiscreteVarifold v = make_fixture(c.kind, c.Q, c.mesh_level);
  std::ostringstream body;
  write_dvar(body, v);
  write_output(out, header(c, common), body.str());
  const Plane t = Plane::coordinate(3, 2);
  const double ratio = density_ratio(v, Vec::Zero(3), 0.2, c.quad_order);
  const EnvelopeCheck env = envelope_check(v, GrowthEnvelope(c.alpha, c.r0_or(0.1), c.allow_critical), t, c.r0_or(0.1));
  std::cout.precision(17);
  std::cout << "wrote " << out << "\n"
            << "vertices " << v.num_vertices() << "\nfaces " << v.num_faces() << "\nmass " << v.mass() << "\n"
            << "density_ratio_origin " << ratio << "\n"
            << "envelope " << (env.pass ? "pass" : "fail") << " worst_excess " << env.worst_excess << "\n";
  return kExitPass;
}

DiscreteVarifold input_or_fixture(Common& common, const Config& c, const std::string& in) {
  return in.empty() ? make_fixture(c.kind, c.Q, c.mesh_level) : common.load_input(in);
}

int cmd_nucleate(Common& common, const std::string& in, const std::string& out) {
  Config c = common.resolve();
  const DiscreteVarifold before = input_or_fixture(common, c, in);
  const Plane t = Plane::coordinate(before.ambient(), before.ambient() - 1);
  const DiscreteVarifold after = nucleate(before, t, c.eps, SquashMap{c.delta});
  const NucleationReport rep =
      verify_nucleation(before, after, t, c.eps, GrowthEnvelope(c.alpha, c.r0_or(0.1), c.allow_critical), c.Q,
                     c.quad_order);
  std::ostringstream body;
  write_dvar(body, after);
  write_output(out, header(c, common), body.str());
  std::cout.precision(17);
  std::cout << "wrote " << out << "\n"
            << "locality " << (rep.locality ? "pass" : "fail") << "\n"
            << "height " << (rep.height ? "pass" : "fail") << " worst_excess " << rep.worst_height_excess << "\n"
            << "mass_bound " << (rep.mass_bound ? "pass" : "fail") << ' ' << rep.mass_ball_after << " <= "
            << rep.mass_bound_rhs << "\n"
            << "hole " << (rep.hole ? "pass" : "fail") << ' ' << rep.mass_hole_after << " (before "
            << rep.mass_hole_before << ", allowance " << rep.mass_hole_rhs << ")\n";
  return rep.locality && rep.height && rep.mass_bound && rep.hole ? kExitPass : kExitCheck;
}

int cmd_evolve(Common& common, const std::string& in, const std::string& out_dir, double duration, double cadence) {
  const Config c = common.resolve();
  const DiscreteVarifold v0 = input_or_fixture(common, c, in);
  if (!(duration > 0)) throw InvalidArgument("duration must be positive");
  const FlowTrajectory traj = evolve(v0, duration, flow_options(c, cadence > 0 ? cadence : duration / 20.0));
  const std::string h = header(c, common);
  std::ostringstream ledger;
  write_ledger_csv(ledger, traj);
  write_output((fs::path(out_dir) / "ledger.csv").string(), h, ledger.str());
  std::ostringstream final_mesh;
  write_dvar(final_mesh, traj.snapshots.back().v);
  write_output((fs::path(out_dir) / "final.dvar").string(), h, final_mesh.str());
  write_output((fs::path(out_dir) / "plot" / "mass.dat").string(), h, mass_dat(traj));
  std::cout.precision(17);
  std::cout << "snapshots " << traj.snapshots.size() << "\nsteps " << traj.ledger.size() - 1 << "\n"
            << "mass " << traj.ledger.front().mass << " -> " << traj.ledger.back().mass << "\n"
            << "ledger_excess " << traj.ledger_excess << (traj.valid ? " valid" : " INVALID") << "\n";
  return traj.valid ? kExitPass : kExitCheck;
}

int cmd_verify(const std::vector<std::string>& suites, bool all, const std::vector<std::string>& files,
               std::uint64_t seed) {
  int code = kExitPass;
  for (const auto& f : files) {
    try {
      const DiscreteVarifold v = load_dvar(f);
      std::cout << "file " << f << " ok (" << v.num_vertices() << " vertices, " << v.num_faces() << " faces)\n";
    } catch (const ParseError& e) {
      std::cout << "file " << f << " FAIL " << e.what() << "\n";
      code = kExitCheck;
    }
  }
  std::vector<std::string> names = suites;
  if (names.empty() && (all || files.empty())) names = all ? suite_names() : default_suites();
  for (const auto& name : names) {
    const SuiteResult r = run_suite(name, seed);
    std::cout << "suite " << r.name << ' ' << (r.pass ? "pass" : "FAIL") << ' ';
    std::cout.precision(3);
    std::cout << std::fixed << r.seconds << "s\n";
    std::cout.unsetf(std::ios::fixed);
    for (const auto& line : r.lines) std::cout << "  " << line << "\n";
    if (!r.pass) code = kExitCheck;
  }
  std::cout << "result " << (code == kExitPass ? "pass" : "FAIL") << "\n";
  return code;
}

int cmd_expanding_holes(Common& common, const std::string& in, const std::string& out) {
  const Config c = common.resolve();
  const Plane t = Plane::coordinate(3, 2);
  const double eps = c.eps;
  DiscreteVarifold start = in.empty() ? nucleate(make_fixture(c.kind, c.Q, c.mesh_level), t, eps, SquashMap{c.delta})
                                      : common.load_input(in);
  const FlowTrajectory traj = evolve(start, eps * eps, flow_options(c, eps * eps / 20.0));
  const FlowTrajectory w = rescale_trajectory(traj, eps);
  const ExpandingHolesConfig cfg(t, 0.0, 1.0, 1.0, std::numbers::sqrt2, std::numbers::sqrt2, 2.0,
                                 make_profile(c.zeta, 2), c.quad_order);
  const ExcessReport rep = expanding_holes_run(w, cfg);
  std::ostringstream js;
  write_excess_report_json(js, rep, cfg);
  write_output(out, "", with_meta(js.str(), meta_json(c, common)));
  std::cout.precision(17);
  std::cout << "wrote " << out << "\n"
            << "mass_ratio " << rep.mass_ratio_start << " -> " << rep.mass_ratio_end << "\n"
            << "mu_bar_sq " << rep.mu_bar_sq << "\nempirical_M " << rep.empirical_M << "\n"
            << "dissipation " << (rep.dissipation_pass ? "pass" : "fail") << "\n";
  return rep.dissipation_pass ? kExitPass : kExitCheck;
}

std::string schedule_json(const Config& c, const Common& common, long K, long J) {
  const IterationSchedule s = make_schedule(J, K, c.alpha, 2, c.r0_or(0.1), c.log_base);
  std::ostringstream js;
  write_schedule_json(js, s);
  return with_meta(js.str(), meta_json(c, common));
}

int cmd_series(Common& common, long K, long J, const std::string& out) {
  const Config c = common.resolve();
  const std::string text = schedule_json(c, common, K, J);
  if (out.empty()) std::cout << text;
  else {
    write_output(out, "", text);
    std::cout << "wrote " << out << "\n";
  }
  return kExitPass;
}

std::string aq_dat(const Config& c, long last) {
  std::ostringstream os;
  os.precision(17);
  for (double e = std::log10(3.0); e <= std::log10(static_cast<double>(last)) + 1e-12; e += 0.05) {
    const long q = std::lround(std::pow(10.0, e));
    os << q << ' ' << static_cast<double>(a_q_squared(q, c.alpha, 2, c.log_base)) << '\n';
  }
  return os.str();
}

int cmd_experiment(Common& common, const std::string& out_dir, bool series_only, long K, long J) {
  const Config c = common.resolve();
  const fs::path dir(out_dir);
  write_output((dir / "schedule.json").string(), "", schedule_json(c, common, K, J));
  if (series_only) {
    std::cout << "wrote " << (dir / "schedule.json").string() << "\n";
    return kExitPass;
  }
  const ExperimentConfig ec = to_experiment_config(c);
  const ExperimentResult r = orchestrate(ec);
  const std::string h = header(c, common);
  std::ostringstream csv, ledger, ratio;
  write_experiment_csv(csv, r);
  write_ledger_csv(ledger, r.trajectory);
  ratio.precision(17);
  for (const auto& s : r.stages) ratio << s.h << ' ' << s.ratio_after << '\n';
  write_output((dir / "experiment.csv").string(), h, csv.str());
  write_output((dir / "ledger.csv").string(), h, ledger.str());
  write_output((dir / "plot" / "mass.dat").string(), h, mass_dat(r.trajectory));
  write_output((dir / "plot" / "ratio.dat").string(), h, ratio.str());
  write_output((dir / "plot" / "aq.dat").string(), h, aq_dat(c, 1000000));
  std::cout.precision(17);
  std::cout << "mass_initial " << r.mass_initial << "\nmass_nucleated " << r.mass_nucleated << "\nmass_final "
            << r.mass_final << "\n"
            << "mass_drop " << r.mass_drop << " threshold " << r.drop_threshold << ' '
            << (r.mass_drop_pass ? "pass" : "fail") << "\n"
            << "weighted_mass " << r.lef2_lhs << " < " << r.lef2_rhs << ' ' << (r.lef2_pass ? "pass" : "fail") << "\n"
            << "E0 " << r.E0 << "\n";
  for (const auto& s : r.stages) {
    std::cout << "stage " << s.h << " ratio " << s.ratio_before << " -> " << s.ratio_after << " mu_sq "
              << s.mu_sq_measured << " c_min " << s.c_min << " M " << s.M_empirical << " dissipation "
              << (s.dissipation_pass ? "pass" : "fail") << "\n";
  }
  return r.pass() ? kExitPass : kExitCheck;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw InvalidArgument("cannot open '" + p.string() + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

int cmd_report(const std::string& dir) {
  const fs::path d(dir);
  const auto exp = read_csv(d / "experiment.csv");
  const auto led = read_csv(d / "ledger.csv");
  if (exp.empty() || led.size() < 2) throw ParseError("experiment directory has no data rows", 1);
  std::cout << "stages " << exp.size() - 1 << "\n";
  for (std::size_t i = 1; i < exp.size(); ++i) {
    std::cout << "  ";
    for (std::size_t k = 0; k < exp[i].size() && k < exp[0].size(); ++k) {
      std::cout << exp[0][k] << '=' << exp[i][k] << (k + 1 < exp[i].size() ? " " : "");
    }
    std::cout << "\n";
  }
  std::cout << "ledger_rows " << led.size() - 1 << "\n"
            << "mass " << led[1][1] << " -> " << led.back()[1] << "\n"
            << "t " << led[1][0] << " -> " << led.back()[0] << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varflow: discrete Brakke flow and hole nucleation experiments"};
  app.require_subcommand(1);
  Common common;

  std::string out = "fixture.dvar";
  auto* gen = app.add_subcommand("gen-fixture", "write a multi-sheet fixture as a DVAR file");
  add_config_flags(gen, common);
  gen->add_option("-o,--out", out, "output DVAR path");

  std::string in, nuc_out = "nucleated.dvar";
  auto* nuc = app.add_subcommand("nucleate", "apply hole nucleation and check its properties");
  add_config_flags(nuc, common);
  nuc->add_option("--in", in, "input DVAR (default: fixture from config)")->check(CLI::ExistingFile);
  nuc->add_option("-o,--out", nuc_out, "output DVAR path");

  std::string ev_dir = "evolve";
  double duration = 0.0, cadence = 0.0;
  auto* ev = app.add_subcommand("evolve", "run the discrete flow");
  add_config_flags(ev, common);
  ev->add_option("--in", in, "input DVAR (default: fixture from config)")->check(CLI::ExistingFile);
  ev->add_option("--duration", duration, "flow time")->required();
  ev->add_option("--cadence", cadence, "snapshot spacing (default duration / 20)");
  ev->add_option("-o,--out-dir", ev_dir, "output directory");

  std::vector<std::string> suites, files;
  bool all = false;
  std::uint64_t seed = 0;
  auto* ver = app.add_subcommand("verify", "run verification suites");
  ver->add_option("--suite", suites, "suite name (repeatable)")->check(CLI::IsMember(suite_names()));
  ver->add_flag("--all", all, "run every suite");
  ver->add_option("--in", files, "DVAR files to parse-check");
  ver->add_option("--seed", seed, "seed offset for randomized suites");

  std::string holes_out = "excess_report.json";
  auto* holes = app.add_subcommand("expanding-holes", "expanding-holes run on the nucleated fixture");
  add_config_flags(holes, common);
  holes->add_option("--in", in, "nucleated DVAR (default: nucleate the configured fixture)")->check(CLI::ExistingFile);
  holes->add_option("-o,--out", holes_out, "report path");

  long K = 50, J = 200;
  std::string series_out;
  auto* ser = app.add_subcommand("series", "iteration schedule and series tail");
  add_config_flags(ser, common);
  ser->add_option("--K", K, "first series index")->check(CLI::PositiveNumber);
  ser->add_option("--J", J, "iteration count")->check(CLI::PositiveNumber);
  ser->add_option("-o,--out", series_out, "schedule.json path (default stdout)");

  std::string exp_dir = "experiment";
  bool series_only = false;
  auto* exp = app.add_subcommand("experiment", "reference non-uniqueness experiment");
  add_config_flags(exp, common);
  exp->add_option("-o,--out-dir", exp_dir, "output directory");
  exp->add_flag("--series-only", series_only, "only write schedule.json");
  exp->add_option("--K", K, "first series index")->check(CLI::PositiveNumber);
  exp->add_option("--J", J, "iteration count")->check(CLI::PositiveNumber);

  std::string rep_dir = "experiment";
  auto* rep = app.add_subcommand("report", "summarize an experiment directory");
  rep->add_option("dir", rep_dir, "experiment output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*gen) return cmd_gen_fixture(common, out);
    if (*nuc) return cmd_nucleate(common, in, nuc_out);
    if (*ev) return cmd_evolve(common, in, ev_dir, duration, cadence);
    if (*ver) return cmd_verify(suites, all, files, seed);
    if (*holes) return cmd_expanding_holes(common, in, holes_out);
    if (*ser) return cmd_series(common, K, J, series_out);
    if (*exp) return cmd_experiment(common, exp_dir, series_only, K, J);
    if (*rep) return cmd_report(rep_dir);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitCheck;
  } catch (const ResolutionExhausted& e) {
    std::cerr << "resolution exhausted: " << e.what() << "\n";
    return kExitResolution;
  } catch (const PreconditionFailed& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheck;
  }
  return kExitUsage;
}
