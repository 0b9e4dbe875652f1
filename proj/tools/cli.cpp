#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>

#include <CLI11.hpp>

#include "fbl/c_of_k.hpp"
#include "fbl/dual_functionals.hpp"
#include "fbl/error.hpp"
#include "fbl/experiments.hpp"
#include "fbl/rng.hpp"

namespace fbl::cli {

namespace {

const std::vector<std::string> kCommands = {"norm", "dual-norm", "admissible", "octa", "slice-diam", "rough", "repr-check"};

Json load_space(const std::string& arg) {
  static const std::regex shorthand(R"((l1|l2|linf)[:(]([0-9]+)\)?)");
  std::smatch mt;
  if (!std::filesystem::exists(arg) && std::regex_match(arg, mt, shorthand))
    return to_json(space_from_json({{"kind", mt[1].str()}, {"dim", std::stoi(mt[2].str())}}));
  return to_json(space_from_json(read_json_file(arg)));
}

double alpha_or_nan(const SpaceModel& s) {
  return s.dim() >= 2 ? alpha_constant(s) : std::numeric_limits<double>::quiet_NaN();
}

SearchOptions search(const RunConfig& c) {
  SearchOptions o;
  o.m = c.m;
  o.budget = c.budget;
  o.seed = c.seed;
  return o;
}

void check_dims(const SpaceModel& s, const std::vector<LatticeExpr>& fs) {
  for (std::size_t i = 0; i < fs.size(); ++i)
    if (fs[i].dim() != s.dim())
      throw InputError("expression " + std::to_string(i) + " has dimension " + std::to_string(fs[i].dim()) +
                       ", space is " + s.label());
}

std::vector<LatticeExpr> exprs_of(const RunConfig& c, const SpaceModel& s) {
  std::vector<LatticeExpr> fs;
  for (const auto& j : c.exprs) fs.push_back(expr_from_json(j));
  check_dims(s, fs);
  return fs;
}

LatticeExpr single_expr(const RunConfig& c, const SpaceModel& s) {
  if (c.exprs.size() != 1) throw InputError(c.command + ": exactly one --expr required");
  return exprs_of(c, s)[0];
}

std::vector<LatticeExpr> random_family(const SpaceModel& s, const RunConfig& c, int run) {
  std::vector<LatticeExpr> fs;
  for (int j = 0; j < c.family_size; ++j)
    fs.push_back(random_unit_certified(s, mix_seed(mix_seed(c.seed, 77 + run), j), c.m, c.budget).f);
  return fs;
}

Json exprs_json(const std::vector<LatticeExpr>& fs) {
  Json a = Json::array();
  for (const auto& f : fs) a.push_back(to_json(f));
  return a;
}

Json run_norm(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  const auto cert = certify_norm(s, single_expr(c, s), search(c));
  rows.push_back({"norm", s.label(), s.dim(), cert.lower, alpha_or_nan(s), c.seed, c.budget});
  return to_json(cert);
}

Json run_dual_norm(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  if (c.dual.is_null()) throw InputError("dual-norm: --dual required");
  const auto a = dual_from_json(c.dual);
  const auto b = bracket(s, a);
  Json out = {{"bracket", {{"lower", b.lower}, {"upper", b.upper}}}};
  const double d = bm_distance_upper(s).distance;
  out["bm_distance"] = d;
  try {
    out["dirac_separation"] = dirac_separation_value(s, a, d);
  } catch (const InputError& e) {
    out["dirac_separation"] = nullptr;
    out["dirac_separation_skipped"] = e.what();
  }
  if (s.kind() == SpaceKind::L1) {
    try {
      const auto w = dual_lower_via_witness(s, a);
      out["witness"] = {{"value", w.value}, {"f", to_json(w.witness)}, {"interpolant", to_json(w.interpolant)}};
    } catch (const InputError& e) {
      out["witness"] = nullptr;
      out["witness_skipped"] = e.what();
    }
  }
  rows.push_back({"dual-norm", s.label(), s.dim(), b.upper, alpha_or_nan(s), c.seed, c.budget});
  return out;
}

Json verdict_json(const AdmissibilityVerdict& v) {
  Json j = {{"admissible", v.admissible}, {"gauge", v.gauge}, {"excess", v.excess}, {"signs", v.signs}};
  if (v.coordinate >= 0) j["coordinate"] = v.coordinate;
  return j;
}

Json run_admissible(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  if (c.tuple.is_null()) throw InputError("admissible: --tuple required");
  const auto t = vectors_from_json(c.tuple, "tuple");
  Json out;
  bool admissible = true;
  if (static_cast<int>(t.size()) <= kMaxSignEnumeration) {
    const auto v = is_admissible(s, t, c.tol);
    out["sign_enumeration"] = verdict_json(v);
    admissible = v.admissible;
  }
  if (s.kind() == SpaceKind::L1) {
    const auto v = is_admissible_l1(s, t, c.tol);
    out["coordinate_sums"] = verdict_json(v);
    admissible = v.admissible;
  }
  if (out.is_null()) throw InputError("admissible: too many vectors for sign enumeration");
  out["admissible"] = admissible;
  rows.push_back({"admissible", s.label(), s.dim(), admissible ? 1.0 : 0.0, alpha_or_nan(s), c.seed, c.budget});
  return out;
}

Json run_octa(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  OctaOptions o;
  o.m = c.m;
  o.budget = c.budget;
  o.restarts = c.restarts;
  o.seed = c.seed;
  if (!c.exprs.empty()) {
    const auto r = octa_witness_search(s, exprs_of(c, s), o);
    rows.push_back({"octa", s.label(), s.dim(), r.value, alpha_or_nan(s), c.seed, c.budget});
    return to_json(r);
  }
  if (c.runs < 1) throw InputError("octa: give --expr or --runs");
  Json table = Json::array();
  for (int run = 0; run < c.runs; ++run) {
    const auto fs = random_family(s, c, run);
    const auto r = octa_witness_search(s, fs, o);
    rows.push_back({"octa", s.label(), s.dim(), r.value, alpha_or_nan(s), c.seed, c.budget});
    table.push_back({{"run", run}, {"family", exprs_json(fs)}, {"result", to_json(r)}});
  }
  return {{"runs", table}};
}

std::vector<double> weights(const RunConfig& c, std::size_t count, int run) {
  if (!c.lambdas.empty()) {
    if (c.lambdas.size() != count) throw InputError("slice-diam: one --lambdas entry per slice required");
    return c.lambdas;
  }
  std::vector<double> w(count, 1.0 / count);
  if (run >= 0) {
    Rng rng(mix_seed(c.seed, 900 + run));
    double total = 0.0;
    for (auto& x : w) total += x = 0.05 + rng.uniform();
    for (auto& x : w) x /= total;
  }
  return w;
}

Json run_slice_diam(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  DiameterOptions o;
  o.eta = c.eta;
  o.m = c.m;
  o.budget = c.budget;
  o.seed = c.seed;
  const auto one = [&](const std::vector<LatticeExpr>& fs, int run) {
    std::vector<SliceSpec> slices;
    for (const auto& f : fs) slices.push_back({f, c.alpha});
    const auto d = cc_slice_diameter(s, slices, weights(c, fs.size(), run), o);
    rows.push_back({"slice-diam", s.label(), s.dim(), d.value, d.alpha, c.seed, c.budget});
    return to_json(d);
  };
  if (!c.exprs.empty()) return one(exprs_of(c, s), -1);
  if (c.runs < 1) throw InputError("slice-diam: give --expr or --runs");
  Json table = Json::array();
  for (int run = 0; run < c.runs; ++run) {
    const auto fs = random_family(s, c, run);
    table.push_back({{"run", run}, {"slices", exprs_json(fs)}, {"result", one(fs, run)}});
  }
  return {{"runs", table}};
}

Json run_rough(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  const auto r = rough_probe(s, single_expr(c, s), c.scales, c.m, c.budget, c.seed);
  double best = 0.0;
  for (const auto& sc : r.scales) best = std::max(best, sc.best.quotient);
  rows.push_back({"rough", s.label(), s.dim(), best, r.alpha, c.seed, c.budget});
  return to_json(r);
}

Json run_repr_check(const RunConfig& c, const SpaceModel& s, std::vector<CsvRow>& rows) {
  if (s.kind() != SpaceKind::L1) throw InputError("repr-check: requires an l1 space");
  std::vector<LatticeExpr> fs = exprs_of(c, s);
  if (fs.empty()) {
    if (c.runs < 1) throw InputError("repr-check: give --expr or --runs");
    for (int run = 0; run < c.runs; ++run) {
      Rng rng(mix_seed(c.seed, 300 + run));
      fs.push_back(random_expr(s.dim(), 1 + rng.below(3), rng.next()));
    }
  }
  const auto grid = make_sphere_grid(s.dim(), c.grid > 0 ? c.grid : default_grid_resolution(s.dim()));
  Json list = Json::array();
  int failures = 0;
  for (const auto& f : fs) {
    const auto r = sandwich_check(s, f, c.m, c.budget, grid, c.seed);
    failures += r.passed() ? 0 : 1;
    list.push_back({{"expr", to_json(f)}, {"report", to_json(r)}});
    rows.push_back({"repr-check", s.label(), s.dim(), r.sup_upper, alpha_or_nan(s), c.seed, c.budget});
  }
  Json out = {{"checks", list}, {"failures", failures}, {"grid_resolution", grid.resolution},
              {"covering_radius", grid.covering_radius}};
  if (failures > 0)
    throw CertificationError("repr-check: " + std::to_string(failures) + " sandwich assertion(s) failed");
  return out;
}

void validate(const RunConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end())
    throw InputError("unknown command \"" + c.command + "\"");
  if (c.m < 1) throw InputError("--m must be positive");
  if (c.budget < 1) throw InputError("--budget must be positive");
  if (c.restarts < 0) throw InputError("--restarts must be nonnegative");
  if (c.tol < 0) throw InputError("--tol must be nonnegative");
  if (c.grid < 0) throw InputError("--grid must be positive");
  if (!(c.alpha > 0 && c.alpha < 1)) throw InputError("--alpha must lie in (0, 1)");
  if (!(c.eta > 0)) throw InputError("--eta must be positive");
  if (c.runs < 0 || c.family_size < 1) throw InputError("--runs and --family-size must be positive");
  if (c.space.is_null()) throw InputError("--space required");
}

}  // namespace

Json config_to_json(const RunConfig& c) {
  Json j = {{"command", c.command}, {"m", c.m},         {"budget", c.budget}, {"restarts", c.restarts},
            {"seed", c.seed},       {"tol", c.tol},     {"grid", c.grid},     {"alpha", c.alpha},
            {"scales", c.scales},   {"lambdas", c.lambdas}, {"eta", c.eta},   {"runs", c.runs},
            {"family_size", c.family_size}, {"space", c.space}};
  j["exprs"] = c.exprs;
  j["tuple"] = c.tuple;
  j["dual"] = c.dual;
  return j;
}

RunConfig config_from_json(const Json& j) {
  try {
    RunConfig c;
    c.command = j.at("command").get<std::string>();
    c.m = j.at("m").get<int>();
    c.budget = j.at("budget").get<int>();
    c.restarts = j.at("restarts").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tol = j.at("tol").get<double>();
    c.grid = j.at("grid").get<int>();
    c.alpha = j.at("alpha").get<double>();
    c.scales = j.at("scales").get<std::vector<double>>();
    c.lambdas = j.at("lambdas").get<std::vector<double>>();
    c.eta = j.at("eta").get<double>();
    c.runs = j.at("runs").get<int>();
    c.family_size = j.at("family_size").get<int>();
    c.space = j.at("space");
    c.exprs = j.at("exprs").get<std::vector<Json>>();
    c.tuple = j.at("tuple");
    c.dual = j.at("dual");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("embedded config: ") + e.what());
  }
}

Json run(const RunConfig& c, std::vector<CsvRow>& rows) {
  validate(c);
  const auto s = space_from_json(c.space);
  Json result;
  if (c.command == "norm") result = run_norm(c, s, rows);
  else if (c.command == "dual-norm") result = run_dual_norm(c, s, rows);
  else if (c.command == "admissible") result = run_admissible(c, s, rows);
  else if (c.command == "octa") result = run_octa(c, s, rows);
  else if (c.command == "slice-diam") result = run_slice_diam(c, s, rows);
  else if (c.command == "rough") result = run_rough(c, s, rows);
  else result = run_repr_check(c, s, rows);
  return {{"config", config_to_json(c)}, {"result", result}};
}

namespace {

void write_csv(const std::string& path, const std::vector<CsvRow>& rows, double seconds) {
  std::ostringstream out;
  out << "experiment,space,n,value,alpha,seed,budget,wall_time\n";
  for (const auto& r : rows)
    out << r.experiment << ',' << '"' << r.space << '"' << ',' << r.n << ',' << format_number(r.value) << ','
        << (std::isnan(r.alpha) ? std::string() : format_number(r.alpha)) << ',' << r.seed << ',' << r.budget << ','
        << format_number(seconds) << '\n';
  write_text_file(path, out.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified norm bounds in free Banach lattices over finite-dimensional spaces"};
  app.require_subcommand(1);

  RunConfig c;
  std::string space_arg, tuple_path, dual_path, out_path, csv_path, report_path;
  std::vector<std::string> expr_paths;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--space", space_arg, "Space descriptor file, or l1:N / l2:N / linf:N")->required();
    sub->add_option("--m", c.m, "Maximal tuple length")->check(CLI::PositiveNumber);
    sub->add_option("--budget", c.budget, "Search evaluations per tuple length")->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "Seed");
    sub->add_option("--out", out_path, "Report file (default: stdout)");
    sub->add_option("--csv", csv_path, "Summary CSV file");
  };
  const auto exprs = [&](CLI::App* sub, bool many) {
    auto* opt = sub->add_option("--expr", expr_paths, "Expression file");
    if (!many) opt->expected(1);
  };

  auto* norm = app.add_subcommand("norm", "Certified bounds on the norm of one expression");
  common(norm);
  exprs(norm, false);
  auto* dual = app.add_subcommand("dual-norm", "Bracket and lower bounds for a dual functional");
  common(dual);
  dual->add_option("--dual", dual_path, "Dual functional file")->required();
  auto* adm = app.add_subcommand("admissible", "Admissibility verdict for a dual tuple");
  common(adm);
  adm->add_option("--tuple", tuple_path, "Tuple file (array of dual vectors)")->required();
  adm->add_option("--tol", c.tol, "Tolerance")->check(CLI::NonNegativeNumber);
  auto* octa = app.add_subcommand("octa", "Octahedrality witness search");
  common(octa);
  exprs(octa, true);
  octa->add_option("--restarts", c.restarts, "Random starting points")->check(CLI::NonNegativeNumber);
  octa->add_option("--runs", c.runs, "Random families when no --expr is given")->check(CLI::NonNegativeNumber);
  octa->add_option("--family-size", c.family_size, "Elements per random family")->check(CLI::PositiveNumber);
  auto* slice = app.add_subcommand("slice-diam", "Certified diameter of a convex combination of slices");
  common(slice);
  exprs(slice, true);
  slice->add_option("--alpha", c.alpha, "Slice depth");
  slice->add_option("--lambdas", c.lambdas, "Convex weights")->delimiter(',');
  slice->add_option("--eta", c.eta, "Perturbation size")->check(CLI::PositiveNumber);
  slice->add_option("--runs", c.runs, "Random families when no --expr is given")->check(CLI::NonNegativeNumber);
  slice->add_option("--family-size", c.family_size, "Slices per random family")->check(CLI::PositiveNumber);
  auto* rough = app.add_subcommand("rough", "Roughness quotients at several scales");
  common(rough);
  exprs(rough, false);
  rough->add_option("--scales", c.scales, "Scales t")->delimiter(',');
  auto* repr = app.add_subcommand("repr-check", "Sandwich check against the sup norm on the cube sphere");
  common(repr);
  exprs(repr, true);
  repr->add_option("--grid", c.grid, "Grid resolution per facet edge")->check(CLI::NonNegativeNumber);
  repr->add_option("--runs", c.runs, "Random expressions when no --expr is given")->check(CLI::NonNegativeNumber);
  auto* replay = app.add_subcommand("replay", "Re-run the configuration embedded in a report");
  replay->add_option("report", report_path, "Report file")->required();
  replay->add_option("--out", out_path, "Report file (default: stdout)");
  replay->add_option("--csv", csv_path, "Summary CSV file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (replay->parsed()) {
      c = config_from_json(read_json_file(report_path).at("config"));
    } else {
      c.command = app.get_subcommands().front()->get_name();
      c.space = load_space(space_arg);
      for (const auto& p : expr_paths) c.exprs.push_back(to_json(expr_from_json(read_json_file(p))));
      if (!tuple_path.empty()) c.tuple = read_json_file(tuple_path);
      if (!dual_path.empty()) c.dual = read_json_file(dual_path);
    }
    std::vector<CsvRow> rows;
    const auto start = std::chrono::steady_clock::now();
    const Json report = run(c, rows);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const std::string text = dump_canonical(report) + "\n";
    if (out_path.empty())
      std::cout << text;
    else
      write_text_file(out_path, text);
    if (!csv_path.empty()) write_csv(csv_path, rows, seconds);
    return 0;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << '\n';
    return 2;
  } catch (const SearchError& e) {
    std::cerr << "search failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace fbl::cli
