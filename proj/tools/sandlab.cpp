#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sandlab/algebra.hpp"
#include "sandlab/errors.hpp"
#include "sandlab/exact2d.hpp"
#include "sandlab/growth.hpp"
#include "sandlab/io.hpp"
#include "sandlab/parallel.hpp"
#include "sandlab/rotor.hpp"
#include "sandlab/sandpile.hpp"
#include "sandlab/treewalk.hpp"

using json = nlohmann::json;
using namespace sandlab;

namespace {

struct Flags {
  int box = 2;
  int dim = 2;
  int gamma = 0;
  std::uint64_t seed = 0;
  std::int64_t samples = 10000;
  std::string out;
  double tol = 1e-12;
  double r = 0.5;
  std::string format = "json";
};

struct Run {
  std::string name;
  CLI::App* sub = nullptr;
  Flags f;
  json tolerances = json::object();
  std::string started;
  std::vector<std::string> written;
};

void emit(Run& run, const std::string& file, const std::string& content) {
  if (run.f.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  ensure_directory(run.f.out);
  atomic_write(join_path(run.f.out, file), content);
  run.written.push_back(file);
}

void emit_json(Run& run, const std::string& file, const json& j) { emit(run, file, j.dump(2) + "\n"); }

json flag_table(const CLI::App* sub) {
  json flags = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_name(false, true);
    if (name.empty() || name == "--help" || name == "-h") continue;
    std::string key = opt->get_lnames().empty() ? name : opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      if (opt->get_type_size() == 0)
        flags[key] = true;
      else if (res.size() == 1)
        flags[key] = res.front();
      else
        flags[key] = res;
    } else if (!opt->get_default_str().empty()) {
      flags[key] = opt->get_default_str();
    }
  }
  return flags;
}

void write_manifest(Run& run) {
  if (run.f.out.empty()) return;
  json m;
  m["subcommand"] = run.name;
  m["flags"] = flag_table(run.sub);
  m["seed"] = run.f.seed;
  m["version"] = SANDLAB_VERSION;
  m["tolerances"] = run.tolerances;
  m["threads"] = thread_count();
  m["started"] = run.started;
  m["stopped"] = utc_timestamp();
  m["files"] = run.written;
  ensure_directory(run.f.out);
  atomic_write(join_path(run.f.out, "manifest.json"), m.dump(2) + "\n");
}

std::string sandpile_csv(const SinkedMultigraph& g, const Sandpile& eta, const Odometer* odo) {
  std::string out;
  std::vector<std::string> head;
  for (int k = 0; k < g.dim(); ++k) head.push_back("x" + std::to_string(k + 1));
  head.push_back("height");
  if (odo) head.push_back("odometer");
  out += csv_row(head);
  for (int v = 0; v < g.size(); ++v) {
    std::vector<std::string> row;
    for (int c : g.coord(v)) row.push_back(std::to_string(c));
    row.push_back(std::to_string(eta[v]));
    if (odo) row.push_back(std::to_string((*odo)[v]));
    out += csv_row(row);
  }
  return out;
}

// ---- subcommands ----

int cmd_graph(Run& run) {
  const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
  json j;
  j["box"] = run.f.box;
  j["dim"] = run.f.dim;
  j["gamma"] = run.f.gamma;
  j["vertices"] = g.size();
  j["edges"] = g.edge_total();
  if (g.size() <= 400) {
    j["det_reduced_laplacian"] = det_reduced_laplacian(g).str();
    json inv = json::array();
    for (const auto& d : group_invariants(g)) inv.push_back(d.str());
    j["invariant_factors"] = inv;
  } else {
    j["logdet_reduced_laplacian"] = logdet_reduced_laplacian(g);
  }
  if (g.size() > 0) j["green_origin_origin"] = green(g, g.origin(), g.origin());
  if (run.f.format == "edges") {
    std::ostringstream os;
    write_edge_list(os, g);
    emit(run, "graph.txt", os.str());
  } else {
    emit_json(run, "graph.json", j);
  }
  return 0;
}

int cmd_stabilize(Run& run, std::int64_t add_chips, std::int64_t fill) {
  const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
  Sandpile xi(g.size(), fill);
  if (fill < 0) throw InvalidArgument("--fill must be nonnegative");
  if (add_chips < 0) throw InvalidArgument("--add must be nonnegative");
  xi[g.origin()] += add_chips;
  const Stabilization s = stabilize(g, xi);
  std::int64_t topplings = 0;
  for (auto v : s.odometer) topplings += v;
  json j;
  j["box"] = run.f.box;
  j["added_at_origin"] = add_chips;
  j["fill"] = fill;
  j["topplings"] = topplings;
  j["origin_height"] = s.result[g.origin()];
  j["origin_odometer"] = s.odometer[g.origin()];
  j["mass_after"] = mass(s.result);
  if (run.f.format == "csv")
    emit(run, "stabilized.csv", sandpile_csv(g, s.result, &s.odometer));
  else
    emit_json(run, "stabilize.json", j);
  if (!run.f.out.empty() && run.f.format != "csv") emit(run, "stabilized.csv", sandpile_csv(g, s.result, &s.odometer));
  return 0;
}

int cmd_chain(Run& run) {
  const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
  const MarkovSummary m = markov_run(g, {}, run.f.samples, run.f.seed);
  json j;
  j["box"] = run.f.box;
  j["steps"] = m.steps;
  j["mean_size"] = m.mean_size;
  j["mean_toppled"] = m.mean_toppled;
  j["final_recurrent"] = is_recurrent(g, m.final_state);
  j["distinct_states_visited"] = m.visits.size();
  j["warnings"] = m.warnings;
  emit_json(run, "chain.json", j);
  if (!run.f.out.empty()) emit(run, "final_state.csv", sandpile_csv(g, m.final_state, nullptr));
  return 0;
}

int cmd_sample(Run& run, int window) {
  if (run.f.dim != 2) throw InvalidArgument("sample supports --dim 2");
  if (window < 0) window = run.f.box;
  const HeightFrequencies h = height_frequencies(run.f.box, window, run.f.samples, run.f.seed, 2);
  const HeightClosedForms cf = height_probabilities_closed_form();
  std::string csv = csv_row({"height", "probability", "std_error", "closed_form"});
  json probs = json::array();
  for (int i = 0; i < 4; ++i) {
    csv += csv_row({std::to_string(i), format_double(h.prob[i]), format_double(h.std_error[i]),
                    format_double(cf.p[i].value())});
    probs.push_back({{"height", i}, {"p", h.prob[i]}, {"std_error", h.std_error[i]},
                     {"closed_form", cf.p[i].value()}});
  }
  json j;
  j["box"] = run.f.box;
  j["window"] = window;
  j["samples"] = h.samples;
  j["p"] = probs;
  j["mean_height"] = h.mean;
  j["mean_height_std_error"] = h.mean_std_error;
  j["zeta_closed_form"] = cf.zeta.value();
  emit(run, "heights.csv", csv);
  emit_json(run, "heights.json", j);
  return 0;
}

int cmd_bijection(Run& run) {
  const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
  Rng rng = make_rng(run.f.seed);
  const Sandpile eta = sample_recurrent(g, rng);
  const SpanningTree t = bijection_to_tree(g, eta);
  const Sandpile back = tree_to_sandpile(g, t);
  std::string csv = csv_row({"vertex", "height", "parent", "burn_time"});
  for (int v = 0; v < g.size(); ++v)
    csv += csv_row({std::to_string(v), std::to_string(eta[v]), std::to_string(t.parent[v]),
                    std::to_string(t.burn_time[v])});
  json j;
  j["box"] = run.f.box;
  j["round_trip_ok"] = back == eta;
  j["burn_rounds"] = burning_test(g, eta).record.rounds.size();
  emit(run, "bijection.csv", csv);
  emit_json(run, "bijection.json", j);
  if (back != eta) throw InvariantViolation("tree_to_sandpile did not invert bijection_to_tree");
  return 0;
}

int cmd_group(Run& run) {
  const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
  const Sandpile id = group_identity(g);
  json j;
  j["box"] = run.f.box;
  j["identity_mass"] = mass(id);
  j["identity_is_idempotent"] = group_add(g, id, id) == id;
  if (g.size() <= 400) {
    j["order"] = det_reduced_laplacian(g).str();
    json inv = json::array();
    for (const auto& d : group_invariants(g)) inv.push_back(d.str());
    j["invariant_factors"] = inv;
  }
  emit_json(run, "group.json", j);
  if (run.f.dim == 2 && run.f.gamma == 0 && !run.f.out.empty()) emit(run, "identity.pgm", identity_image(run.f.box));
  return 0;
}

int cmd_tree(Run& run, int radius) {
  json j;
  if (radius > 0) {
    const LoopingEstimate e = looping_constant_estimate(radius, run.f.samples, run.f.seed);
    j["looping_radius"] = e.radius;
    j["looping_samples"] = e.samples;
    j["looping_mean"] = e.mean;
    j["looping_std_error"] = e.std_error;
    j["zeta_from_looping"] = e.zeta;
  }
  const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
  const SpanningTree t = wilson_ust(g, -1, run.f.seed);
  std::string csv;
  {
    std::vector<std::string> head{"vertex"};
    for (int k = 0; k < g.dim(); ++k) head.push_back("x" + std::to_string(k + 1));
    head.push_back("parent");
    head.push_back("depth");
    csv += csv_row(head);
  }
  for (int v = 0; v < g.size(); ++v) {
    std::vector<std::string> row{std::to_string(v)};
    for (int c : g.coord(v)) row.push_back(std::to_string(c));
    row.push_back(std::to_string(t.parent[v]));
    row.push_back(std::to_string(t.burn_time[v]));
    csv += csv_row(row);
  }
  j["box"] = run.f.box;
  j["tree_depth_origin"] = t.burn_time[g.origin()];
  emit(run, "tree.csv", csv);
  emit_json(run, "tree.json", j);
  return 0;
}

int cmd_rotor(Run& run, std::int64_t aggregate, bool random_rotors) {
  json j;
  if (aggregate > 0) {
    const Aggregate a = rotor_aggregate(aggregate, run.f.dim, random_rotors ? RotorInit::Random : RotorInit::Constant,
                                        run.f.seed);
    double rmax = 0, rmin = 1e300;
    std::map<std::vector<int>, char> occ;
    for (const auto& p : a.occupied) {
      double s = 0;
      for (int c : p) s += double(c) * c;
      rmax = std::max(rmax, std::sqrt(s));
      occ[p] = 1;
    }
    // inner radius: nearest unoccupied site
    const int w = a.window;
    if (a.dim == 2) {
      for (int x = -w - 1; x <= w + 1; ++x)
        for (int y = -w - 1; y <= w + 1; ++y)
          if (!occ.count({x, y})) rmin = std::min(rmin, std::sqrt(double(x) * x + double(y) * y));
    }
    j["aggregate_size"] = a.occupied.size();
    j["aggregate_steps"] = a.steps;
    j["outer_radius"] = rmax;
    if (a.dim == 2) j["inner_radius"] = rmin;
    if (a.dim == 2 && !run.f.out.empty()) {
      const int side = 2 * w + 1;
      std::vector<std::int64_t> px(std::size_t(side) * side, 0);
      for (const auto& p : a.occupied) px[std::size_t(p[1] + w) * side + (p[0] + w)] = 1;
      emit(run, "aggregate.pgm", pgm_string(side, side, px, 1));
    }
  } else {
    const SinkedMultigraph g = wired_box(run.f.box, run.f.dim, run.f.gamma);
    RotorConfig rho(g.size(), 0);
    Sandpile zero(g.size(), 0);
    // route one chip per vertex to reach an acyclic configuration
    rho = chip_stabilize(g, rho, Sandpile(g.size(), 1));
    j["acyclic_after_routing"] = is_acyclic(g, rho);
    const RotorConfig back = group_action(g, zero, rho);
    j["zero_class_fixes"] = back == rho;
    std::string csv = csv_row({"vertex", "rotor_target"});
    for (int v = 0; v < g.size(); ++v) csv += csv_row({std::to_string(v), std::to_string(g.slot_target(v, rho[v]))});
    emit(run, "rotors.csv", csv);
  }
  j["box"] = run.f.box;
  emit_json(run, "rotor.json", j);
  return 0;
}

int cmd_exact2d(Run& run, bool report, int n, int kernel_radius, int mesh, int sum_radius) {
  json j;
  run.tolerances["killed_green_tol"] = run.f.tol;
  run.tolerances["fourier_mesh"] = mesh;
  const KernelTable a(kernel_radius);
  j["kernel"] = {{"radius", kernel_radius},
                 {"A(0,-1)", a(0, 1)},
                 {"A(-1,-1)", a(1, 1)},
                 {"A(0,-2)", a(0, 2)},
                 {"A(-1,-2)", a(1, 2)},
                 {"harmonic_residual", double(a.harmonic_residual())},
                 {"origin_defect", double(a.origin_defect())}};
  j["p0_determinant"] = {{"n", n}, {"value", height0_probability(n)}};
  j["p0_infinite_volume"] = double(one_point_determinant(a));
  const HeightClosedForms cf = height_probabilities_closed_form();
  j["closed_forms"] = {{"p0", cf.p[0].value()}, {"p1", cf.p[1].value()}, {"p2", cf.p[2].value()},
                       {"p3", cf.p[3].value()}, {"zeta", cf.zeta.value()}};
  if (report) {
    j["sum_Mo"] = {{"L", sum_radius}, {"value", double(sum_Mo_truncated(sum_radius))}};
    const PairCorrelation pc = pair_correlation_00({50, 0});
    j["pair_correlation_00"] = {{"y", {50, 0}},
                                {"covariance", double(pc.covariance)},
                                {"asymptote", double(pc.asymptote)}};
    const PriezzhevCheck pz = priezzhev_cross_check(run.f.r, 60, mesh);
    j["priezzhev_cross_check"] = {{"r", pz.r},
                                  {"lattice_radius", pz.lattice_radius},
                                  {"mesh", pz.mesh},
                                  {"green_grid", pz.green_grid},
                                  {"lattice", double(pz.lattice)},
                                  {"fourier", double(pz.fourier)},
                                  {"difference", double(pz.difference)}};
    j["killed_potential"] = {{"r", run.f.r}, {"z", {1, 0}}, {"value", killed_potential({1, 0}, run.f.r, run.f.tol)}};
  }
  emit_json(run, "exact2d.json", j);
  return 0;
}

struct GrowthOptions {
  std::string mode = "relax";
  std::int64_t n = 10000;
  std::int64_t h = 0;
  double mass = 0;
  int mesh = 64;
  std::string background = "constant";
  int base = 2;
  int modulus = 2;
  double eps = 0.1;
  int radius = 500;
  std::vector<int> sizes{100, 1000, 10000};
  std::string law = "bernoulli";
};

MassLaw parse_law(const std::string& s) {
  MassLaw law;
  if (s == "bernoulli") {
    law.values = {0, 1};
    law.probs = {0.5, 0.5};
  } else if (s == "two") {
    law.values = {2};
    law.probs = {1.0};
  } else if (s == "zero-two") {
    law.values = {0, 2};
    law.probs = {0.5, 0.5};
  } else {
    throw InvalidArgument("unknown mass law " + s + " (bernoulli, two, zero-two)");
  }
  return law;
}

int cmd_growth(Run& run, const GrowthOptions& o) {
  json j;
  j["mode"] = o.mode;
  if (o.mode == "relax") {
    const RelaxationResult r = relax_point_mass(o.n, o.h, run.f.dim);
    j["n"] = o.n;
    j["h"] = o.h;
    j["visited"] = r.visited_count;
    j["topplings"] = r.topplings;
    j["inner_radius"] = r.inner_radius();
    j["outer_radius"] = r.outer_radius();
    j["outer_sup_radius"] = r.outer_sup_radius();
    if (run.f.dim == 2 && !run.f.out.empty()) {
      const int side = r.field.side();
      std::vector<std::int64_t> px(r.height.begin(), r.height.end());
      std::int64_t top = 1;
      for (auto v : px) top = std::max(top, v);
      for (auto& v : px) v = std::max<std::int64_t>(v, 0);
      emit(run, "relax.pgm", pgm_string(side, side, px, top));
    }
  } else if (o.mode == "divisible") {
    run.tolerances["divisible_tol"] = run.f.tol;
    const double m = o.mass > 0 ? o.mass : double(o.n);
    const DivisibleResult d = divisible_sandpile(m, run.f.dim, run.f.tol);
    j["mass"] = m;
    j["occupied"] = d.occupied_count;
    j["sweeps"] = d.sweeps;
    j["total_mass"] = d.total_mass;
    j["inner_radius"] = d.inner_radius();
    j["outer_radius"] = d.outer_radius();
  } else if (o.mode == "profile") {
    run.tolerances["profile_mesh"] = o.mesh;
    const Profile p = scaled_profile(o.n, run.f.dim, o.mesh);
    j["n"] = o.n;
    j["mesh"] = p.mesh;
    j["extent"] = p.extent;
    j["integral"] = p.integral();
    j["max"] = p.max_value();
    if (p.dim == 2) {
      std::string csv = csv_row({"i", "j", "value"});
      for (int a = 0; a < p.mesh; ++a)
        for (int b = 0; b < p.mesh; ++b)
          csv += csv_row({std::to_string(a), std::to_string(b), format_double(p.values[std::size_t(a) * p.mesh + b])});
      emit(run, "profile.csv", csv);
    }
  } else if (o.mode == "explode") {
    Background bg;
    if (o.background == "constant")
      bg.kind = Background::Kind::Constant;
    else if (o.background == "lambda")
      bg.kind = Background::Kind::Lambda;
    else if (o.background == "bernoulli")
      bg.kind = Background::Kind::Bernoulli;
    else
      throw InvalidArgument("unknown background " + o.background);
    bg.base = o.base;
    bg.m = o.modulus;
    bg.eps = o.eps;
    bg.seed = run.f.seed;
    const ExplosionVerdict v = explosion_probe(bg, o.n, o.radius, run.f.dim);
    j["background"] = bg.describe();
    j["n"] = o.n;
    j["max_radius"] = v.max_radius;
    j["reached_boundary"] = v.reached_boundary;
    j["topplings"] = v.topplings;
    j["toppled_radius"] = v.toppled_radius;
    j["verdict"] = v.verdict;
    j["caveat"] = v.caveat;
  } else if (o.mode == "probe") {
    const MassLaw law = parse_law(o.law);
    const auto trace = stabilizability_probe(run.f.dim, law, o.sizes, run.f.seed);
    json t = json::array();
    for (const auto& p : trace) t.push_back({{"L", p.L}, {"odometer_origin", p.odometer_at_origin}, {"topplings", p.topplings}});
    j["law"] = law.describe();
    j["trace"] = t;
    j["classification"] = classify_trace(trace);
    j["caveat"] = "finite boxes only; stabilizability is an infinite-volume property";
  } else if (o.mode == "dissipative") {
    const DissipativeCheck c = dissipative_green_check(run.f.gamma, run.f.dim, run.f.box, run.f.samples, run.f.seed);
    j["gamma"] = c.gamma;
    j["box"] = c.n;
    j["green_origin"] = c.green_origin;
    j["max_abs_z"] = c.max_abs_z;
  } else {
    throw InvalidArgument("unknown growth mode " + o.mode);
  }
  emit_json(run, "growth.json", j);
  return 0;
}

int cmd_report(Run& run) {
  // Quick tour of every module at small sizes.
  json j;
  {
    const SinkedMultigraph g = wired_box(1, 2);
    j["box1_recurrent_count"] = enumerate_recurrent(g).size();
    j["box1_det"] = det_reduced_laplacian(g).str();
    const Sandpile id = group_identity(wired_box(8, 2));
    j["box8_identity_idempotent"] = group_add(wired_box(8, 2), id, id) == id;
  }
  {
    const HeightFrequencies h = height_frequencies(16, 4, std::max<std::int64_t>(2, run.f.samples / 10), run.f.seed);
    j["sample_box16_window4_mean_height"] = h.mean;
  }
  {
    const KernelTable a(20);
    j["kernel_A(-1,-1)"] = a(1, 1);
    j["p0_infinite_volume"] = double(one_point_determinant(a));
    j["p0_box16"] = height0_probability(16);
  }
  {
    const RelaxationResult r = relax_point_mass(1000, 0, 2);
    j["relax_1000_inner_radius"] = r.inner_radius();
    j["relax_1000_outer_radius"] = r.outer_radius();
  }
  {
    const Aggregate a = rotor_aggregate(1000, 2);
    j["rotor_1000_size"] = a.occupied.size();
  }
  {
    const LoopingEstimate e = looping_constant_estimate(32, std::max<std::int64_t>(2, run.f.samples / 10), run.f.seed);
    j["looping_R32_mean"] = e.mean;
    j["looping_R32_std_error"] = e.std_error;
  }
  emit_json(run, "report.json", j);
  return 0;
}

void add_common(CLI::App* sub, Flags& f, bool box = true) {
  if (box) {
    sub->add_option("--box", f.box, "half-width n of the wired box [-n, n]^d")->capture_default_str();
    sub->add_option("--dim", f.dim, "lattice dimension")->capture_default_str();
    sub->add_option("--gamma", f.gamma, "extra sink edges per vertex")->capture_default_str();
  }
  sub->add_option("--seed", f.seed, "64-bit seed")->capture_default_str();
  sub->add_option("--samples", f.samples, "Monte Carlo samples or chain steps")->capture_default_str();
  sub->add_option("--out", f.out, "output directory (stdout when absent)");
  sub->add_option("--tol", f.tol, "numerical tolerance")->capture_default_str();
  sub->add_option("--r", f.r, "killing parameter r < 1")->capture_default_str();
  sub->add_option("--format", f.format, "json, csv or edges")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sandlab: abelian sandpile experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", SANDLAB_VERSION);

  Run run;
  std::map<std::string, std::function<int()>> actions;

  auto* graph = app.add_subcommand("graph", "wired box statistics");
  add_common(graph, run.f);
  actions["graph"] = [&] { return cmd_graph(run); };

  std::int64_t add_chips = 0, fill = 0;
  auto* stab = app.add_subcommand("stabilize", "stabilize chips added at the origin");
  add_common(stab, run.f);
  stab->add_option("--add", add_chips, "chips added at the origin")->capture_default_str();
  stab->add_option("--fill", fill, "constant starting height")->capture_default_str();
  actions["stabilize"] = [&] { return cmd_stabilize(run, add_chips, fill); };

  auto* chain = app.add_subcommand("chain", "sandpile Markov chain, --samples steps");
  add_common(chain, run.f);
  actions["chain"] = [&] { return cmd_chain(run); };

  int window = -1;
  auto* sample = app.add_subcommand("sample", "height frequencies under the stationary measure");
  add_common(sample, run.f);
  sample->add_option("--window", window, "half-width of the counting window (default: whole box)");
  actions["sample"] = [&] { return cmd_sample(run, window); };

  auto* bij = app.add_subcommand("bijection", "burning bijection round trip on a stationary sample");
  add_common(bij, run.f);
  actions["bijection"] = [&] { return cmd_bijection(run); };

  auto* group = app.add_subcommand("group", "sandpile group and identity image");
  add_common(group, run.f);
  actions["group"] = [&] { return cmd_group(run); };

  int radius = 0;
  auto* tree = app.add_subcommand("tree", "uniform spanning tree and looping constant");
  add_common(tree, run.f);
  tree->add_option("--radius", radius, "LERW radius for the looping constant (0 skips it)")->capture_default_str();
  actions["tree"] = [&] { return cmd_tree(run, radius); };

  std::int64_t aggregate = 0;
  bool random_rotors = false;
  auto* rotor = app.add_subcommand("rotor", "rotor-router configurations and aggregation");
  add_common(rotor, run.f);
  rotor->add_option("--aggregate", aggregate, "number of chips for rotor aggregation")->capture_default_str();
  rotor->add_flag("--random-rotors", random_rotors, "random initial rotors");
  actions["rotor"] = [&] { return cmd_rotor(run, aggregate, random_rotors); };

  bool report = false;
  int exact_n = 64, kernel_radius = 60, mesh = 32, sum_radius = 100;
  auto* ex = app.add_subcommand("exact2d", "exact Z^2 quantities");
  add_common(ex, run.f, false);
  ex->add_flag("--report", report, "include the slower cross-checks");
  ex->add_option("--n", exact_n, "box size for the height-0 determinant")->capture_default_str();
  ex->add_option("--kernel-radius", kernel_radius, "potential kernel table radius")->capture_default_str();
  ex->add_option("--mesh", mesh, "Fourier quadrature mesh")->capture_default_str();
  ex->add_option("--sum-radius", sum_radius, "truncation radius of the M^o sum")->capture_default_str();
  actions["exact2d"] = [&] { return cmd_exact2d(run, report, exact_n, kernel_radius, mesh, sum_radius); };

  GrowthOptions go;
  auto* growth = app.add_subcommand("growth", "growth models and background probes");
  add_common(growth, run.f);
  growth->add_option("--mode", go.mode, "relax, divisible, profile, explode, probe or dissipative")
      ->capture_default_str();
  growth->add_option("--n", go.n, "particles")->capture_default_str();
  growth->add_option("--height", go.h, "constant background for relax")->capture_default_str();
  growth->add_option("--mass", go.mass, "real mass for divisible (default --n)");
  growth->add_option("--mesh", go.mesh, "profile mesh")->capture_default_str();
  growth->add_option("--background", go.background, "constant, lambda or bernoulli")->capture_default_str();
  growth->add_option("--base", go.base, "constant part of the background")->capture_default_str();
  growth->add_option("--modulus", go.modulus, "Lambda(m) modulus")->capture_default_str();
  growth->add_option("--eps", go.eps, "Bernoulli parameter")->capture_default_str();
  growth->add_option("--radius", go.radius, "probe radius")->capture_default_str();
  growth->add_option("--sizes", go.sizes, "box sizes for probe")->delimiter(',')->capture_default_str();
  growth->add_option("--law", go.law, "bernoulli, two or zero-two")->capture_default_str();
  actions["growth"] = [&] { return cmd_growth(run, go); };

  auto* rep = app.add_subcommand("report", "small run of every module");
  add_common(rep, run.f, false);
  actions["report"] = [&] { return cmd_report(run); };

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    run.name = sub->get_name();
    run.sub = sub;
  }
  run.started = utc_timestamp();
  try {
    if (run.f.format != "json" && run.f.format != "csv" && run.f.format != "edges")
      throw InvalidArgument("--format must be json, csv or edges");
    const int rc = actions.at(run.name)();
    write_manifest(run);
    return rc;
  } catch (const SizeError& e) {
    std::cerr << "sandlab: refused: " << e.what() << "\n";
    return 3;
  } catch (const InvalidArgument& e) {
    std::cerr << "sandlab: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "sandlab: invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "sandlab: error: " << e.what() << "\n";
    return 1;
  }
}
