// Command-line front end. Every subcommand reads and writes the file formats of
// circlestab/io.hpp; errors go to stderr as one JSON object.
//
// Exit status: 0 success, 2 invalid input or failed validation, 3 numerical
// or feasibility failure (no shell radius, no route, time limit).

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "circlestab/arcs.hpp"
#include "circlestab/complexes.hpp"
#include "circlestab/error.hpp"
#include "circlestab/flows.hpp"
#include "circlestab/geometry.hpp"
#include "circlestab/io.hpp"
#include "circlestab/random.hpp"
#include "circlestab/specseq.hpp"

namespace cs = circlestab;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kInfeasible = 3;

struct Options {
  std::size_t k = 5;
  std::optional<std::size_t> s;
  std::uint64_t seed = 0;
  int jitter = 0;
  double dt = 0.5;
  double t_max = 1e3;
  double resolution = 1.0 / 40;
  std::size_t steps = 256;
  std::string coeff = "Z";
  std::string field = "Q";
  int n = 0;
  std::size_t size = 3;
  std::size_t trials = 100;
  bool ordered = false;
  bool reduced = false;
  bool e1_only = false;
  std::optional<std::size_t> symmetric;
  std::optional<std::size_t> hyperoctahedral;
  std::string input;
  std::string second;
  std::string out;
  std::string trace;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    cs::write_file(path, text);
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::size_t thread_cap() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CIRCLESTAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
  }
  return n;
}

cs::Coefficients coefficients(const Options& o) { return cs::Coefficients::parse(o.coeff); }

// Over a field only the dimension is meaningful, so the label is F^n.
std::string group_label(const cs::AbelianGroup& g, const cs::Coefficients& coeff) {
  if (!coeff.is_field()) return g.to_string();
  if (g.rank == 0) return "0";
  return g.rank == 1 ? coeff.name() : coeff.name() + "^" + std::to_string(g.rank);
}

json groups_json(const std::vector<cs::AbelianGroup>& groups, int lo, const cs::Coefficients& coeff) {
  json arr = json::array();
  for (std::size_t i = 0; i < groups.size(); ++i)
    arr.push_back({{"degree", lo + static_cast<int>(i)},
                   {"rank", groups[i].rank},
                   {"torsion", groups[i].torsion},
                   {"group", group_label(groups[i], coeff)}});
  return arr;
}

std::size_t default_s(const Options& o, std::size_t k) { return o.s.value_or(k / 2); }

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o) {
  cs::GeneratorParams params;
  params.jitter_moves = o.jitter;
  emit(o.out, cs::write_configuration(cs::random_unlinked(o.k, o.seed, params)));
  return kOk;
}

int cmd_check(const Options& o) {
  const auto cfg = cs::read_configuration(cs::read_file(o.input));
  const std::size_t s = default_s(o, cfg.size());
  const auto c = cs::classify(cfg, s);
  print({{"valid", true},
         {"k", cfg.size()},
         {"s", s},
         {"complexity", cs::complexity(cfg)},
         {"good", cs::good_circles(cfg)},
         {"in_D", c.in_D},
         {"in_F", c.in_F}});
  return kOk;
}

int cmd_complexity(const Options& o) {
  const auto cfg = cs::read_configuration(cs::read_file(o.input));
  std::cout << cs::format_double(cs::complexity(cfg)) << '\n';
  return kOk;
}

int cmd_flow(const Options& o) {
  const auto cfg = cs::read_configuration(cs::read_file(o.input));
  const std::size_t s = default_s(o, cfg.size());
  const auto result = cs::run_to_good(cfg, s, {o.dt, o.t_max});
  if (!o.trace.empty()) cs::write_file(o.trace, cs::trace_csv(result.trace));
  if (!o.out.empty()) cs::write_file(o.out, cs::write_configuration(result.final_config));
  const auto& last = result.trace.back();
  print({{"steps", last.step},
         {"t", last.t},
         {"complexity", last.complexity},
         {"n_good", last.n_good},
         {"required", cfg.size() - s},
         {"halvings", result.halvings}});
  return kOk;
}

int cmd_resolve(const Options& o) {
  const auto cfg = cs::read_configuration(cs::read_file(o.input));
  cs::RouteOptions route;
  route.resolution = o.resolution;
  const auto simplex = cs::resolve(cfg, cs::good_circles(cfg), route);
  const auto report = cs::validate_simplex(cfg, simplex);
  cs::require(report.ok(), cs::ErrorCode::ValidationFailed, report.summary());
  emit(o.out, cs::write_simplex(simplex));
  return kOk;
}

int cmd_retract(const Options& o) {
  const auto cfg = cs::read_configuration(cs::read_file(o.input));
  const auto simplex = cs::read_simplex(cs::read_file(o.second));
  const auto result = cs::retract(cfg, simplex, o.steps);
  emit(o.trace, cs::retract_csv(result.trace));
  if (!o.out.empty()) cs::write_file(o.out, cs::write_configuration(result.final_config));
  return kOk;
}

int cmd_homology(const Options& o) {
  const auto text = cs::read_file(o.input);
  const auto coeff = coefficients(o);
  const json probe = json::parse(text, nullptr, false);
  const int lo = o.reduced ? -1 : 0;
  std::vector<cs::AbelianGroup> groups;
  if (probe.is_object() && probe.contains("cells")) {
    const auto set = cs::read_semisimplicial(text);
    groups = cs::homology(set, lo, std::max(set.dimension(), 0), coeff, o.reduced);
  } else {
    const auto k = cs::read_complex(text);
    groups = cs::homology(k, lo, std::max(k.dimension(), 0), coeff, o.reduced);
  }
  print({{"coefficients", coeff.name()}, {"homology", groups_json(groups, lo, coeff)}});
  return kOk;
}

int cmd_wcm(const Options& o) {
  const auto k = cs::read_complex(cs::read_file(o.input));
  const auto v = cs::is_weakly_cm(k, o.n);
  json failures = json::array();
  for (const auto& f : v.failures)
    failures.push_back({{"simplex", f.simplex}, {"required", f.required}, {"achieved", f.verdict.achieved}});
  print({{"n", o.n}, {"passed", v.passed()}, {"whole", v.whole.label()}, {"failures", failures}});
  return v.passed() ? kOk : kInvalid;
}

int cmd_injwords(const Options& o) {
  std::vector<cs::Vertex> letters(o.size);
  for (std::size_t i = 0; i < o.size; ++i) letters[i] = static_cast<cs::Vertex>(i);
  const auto coeff = coefficients(o);
  std::vector<cs::AbelianGroup> groups;
  int top = 0;
  if (o.ordered) {
    const auto set = cs::ordered_injective_words(letters);
    top = set.dimension();
    groups = cs::homology(set, 0, std::max(top, 0), coeff);
    if (!o.out.empty()) cs::write_file(o.out, cs::write_semisimplicial(set));
  } else {
    const auto k = cs::injective_words(letters);
    top = k.dimension();
    groups = cs::homology(k, 0, std::max(top, 0), coeff);
    if (!o.out.empty()) cs::write_file(o.out, cs::write_complex(k));
  }
  print({{"size", o.size}, {"ordered", o.ordered}, {"dimension", top}, {"coefficients", coeff.name()}, {"homology", groups_json(groups, 0, coeff)}});
  return kOk;
}

int cmd_specseq(const Options& o) {
  const auto diagram = cs::read_diagram(cs::read_file(o.input));
  const auto coeff = cs::Coefficients::parse(o.field);
  if (o.e1_only) {
    const auto page = cs::e1(diagram, coeff);
    emit(o.trace.empty() ? "-" : o.trace, cs::page_csv({page}));
    return kOk;
  }
  const auto conv = cs::converge(diagram, coeff);
  if (!o.trace.empty()) cs::write_file(o.trace, cs::page_csv(conv.pages));
  json totals = json::array();
  for (int n = conv.n_min; n < conv.n_min + static_cast<int>(conv.target.size()); ++n)
    totals.push_back({{"n", n}, {"e_infinity", conv.e_infinity().total(n)},
                      {"relative", conv.target[static_cast<std::size_t>(n - conv.n_min)]}});
  print({{"coefficients", coeff.name()},
         {"pages", conv.pages.size()},
         {"stabilized_at", conv.stabilized_at},
         {"match", conv.match},
         {"degrees", totals}});
  return conv.match ? kOk : kInvalid;
}

int cmd_abelianize(const Options& o) {
  cs::Presentation p;
  std::string label;
  if (o.symmetric) {
    p = cs::symmetric_group_presentation(*o.symmetric);
    label = "S" + std::to_string(*o.symmetric);
  } else if (o.hyperoctahedral) {
    p = cs::hyperoctahedral_presentation(*o.hyperoctahedral);
    label = "B" + std::to_string(*o.hyperoctahedral);
  } else {
    cs::require(!o.input.empty(), cs::ErrorCode::InvalidArgument,
                "abelianize needs a presentation file, --symmetric or --hyperoctahedral");
    p = cs::read_presentation(cs::read_file(o.input));
    label = o.input;
  }
  const auto g = cs::abelianize(p);
  print({{"group", label}, {"rank", g.rank}, {"torsion", g.torsion}, {"abelianization", g.to_string()}});
  return kOk;
}

// Batch statistics over seeded flows; trial i uses the stream (seed, i).
int cmd_report(const Options& o) {
  struct Trial {
    std::size_t k = 0;
    bool ok = false;
    std::string error;
    std::size_t steps = 0;
    double complexity_in = 0, complexity_out = 0;
    std::size_t good_in = 0, good_out = 0;
  };
  std::vector<Trial> trials(o.trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      Trial& t = trials[i];
      t.k = 2 + i % std::max<std::size_t>(o.k - 1, 1);
      try {
        cs::GeneratorParams params;
        params.jitter_moves = o.jitter * static_cast<int>(t.k);
        const auto cfg = cs::random_unlinked(t.k, cs::KeyedRng(o.seed, i).next(), params);
        t.complexity_in = cs::complexity(cfg);
        t.good_in = cs::good_circles(cfg).size();
        const auto r = cs::run_to_good(cfg, default_s(o, t.k), {o.dt, o.t_max});
        t.steps = r.trace.back().step;
        t.complexity_out = r.trace.back().complexity;
        t.good_out = r.trace.back().n_good;
        t.ok = true;
      } catch (const cs::Error& e) {
        t.error = std::string(cs::to_string(e.code()));
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < std::min(thread_cap(), trials.size()); ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::map<std::string, std::size_t> failures;
  std::size_t ok = 0, flowed = 0, steps = 0;
  double worst_in = 0, worst_out = 0;
  for (const auto& t : trials) {
    if (!t.ok) {
      ++failures[t.error];
      continue;
    }
    ++ok;
    if (t.steps > 0) ++flowed;
    steps += t.steps;
    worst_in = std::max(worst_in, t.complexity_in);
    worst_out = std::max(worst_out, t.complexity_out);
  }
  print({{"trials", trials.size()},
         {"succeeded", ok},
         {"needed_flow", flowed},
         {"total_steps", steps},
         {"max_complexity_in", worst_in},
         {"max_complexity_out", worst_out},
         {"failures", failures}});
  return failures.empty() ? kOk : kInfeasible;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"circlestab: configurations of unlinked circles and their combinatorial models"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML/INI file (flags win over the file)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Options o;
  const std::map<std::string, int (*)(const Options&)> handlers = {
      {"gen", cmd_gen},         {"check", cmd_check},       {"complexity", cmd_complexity},
      {"flow", cmd_flow},       {"resolve", cmd_resolve},   {"retract", cmd_retract},
      {"homology", cmd_homology}, {"wcm", cmd_wcm},         {"injwords", cmd_injwords},
      {"specseq", cmd_specseq}, {"abelianize", cmd_abelianize}, {"report", cmd_report}};

  auto* gen = app.add_subcommand("gen", "generate a random unlinked configuration");
  gen->add_option("--k", o.k, "number of circles")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "64-bit seed");
  gen->add_option("--jitter", o.jitter, "rigid and threading moves after placement");
  gen->add_option("--out", o.out, "output configuration file (stdout if absent)");

  auto* check = app.add_subcommand("check", "validate and classify a configuration");
  check->add_option("config", o.input)->required();
  check->add_option("--s", o.s, "classify against k - s good circles (default floor(k/2))");

  auto* cx = app.add_subcommand("complexity", "print the complexity of a configuration");
  cx->add_option("config", o.input)->required();

  auto* flow = app.add_subcommand("flow", "shrink until at least k - s circles are good");
  flow->add_option("config", o.input)->required();
  flow->add_option("--s", o.s);
  flow->add_option("--dt", o.dt)->check(CLI::PositiveNumber);
  flow->add_option("--t-max", o.t_max);
  flow->add_option("--trace", o.trace, "CSV trace file");
  flow->add_option("--out", o.out, "final configuration file");

  auto* resolve = app.add_subcommand("resolve", "route arcs to every good circle");
  resolve->add_option("config", o.input)->required();
  resolve->add_option("--resolution", o.resolution)->check(CLI::PositiveNumber);
  resolve->add_option("--out", o.out, "output simplex file (stdout if absent)");

  auto* retract = app.add_subcommand("retract", "retract arc-carrying circles to their entry points");
  retract->add_option("config", o.input)->required();
  retract->add_option("simplex", o.second)->required();
  retract->add_option("--steps", o.steps)->check(CLI::PositiveNumber);
  retract->add_option("--trace", o.trace, "CSV trace file (stdout if absent)");
  retract->add_option("--out", o.out, "final configuration file");

  auto* hom = app.add_subcommand("homology", "homology of a complex or semisimplicial set file");
  hom->add_option("file", o.input)->required();
  hom->add_option("--coeff", o.coeff, "Z, Q, Fp or F<prime>");
  hom->add_flag("--reduced", o.reduced);

  auto* wcm = app.add_subcommand("wcm", "weak Cohen-Macaulay check");
  wcm->add_option("complex", o.input)->required();
  wcm->add_option("--n", o.n)->required();

  auto* inj = app.add_subcommand("injwords", "complex of injective words on {0..size-1}");
  inj->add_option("--size", o.size)->required()->check(CLI::Range(1, 8));
  inj->add_flag("--ordered", o.ordered, "ordered (semisimplicial) version");
  inj->add_option("--coeff", o.coeff);
  inj->add_option("--out", o.out, "write the complex");

  auto* ss = app.add_subcommand("specseq", "spectral sequence of an augmented diagram");
  ss->add_option("diagram", o.input)->required();
  ss->add_option("--coeff", o.field, "Q, Fp or F<prime>");
  ss->add_flag("--e1", o.e1_only, "only dump the first page");
  ss->add_option("--trace", o.trace, "page dump CSV");

  auto* ab = app.add_subcommand("abelianize", "abelianization of a finite presentation");
  ab->add_option("presentation", o.input);
  ab->add_option("--symmetric", o.symmetric);
  ab->add_option("--hyperoctahedral", o.hyperoctahedral);

  auto* rep = app.add_subcommand("report", "aggregate statistics over seeded flows");
  rep->add_option("--trials", o.trials);
  rep->add_option("--k", o.k, "largest k (trials cycle through 2..k)")->check(CLI::Range(2, 64));
  rep->add_option("--s", o.s);
  rep->add_option("--seed", o.seed);
  rep->add_option("--jitter", o.jitter, "moves per circle");
  rep->add_option("--dt", o.dt)->check(CLI::PositiveNumber);
  rep->add_option("--t-max", o.t_max);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  auto report_error = [](const std::string& code, const std::string& message) {
    std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
  };
  try {
    for (const auto& [name, handler] : handlers)
      if (app.got_subcommand(name)) return handler(o);
  } catch (const cs::Error& e) {
    report_error(std::string(cs::to_string(e.code())), e.what());
    return cs::is_feasibility_error(e.code()) ? kInfeasible : kInvalid;
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return kInvalid;
  }
  return kInvalid;
}
